"""Deterministic counting automata over symmetric alphabets.

Counts are exact Python ints throughout (they pass 2**64 within a few dozen
radii).  Spectral brackets come from Collatz-Wielandt ratios verified in exact
rational arithmetic, not from an eigensolver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInputError, ResourceLimitError
from .growth import NEG_INF, GrowthBracket
from .words import Alphabet, ReducedWord


@dataclass(frozen=True)
class CountSequence:
    """Exact per-length counts; counts[r] = number of accepted words of length r."""

    spheres: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.spheres)

    def __getitem__(self, r: int) -> int:
        return self.spheres[r]

    def __iter__(self):
        return iter(self.spheres)

    def balls(self) -> list[int]:
        out = []
        total = 0
        for c in self.spheres:
            total += c
            out.append(total)
        return out

    def to_csv(self) -> str:
        lines = ["r,sphere,ball"]
        total = 0
        for r, c in enumerate(self.spheres):
            total += c
            lines.append(f"{r},{c},{total}")
        return "\n".join(lines) + "\n"


class CountingAutomaton:
    """Deterministic partial automaton; transitions[(state, letter)] = state."""

    def __init__(
        self,
        alphabet: Alphabet,
        n_states: int,
        initial: int,
        accepting: Iterable[int],
        transitions: dict[tuple[int, int], int],
    ):
        self.alphabet = alphabet
        self.n_states = n_states
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.transitions = dict(transitions)

    def step(self, state: int, letter: int) -> int | None:
        return self.transitions.get((state, letter))

    def accepts(self, word: ReducedWord) -> bool:
        state = self.initial
        for x in word.letters:
            state = self.transitions.get((state, x))
            if state is None:
                return False
        return state in self.accepting

    def transfer_matrix(self) -> list[list[int]]:
        mat = [[0] * self.n_states for _ in range(self.n_states)]
        for (s, _), t in self.transitions.items():
            mat[s][t] += 1
        return mat

    def trimmed(self) -> "CountingAutomaton":
        """Restrict to states both reachable from the initial state and
        co-reachable to an accepting state; renumber in BFS order."""
        forward = {self.initial}
        frontier = [self.initial]
        succ: dict[int, list[int]] = {}
        pred: dict[int, list[int]] = {}
        for (s, _), t in self.transitions.items():
            succ.setdefault(s, []).append(t)
            pred.setdefault(t, []).append(s)
        while frontier:
            nxt = []
            for s in frontier:
                for t in succ.get(s, ()):
                    if t not in forward:
                        forward.add(t)
                        nxt.append(t)
            frontier = nxt
        backward = set(self.accepting)
        frontier = list(self.accepting)
        while frontier:
            nxt = []
            for t in frontier:
                for s in pred.get(t, ()):
                    if s not in backward:
                        backward.add(s)
                        nxt.append(s)
            frontier = nxt
        keep = forward & backward
        if self.initial not in keep:
            return CountingAutomaton(self.alphabet, 1, 0, (), {})
        order = {self.initial: 0}
        frontier = [self.initial]
        while frontier:
            nxt = []
            for s in frontier:
                for x in self.alphabet.letters:
                    t = self.transitions.get((s, x))
                    if t in keep and t not in order:
                        order[t] = len(order)
                        nxt.append(t)
            frontier = nxt
        transitions = {
            (order[s], x): order[t]
            for (s, x), t in self.transitions.items()
            if s in order and t in order
        }
        accepting = {order[s] for s in self.accepting if s in order}
        return CountingAutomaton(self.alphabet, len(order), 0, accepting, transitions)

    def to_text(self) -> str:
        """Stable text export (golden-file friendly)."""
        lines = [
            "growthtight-automaton v1",
            f"rank {self.alphabet.rank}",
            f"states {self.n_states}",
            f"initial {self.initial}",
            "accepting " + " ".join(str(s) for s in sorted(self.accepting)),
        ]
        for (s, x), t in sorted(self.transitions.items()):
            lines.append(f"trans {s} {self.alphabet.letter_name(x)} {t}")
        return "\n".join(lines) + "\n"


def reduced_word_automaton(alphabet: Alphabet) -> CountingAutomaton:
    """Accepts exactly the freely reduced words: start state plus one per letter."""
    transitions: dict[tuple[int, int], int] = {}
    for x in alphabet.letters:
        transitions[(0, x)] = 1 + x
        for y in alphabet.letters:
            if y != x ^ 1:
                transitions[(1 + x, y)] = 1 + y
    n = 1 + 2 * alphabet.rank
    return CountingAutomaton(alphabet, n, 0, range(n), transitions)


def avoid_factors(
    base: CountingAutomaton, forbidden: Sequence[ReducedWord]
) -> CountingAutomaton:
    """Intersect base with the complement of "contains some forbidden factor".

    The matcher state is the longest suffix of the input that is a prefix of a
    forbidden word (computed directly; the forbidden words are short).
    """
    for f in forbidden:
        if not f:
            raise InvalidInputError("forbidden factors must be non-empty")
        if f.alphabet != base.alphabet:
            raise InvalidInputError("forbidden factor over a different alphabet")
    if not forbidden:
        return base.trimmed()
    bad = {f.letters for f in forbidden}
    prefixes = set()
    for f in bad:
        prefixes.update(f[:i] for i in range(len(f) + 1))

    def matcher_step(state: tuple[int, ...], letter: int):
        cand = state + (letter,)
        for i in range(len(cand)):
            if cand[i:] in bad:
                return None
        for i in range(len(cand) + 1):
            if cand[i:] in prefixes:
                return cand[i:]
        raise AssertionError("empty suffix is always a prefix")

    start = (base.initial, ())
    index = {start: 0}
    queue = [start]
    transitions: dict[tuple[int, int], int] = {}
    while queue:
        pair = queue.pop(0)
        s, mstate = pair
        for x in base.alphabet.letters:
            t = base.transitions.get((s, x))
            if t is None:
                continue
            mnext = matcher_step(mstate, x)
            if mnext is None:
                continue
            target = (t, mnext)
            if target not in index:
                index[target] = len(index)
                queue.append(target)
            transitions[(index[pair], x)] = index[target]
    accepting = {i for (s, _), i in index.items() if s in base.accepting}
    product = CountingAutomaton(
        base.alphabet, len(index), 0, accepting, transitions
    )
    return product.trimmed()


def count_lengths(aut: CountingAutomaton, r_max: int) -> CountSequence:
    """Exact counts of accepted words of each length 0..r_max."""
    if r_max < 0:
        raise InvalidInputError(f"r_max must be >= 0, got {r_max}")
    edges: dict[tuple[int, int], int] = {}
    for (s, _), t in aut.transitions.items():
        edges[(s, t)] = edges.get((s, t), 0) + 1
    edge_list = [(s, t, w) for (s, t), w in edges.items()]
    v = [0] * aut.n_states
    v[aut.initial] = 1
    counts = [sum(v[s] for s in aut.accepting)]
    for _ in range(r_max):
        nxt = [0] * aut.n_states
        for s, t, w in edge_list:
            if v[s]:
                nxt[t] += v[s] * w
        v = nxt
        counts.append(sum(v[s] for s in aut.accepting))
    return CountSequence(tuple(counts))


def _strongly_connected_components(n: int, succ: list[list[int]]) -> list[list[int]]:
    """Kosaraju with iterative DFS."""
    seen = [False] * n
    order: list[int] = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [(start, 0)]
        seen[start] = True
        while stack:
            node, i = stack[-1]
            if i < len(succ[node]):
                stack[-1] = (node, i + 1)
                t = succ[node][i]
                if not seen[t]:
                    seen[t] = True
                    stack.append((t, 0))
            else:
                order.append(node)
                stack.pop()
    pred: list[list[int]] = [[] for _ in range(n)]
    for s in range(n):
        for t in succ[s]:
            pred[t].append(s)
    assigned = [False] * n
    components = []
    for node in reversed(order):
        if assigned[node]:
            continue
        comp = [node]
        assigned[node] = True
        frontier = [node]
        while frontier:
            u = frontier.pop()
            for w in pred[u]:
                if not assigned[w]:
                    assigned[w] = True
                    comp.append(w)
                    frontier.append(w)
        components.append(sorted(comp))
    return components


def _collatz_wielandt(matrix: list[list[int]], tol: float, max_iter: int) -> tuple[float, float]:
    """Rigorous two-sided bounds on the Perron root of an irreducible
    non-negative integer matrix.

    Iterates x -> (M + I)x in floats for speed; the returned bounds come from
    one exact Fraction evaluation of the ratios ((M+I)x)_i / x_i, which bound
    rho(M) + 1 on both sides for any positive test vector.  The +I shift makes
    the iteration aperiodic so the gap actually closes.
    """
    n = len(matrix)
    x = [1.0] * n

    def exact_bounds(vec: list[float]) -> tuple[float, float]:
        xf = [Fraction(v).limit_denominator(10**12) for v in vec]
        xf = [v if v > 0 else Fraction(1, 10**12) for v in xf]
        lo = hi = None
        for i in range(n):
            yi = xf[i] + sum(Fraction(matrix[i][j]) * xf[j] for j in range(n) if matrix[i][j])
            ratio = yi / xf[i] - 1
            lo = ratio if lo is None or ratio < lo else lo
            hi = ratio if hi is None or ratio > hi else hi
        lo_f = float(lo)
        if Fraction(lo_f) > lo:
            lo_f = math.nextafter(lo_f, -math.inf)
        hi_f = float(hi)
        if Fraction(hi_f) < hi:
            hi_f = math.nextafter(hi_f, math.inf)
        return lo_f, hi_f

    for it in range(1, max_iter + 1):
        y = [x[i] + sum(matrix[i][j] * x[j] for j in range(n) if matrix[i][j]) for i in range(n)]
        ratios = [y[i] / x[i] for i in range(n)]
        top = max(y)
        x = [v / top for v in y]
        if max(ratios) - min(ratios) <= tol * 0.25 or it % 512 == 0:
            lo, hi = exact_bounds(x)
            if hi - lo <= tol:
                return lo, hi
    raise ResourceLimitError(
        f"Perron bounds did not reach width {tol} in {max_iter} iterations"
    )


def perron_root(aut: CountingAutomaton, tol: float = 1e-9, max_iter: int = 200_000) -> GrowthBracket:
    """Bracket for log of the Perron root of the trimmed transfer matrix.

    The spectral radius of a block-triangular non-negative matrix is the max
    over its strongly connected components, each of which is irreducible, so
    Collatz-Wielandt bounds per component are combined by max.  A cycle-free
    automaton gets the -inf sentinel.
    """
    if tol < 1e-13:
        raise InvalidInputError(f"tol {tol} below float resolution")
    trimmed = aut.trimmed()
    mat = trimmed.transfer_matrix()
    n = trimmed.n_states
    succ = [[t for t in range(n) if mat[s][t]] for s in range(n)]
    lo_best = hi_best = None
    for comp in _strongly_connected_components(n, succ):
        if len(comp) == 1:
            s = comp[0]
            if mat[s][s] == 0:
                continue
            lo = hi = float(mat[s][s])
        else:
            sub = [[mat[s][t] for t in comp] for s in comp]
            lo, hi = _collatz_wielandt(sub, tol, max_iter)
        if hi_best is None or hi > hi_best:
            hi_best = hi
        if lo_best is None or lo > lo_best:
            lo_best = lo
    if hi_best is None:
        return GrowthBracket(NEG_INF, NEG_INF, "spectral", regime="limit")
    lower = math.nextafter(math.nextafter(math.log(lo_best), -math.inf), -math.inf)
    upper = math.nextafter(math.nextafter(math.log(hi_best), math.inf), math.inf)
    return GrowthBracket(lower, upper, "spectral", regime="limit")


def oriented_vs_unoriented_gap(
    alphabet: Alphabet, f: ReducedWord
) -> tuple[GrowthBracket, GrowthBracket]:
    """Spectral brackets for avoiding f alone versus avoiding {f, f^-1}."""
    if not f:
        raise InvalidInputError("factor must be non-trivial")
    base = reduced_word_automaton(alphabet)
    oriented = perron_root(avoid_factors(base, [f]))
    unoriented = perron_root(avoid_factors(base, [f, ~f]))
    return oriented, unoriented
