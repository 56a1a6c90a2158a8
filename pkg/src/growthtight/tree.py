"""Axes, nearest-point projections and the shortening move on Cayley trees.

An axis is the bi-infinite geodesic of a non-trivial element: translate the
line of its cyclically reduced core's primitive root t, i.e. the vertices
origin * (prefixes of t^infinity and t^-infinity).  Because t is cyclically
reduced, the two rays leave the origin through different edges, so projections
reduce to longest-common-prefix scans.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .automata import CountingAutomaton, avoid_factors, reduced_word_automaton
from .errors import InternalInvariantError, InvalidInputError
from .words import (
    Alphabet,
    ReducedWord,
    cyclic_reduce,
    format_word,
    primitive_root,
)

# Empirical slack for the power/projection dichotomy bound
# d_pi(g^n.p, p) <= 2 d(p, g.p) + D_TREE; 0 holds on every tested fixture
# (vertex-transitive tree, base point on the axis).
D_TREE = 0


@dataclass(frozen=True)
class Axis:
    """Translated axis of a non-trivial free-group element."""

    element: ReducedWord
    core: ReducedWord
    conjugator: ReducedWord
    root: ReducedWord
    translate: ReducedWord
    origin: ReducedWord  # vertex at coordinate 0 = translate * conjugator

    @classmethod
    def from_element(cls, h: ReducedWord, translate: ReducedWord | None = None) -> "Axis":
        if not h:
            raise InvalidInputError("the identity has no axis")
        if translate is None:
            translate = h.alphabet.identity
        core, conjugator = cyclic_reduce(h)
        root, _ = primitive_root(core)
        return cls(h, core, conjugator, root, translate, translate * conjugator)

    @property
    def alphabet(self) -> Alphabet:
        return self.element.alphabet

    @property
    def dprime(self) -> int:
        """Tree value of the quasi-axis diameter constant: |core| + 2|conjugator|."""
        return len(self.core) + 2 * len(self.conjugator)

    def point(self, coordinate: int) -> ReducedWord:
        """Vertex at signed arc-length position along the core direction."""
        if coordinate >= 0:
            ray = self.root.letters
            n = len(ray)
            prefix = tuple(ray[i % n] for i in range(coordinate))
        else:
            ray = (~self.root).letters
            n = len(ray)
            prefix = tuple(ray[i % n] for i in range(-coordinate))
        return self.origin * ReducedWord(self.alphabet, prefix)

    def translated(self, w: ReducedWord) -> "Axis":
        return Axis.from_element(self.element, w * self.translate)


@dataclass(frozen=True)
class ProjectionResult:
    foot: ReducedWord
    distance: int
    axis_coordinate: int


def _common_prefix_with_ray(letters: Sequence[int], ray: Sequence[int]) -> int:
    n = len(ray)
    m = 0
    while m < len(letters) and letters[m] == ray[m % n]:
        m += 1
    return m


def project_to_axis(x: ReducedWord, ax: Axis) -> ProjectionResult:
    """Nearest-point projection of the vertex x onto the axis (unique in a tree)."""
    v = ~ax.origin * x
    forward = _common_prefix_with_ray(v.letters, ax.root.letters)
    backward = _common_prefix_with_ray(v.letters, (~ax.root).letters)
    if forward > 0 and backward > 0:
        raise InternalInvariantError(
            "both rays match a positive prefix; root not cyclically reduced?"
        )
    coordinate = forward if forward >= backward else -backward
    return ProjectionResult(
        foot=ax.point(coordinate),
        distance=len(v) - max(forward, backward),
        axis_coordinate=coordinate,
    )


def same_line(a: Axis, b: Axis) -> bool:
    """Whether two axes are the same bi-infinite geodesic (as vertex sets).

    Distinct lines sharing a segment of length >= |root_a| + |root_b| would
    force the two primitive roots to be powers of a common word (Fine-Wilf),
    hence equal lines; so agreeing at coordinates -L, 0, L with L the sum of
    root lengths settles it.
    """
    if a.alphabet != b.alphabet:
        return False
    span = len(a.root) + len(b.root)
    return all(
        project_to_axis(b.point(j), a).distance == 0 for j in (-span, 0, span)
    )


def project_axis_onto_axis(source: Axis, target: Axis) -> tuple[int, int]:
    """Coordinate interval on target swept by projecting the whole source line.

    Walk outward from source.point(0): the distance to target is convex with
    slopes in {-1, 0, 1} along a geodesic line, and once a step increases the
    distance by exactly 1 the geodesic to target passes through the previous
    point, so the foot is frozen from there on.
    """
    if same_line(source, target):
        raise InvalidInputError("source and target are the same line")
    first = project_to_axis(source.point(0), target)
    lo = hi = first.axis_coordinate
    cap = first.distance + len(source.root) + len(target.root) + 8
    for direction in (1, -1):
        previous = first.distance
        for step in range(1, cap + 1):
            res = project_to_axis(source.point(direction * step), target)
            lo = min(lo, res.axis_coordinate)
            hi = max(hi, res.axis_coordinate)
            if res.distance == previous + 1:
                break
            previous = res.distance
        else:
            raise InternalInvariantError(
                "projection walk failed to freeze; lines share a ray?"
            )
    return lo, hi


def projection_diameter(source: Axis, target: Axis) -> int:
    lo, hi = project_axis_onto_axis(source, target)
    return hi - lo


def check_projection_axioms(
    axes: Sequence[Axis],
    sample: Sequence[ReducedWord] = (),
    candidate_xi: int | None = None,
) -> tuple[int, list[dict]]:
    """Observed projection constant for a family of axes.

    Returns the smallest xi for which (P0) every pairwise projection has
    diameter <= xi and (P1) in every triple at most one of the three mutual
    projection distances exceeds xi; plus the violation list against
    candidate_xi (empty when no candidate is given, by minimality).  Sample
    points feed an idempotence self-check of the projection map; (P2)
    finiteness is automatic for a finite family.
    """
    axes = list(axes)
    for i in range(len(axes)):
        for j in range(i + 1, len(axes)):
            if same_line(axes[i], axes[j]):
                raise InvalidInputError(f"axes {i} and {j} are the same line")
    intervals: dict[tuple[int, int], tuple[int, int]] = {}
    for ti, target in enumerate(axes):
        for si, src in enumerate(axes):
            if ti != si:
                intervals[(ti, si)] = project_axis_onto_axis(src, target)
    pair_diams = {key: hi - lo for key, (lo, hi) in intervals.items()}
    xi_observed = max(pair_diams.values(), default=0)
    triples = []
    for i in range(len(axes)):
        for j in range(i + 1, len(axes)):
            for k in range(j + 1, len(axes)):
                quantities = {}
                for target, others in ((i, (j, k)), (j, (i, k)), (k, (i, j))):
                    spans = [intervals[(target, o)] for o in others]
                    quantities[target] = max(s[1] for s in spans) - min(
                        s[0] for s in spans
                    )
                second = sorted(quantities.values())[-2]
                xi_observed = max(xi_observed, second)
                triples.append(((i, j, k), quantities))
    candidate = xi_observed if candidate_xi is None else candidate_xi
    violations: list[dict] = []
    for key, diam in sorted(pair_diams.items()):
        if diam > candidate:
            violations.append({"kind": "P0", "pair": key, "diameter": diam})
    for ids, quantities in triples:
        exceeding = [t for t, q in quantities.items() if q > candidate]
        if len(exceeding) >= 2:
            violations.append(
                {"kind": "P1", "triple": ids, "quantities": quantities}
            )
    for x in sample:
        for idx, ax in enumerate(axes):
            foot = project_to_axis(x, ax).foot
            again = project_to_axis(foot, ax)
            if again.distance != 0 or again.foot != foot:
                violations.append({"kind": "projection", "axis": idx, "x": format_word(x)})
    return xi_observed, violations


@dataclass(frozen=True)
class Lemma31Report:
    branch: str  # "power-in-subgroup" or "bounded-projection"
    passed: bool
    bound: float
    base_point: ReducedWord
    rows: tuple[tuple[int, int], ...]  # (n, projection distance)
    power_witness: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "passed": self.passed,
            "bound": self.bound,
            "rows": [list(r) for r in self.rows],
            "power_witness": list(self.power_witness) if self.power_witness else None,
        }


def lemma31_bound_check(ax: Axis, g: ReducedWord, n_max: int) -> Lemma31Report:
    """Power-or-bounded-projection dichotomy for the orbit of g against an axis.

    Either some power of g lands in the cyclic group of the axis element
    (equivalent to sharing a primitive root, tested exactly), or the
    projections of g^n.p stay within 2 d(p, g.p) + D_TREE of p's projection,
    where p is the axis vertex nearest the identity.
    """
    if not g:
        raise InvalidInputError("g must be non-trivial")
    root_g, exp_g = primitive_root(g)
    root_h, exp_h = primitive_root(ax.element)
    if root_g == root_h or root_g == ~root_h:
        sign = 1 if root_g == root_h else -1
        # g^exp_h = root^(exp_g*exp_h) = h^(sign*exp_g)
        return Lemma31Report(
            branch="power-in-subgroup",
            passed=g ** exp_h == ax.element ** (sign * exp_g),
            bound=0.0,
            base_point=ax.origin,
            rows=(),
            power_witness=(exp_h, sign * exp_g),
        )
    p = project_to_axis(g.alphabet.identity, ax).foot
    base_coord = project_to_axis(p, ax).axis_coordinate
    bound = 2 * len(~p * (g * p)) + D_TREE
    rows = []
    ok = True
    x = p
    for n in range(1, n_max + 1):
        x = g * x
        res = project_to_axis(x, ax)
        dpi = abs(res.axis_coordinate - base_coord)
        rows.append((n, dpi))
        ok = ok and dpi <= bound
    return Lemma31Report(
        branch="bounded-projection",
        passed=ok,
        bound=bound,
        base_point=p,
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class LongProjectionWitness:
    """A translate of the axis onto which [o, g.o] projects with diameter >= K,
    aligned with the positive core direction."""

    k: ReducedWord
    projection_diameter: int
    alpha: int
    start: int  # index into g's letters where the matched run begins
    phase: int  # phase of core^infinity at the run start
    positive: bool = True


def _maximal_positive_runs(
    letters: Sequence[int], ray: Sequence[int]
) -> list[tuple[int, int, int]]:
    """(start, phase, length) of maximal forward matches against the periodic ray."""
    n = len(ray)
    runs = []
    for i in range(len(letters)):
        for s in range(n):
            if letters[i] != ray[s % n]:
                continue
            if i > 0 and letters[i - 1] == ray[(s - 1) % n]:
                continue  # extendable to the left at this phase: not maximal
            j = 1
            while i + j < len(letters) and letters[i + j] == ray[(s + j) % n]:
                j += 1
            runs.append((i, s, j))
    return runs


def find_long_projections(
    g: ReducedWord, h: ReducedWord, K: int
) -> list[LongProjectionWitness]:
    """All K-long positive projections of the geodesic [o, g.o] onto translates
    of h's axis.

    In the tree the projection diameter onto a translated axis equals the
    overlap of [o, g.o] with that line, and positively aligned overlaps are
    exactly the maximal runs of g reading core^infinity forward.
    """
    if not h:
        raise InvalidInputError("h must be non-trivial")
    if K < 1:
        raise InvalidInputError(f"K must be >= 1, got {K}")
    core, conjugator = cyclic_reduce(h)
    root, _ = primitive_root(core)
    ray = root.letters
    witnesses = []
    for start, phase, length in _maximal_positive_runs(g.letters, ray):
        if length < K:
            continue
        before = ReducedWord(g.alphabet, g.letters[:start])
        back = ReducedWord(g.alphabet, ray[:phase])
        k = before * ~back * ~conjugator
        alpha = max(1, (phase + length) // len(core))
        witnesses.append(
            LongProjectionWitness(
                k=k,
                projection_diameter=length,
                alpha=alpha,
                start=start,
                phase=phase,
            )
        )
    witnesses.sort(key=lambda w: (w.start, w.phase))
    return witnesses


def format_witnesses(g: ReducedWord, witnesses: Sequence[LongProjectionWitness]) -> str:
    """Stable text records for regression fixtures."""
    lines = [f"long-projections g={format_word(g)} n={len(witnesses)}"]
    for w in witnesses:
        lines.append(
            f"witness g={format_word(g)} k={format_word(w.k)}"
            f" alpha={w.alpha} diameter={w.projection_diameter}"
        )
    return "\n".join(lines) + "\n"


def ghat_membership_exact(g: ReducedWord, h: ReducedWord, K: int) -> bool:
    """Whether no subsegment of [o, g.o] has a K-long positive h-projection.

    Subsegment witnesses are sub-runs of runs of the full geodesic, so this is
    simply emptiness of find_long_projections.
    """
    return not find_long_projections(g, h, K)


def ghat_automaton(alphabet: Alphabet, h: ReducedWord, m: int) -> CountingAutomaton:
    """Automaton for the words with no forward core^infinity run of length >= m.

    Forbidding every length-m factor of core^infinity (at most |root| distinct)
    realizes the restricted set exactly on the tree: acceptance coincides with
    ghat_membership_exact(., h, m).
    """
    if not h:
        raise InvalidInputError("h must be non-trivial")
    core, _ = cyclic_reduce(h)
    if m < len(core):
        raise InvalidInputError(f"m={m} below core length {len(core)}")
    root, _ = primitive_root(core)
    ray = root.letters
    n = len(ray)
    factors = {tuple(ray[(s + i) % n] for i in range(m)) for s in range(n)}
    forbidden = [ReducedWord(alphabet, f) for f in sorted(factors)]
    return avoid_factors(reduced_word_automaton(alphabet), forbidden)


def shorten_threshold(h: ReducedWord) -> int:
    """Smallest K accepted by shorten: 2 D' + 2 with D' = |core| + 2|conjugator|."""
    if not h:
        raise InvalidInputError("h must be non-trivial")
    core, conjugator = cyclic_reduce(h)
    return 2 * (len(core) + 2 * len(conjugator)) + 2


@dataclass(frozen=True)
class ShortenResult:
    g_prime: ReducedWord
    k: ReducedWord
    alpha: int
    alpha_min: int
    alpha_max: int
    witness: LongProjectionWitness


def shorten(
    g: ReducedWord, h: ReducedWord, K: int, alpha: int | None = None
) -> ShortenResult | None:
    """One shortening step: replace g by k h^(-alpha) k^-1 g along the longest
    K-long positive projection; returns None (no-op) when g has none.

    Any alpha in [alpha_min, alpha_max] strictly shortens (the removed stretch
    stays inside the matched run); the result stays in the coset g N for every
    normal N containing h.
    """
    threshold = shorten_threshold(h)
    if K < threshold:
        raise InvalidInputError(f"K={K} below shortening threshold {threshold}")
    witnesses = find_long_projections(g, h, K)
    if not witnesses:
        return None
    best = max(witnesses, key=lambda w: (w.projection_diameter, -w.start, -w.phase))
    core, _ = cyclic_reduce(h)
    root, exponent = primitive_root(core)
    periods = (best.phase + best.projection_diameter) // len(root)
    alpha_max = max(1, periods // exponent)
    chosen = 1 if alpha is None else alpha
    if not 1 <= chosen <= alpha_max:
        raise InvalidInputError(f"alpha={chosen} outside [1, {alpha_max}]")
    g_prime = best.k * h ** (-chosen) * ~best.k * g
    if len(g_prime) >= len(g):
        raise InternalInvariantError(
            f"shortening failed: |{format_word(g_prime)}| >= |{format_word(g)}|"
        )
    return ShortenResult(
        g_prime=g_prime,
        k=best.k,
        alpha=chosen,
        alpha_min=1,
        alpha_max=alpha_max,
        witness=best,
    )