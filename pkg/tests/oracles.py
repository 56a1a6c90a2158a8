"""Independent brute-force reference implementations for the test suite.

Everything here works on plain char strings (lowercase = generator,
uppercase = its inverse, so "aBa" means a b^-1 a) and deliberately avoids
importing the package under test.  Expected values in the tests are frozen
from these oracles, not from the library.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

ORDER = "aAbBcCdD"  # total order on letters; index = canonical letter id


def inv(ch: str) -> str:
    return ch.swapcase()


def invert(word: str) -> str:
    return "".join(inv(c) for c in reversed(word))


def reduce_scan(text: str) -> str:
    """Repeated-scan free reduction; quadratic but obviously correct."""
    word = text
    while True:
        for i in range(len(word) - 1):
            if word[i] == inv(word[i + 1]):
                word = word[:i] + word[i + 2 :]
                break
        else:
            return word


def mult(u: str, v: str) -> str:
    return reduce_scan(u + v)


def letters(rank: int) -> str:
    return ORDER[: 2 * rank]


def lex_key(word: str) -> tuple[int, ...]:
    return tuple(ORDER.index(c) for c in word)


def shortlex_key(word: str) -> tuple:
    return (len(word), lex_key(word))


def words_by_radius(rank: int, r_max: int) -> list[list[str]]:
    """spheres[r] = all reduced words of length r, in shortlex order."""
    alpha = letters(rank)
    spheres = [[""]]
    for _ in range(r_max):
        nxt = []
        for w in spheres[-1]:
            for c in alpha:
                if not w or c != inv(w[-1]):
                    nxt.append(w + c)
        spheres.append(nxt)
    return spheres


def sphere_size(rank: int, r: int) -> int:
    if r == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (r - 1)


def count_spheres_by_last_letter(rank: int, r_max: int) -> list[int]:
    """Sphere sizes via the last-letter extension recurrence (exact ints)."""
    alpha = letters(rank)
    counts = [1]
    by_last = {c: 1 for c in alpha}
    for _ in range(r_max):
        counts.append(sum(by_last.values()))
        by_last = {
            c: sum(v for last, v in by_last.items() if last != inv(c))
            for c in alpha
        }
    return counts


def ball_sizes(rank: int, r_max: int) -> list[int]:
    balls = []
    total = 0
    for r in range(r_max + 1):
        total += sphere_size(rank, r)
        balls.append(total)
    return balls


def avoid_sphere_counts(rank: int, forbidden: list[str], r_max: int) -> list[int]:
    """Counts of reduced words containing none of the forbidden substrings."""
    counts = []
    for sphere in words_by_radius(rank, r_max):
        counts.append(sum(1 for w in sphere if not any(f in w for f in forbidden)))
    return counts


def exp_vector(word: str, rank: int) -> tuple[int, ...]:
    vec = [0] * rank
    for c in word:
        idx = ORDER.index(c) // 2
        vec[idx] += -1 if c.isupper() else 1
    return tuple(vec)


def tree_dist(u: str, v: str) -> int:
    return len(mult(invert(u), v))


def cyclic_peel(word: str) -> tuple[str, str]:
    """Return (core, conjugator) with word = conj * core * conj^-1."""
    core, conj = word, ""
    while len(core) >= 2 and core[0] == inv(core[-1]):
        conj += core[0]
        core = core[1:-1]
    return core, conj


def prim_root(word: str) -> tuple[str, int]:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d], n // d
    raise AssertionError("unreachable")


def axis_vertex(h: str, coord: int) -> str:
    """Vertex at signed arc-length coord along the axis of h (through o)."""
    core, conj = cyclic_peel(h)
    root, _ = prim_root(core)
    if coord >= 0:
        ray = root
        t = coord
    else:
        ray = invert(root)
        t = -coord
    reps = ray * (t // len(ray) + 1)
    return conj + reps[:t]


def brute_project(x: str, h: str, pad: int = 4) -> tuple[int, int]:
    """(axis coordinate, distance) of the nearest axis vertex to x."""
    window = len(x) + len(h) + pad
    best = None
    for coord in range(-window, window + 1):
        d = tree_dist(x, axis_vertex(h, coord))
        if best is None or d < best[1]:
            best = (coord, d)
    return best


def maximal_pos_runs(g: str, root: str) -> list[tuple[int, int, int]]:
    """Maximal forward substrings of g reading root^inf: (start, length, phase).

    Assumes roots whose factors have a forced phase (single letter, or all
    letters distinct) so maximal runs never overlap.
    """
    n = len(root)
    runs = []
    i = 0
    while i < len(g):
        best = None
        for phase in range(n):
            if g[i] != root[phase]:
                continue
            t = 0
            while i + t < len(g) and g[i + t] == root[(phase + t) % n]:
                t += 1
            if best is None or t > best[0]:
                best = (t, phase)
        if best is None:
            i += 1
        else:
            runs.append((i, best[0], best[1]))
            i += best[0]
    return runs


def ghat_member(g: str, h: str, K: int) -> bool:
    core, _ = cyclic_peel(h)
    root, _ = prim_root(core)
    return all(length < K for _, length, _ in maximal_pos_runs(g, root))


def lp_norm_exact(profile: tuple[int, ...], p) -> object:
    """Comparable norm stand-in: exact for p in {1, 2, 3, ...} and inf."""
    if p == float("inf"):
        return max(profile) if profile else 0
    if p == int(p):
        return sum(Fraction(r) ** int(p) for r in profile)
    return sum(float(r) ** p for r in profile)


def product_ball_brute(p, factor_spheres: list[list[int]], R) -> int:
    """Lattice count: sum over profiles with ||profile||_p <= R."""
    budget = lp_norm_exact((R,), p)
    r_tops = [len(s) - 1 for s in factor_spheres]
    total = 0
    for prof in product(*(range(t + 1) for t in r_tops)):
        if lp_norm_exact(prof, p) <= budget:
            term = 1
            for i, r in enumerate(prof):
                term *= factor_spheres[i][r]
            total += term
    return total


def minimal_section_brute(p, rank: int, n: int, key_fn, r_max: int) -> dict:
    """key -> (coordinate tuple, length), scanning in the library's documented
    deterministic order: norm, then profile, then per-coordinate word order."""
    spheres = words_by_radius(rank, r_max)
    budget = lp_norm_exact((r_max,), p)
    profiles = [
        prof
        for prof in product(range(r_max + 1), repeat=n)
        if lp_norm_exact(prof, p) <= budget
    ]
    profiles.sort(key=lambda prof: (lp_norm_exact(prof, p), prof))
    section: dict = {}
    for prof in profiles:
        for coords in product(*(spheres[r] for r in prof)):
            key = key_fn(coords)
            if key not in section:
                section[key] = (coords, _norm_val(prof, p))
    return section


def _norm_val(profile, p) -> float:
    if p == float("inf"):
        return float(max(profile) if profile else 0)
    if p == 1:
        return float(sum(profile))
    return float(sum(r**p for r in profile)) ** (1.0 / p)


def to_lib_text(chars: str) -> str:
    """Char-string -> the library's word grammar ("aBa" -> "a b- a")."""
    if not chars:
        return "1"
    return " ".join(c.lower() + ("-" if c.isupper() else "") for c in chars)


def from_lib_text(text: str) -> str:
    if text.strip() in ("", "1"):
        return ""
    out = []
    for token in text.split():
        if token.endswith("-") or token.endswith("'"):
            out.append(token[0].upper())
        else:
            out.append(token[0])
    return "".join(out)
