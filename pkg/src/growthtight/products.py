"""L^p product metrics on tuples of free-group elements and exact ball counts.

Ball counts of an L^p product come from the factor sphere counts by summing
over the integer lattice points inside the p-ball; the exponent of the product
is the conjugate-norm of the factor exponents, which verify_duality checks
numerically against exact counts.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .automata import CountSequence
from .errors import InvalidInputError, ResourceLimitError
from .growth import GrowthBracket, check_subadditivity, fekete_bracket, regression_bracket
from .words import Alphabet, ReducedWord


def parse_exponent(value) -> float:
    """Accept 1, 2, ... or the strings "1", "2", "inf" for the exponent p."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        try:
            value = float(value)
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse exponent p from {value!r}") from exc
    p = float(value)
    if math.isnan(p) or p < 1:
        raise InvalidInputError(f"exponent p must satisfy p >= 1, got {p}")
    return p


@dataclass(frozen=True)
class LpProductSpec:
    """n free factors combined with the L^p metric."""

    factors: tuple[Alphabet, ...]
    p: float

    def __post_init__(self):
        if not self.factors:
            raise InvalidInputError("a product needs at least one factor")
        object.__setattr__(self, "p", parse_exponent(self.p))

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def q(self) -> float:
        """Conjugate exponent: 1/p + 1/q = 1."""
        if self.p == 1:
            return math.inf
        if self.p == math.inf:
            return 1.0
        return self.p / (self.p - 1)

    def identity(self) -> "ProductPoint":
        return ProductPoint(tuple(a.identity for a in self.factors))

    def point(self, words: Sequence[ReducedWord]) -> "ProductPoint":
        pt = ProductPoint(tuple(words))
        _check_shape(self, pt)
        return pt


@dataclass(frozen=True)
class ProductPoint:
    coords: tuple[ReducedWord, ...]

    def __len__(self) -> int:
        return len(self.coords)


def _check_shape(spec: LpProductSpec, x: ProductPoint) -> None:
    if len(x.coords) != spec.n:
        raise InvalidInputError(
            f"point has {len(x.coords)} coordinates, spec has {spec.n} factors"
        )
    for i, (word, alphabet) in enumerate(zip(x.coords, spec.factors)):
        if word.alphabet != alphabet:
            raise InvalidInputError(f"coordinate {i} uses the wrong alphabet")


def _lp_norm(values: Sequence[int], p: float) -> float | int:
    if p == math.inf:
        return max(values) if values else 0
    if p == 1:
        return sum(values)
    return sum(v**p for v in values) ** (1 / p)


def lp_length(spec: LpProductSpec, x: ProductPoint) -> float | int:
    _check_shape(spec, x)
    return _lp_norm([len(c) for c in x.coords], spec.p)


def lp_distance(spec: LpProductSpec, x: ProductPoint, y: ProductPoint) -> float | int:
    """L^p combination of the coordinate word distances; exact int for p in {1, inf}."""
    _check_shape(spec, x)
    _check_shape(spec, y)
    return _lp_norm([len(~a * b) for a, b in zip(x.coords, y.coords)], spec.p)


def _append_letter(word: tuple[int, ...], letter: int) -> tuple[int, ...]:
    if word and word[-1] == letter ^ 1:
        return word[:-1]
    return word + (letter,)


@dataclass(frozen=True)
class CorrespondenceReport:
    max_radius: int
    checked_s1: int
    checked_sinf: int
    mismatches: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {
            "max_radius": self.max_radius,
            "checked_s1": self.checked_s1,
            "checked_sinf": self.checked_sinf,
            "mismatches": list(self.mismatches),
            "passed": self.passed,
        }


def generating_set_correspondence(spec: LpProductSpec, max_radius: int = 5) -> CorrespondenceReport:
    """BFS check that S^1 word length is the L^1 orbit distance and S^inf word
    length is the L^inf orbit distance, out to the given radius."""
    if max_radius < 0:
        raise InvalidInputError("max_radius must be >= 0")
    start = tuple(() for _ in spec.factors)
    mismatches = []

    def bfs(neighbor_fn) -> dict:
        dist = {start: 0}
        frontier = [start]
        radius = 0
        while frontier and radius < max_radius:
            radius += 1
            nxt = []
            for node in frontier:
                for nb in neighbor_fn(node):
                    if nb not in dist:
                        dist[nb] = radius
                        nxt.append(nb)
            frontier = nxt
        return dist

    def s1_neighbors(node):
        for i, alphabet in enumerate(spec.factors):
            for letter in alphabet.letters:
                yield node[:i] + (_append_letter(node[i], letter),) + node[i + 1 :]

    def sinf_neighbors(node):
        options = [
            [node[i]] + [_append_letter(node[i], x) for x in alphabet.letters]
            for i, alphabet in enumerate(spec.factors)
        ]
        for combo in itertools.product(*options):
            if combo != node:
                yield combo

    dist1 = bfs(s1_neighbors)
    for node, d in dist1.items():
        expected = sum(len(c) for c in node)
        if d != expected:
            mismatches.append(("S1", node, d, expected))
    dist_inf = bfs(sinf_neighbors)
    for node, d in dist_inf.items():
        expected = max((len(c) for c in node), default=0)
        if d != expected:
            mismatches.append(("Sinf", node, d, expected))
    return CorrespondenceReport(
        max_radius=max_radius,
        checked_s1=len(dist1),
        checked_sinf=len(dist_inf),
        mismatches=tuple(mismatches),
        passed=not mismatches,
    )


def product_ball_counts(
    spec: LpProductSpec, factor_counts: Sequence[CountSequence | Sequence[int]], R
) -> int:
    """Exact number of lattice-weighted points with ||(r_1..r_n)||_p <= R:
    sum over admissible radius profiles of the product of factor sphere counts.

    The boundary test is exact integer/rational arithmetic whenever p is an
    integer (or inf); only non-integer p falls back to floats.
    """
    if len(factor_counts) != spec.n:
        raise InvalidInputError(
            f"{len(factor_counts)} count sequences for {spec.n} factors"
        )
    if R < 0:
        raise InvalidInputError(f"radius must be >= 0, got {R}")
    rfloor = math.floor(R)
    for i, fc in enumerate(factor_counts):
        if len(fc) <= rfloor:
            raise ResourceLimitError(
                f"factor {i} counts reach radius {len(fc) - 1}, need {rfloor}"
            )
    p = spec.p
    if p == math.inf:
        result = 1
        for fc in factor_counts:
            result *= sum(fc[r] for r in range(rfloor + 1))
        return result
    if p == 1:
        budget = rfloor
        weight = lambda r: r
    elif p == int(p):
        budget = Fraction(R) ** int(p)
        weight = lambda r: r ** int(p)
    else:
        budget = R**p + 1e-9
        weight = lambda r: float(r) ** p

    def rec(i: int, remaining) -> int:
        if i == spec.n:
            return 1
        total = 0
        fc = factor_counts[i]
        for r in range(rfloor + 1):
            w = weight(r)
            if w > remaining:
                break
            if fc[r]:
                total += fc[r] * rec(i + 1, remaining - w)
        return total

    return rec(0, budget)


def product_ball_sequence(
    spec: LpProductSpec, factor_counts: Sequence[CountSequence | Sequence[int]], r_max: int
) -> CountSequence:
    """Product sphere counts for integer radii 0..r_max (balls via .balls())."""
    if r_max < 0:
        raise InvalidInputError(f"r_max must be >= 0, got {r_max}")
    balls = [product_ball_counts(spec, factor_counts, r) for r in range(r_max + 1)]
    spheres = [balls[0]] + [balls[r] - balls[r - 1] for r in range(1, r_max + 1)]
    return CountSequence(tuple(spheres))


def duality_exponent(deltas: Sequence[float], p: float) -> float:
    """The product growth exponent predicted from factor exponents: their
    conjugate-norm ||deltas||_q with 1/p + 1/q = 1."""
    p = parse_exponent(p)
    if not deltas:
        raise InvalidInputError("need at least one factor exponent")
    for d in deltas:
        if d < 0:
            raise InvalidInputError(f"factor exponent must be >= 0, got {d}")
    if p == 1:
        return max(deltas)
    if p == math.inf:
        return float(sum(deltas))
    q = p / (p - 1)
    return float(sum(d**q for d in deltas) ** (1 / q))


@dataclass(frozen=True)
class DualityReport:
    p: float
    q: float
    r_max: int
    balls: tuple[int, ...]
    support_radii: tuple[float, ...]
    support_balls: tuple[int, ...]
    measured: GrowthBracket
    fekete: GrowthBracket
    b: float
    factor_exponents: tuple[float, ...]
    predicted: float
    deviation: float
    contains_predicted: bool

    def to_dict(self) -> dict:
        return {
            "p": "inf" if self.p == math.inf else self.p,
            "q": "inf" if self.q == math.inf else self.q,
            "r_max": self.r_max,
            "balls": list(self.balls),
            "support_radii": list(self.support_radii),
            "support_balls": list(self.support_balls),
            "measured": self.measured.to_dict(),
            "fekete": self.fekete.to_dict(),
            "subadditivity_b": self.b,
            "factor_exponents": list(self.factor_exponents),
            "predicted": self.predicted,
            "deviation": self.deviation,
            "contains_predicted": self.contains_predicted,
        }


def verify_duality(
    spec: LpProductSpec,
    factor_counts: Sequence[CountSequence | Sequence[int]],
    r_max: int,
    factor_exponents: Sequence[float],
) -> DualityReport:
    """Measure the product exponent from exact counts and compare with the
    conjugate-norm prediction.

    The measurement regresses log counts sampled at the support radii
    R_j = n^(1/p) * j, where the ball's l^1-reach over the profile lattice is
    attained exactly (at the equal-coordinate profile, by Holder); sampling at
    arbitrary radii leaves a number-theoretic wobble of order 1 in log counts
    for 1 < p < inf that drowns the fit at desk radii.  The regression also
    absorbs the polynomial correction (plain Fekete upper bounds at desk radii
    overshoot by ~0.3 for p = 1); the Fekete bracket on integer radii is
    reported alongside as the certified-upper-bound view.
    """
    if len(factor_exponents) != spec.n:
        raise InvalidInputError(
            f"{len(factor_exponents)} exponents for {spec.n} factors"
        )
    seq = product_ball_sequence(spec, factor_counts, r_max)
    balls = seq.balls()
    step = 1.0 if spec.p == math.inf else spec.n ** (1.0 / spec.p)
    # nudge up so exact-budget arithmetic keeps the corner profile inside
    support_radii = [
        step * j * (1 + 1e-12) for j in range(1, int(r_max / step + 1e-9) + 1)
    ]
    support_balls = [
        product_ball_counts(spec, factor_counts, radius)
        for radius in support_radii
    ]
    measured = regression_bracket(support_balls, radii=support_radii)
    b, _ = check_subadditivity(balls)
    fek = fekete_bracket(balls, b)
    predicted = duality_exponent(list(factor_exponents), spec.p)
    midpoint = (measured.lower + measured.upper) / 2
    return DualityReport(
        p=spec.p,
        q=spec.q,
        r_max=r_max,
        balls=tuple(balls),
        support_radii=tuple(support_radii),
        support_balls=tuple(support_balls),
        measured=measured,
        fekete=fek,
        b=b,
        factor_exponents=tuple(factor_exponents),
        predicted=predicted,
        deviation=abs(midpoint - predicted),
        contains_predicted=measured.contains(predicted),
    )