"""Sampled estimators of cross-ratio and quadrilateral distortion between boundary maps.

Every estimator is a max over finitely many quadruples with cross ratio 1
and is therefore a lower bound for the corresponding supremum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .boundary import DISK, BoundaryMap
from .errors import GeometryError, OutOfRange
from .geom import (
    TWO_PI,
    Quadruple,
    cayley,
    cayley_inverse,
    cross_ratio,
    disk_translation,
    expi,
    is_circle_point,
    solve_fourth_point,
)
from .modulus import modulus_from_cross_ratio, rho_distance

UNIT_CR_TOL = 1e-12
_MAX_TRIES = 1000


def minimal_scale(q) -> float:
    """Smallest of the four side chords ``|a-b|, |b-c|, |c-d|, |d-a|`` (disk model)."""
    pts = [p if is_circle_point(p) else cayley(p) for p in q]
    return min(abs(pts[i] - pts[(i + 1) % 4]) for i in range(4))


def _unit_cr_ok(q: Quadruple) -> bool:
    return abs(cross_ratio(q) - 1.0) < UNIT_CR_TOL


def _unit_cr_from_angles(t: Sequence[float]) -> Optional[Quadruple]:
    a, b, c = (expi(x) for x in t)
    try:
        d = solve_fourth_point(a, b, c, 1.0)
        q = Quadruple(a, b, c, d)
    except GeometryError:
        return None
    return q if _unit_cr_ok(q) else None


@dataclass
class UnitCr:
    """``count`` random disk quadruples with cross ratio 1.

    Three angles are drawn uniformly and sorted; the fourth point is solved
    exactly.  With ``arc = (t0, t1)`` all four points must lie on the arc
    from ``t0`` counter-clockwise to ``t1`` (rejection on the fourth point).
    Draws are sequential, so a larger ``count`` extends the smaller sample.
    """

    count: int
    seed: int = 0
    arc: Optional[Tuple[float, float]] = None

    def quadruples(self) -> List[Quadruple]:
        rng = np.random.default_rng(self.seed)
        out: List[Quadruple] = []
        misses = 0
        while len(out) < self.count:
            if self.arc is None:
                t = np.sort(rng.uniform(0.0, TWO_PI, 3))
                q = _unit_cr_from_angles(t)
            else:
                t0, t1 = self.arc
                span = (t1 - t0) % TWO_PI
                t = t0 + np.sort(rng.uniform(0.0, span, 3))
                q = _unit_cr_from_angles(t)
                if q is not None and not ((cmath.phase(q.d) - t0) % TWO_PI < span):
                    q = None
            if q is None:
                misses += 1
                if misses > _MAX_TRIES * max(1, self.count):
                    raise OutOfRange("unit cross-ratio sampler keeps missing; arc too short?")
                continue
            out.append(q)
        return out


TEMPLATE = tuple(cmath.exp(0.25j * math.pi) * p for p in (-1, -1j, 1, 1j))


def _pushed(rotation: float, zeta: complex, r: float) -> List[complex]:
    m = disk_translation(r * zeta)
    e = cmath.exp(1j * rotation)
    return [m(e * p) for p in TEMPLATE]


def _degenerate_quadruple(rotation: float, zeta: complex, target: float) -> Optional[Quadruple]:
    # rotate the template, then translate hyperbolically toward zeta until the scale drops below target
    lo, hi = 0.0, 1.0
    if minimal_scale(_pushed(rotation, zeta, lo)) <= target:
        r = lo
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if minimal_scale(_pushed(rotation, zeta, mid)) <= target:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-15:
                break
        r = hi
    pts = [p / abs(p) for p in _pushed(rotation, zeta, r)]
    try:
        d = solve_fourth_point(pts[0], pts[1], pts[2], 1.0)
        q = Quadruple(pts[0], pts[1], pts[2], d)
    except GeometryError:
        return None
    if not _unit_cr_ok(q) or minimal_scale(q) > target:
        return None
    return q


@dataclass
class Degenerating:
    """Unit cross-ratio quadruples pushed toward random boundary points.

    For every target in ``scales`` (strictly decreasing) ``count`` quadruples
    are emitted with minimal scale at most the target.
    """

    scales: Sequence[float]
    count: int
    seed: int = 0

    def __post_init__(self):
        s = list(self.scales)
        if not s or any(b >= a for a, b in zip(s, s[1:])) or s[-1] <= 0:
            raise OutOfRange("scales must be positive and strictly decreasing")

    def by_scale(self) -> List[Tuple[float, List[Quadruple]]]:
        rng = np.random.default_rng(self.seed)
        out = []
        for s in self.scales:
            group: List[Quadruple] = []
            misses = 0
            while len(group) < self.count:
                rot, phi = rng.uniform(0.0, TWO_PI, 2)
                q = _degenerate_quadruple(rot, cmath.exp(1j * phi), s)
                if q is None:
                    misses += 1
                    if misses > _MAX_TRIES:
                        raise OutOfRange(f"cannot build unit cross-ratio quadruples at scale {s:g}")
                    continue
                group.append(q)
            out.append((float(s), group))
        return out


def _in_model(h: BoundaryMap, q) -> list:
    pts = list(q)
    if h.model == DISK:
        return [p if is_circle_point(p) else cayley(p) for p in pts]
    return [cayley_inverse(p) if is_circle_point(p) else p for p in pts]


def image_cross_ratio(h: BoundaryMap, q) -> float:
    return cross_ratio([h(p) for p in _in_model(h, q)])


def log_cr_ratios(h1: BoundaryMap, h2: BoundaryMap, quads: Iterable) -> np.ndarray:
    """``log(cr(h2 Q) / cr(h1 Q))`` per quadruple."""
    return np.array([math.log(image_cross_ratio(h2, q)) - math.log(image_cross_ratio(h1, q)) for q in quads])


def log_modulus_ratios(h1: BoundaryMap, h2: BoundaryMap, quads: Iterable) -> np.ndarray:
    """``log(M(h2 Q) / M(h1 Q))`` per quadruple."""
    out = []
    for q in quads:
        x, y = image_cross_ratio(h2, q), image_cross_ratio(h1, q)
        out.append(math.log(modulus_from_cross_ratio(x)) - math.log(modulus_from_cross_ratio(y)))
    return np.array(out)


def _quads(sampler) -> list:
    if isinstance(sampler, UnitCr):
        return sampler.quadruples()
    if isinstance(sampler, Degenerating):
        return [q for _, g in sampler.by_scale() for q in g]
    return list(sampler)


def _groups(sampler) -> List[Tuple[float, list]]:
    if isinstance(sampler, Degenerating):
        return sampler.by_scale()
    return [(float(s), list(g)) for s, g in sampler]


def _max_abs(v: np.ndarray) -> float:
    return float(np.max(np.abs(v))) if len(v) else 0.0


def d_C_estimate(h1: BoundaryMap, h2: BoundaryMap, sampler) -> float:
    """Max of ``|log cr(h2 Q)/cr(h1 Q)|`` over the samples: a lower bound for d_C.

    ``sampler`` is a ``UnitCr``, a ``Degenerating`` or any iterable of quadruples.
    """
    return _max_abs(log_cr_ratios(h1, h2, _quads(sampler)))


def d_M_estimate(h1: BoundaryMap, h2: BoundaryMap, sampler) -> float:
    return 0.5 * _max_abs(log_modulus_ratios(h1, h2, _quads(sampler)))


def d_AC_estimate(h1: BoundaryMap, h2: BoundaryMap, sampler) -> List[Tuple[float, float]]:
    """``(scale, max |log cr ratio|)`` per scale group; ``sampler`` may also be explicit ``(scale, quads)`` pairs."""
    return [(s, _max_abs(log_cr_ratios(h1, h2, g))) for s, g in _groups(sampler)]


def d_AM_estimate(h1: BoundaryMap, h2: BoundaryMap, sampler) -> List[Tuple[float, float]]:
    return [(s, 0.5 * _max_abs(log_modulus_ratios(h1, h2, g))) for s, g in _groups(sampler)]


def modulus_tie_residual(h1: BoundaryMap, h2: BoundaryMap, quads: Iterable) -> float:
    """Largest gap between ``|log M ratio|`` and the cross-ratio distance of the image cross ratios."""
    worst = 0.0
    for q in quads:
        x, y = image_cross_ratio(h2, q), image_cross_ratio(h1, q)
        lm = abs(math.log(modulus_from_cross_ratio(x)) - math.log(modulus_from_cross_ratio(y)))
        worst = max(worst, abs(lm - rho_distance(x, y)))
    return worst


def cross_ratio_norm(h: BoundaryMap, arc: Tuple[float, float], count: int = 2000, seed: int = 0) -> float:
    """Max of ``|log cr(h Q)|`` over unit cross-ratio quadruples inside the arc ``(t0, t1)``."""
    t0, t1 = arc
    span = (t1 - t0) % TWO_PI
    if not 0 < span < TWO_PI:
        raise OutOfRange("arc must be a proper sub-interval of the circle")
    quads = UnitCr(count, seed, (t0, t1)).quadruples()
    # relative to each sample's own cross ratio, which is 1 up to rounding
    return _max_abs(np.array([math.log(image_cross_ratio(h, q)) - math.log(cross_ratio(q)) for q in quads]))
