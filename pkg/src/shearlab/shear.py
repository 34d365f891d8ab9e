"""Shear coordinates of boundary maps on the Farey tesselation.

For an interior edge ``e`` with counter-clockwise edge quadruple
``(a, b, c, d)`` the shear of a half-plane map ``h`` is
``log cr(h(a), h(b), h(c), h(d))``.  Along a fan the fan quantity
``s(p; m, k)`` combines ``2k + 1`` consecutive shears; it equals the cross
ratio of the image of the fan quadruple ``(p, a_{m-k-1}, a_m, a_{m+k+1})``,
whose outer points are one fan step beyond the outermost shears used.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .boundary import HALFPLANE, BoundaryMap, PiecewiseAngle, HalfPlaneConjugate, normalize_fix_three, to_halfplane
from .errors import (
    DegenerateImage,
    DegenerateQuadruple,
    EmptyWindow,
    NotNormalized,
    ShearOverflow,
    WindowExceedsDepth,
)
from .farey import EdgeKey, FareyEdge, FareyVertex, Tesselation, enumerate_tesselation, edge_key
from .geom import INF, cross_ratio, is_inf, real_to_angle, solve_fourth_point, TWO_PI

# log of the largest finite double
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass
class ShearFunction:
    """Shears on every interior edge of a depth-``depth`` tesselation (edges of generation < depth)."""

    tess: Tesselation
    table: Dict[EdgeKey, float]

    @property
    def depth(self) -> int:
        return self.tess.depth

    def __getitem__(self, e) -> float:
        key = e.key if isinstance(e, FareyEdge) else edge_key(*e)
        return self.table[key]

    def fan_values(self, p: FareyVertex, depth: Optional[int] = None) -> Dict[int, float]:
        """Fan index -> shear, for interior fan edges of generation below ``depth``."""
        depth = self.depth if depth is None else depth
        fan = self.tess.fan(p)
        return {j: self.table[e.key] for j, e in fan.edges.items() if e.key in self.table and e.generation < depth}

    @classmethod
    def zero(cls, depth: int) -> "ShearFunction":
        t = enumerate_tesselation(depth)
        return cls(t, {e.key: 0.0 for e in t.interior_edges()})


def halfplane_normalized(h: BoundaryMap) -> BoundaryMap:
    """Half-plane conjugate of ``h`` post-composed to fix ``0, 1, INF``."""
    if h.model != HALFPLANE:
        h = to_halfplane(h)
    if _fixes_base(h):
        return h
    return normalize_fix_three(h, (0.0, 1.0, INF))


def _fixes_base(h: BoundaryMap, tol: float = 1e-12) -> bool:
    h0, h1, hinf = h(0.0), h(1.0), h(INF)
    return is_inf(hinf) and not is_inf(h0) and not is_inf(h1) and abs(h0) <= tol and abs(h1 - 1.0) <= tol


def shear_function(h: BoundaryMap, depth: int, tess: Optional[Tesselation] = None) -> ShearFunction:
    if h.model != HALFPLANE:
        raise NotNormalized("shear_function needs a half-plane map; use halfplane_normalized first")
    if not _fixes_base(h, 1e-9):
        raise NotNormalized("map does not fix 0, 1 and INF")
    t = enumerate_tesselation(depth) if tess is None else tess
    img: Dict[FareyVertex, object] = {}

    def image(v: FareyVertex):
        # exact rationals let integer Moebius maps (the identity) produce exact shears
        if v not in img:
            img[v] = h(v.exact)
        return img[v]

    table = {}
    for e in t.interior_edges():
        quad = t.edge_quadruple_vertices(e)
        pts = [image(v) for v in quad]
        table[e.key] = _log_cr(pts, e)
    return ShearFunction(t, table)


def _log_cr(pts, where) -> float:
    try:
        cr = cross_ratio(pts)
    except DegenerateQuadruple as exc:
        raise DegenerateImage(f"image points collide at {where}") from exc
    if not cr > 0:
        raise DegenerateImage(f"image quadruple at {where} is not counter-clockwise (cr={cr})")
    return math.log(cr)


def _logsumexp(xs: Sequence[float]) -> float:
    m = max(xs)
    return m + math.log(sum(math.exp(x - m) for x in xs))


def log_s_pmk_values(vals: Mapping[int, float], m: int, k: int) -> float:
    try:
        s_m = vals[m]
        up = [vals[m + i] for i in range(1, k + 1)]
        down = [vals[m - i] for i in range(1, k + 1)]
    except KeyError as exc:
        raise WindowExceedsDepth(f"fan window [{m - k}, {m + k}] leaves the enumerated depth") from exc
    num = [0.0] + list(np.cumsum(up))
    den = [0.0] + list(-np.cumsum(down))
    return s_m + _logsumexp(num) - _logsumexp(den)


def log_s_pmk(s: ShearFunction, p: FareyVertex, m: int, k: int) -> float:
    """``log s(p; m, k)``, computed with log-sum-exp so large shears do not overflow."""
    if k < 0:
        raise WindowExceedsDepth("radius k must be nonnegative")
    return log_s_pmk_values(s.fan_values(p), m, k)


def s_pmk(s: ShearFunction, p: FareyVertex, m: int, k: int) -> float:
    """The fan quantity

        e^{s_m} (1 + e^{s_{m+1}} + ... + e^{s_{m+1}+...+s_{m+k}})
                / (1 + e^{-s_{m-1}} + ... + e^{-(s_{m-1}+...+s_{m-k})})

    over the fan at ``p``.
    """
    v = log_s_pmk(s, p, m, k)
    if v > _LOG_MAX:
        raise ShearOverflow(f"s({p}; {m}, {k}) = exp({v:.1f}) exceeds the float range")
    return math.exp(v)


def _fan_windows(vals: Mapping[int, float], k_max: Optional[int]) -> Iterator[Tuple[int, int, float]]:
    """All ``(m, k, log s)`` with the window ``[m-k, m+k]`` inside ``vals``."""
    for m in sorted(vals):
        num_terms = [0.0]
        den_terms = [0.0]
        up = down = 0.0
        k = 0
        while True:
            yield m, k, vals[m] + _logsumexp(num_terms) - _logsumexp(den_terms)
            k += 1
            if (k_max is not None and k > k_max) or (m + k) not in vals or (m - k) not in vals:
                break
            up += vals[m + k]
            down += vals[m - k]
            num_terms.append(up)
            den_terms.append(-down)


def windows(s: ShearFunction, depth: Optional[int] = None, k_max: Optional[int] = None,
            shifts: Optional[Mapping[FareyVertex, int]] = None) -> Iterator[Tuple[FareyVertex, int, int, float]]:
    """Every ``(p, m, k, log s(p; m, k))`` available within ``depth``.

    ``shifts`` re-indexes fans (``m -> m + shift``); exported sups do not
    depend on it.
    """
    for p in s.tess.vertices:
        vals = s.fan_values(p, depth)
        if shifts and p in shifts:
            t = shifts[p]
            vals = {j + t: v for j, v in vals.items()}
        for m, k, v in _fan_windows(vals, k_max):
            yield p, m, k, v


def shear_norm(s: ShearFunction, depth: Optional[int] = None, k_max: Optional[int] = None,
               shifts: Optional[Mapping[FareyVertex, int]] = None) -> float:
    """Finite-depth estimate of ``sup_p sup_{m,k} |log s(p; m, k)|``; radii capped at ``k_max``."""
    return max((abs(v) for *_, v in windows(s, depth, k_max, shifts)), default=0.0)


def _paired(s1: ShearFunction, s2: ShearFunction, depth, k_max):
    if s1.depth != s2.depth:
        raise ValueError("shear tables must share their depth")
    for p in s1.tess.vertices:
        v1, v2 = s1.fan_values(p, depth), s2.fan_values(p, depth)
        w2 = {(m, k): v for m, k, v in _fan_windows(v2, k_max)}
        for m, k, v in _fan_windows(v1, k_max):
            yield p, m, k, v - w2[(m, k)]


def d_S(s1: ShearFunction, s2: ShearFunction, depth: Optional[int] = None, k_max: Optional[int] = None) -> float:
    """Finite-depth estimate of the shear metric ``sup |log s1(p;m,k) / s2(p;m,k)|``."""
    return max((abs(v) for *_, v in _paired(s1, s2, depth, k_max)), default=0.0)


def outer_generation(s: ShearFunction, p: FareyVertex, m: int, k: int) -> int:
    fan = s.tess.fan(p)
    return min(fan.edge(m + k).generation, fan.edge(m - k).generation)


def d_AS(s1: ShearFunction, s2: ShearFunction, thresholds: Sequence[int], depth: Optional[int] = None) -> List[Tuple[int, float]]:
    """Asymptotic shear metric estimates, one per generation threshold ``G``.

    For each ``G`` the sup runs over windows whose two outer fan edges both
    have generation at least ``G``.  The curve is nonincreasing in ``G``.
    """
    depth = s1.depth if depth is None else depth
    for g in thresholds:
        if g > depth:
            raise WindowExceedsDepth(f"threshold {g} exceeds depth {depth}")
    best: Dict[int, float] = {}
    for p, m, k, v in _paired(s1, s2, depth, None):
        g = outer_generation(s1, p, m, k)
        best[g] = max(best.get(g, 0.0), abs(v))
    out = []
    for g in thresholds:
        vals = [v for gen, v in best.items() if gen >= g]
        if not vals:
            raise EmptyWindow(f"no fan window has outer generation >= {g} below depth {depth}")
        out.append((g, max(vals)))
    return out


def windows_by_threshold(s: ShearFunction, thresholds: Sequence[int], depth: Optional[int] = None):
    """``G -> [(p, m, k), ...]``: the windows entering the ``d_AS`` estimate at ``G``."""
    out = {g: [] for g in thresholds}
    for p, m, k, _ in windows(s, depth):
        g = outer_generation(s, p, m, k)
        for t in thresholds:
            if g >= t:
                out[t].append((p, m, k))
    return out


def matching_fan_quadruple(s: ShearFunction, p: FareyVertex, m: int, k: int):
    """Fan quadruple whose image cross ratio equals ``s(p; m, k)`` (radius ``k + 1``), as floats."""
    return s.tess.fan_quadruple(p, m, k + 1, exact=False)


# --- reconstruction --------------------------------------------------------

def characteristic_map(s: ShearFunction, exact: bool = False) -> Dict[FareyVertex, object]:
    """Images of all tesselation vertices under the map fixing ``0, 1, INF`` with shears ``s``.

    Triangles are developed in creation order (breadth first by generation):
    the new vertex of each triangle is solved from the shear on its parent
    edge.  With ``exact=True`` the arithmetic runs in ``Fraction`` (each
    ``exp(shear)`` taken as its exact binary value); this is only practical
    for shallow depths or zero shears.
    """
    t = s.tess
    if exact:
        img = {t.vertices[0]: Fraction(0), t.vertices[1]: Fraction(1), t.vertices[2]: INF}
    else:
        img = {t.vertices[0]: 0.0, t.vertices[1]: 1.0, t.vertices[2]: INF}
    for tri in t.triangles[1:]:
        a, b, c, d = t.edge_quadruple_vertices(tri.parent)
        u, w, v = tri.vertices
        shear = s.table[tri.parent]
        lam = Fraction(math.exp(shear)) if exact else math.exp(shear)
        if w == d:
            img[d] = solve_fourth_point(img[a], img[b], img[c], lam)
        else:
            img[b] = solve_fourth_point(img[c], img[d], img[a], lam)
    return img


class VertexTableMap(HalfPlaneConjugate):
    """Half-plane homeomorphism through a table of vertex images.

    Tabulated points are returned exactly; elsewhere the map is interpolated
    linearly in the Cayley angle coordinate.
    """

    def __init__(self, table: Mapping[FareyVertex, object]):
        self.table = {v.value: img for v, img in table.items()}
        pairs = sorted((real_to_angle(x) % TWO_PI, real_to_angle(y) % TWO_PI) for x, y in self.table.items())
        src = [a for a, _ in pairs]
        lifted = [pairs[0][1]]
        for _, y in pairs[1:]:
            while y <= lifted[-1]:
                y += TWO_PI
            lifted.append(y)
        super().__init__(PiecewiseAngle(src, lifted))

    def _eval_real(self, x):
        key = INF if is_inf(x) else float(x)
        if key in self.table:
            return self.table[key]
        return super()._eval_real(x)


def interpolate_characteristic_map(table: Mapping[FareyVertex, object]) -> VertexTableMap:
    return VertexTableMap(table)


# --- CSV ---------------------------------------------------------------------

def shear_csv(s: ShearFunction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["v1", "v2", "generation", "shear"])
    for e in s.tess.edges.values():
        if e.key in s.table:
            w.writerow([str(e.v1), str(e.v2), e.generation, repr(s.table[e.key])])
    return buf.getvalue()


def read_shear_csv(text: str) -> ShearFunction:
    rows = [r for r in csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#"))]
    if not rows:
        raise ValueError("empty shear table")
    depth = max(int(r["generation"]) for r in rows) + 1
    t = enumerate_tesselation(depth)
    table = {}
    for r in rows:
        key = edge_key(FareyVertex.parse(r["v1"]), FareyVertex.parse(r["v2"]))
        if key not in t.edges:
            raise ValueError(f"edge {r['v1']} {r['v2']} is not a Farey edge of depth {depth}")
        table[key] = float(r["shear"])
    missing = [e for e in t.interior_edges() if e.key not in table]
    if missing:
        raise ValueError(f"shear table is missing {len(missing)} interior edges, e.g. {missing[0]}")
    return ShearFunction(t, table)


def das_csv(curve: Sequence[Tuple[int, float]]) -> str:
    lines = ["G,estimate"] + [f"{g},{v!r}" for g, v in curve]
    return "\n".join(lines) + "\n"
