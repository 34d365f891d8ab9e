"""The Farey tesselation of the upper half-plane, in exact integer arithmetic.

The tesselation is grown from the base triangle ``(0, 1, INF)`` by
reflecting across edges.  An edge created by the ``n``-th round of
reflections has generation ``n``; the three base edges have generation 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import BoundaryEdgeAtDepth, DepthLimit, UnknownEdge, WindowExceedsDepth
from .geom import INF, Quadruple, cross_ratio

MAX_DEPTH = 30


@dataclass(frozen=True)
class FareyVertex:
    """Reduced fraction ``numerator/denominator``; infinity is ``1/0``."""

    numerator: int
    denominator: int

    def __post_init__(self):
        p, q = self.numerator, self.denominator
        if q < 0 or math.gcd(p, q) != 1 or (q == 0 and p != 1):
            raise ValueError(f"{p}/{q} is not a normalized Farey vertex")

    @classmethod
    def from_pair(cls, p: int, q: int) -> "FareyVertex":
        """Normalize an integer vector up to sign."""
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> "FareyVertex":
        if text in ("inf", "oo", "∞"):
            return INFINITY
        if "/" in text:
            p, q = text.split("/")
            return cls.from_pair(int(p), int(q))
        return cls(int(text), 1)

    @property
    def is_infinity(self) -> bool:
        return self.denominator == 0

    @property
    def exact(self):
        """``Fraction`` value, or ``INF``."""
        if self.denominator == 0:
            return INF
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        if self.denominator == 0:
            return INF
        return self.numerator / self.denominator

    def sort_key(self):
        return self.exact

    def __lt__(self, other: "FareyVertex") -> bool:
        return self.exact < other.exact

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


INFINITY = FareyVertex(1, 0)
ZERO = FareyVertex(0, 1)
ONE = FareyVertex(1, 1)


def neighbors(u: FareyVertex, v: FareyVertex) -> bool:
    return abs(u.numerator * v.denominator - u.denominator * v.numerator) == 1


def _mediants(u: FareyVertex, v: FareyVertex) -> Tuple[FareyVertex, FareyVertex]:
    p, q, r, s = u.numerator, u.denominator, v.numerator, v.denominator
    return FareyVertex.from_pair(p + r, q + s), FareyVertex.from_pair(p - r, q - s)


EdgeKey = Tuple[FareyVertex, FareyVertex]


def edge_key(u: FareyVertex, v: FareyVertex) -> EdgeKey:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class FareyEdge:
    v1: FareyVertex
    v2: FareyVertex
    generation: int

    @property
    def key(self) -> EdgeKey:
        return (self.v1, self.v2)

    def __str__(self):
        return f"{self.v1} {self.v2} {self.generation}"


@dataclass(frozen=True)
class Triangle:
    vertices: Tuple[FareyVertex, FareyVertex, FareyVertex]
    generation: int
    parent: Optional[EdgeKey] = None


def _psl2z_to_tip(p: FareyVertex) -> Tuple[int, int, int, int]:
    """Integer matrix ``(n, x; d, y)`` of determinant 1 sending ``INF`` to ``p``."""
    n, d = p.numerator, p.denominator
    if d == 0:
        return 1, 0, 0, 1
    # n*y - x*d = 1
    g, s, t = _egcd(n, d)  # s*n + t*d = g = 1
    return n, -t, d, s


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, s, t = _egcd(b, a % b)
    return g, t, s - (a // b) * t


@dataclass
class Fan:
    """Edges of the tesselation sharing the tip ``tip``, indexed along a horocycle.

    Index ``j`` corresponds to the non-tip endpoint ``A(j + offset)`` for the
    integer matrix ``A`` carrying ``INF`` to the tip, so increasing indices
    run counter-clockwise from the tip.  Index 0 is the lowest-generation
    edge (ties broken toward the smaller endpoint).
    """

    tip: FareyVertex
    matrix: Tuple[int, int, int, int]
    offset: int
    edges: Dict[int, FareyEdge]

    def endpoint(self, j: int) -> FareyVertex:
        n, x, d, y = self.matrix
        t = j + self.offset
        return FareyVertex.from_pair(n * t + x, d * t + y)

    def edge(self, j: int) -> FareyEdge:
        try:
            return self.edges[j]
        except KeyError:
            raise WindowExceedsDepth(f"fan edge {j} at tip {self.tip} is beyond the enumerated depth") from None

    def window(self, lo: int, hi: int) -> List[FareyEdge]:
        return [self.edge(j) for j in range(lo, hi + 1)]

    @property
    def indices(self) -> range:
        ks = sorted(self.edges)
        return range(ks[0], ks[-1] + 1)

    def reindexed(self, shift: int) -> "Fan":
        """Same fan with every index increased by ``shift``."""
        return Fan(self.tip, self.matrix, self.offset - shift, {j + shift: e for j, e in self.edges.items()})


@dataclass
class Tesselation:
    depth: int
    vertices: List[FareyVertex] = field(default_factory=list)
    edges: Dict[EdgeKey, FareyEdge] = field(default_factory=dict)
    triangles: List[Triangle] = field(default_factory=list)
    third_vertices: Dict[EdgeKey, List[FareyVertex]] = field(default_factory=dict)
    incident: Dict[FareyVertex, List[EdgeKey]] = field(default_factory=dict)
    _fans: Dict[FareyVertex, Fan] = field(default_factory=dict, repr=False)

    def _add_vertex(self, v: FareyVertex):
        if v not in self.incident:
            self.vertices.append(v)
            self.incident[v] = []

    def _add_edge(self, u: FareyVertex, v: FareyVertex, generation: int):
        key = edge_key(u, v)
        self.edges[key] = FareyEdge(key[0], key[1], generation)
        self.third_vertices[key] = []
        self.incident[u].append(key)
        self.incident[v].append(key)

    def _add_triangle(self, tri: Triangle):
        self.triangles.append(tri)
        a, b, c = tri.vertices
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            self.third_vertices[edge_key(u, v)].append(w)

    def edge(self, u: FareyVertex, v: FareyVertex) -> FareyEdge:
        try:
            return self.edges[edge_key(u, v)]
        except KeyError:
            raise UnknownEdge(f"edge ({u}, {v}) is not in the depth-{self.depth} tesselation") from None

    def generation(self, e) -> int:
        if isinstance(e, FareyEdge):
            e = e.key
        return self.edge(*e).generation

    def is_interior(self, e) -> bool:
        key = e.key if isinstance(e, FareyEdge) else edge_key(*e)
        return len(self.third_vertices.get(key, ())) == 2

    def interior_edges(self) -> List[FareyEdge]:
        return [e for e in self.edges.values() if len(self.third_vertices[e.key]) == 2]

    def edges_of_generation(self, n: int) -> List[FareyEdge]:
        return [e for e in self.edges.values() if e.generation == n]

    def edge_quadruple(self, e, exact: bool = True) -> Quadruple:
        """``(a, b, c, d)``: ``a < c`` the endpoints of ``e``, ``b`` and ``d`` the opposite vertices.

        ``b`` is the opposite vertex inside the arc from ``a`` to ``c``, so
        the quadruple is counter-clockwise.
        """
        fe = e if isinstance(e, FareyEdge) else self.edge(*e)
        thirds = self.third_vertices[fe.key]
        if len(thirds) != 2:
            raise BoundaryEdgeAtDepth(f"edge {fe} has only one adjacent triangle at depth {self.depth}")
        a, c = fe.v1, fe.v2
        t1, t2 = thirds
        b, d = (t1, t2) if a < t1 < c else (t2, t1)
        vals = [v.exact if exact else v.value for v in (a, b, c, d)]
        return Quadruple(*vals)

    def edge_quadruple_vertices(self, e) -> Tuple[FareyVertex, FareyVertex, FareyVertex, FareyVertex]:
        fe = e if isinstance(e, FareyEdge) else self.edge(*e)
        thirds = self.third_vertices[fe.key]
        if len(thirds) != 2:
            raise BoundaryEdgeAtDepth(f"edge {fe} has only one adjacent triangle at depth {self.depth}")
        a, c = fe.v1, fe.v2
        t1, t2 = thirds
        b, d = (t1, t2) if a < t1 < c else (t2, t1)
        return a, b, c, d

    def fan(self, p: FareyVertex) -> Fan:
        if p in self._fans:
            return self._fans[p]
        if p not in self.incident:
            raise WindowExceedsDepth(f"{p} is not a vertex of the depth-{self.depth} tesselation")
        n, x, d, y = _psl2z_to_tip(p)
        by_j = {}
        for key in self.incident[p]:
            a = key[1] if key[0] == p else key[0]
            # j = A^{-1}(a); the denominator is +-1 because a and p are neighbors
            num = y * a.numerator - x * a.denominator
            den = -d * a.numerator + n * a.denominator
            by_j[num // den if den == 1 else -num] = self.edges[key]
        origin = min(by_j, key=lambda j: (by_j[j].generation, _other(by_j[j], p).sort_key()))
        f = Fan(p, (n, x, d, y), origin, {j - origin: e for j, e in by_j.items()})
        self._fans[p] = f
        return f

    def fan_quadruple(self, p: FareyVertex, m: int, k: int, exact: bool = True) -> Quadruple:
        """``(p, a_{m-k}, a_m, a_{m+k})`` with ``a_j`` the far endpoint of fan edge ``j``."""
        if k < 1:
            raise ValueError("fan quadruple radius must be positive")
        f = self.fan(p)
        for j in (m - k, m, m + k):
            f.edge(j)
        verts = [p, f.endpoint(m - k), f.endpoint(m), f.endpoint(m + k)]
        return Quadruple(*[v.exact if exact else v.value for v in verts])

    def serialize(self) -> str:
        """One edge per line, ``p/q r/s g``, in order of creation."""
        return "".join(f"{e}\n" for e in self.edges.values())


def _other(e: FareyEdge, p: FareyVertex) -> FareyVertex:
    return e.v2 if e.v1 == p else e.v1


def enumerate_tesselation(depth: int) -> Tesselation:
    """All edges of generation at most ``depth``, breadth first.

    Within one generation, triangles are reflected in creation order and
    each triangle's outer edges are visited counter-clockwise.
    """
    if not 0 <= depth <= MAX_DEPTH:
        raise DepthLimit(f"depth must be in [0, {MAX_DEPTH}], got {depth}")
    t = Tesselation(depth)
    base = (ZERO, ONE, INFINITY)
    for v in base:
        t._add_vertex(v)
    for u, v in ((ZERO, ONE), (ONE, INFINITY), (ZERO, INFINITY)):
        t._add_edge(u, v, 0)
    t._add_triangle(Triangle(base, 0))

    # frontier entries: (outer edge given in ccw order of its triangle, that triangle's third vertex)
    frontier = [((ZERO, ONE), INFINITY), ((ONE, INFINITY), ZERO), ((INFINITY, ZERO), ONE)]
    for g in range(1, depth + 1):
        nxt = []
        for (u, v), opposite in frontier:
            m1, m2 = _mediants(u, v)
            w = m2 if m1 == opposite else m1
            t._add_vertex(w)
            t._add_edge(u, w, g)
            t._add_edge(w, v, g)
            # new triangle (u, w, v) is ccw: w sits between u and v on the far side
            t._add_triangle(Triangle((u, w, v), g, edge_key(u, v)))
            nxt.append(((u, w), v))
            nxt.append(((w, v), u))
        frontier = nxt
    return t


def parse_serialized(text: str) -> List[FareyEdge]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b, g = line.split()
        u, v = FareyVertex.parse(a), FareyVertex.parse(b)
        k = edge_key(u, v)
        out.append(FareyEdge(k[0], k[1], int(g)))
    return out


def exact_cross_ratio(q: Iterable):
    return cross_ratio(q)


def apply_psl2z(matrix: Tuple[int, int, int, int], v: FareyVertex) -> FareyVertex:
    a, b, c, d = matrix
    return FareyVertex.from_pair(a * v.numerator + b * v.denominator, c * v.numerator + d * v.denominator)


def psl2z_to_base(tri: Triangle) -> Tuple[int, int, int, int]:
    """Integer matrix of determinant 1 mapping the ccw triangle ``tri`` onto ``(0, 1, INF)``.

    The vertex landing on 0, 1, INF is chosen to preserve orientation;
    exactly one of the three rotations works.
    """
    verts = tri.vertices
    for r in range(3):
        u, v, w = verts[r], verts[(r + 1) % 3], verts[(r + 2) % 3]
        # A^{-1} has columns w and u (as vectors), scaled so v = u + w up to sign
        p, q, r_, s = w.numerator, w.denominator, u.numerator, u.denominator
        for sw in (1, -1):
            for su in (1, -1):
                cols = (sw * p, su * r_, sw * q, su * s)  # matrix (sw*w | su*u)
                det = cols[0] * cols[3] - cols[1] * cols[2]
                if det != 1:
                    continue
                if FareyVertex.from_pair(cols[0] + cols[1], cols[2] + cols[3]) != v:
                    continue
                a, b, c, d = cols
                return d, -b, -c, a
    raise ValueError(f"no orientation-preserving PSL(2,Z) map takes {tri.vertices} to the base triangle")
