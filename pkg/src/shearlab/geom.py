"""Complex arithmetic on the unit circle and the extended real line.

Points on the unit circle are Python ``complex`` values.  Points of the
extended real line are real numbers (``int``, ``float`` or ``Fraction``);
the point at infinity is the float ``INF``.  Every routine that meets
``INF`` handles it through the algebraic limit, never through a large
surrogate value, so exact ``Fraction`` input gives exact output.
"""

from __future__ import annotations

import cmath
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateQuadruple, DegenerateTriple, GeometryError, NoSolutionInArc, OutOfRange

INF = math.inf
TWO_PI = 2.0 * math.pi

# points closer than this are considered equal
POINT_TOL = 1e-12
# relative imaginary part tolerated in the cross ratio of four circle points
IMAG_TOL = 1e-10


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def is_circle_point(x) -> bool:
    return isinstance(x, (complex, np.complexfloating))


def is_real_point(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def unit(z: complex) -> complex:
    """Project a nonzero complex number radially onto the unit circle."""
    return z / abs(z)


def circle_angle(z: complex) -> float:
    """Angle of ``z`` in ``[0, 2*pi)``."""
    t = math.atan2(z.imag, z.real)
    return t + TWO_PI if t < 0 else t


def expi(theta: float) -> complex:
    return complex(math.cos(theta), math.sin(theta))


def real_to_angle(x) -> float:
    """Angle of the Cayley image ``cayley(x)``; ``0 -> 0``, ``1 -> pi/2``, ``INF -> pi``."""
    if is_inf(x):
        return math.pi
    t = 2.0 * math.atan(float(x))
    return t + TWO_PI if t < 0 else t


def angle_to_real(theta: float):
    """Inverse of :func:`real_to_angle`: ``tan(theta / 2)`` with ``pi`` sent to ``INF``."""
    t = math.remainder(theta, TWO_PI)  # in [-pi, pi]
    if abs(abs(t) - math.pi) < 1e-15:
        return INF
    c, s = math.cos(t), math.sin(t)
    # two algebraically equal forms of tan(t/2); pick the well-conditioned one
    if c >= 0:
        return s / (1.0 + c)
    return (1.0 - c) / s


def _distinct(p, q) -> bool:
    if is_inf(p) or is_inf(q):
        return not (is_inf(p) and is_inf(q))
    if isinstance(p, Fraction) and isinstance(q, Fraction):
        return p != q
    scale = 1.0
    if is_real_point(p) and is_real_point(q):
        scale = max(1.0, abs(float(p)), abs(float(q)))
    return abs(complex(p) - complex(q)) > POINT_TOL * scale


def _order_key(p) -> float:
    if is_circle_point(p):
        return circle_angle(complex(p))
    if is_inf(p):
        return INF
    return p


def is_cyclically_ordered(points: Sequence) -> bool:
    """True when the distinct ``points`` appear counter-clockwise (increasing on the real line)."""
    keys = [_order_key(p) for p in points]
    descents = sum(1 for i in range(len(keys)) if keys[(i + 1) % len(keys)] < keys[i])
    return descents == 1


@dataclass(frozen=True)
class Quadruple:
    """Four boundary points in counter-clockwise cyclic order.

    All four points must live in the same model: either all ``complex`` (unit
    circle) or all real/``INF`` (extended real line).
    """

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        pts = self.points
        circle = [is_circle_point(p) for p in pts]
        if any(circle) and not all(circle):
            raise GeometryError("quadruple mixes circle and real-line points")
        for i in range(4):
            for j in range(i + 1, 4):
                if not _distinct(pts[i], pts[j]):
                    raise DegenerateQuadruple(f"points {pts[i]!r} and {pts[j]!r} coincide")
        if not is_cyclically_ordered(pts):
            raise DegenerateQuadruple(f"points {pts!r} are not in counter-clockwise order")

    @property
    def points(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __iter__(self):
        return iter(self.points)

    def map(self, f) -> "Quadruple":
        """Image quadruple under an orientation-preserving boundary map."""
        return Quadruple(*(f(p) for p in self.points))

    def cross_ratio(self):
        return cross_ratio(self)


def cross_ratio(q: Iterable):
    """Cross ratio ``(b-a)(d-c) / ((c-b)(d-a))`` of four boundary points.

    At most one point may be ``INF``; the two factors containing it are
    replaced by their limit ratio.  Circle quadruples return a real float
    (the imaginary rounding residue is checked and dropped).  ``Fraction``
    input yields an exact ``Fraction``.
    """
    a, b, c, d = tuple(q)
    n_inf = sum(is_inf(p) for p in (a, b, c, d))
    if n_inf > 1:
        raise DegenerateQuadruple("more than one point at infinity")
    if is_inf(a):
        num, den = d - c, c - b
    elif is_inf(b):
        num, den = -(d - c), d - a
    elif is_inf(c):
        num, den = -(b - a), d - a
    elif is_inf(d):
        num, den = b - a, c - b
    else:
        num, den = (b - a) * (d - c), (c - b) * (d - a)
    if num == 0 or den == 0:
        raise DegenerateQuadruple(f"coincident points in {(a, b, c, d)!r}")
    value = num / den
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        if abs(value.imag) > IMAG_TOL * max(1.0, abs(value)):
            raise GeometryError(f"cross ratio {value} is not real; points are not concyclic")
        return value.real
    return value


class Moebius:
    """A Moebius transformation ``z -> (a z + b) / (c z + d)`` with ``ad - bc = 1``.

    The sign ambiguity of the matrix is fixed by making the first nonzero
    entry have positive real part (positive imaginary part if the real part
    vanishes).  Real matrices act on the extended real line and return
    floats there; ``INF`` is handled symbolically.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if abs(det) < 1e-300:
            raise DegenerateTriple("singular Moebius matrix")
        s = cmath.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
        for entry in (a, b, c, d):
            if abs(entry) > 1e-15:
                if entry.real < -1e-15 or (abs(entry.real) <= 1e-15 and entry.imag < 0):
                    a, b, c, d = -a, -b, -c, -d
                break
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def is_real(self) -> bool:
        return all(abs(e.imag) <= 1e-14 * max(1.0, abs(e)) for e in (self.a, self.b, self.c, self.d))

    def __call__(self, z):
        a, b, c, d = self.a, self.b, self.c, self.d
        if isinstance(z, np.ndarray):
            return (a * z + b) / (c * z + d)
        if is_inf(z):
            if c == 0:
                return INF
            return self._out(a / c, real=True)
        real_in = is_real_point(z)
        zc = complex(z)
        den = c * zc + d
        if den == 0:
            return INF
        return self._out((a * zc + b) / den, real=real_in)

    def _out(self, w: complex, real: bool):
        if real and self.is_real:
            return w.real
        return w

    def __matmul__(self, other: "Moebius") -> "Moebius":
        """Composition ``self o other``."""
        m = self.matrix @ other.matrix
        return Moebius(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a)

    def isclose(self, other: "Moebius", tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)

    def __repr__(self):
        return f"Moebius({self.a:.6g}, {self.b:.6g}, {self.c:.6g}, {self.d:.6g})"

    def __eq__(self, other):
        return isinstance(other, Moebius) and self.isclose(other, 0.0)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __reduce__(self):
        return (Moebius, (self.a, self.b, self.c, self.d))


def _to_zero_one_inf(z1, z2, z3) -> Moebius:
    """Moebius map sending ``z1, z2, z3`` to ``0, 1, INF``."""
    if not (_distinct(z1, z2) and _distinct(z2, z3) and _distinct(z1, z3)):
        raise DegenerateTriple(f"triple {(z1, z2, z3)!r} is not pairwise distinct")
    if is_inf(z1):
        return Moebius(0, z2 - z3, 1, -z3)
    if is_inf(z2):
        return Moebius(1, -z1, 1, -z3)
    if is_inf(z3):
        return Moebius(1, -z1, 0, z2 - z1)
    return Moebius(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


def moebius_from_triples(src: Sequence, dst: Sequence) -> Moebius:
    """The unique Moebius map with ``src[i] -> dst[i]`` for ``i = 0, 1, 2``."""
    return _to_zero_one_inf(*dst).inverse() @ _to_zero_one_inf(*src)


#: Cayley-type map from the upper half-plane to the disk: ``0, 1, INF -> 1, i, -1``.
CAYLEY = Moebius(-1, 1j, 1, 1j)
CAYLEY_INV = CAYLEY.inverse()


def cayley(z):
    """``-(z - i) / (z + i)``; ``INF`` goes to ``-1``."""
    if is_inf(z):
        return complex(-1.0)
    w = CAYLEY(complex(z))
    return complex(w)


def cayley_inverse(w):
    """Inverse of :func:`cayley`; circle points come back as reals (``-1`` as ``INF``)."""
    w = complex(w)
    if abs(abs(w) - 1.0) < 1e-9:
        return angle_to_real(circle_angle(w))
    return CAYLEY_INV(w)


def disk_translation(z0: complex) -> Moebius:
    """Disk automorphism ``eta -> (eta + z0) / (1 + conj(z0) eta)``; sends 0 to ``z0``, derivative at 0 is real."""
    z0 = complex(z0)
    return Moebius(1, z0, z0.conjugate(), 1)


def to_origin(w0: complex) -> Moebius:
    """Disk automorphism ``zeta -> (zeta - w0) / (1 - conj(w0) zeta)``."""
    w0 = complex(w0)
    return Moebius(1, -w0, -w0.conjugate(), 1)


def rotation(phi: float) -> Moebius:
    e = cmath.exp(0.5j * phi)
    return Moebius(e, 0, 0, e.conjugate())


def random_disk_moebius(rng: np.random.Generator, max_radius: float = 0.7) -> Moebius:
    """Random disk automorphism: a rotation followed by translation of the origin to a random point."""
    r = max_radius * math.sqrt(rng.uniform())
    z0 = r * cmath.exp(1j * rng.uniform(0, TWO_PI))
    return disk_translation(z0) @ rotation(rng.uniform(0, TWO_PI))


def solve_fourth_point(a, b, c, target_cr):
    """The point ``d`` with ``cross_ratio((a, b, c, d)) == target_cr``.

    ``d`` lies on the arc from ``c`` back to ``a``, so ``(a, b, c, d)`` is
    counter-clockwise.  On that arc the cross ratio sweeps ``(0, inf)``
    monotonically, so every positive target has exactly one solution.
    """
    if not target_cr > 0:
        raise OutOfRange(f"target cross ratio must be positive, got {target_cr!r}")
    if not (_distinct(a, b) and _distinct(b, c) and _distinct(a, c)):
        raise DegenerateTriple(f"triple {(a, b, c)!r} is not pairwise distinct")
    lam = target_cr
    if is_inf(a):
        d = c + lam * (c - b)
    elif is_inf(b):
        d = (c + lam * a) / (1 + lam)
    elif is_inf(c):
        d = a - (b - a) / lam
    else:
        k = (b - a) / (c - b)
        if k == lam:
            d = INF
        else:
            d = (k * c - lam * a) / (k - lam)
    if is_circle_point(d):
        d = unit(complex(d))
    elif isinstance(d, complex):
        d = d.real
    try:
        Quadruple(a, b, c, d)
    except DegenerateQuadruple as exc:
        raise NoSolutionInArc(f"cross ratio {target_cr} forces d={d!r} outside the arc ({c!r}, {a!r})") from exc
    return d
