"""Orientation-preserving homeomorphisms of the circle and of the extended real line.

Disk-model maps act on unit-modulus complex numbers and expose an angle
function ``angle(theta)`` that is vectorized over numpy arrays; quadrature
code works exclusively through it.  Half-plane-model maps act on reals and
``INF`` one point at a time.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence

import numpy as np

from .errors import ModelMismatch, OutOfRange
from .geom import (
    CAYLEY,
    CAYLEY_INV,
    INF,
    TWO_PI,
    Moebius,
    angle_to_real,
    is_circle_point,
    is_inf,
    is_real_point,
    moebius_from_triples,
    real_to_angle,
)

DISK = "disk"
HALFPLANE = "halfplane"

# angles this close to a breakpoint are evaluated as the breakpoint itself
BREAK_SNAP = 1e-13


class BoundaryMap:
    model: str = DISK

    def __call__(self, x):
        if self.model == DISK:
            if isinstance(x, np.ndarray):
                return np.exp(1j * self.angle(np.angle(x)))
            if not is_circle_point(x):
                raise ModelMismatch(f"disk-model map applied to non-circle point {x!r}")
            x = complex(x)
            t = float(self.angle(np.array([math.atan2(x.imag, x.real)]))[0])
            return complex(math.cos(t), math.sin(t))
        if isinstance(x, complex) or is_circle_point(x):
            raise ModelMismatch(f"half-plane-model map applied to complex point {x!r}")
        return self._eval_real(x)

    def angle(self, theta):
        raise ModelMismatch(f"{type(self).__name__} is not a disk-model map")

    def _eval_real(self, x):
        raise ModelMismatch(f"{type(self).__name__} is not a half-plane-model map")

    def breakpoints(self) -> np.ndarray:
        """Source angles in ``[0, 2 pi)`` where the angle function is not smooth."""
        return np.empty(0)

    def inverse(self) -> "BoundaryMap":
        raise NotImplementedError

    def lifted_angles(self, thetas: np.ndarray) -> np.ndarray:
        return np.unwrap(self.angle(np.asarray(thetas, dtype=float)))


class MoebiusMap(BoundaryMap):
    def __init__(self, m: Moebius, model: str = DISK):
        if model == HALFPLANE and not m.is_real:
            raise ModelMismatch("half-plane Moebius maps need real matrices")
        if model == DISK:
            # disk automorphisms have |d| = |a|, |c| = |b| (up to rounding) and |a| > |c|
            if not (abs(abs(m.a) - abs(m.d)) < 1e-9 and abs(abs(m.b) - abs(m.c)) < 1e-9 and abs(m.a) > abs(m.c)):
                raise ModelMismatch("matrix does not preserve the unit disk")
        self.m = m
        self.model = model

    def angle(self, theta):
        if self.model != DISK:
            return super().angle(theta)
        return np.angle(self.m(np.exp(1j * np.asarray(theta, dtype=float))))

    def _eval_real(self, x):
        if isinstance(x, Fraction):
            ints = self._integer_entries()
            if ints is not None:
                a, b, c, d = ints
                den = c * x + d
                return INF if den == 0 else (a * x + b) / den
            x = float(x)
        return self.m(x)

    def _integer_entries(self):
        # integer matrices (the identity, PSL(2,Z)) act exactly on rationals
        if not hasattr(self, "_ints"):
            es = (self.m.a, self.m.b, self.m.c, self.m.d)
            ok = all(e.imag == 0 and e.real == round(e.real) for e in es)
            self._ints = tuple(int(e.real) for e in es) if ok else None
        return self._ints

    def __call__(self, x):
        if self.model == DISK and not isinstance(x, np.ndarray) and is_circle_point(x):
            w = self.m(complex(x))
            return w / abs(w)
        return super().__call__(x)

    def inverse(self):
        return MoebiusMap(self.m.inverse(), self.model)

    def __repr__(self):
        return f"MoebiusMap({self.m!r}, {self.model!r})"


def identity_map(model: str = DISK) -> MoebiusMap:
    return MoebiusMap(Moebius.identity(), model)


class PiecewiseAngle(BoundaryMap):
    """Circle map that is linear in angle between consecutive breakpoints.

    ``breaks`` are strictly increasing angles in ``[0, 2 pi)``; ``images``
    are strictly increasing with total span below ``2 pi``.  The last piece
    wraps from ``breaks[-1]`` to ``breaks[0] + 2 pi``.
    """

    model = DISK

    def __init__(self, breaks: Sequence[float], images: Sequence[float]):
        b = np.asarray(breaks, dtype=float)
        im = np.asarray(images, dtype=float)
        if b.ndim != 1 or b.shape != im.shape or len(b) == 0:
            raise OutOfRange("breaks and images must be equal-length nonempty lists")
        if b[0] < 0 or b[-1] >= TWO_PI or np.any(np.diff(b) <= 0):
            raise OutOfRange("breaks must increase strictly inside [0, 2 pi)")
        if np.any(np.diff(im) <= 0) or im[-1] - im[0] >= TWO_PI:
            raise OutOfRange("images must increase strictly with span below 2 pi")
        self.breaks = b
        self.images = im
        self._b = np.append(b, b[0] + TWO_PI)
        self._i = np.append(im, im[0] + TWO_PI)

    def angle(self, theta):
        theta = np.asarray(theta, dtype=float)
        b, im = self._b, self._i
        t = np.mod(theta - b[0], TWO_PI) + b[0]
        j = np.clip(np.searchsorted(b, t, side="right") - 1, 0, len(b) - 2)
        slope = (im[j + 1] - im[j]) / (b[j + 1] - b[j])
        out = im[j] + (t - b[j]) * slope
        # exact images at breakpoints: quadrature nodes and Farey vertices hit them
        near = np.abs(t[..., None] - b[None, :]) < BREAK_SNAP if t.ndim else np.abs(t - b) < BREAK_SNAP
        if np.any(near):
            k = np.argmax(near, axis=-1)
            hit = np.any(near, axis=-1)
            out = np.where(hit, im[k], out)
        return out

    def breakpoints(self):
        return self.breaks.copy()

    def inverse(self):
        im = np.mod(self.images, TWO_PI)
        order = np.argsort(im, kind="stable")
        im, b = im[order], self.breaks[order]
        # restore monotone lift of the former breaks
        b = b.copy()
        for k in range(1, len(b)):
            while b[k] <= b[k - 1]:
                b[k] += TWO_PI
        return PiecewiseAngle(im, b)

    def __repr__(self):
        return f"PiecewiseAngle(breaks={self.breaks.tolist()}, images={self.images.tolist()})"


class Counterexample(PiecewiseAngle):
    """The map that folds most of each quarter circle into a thin arc.

    On the first quadrant it sends the arc ``[0, pi/2 (1 - 1/n)]`` linearly
    onto ``[0, pi/(2n)]`` and the remaining arc linearly onto
    ``[pi/(2n), pi/2]``; it commutes with complex conjugation and with
    reflection in the imaginary axis, hence fixes ``+-1, +-i`` and is odd.
    """

    def __init__(self, n: int):
        if int(n) != n or n < 2:
            raise OutOfRange(f"counterexample index must be an integer >= 2, got {n!r}")
        n = int(n)
        self.n = n
        pi = math.pi
        alpha = 0.5 * pi * (1.0 - 1.0 / n)
        beta = pi / (2.0 * n)
        breaks = [0.0, alpha, 0.5 * pi, pi - alpha, pi, pi + alpha, 1.5 * pi, TWO_PI - alpha]
        images = [0.0, beta, 0.5 * pi, pi - beta, pi, pi + beta, 1.5 * pi, TWO_PI - beta]
        super().__init__(breaks, images)

    def __repr__(self):
        return f"Counterexample({self.n})"


def counterexample_map(n: int) -> Counterexample:
    return Counterexample(n)


class Composition(BoundaryMap):
    """``maps[0] o maps[1] o ... o maps[-1]``, evaluated right to left."""

    def __init__(self, maps: Sequence[BoundaryMap]):
        maps = list(maps)
        if not maps:
            raise OutOfRange("empty composition")
        models = {m.model for m in maps}
        if len(models) != 1:
            raise ModelMismatch("composition mixes disk and half-plane maps")
        self.maps: List[BoundaryMap] = maps
        self.model = maps[0].model

    def angle(self, theta):
        if self.model != DISK:
            return super().angle(theta)
        t = np.asarray(theta, dtype=float)
        for m in reversed(self.maps):
            t = m.angle(t)
        return t

    def _eval_real(self, x):
        for m in reversed(self.maps):
            x = m._eval_real(x)
        return x

    def breakpoints(self):
        pts = []
        # breakpoints of maps[k] pulled back through maps[k+1:]
        for k, m in enumerate(self.maps):
            bk = m.breakpoints()
            if len(bk) == 0:
                continue
            inner = self.maps[k + 1:]
            if inner:
                bk = Composition(inner).inverse().angle(bk)
            pts.append(np.mod(bk, TWO_PI))
        if not pts:
            return np.empty(0)
        return np.unique(np.concatenate(pts))

    def inverse(self):
        return Composition([m.inverse() for m in reversed(self.maps)])

    def __repr__(self):
        return f"Composition({self.maps!r})"


class HalfPlaneConjugate(BoundaryMap):
    """``A^-1 o h o A`` for the Cayley map ``A``; fixes ``0, 1, INF`` when ``h`` fixes ``1, i, -1``."""

    model = HALFPLANE

    def __init__(self, inner: BoundaryMap):
        if inner.model != DISK:
            raise ModelMismatch("only disk-model maps can be conjugated to the half-plane")
        self.inner = inner

    def _eval_real(self, x):
        if not (is_inf(x) or is_real_point(x)):
            raise ModelMismatch(f"{x!r} is not a point of the extended real line")
        t = real_to_angle(x)
        return angle_to_real(float(self.inner.angle(np.array([t]))[0]))

    def inverse(self):
        return HalfPlaneConjugate(self.inner.inverse())

    def __repr__(self):
        return f"HalfPlaneConjugate({self.inner!r})"


def evaluate(h: BoundaryMap, x):
    return h(x)


def to_halfplane(h: BoundaryMap) -> BoundaryMap:
    if h.model != DISK:
        raise ModelMismatch("map is already in the half-plane model")
    if isinstance(h, MoebiusMap):
        return MoebiusMap(_realify(CAYLEY_INV @ h.m @ CAYLEY), HALFPLANE)
    return HalfPlaneConjugate(h)


def _snap(x: float) -> float:
    # conjugating by the Cayley matrix leaves ulp-level residue on integer entries
    r = round(x)
    return float(r) if abs(x - r) < 1e-14 else x


def _realify(m: Moebius) -> Moebius:
    if not m.is_real:
        # rounding may leave a common unit phase; the normalized form is real up to sign
        raise ModelMismatch("conjugated Moebius map is not real")
    return Moebius(*(_snap(v.real) for v in (m.a, m.b, m.c, m.d)))


class FixThree(Composition):
    """``post o h`` for a Moebius ``post`` returning ``h(triple)`` to ``triple``.

    The three images are matched exactly so that the fixed points survive
    rounding (``post(h(INF))`` would otherwise land near 1e17, not on ``INF``).
    """

    def __init__(self, post: MoebiusMap, h: BoundaryMap, images: Sequence, triple: Sequence):
        super().__init__([post, h])
        self._exact = {img: t for img, t in zip(images, triple)}

    def _eval_real(self, x):
        y = self.maps[1]._eval_real(x)
        if y in self._exact:
            return self._exact[y]
        return self.maps[0]._eval_real(y)


def normalize_fix_three(h: BoundaryMap, triple: Sequence) -> BoundaryMap:
    """Post-compose ``h`` with the Moebius map putting ``h(triple)`` back onto ``triple``."""
    images = [h(p) for p in triple]
    post = moebius_from_triples(images, list(triple))
    if h.model == HALFPLANE:
        return FixThree(MoebiusMap(_realify(post), HALFPLANE), h, images, triple)
    return Composition([MoebiusMap(post, h.model), h])


# --- JSON descriptors -------------------------------------------------------

def _num(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return v


def from_descriptor(desc: dict) -> BoundaryMap:
    kind = desc.get("kind")
    if kind == "identity":
        return identity_map(desc.get("model", DISK))
    if kind == "moebius":
        a, b, c, d = (_num(v) for v in desc["matrix"])
        return MoebiusMap(Moebius(a, b, c, d), desc.get("model", DISK))
    if kind == "piecewise_angle":
        return PiecewiseAngle(desc["breaks"], desc["images"])
    if kind == "counterexample":
        return Counterexample(desc["n"])
    if kind == "compose":
        return Composition([from_descriptor(m) for m in desc["maps"]])
    if kind == "halfplane_conjugate":
        return HalfPlaneConjugate(from_descriptor(desc["map"]))
    raise OutOfRange(f"unknown map kind {kind!r}")


def _enc(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def to_descriptor(h: BoundaryMap) -> dict:
    if isinstance(h, Counterexample):
        return {"kind": "counterexample", "n": h.n}
    if isinstance(h, PiecewiseAngle):
        return {"kind": "piecewise_angle", "breaks": h.breaks.tolist(), "images": h.images.tolist()}
    if isinstance(h, MoebiusMap):
        m = h.m
        return {"kind": "moebius", "matrix": [_enc(m.a), _enc(m.b), _enc(m.c), _enc(m.d)], "model": h.model}
    if isinstance(h, Composition):
        return {"kind": "compose", "maps": [to_descriptor(m) for m in h.maps]}
    if isinstance(h, HalfPlaneConjugate):
        return {"kind": "halfplane_conjugate", "map": to_descriptor(h.inner)}
    raise OutOfRange(f"no descriptor for {type(h).__name__}")


def random_piecewise(rng: np.random.Generator, pieces: int = 6, jitter: float = 0.6) -> PiecewiseAngle:
    """Random piecewise-linear circle homeomorphism fixing the point 1."""
    b = np.sort(rng.uniform(0, TWO_PI, pieces - 1))
    gaps = np.diff(np.concatenate([[0.0], b, [TWO_PI]]))
    w = gaps * np.exp(jitter * rng.standard_normal(pieces))
    im = np.concatenate([[0.0], np.cumsum(w)[:-1]]) * TWO_PI / w.sum()
    return PiecewiseAngle(np.concatenate([[0.0], b]), im)
