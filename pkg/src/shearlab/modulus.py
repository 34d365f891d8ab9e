"""Conformal modulus of a quadrilateral from its cross ratio.

For a counter-clockwise quadruple ``(a, b, c, d)`` with cross ratio
``lam = (b-a)(d-c) / ((c-b)(d-a))`` the quadrilateral ``D(a, b, c, d)`` is
conformally a rectangle whose corners are the images of ``a, b, c, d``.  We
report the modulus as ``|side ab| / |side bc|`` of that rectangle, so the
modulus grows with ``lam`` and equals 1 at ``lam = 1``.

With ``l = 1/sqrt(1+lam)`` and ``l' = sqrt(lam/(1+lam))`` the modulus is
``K(l') / K(l)``; writing both complete elliptic integrals through the
arithmetic-geometric mean, ``K(k) = pi / (2 agm(1, k'))``, gives

    M(lam) = agm(sqrt(1+lam), sqrt(lam)) / agm(sqrt(1+lam), 1)

which makes the reciprocity ``M(1/lam) = 1/M(lam)`` exact.
"""

from __future__ import annotations

import math

from .errors import OutOfRange
from .geom import cross_ratio

AGM_RTOL = 1e-15
_AGM_MAX_ITER = 64


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive reals."""
    if a <= 0 or b <= 0:
        raise OutOfRange("agm needs positive arguments")
    for _ in range(_AGM_MAX_ITER):
        if abs(a - b) <= AGM_RTOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def modulus_from_cross_ratio(lam: float) -> float:
    lam = float(lam)
    if not lam > 0 or math.isinf(lam):
        raise OutOfRange(f"cross ratio must be a finite positive real, got {lam!r}")
    if lam > 1.0:
        # evaluate on the side where sqrt(1+lam) does not swamp sqrt(lam)
        return 1.0 / modulus_from_cross_ratio(1.0 / lam)
    s = math.sqrt(1.0 + lam)
    return agm(s, math.sqrt(lam)) / agm(s, 1.0)


def modulus(q) -> float:
    """Modulus of the quadrilateral bounded by a quadruple."""
    return modulus_from_cross_ratio(cross_ratio(q))


def log_modulus_ratio(x: float, y: float) -> float:
    """Signed ``log(M(x) / M(y))``."""
    return math.log(modulus_from_cross_ratio(x)) - math.log(modulus_from_cross_ratio(y))


def rho_distance(x: float, y: float) -> float:
    """Hyperbolic distance on the thrice-punctured sphere between two cross ratios.

    Defined through the identity ``d(cr Q1, cr Q2) = |log M(Q1)/M(Q2)|``.
    """
    return abs(log_modulus_ratio(x, y))
