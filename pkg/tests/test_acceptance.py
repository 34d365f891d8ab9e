"""Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` or directly with
``python tests/test_acceptance.py``.
"""

import cmath
import math
import sys
import time

import numpy as np
import pytest

from shearlab.boundary import Composition, Counterexample, MoebiusMap, identity_map, random_piecewise, to_halfplane
from shearlab.douady_earle import (
    COUNTEREXAMPLE_C,
    COUNTEREXAMPLE_MU_MIN,
    beltrami_at,
    beltrami_from_coefficients,
    extend,
    finite_difference_beltrami,
    origin_coefficients,
)
from shearlab.farey import enumerate_tesselation, exact_cross_ratio
from shearlab.geom import cross_ratio, random_disk_moebius
from shearlab.metrics import Degenerating, UnitCr, d_AC_estimate, d_C_estimate, image_cross_ratio
from shearlab.modulus import modulus_from_cross_ratio, rho_distance
from shearlab.shear import (
    ShearFunction,
    VertexTableMap,
    characteristic_map,
    d_AS,
    d_S,
    halfplane_normalized,
    matching_fan_quadruple,
    shear_function,
    windows,
    windows_by_threshold,
)

N_LIST = [2, 4, 8, 16, 32, 64, 128, 256]
SEED = 20261014


# collected here and printed by the terminal-summary hook in conftest.py
REPORT_LINES = []


def report(n, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {name} ({detail})"
    REPORT_LINES.append(line)
    print(line)
    return ok


_ce_cache = {}


def counterexample_rows():
    if not _ce_cache:
        t0 = time.perf_counter()
        for n in N_LIST:
            c = origin_coefficients(Counterexample(n))
            _ce_cache[n] = (c, abs(beltrami_from_coefficients(c)))
        _ce_cache["seconds"] = time.perf_counter() - t0
    return _ce_cache


def test_criterion_01_coefficient_asymptotics():
    rows = counterexample_rows()
    C, tp = COUNTEREXAMPLE_C, 2 / math.pi
    worst = 0.0
    ok = True
    for n in N_LIST:
        c, _ = rows[n]
        errs = (abs(c.c1 - tp), abs(c.c_minus1 - tp), abs(c.d_minus1 - 1))
        ok &= all(e <= C / n for e in errs)
        worst = max(worst, n * abs(c.c1 - tp))
    ok &= worst <= C and rows["seconds"] < 60
    assert report(1, "c1, c_-1 -> 2/pi and d_-1 -> 1 at rate C/n",
                  ok, f"C={C}, max n|c1-2/pi|={worst:.4f}, {rows['seconds']:.2f}s")


def test_criterion_02_beltrami_blow_up():
    rows = counterexample_rows()
    mus = [rows[n][1] for n in N_LIST]
    ok = mus[0] <= 1e-10 and all(a < b for a, b in zip(mus, mus[1:])) and mus[-1] >= COUNTEREXAMPLE_MU_MIN
    assert report(2, "|mu(0)| is 0 at n=2, strictly increasing, large at n=256",
                  ok, f"|mu(0)| at n=2: {mus[0]:.2e}, n=256: {mus[-1]:.6f}")


def test_criterion_03_refuted_hypothesis():
    values = [to_halfplane(Counterexample(n))(-1.0) for n in N_LIST + [3, 5, 1000, 4096]]
    rows = counterexample_rows()
    mus = [rows[n][1] for n in N_LIST]
    blow_up = all(a < b for a, b in zip(mus, mus[1:])) and mus[-1] >= COUNTEREXAMPLE_MU_MIN
    ok = all(v == -1.0 for v in values) and blow_up
    assert report(3, "h_tilde_n(-1) = -1 exactly while |mu(0)| -> 1",
                  ok, f"{len(values)} values all exactly -1: {all(v == -1.0 for v in values)}")


def test_criterion_04_two_route_beltrami():
    rng = np.random.default_rng(SEED)
    maps = [("identity", identity_map())]
    maps += [(f"moebius{i}", MoebiusMap(random_disk_moebius(rng))) for i in range(3)]
    maps += [(f"counterexample({n})", Counterexample(n)) for n in (4, 16, 64)]
    worst = 0.0
    for _, h in maps:
        closed = beltrami_at(h, 0j).mu  # closed form after moving ex(h)(0) to 0
        fd = finite_difference_beltrami(h, 0j)
        worst = max(worst, abs(closed - fd))
    assert report(4, "closed-form vs finite-difference Beltrami at 0", worst < 1e-6, f"max diff {worst:.2e}")


def test_criterion_05_conformal_naturality():
    rng = np.random.default_rng(SEED + 5)
    h = random_piecewise(rng)
    worst = 0.0
    for _ in range(50):
        A = MoebiusMap(random_disk_moebius(rng))
        B = MoebiusMap(random_disk_moebius(rng))
        z = 0.6 * math.sqrt(rng.uniform()) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        worst = max(worst, abs(extend(Composition([A, h, B]), z) - A.m(extend(h, B.m(z)))))
    grid = [0.9 * math.sqrt(rng.uniform()) * cmath.exp(1j * rng.uniform(0, 2 * math.pi)) for _ in range(100)]
    worst_id = max(abs(extend(identity_map(), z) - z) for z in grid)
    ok = worst < 1e-8 and worst_id < 1e-10
    assert report(5, "ex(A h B) = A ex(h) B and ex(id) = id", ok,
                  f"naturality {worst:.2e}, identity {worst_id:.2e}")


def test_criterion_06_shear_round_trip():
    s = shear_function(to_halfplane(Counterexample(8)), 8)
    back = shear_function(VertexTableMap(characteristic_map(s)), 8)
    worst = max(abs(back.table[k] - s.table[k]) for k in s.table)
    img = characteristic_map(ShearFunction.zero(8), exact=True)
    exact = all(img[v] == v.exact for v in img)
    ok = worst < 1e-9 and exact
    assert report(6, "shears -> characteristic map -> shears at depth 8", ok,
                  f"max edge error {worst:.2e}, zero shears give identity exactly: {exact}")


def test_criterion_07_fan_quantity_oracle():
    s = shear_function(to_halfplane(Counterexample(8)), 6)
    img = characteristic_map(s)
    worst, count = 0.0, 0
    for p, m, k, v in windows(s):
        f = s.tess.fan(p)
        pts = [img[p]] + [img[f.endpoint(j)] for j in (m - k - 1, m, m + k + 1)]
        worst = max(worst, abs(v - math.log(cross_ratio(pts))))
        count += 1
    assert report(7, "fan quantity equals reconstructed fan-quadruple cross ratio", worst < 1e-9,
                  f"{count} windows at depth 6, max |diff| {worst:.2e}")


def test_criterion_08_farey_combinatorics():
    t10 = enumerate_tesselation(10)
    counts_ok = all(len(t10.edges_of_generation(n)) == 3 * 2 ** n for n in range(1, 11))
    edges_ok = all(exact_cross_ratio(t10.edge_quadruple(e)) == 1 for e in t10.interior_edges())
    t8 = enumerate_tesselation(8)
    fans_ok, n_fan = True, 0
    for p in t8.vertices:
        f = t8.fan(p)
        for m in f.edges:
            k = 1
            while m - k in f.edges and m + k in f.edges:
                fans_ok &= exact_cross_ratio(t8.fan_quadruple(p, m, k)) == 1
                n_fan += 1
                k += 1
    ok = counts_ok and edges_ok and fans_ok
    assert report(8, "edge counts 3*2^n and exact unit cross ratios", ok,
                  f"counts to depth 10: {counts_ok}, {len(t10.interior_edges())} edge and {n_fan} fan quadruples")


def _inequality_case(h1, h2, depth=7, thresholds=(0, 2, 4, 6)):
    s1 = shear_function(halfplane_normalized(h1), depth)
    s2 = shear_function(halfplane_normalized(h2), depth, s1.tess)
    ds = d_S(s1, s2)
    fan_quads = [matching_fan_quadruple(s1, p, m, k) for p, m, k, _ in windows(s1)]
    shared = fan_quads + UnitCr(500, SEED).quadruples()
    dc = d_C_estimate(h1, h2, shared)  # disk maps evaluated independently of the shear tables
    das = d_AS(s1, s2, list(thresholds))
    groups = windows_by_threshold(s1, list(thresholds))
    dac = d_AC_estimate(h1, h2, [(g, [matching_fan_quadruple(s1, *w) for w in groups[g]]) for g in thresholds])
    slack = 1e-9
    ok = ds <= dc + slack and all(a <= b + slack for (_, a), (_, b) in zip(das, dac))
    gap = max([ds - dc] + [a - b for (_, a), (_, b) in zip(das, dac)])
    return ok, ds, dc, gap


def test_criterion_09_metric_inequalities():
    rng = np.random.default_rng(SEED + 9)
    cases = [("id vs counterexample(16)", identity_map(), Counterexample(16)),
             ("two random piecewise maps", random_piecewise(rng), random_piecewise(rng))]
    ok_all, details = True, []
    for name, h1, h2 in cases:
        ok, ds, dc, gap = _inequality_case(h1, h2)
        ok_all &= ok
        details.append(f"{name}: d_S={ds:.4f} d_C={dc:.4f}, worst excess {gap:.1e}")
    assert report(9, "d_S <= d_C and d_AS <= d_AC on shared samples", ok_all, "; ".join(details))


def test_criterion_10_modulus_unit():
    rng = np.random.default_rng(SEED + 10)
    unit = abs(modulus_from_cross_ratio(1.0) - 1.0)
    lams = np.exp(rng.uniform(-8, 8, 5))
    recip = max(abs(modulus_from_cross_ratio(1 / x) * modulus_from_cross_ratio(x) - 1) for x in lams)
    h = Counterexample(16)
    tie = 0.0
    for _, group in Degenerating([1e-1, 1e-2, 1e-3], 30, SEED).by_scale():
        for q in group:
            x, y = image_cross_ratio(h, q), image_cross_ratio(identity_map(), q)
            am = abs(math.log(modulus_from_cross_ratio(x)) - math.log(modulus_from_cross_ratio(y)))
            tie = max(tie, abs(am - rho_distance(x, y)))
    ok = unit < 1e-12 and recip < 1e-10 and tie == 0.0
    assert report(10, "M(1) = 1, reciprocity, modulus tie of d_AM and d_AC samples", ok,
                  f"|M(1)-1|={unit:.1e}, reciprocity {recip:.1e}, tie residual {tie}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
