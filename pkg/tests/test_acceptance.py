"""Acceptance criteria, one test each.

Every test prints a single ``[ACCEPTANCE n] PASS|FAIL`` line, visible without
``-s``, before asserting.
"""

import itertools
import time

import numpy as np
import pytest

from qreinhardt.action import WeightMatrix
from qreinhardt.bergman import (
    build_kernel,
    dense_cross_check,
    finite_difference_check,
    kernel_at_zero_flatness,
    metric_data,
    rep_coords,
)
from qreinhardt.domains import Ball, Egg, monomials_up_to, monte_carlo_moments, sample_interior
from qreinhardt.polymap import PolynomialMap, invert_resonant
from qreinhardt.resonance import check_antisymmetry, resonance_profile
from qreinhardt.scalar import GaussianRational as G
from qreinhardt.verify import (
    phi_k,
    phi_k_inverse,
    pushed_ball,
    random_resonant_map,
    random_valid_weights,
    transformation_residual,
    verify_theorem,
)


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPTANCE {n}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_resonance_1k(report):
    t0 = time.perf_counter()
    ok = True
    for k in (2, 3, 5):
        P = resonance_profile(WeightMatrix.of([[1], [k]]))
        scan = {a for a in itertools.product(range(11), repeat=2) if sum(a) <= 10 and a[0] + k * a[1] == k}
        ok = ok and P.mu == k and set(P.sets[1].elements) == scan == {(0, 1), (k, 0)}
    dt = time.perf_counter() - t0
    report(1, "resonance sets for weights (1,k)", ok and dt < 1.0, f"k in (2,3,5) match scan, {dt:.3f}s")


def test_criterion_2_antisymmetry_fuzz(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    violations = monotone_bad = 0
    pairs = 0
    for _ in range(1000):
        M, c = random_valid_weights(rng, n_max=5, r_max=2, lo=-3, hi=3)
        v = check_antisymmetry(M)
        violations += not v.passed
        s = c.scalars(M)
        pairs += len(v.relation)
        monotone_bad += sum(s[i] >= s[j] for i, j in v.relation)
    dt = time.perf_counter() - t0
    ok = violations == 0 and monotone_bad == 0 and dt < 30
    report(2, "antisymmetry fuzz", ok, f"1000 matrices, {pairs} relation pairs, {violations} violations, {monotone_bad} non-monotone, {dt:.1f}s")


def test_criterion_3_inversion(report):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(200):
        s = random_resonant_map(rng, n_max=4, mu_max=6)
        inv = invert_resonant(s)
        ident = PolynomialMap.identity(s.n)
        mu = s.profile.mu
        if not (s.map @ inv.map == ident and inv.map @ s.map == ident and s.degree() <= mu and inv.degree() <= mu):
            bad += 1
    dt = time.perf_counter() - t0
    report(3, "exact inversion and degree bound", bad == 0 and dt < 60, f"200 maps, {bad} failures, {dt:.1f}s")


def test_criterion_4_ball(report):
    K = build_kernel(Ball(2))
    T = metric_data(K)
    rc = rep_coords(K, T)
    err = rc.map.max_coefficient_distance(PolynomialMap.identity(2))
    terr = float(np.max(np.abs(T.T00 - 3 * np.eye(2))))
    report(4, "ball baseline", err <= 1e-9 and terr <= 1e-9, f"sigma error {err:.2e}, T00 error {terr:.2e}")


def test_criterion_5_pushforward(report):
    parts, ok = [], True
    for k in (2, 3):
        D = pushed_ball(k)
        rc = rep_coords(build_kernel(D))
        err = rc.map.max_coefficient_distance(phi_k_inverse(k))
        dr = dense_cross_check(D, k + 2)
        ok = ok and err <= 1e-8 and dr.discrepancy <= 1e-8 and dr.non_resonant_max <= 1e-8
        parts.append(f"k={k}: sigma {err:.1e}, dense {dr.discrepancy:.1e}, non-resonant {dr.non_resonant_max:.1e}")
    report(5, "pushforward representative coordinates", ok, "; ".join(parts))


def test_criterion_6_theorem(report):
    D = pushed_ball(2)
    J = PolynomialMap.linear([[G(0, 1), 0], [0, G(-1)]])
    f = phi_k(2) @ J @ phi_k_inverse(2)
    rep = verify_theorem(D, D, f, samples=1000, tol=1e-7, seed=0)
    ok = rep.residual <= 1e-7 and rep.negative_control is not None and rep.negative_control > 1e-3 and rep.verdict
    report(6, "factorization through representative coordinates", ok, f"residual {rep.residual:.2e}, negative control {rep.negative_control:.2e}")


def test_criterion_7_kernel_identities(report):
    rng = np.random.default_rng(7)
    flat = 0.0
    for D in (Ball(2), Egg(2, (1, 3)), pushed_ball(2), pushed_ball(3)):
        flat = max(flat, kernel_at_zero_flatness(build_kernel(D), sample_interior(D, 200, rng)))
    eq3 = transformation_residual(k=2, cap=6, pairs=100, seed=7)
    D = pushed_ball(2)
    K = build_kernel(D)
    z = sample_interior(D, 20, rng, shrink=0.7)
    e1 = finite_difference_check(K, z, 1e-3)
    e2 = finite_difference_check(K, z, 5e-4)
    ratio = e1 / e2
    ok = flat <= 1e-9 and eq3 <= 1e-7 and 3.5 <= ratio <= 4.5
    report(7, "kernel identities", ok, f"flatness {flat:.1e}, transformation {eq3:.1e}, FD ratio {ratio:.3f}")


def test_criterion_8_monte_carlo(report):
    D = Egg(2, (1, 3))
    exps = monomials_up_to(2, 4)
    t0 = time.perf_counter()
    mc = monte_carlo_moments(D, exps, 10_000_000, seed=8)
    dt = time.perf_counter() - t0
    m, s = mc.mean(), mc.stderr()
    exact = np.array([[D.exact_moment(a, b) for b in exps] for a in exps])
    frac = float(np.mean(np.abs(m - exact) <= 4 * s))
    report(8, "Monte Carlo consistency", frac >= 0.95 and dt < 300, f"{frac:.3f} of {len(exps) ** 2} probes within 4 stderr, {dt:.1f}s")
