import numpy as np
import pytest

from qreinhardt.action import WeightMatrix
from qreinhardt.bergman import build_kernel, rep_coords
from qreinhardt.domains import Ball
from qreinhardt.errors import PreconditionError
from qreinhardt.polymap import PolynomialMap, ResonantMap, invert_resonant
from qreinhardt.scalar import GaussianRational as G
from qreinhardt.verify import (
    fixture_suite,
    perturb_one,
    phi_k,
    phi_k_inverse,
    pushed_ball,
    random_resonant_map,
    snap_to_resonant,
    verify_theorem,
)


def automorphism(u1, u2, k=2):
    J = PolynomialMap.linear([[u1, 0], [0, u2]])
    return phi_k(k) @ J @ phi_k_inverse(k)


def test_cartan_unitary():
    U = PolynomialMap.linear([[G(3) / 5, G(0, 4) / 5], [G(0, 4) / 5, G(3) / 5]])
    rep = verify_theorem(Ball(2), Ball(2), U, samples=300, seed=1, negative_control=False)
    assert rep.verdict and rep.residual <= 1e-12
    assert rep.degrees["sigma1"] == rep.degrees["mu1"] == 1


@pytest.mark.parametrize("k, u", [(2, (G(0, 1), G(-1))), (2, (G(0, 1), G(0, 1))), (3, (G(-1), G(0, 1)))])
def test_pushforward_automorphisms(k, u):
    D = pushed_ball(k)
    f = automorphism(*u, k=k)
    rep = verify_theorem(D, D, f, samples=500, seed=2)
    assert rep.verdict, rep.to_json()
    assert rep.residual <= 1e-7
    assert rep.L_f_error <= 1e-7
    assert rep.maps_into_D2 == 1.0
    assert rep.degrees["sigma2_inverse"] <= rep.degrees["mu2"] == k
    assert rep.negative_control > 1e-3


def test_ball_to_pushforward():
    rep = verify_theorem(Ball(2), pushed_ball(2), phi_k(2), samples=300, negative_control=False)
    assert rep.verdict
    assert rep.degrees["sigma1"] == 1 and rep.degrees["sigma2"] == 2


def test_wrong_map_fails():
    # phi_3 does not carry the ball onto the phi_2 pushforward
    rep = verify_theorem(Ball(2), pushed_ball(2), phi_k(3), samples=300, negative_control=False)
    assert not rep.verdict
    assert rep.residual > 1e-3


def test_snap_rejects_large_non_resonant_term():
    K = build_kernel(pushed_ball(2))
    rc = rep_coords(K)
    comps = list(rc.map.components)
    from qreinhardt.polymap import Polynomial

    comps[0] = comps[0] + Polynomial(2, {(0, 1): 1e-3})
    rc.map = PolynomialMap(tuple(comps))
    with pytest.raises(PreconditionError):
        snap_to_resonant(rc, 1e-8)


def test_snap_keeps_resonant_terms():
    s = snap_to_resonant(rep_coords(build_kernel(pushed_ball(3))))
    assert s.map.max_coefficient_distance(phi_k_inverse(3)) <= 1e-10


def test_perturb_one_changes_a_nonlinear_coefficient(rng):
    s = random_resonant_map(rng)
    t = perturb_one(s)
    assert t is not None and t != s
    assert t.map.linear_matrix() == s.map.linear_matrix()
    assert perturb_one(ResonantMap(PolynomialMap.identity(2), WeightMatrix.of([[1], [2]]))) is None


def test_dimension_mismatch():
    with pytest.raises(PreconditionError):
        verify_theorem(Ball(2), Ball(3), PolynomialMap.identity(2))


def test_suite_budget_zero_passes():
    rep = fixture_suite(seed=3, budget=0, fuzz=50)
    assert rep["pass"], [e for e in rep["fixtures"] if not e["pass"]]
    mc = next(e for e in rep["fixtures"] if e["name"] == "monte_carlo_consistency")
    assert mc["details"] == {"skipped": True}


def test_suite_corrupt_surfaces_resonance_failure():
    rep = fixture_suite(seed=3, budget=0, corrupt=True, fuzz=20)
    assert not rep["pass"]
    bad = {e["name"]: e for e in rep["fixtures"] if not e["pass"]}
    assert "fixture_phi2_resonant" in bad
    assert bad["fixture_phi2_resonant"]["details"]["violations"] == [{"component": 2, "exp": [2, 0]}]


def test_inverse_of_snapped_sigma_is_phi():
    s = snap_to_resonant(rep_coords(build_kernel(pushed_ball(2))))
    inv = invert_resonant(s)
    assert inv.map.max_coefficient_distance(phi_k(2)) <= 1e-10
    z = np.array([[0.1 + 0.2j, -0.3j]])
    np.testing.assert_allclose(inv.map.evaluate(s.map.evaluate(z)), z, atol=1e-14)
