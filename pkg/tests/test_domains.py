import math

import numpy as np
import pytest
from scipy import integrate

from qreinhardt.action import WeightMatrix
from qreinhardt.domains import (
    Ball,
    Egg,
    domain_from_json,
    gram_matrix,
    monomial_moment,
    monomials_up_to,
    monte_carlo_moments,
    quadrature_moment,
    volume,
    weight_orthogonality_check,
)
from qreinhardt.errors import InputError, InvalidActionError
from qreinhardt.resonance import enumerate_weight_class, resonance_profile
from qreinhardt.verify import phi_k, pushed_ball


def radial_oracle(p, alpha):
    """Diagonal egg moment in polar coordinates: (2 pi)^n times a radial integral."""
    if len(p) == 1:
        v, _ = integrate.quad(lambda r: r ** (2 * alpha[0] + 1), 0, 1)
        return 2 * math.pi * v
    p1, p2 = p
    v, _ = integrate.dblquad(
        lambda r2, r1: r1 ** (2 * alpha[0] + 1) * r2 ** (2 * alpha[1] + 1),
        0,
        1,
        lambda r1: 0.0,
        lambda r1: (1 - r1 ** (2 / p1)) ** (p2 / 2),
        epsabs=1e-14,
        epsrel=1e-13,
    )
    return (2 * math.pi) ** 2 * v


@pytest.mark.parametrize("a", [0, 1, 2, 5])
def test_disc_moment(a):
    m = monomial_moment(Ball(1), (a,), (a,))
    assert m.value == pytest.approx(math.pi / (a + 1), rel=1e-14)
    assert m.value == pytest.approx(radial_oracle((1,), (a,)), rel=1e-12)


@pytest.mark.parametrize("p", [(1, 1), (1, 2), (1, 3), (2, 3)])
@pytest.mark.parametrize("alpha", [(0, 0), (1, 0), (0, 1), (2, 1), (1, 3)])
def test_closed_form_vs_oracles(p, alpha):
    D = Egg(2, p)
    exact = D.exact_moment(alpha, alpha).real
    assert exact == pytest.approx(radial_oracle(p, alpha), rel=1e-9)
    if p[0] == 1:
        # the Cartesian rule is smooth only when |z1|^(2/p1) is
        assert quadrature_moment(D, alpha, alpha, nodes=60).real == pytest.approx(exact, rel=1e-9)


def test_off_diagonal_vanish():
    assert monomial_moment(Ball(2), (1, 0), (0, 1)).value == 0
    assert abs(quadrature_moment(Egg(2, (1, 3)), (1, 0), (0, 1))) < 1e-13


def test_volumes():
    assert volume(Ball(2)).value.real == pytest.approx(math.pi**2 / 2, rel=1e-14)
    assert volume(Ball(3)).value.real == pytest.approx(math.pi**3 / 6, rel=1e-14)
    assert volume(Egg(1, (1,))).value.real == pytest.approx(math.pi, rel=1e-14)
    for k in (2, 3):
        v = volume(pushed_ball(k))
        assert v.method == "pushforward"
        assert v.value.real == pytest.approx(math.pi**2 / 2, rel=1e-14)


def test_pushforward_moment_by_change_of_variables():
    D = pushed_ball(2)
    # z2 = w2 + w1^2 over the ball: |z2|^2 = |w2|^2 + |w1|^4 after orthogonality
    B = Ball(2)
    expected = B.exact_moment((0, 1), (0, 1)) + B.exact_moment((2, 0), (2, 0))
    assert D.exact_moment((0, 1), (0, 1)) == pytest.approx(expected, rel=1e-14)
    # <z2, z1^2> = <w1^2, w1^2>
    assert D.exact_moment((0, 1), (2, 0)) == pytest.approx(B.exact_moment((2, 0), (2, 0)), rel=1e-14)


def test_hermitian_symmetry():
    D = pushed_ball(3)
    exps = monomials_up_to(2, 3)
    G = gram_matrix(D, exps)
    for i, a in enumerate(exps):
        for j, b in enumerate(exps):
            assert D.exact_moment(a, b) == np.conj(D.exact_moment(b, a))
    assert np.array_equal(G, G.conj().T)


@pytest.mark.parametrize("D", [Ball(2), Egg(2, (1, 3)), pushed_ball(2), pushed_ball(3)])
def test_class_gram_positive_definite(D):
    prof = resonance_profile(D.weights)
    for i in range(D.n):
        cls = sorted(enumerate_weight_class(D.weights, prof.certificate, D.weights.rows[i]))
        G = gram_matrix(D, cls)
        assert np.linalg.eigvalsh(G).min() > 0


@pytest.mark.parametrize(
    "D, cap",
    [(Ball(2), 3), (pushed_ball(2), 4), (Egg(2, (1, 2)), 3), (Egg(2, (1, 3)), 4)],
)
def test_orthogonality_exact(D, cap):
    v = weight_orthogonality_check(D, cap)
    assert v.passed and v.max_abs == 0 and v.pairs_checked > 0


def test_orthogonality_monte_carlo():
    v = weight_orthogonality_check(pushed_ball(2), 3, method="monte_carlo", samples=200_000, seed=3)
    assert v.passed


def test_monte_carlo_agreement():
    D = pushed_ball(2)
    exps = monomials_up_to(2, 3)
    mc = monte_carlo_moments(D, exps, 400_000, seed=1, chunk=50_000)
    m, s = mc.mean(), mc.stderr()
    G = gram_matrix(D, exps)
    frac = np.mean(np.abs(m - G) <= 4 * s)
    assert frac >= 0.95


def test_monte_carlo_deterministic_across_threads():
    D = Egg(2, (1, 3))
    exps = monomials_up_to(2, 2)
    a = monte_carlo_moments(D, exps, 100_000, seed=9, chunk=10_000, threads=1)
    b = monte_carlo_moments(D, exps, 100_000, seed=9, chunk=10_000, threads=4)
    assert np.array_equal(a.mean(), b.mean()) and np.array_equal(a.stderr(), b.stderr())
    c = monte_carlo_moments(D, exps, 100_000, seed=10, chunk=10_000)
    assert not np.array_equal(a.mean(), c.mean())


def test_monte_carlo_moment_reports_seed():
    m = monomial_moment(Ball(2), (0, 0), (0, 0), method="monte_carlo", samples=50_000, seed=4)
    assert m.seed == 4 and m.samples == 50_000 and m.stderr > 0
    assert abs(m.value - math.pi**2 / 2) < 5 * m.stderr


def test_method_errors():
    with pytest.raises(InputError):
        monomial_moment(Ball(2), (0, 0), (0, 0), method="pushforward")
    with pytest.raises(InputError):
        monomial_moment(pushed_ball(2), (0, 0), (0, 0), method="quadrature")
    with pytest.raises(InputError):
        monomial_moment(Ball(2), (0,), (0, 0))
    with pytest.raises(InputError):
        monomial_moment(Ball(2), (0, 0), (0, 0), method="cubature")


def test_domain_json():
    assert domain_from_json({"type": "ball", "n": 2}).to_json() == Ball(2).to_json()
    assert domain_from_json({"type": "egg", "n": 2, "p": [1, 3]}).to_json() == Egg(2, (1, 3)).to_json()
    w = {"n": 2, "r": 1, "rows": [[1], [2]]}
    js = {"type": "pushforward", "base": {"type": "ball", "n": 2}, "map": phi_k(2).to_json(), "weights": w}
    D = domain_from_json(js)
    assert D.weights == WeightMatrix.of([[1], [2]])
    assert domain_from_json(D.to_json()).exact_moment((0, 1), (0, 1)) == D.exact_moment((0, 1), (0, 1))
    js["weights"] = {"n": 2, "r": 1, "rows": [[1], [3]]}
    with pytest.raises(InputError):
        domain_from_json(js)
    with pytest.raises(InvalidActionError):
        domain_from_json({"type": "ball", "n": 2, "weights": {"n": 2, "r": 1, "rows": [[1], [-1]]}})
    with pytest.raises(InputError):
        domain_from_json({"type": "torus"})


def test_membership():
    B = Ball(2)
    assert B.contains(np.array([[0.5, 0.5], [0.8, 0.8]])).tolist() == [True, False]
    D = pushed_ball(2)
    # phi_2 maps (0.5, 0) to (0.5, 0.25)
    assert D.contains(np.array([[0.5, 0.25], [0.9, 0.0]])).tolist() == [True, False]
