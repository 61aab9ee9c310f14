"""End-to-end checks of the factorization through representative coordinates.

For an origin-fixing biholomorphism ``f: D1 -> D2`` the claim checked here is
``f = sigma2^-1 o J_f o sigma1`` with ``J_f`` the linear part of ``f``, and
``deg sigma_i, deg sigma_i^-1 <= mu(D_i)``.
"""

from __future__ import annotations

import math
import traceback
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .action import WeightMatrix, validate_action, weight_of_monomial
from .bergman import (
    RepCoords,
    build_kernel,
    dense_cross_check,
    dense_kernel,
    finite_difference_check,
    kernel_at_zero_flatness,
    metric_data,
    rep_coords,
)
from .domains import (
    Ball,
    Domain,
    Egg,
    Pushforward,
    monomials_up_to,
    monte_carlo_moments,
    quadrature_moment,
    sample_interior,
    volume,
    weight_orthogonality_check,
)
from .errors import PreconditionError
from .polymap import (
    Polynomial,
    PolynomialMap,
    ResonantMap,
    factor_biholomorphism,
    invert_resonant,
    is_resonant,
    linear_part,
)
from .resonance import check_antisymmetry, resonance_profile, unit
from .scalar import GaussianRational


def snap_to_resonant(rc: RepCoords, tol: float = 1e-8) -> ResonantMap:
    """Project floating ``sigma_0`` onto its resonant form.

    Non-resonant coefficients and deviations of the linear part from the
    identity are dropped when below ``tol`` and rejected otherwise.
    """
    n = rc.map.n
    comps = []
    for i, p in enumerate(rc.map.components):
        E = rc.profile.sets[i]
        e = unit(n, i)
        terms = {}
        for a, c in p.items():
            c = complex(c)
            if a == e:
                if abs(c - 1) > tol:
                    raise PreconditionError(f"linear coefficient of sigma_{i + 1} is {c}, not 1")
                terms[a] = GaussianRational(1)
            elif sum(a) >= 2 and a in E:
                terms[a] = c
            elif abs(c) > tol:
                raise PreconditionError(
                    f"sigma_{i + 1} has coefficient {c:.3g} at non-resonant z^{list(a)}"
                )
        comps.append(Polynomial(n, terms))
    return ResonantMap(PolynomialMap(tuple(comps)), rc.weights, rc.profile)


def factorization_residual(sigma1: ResonantMap, sigma2: ResonantMap, f: PolynomialMap, z) -> tuple[float, np.ndarray]:
    g = factor_biholomorphism(sigma1, sigma2, linear_part(f))
    err = np.abs(f.evaluate(z) - g.evaluate(z)).max(axis=1)
    k = int(np.argmax(err))
    return float(err[k]), z[k]


def perturb_one(sigma: ResonantMap, rel: float = 0.1) -> ResonantMap | None:
    """Scale the largest nonlinear coefficient by ``1 + rel``."""
    best = None
    for i, p in enumerate(sigma.map.components):
        for a, c in p.items():
            if sum(a) >= 2 and (best is None or abs(complex(c)) > best[2]):
                best = (i, a, abs(complex(c)))
    if best is None:
        return None
    i, a, _ = best
    comps = list(sigma.map.components)
    t = comps[i].terms
    t[a] = complex(t[a]) * (1 + rel)
    comps[i] = Polynomial(sigma.n, t)
    return ResonantMap(PolynomialMap(tuple(comps)), sigma.weights, sigma.profile)


@dataclass
class TheoremReport:
    residual: float
    worst_point: list
    degrees: dict
    L_f_error: float
    maps_into_D2: float
    verdict: bool
    tol: float
    sigma1: RepCoords = field(repr=False, default=None)
    sigma2: RepCoords = field(repr=False, default=None)
    negative_control: float | None = None

    def to_json(self) -> dict:
        return {
            "residual": self.residual,
            "worst_point": [[complex(x).real, complex(x).imag] for x in self.worst_point],
            "degrees": self.degrees,
            "L_f_error": self.L_f_error,
            "fraction_mapped_into_D2": self.maps_into_D2,
            "negative_control_residual": self.negative_control,
            "tol": self.tol,
            "pass": self.verdict,
            "sigma1": self.sigma1.map.to_json() if self.sigma1 else None,
            "sigma2": self.sigma2.map.to_json() if self.sigma2 else None,
        }


def verify_theorem(
    D1: Domain,
    D2: Domain,
    f: PolynomialMap,
    samples: int = 1000,
    tol: float = 1e-7,
    seed: int = 0,
    snap_tol: float = 1e-8,
    negative_control: bool = True,
) -> TheoremReport:
    if f.n != D1.n or f.n != D2.n:
        raise PreconditionError("map and domains live in different dimensions")
    linear_part(f)  # raises when f(0) != 0
    rc1 = rep_coords(build_kernel(D1))
    rc2 = rep_coords(build_kernel(D2))
    s1, s2 = snap_to_resonant(rc1, snap_tol), snap_to_resonant(rc2, snap_tol)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    z = sample_interior(D1, samples, rng, shrink=0.9)
    inside = float(np.mean(D2.contains(f.evaluate(z))))
    residual, worst = factorization_residual(s1, s2, f, z)
    inv1, inv2 = invert_resonant(s1), invert_resonant(s2)
    mu1, mu2 = rc1.profile.mu, rc2.profile.mu
    degrees = {
        "sigma1": s1.degree(),
        "sigma1_inverse": inv1.degree(),
        "mu1": mu1,
        "sigma2": s2.degree(),
        "sigma2_inverse": inv2.degree(),
        "mu2": mu2,
    }
    # the linear map intertwining sigma2 o f and sigma1, fitted on samples
    X = s1.map.evaluate(z)
    Y = s2.map.evaluate(f.evaluate(z))
    Lt, *_ = np.linalg.lstsq(X, Y, rcond=None)
    Jm = np.array([[complex(c) for c in row] for row in f.linear_matrix()])
    L_err = float(np.max(np.abs(Lt.T - Jm)))
    neg = None
    if negative_control:
        bad = perturb_one(s2)
        if bad is not None:
            neg, _ = factorization_residual(s1, bad, f, z)
    deg_ok = degrees["sigma1"] <= mu1 and degrees["sigma1_inverse"] <= mu1
    deg_ok = deg_ok and degrees["sigma2"] <= mu2 and degrees["sigma2_inverse"] <= mu2
    verdict = residual <= tol and deg_ok and L_err <= max(tol, 1e-7) and inside == 1.0
    return TheoremReport(residual, list(worst), degrees, L_err, inside, verdict, tol, rc1, rc2, neg)


# ---------------------------------------------------------------------------
# random fixtures


def random_valid_weights(rng, n_max=5, r_max=2, lo=-3, hi=3, distinct=True, n_min=1):
    """Rejection-sample a valid integer weight matrix with entries in ``[lo, hi]``."""
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        r = int(rng.integers(1, r_max + 1))
        rows = rng.integers(lo, hi + 1, size=(n, r)).tolist()
        M = WeightMatrix.of(rows)
        if distinct and not M.has_distinct_rows():
            continue
        cert = validate_action(M)
        if cert.valid:
            return M, cert


def random_rational(rng, span=3, den=4) -> GaussianRational:
    from fractions import Fraction

    d = int(rng.integers(1, den + 1))
    return GaussianRational(
        Fraction(int(rng.integers(-span * d, span * d + 1)), d),
        Fraction(int(rng.integers(-span, span + 1))),
    )


def random_resonant_map(rng, n_max=4, mu_max=6, max_terms=5, require_terms=True):
    """Random exact resonant map over random valid weights with ``mu <= mu_max``."""
    while True:
        M, _ = random_valid_weights(rng, n_max=n_max, r_max=2, lo=-2, hi=4, distinct=False, n_min=2)
        prof = resonance_profile(M)
        if prof.mu > mu_max:
            continue
        pool = [(i, a) for i, s in enumerate(prof.sets) for a in s.nonlinear()]
        if require_terms and not pool:
            continue
        n = M.n
        comps = [{unit(n, i): GaussianRational(1)} for i in range(n)]
        k = int(rng.integers(1, max_terms + 1)) if pool else 0
        for idx in rng.permutation(len(pool))[:k]:
            i, a = pool[int(idx)]
            c = random_rational(rng)
            if c:
                comps[i][a] = c
        return ResonantMap(PolynomialMap.from_dicts(n, comps), M, prof)


def brute_force_class(M: WeightMatrix, w, max_degree: int) -> set:
    out = set()
    for a in monomials_up_to(M.n, max_degree):
        if weight_of_monomial(M, a) == tuple(w):
            out.add(a)
    return out


# ---------------------------------------------------------------------------
# fixtures


def phi_k(k: int) -> PolynomialMap:
    return PolynomialMap.from_dicts(2, [{(1, 0): 1}, {(0, 1): 1, (k, 0): 1}])


def phi_k_inverse(k: int) -> PolynomialMap:
    return PolynomialMap.from_dicts(2, [{(1, 0): 1}, {(0, 1): 1, (k, 0): -1}])


def pushed_ball(k: int, weights: WeightMatrix | None = None) -> Pushforward:
    W = weights or WeightMatrix.of([[1], [k]])
    return Pushforward(Ball(2), ResonantMap(phi_k(k), W))


def _entry(name, fn):
    # no timings: the report must be reproducible byte for byte
    try:
        ok, details = fn()
        status = "pass" if ok else "fail"
    except Exception as exc:  # aggregate, never abort
        ok, status = False, "error"
        details = {"error": f"{type(exc).__name__}: {exc}", "trace": traceback.format_exc(limit=3)}
    return {"name": name, "status": status, "pass": bool(ok), "details": details}


def fixture_suite(seed: int = 0, budget: int = 200_000, corrupt: bool = False, fuzz: int = 1000) -> dict:
    """Deterministic battery over the built-in fixtures.

    ``budget`` is the Monte Carlo sample count; 0 skips the Monte Carlo items.
    ``corrupt`` swaps the weights of the phi_2 pushforward fixture for (1, 3),
    which the resonance check must catch.
    """
    entries = []
    push_weights = WeightMatrix.of([[1], [3]]) if corrupt else WeightMatrix.of([[1], [2]])

    def validation():
        cases = [
            ([[1], [2]], True, (1,)),
            ([[1], [-1]], False, (1, 1)),
            ([[1, 0], [0, 1], [1, 1]], True, (1, 1)),
            ([[0], [1]], False, (1, 0)),
        ]
        got = []
        for rows, valid, vec in cases:
            cert = validate_action(WeightMatrix.of(rows))
            v = cert.c if cert.valid else cert.gamma
            got.append(cert.valid == valid and tuple(v) == vec and cert.verify(WeightMatrix.of(rows)))
        return all(got), {"cases": len(cases)}

    def resonance_1k():
        out = {}
        for k in (2, 3, 5):
            M = WeightMatrix.of([[1], [k]])
            prof = resonance_profile(M)
            brute = brute_force_class(M, (k,), 10)
            out[k] = prof.mu == k and set(prof.sets[1].elements) == brute == {(0, 1), (k, 0)}
        return all(out.values()), {f"k={k}": v for k, v in out.items()}

    def antisymmetry():
        r = np.random.default_rng(np.random.SeedSequence([seed, 1]))
        bad = 0
        for _ in range(fuzz):
            M, cert = random_valid_weights(r)
            v = check_antisymmetry(M)
            s = cert.scalars(M)
            if not v.passed or any(s[i] >= s[j] for i, j in v.relation):
                bad += 1
        return bad == 0, {"matrices": fuzz, "violations": bad}

    def round_trip():
        r = np.random.default_rng(np.random.SeedSequence([seed, 2]))
        bad = 0
        for _ in range(50):
            s = random_resonant_map(r)
            t = invert_resonant(s)
            ident = PolynomialMap.identity(s.n)
            if s.map.compose(t.map) != ident or t.map.compose(s.map) != ident or t.degree() > s.profile.mu:
                bad += 1
        return bad == 0, {"maps": 50, "failures": bad}

    def moments_vs_quadrature():
        worst = 0.0
        for D in (Ball(2), Egg(2, (1, 3)), Egg(1, (1,))):
            for a in monomials_up_to(D.n, 2):
                exact = D.exact_moment(a, a).real
                q = quadrature_moment(D, a, a).real
                worst = max(worst, abs(exact - q) / exact)
        return worst < 1e-8, {"max_relative_error": worst}

    def pushforward_volume():
        v = volume(pushed_ball(2, WeightMatrix.of([[1], [2]]))).value.real
        return abs(v - math.pi**2 / 2) < 1e-12, {"volume": v}

    def orthogonality():
        res = {
            "ball": weight_orthogonality_check(Ball(2), 3).passed,
            "pushforward": weight_orthogonality_check(pushed_ball(2, WeightMatrix.of([[1], [2]])), 4).passed,
            "egg": weight_orthogonality_check(Egg(2, (1, 3)), 4).passed,
        }
        return all(res.values()), res

    def fixture_resonant():
        v = is_resonant(phi_k(2), push_weights)
        return v.passed, v.to_json()

    def negative_control_resonance():
        v = is_resonant(phi_k(2), WeightMatrix.of([[1], [3]]))
        return (not v.passed) and (1, (2, 0)) in v.violations, v.to_json()

    def ball_kernel():
        K = build_kernel(Ball(2))
        T = metric_data(K)
        rc = rep_coords(K, T)
        err = rc.map.max_coefficient_distance(PolynomialMap.identity(2))
        terr = float(np.max(np.abs(T.T00 - 3 * np.eye(2))))
        return err <= 1e-9 and terr <= 1e-9 and abs(K.K00 - 2 / math.pi**2) < 1e-15, {
            "sigma_error": err,
            "T00_error": terr,
        }

    def pushforward_kernel():
        out = {}
        ok = True
        for k in (2, 3):
            W = push_weights if k == 2 else WeightMatrix.of([[1], [3]])
            D = Pushforward(Ball(2), ResonantMap(phi_k(k), W))
            rc = rep_coords(build_kernel(D))
            err = rc.map.max_coefficient_distance(phi_k_inverse(k).to_complex())
            dr = dense_cross_check(D, k + 2)
            out[f"k={k}"] = {"sigma_error": err, **dr.to_json()}
            ok = ok and err <= 1e-8 and dr.passed(1e-8)
        return ok, out

    def flatness():
        vals = {}
        for name, D in (("ball", Ball(2)), ("phi2", pushed_ball(2, WeightMatrix.of([[1], [2]])))):
            r = np.random.default_rng(np.random.SeedSequence([seed, 3]))
            z = sample_interior(D, 100, r)
            vals[name] = max(kernel_at_zero_flatness(build_kernel(D), z), dense_cross_check(D).flatness)
        return max(vals.values()) <= 1e-9, vals

    def transformation():
        res = transformation_residual(seed=seed)
        return res <= 1e-7, {"residual": res}

    def finite_differences():
        K = build_kernel(Ball(2))
        r = np.random.default_rng(np.random.SeedSequence([seed, 4]))
        z = sample_interior(Ball(2), 20, r)
        e1 = finite_difference_check(K, z, 1e-3)
        e2 = finite_difference_check(K, z, 5e-4)
        return e1 <= 1e-5 and 3.5 <= e1 / e2 <= 4.5, {"error_h": e1, "error_h_half": e2, "ratio": e1 / e2}

    def theorem_cases():
        out = {}
        U = PolynomialMap.linear([[GaussianRational(3, 0) / 5, GaussianRational(0, 4) / 5], [GaussianRational(0, 4) / 5, GaussianRational(3, 0) / 5]])
        rep = verify_theorem(Ball(2), Ball(2), U, samples=200, seed=seed, negative_control=False)
        out["cartan"] = rep.verdict and rep.residual <= 1e-12
        D = pushed_ball(2, WeightMatrix.of([[1], [2]]))
        J = PolynomialMap.linear([[GaussianRational(0, 1), 0], [0, -1]])
        f = phi_k(2).compose(J).compose(phi_k_inverse(2))
        rep = verify_theorem(D, D, f, samples=1000, seed=seed)
        out["automorphism"] = rep.verdict and rep.negative_control is not None and rep.negative_control > 1e-3
        rep = verify_theorem(Ball(2), D, phi_k(2), samples=200, seed=seed, negative_control=False)
        out["ball_to_pushforward"] = rep.verdict
        return all(out.values()), out

    def monte_carlo():
        if budget <= 0:
            return True, {"skipped": True}
        D = Egg(2, (1, 3))
        exps = monomials_up_to(2, 4)
        mc = monte_carlo_moments(D, exps, budget, seed)
        m, s = mc.mean(), mc.stderr()
        hits = sum(
            abs(m[i, j] - D.exact_moment(a, b)) <= 4 * s[i, j]
            for i, a in enumerate(exps)
            for j, b in enumerate(exps)
        )
        frac = hits / len(exps) ** 2
        return frac >= 0.95, {"fraction_within_4_stderr": frac, "samples": budget}

    checks = [
        ("validation", validation),
        ("resonance_1k", resonance_1k),
        ("antisymmetry_fuzz", antisymmetry),
        ("inversion_round_trip", round_trip),
        ("moments_vs_quadrature", moments_vs_quadrature),
        ("pushforward_volume", pushforward_volume),
        ("weight_orthogonality", orthogonality),
        ("fixture_phi2_resonant", fixture_resonant),
        ("negative_control_resonance", negative_control_resonance),
        ("ball_kernel", ball_kernel),
        ("pushforward_kernel", pushforward_kernel),
        ("kernel_flatness", flatness),
        ("metric_transformation", transformation),
        ("finite_differences", finite_differences),
        ("theorem_cases", theorem_cases),
        ("monte_carlo_consistency", monte_carlo),
    ]
    for name, fn in checks:
        entries.append(_entry(name, fn))
    return {
        "version": __version__,
        "seed": seed,
        "budget": budget,
        "corrupt": corrupt,
        "fixtures": entries,
        "pass": all(e["pass"] for e in entries),
    }


def transformation_residual(k: int = 2, cap: int = 6, pairs: int = 100, seed: int = 0) -> float:
    """Max entrywise residual of ``T_B(z,w) - conj(J(w))^T T_D(f z, f w) J(z)`` for ``f = phi_k``.

    Both kernels are truncated to the same union of weight classes, which
    pullback by ``phi_k`` maps onto itself, so the identity holds exactly.
    """
    W = WeightMatrix.of([[1], [k]])
    B = Ball(2, W)
    D = pushed_ball(k, W)
    kb, _ = dense_kernel(B, cap, "weighted")
    kd, _ = dense_kernel(D, cap, "weighted")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 5]))
    z = sample_interior(B, pairs, rng)
    w = sample_interior(B, pairs, rng)
    f = phi_k(k)
    jac = f.jacobian()

    def J(p):
        return np.array([[jac[i][j].evaluate(p) for j in range(2)] for i in range(2)]).transpose(2, 0, 1)

    lhs = kb.metric(z, w)
    rhs = np.conj(np.transpose(J(w), (0, 2, 1))) @ kd.metric(f.evaluate(z), f.evaluate(w)) @ J(z)
    return float(np.max(np.abs(lhs - rhs)))
