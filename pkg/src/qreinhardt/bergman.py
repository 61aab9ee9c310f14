"""Bergman kernel data, metric tensor at the origin and representative coordinates.

Monomials of distinct torus weight are orthogonal in the Bergman space, so the
kernel splits into finite weight-class blocks::

    K(z, w) = sum_classes sum_{a, b in class} c[a, b] z^a conj(w)^b,   c = conj(G^-1)

with ``G`` the class Gram matrix. Only the classes of weight 0 and of the
coordinate weights ``m_i`` reach ``T(z, 0)`` and ``sigma_0``, which makes the
class-decoupled path a finite exact computation. The dense path rebuilds
everything from the full Gram matrix over a monomial box without using the
class structure, and is what keeps the resonance statements falsifiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .action import WeightMatrix, weight_of_monomial
from .domains import (
    Domain,
    MonteCarloMoments,
    _monomial_matrix,
    _resolve,
    gram_matrix,
    monomials_up_to,
    monte_carlo_moments,
    sample_interior,
    volume,
)
from .errors import NumericalError, PreconditionError
from .polymap import Polynomial, PolynomialMap
from .resonance import MultiIndex, ResonanceProfile, enumerate_weight_class, resonance_profile, unit

COND_LIMIT = 1e12


def _hermitian_inverse(G: np.ndarray, label: str) -> np.ndarray:
    G = 0.5 * (G + G.conj().T)
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(
            f"Gram matrix of {label} is ill-conditioned (cond={cond:.3g})",
            {"class": label, "cond": float(cond), "size": G.shape[0]},
        )
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        ev = np.linalg.eigvalsh(G)
        raise NumericalError(
            f"Gram matrix of {label} is not positive definite",
            {"class": label, "min_eigenvalue": float(ev.min())},
        ) from None
    Linv = np.linalg.solve(L, np.eye(G.shape[0]))
    return Linv.conj().T @ Linv


@dataclass
class WeightClassBasis:
    weight: tuple[int, ...]
    monomials: list[MultiIndex]
    gram: np.ndarray
    coeffs: np.ndarray  # c[a, b] = (G^-1)[b, a]

    def index(self, alpha) -> int:
        return self.monomials.index(tuple(alpha))

    def coefficient(self, alpha, beta) -> complex:
        return complex(self.coeffs[self.index(alpha), self.index(beta)])

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.gram + self.gram.conj().T)).min())


@dataclass
class KernelData:
    domain: Domain
    profile: ResonanceProfile
    classes: dict[tuple[int, ...], WeightClassBasis]
    K00: float
    method: str
    volume: float
    mc: MonteCarloMoments | None = None
    exponents: list[MultiIndex] = field(default_factory=list)

    def coefficient(self, alpha, beta) -> complex:
        """``c[alpha, beta]``; zero across distinct weights."""
        M = self.domain.weights
        wa, wb = weight_of_monomial(M, alpha), weight_of_monomial(M, beta)
        if wa != wb or wa not in self.classes:
            return 0j
        return self.classes[wa].coefficient(alpha, beta)

    def section(self, i: int) -> Polynomial:
        """``(1/K00) * d/d conj(w_i) K(z, w)`` at ``w = 0``."""
        n = self.domain.n
        cls = self.classes[self.domain.weights.rows[i]]
        e = unit(n, i)
        j = cls.index(e)
        return Polynomial(n, {a: complex(cls.coeffs[k, j]) / self.K00 for k, a in enumerate(cls.monomials)})

    def kernel_at_zero(self, z) -> np.ndarray:
        """``K(z, 0)``; only the weight-zero class contributes."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        zero = (0,) * self.domain.n
        total = np.zeros(len(z), dtype=complex)
        for w, cls in self.classes.items():
            if zero not in cls.monomials:
                continue
            j = cls.index(zero)
            V = _monomial_matrix(z, cls.monomials)
            total += V @ cls.coeffs[:, j]
        return total

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "K00": self.K00,
            "volume": self.volume,
            "classes": [
                {
                    "weight": list(w),
                    "monomials": [list(a) for a in c.monomials],
                    "gram": _cmat(c.gram),
                    "coeffs": _cmat(c.coeffs),
                }
                for w, c in sorted(self.classes.items())
            ],
        }


def _cmat(A: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(A)]


def _class_coefficients(monomials, gram_fn, label) -> tuple[np.ndarray, np.ndarray]:
    G = gram_fn(monomials)
    Ginv = _hermitian_inverse(G, label)
    return G, Ginv.T  # conj(G^-1) == (G^-1)^T for Hermitian G


def build_kernel(
    D: Domain,
    method: str = "auto",
    samples: int = 1_000_000,
    seed: int = 0,
    threads: int = 1,
    mc: MonteCarloMoments | None = None,
) -> KernelData:
    """Gram blocks for the weight-0 class and the classes of ``m_1..m_n``.

    A precomputed Monte Carlo run ``mc`` covering the class monomials is reused
    instead of drawing new samples.
    """
    method = _resolve(D, method)
    if method == "quadrature":
        raise PreconditionError("kernel assembly uses exact or Monte Carlo moments")
    profile = resonance_profile(D.weights)
    c = profile.certificate
    M = D.weights
    targets = [(0,) * M.r] + sorted(set(M.rows), key=lambda w: (sum(x * y for x, y in zip(w, c.c)), w))
    members = {w: sorted(enumerate_weight_class(M, c, w)) for w in targets}
    union: list[MultiIndex] = []
    if mc is not None:
        method = "monte_carlo"
    if method == "monte_carlo":
        needed = {a for L in members.values() for a in L}
        if mc is None:
            union = sorted(needed, key=lambda a: (sum(a), a))
            mc = monte_carlo_moments(D, union, samples, seed, threads=threads)
        elif not needed <= set(mc.exponents):
            raise PreconditionError("supplied Monte Carlo run misses class monomials")
        union = list(mc.exponents)
        full = mc.mean()
        pos = {a: k for k, a in enumerate(union)}

        def gram_fn(L):
            idx = [pos[a] for a in L]
            return full[np.ix_(idx, idx)]

        vol = float(full[pos[(0,) * D.n], pos[(0,) * D.n]].real)
    else:

        def gram_fn(L):
            return gram_matrix(D, L)

        vol = volume(D).value.real
    classes = {}
    for w in targets:
        L = members[w]
        G, C = _class_coefficients(L, gram_fn, f"weight {list(w)}")
        classes[w] = WeightClassBasis(w, L, G, C)
    zero_cls = classes[(0,) * M.r]
    if zero_cls.monomials != [(0,) * D.n]:
        raise AssertionError("weight-zero class must consist of the constant monomial")
    K00 = float(zero_cls.coeffs[0, 0].real)
    if abs(K00 * vol - 1.0) > 1e-12:
        raise AssertionError("K(0,0) differs from 1/vol(D)")
    return KernelData(D, profile, classes, K00, method, vol, mc, union)


def kernel_at_zero_flatness(K: KernelData, z) -> float:
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    if len(z) == 0:
        return 0.0
    return float(np.max(np.abs(K.kernel_at_zero(z) - K.K00)))


# ---------------------------------------------------------------------------
# metric and representative coordinates


@dataclass
class MetricData:
    T00: np.ndarray
    tau: np.ndarray
    T_section: list[list[Polynomial]]  # T(z, 0)[i][k]
    M_part: list[list[Polynomial]]
    flags: dict[str, bool]
    ordering: tuple[int, ...]

    def N_part(self) -> list[list[Polynomial]]:
        Tinv = np.linalg.inv(self.T00)
        n = len(self.T00)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Polynomial.zero(n)
                for k in range(n):
                    if Tinv[i, k] != 0:
                        acc = acc + self.M_part[k][j] * complex(Tinv[i, k])
                row.append(acc)
            out.append(row)
        return out

    def section_at(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        n = len(self.T00)
        return np.array([[self.T_section[i][k].evaluate(z) for k in range(n)] for i in range(n)])

    def to_json(self) -> dict:
        n = len(self.T00)
        return {
            "T00": _cmat(self.T00),
            "tau": [float(t) for t in self.tau],
            "T_section": [[_poly_json(self.T_section[i][k]) for k in range(n)] for i in range(n)],
            "flags": self.flags,
        }


def _poly_json(p: Polynomial) -> list:
    return [{"exp": list(a), "re": complex(c).real, "im": complex(c).imag} for a, c in p.items()]


def metric_data(K: KernelData, profile: ResonanceProfile | None = None, tol: float = 1e-9) -> MetricData:
    """``t_ik(z, 0) = d/dz_k`` of the i-th kernel section, with structural checks."""
    profile = profile or K.profile
    D = K.domain
    n = D.n
    sections = [K.section(i) for i in range(n)]
    T = [[sections[i].derivative(k) for k in range(n)] for i in range(n)]
    zero = (0,) * n
    T00 = np.array([[complex(T[i][k].coeff(zero)) for k in range(n)] for i in range(n)])
    Mz = [[T[i][k] - Polynomial.constant(n, T00[i, k]) for k in range(n)] for i in range(n)]
    pos = profile.position()
    scale = max(1.0, float(np.max(np.abs(T00))))
    ev = np.linalg.eigvalsh(0.5 * (T00 + T00.conj().T))
    flags = {
        "T00_hermitian": bool(np.max(np.abs(T00 - T00.conj().T)) <= tol * scale),
        "T00_positive_definite": bool(ev.min() > 0),
        "T00_diagonal": bool(
            not D.weights.has_distinct_rows()
            or np.max(np.abs(T00 - np.diag(np.diag(T00)))) <= tol * scale
        ),
    }
    lower = True
    supports = True
    for i in range(n):
        for k in range(n):
            big = [a for a, c in Mz[i][k].items() if abs(complex(c)) > tol * scale]
            if big and not pos[i] > pos[k]:
                lower = False
            for a in big:
                b = tuple(x + (1 if idx == k else 0) for idx, x in enumerate(a))
                if b not in profile.sets[i]:
                    supports = False
    flags["M_strictly_lower"] = lower
    flags["resonant_supports"] = supports
    return MetricData(T00, np.real(np.diag(T00)), T, Mz, flags, profile.ordering)


@dataclass
class RepCoords:
    map: PolynomialMap  # floating coefficients
    errors: dict[tuple[int, MultiIndex], float]
    support: list[dict]
    flags: dict[str, bool]
    weights: WeightMatrix
    profile: ResonanceProfile

    def coefficient(self, i: int, alpha) -> complex:
        return complex(self.map[i].coeff(tuple(alpha)))

    def to_json(self) -> dict:
        comps = []
        for i, p in enumerate(self.map.components):
            comps.append(
                [
                    {
                        "exp": list(a),
                        "re": complex(c).real,
                        "im": complex(c).imag,
                        "stderr": self.errors.get((i, a), 0.0),
                    }
                    for a, c in p.items()
                ]
            )
        return {"n": self.map.n, "components": comps, "support": self.support, "flags": self.flags}


def _sigma_from_sections(sections: Sequence[Polynomial], T00: np.ndarray) -> PolynomialMap:
    n = len(sections)
    Tinv = np.linalg.inv(T00)
    comps = []
    for i in range(n):
        acc = Polynomial.zero(n)
        for k in range(n):
            if Tinv[i, k] != 0:
                acc = acc + sections[k] * complex(Tinv[i, k])
        comps.append(acc)
    return PolynomialMap(tuple(comps))


def _support_report(sigma: PolynomialMap, profile: ResonanceProfile, tol: float) -> list[dict]:
    out = []
    for i, p in enumerate(sigma.components):
        E = profile.sets[i]
        off = [(a, abs(complex(c))) for a, c in p.items() if a not in E]
        out.append(
            {
                "component": i + 1,
                "resonant_terms": [list(a) for a, _ in p.items() if a in E],
                "non_resonant_max": max((v for _, v in off), default=0.0),
                "within_E": all(v <= tol for _, v in off),
            }
        )
    return out


def rep_coords(K: KernelData, T: MetricData | None = None, tol: float = 1e-9) -> RepCoords:
    """``sigma_0 = T00^-1 v`` with ``v_i`` the normalised kernel sections."""
    T = T or metric_data(K, tol=tol)
    n = K.domain.n
    if abs(np.linalg.det(T.T00)) < 1e-300:
        raise NumericalError("T(0,0) is singular")
    sections = [K.section(i) for i in range(n)]
    sigma = _sigma_from_sections(sections, T.T00)
    zero = (0,) * n
    lin = np.array([[complex(sigma[i].coeff(unit(n, k))) for k in range(n)] for i in range(n)])
    jac_ok = True
    Tinv = np.linalg.inv(T.T00)
    for i in range(n):
        for k in range(n):
            lhs = sigma[i].derivative(k)
            rhs = Polynomial.zero(n)
            for j in range(n):
                rhs = rhs + T.T_section[j][k] * complex(Tinv[i, j])
            diff = lhs - rhs
            if any(abs(complex(c)) > tol for _, c in diff.items()):
                jac_ok = False
    flags = {
        "fixes_origin": all(abs(complex(sigma[i].coeff(zero))) <= tol for i in range(n)),
        "identity_linear_part": bool(np.max(np.abs(lin - np.eye(n))) <= tol),
        "jacobian_identity": jac_ok,
    }
    errors: dict = {}
    if K.mc is not None:
        errors = _jackknife_errors(K, sigma)
    support = _support_report(sigma, K.profile, tol)
    flags["within_resonant_support"] = all(s["within_E"] for s in support)
    return RepCoords(sigma, errors, support, flags, K.domain.weights, K.profile)


def _jackknife_errors(K: KernelData, sigma: PolynomialMap) -> dict:
    """Leave-one-chunk-out standard errors of the sigma coefficients."""
    mc = K.mc
    chunks = len(mc.chunk_sizes)
    if chunks < 2:
        return {}
    pos = {a: k for k, a in enumerate(mc.exponents)}
    reps = []
    for b in range(chunks):
        mask = np.ones(chunks, bool)
        mask[b] = False
        full = mc.mean(mask)
        reps.append(_sigma_from_gram_lookup(K, full, pos))
    return _jackknife_combine(sigma, reps)


def _jackknife_combine(sigma: PolynomialMap, reps: list[PolynomialMap]) -> dict:
    B = len(reps)
    errors = {}
    keys = {(i, a) for i, p in enumerate(sigma.components) for a in p.support()}
    for r in reps:
        keys |= {(i, a) for i, p in enumerate(r.components) for a in p.support()}
    for i, a in keys:
        vals = np.array([complex(r[i].coeff(a)) for r in reps])
        var = (B - 1) / B * float(np.sum(np.abs(vals - vals.mean()) ** 2))
        errors[(i, a)] = float(np.sqrt(var))
    return errors


def _sigma_from_gram_lookup(K: KernelData, full: np.ndarray, pos: dict) -> PolynomialMap:
    n = K.domain.n
    zero = (0,) * n
    K00 = 1.0 / full[pos[zero], pos[zero]].real
    sections = []
    for i in range(n):
        cls = K.classes[K.domain.weights.rows[i]]
        idx = [pos[a] for a in cls.monomials]
        Ginv = np.linalg.inv(0.5 * (full[np.ix_(idx, idx)] + full[np.ix_(idx, idx)].conj().T))
        C = Ginv.T
        j = cls.index(unit(n, i))
        sections.append(Polynomial(n, {a: complex(C[k, j]) / K00 for k, a in enumerate(cls.monomials)}))
    T00 = np.array([[complex(sections[i].derivative(k).coeff(zero)) for k in range(n)] for i in range(n)])
    return _sigma_from_sections(sections, T00)


# ---------------------------------------------------------------------------
# dense path


class DenseKernel:
    """Truncated kernel from the full Gram matrix over a fixed monomial set."""

    def __init__(self, exponents: list[MultiIndex], gram: np.ndarray, n: int):
        self.exponents = exponents
        self.n = n
        self.gram = gram
        self.coeffs = _hermitian_inverse(gram, f"dense box ({len(exponents)} monomials)").T
        self.index = {a: k for k, a in enumerate(exponents)}

    def column_polynomial(self, beta) -> Polynomial:
        """``z -> sum_a c[a, beta] z^a``."""
        j = self.index[tuple(beta)]
        return Polynomial(self.n, {a: complex(self.coeffs[k, j]) for k, a in enumerate(self.exponents)})

    def _vectors(self, z):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        V = _monomial_matrix(z, self.exponents)
        dV = []
        for k in range(self.n):
            cols = np.zeros_like(V)
            for j, a in enumerate(self.exponents):
                if a[k]:
                    b = list(a)
                    b[k] -= 1
                    cols[:, j] = a[k] * _monomial_matrix(z, [tuple(b)])[:, 0]
            dV.append(cols)
        return V, dV

    def value(self, z, w) -> np.ndarray:
        Vz, _ = self._vectors(z)
        Vw, _ = self._vectors(w)
        return np.einsum("pa,ab,pb->p", Vz, self.coeffs, Vw.conj())

    def log_holomorphic(self, z, u) -> np.ndarray:
        """``log K`` with ``conj(w)`` replaced by an independent variable ``u``."""
        Vz, _ = self._vectors(z)
        Vu, _ = self._vectors(u)
        return np.log(np.einsum("pa,ab,pb->p", Vz, self.coeffs, Vu))

    def metric(self, z, w) -> np.ndarray:
        """``T(z, w)[p, i, k] = d^2/(d conj(w_i) d z_k) log K(z, w)``."""
        Vz, dVz = self._vectors(z)
        Vw, dVw = self._vectors(w)
        C = self.coeffs
        Wb = Vw.conj()
        K = np.einsum("pa,ab,pb->p", Vz, C, Wb)
        Kz = np.stack([np.einsum("pa,ab,pb->p", dVz[k], C, Wb) for k in range(self.n)], axis=1)
        Kw = np.stack([np.einsum("pa,ab,pb->p", Vz, C, dVw[i].conj()) for i in range(self.n)], axis=1)
        Kzw = np.empty((len(K), self.n, self.n), dtype=complex)
        for i in range(self.n):
            for k in range(self.n):
                Kzw[:, i, k] = np.einsum("pa,ab,pb->p", dVz[k], C, dVw[i].conj())
        return Kzw / K[:, None, None] - Kw[:, :, None] * Kz[:, None, :] / (K**2)[:, None, None]


def _series_inverse(q: Polynomial, max_degree: int) -> Polynomial:
    n = q.n
    zero = (0,) * n
    q0 = complex(q.coeff(zero))
    R = (q - Polynomial.constant(n, q0)) * (-1.0 / q0)
    out = Polynomial.constant(n, 1.0 + 0j)
    term = Polynomial.constant(n, 1.0 + 0j)
    for _ in range(max_degree):
        term = (term * R).truncate(max_degree)
        if term.is_zero():
            break
        out = out + term
    return out * (1.0 / q0)


def dense_exponents(D: Domain, cap: int, truncation: str = "degree") -> list[MultiIndex]:
    """Monomial box for the dense path.

    ``"degree"`` keeps ``|a| <= cap``; ``"weighted"`` keeps whole weight classes
    with certificate scalar ``a . (M c) <= cap``, a subspace preserved by
    pullback under resonant maps.
    """
    if truncation == "degree":
        return monomials_up_to(D.n, cap)
    if truncation == "weighted":
        prof = resonance_profile(D.weights)
        s = prof.certificate.scalars(D.weights)
        return [a for a in monomials_up_to(D.n, cap) if sum(x * y for x, y in zip(a, s)) <= cap]
    raise PreconditionError(f"unknown truncation {truncation!r}")


def dense_kernel(
    D: Domain,
    cap: int,
    truncation: str = "degree",
    method: str = "auto",
    samples: int = 1_000_000,
    seed: int = 0,
) -> tuple[DenseKernel, MonteCarloMoments | None]:
    method = _resolve(D, method)
    exps = dense_exponents(D, cap, truncation)
    mc = None
    if method == "monte_carlo":
        mc = monte_carlo_moments(D, exps, samples, seed)
        G = mc.mean()
    else:
        G = gram_matrix(D, exps)
    return DenseKernel(exps, G, D.n), mc


@dataclass
class DenseSigma:
    sigma: PolynomialMap
    T00: np.ndarray
    T_section: list[list[Polynomial]]
    K_section: Polynomial  # K(z, 0)


def _dense_sigma_from(kern: DenseKernel, cap: int) -> DenseSigma:
    n = kern.n
    zero = (0,) * n
    Q = kern.column_polynomial(zero)
    Qinv = _series_inverse(Q, cap)
    u = [(kern.column_polynomial(unit(n, i)) * Qinv).truncate(cap) for i in range(n)]
    v = [ui - Polynomial.constant(n, complex(ui.coeff(zero))) for ui in u]
    T = [[u[i].derivative(k) for k in range(n)] for i in range(n)]
    T00 = np.array([[complex(T[i][k].coeff(zero)) for k in range(n)] for i in range(n)])
    return DenseSigma(_sigma_from_sections(v, T00), T00, T, Q)


@dataclass
class DenseReport:
    cap: int
    discrepancy: float
    non_resonant_max: float
    non_resonant_rss: float
    non_resonant_err_rss: float
    flatness: float
    T00_discrepancy: float
    sigma_dense: PolynomialMap
    errors: dict
    method: str

    def passed(self, tol: float = 1e-8, k_sigma: float = 3.0) -> bool:
        if self.method == "monte_carlo":
            return self.non_resonant_rss <= k_sigma * self.non_resonant_err_rss
        return self.discrepancy <= tol and self.non_resonant_max <= tol and self.flatness <= tol

    def to_json(self) -> dict:
        return {
            "cap": self.cap,
            "method": self.method,
            "discrepancy": self.discrepancy,
            "non_resonant_max": self.non_resonant_max,
            "non_resonant_rss": self.non_resonant_rss,
            "non_resonant_err_rss": self.non_resonant_err_rss,
            "flatness": self.flatness,
            "T00_discrepancy": self.T00_discrepancy,
        }


def dense_cross_check(
    D: Domain,
    cap: int | None = None,
    method: str = "auto",
    samples: int = 1_000_000,
    seed: int = 0,
    flat_samples: int = 100,
) -> DenseReport:
    """Recompute ``sigma_0`` from the full truncated Gram matrix and compare."""
    profile = resonance_profile(D.weights)
    mu = profile.mu
    cap = mu + 2 if cap is None else cap
    if cap < mu:
        raise PreconditionError(f"dense cap {cap} is below the resonance order {mu}")
    method = _resolve(D, method)
    kern, mc = dense_kernel(D, cap, "degree", method, samples, seed)
    ds = _dense_sigma_from(kern, cap)
    K = build_kernel(D, method, mc=mc)
    reference = rep_coords(K)
    n = D.n
    off = []
    for i, p in enumerate(ds.sigma.components):
        for a, c in p.items():
            if a not in profile.sets[i]:
                off.append((i, a, abs(complex(c))))
    errors = {}
    if mc is not None and len(mc.chunk_sizes) >= 2:
        reps = []
        for b in range(len(mc.chunk_sizes)):
            mask = np.ones(len(mc.chunk_sizes), bool)
            mask[b] = False
            reps.append(_dense_sigma_from(DenseKernel(kern.exponents, mc.mean(mask), n), cap).sigma)
        errors = _jackknife_combine(ds.sigma, reps)
    err_rss = float(np.sqrt(sum(errors.get((i, a), 0.0) ** 2 for i, a, _ in off)))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    z = sample_interior(D, flat_samples, rng)
    K00 = complex(ds.K_section.coeff((0,) * n))
    flat = float(np.max(np.abs(ds.K_section.evaluate(z) - K00))) if flat_samples else 0.0
    disc = ds.sigma.max_coefficient_distance(reference.map)
    T00_disc = float(np.max(np.abs(ds.T00 - metric_data(K).T00)))
    return DenseReport(
        cap,
        disc,
        max((v for *_, v in off), default=0.0),
        float(np.sqrt(sum(v * v for *_, v in off))),
        err_rss,
        flat,
        T00_disc,
        ds.sigma,
        errors,
        method,
    )


def finite_difference_check(K: KernelData, z, h: float, dense: DenseKernel | None = None) -> float:
    """Max error of symbolic ``t_ik(z, 0)`` against a 4-point mixed central difference
    of ``log K(z, u)`` in ``(z_k, u_i)`` at ``u = 0``, ``u`` standing for ``conj(w)``."""
    D = K.domain
    n = D.n
    if dense is None:
        dense, _ = dense_kernel(D, K.profile.mu + 2)
    T = metric_data(K)
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    worst = 0.0
    for i in range(n):
        for k in range(n):
            ek = np.zeros(n)
            ek[k] = h
            ei = np.zeros(n)
            ei[i] = h
            u0 = np.zeros_like(z)
            F = lambda a, b: dense.log_holomorphic(z + a * ek, u0 + b * ei)  # noqa: E731
            fd = (F(1, 1) - F(1, -1) - F(-1, 1) + F(-1, -1)) / (4 * h * h)
            sym = T.T_section[i][k].evaluate(z)
            worst = max(worst, float(np.max(np.abs(fd - sym))))
    return worst
