"""Bounded quasi-Reinhardt domains and their monomial moments.

The moment of a pair of exponents is ``<z^alpha, z^beta> = int_D z^alpha
conj(z^beta) dV`` with Lebesgue measure on C^n = R^{2n}.

For the egg ``{sum |z_i|^(2/p_i) < 1}`` polar coordinates in each factor and
``t_i = r_i^(2/p_i)`` turn the diagonal moment into a Dirichlet integral::

    <z^a, z^a> = pi^n * prod(p_i) * prod Gamma(p_i (a_i + 1)) / Gamma(1 + sum p_i (a_i + 1))

and off-diagonal moments vanish by rotating each coordinate separately. The
ball is the egg with all ``p_i = 1``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .action import WeightMatrix, require_valid, weight_of_monomial
from .errors import InputError
from .polymap import Polynomial, PolynomialMap, ResonantMap, is_resonant
from .resonance import MultiIndex

EXACT_METHODS = ("closed_form", "pushforward")
METHODS = ("auto", "closed_form", "pushforward", "monte_carlo", "quadrature")
DEFAULT_CHUNK = 1 << 18


def monomials_up_to(n: int, max_degree: int) -> list[MultiIndex]:
    """All exponents of total degree <= ``max_degree`` in graded-lex order."""
    out: list[MultiIndex] = []

    def rec(prefix, left, k):
        if k == n - 1:
            out.append(prefix + (left,))
            return
        for a in range(left, -1, -1):
            rec(prefix + (a,), left - a, k + 1)

    for d in range(max_degree + 1):
        if n == 0:
            break
        rec((), d, 0)
    return out


@dataclass(frozen=True)
class MomentValue:
    value: complex
    method: str
    stderr: float = 0.0
    samples: int | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        d = {
            "re": self.value.real,
            "im": self.value.imag,
            "method": self.method,
            "stderr": self.stderr,
        }
        if self.samples is not None:
            d["samples"] = self.samples
            d["seed"] = self.seed
        return d


class Domain:
    """Common interface: dimension, torus weights, membership, bounding polyradius."""

    n: int
    weights: WeightMatrix

    kind = "domain"

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    @property
    def radii(self) -> np.ndarray:
        raise NotImplementedError

    def exact_moment(self, alpha: MultiIndex, beta: MultiIndex) -> complex:
        raise NotImplementedError

    def exact_method(self) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Egg(Domain):
    n: int
    p: tuple[int, ...]
    weights: WeightMatrix = None  # type: ignore[assignment]

    kind = "egg"

    def __post_init__(self):
        if self.n < 1:
            raise InputError("dimension must be at least 1")
        p = tuple(int(x) for x in self.p)
        if len(p) != self.n or any(x < 1 for x in p):
            raise InputError("egg exponents must be n positive integers")
        object.__setattr__(self, "p", p)
        if self.weights is None:
            object.__setattr__(self, "weights", self.default_weights())
        _check_weights(self)

    def default_weights(self) -> WeightMatrix:
        # full n-torus acting coordinatewise
        return WeightMatrix.of([[1 if i == j else 0 for j in range(self.n)] for i in range(self.n)])

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        a2 = np.abs(z) ** 2
        s = np.zeros(z.shape[:-1])
        for i, pi in enumerate(self.p):
            s = s + a2[..., i] ** (1.0 / pi)
        return s < 1.0

    @property
    def radii(self) -> np.ndarray:
        return np.ones(self.n)

    def exact_moment(self, alpha, beta) -> complex:
        alpha, beta = tuple(alpha), tuple(beta)
        if alpha != beta:
            return 0.0 + 0.0j
        s = [pi * (a + 1) for pi, a in zip(self.p, alpha)]
        log_v = (
            self.n * math.log(math.pi)
            + sum(math.log(pi) for pi in self.p)
            + sum(math.lgamma(x) for x in s)
            - math.lgamma(1 + sum(s))
        )
        return complex(math.exp(log_v), 0.0)

    def exact_method(self) -> str:
        return "closed_form"

    def to_json(self) -> dict:
        return {"type": "egg", "n": self.n, "p": list(self.p), "weights": self.weights.to_json()}


class Ball(Egg):
    kind = "ball"

    def __init__(self, n: int, weights: WeightMatrix | None = None):
        super().__init__(n, (1,) * n, weights)

    def default_weights(self) -> WeightMatrix:
        # the circular action (1, ..., 1)
        return WeightMatrix.of([[1] for _ in range(self.n)])

    def to_json(self) -> dict:
        return {"type": "ball", "n": self.n, "weights": self.weights.to_json()}

    def __repr__(self):
        return f"Ball(n={self.n}, weights={self.weights.rows})"


class Pushforward(Domain):
    """Image ``phi(base)`` of a base domain under a resonant polynomial map.

    ``det Jac phi = 1`` for resonant maps, so moments reduce exactly to base
    moments: ``<z^a, z^b>_{phi(B)} = <phi^a, phi^b>_B``.
    """

    kind = "pushforward"

    def __init__(self, base: Domain, phi: ResonantMap):
        if base.n != phi.n:
            raise InputError("map and base domain have different dimensions")
        self.base = base
        self.phi = phi
        self.n = phi.n
        self.weights = phi.weights
        if isinstance(base, Pushforward) and base.weights != self.weights:
            raise InputError("nested pushforward must share the torus weights")
        self._powers: dict[MultiIndex, Polynomial] = {}
        _check_weights(self)

    @cached_property
    def inverse(self) -> PolynomialMap:
        return self.phi.invert().map

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.base.contains(self.inverse.evaluate(z))

    @cached_property
    def radii(self) -> np.ndarray:
        R = self.base.radii
        out = []
        for p in self.phi.map.components:
            out.append(sum(abs(complex(c)) * float(np.prod(R ** np.array(a))) for a, c in p.items()))
        return np.array(out)

    def power(self, alpha: MultiIndex) -> Polynomial:
        """``phi^alpha`` as a polynomial in the base variables (cached)."""
        alpha = tuple(alpha)
        if alpha not in self._powers:
            q = Polynomial.constant(self.n, 1)
            for k, e in enumerate(alpha):
                if e:
                    q = q * self.phi.map[k] ** e
            self._powers[alpha] = q
        return self._powers[alpha]

    def exact_moment(self, alpha, beta) -> complex:
        pa, pb = self.power(alpha), self.power(beta)
        total = 0j
        if isinstance(self.base, Egg):
            tb = pb.terms
            for g, ca in pa.items():
                cb = tb.get(g)
                if cb is not None:
                    total += complex(ca) * complex(cb).conjugate() * self.base.exact_moment(g, g)
        else:
            for g, ca in pa.items():
                for d, cb in pb.items():
                    m = self.base.exact_moment(g, d)
                    if m != 0:
                        total += complex(ca) * complex(cb).conjugate() * m
        return total

    def exact_method(self) -> str:
        return "pushforward"

    def to_json(self) -> dict:
        return {
            "type": "pushforward",
            "base": self.base.to_json(),
            "map": self.phi.map.to_json(),
            "weights": self.weights.to_json(),
        }

    def __repr__(self):
        return f"Pushforward({self.base!r}, {list(self.phi.map.components)!r})"


def _check_weights(D: Domain):
    if D.weights.n != D.n:
        raise InputError(f"weights are for C^{D.weights.n}, domain is in C^{D.n}")
    require_valid(D.weights)


def domain_from_json(data: dict) -> Domain:
    if not isinstance(data, dict) or "type" not in data:
        raise InputError("domain JSON needs a 'type' field")
    kind = data["type"]
    w = data.get("weights")
    weights = WeightMatrix.from_json(w) if w is not None else None
    if kind == "ball":
        return Ball(int(data["n"]), weights)
    if kind == "egg":
        return Egg(int(data["n"]), tuple(data["p"]), weights)
    if kind == "pushforward":
        base = domain_from_json(data["base"])
        f = PolynomialMap.from_json(data["map"])
        if weights is None:
            mw = data["map"].get("weights") if isinstance(data["map"], dict) else None
            if mw is None:
                raise InputError("pushforward domain needs 'weights' for its map")
            weights = WeightMatrix.from_json(mw)
        verdict = is_resonant(f, weights)
        if not verdict:
            i, a = verdict.violations[0]
            raise InputError(f"pushforward map is not resonant: component {i + 1}, z^{list(a)}")
        return Pushforward(base, ResonantMap(f, weights))
    raise InputError(f"unknown domain type {kind!r}")


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloMoments:
    """Per-chunk sums for a block of moments ``<z^a, z^b>`` over a fixed exponent list."""

    exponents: list[MultiIndex]
    box_volume: float
    chunk_sizes: np.ndarray
    sums: np.ndarray  # (chunks, m, m) complex: sum of indicator * z^a conj(z^b)
    sq_sums: np.ndarray  # (chunks, m, m) real: sum of indicator * |z^a|^2 |z^b|^2
    accepted: np.ndarray  # (chunks,)
    seed: int

    @property
    def samples(self) -> int:
        return int(self.chunk_sizes.sum())

    def mean(self, mask: np.ndarray | None = None) -> np.ndarray:
        mask = np.ones(len(self.chunk_sizes), bool) if mask is None else mask
        N = self.chunk_sizes[mask].sum()
        return self.box_volume * self.sums[mask].sum(axis=0) / N

    def stderr(self) -> np.ndarray:
        N = self.samples
        m1 = self.sums.sum(axis=0) / N
        m2 = self.sq_sums.sum(axis=0) / N
        var = np.maximum(m2 - np.abs(m1) ** 2, 0.0)
        return self.box_volume * np.sqrt(var / N)


def _chunk_plan(samples: int, chunk: int) -> list[int]:
    full, rest = divmod(samples, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _sample_polydisc(rng: np.random.Generator, radii: np.ndarray, count: int) -> np.ndarray:
    n = len(radii)
    r = radii[None, :] * np.sqrt(rng.random((count, n)))
    theta = 2.0 * np.pi * rng.random((count, n))
    return r * np.exp(1j * theta)


def _monomial_matrix(z: np.ndarray, exps: Sequence[MultiIndex]) -> np.ndarray:
    n = z.shape[1]
    top = max(max(a) for a in exps)
    pw = [np.ones((z.shape[0], top + 1), dtype=complex) for _ in range(n)]
    for k in range(n):
        for e in range(1, top + 1):
            pw[k][:, e] = pw[k][:, e - 1] * z[:, k]
    out = np.ones((z.shape[0], len(exps)), dtype=complex)
    for j, a in enumerate(exps):
        for k, e in enumerate(a):
            if e:
                out[:, j] *= pw[k][:, e]
    return out


def monte_carlo_moments(
    D: Domain,
    exponents: Sequence[MultiIndex],
    samples: int,
    seed: int = 0,
    chunk: int = DEFAULT_CHUNK,
    threads: int = 1,
) -> MonteCarloMoments:
    """Uniform sampling in the bounding polydisc, accepted by membership.

    Chunk ``k`` draws from ``SeedSequence([seed, k])`` and chunk results are
    kept separately, so the output does not depend on ``threads``.
    """
    if samples <= 0:
        raise InputError("Monte Carlo needs a positive sample budget")
    exponents = [tuple(a) for a in exponents]
    radii = np.asarray(D.radii, dtype=float)
    box = float(np.prod(np.pi * radii**2))
    plan = _chunk_plan(samples, chunk)

    def run(k: int):
        rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
        z = _sample_polydisc(rng, radii, plan[k])
        inside = D.contains(z)
        zi = z[inside]
        V = _monomial_matrix(zi, exponents) if len(zi) else np.zeros((0, len(exponents)), complex)
        S = V.T @ V.conj()
        A = np.abs(V) ** 2
        S2 = A.T @ A
        return S, S2, int(inside.sum())

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, range(len(plan))))
    else:
        results = [run(k) for k in range(len(plan))]
    sums = np.stack([r[0] for r in results])
    sq = np.stack([r[1] for r in results])
    acc = np.array([r[2] for r in results])
    if acc.sum() == 0:
        raise InputError("Monte Carlo accepted no samples; bounding box does not meet the domain")
    return MonteCarloMoments(exponents, box, np.array(plan), sums, sq, acc, seed)


# ---------------------------------------------------------------------------
# quadrature (small n only)


def _gl(q: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _disc_rule(q: int):
    """Nodes/weights for the unit disc via ``x = sin s``, ``y = cos(s) sin t``."""
    s, ws = _gl(q, -np.pi / 2, np.pi / 2)
    t, wt = _gl(q, -np.pi / 2, np.pi / 2)
    S, T = np.meshgrid(s, t, indexing="ij")
    x = np.sin(S)
    y = np.cos(S) * np.sin(T)
    jac = np.cos(S) * np.cos(S) * np.cos(T)
    w = np.outer(ws, wt) * jac
    return (x + 1j * y).ravel(), w.ravel()


def quadrature_moment(D: Egg, alpha, beta, nodes: int = 40) -> complex:
    """Tensor Gauss rule over the nested real coordinates (n <= 2 eggs and balls).

    Spectrally accurate only for ``p1 == 1``; otherwise ``|z1|^(2/p1)`` has a
    cone point at the origin and convergence is algebraic.
    """
    if not isinstance(D, Egg) or D.n > 2:
        raise InputError("quadrature is available for balls and eggs with n <= 2")
    u, wu = _disc_rule(nodes)
    alpha, beta = tuple(alpha), tuple(beta)
    if D.n == 1:
        f = u ** alpha[0] * np.conj(u) ** beta[0]
        return complex(np.sum(f * wu))
    p1, p2 = D.p
    z1 = u
    R2 = np.clip(1.0 - np.abs(z1) ** (2.0 / p1), 0.0, None) ** (p2 / 2.0)
    f1 = z1 ** alpha[0] * np.conj(z1) ** beta[0]
    # inner disc of radius R2 scaled from the unit rule
    z2 = R2[:, None] * u[None, :]
    w2 = (R2**2)[:, None] * wu[None, :]
    f2 = z2 ** alpha[1] * np.conj(z2) ** beta[1]
    return complex(np.sum(wu * f1 * np.sum(w2 * f2, axis=1)))


# ---------------------------------------------------------------------------
# public operations


def _resolve(D: Domain, method: str) -> str:
    if method not in METHODS:
        raise InputError(f"unknown moment method {method!r}")
    if method == "auto":
        return D.exact_method()
    if method in EXACT_METHODS and method != D.exact_method():
        raise InputError(f"method {method!r} is not available for a {D.kind} domain")
    if method == "quadrature" and not (isinstance(D, Egg) and D.n <= 2):
        raise InputError("quadrature is available for balls and eggs with n <= 2")
    return method


def monomial_moment(
    D: Domain,
    alpha: Sequence[int],
    beta: Sequence[int],
    method: str = "auto",
    samples: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> MomentValue:
    alpha, beta = tuple(alpha), tuple(beta)
    if len(alpha) != D.n or len(beta) != D.n or min(alpha + beta) < 0:
        raise InputError(f"exponents must be non-negative of length {D.n}")
    method = _resolve(D, method)
    if method in EXACT_METHODS:
        return MomentValue(D.exact_moment(alpha, beta), method)
    if method == "quadrature":
        return MomentValue(quadrature_moment(D, alpha, beta), method)
    exps = [alpha] if alpha == beta else [alpha, beta]
    mc = monte_carlo_moments(D, exps, samples, seed, threads=threads)
    j = 0 if alpha == beta else 1
    return MomentValue(
        complex(mc.mean()[0, j]), method, float(mc.stderr()[0, j]), mc.samples, seed
    )


def volume(D: Domain, method: str = "auto", samples: int = 100_000, seed: int = 0) -> MomentValue:
    zero = (0,) * D.n
    return monomial_moment(D, zero, zero, method, samples, seed)


def gram_matrix(D: Domain, exponents: Sequence[MultiIndex]) -> np.ndarray:
    """Exact-path Gram matrix ``G[a, b] = <z^a, z^b>``."""
    m = len(exponents)
    G = np.zeros((m, m), dtype=complex)
    for i, a in enumerate(exponents):
        for j, b in enumerate(exponents):
            if j < i:
                G[i, j] = np.conj(G[j, i])
            else:
                G[i, j] = D.exact_moment(a, b)
    return G


@dataclass
class OrthogonalityVerdict:
    passed: bool
    pairs_checked: int
    max_abs: float
    worst: tuple | None = None
    method: str = "closed_form"

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "pairs_checked": self.pairs_checked,
            "max_abs": self.max_abs,
            "worst": None if self.worst is None else [list(self.worst[0]), list(self.worst[1])],
            "method": self.method,
        }


def weight_orthogonality_check(
    D: Domain,
    degree_cap: int,
    method: str = "auto",
    samples: int = 1_000_000,
    seed: int = 0,
    k_sigma: float = 3.0,
) -> OrthogonalityVerdict:
    """Moments across distinct torus weights vanish (exactly, or within ``k_sigma`` stderr)."""
    method = _resolve(D, method)
    exps = monomials_up_to(D.n, degree_cap)
    wts = [weight_of_monomial(D.weights, a) for a in exps]
    if method == "monte_carlo":
        mc = monte_carlo_moments(D, exps, samples, seed)
        vals, errs = mc.mean(), mc.stderr()
    else:
        vals = np.array(
            [[monomial_moment(D, a, b, method).value for b in exps] for a in exps]
        )
        errs = np.zeros(vals.shape)
    passed, count, worst, worst_pair = True, 0, 0.0, None
    for i in range(len(exps)):
        for j in range(len(exps)):
            if wts[i] == wts[j]:
                continue
            count += 1
            v = abs(vals[i, j])
            tol = k_sigma * errs[i, j] if method == "monte_carlo" else (1e-12 if method == "quadrature" else 0.0)
            if v > tol:
                passed = False
            if v > worst:
                worst, worst_pair = v, (exps[i], exps[j])
    return OrthogonalityVerdict(passed, count, worst, worst_pair, method)


def sample_interior(D: Domain, count: int, rng: np.random.Generator, shrink: float = 0.9) -> np.ndarray:
    """Uniform points of ``shrink * D`` by rejection from the bounding polydisc."""
    radii = np.asarray(D.radii, dtype=float) * shrink
    out = []
    have = 0
    while have < count:
        z = _sample_polydisc(rng, radii, max(1024, 2 * (count - have)))
        z = z[D.contains(z / shrink)]
        out.append(z)
        have += len(z)
    return np.concatenate(out)[:count]
