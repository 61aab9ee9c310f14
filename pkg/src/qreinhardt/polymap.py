"""Sparse polynomial self-maps of C^n and resonant (triangular) maps.

Coefficients are Gaussian rationals for exact work; ``complex`` coefficients
are accepted as well and propagate through the same code paths, which is how
kernel-derived (floating) maps are inverted and composed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .action import WeightMatrix, weight_of_monomial
from .errors import InputError, PreconditionError
from .resonance import MultiIndex, ResonanceProfile, resonance_profile, unit
from .scalar import ONE, ZERO, GaussianRational, is_exact


def _coerce(c):
    if isinstance(c, GaussianRational):
        return c
    if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
        return GaussianRational(c)
    if isinstance(c, (float, complex, np.floating, np.complexfloating)):
        return complex(c)
    raise InputError(f"unsupported coefficient type {type(c).__name__}")


def grlex_key(alpha: MultiIndex):
    return (sum(alpha), tuple(-a for a in alpha))


class Polynomial:
    """Sparse polynomial in ``n`` variables: exponent tuple -> coefficient."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[MultiIndex, object] | Iterable = ()):
        self.n = n
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[MultiIndex, object] = {}
        for alpha, c in items:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n or any(a < 0 for a in alpha):
                raise InputError(f"bad exponent {alpha} for {n} variables")
            c = _coerce(c)
            acc[alpha] = acc[alpha] + c if alpha in acc else c
        self._terms = {a: c for a, c in acc.items() if c != 0}

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, k: int) -> "Polynomial":
        return cls(n, {unit(n, k): ONE})

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p.n = n
        p._terms = {a: c for a, c in terms.items() if c != 0}
        return p

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict[MultiIndex, object]:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]))

    def support(self) -> frozenset[MultiIndex]:
        return frozenset(self._terms)

    def coeff(self, alpha) -> object:
        return self._terms.get(tuple(alpha), ZERO)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def is_exact(self) -> bool:
        return all(isinstance(c, GaussianRational) for c in self._terms.values())

    def variables(self) -> frozenset[int]:
        return frozenset(k for a in self._terms for k, e in enumerate(a) if e)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n, other)
        self._check(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            out[a] = out[a] + c if a in out else c
        return Polynomial._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.n, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            s = _coerce(other)
            return Polynomial._raw(self.n, {a: c * s for a, c in self._terms.items()})
        self._check(other)
        out: dict[MultiIndex, object] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                v = ca * cb
                out[key] = out[key] + v if key in out else v
        return Polynomial._raw(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise InputError("negative polynomial power")
        result = Polynomial.constant(self.n, ONE)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def _check(self, other: "Polynomial"):
        if other.n != self.n:
            raise InputError(f"polynomials in {self.n} and {other.n} variables")

    # -- calculus / truncation -----------------------------------------
    def derivative(self, k: int) -> "Polynomial":
        out = {}
        for a, c in self._terms.items():
            if a[k]:
                b = list(a)
                b[k] -= 1
                out[tuple(b)] = c * a[k]
        return Polynomial._raw(self.n, out)

    def truncate(self, max_degree: int) -> "Polynomial":
        return Polynomial._raw(
            self.n, {a: c for a, c in self._terms.items() if sum(a) <= max_degree}
        )

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial._raw(self.n, {a: c for a, c in self._terms.items() if sum(a) == d})

    def map_coefficients(self, fn) -> "Polynomial":
        return Polynomial(self.n, {a: fn(c) for a, c in self._terms.items()})

    def to_complex(self) -> "Polynomial":
        return Polynomial._raw(self.n, {a: complex(c) for a, c in self._terms.items()})

    def conjugate_coefficients(self) -> "Polynomial":
        return Polynomial._raw(self.n, {a: c.conjugate() for a, c in self._terms.items()})

    # -- evaluation -----------------------------------------------------
    def evaluate_exact(self, z: Sequence) -> GaussianRational:
        z = [GaussianRational.coerce(x) for x in z]
        total = ZERO
        for a, c in self._terms.items():
            term = GaussianRational.coerce(c)
            for x, e in zip(z, a):
                if e:
                    term = term * x**e
            total = total + term
        return total

    def evaluate(self, z) -> np.ndarray | complex:
        """Floating evaluation; ``z`` has last axis of length n."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n:
            raise InputError(f"point has {z.shape[-1]} coordinates, expected {self.n}")
        out = np.zeros(z.shape[:-1], dtype=complex)
        for a, c in self._terms.items():
            term = np.full(z.shape[:-1], complex(c))
            for k, e in enumerate(a):
                if e:
                    term = term * z[..., k] ** e
            out = out + term
        return out[()] if out.ndim == 0 else out

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for a, c in self.items():
            mono = "*".join(
                f"z{k + 1}" + (f"^{e}" if e > 1 else "") for k, e in enumerate(a) if e
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def substitute(p: Polynomial, subs: Sequence[Polynomial | None], cache: dict | None = None) -> Polynomial:
    """Replace variable ``k`` of ``p`` by ``subs[k]`` (all in a common ring)."""
    if len(subs) != p.n:
        raise InputError("need one substitution per variable")
    m = next(s.n for s in subs if s is not None) if any(s is not None for s in subs) else p.n
    cache = {} if cache is None else cache

    def power(k: int, e: int) -> Polynomial:
        key = (k, e)
        if key not in cache:
            if e == 1:
                cache[key] = subs[k]
            else:
                half = e // 2
                q = power(k, half) * power(k, half)
                cache[key] = q * subs[k] if e % 2 else q
        return cache[key]

    out = Polynomial.zero(m)
    for a, c in p._terms.items():
        term = Polynomial.constant(m, c)
        for k, e in enumerate(a):
            if e:
                if subs[k] is None:
                    raise PreconditionError(f"variable z{k + 1} has no substitution yet")
                term = term * power(k, e)
        out = out + term
    return out


@dataclass(frozen=True, eq=False)
class PolynomialMap:
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InputError("a polynomial map needs at least one component")
        n = comps[0].n
        if any(p.n != n for p in comps) or len(comps) != n:
            raise InputError("a self-map of C^n needs n components in n variables")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, n: int) -> "PolynomialMap":
        return cls(tuple(Polynomial.variable(n, k) for k in range(n)))

    @classmethod
    def linear(cls, matrix: Sequence[Sequence]) -> "PolynomialMap":
        n = len(matrix)
        return cls(
            tuple(
                Polynomial(n, {unit(n, k): matrix[i][k] for k in range(n)}) for i in range(n)
            )
        )

    @classmethod
    def from_dicts(cls, n: int, comps: Sequence[Mapping]) -> "PolynomialMap":
        return cls(tuple(Polynomial(n, c) for c in comps))

    def __getitem__(self, i: int) -> Polynomial:
        return self.components[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolynomialMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def degree(self) -> int:
        return max(p.degree() for p in self.components)

    def is_exact(self) -> bool:
        return all(p.is_exact() for p in self.components)

    def to_complex(self) -> "PolynomialMap":
        return PolynomialMap(tuple(p.to_complex() for p in self.components))

    def compose(self, inner: "PolynomialMap") -> "PolynomialMap":
        """``self o inner``."""
        if inner.n != self.n:
            raise InputError("dimension mismatch in composition")
        cache: dict = {}
        return PolynomialMap(
            tuple(substitute(p, inner.components, cache) for p in self.components)
        )

    def __matmul__(self, other: "PolynomialMap") -> "PolynomialMap":
        return self.compose(other)

    def jacobian(self) -> list[list[Polynomial]]:
        return [[p.derivative(k) for k in range(self.n)] for p in self.components]

    def linear_matrix(self) -> list[list[object]]:
        n = self.n
        return [[p.coeff(unit(n, k)) for k in range(n)] for p in self.components]

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.stack([p.evaluate(z) for p in self.components], axis=-1)

    def evaluate_exact(self, z) -> tuple[GaussianRational, ...]:
        if len(z) != self.n:
            raise InputError(f"point has {len(z)} coordinates, expected {self.n}")
        return tuple(p.evaluate_exact(z) for p in self.components)

    def max_coefficient_distance(self, other: "PolynomialMap") -> float:
        worst = 0.0
        for p, q in zip(self.components, other.components):
            for a in p.support() | q.support():
                worst = max(worst, abs(complex(p.coeff(a)) - complex(q.coeff(a))))
        return worst

    # -- JSON -----------------------------------------------------------
    def to_json(self) -> dict:
        comps = []
        for p in self.components:
            terms = []
            for a, c in p.items():
                if isinstance(c, GaussianRational):
                    terms.append({"exp": list(a), "re": str(c.re), "im": str(c.im)})
                else:
                    c = complex(c)
                    terms.append({"exp": list(a), "re": c.real, "im": c.imag})
            comps.append(terms)
        return {"n": self.n, "components": comps}

    @classmethod
    def from_json(cls, data: Mapping) -> "PolynomialMap":
        try:
            n = int(data["n"])
            raw = data["components"]
        except (KeyError, TypeError, ValueError):
            raise InputError("map JSON needs 'n' and 'components'") from None
        if len(raw) != n:
            raise InputError(f"map JSON declares n={n} but has {len(raw)} components")
        comps = []
        for terms in raw:
            d = {}
            for t in terms:
                try:
                    a = tuple(t["exp"])
                    c = GaussianRational(_parse_rational(t.get("re", 0)), _parse_rational(t.get("im", 0)))
                except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                    raise InputError(f"bad map term {t!r}: {exc}") from None
                if a in d:
                    raise InputError(f"duplicate exponent {list(a)} in a component")
                d[a] = c
            comps.append(Polynomial(n, d))
        return cls(tuple(comps))


def _parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError("boolean coefficient")
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


# ---------------------------------------------------------------------------
# operations on general maps


def evaluate(f: PolynomialMap, z, mode: str = "floating"):
    if mode == "exact":
        return f.evaluate_exact(z)
    if mode == "floating":
        return f.evaluate(z)
    raise InputError(f"unknown evaluation mode {mode!r}")


def compose(f: PolynomialMap, g: PolynomialMap) -> PolynomialMap:
    return f.compose(g)


def degree(f: PolynomialMap) -> int:
    return f.degree()


def linear_part(f: PolynomialMap) -> PolynomialMap:
    n = f.n
    zero = (0,) * n
    if any(p.coeff(zero) != 0 for p in f.components):
        raise PreconditionError("map has a constant term and does not fix the origin")
    return PolynomialMap(tuple(p.homogeneous_part(1) for p in f.components))


def _det(matrix) -> object:
    """Fraction-free Gaussian elimination; exact when entries are exact."""
    a = [list(row) for row in matrix]
    n = len(a)
    det = ONE if all(is_exact(x) for row in a for x in row) else 1.0 + 0j
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f != 0:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


# ---------------------------------------------------------------------------
# resonant maps


@dataclass(frozen=True)
class ResonanceVerdict:
    passed: bool
    violations: tuple[tuple[int, MultiIndex], ...] = ()

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "violations": [{"component": i + 1, "exp": list(a)} for i, a in self.violations],
        }


def is_resonant(f: PolynomialMap, M: WeightMatrix) -> ResonanceVerdict:
    """Whether every monomial of component ``i`` lies in the i-th resonance set."""
    if f.n != M.n:
        raise InputError(f"map is on C^{f.n} but weights are for C^{M.n}")
    bad = []
    for i, p in enumerate(f.components):
        for a, _ in p.items():
            if weight_of_monomial(M, a) != M.rows[i]:
                bad.append((i, a))
    return ResonanceVerdict(not bad, tuple(bad))


class ResonantMap:
    """``z_i -> z_i + g_i(z)`` with ``g_i`` built from nonlinear i-th resonant monomials."""

    __slots__ = ("map", "weights", "profile")

    def __init__(self, f: PolynomialMap, weights: WeightMatrix, profile: ResonanceProfile | None = None):
        if f.n != weights.n:
            raise InputError(f"map is on C^{f.n} but weights are for C^{weights.n}")
        profile = profile or resonance_profile(weights)
        n = f.n
        for i, p in enumerate(f.components):
            if p.coeff(unit(n, i)) != 1:
                raise PreconditionError(f"component {i + 1} must have linear part z{i + 1}")
            E = profile.sets[i]
            for a in p.support():
                d = sum(a)
                if d == 0 or (d == 1 and a != unit(n, i)):
                    raise PreconditionError(
                        f"component {i + 1} has extra term z^{list(a)}; linear part must be the identity"
                    )
                if a not in E:
                    raise PreconditionError(
                        f"component {i + 1} has non-resonant term z^{list(a)}"
                    )
        self.map = f
        self.weights = weights
        self.profile = profile

    @property
    def n(self) -> int:
        return self.map.n

    def nonlinear_part(self, i: int) -> Polynomial:
        return self.map[i] - Polynomial.variable(self.n, i)

    def degree(self) -> int:
        return self.map.degree()

    def invert(self) -> "ResonantMap":
        return invert_resonant(self)

    def __eq__(self, other):
        if not isinstance(other, ResonantMap):
            return NotImplemented
        return self.map == other.map and self.weights == other.weights

    def __repr__(self):
        return f"ResonantMap({list(self.map.components)!r}, weights={self.weights.rows})"


def invert_resonant(sigma: ResonantMap) -> ResonantMap:
    """Exact inverse by back-substitution along the proper ordering.

    ``g_i`` only involves variables of strictly smaller certificate scalar, so
    when ``z_i = w_i - g_i(z(w))`` is solved the needed ``z_j(w)`` are known.
    Coordinates sharing a weight form a block with identity linear part and no
    nonlinear coupling, so each block is solved coordinatewise.
    """
    n = sigma.n
    prof = sigma.profile
    tau: list[Polynomial | None] = [None] * n
    for i in prof.ordering:
        g = sigma.nonlinear_part(i)
        missing = [k for k in g.variables() if tau[k] is None]
        if missing:
            raise PreconditionError(
                f"component {i + 1} depends on z{missing[0] + 1}, which is not earlier in the proper order"
            )
        ti = Polynomial.variable(n, i) - substitute(g, tau)
        stray = [a for a in ti.support() if a not in prof.sets[i]]
        if stray:
            raise AssertionError(f"back-substitution left E_{i + 1} at z^{list(stray[0])}")
        tau[i] = ti
    inv = ResonantMap(PolynomialMap(tuple(tau)), sigma.weights, prof)
    if inv.degree() > prof.mu:
        raise AssertionError("inverse exceeds the resonance order")
    return inv


def factor_biholomorphism(sigma1: ResonantMap, sigma2: ResonantMap, J: PolynomialMap) -> PolynomialMap:
    """``sigma2^{-1} o J o sigma1`` with its linear part checked against ``J``."""
    if not (sigma1.n == sigma2.n == J.n):
        raise InputError("dimension mismatch")
    if J.degree() > 1 or any(p.coeff((0,) * J.n) != 0 for p in J.components):
        raise InputError("J must be a linear map")
    d = _det(J.linear_matrix())
    if (d == 0) if is_exact(d) else abs(complex(d)) < 1e-14:
        raise PreconditionError("J is singular")
    f = invert_resonant(sigma2).map.compose(J).compose(sigma1.map)
    L = linear_part(f)
    if is_exact_map(L) and is_exact_map(J):
        assert L == linear_part(J), "linear part of the factorization differs from J"
    else:
        assert L.max_coefficient_distance(linear_part(J)) < 1e-9
    return f


def is_exact_map(f: PolynomialMap) -> bool:
    return f.is_exact()
