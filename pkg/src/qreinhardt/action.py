"""Torus weight actions on C^n and validity certificates.

An action of the r-torus on C^n is encoded by an integer n x r matrix whose
row ``i`` is the weight of coordinate ``z_i``. The action is *valid* when the
only invariant holomorphic functions are constants, i.e. when no nonzero
``gamma`` in N^n satisfies ``M^T gamma = 0``. By Gordan's alternative this is
equivalent to the existence of an integer vector ``c`` with ``M c >= 1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .errors import InputError, InvalidActionError


@dataclass(frozen=True)
class WeightMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.rows
        if len(rows) < 1:
            raise InputError("weight matrix needs at least one row")
        r = len(rows[0])
        if r < 1:
            raise InputError("weight matrix needs at least one column")
        clean = []
        for row in rows:
            if len(row) != r:
                raise InputError("ragged weight matrix: all rows need the same length")
            out = []
            for v in row:
                if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                    if isinstance(v, float) and v.is_integer():
                        v = int(v)
                    else:
                        raise InputError(f"weight entries must be integers, got {v!r}")
                out.append(int(v))
            clean.append(tuple(out))
        object.__setattr__(self, "rows", tuple(clean))

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "WeightMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def r(self) -> int:
        return len(self.rows[0])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def has_distinct_rows(self) -> bool:
        return len(set(self.rows)) == self.n

    def gcd_normalized(self) -> bool | None:
        """For rank one, whether the weights are coprime; ``None`` otherwise."""
        if self.r != 1:
            return None
        return math.gcd(*(row[0] for row in self.rows)) == 1

    # -- JSON -----------------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "WeightMatrix":
        try:
            rows = data["rows"]
        except (KeyError, TypeError):
            raise InputError("weight JSON needs a 'rows' field") from None
        wm = cls.of(rows)
        if "n" in data and data["n"] != wm.n:
            raise InputError(f"declared n={data['n']} but {wm.n} rows given")
        if "r" in data and data["r"] != wm.r:
            raise InputError(f"declared r={data['r']} but rows have length {wm.r}")
        return wm


@dataclass(frozen=True)
class ValidityCertificate:
    c: tuple[int, ...]

    valid = True

    def verify(self, M: WeightMatrix) -> bool:
        if len(self.c) != M.r:
            return False
        return all(sum(m * x for m, x in zip(row, self.c)) >= 1 for row in M.rows)

    def scalars(self, M: WeightMatrix) -> tuple[int, ...]:
        """The positive integers ``m_i . c``."""
        return tuple(sum(m * x for m, x in zip(row, self.c)) for row in M.rows)

    def to_json(self) -> dict:
        return {"valid": True, "c": list(self.c)}


@dataclass(frozen=True)
class InvalidityCertificate:
    gamma: tuple[int, ...]

    valid = False

    def verify(self, M: WeightMatrix) -> bool:
        if len(self.gamma) != M.n or any(g < 0 for g in self.gamma) or not any(self.gamma):
            return False
        return all(x == 0 for x in weight_of_monomial(M, self.gamma))

    def to_json(self) -> dict:
        return {"valid": False, "gamma": list(self.gamma)}


Certificate = Union[ValidityCertificate, InvalidityCertificate]


def weight_of_monomial(M: WeightMatrix, alpha: Sequence[int]) -> tuple[int, ...]:
    """Torus weight ``(alpha . m^1, ..., alpha . m^r)`` of ``z^alpha``."""
    if len(alpha) != M.n:
        raise InputError(f"multi-index has length {len(alpha)}, expected {M.n}")
    out = [0] * M.r
    for a, row in zip(alpha, M.rows):
        if a:
            for j, m in enumerate(row):
                out[j] += a * m
    return tuple(out)


def apply_action(M: WeightMatrix, lam: Sequence[complex], z: Sequence[complex], tol: float = 1e-12):
    """Evaluate ``rho(lam) z`` on a point (or a stack of points, last axis n)."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (M.r,):
        raise InputError(f"lambda must have length {M.r}")
    if np.any(np.abs(np.abs(lam) - 1.0) > tol):
        raise InputError("torus elements must have unit modulus")
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != M.n:
        raise InputError(f"point must have {M.n} coordinates")
    # negative exponents are fine on the unit circle
    scale = np.prod(lam[None, :] ** M.as_array(), axis=1)
    return z * scale


# ---------------------------------------------------------------------------
# validation


def _box_search(M: WeightMatrix, bound: int) -> tuple[int, ...] | None:
    """Smallest-sup-norm integer c with ``M c >= 1``, searching boxes up to ``bound``.

    Ties inside a shell go to the smallest l1 norm, then lexicographically largest c.
    """
    A = M.as_array()
    for B in range(1, bound + 1):
        grid = np.array(list(itertools.product(range(B, -B - 1, -1), repeat=M.r)), dtype=np.int64)
        grid = grid[np.max(np.abs(grid), axis=1) == B]
        ok = np.all(grid @ A.T >= 1, axis=1)
        if ok.any():
            cand = grid[ok]
            l1 = np.abs(cand).sum(axis=1)
            # grid is in lexicographically decreasing order; argmin keeps the first tie
            return tuple(int(x) for x in cand[int(np.argmin(l1))])
    return None


def _lp_certificate(M: WeightMatrix) -> np.ndarray | None:
    A = M.as_array().astype(float)
    res = linprog(
        np.zeros(M.r),
        A_ub=-A,
        b_ub=-np.ones(M.n),
        bounds=[(None, None)] * M.r,
        method="highs",
    )
    return res.x if res.status == 0 else None


def _round_certificate(M: WeightMatrix, x: np.ndarray) -> tuple[int, ...] | None:
    A = M.as_array()
    for scale in (1, 2, 4, 8, 16, 64, 256, 1024):
        c = np.ceil(x * scale - 1e-9).astype(np.int64)
        if np.all(A @ c >= 1):
            g = math.gcd(*(int(v) for v in c)) or 1
            c2 = c // g
            if np.all(A @ c2 >= 1):
                c = c2
            return tuple(int(v) for v in c)
    return None


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _enumerate_kernel(M: WeightMatrix, max_degree: int) -> tuple[int, ...] | None:
    """First nonzero gamma (by degree, then reverse-lex) with ``M^T gamma = 0``."""
    for d in range(1, max_degree + 1):
        for g in _compositions(d, M.n):
            if not any(weight_of_monomial(M, g)):
                return g
    return None


def _milp_gamma(M: WeightMatrix) -> tuple[int, ...] | None:
    A = M.as_array().astype(float)
    cons = [
        LinearConstraint(A.T, np.zeros(M.r), np.zeros(M.r)),
        LinearConstraint(np.ones((1, M.n)), 1, np.inf),
    ]
    res = milp(
        np.ones(M.n),
        constraints=cons,
        integrality=np.ones(M.n),
        bounds=Bounds(0, np.inf),
    )
    if res.status != 0 or res.x is None:
        return None
    g = tuple(int(round(v)) for v in res.x)
    return g


_ENUM_LIMIT = 200_000


def validate_action(M: WeightMatrix) -> Certificate:
    """Decide validity of the action, returning an exactly verified certificate.

    A valid action yields the integer c minimising ``max|c_j|`` (box search for
    r <= 3, rounded LP solution otherwise). An invalid one yields a nonzero
    gamma in N^n of least total degree with ``M^T gamma = 0``.
    """
    if not isinstance(M, WeightMatrix):
        raise InputError("expected a WeightMatrix")
    x = _lp_certificate(M)
    if x is not None:
        if M.r <= 3:
            # LP solution bounds the search box
            row_l1 = int(np.abs(M.as_array()).sum(axis=1).max())
            bound = min(40, int(np.ceil((row_l1 + 1) * np.max(np.abs(x)))) + 1)
            c = _box_search(M, bound)
            if c is None:
                c = _round_certificate(M, x)
        else:
            c = _round_certificate(M, x)
        if c is not None:
            cert = ValidityCertificate(c)
            assert cert.verify(M)
            return cert
    g = _milp_gamma(M)
    if g is not None and InvalidityCertificate(g).verify(M):
        d = sum(g)
        if math.comb(d - 1 + M.n - 1, M.n - 1) * d <= _ENUM_LIMIT:
            g = _enumerate_kernel(M, d) or g
        return InvalidityCertificate(g)
    g = _enumerate_kernel(M, 12)
    if g is not None:
        return InvalidityCertificate(g)
    raise RuntimeError("neither a validity nor an invalidity certificate could be verified")


def require_valid(M: WeightMatrix) -> ValidityCertificate:
    cert = validate_action(M)
    if not cert.valid:
        raise InvalidActionError(cert)
    return cert
