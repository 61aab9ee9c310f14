"""Resonance sets, resonance orders and the weight partial order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .action import (
    ValidityCertificate,
    WeightMatrix,
    require_valid,
)
from .errors import InputError, PreconditionError

MultiIndex = tuple[int, ...]


def unit(n: int, k: int) -> MultiIndex:
    return tuple(1 if i == k else 0 for i in range(n))


def enumerate_weight_class(
    M: WeightMatrix, c: ValidityCertificate, w: Sequence[int]
) -> frozenset[MultiIndex]:
    """All ``alpha`` in N^n with ``alpha . m^j == w_j`` for every j.

    Each unit of ``alpha_i`` spends ``m_i . c >= 1`` from the budget ``w . c``,
    which bounds the depth-first search.
    """
    if c is None or not isinstance(c, ValidityCertificate) or not c.verify(M):
        raise PreconditionError("enumeration needs a verified validity certificate")
    w = tuple(w)
    if len(w) != M.r:
        raise InputError(f"target weight has length {len(w)}, expected {M.r}")
    budget = sum(a * b for a, b in zip(w, c.c))
    if budget < 0:
        return frozenset()
    cost = c.scalars(M)
    rows = M.rows
    n, r = M.n, M.r
    found: set[MultiIndex] = set()
    alpha = [0] * n
    partial = [0] * r

    def dfs(i: int, remaining: int):
        if i == n:
            if remaining == 0 and tuple(partial) == w:
                found.add(tuple(alpha))
            return
        ci = cost[i]
        row = rows[i]
        for a in range(remaining // ci + 1):
            alpha[i] = a
            if a:
                for j in range(r):
                    partial[j] += row[j]
            dfs(i + 1, remaining - a * ci)
        for j in range(r):
            partial[j] -= alpha[i] * row[j]
        alpha[i] = 0

    dfs(0, budget)
    return frozenset(found)


@dataclass(frozen=True)
class ResonanceSet:
    index: int  # 0-based
    elements: tuple[MultiIndex, ...]  # sorted lexicographically

    @property
    def mu(self) -> int:
        return max(sum(a) for a in self.elements)

    def nonlinear(self) -> tuple[MultiIndex, ...]:
        return tuple(a for a in self.elements if sum(a) >= 2)

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self.elements


@dataclass(frozen=True)
class ResonanceProfile:
    weights: WeightMatrix
    certificate: ValidityCertificate
    sets: tuple[ResonanceSet, ...]
    relation: frozenset[tuple[int, int]]  # (i, j): m_i < m_j, 0-based
    ordering: tuple[int, ...]  # 0-based indices, earliest first

    @property
    def mus(self) -> tuple[int, ...]:
        return tuple(s.mu for s in self.sets)

    @property
    def mu(self) -> int:
        return max(self.mus)

    def position(self) -> dict[int, int]:
        return {idx: p for p, idx in enumerate(self.ordering)}

    def to_json(self) -> dict:
        return {
            "weights": self.weights.to_json(),
            "certificate": self.certificate.to_json(),
            "mu": self.mu,
            "E": [[list(a) for a in s.elements] for s in self.sets],
            "indices": [
                {"i": s.index + 1, "E_i": [list(a) for a in s.elements], "mu_i": s.mu}
                for s in self.sets
            ],
            "relation": sorted([i + 1, j + 1] for i, j in self.relation),
            "ordering": [i + 1 for i in self.ordering],
        }


def _relation(M: WeightMatrix, sets: Sequence[Sequence[MultiIndex]]) -> set[tuple[int, int]]:
    rel = set()
    for j, E in enumerate(sets):
        for alpha in E:
            for i, a in enumerate(alpha):
                # equal weights form a block and carry no mutual relation
                if a and i != j and M.rows[i] != M.rows[j]:
                    rel.add((i, j))
    return rel


def resonance_profile(M: WeightMatrix) -> ResonanceProfile:
    c = require_valid(M)
    sets = []
    for i in range(M.n):
        E = enumerate_weight_class(M, c, M.rows[i])
        sets.append(ResonanceSet(i, tuple(sorted(E))))
    rel = _relation(M, [s.elements for s in sets])
    scal = c.scalars(M)
    incoming = [sum(1 for (_, j) in rel if j == k) for k in range(M.n)]
    ordering = tuple(sorted(range(M.n), key=lambda k: (scal[k], -incoming[k], k)))
    pos = {idx: p for p, idx in enumerate(ordering)}
    for i, j in rel:
        assert pos[i] < pos[j], "certificate ordering is not compatible with the relation"
    return ResonanceProfile(M, c, tuple(sets), frozenset(rel), ordering)


def build_gamma(alpha: Sequence[int], beta: Sequence[int], i: int, j: int) -> MultiIndex:
    """Invariant exponent from a two-way resonance between ``z_i`` and ``z_j``.

    Given ``alpha`` with weight ``m_j`` using ``z_i`` but not ``z_j`` and
    ``beta`` with weight ``m_i`` using ``z_j`` but not ``z_i``, substituting
    ``z^alpha`` for each ``z_j`` in ``z^beta`` and dividing by ``z_i`` leaves
    ``gamma = beta_j*alpha + beta - beta_j*e_j - e_i`` of weight zero.
    Indices are 0-based.
    """
    alpha, beta = tuple(alpha), tuple(beta)
    n = len(alpha)
    if len(beta) != n:
        raise InputError("alpha and beta must have equal length")
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise InputError("need distinct indices i, j within range")
    if any(a < 0 for a in alpha + beta):
        raise InputError("multi-indices must be non-negative")
    if alpha[i] < 1 or alpha[j] != 0 or beta[j] < 1 or beta[i] != 0:
        raise InputError("need alpha_i >= 1, alpha_j = 0, beta_j >= 1, beta_i = 0")
    bj = beta[j]
    gamma = [bj * a + b for a, b in zip(alpha, beta)]
    gamma[i] -= 1
    gamma[j] -= bj
    return tuple(gamma)


@dataclass(frozen=True)
class AntisymmetryVerdict:
    passed: bool
    relation: frozenset[tuple[int, int]]
    violations: tuple[tuple[int, int, MultiIndex], ...] = ()

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "relation": sorted([i + 1, j + 1] for i, j in self.relation),
            "violations": [
                {"i": i + 1, "j": j + 1, "gamma": list(g)} for i, j, g in self.violations
            ],
        }


def antisymmetry_violations(
    M: WeightMatrix, sets: Sequence[Sequence[MultiIndex]]
) -> list[tuple[int, int, MultiIndex]]:
    """Pairs related both ways by ``sets``, each with its invariant exponent.

    ``sets`` need not come from enumeration, so forged inputs exercise the
    certificate construction.
    """
    out = []
    n = M.n
    for i in range(n):
        for j in range(i + 1, n):
            a = next((x for x in sets[j] if x[i] >= 1 and x[j] == 0), None)
            b = next((x for x in sets[i] if x[j] >= 1 and x[i] == 0), None)
            if a is not None and b is not None:
                out.append((i, j, build_gamma(a, b, i, j)))
    return out


def check_antisymmetry(M: WeightMatrix) -> AntisymmetryVerdict:
    if not M.has_distinct_rows():
        raise PreconditionError("antisymmetry is stated for pairwise distinct weights")
    prof = resonance_profile(M)
    bad = antisymmetry_violations(M, [s.elements for s in prof.sets])
    two_way = any((j, i) in prof.relation for i, j in prof.relation)
    return AntisymmetryVerdict(not (bad or two_way), prof.relation, tuple(bad))
