"""Pointwise exterior algebra over an n-dimensional real fiber.

Components are stored densely, one entry per strictly increasing multi-index
in lexicographic order, relative to whatever frame pair the caller is working
in. With that convention the duality pairing of a k-form and a k-vector is the
plain dot product of their component arrays, which reproduces the determinant
rule ``<w1^...^wk, v1^...^vk> = det[<wi, vj>]``.

Indices in the public API are 1-based, matching the usual ``e_1, ..., e_n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

__all__ = [
    "ExteriorDomainError",
    "KVector",
    "KForm",
    "vector",
    "form",
    "wedge",
    "pair",
    "basis_kvector",
    "basis_kform",
    "multi_indices",
]


class ExteriorDomainError(ValueError):
    """Grade, kind or index precondition violated."""


@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Strictly increasing 0-based multi-indices of length ``k`` in ``range(n)``."""
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def _position(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {idx: i for i, idx in enumerate(multi_indices(n, k))}


@lru_cache(maxsize=None)
def _wedge_table(n: int, j: int, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # (row in x, row in y, row in result, sign) for every disjoint index pair
    pos = _position(n, j + k)
    xs, ys, rs, signs = [], [], [], []
    for a, I in enumerate(multi_indices(n, j)):
        for b, J in enumerate(multi_indices(n, k)):
            if set(I) & set(J):
                continue
            merged = I + J
            # parity of the sorting permutation = number of inversions
            inversions = sum(1 for p in I for q in J if p > q)
            xs.append(a)
            ys.append(b)
            rs.append(pos[tuple(sorted(merged))])
            signs.append(-1.0 if inversions % 2 else 1.0)
    return np.array(xs, dtype=int), np.array(ys, dtype=int), np.array(rs, dtype=int), np.array(signs)


class _Graded:
    kind = ""

    grade: int
    components: np.ndarray
    dim: int

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float).reshape(-1)
        if not 0 <= self.grade <= self.dim:
            raise ExteriorDomainError(f"grade {self.grade} outside 0..{self.dim}")
        expected = comb(self.dim, self.grade)
        if comps.shape[0] != expected:
            raise ExteriorDomainError(
                f"grade-{self.grade} {self.kind} on n={self.dim} needs {expected} components, got {comps.shape[0]}"
            )
        object.__setattr__(self, "components", comps)

    def _check_same(self, other):
        if type(other) is not type(self) or other.grade != self.grade or other.dim != self.dim:
            raise ExteriorDomainError(f"cannot combine {self!r} with {other!r}")

    def __add__(self, other):
        self._check_same(other)
        return type(self)(self.grade, self.components + other.components, self.dim)

    def __sub__(self, other):
        self._check_same(other)
        return type(self)(self.grade, self.components - other.components, self.dim)

    def __neg__(self):
        return type(self)(self.grade, -self.components, self.dim)

    def __mul__(self, scalar):
        return type(self)(self.grade, self.components * float(scalar), self.dim)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return type(self)(self.grade, self.components / float(scalar), self.dim)

    def __getitem__(self, indices) -> float:
        """Component at a 1-based strictly increasing multi-index."""
        if isinstance(indices, int):
            indices = (indices,)
        key = _checked_indices(tuple(indices), self.dim)
        if len(key) != self.grade:
            raise ExteriorDomainError(f"expected {self.grade} indices, got {len(key)}")
        return float(self.components[_position(self.dim, self.grade)[key]])

    def norm(self) -> float:
        """Max-abs magnitude of the component array."""
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

    def items(self):
        """``(1-based multi-index, component)`` pairs."""
        for idx, c in zip(multi_indices(self.dim, self.grade), self.components):
            yield tuple(i + 1 for i in idx), float(c)


@dataclass(frozen=True, eq=False)
class KVector(_Graded):
    """Grade-k multivector; grade 1 is an ordinary tangent vector."""

    grade: int
    components: np.ndarray
    dim: int

    kind = "k-vector"

    def __repr__(self) -> str:
        return f"KVector(grade={self.grade}, {self.components.tolist()})"


@dataclass(frozen=True, eq=False)
class KForm(_Graded):
    """Grade-k exterior form; grade 1 is an ordinary covector."""

    grade: int
    components: np.ndarray
    dim: int

    kind = "k-form"

    def __repr__(self) -> str:
        return f"KForm(grade={self.grade}, {self.components.tolist()})"


def vector(components) -> KVector:
    comps = np.asarray(components, dtype=float).reshape(-1)
    return KVector(1, comps, comps.shape[0])


def form(components) -> KForm:
    comps = np.asarray(components, dtype=float).reshape(-1)
    return KForm(1, comps, comps.shape[0])


def wedge(x, y):
    """Exterior product of two k-vectors or two k-forms."""
    if type(x) is not type(y) or not isinstance(x, (KVector, KForm)):
        raise ExteriorDomainError("wedge needs two k-vectors or two k-forms")
    if x.dim != y.dim:
        raise ExteriorDomainError(f"dimension mismatch {x.dim} vs {y.dim}")
    n, j, k = x.dim, x.grade, y.grade
    if j + k > n:
        raise ExteriorDomainError(f"grade overflow: {j} + {k} > {n}")
    xs, ys, rs, signs = _wedge_table(n, j, k)
    out = np.zeros(comb(n, j + k))
    np.add.at(out, rs, signs * x.components[xs] * y.components[ys])
    return type(x)(j + k, out, n)


def pair(omega: KForm, X: KVector) -> float:
    """Duality pairing ``<omega, X>`` of equal-grade form and multivector."""
    if not isinstance(omega, KForm) or not isinstance(X, KVector):
        raise ExteriorDomainError("pair takes (KForm, KVector)")
    if omega.grade != X.grade or omega.dim != X.dim:
        raise ExteriorDomainError(
            f"grade/dimension mismatch: form grade {omega.grade} (n={omega.dim}), "
            f"k-vector grade {X.grade} (n={X.dim})"
        )
    return float(np.dot(omega.components, X.components))


def _checked_indices(indices: tuple[int, ...], n: int) -> tuple[int, ...]:
    if any(not 1 <= i <= n for i in indices):
        raise ExteriorDomainError(f"index out of range 1..{n}: {indices}")
    if any(a >= b for a, b in zip(indices, indices[1:])):
        raise ExteriorDomainError(f"indices must be strictly increasing: {indices}")
    return tuple(i - 1 for i in indices)


def _basis(cls, indices, n):
    key = _checked_indices(tuple(indices), n)
    k = len(key)
    comps = np.zeros(comb(n, k))
    comps[_position(n, k)[key]] = 1.0
    return cls(k, comps, n)


def basis_kvector(indices, n: int) -> KVector:
    """``e_{i1} ^ ... ^ e_{ik}`` for 1-based strictly increasing ``indices``."""
    return _basis(KVector, indices, n)


def basis_kform(indices, n: int) -> KForm:
    """``eps^{i1} ^ ... ^ eps^{ik}`` for 1-based strictly increasing ``indices``."""
    return _basis(KForm, indices, n)
