"""Reproducible random points, fields, frames and operators.

The generator is SplitMix64 (Steele, Lea and Flood 2014), chosen because it is
tiny, fully specified and identical across platforms and Python versions.
Each verification suite draws from its own substream keyed by the run seed,
the suite name (CRC-32, never ``hash``) and the sample index, so adding a
suite or changing the sample count of one suite leaves the others unchanged.
"""

from __future__ import annotations

import zlib
from math import comb

import numpy as np

from . import jet
from .connection import VectorOperatorField
from .exterior import KForm, KVector
from .fields import Chart, FormField, FramePair, ScalarField, VectorField

__all__ = [
    "SplitMix64",
    "substream",
    "random_point",
    "sample_points",
    "random_scalar_field",
    "random_vector_field",
    "random_form_field",
    "random_kvector",
    "random_kform",
    "random_frame",
    "random_operator",
    "COEFF_RANGE",
]

_MASK = (1 << 64) - 1

#: Coefficients of random fields are drawn uniformly from this interval.
COEFF_RANGE = (-2.0, 2.0)


class SplitMix64:
    """SplitMix64 pseudo-random generator."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randrange(self, n: int) -> int:
        return self.next_u64() % n


def substream(seed: int, label: str, index: int = 0) -> SplitMix64:
    """Independent generator for ``(seed, label, index)``."""
    root = SplitMix64(seed)
    keyed = SplitMix64(root.next_u64() ^ zlib.crc32(label.encode("utf-8")))
    return SplitMix64(keyed.next_u64() ^ (int(index) & _MASK))


def random_point(chart: Chart, rng: SplitMix64, margin: float = 0.02) -> tuple[float, ...]:
    """Point in the sampling box, kept ``margin`` (relative) away from its faces."""
    out = []
    for lo, hi in chart.domain:
        pad = (hi - lo) * margin
        out.append(rng.uniform(lo + pad, hi - pad))
    return tuple(out)


def _coeffs(rng: SplitMix64, count: int) -> list[float]:
    return [rng.uniform(*COEFF_RANGE) for _ in range(count)]


def random_scalar_field(dim: int, rng: SplitMix64) -> ScalarField:
    """Random combination of ``1, x_i, sin x_i, cos x_i`` and ``x_i x_j`` (i < j)."""
    c0 = rng.uniform(*COEFF_RANGE)
    lin, sins, coss = _coeffs(rng, dim), _coeffs(rng, dim), _coeffs(rng, dim)
    pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    # cross terms are scaled down so products of coordinates do not dominate
    cross = [0.25 * c for c in _coeffs(rng, len(pairs))]

    def fn(X):
        total = c0
        for i in range(dim):
            x = X[i]
            total = total + lin[i] * x + jet.sinusoid(x, sins[i], coss[i])
        for (i, j), c in zip(pairs, cross):
            total = total + c * X[i] * X[j]
        return total

    return ScalarField(fn, dim, "random")


def _random_components(cls, dim: int, rng: SplitMix64):
    comps = [random_scalar_field(dim, rng).fn for _ in range(dim)]
    return cls(lambda X: tuple(f(X) for f in comps), dim, "random")


def random_vector_field(dim: int, rng: SplitMix64) -> VectorField:
    return _random_components(VectorField, dim, rng)


def random_form_field(dim: int, rng: SplitMix64) -> FormField:
    return _random_components(FormField, dim, rng)


def random_kvector(dim: int, grade: int, rng: SplitMix64) -> KVector:
    return KVector(grade, np.array(_coeffs(rng, comb(dim, grade))), dim)


def random_kform(dim: int, grade: int, rng: SplitMix64) -> KForm:
    return KForm(grade, np.array(_coeffs(rng, comb(dim, grade))), dim)


def _dominant_matrix_fn(dim: int, rng: SplitMix64):
    # M[i][j] = 2 delta_ij + 0.15 (a sin x_k + b cos x_k) with |a|, |b| <= 1:
    # off-diagonal row sums stay below the diagonal for dim <= 5, so M is invertible
    entries = []
    for i in range(dim):
        row = []
        for j in range(dim):
            k = rng.randrange(dim)
            a, b = rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)
            row.append((2.0 if i == j else 0.0, 0.15 * a, 0.15 * b, k))
        entries.append(row)

    def fn(X):
        return [[c + jet.sinusoid(X[k], a, b) for c, a, b, k in row] for row in entries]

    return fn


def random_frame(dim: int, rng: SplitMix64) -> FramePair:
    """Random diagonally dominant (hence invertible) non-coordinate frame."""
    fn = _dominant_matrix_fn(dim, rng)
    return FramePair(fn, dim, label="random frame")


def random_operator(dim: int, rng: SplitMix64) -> VectorOperatorField:
    """Random diagonally dominant (hence invertible) operator field."""
    return VectorOperatorField(_dominant_matrix_fn(dim, rng), dim, "random operator")


def sample_points(chart: Chart, rng: SplitMix64, count: int) -> list[tuple[float, ...]]:
    return [random_point(chart, rng) for _ in range(count)]
