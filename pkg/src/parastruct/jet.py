"""Nestable truncated-Taylor jets and the numeric tower they form.

A *tower value* is either a plain ``float`` or a :class:`Jet`. A depth-``d``
jet over ``n`` variables carries a value and ``n`` first partials, each of
which is a depth-``d-1`` tower value, so nesting ``d`` levels yields mixed
partials up to order ``d``. Arithmetic between towers of different depth
treats the shallower operand as a constant at the outer levels.

The arithmetic kernels run in a compiled extension when it is importable and
fall back to numpy otherwise. Set ``PARASTRUCT_BACKEND=python`` to force the
fallback.
"""

from __future__ import annotations

import math
import os
from functools import lru_cache
from numbers import Real
from typing import Sequence

import numpy as np

from . import _jetkernel_py

if os.environ.get("PARASTRUCT_BACKEND", "").lower() == "python":
    _kernel = _jetkernel_py
    BACKEND = "python"
else:
    try:
        from . import _jetkernel as _kernel  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _kernel = _jetkernel_py
        BACKEND = "python"

__all__ = [
    "BACKEND",
    "Jet",
    "TowerDomainError",
    "depth",
    "real_part",
    "lift",
    "split",
    "sin",
    "cos",
    "sinusoid",
    "tan",
    "exp",
    "log",
    "sqrt",
    "power",
]


class TowerDomainError(ValueError):
    """A function was evaluated outside its real domain (checked on the value part)."""


class Jet:
    """Depth-``depth`` jet over ``n`` variables backed by a flat buffer."""

    __slots__ = ("coeffs", "depth", "n")
    __array_priority__ = 1000  # keep numpy scalars from broadcasting over us

    def __init__(self, coeffs: np.ndarray, depth: int, n: int):
        self.coeffs = coeffs
        self.depth = depth
        self.n = n

    @classmethod
    def variable(cls, value, index: int, n: int, depth_: int | None = None) -> "Jet":
        """Seed jet for coordinate ``index`` (0-based) with tower ``value``."""
        inner = depth(value)
        d = inner + 1 if depth_ is None else depth_
        if d <= inner:
            raise ValueError("seed depth must exceed the depth of its value")
        s = (n + 1) ** (d - 1)
        coeffs = np.zeros((n + 1) * s)
        if isinstance(value, Jet):
            coeffs[: value.coeffs.shape[0]] = value.coeffs
        else:
            coeffs[0] = value
        coeffs[(index + 1) * s] = 1.0
        return cls(coeffs, d, n)

    @classmethod
    def from_parts(cls, value, partials: Sequence) -> "Jet":
        """Build a jet one level above the deepest of ``value`` and ``partials``."""
        n = len(partials)
        inner = max([depth(value)] + [depth(p) for p in partials])
        s = (n + 1) ** inner
        coeffs = np.zeros((n + 1) * s)
        for slot, part in enumerate([value, *partials]):
            block = coeffs[slot * s : (slot + 1) * s]
            if isinstance(part, Jet):
                block[: part.coeffs.shape[0]] = part.coeffs
            else:
                block[0] = part
        return cls(coeffs, inner + 1, n)

    # -- structure -------------------------------------------------------

    @property
    def real(self) -> float:
        return float(self.coeffs[0])

    def _block(self, slot: int):
        s = (self.n + 1) ** (self.depth - 1)
        block = self.coeffs[slot * s : (slot + 1) * s]
        if self.depth == 1:
            return float(block[0])
        return Jet(block.copy(), self.depth - 1, self.n)

    @property
    def value(self):
        return self._block(0)

    def partial(self, index: int):
        """First partial with respect to variable ``index`` (0-based)."""
        return self._block(index + 1)

    @property
    def partials(self) -> list:
        return [self._block(i + 1) for i in range(self.n)]

    def __repr__(self) -> str:
        return f"Jet(depth={self.depth}, n={self.n}, value={self.value!r}, partials={self.partials!r})"

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError(f"jet dimension mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, Real):
            return float(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, float):
            c = self.coeffs.copy()
            c[0] += other
            return Jet(c, self.depth, self.n)
        if other.depth == self.depth:
            return Jet(self.coeffs + other.coeffs, self.depth, self.n)
        big, small = (self, other) if self.depth > other.depth else (other, self)
        c = big.coeffs.copy()
        c[: small.coeffs.shape[0]] += small.coeffs
        return Jet(c, big.depth, self.n)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.depth, self.n)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, float):
            return Jet(self.coeffs * other, self.depth, self.n)
        d = max(self.depth, other.depth)
        return Jet(_kernel.mul(self.coeffs, self.depth, other.coeffs, other.depth, self.n), d, self.n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, float):
            if other == 0.0:
                raise ZeroDivisionError("jet division by zero")
            return Jet(self.coeffs / other, self.depth, self.n)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return reciprocal(self) * other

    def __pow__(self, exponent):
        return power(self, exponent)

    def __rpow__(self, base):
        return power(base, self)


# -- tower helpers -------------------------------------------------------


def depth(x) -> int:
    """Nesting depth of a tower value (0 for plain reals)."""
    return x.depth if isinstance(x, Jet) else 0


def real_part(x) -> float:
    """The innermost value component."""
    return x.real if isinstance(x, Jet) else float(x)


def lift(point: Sequence, n: int | None = None) -> tuple:
    """Seed every coordinate of ``point`` one level above its deepest entry."""
    n = len(point) if n is None else n
    d = max(depth(x) for x in point) + 1
    return tuple(Jet.variable(x, i, n, d) for i, x in enumerate(point))


def split(y, d: int, n: int):
    """Split a tower value produced from depth-``d`` seeds into (value, partials).

    Values shallower than ``d`` do not depend on the seeds and have zero
    partials.
    """
    if depth(y) < d:
        return y, [0.0] * n
    return y.value, y.partials


@lru_cache(maxsize=None)
def _factorials(order: int) -> np.ndarray:
    fact = np.array([math.factorial(k) for k in range(order + 1)], dtype=float)
    fact.setflags(write=False)
    return fact


def _taylor(x0: float, order: int, func: str) -> np.ndarray:
    # m-th Taylor coefficients f^(m)(x0)/m! for m = 0..order
    m = np.arange(order + 1)
    fact = _factorials(order)
    if func == "exp":
        return np.full(order + 1, math.exp(x0)) / fact
    if func == "sin":
        return np.array([math.sin(x0 + k * math.pi / 2) for k in m]) / fact
    if func == "cos":
        return np.array([math.cos(x0 + k * math.pi / 2) for k in m]) / fact
    if func == "log":
        c = np.empty(order + 1)
        c[0] = math.log(x0)
        for k in range(1, order + 1):
            c[k] = (-1.0) ** (k + 1) / (k * x0**k)
        return c
    if func == "recip":
        return np.array([(-1.0) ** k / x0 ** (k + 1) for k in m])
    if func == "tan":
        # d^k tan = P_k(t), P_0 = t, P_{k+1} = P_k'(t) (1 + t^2)
        t = math.tan(x0)
        poly = np.array([0.0, 1.0])
        c = np.empty(order + 1)
        for k in range(order + 1):
            c[k] = np.polynomial.polynomial.polyval(t, poly) / fact[k]
            dp = np.polynomial.polynomial.polyder(poly)
            poly = np.polynomial.polynomial.polymul(dp, [1.0, 0.0, 1.0])
        return c
    raise KeyError(func)


def _apply(x: Jet, func: str) -> Jet:
    coeffs = _taylor(x.real, x.depth, func)
    return Jet(_kernel.compose(x.coeffs, x.depth, coeffs, x.n), x.depth, x.n)


def sin(x):
    return _apply(x, "sin") if isinstance(x, Jet) else math.sin(x)


def cos(x):
    return _apply(x, "cos") if isinstance(x, Jet) else math.cos(x)


def sinusoid(x, a: float, b: float):
    """``a sin x + b cos x`` with a single Taylor composition."""
    if not isinstance(x, Jet):
        return a * math.sin(x) + b * math.cos(x)
    order = x.depth
    shifts = x.real + np.arange(order + 1) * (math.pi / 2)
    coeffs = (a * np.sin(shifts) + b * np.cos(shifts)) / _factorials(order)
    return Jet(_kernel.compose(x.coeffs, order, coeffs, x.n), order, x.n)


def tan(x):
    if math.cos(real_part(x)) == 0.0:
        raise TowerDomainError("tan evaluated at a pole")
    return _apply(x, "tan") if isinstance(x, Jet) else math.tan(x)


def exp(x):
    return _apply(x, "exp") if isinstance(x, Jet) else math.exp(x)


def log(x):
    if real_part(x) <= 0.0:
        raise TowerDomainError(f"log of non-positive value {real_part(x)!r}")
    return _apply(x, "log") if isinstance(x, Jet) else math.log(x)


def reciprocal(x):
    if real_part(x) == 0.0:
        raise ZeroDivisionError("division by a tower value with zero real part")
    return _apply(x, "recip") if isinstance(x, Jet) else 1.0 / x


def _real_power(x: Jet, p: float) -> Jet:
    x0 = x.real
    c = np.empty(x.depth + 1)
    coef = 1.0
    for k in range(x.depth + 1):
        c[k] = coef * x0 ** (p - k)
        coef *= (p - k) / (k + 1)
    return Jet(_kernel.compose(x.coeffs, x.depth, c, x.n), x.depth, x.n)


def sqrt(x):
    if real_part(x) < 0.0:
        raise TowerDomainError(f"sqrt of negative value {real_part(x)!r}")
    if isinstance(x, Jet):
        if x.real == 0.0:
            raise TowerDomainError("sqrt is not differentiable at 0")
        return _real_power(x, 0.5)
    return math.sqrt(x)


def power(base, exponent):
    """``base ** exponent`` over the tower.

    Integer-valued real exponents use repeated multiplication; any other
    exponent needs a positive base.
    """
    if not isinstance(exponent, Jet):
        p = float(exponent)
        if p.is_integer():
            k = int(p)
            if k < 0:
                return reciprocal(power(base, -k))
            result = 1.0
            sq = base
            while k:
                if k & 1:
                    result = sq * result
                k >>= 1
                if k:
                    sq = sq * sq
            return result
        if real_part(base) <= 0.0:
            raise TowerDomainError(f"non-integer power {p!r} of non-positive base {real_part(base)!r}")
        if isinstance(base, Jet):
            return _real_power(base, p)
        return math.pow(base, p)
    if real_part(base) <= 0.0:
        raise TowerDomainError("variable exponent needs a positive base")
    return exp(exponent * log(base))
