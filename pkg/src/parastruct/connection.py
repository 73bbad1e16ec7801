"""Connections and covariant derivatives of vector, form and extensor fields.

A :class:`Connection` stores coefficient functions ``G^s_{mk}`` relative to an
explicit frame pair ``{b, beta}``, meaning ``Gamma(b_m, b_k) = G^s_{mk} b_s``.
Covariant derivatives are returned as lazy fields, so ``nabla_a nabla_b c``
or the covariant derivative of the curvature extensor need no resampling;
each extra derivative only deepens the jet nesting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import jet
from .errors import DomainError
from .fields import (
    Chart,
    FormField,
    FramePair,
    ScalarField,
    VectorField,
    _dot,
    _real_point,
    derivative_along,
    tower_inverse,
    value_and_jacobian,
)

__all__ = [
    "Connection",
    "VectorOperatorField",
    "ElementaryExtensorField",
    "AxiomReport",
    "cov_deriv_vector",
    "cov_deriv_form",
    "cov_deriv_extensor",
    "check_connection_axioms",
    "derivative_field",
    "max_abs",
]

Index3 = tuple[int, int, int]


def max_abs(values) -> float:
    """Largest absolute real value in an iterable of tower values."""
    return max((abs(jet.real_part(v)) for v in values), default=0.0)


def derivative_field(a: VectorField, f: ScalarField) -> ScalarField:
    """The scalar field ``a f``."""
    return ScalarField(lambda X: derivative_along(a, f, X), f.dim)


class Connection:
    """Connection given by frame-relative coefficients.

    ``coefficients_at(X)`` returns a mapping ``(s, m, k) -> G^s_{mk}(X)``
    (0-based indices) holding every coefficient that may be nonzero.
    """

    def __init__(self, frame: FramePair, coefficients_at: Callable[..., Mapping[Index3, object]], label: str | None = None):
        self.frame = frame
        self.dim = frame.dim
        self.coefficients_at = coefficients_at
        self.label = label

    def __repr__(self) -> str:
        return f"Connection({self.label or '<fn>'}, frame={self.frame!r})"

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_fields(cls, frame: FramePair, coeffs: Mapping[Index3, ScalarField], label: str | None = None) -> "Connection":
        n = frame.dim
        for key in coeffs:
            if len(key) != 3 or any(not 0 <= i < n for i in key):
                raise DomainError(f"coefficient index {tuple(i + 1 for i in key)} outside 1..{n}")
        items = [(key, f.fn) for key, f in coeffs.items()]
        return cls(frame, lambda X: {key: fn(X) for key, fn in items}, label)

    @classmethod
    def from_exprs(cls, chart: Chart, coeffs: Mapping[Index3, str], frame: FramePair | None = None, label: str | None = None) -> "Connection":
        """Connection from DSL sources; omitted coefficients are zero."""
        frame = FramePair.coordinate(chart.dim) if frame is None else frame
        fields = {key: ScalarField.from_expr(chart, src) for key, src in coeffs.items()}
        return cls.from_fields(frame, fields, label)

    @classmethod
    def flat(cls, frame: FramePair | int, label: str | None = None) -> "Connection":
        """All coefficients zero in ``frame``: the relative connection of that frame."""
        if isinstance(frame, int):
            frame = FramePair.coordinate(frame)
        return cls(frame, lambda X: {}, label or "flat")

    # -- coefficients ----------------------------------------------------

    def coefficient(self, s: int, m: int, k: int) -> ScalarField:
        at = self.coefficients_at
        return ScalarField(lambda X: at(X).get((s, m, k), 0.0), self.dim)

    def coefficient_array(self, p) -> np.ndarray:
        """Dense ``G[s, m, k]`` at a real point."""
        n = self.dim
        out = np.zeros((n, n, n))
        for (s, m, k), g in self.coefficients_at(tuple(float(x) for x in p)).items():
            out[s, m, k] = jet.real_part(g)
        return out

    def reexpress(self, frame: FramePair) -> "Connection":
        """The same connection with coefficients relative to ``frame``.

        ``G'^s_{mk} = <beta'^s, nabla_{b'_m} b'_k>``.
        """
        n = self.dim
        basis = frame.vectors

        def coeffs(X):
            E = frame.vectors_at(X)
            W = frame.coframe_at(X)
            out = {}
            for k in range(n):
                for m in range(n):
                    w = self._nabla_vec_at(E[m], basis[k], X)
                    for s in range(n):
                        out[(s, m, k)] = _dot(W[s], w)
            return out

        return Connection(frame, coeffs, f"{self.label or 'connection'} in {frame.label or 'frame'}")

    # -- covariant derivatives -------------------------------------------

    def _nabla_vec_at(self, A, v: VectorField, X):
        """Coordinate components of ``(nabla_a v)(X)`` given ``A = a(X)``."""
        n = self.dim
        frame = self.frame
        G = self.coefficients_at(X)
        if frame.is_coordinate:
            V, dV = value_and_jacobian(v, X)
            out = [_dot(A, dV[s]) for s in range(n)]
            for (s, m, k), g in G.items():
                out[s] = out[s] + g * A[m] * V[k]
            return tuple(out)
        Y = jet.lift(X, n)
        d = Y[0].depth
        Vy = v(Y)
        Wy = frame.coframe_at(Y)
        vs, avs = [], []
        for s in range(n):
            val, parts = jet.split(_dot(Wy[s], Vy), d, n)
            vs.append(val)
            avs.append(_dot(A, parts))
        W = [[jet.split(w, d, n)[0] for w in row] for row in Wy]
        a_frame = [_dot(W[m], A) for m in range(n)]
        comp = list(avs)
        for (s, m, k), g in G.items():
            comp[s] = comp[s] + g * a_frame[m] * vs[k]
        E = frame.vectors_at(X)
        return tuple(_dot([comp[s] for s in range(n)], [E[s][i] for s in range(n)]) for i in range(n))

    def _nabla_form_at(self, A, omega: FormField, X):
        """Coordinate components of ``(nabla_a omega)(X)`` given ``A = a(X)``."""
        n = self.dim
        frame = self.frame
        G = self.coefficients_at(X)
        if frame.is_coordinate:
            Om, dOm = value_and_jacobian(omega, X)
            out = [_dot(A, dOm[k]) for k in range(n)]
            for (s, m, k), g in G.items():
                out[k] = out[k] - g * A[m] * Om[s]
            return tuple(out)
        Y = jet.lift(X, n)
        d = Y[0].depth
        Oy = omega(Y)
        Ey = frame.vectors_at(Y)
        ws, aws = [], []
        for k in range(n):
            val, parts = jet.split(_dot(Oy, Ey[k]), d, n)
            ws.append(val)
            aws.append(_dot(A, parts))
        W = frame.coframe_at(X)
        a_frame = [_dot(W[m], A) for m in range(n)]
        comp = list(aws)
        for (s, m, k), g in G.items():
            comp[k] = comp[k] - g * a_frame[m] * ws[s]
        return tuple(_dot([comp[k] for k in range(n)], [W[k][i] for k in range(n)]) for i in range(n))

    def nabla(self, a: VectorField, v: VectorField) -> VectorField:
        """``nabla_a v = Gamma(a, v)`` as a lazy field."""
        af = a.fn
        return VectorField(lambda X: self._nabla_vec_at(af(X), v, X), self.dim, f"nabla_{a.label or 'a'} {v.label or 'v'}")

    def nabla_form(self, a: VectorField, omega: FormField) -> FormField:
        """``nabla_a omega`` with ``(nabla_a omega)(v) = a(omega(v)) - omega(nabla_a v)``."""
        af = a.fn
        return FormField(lambda X: self._nabla_form_at(af(X), omega, X), self.dim, f"nabla_{a.label or 'a'} {omega.label or 'w'}")

    __call__ = nabla


def cov_deriv_vector(G: Connection, a: VectorField, v: VectorField) -> VectorField:
    return G.nabla(a, v)


def cov_deriv_form(G: Connection, a: VectorField, omega: FormField) -> FormField:
    return G.nabla_form(a, omega)


# -- operator fields -----------------------------------------------------


class VectorOperatorField:
    """Pointwise linear operator on vector fields: ``(L v)^i = M[i][j] v^j``."""

    def __init__(self, matrix_at: Callable, dim: int, label: str | None = None):
        self.matrix_at = matrix_at
        self.dim = dim
        self.label = label

    def __repr__(self) -> str:
        return f"VectorOperatorField({self.label or '<fn>'})"

    @classmethod
    def from_matrix(cls, chart: Chart, rows: Sequence[Sequence[str]]) -> "VectorOperatorField":
        n = chart.dim
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DomainError(f"operator matrix must be {n}x{n}")
        entries = [[ScalarField.from_expr(chart, s).fn for s in r] for r in rows]
        label = "[" + "; ".join(", ".join(r) for r in rows) + "]"
        return cls(lambda X: [[f(X) for f in r] for r in entries], n, label)

    @classmethod
    def identity(cls, dim: int) -> "VectorOperatorField":
        ident = [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)]
        return cls(lambda X: ident, dim, "identity")

    def matrix(self, p) -> np.ndarray:
        return np.array([[jet.real_part(x) for x in row] for row in self.matrix_at(tuple(float(x) for x in p))])

    def __call__(self, v: VectorField) -> VectorField:
        M, f = self.matrix_at, v.fn

        def fn(X):
            m, V = M(X), f(X)
            return tuple(_dot(row, V) for row in m)

        return VectorField(fn, self.dim)

    def adjoint(self, omega: FormField) -> FormField:
        """Dual adjoint: ``<L^T omega, v> = <omega, L v>``."""
        M, f = self.matrix_at, omega.fn
        n = self.dim

        def fn(X):
            m, W = M(X), f(X)
            return tuple(_dot(W, [m[i][j] for i in range(n)]) for j in range(n))

        return FormField(fn, n)

    def inverse(self) -> "VectorOperatorField":
        M = self.matrix_at
        return VectorOperatorField(lambda X: tower_inverse(M(X), _real_point(X)), self.dim, f"inv({self.label or 'L'})")

    def compose(self, inner: "VectorOperatorField") -> "VectorOperatorField":
        """``self o inner``."""
        A, B = self.matrix_at, inner.matrix_at
        n = self.dim

        def fn(X):
            a, b = A(X), B(X)
            return [[_dot(a[i], [b[k][j] for k in range(n)]) for j in range(n)] for i in range(n)]

        return VectorOperatorField(fn, n)


# -- extensor fields -----------------------------------------------------


class ElementaryExtensorField:
    """k-covariant, l-contravariant extensor field with vector or form output.

    ``fn(*vectors, *forms)`` returns a (lazy) :class:`VectorField` or
    :class:`FormField`.
    """

    def __init__(self, k: int, l: int, kind: str, fn: Callable, label: str | None = None):
        if kind not in ("vector", "form"):
            raise DomainError(f"extensor output kind must be 'vector' or 'form', not {kind!r}")
        self.k = k
        self.l = l
        self.kind = kind
        self.fn = fn
        self.label = label

    def __repr__(self) -> str:
        return f"ElementaryExtensorField({self.label or '<fn>'}, k={self.k}, l={self.l}, {self.kind})"

    def __call__(self, *args):
        if len(args) != self.k + self.l:
            raise DomainError(f"extensor takes {self.k} vector and {self.l} form arguments, got {len(args)}")
        for i, arg in enumerate(args):
            want = VectorField if i < self.k else FormField
            if not isinstance(arg, want):
                raise DomainError(f"argument {i + 1} must be a {want.__name__}, got {type(arg).__name__}")
        return self.fn(*args)

    def at(self, args: Sequence, p):
        return self(*args).at(p)


def cov_deriv_extensor(G: Connection, a: VectorField, tau: ElementaryExtensorField) -> ElementaryExtensorField:
    """``(nabla_a tau)(v.., w..) = nabla_a(tau(v.., w..)) - sum tau(.., nabla_a v_i, ..) - sum tau(.., nabla_a w_j, ..)``."""
    k = tau.k

    def fn(*args):
        outer = tau(*args)
        total = G.nabla(a, outer) if tau.kind == "vector" else G.nabla_form(a, outer)
        for i, arg in enumerate(args):
            moved = G.nabla(a, arg) if i < k else G.nabla_form(a, arg)
            total = total - tau(*args[:i], moved, *args[i + 1 :])
        return total

    return ElementaryExtensorField(tau.k, tau.l, tau.kind, fn, f"nabla_{a.label or 'a'} {tau.label or 'tau'}")


# -- axiom checks --------------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    strong_linearity: float
    quasi_linearity: float
    samples: int

    @property
    def worst(self) -> float:
        return max(self.strong_linearity, self.quasi_linearity)


def check_connection_axioms(gamma: Callable[[VectorField, VectorField], VectorField], samples) -> AxiomReport:
    """Max residuals of strong linearity (first slot) and quasi linearity (second slot).

    ``gamma(a, v)`` must return a vector field; :class:`Connection` qualifies.
    Each sample is ``(p, f, g, a, b, v, w)`` with scalar fields ``f, g`` and
    vector fields ``a, b, v, w``.
    """
    strong = quasi = 0.0
    count = 0
    for p, f, g, a, b, v, w in samples:
        p = tuple(float(x) for x in p)
        lhs = gamma(f * a + g * b, v)(p)
        ga, gb = gamma(a, v)(p), gamma(b, v)(p)
        fp, gp = f(p), g(p)
        strong = max(strong, max_abs(x - fp * y - gp * z for x, y, z in zip(lhs, ga, gb)))

        lhs = gamma(a, f * v + g * w)(p)
        af, ag = derivative_along(a, f, p), derivative_along(a, g, p)
        gv, gw = gamma(a, v)(p), gamma(a, w)(p)
        V, Wv = v(p), w(p)
        rhs = [af * x + ag * y + fp * s + gp * t for x, y, s, t in zip(V, Wv, gv, gw)]
        quasi = max(quasi, max_abs(x - y for x, y in zip(lhs, rhs)))
        count += 1
    return AxiomReport(strong, quasi, count)
