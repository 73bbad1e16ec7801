"""Charts and smooth fields on them, differentiated exactly through jets.

Every field is an immutable evaluator from a chart point to tower values
(see :mod:`parastruct.jet`). Vector and form fields always store components
relative to the chart's coordinate frame; frame-relative views go through a
:class:`FramePair`. Because fields accept jet-valued points, any field built
from others (brackets, covariant derivatives, ...) can itself be
differentiated again without special cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expr as _expr
from . import jet
from .errors import DomainError, FieldEvaluationError, SingularFrameError
from .exterior import KForm, KVector, wedge

__all__ = [
    "Chart",
    "ScalarField",
    "VectorField",
    "FormField",
    "FramePair",
    "value_and_jacobian",
    "directional_derivative",
    "derivative_along",
    "lie_bracket",
    "exterior_derivative_1form",
    "exterior_derivative_1form_in_frame",
    "d1form_components",
    "scalar_differential",
    "dual_frame",
    "structure_coefficients",
    "pairing",
    "tower_inverse",
    "SINGULAR_DET",
]

#: A frame or operator matrix is treated as singular when ``|det| <= SINGULAR_DET``.
SINGULAR_DET = 1e-8


@dataclass(frozen=True)
class Chart:
    """A coordinate chart with a rectangular sampling box."""

    dim: int
    coords: tuple[str, ...]
    domain: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "domain", tuple((float(lo), float(hi)) for lo, hi in self.domain))
        if self.dim < 1:
            raise DomainError("chart dimension must be at least 1")
        if len(self.coords) != self.dim or len(self.domain) != self.dim:
            raise DomainError(f"chart of dimension {self.dim} needs {self.dim} coordinate names and intervals")
        if len(set(self.coords)) != self.dim:
            raise DomainError(f"duplicate coordinate names {self.coords}")
        for name, (lo, hi) in zip(self.coords, self.domain):
            if not lo < hi:
                raise DomainError(f"empty interval for {name}: [{lo}, {hi}]")

    @classmethod
    def box(cls, coords: Sequence[str], domain: Sequence[tuple[float, float]]) -> "Chart":
        return cls(len(coords), tuple(coords), tuple(domain))

    def contains(self, p) -> bool:
        return len(p) == self.dim and all(lo <= float(x) <= hi for x, (lo, hi) in zip(p, self.domain))

    def point(self, coords) -> tuple[float, ...]:
        """Validated point inside the sampling box."""
        p = tuple(float(x) for x in coords)
        if not self.contains(p):
            raise DomainError(f"point {p} lies outside the sampling box {self.domain}")
        return p

    def sample(self, uniform: Callable[[float, float], float]) -> tuple[float, ...]:
        return tuple(uniform(lo, hi) for lo, hi in self.domain)


def _real_point(X) -> tuple[float, ...]:
    return tuple(jet.real_part(x) for x in X)


# -- scalar fields -------------------------------------------------------


class ScalarField:
    """Point-to-tower evaluator."""

    __slots__ = ("fn", "dim", "label")

    def __init__(self, fn: Callable, dim: int, label: str | None = None):
        self.fn = fn
        self.dim = dim
        self.label = label

    def __call__(self, X):
        return self.fn(X)

    def __repr__(self) -> str:
        return f"ScalarField({self.label or '<fn>'})"

    def at(self, p) -> float:
        return float(self.fn(tuple(float(x) for x in p)))

    @classmethod
    def constant(cls, c: float, dim: int) -> "ScalarField":
        c = float(c)
        return cls(lambda X: c, dim, repr(c))

    @classmethod
    def coordinate(cls, index: int, dim: int) -> "ScalarField":
        """The coordinate function ``x^index`` (0-based)."""
        return cls(lambda X: X[index], dim, f"x{index + 1}")

    @classmethod
    def from_expr(cls, chart: Chart, source) -> "ScalarField":
        """Scalar field from DSL source text (or a parsed tree) over ``chart.coords``."""
        tree = _expr.parse(source) if isinstance(source, str) else source
        unknown = _expr.variables(tree) - set(chart.coords)
        if unknown:
            raise _expr.EvaluationError(f"unknown variable(s) {sorted(unknown)}; chart has {list(chart.coords)}")
        names = chart.coords
        text = source if isinstance(source, str) else _expr.to_source(tree)
        if isinstance(tree, _expr.Num):
            return cls.constant(tree.value, chart.dim)

        def fn(X):
            try:
                return tree.eval(dict(zip(names, X)))
            except _expr.EvaluationError as exc:
                raise FieldEvaluationError(exc.message, _real_point(X), text) from None

        return cls(fn, chart.dim, text)

    def _lift_other(self, other):
        if isinstance(other, ScalarField):
            return other.fn
        c = float(other)
        return lambda X: c

    def __add__(self, other):
        f, g = self.fn, self._lift_other(other)
        return ScalarField(lambda X: f(X) + g(X), self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        f, g = self.fn, self._lift_other(other)
        return ScalarField(lambda X: f(X) - g(X), self.dim)

    def __rsub__(self, other):
        f, g = self.fn, self._lift_other(other)
        return ScalarField(lambda X: g(X) - f(X), self.dim)

    def __neg__(self):
        f = self.fn
        return ScalarField(lambda X: -f(X), self.dim)

    def __mul__(self, other):
        if isinstance(other, (VectorField, FormField)):
            return other.__rmul__(self)
        f, g = self.fn, self._lift_other(other)
        return ScalarField(lambda X: f(X) * g(X), self.dim)

    __rmul__ = __mul__


# -- vector and form fields ----------------------------------------------


class _ComponentField:
    """n coordinate-frame components evaluated together."""

    __slots__ = ("fn", "dim", "label")
    _point_type: type = KVector

    def __init__(self, fn: Callable, dim: int, label: str | None = None):
        self.fn = fn
        self.dim = dim
        self.label = label

    def __call__(self, X) -> tuple:
        return self.fn(X)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label or '<fn>'})"

    def at(self, p):
        comps = self.fn(tuple(float(x) for x in p))
        return self._point_type(1, np.array([float(c) for c in comps]), self.dim)

    def component(self, i: int) -> ScalarField:
        """Coordinate component ``i`` (0-based) as a scalar field."""
        f = self.fn
        return ScalarField(lambda X: f(X)[i], self.dim)

    @classmethod
    def from_components(cls, comps: Sequence[ScalarField]):
        fns = [c.fn for c in comps]
        return cls(lambda X: tuple(f(X) for f in fns), len(fns))

    @classmethod
    def from_exprs(cls, chart: Chart, sources: Sequence):
        if len(sources) != chart.dim:
            raise DomainError(f"expected {chart.dim} component expressions, got {len(sources)}")
        comps = [ScalarField.from_expr(chart, s) for s in sources]
        out = cls.from_components(comps)
        out.label = "(" + ", ".join(c.label or "?" for c in comps) + ")"
        return out

    @classmethod
    def constant(cls, comps: Sequence[float]):
        values = tuple(float(c) for c in comps)
        return cls(lambda X: values, len(values), repr(values))

    @classmethod
    def basis(cls, index: int, dim: int):
        """Coordinate basis field (0-based ``index``): ``d/dx^i`` or ``dx^i``."""
        values = tuple(1.0 if j == index else 0.0 for j in range(dim))
        return cls(lambda X: values, dim, f"{cls._basis_name}{index + 1}")

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.dim != self.dim:
            raise DomainError(f"dimension mismatch {self.dim} vs {other.dim}")
        return other.fn

    def __add__(self, other):
        f, g = self.fn, self._same(other)
        return type(self)(lambda X: tuple(a + b for a, b in zip(f(X), g(X))), self.dim)

    def __sub__(self, other):
        f, g = self.fn, self._same(other)
        return type(self)(lambda X: tuple(a - b for a, b in zip(f(X), g(X))), self.dim)

    def __neg__(self):
        f = self.fn
        return type(self)(lambda X: tuple(-a for a in f(X)), self.dim)

    def __rmul__(self, scalar):
        f = self.fn
        if isinstance(scalar, ScalarField):
            s = scalar.fn

            def fn(X):
                k = s(X)
                return tuple(k * a for a in f(X))

            return type(self)(fn, self.dim)
        k = float(scalar)
        return type(self)(lambda X: tuple(k * a for a in f(X)), self.dim)

    __mul__ = __rmul__


class VectorField(_ComponentField):
    __slots__ = ()
    _point_type = KVector
    _basis_name = "d"


class FormField(_ComponentField):
    __slots__ = ()
    _point_type = KForm
    _basis_name = "dx"


def pairing(omega: FormField, v: VectorField) -> ScalarField:
    """The scalar field ``<omega, v>``."""
    w, f = omega.fn, v.fn
    return ScalarField(lambda X: _dot(w(X), f(X)), v.dim)


def _dot(a, b):
    total = 0.0
    for x, y in zip(a, b):
        total = total + x * y
    return total


# -- differentiation -----------------------------------------------------


def value_and_jacobian(field, X):
    """Evaluate a vector/form field and its coordinate Jacobian at tower point ``X``.

    Returns ``(values, jac)`` with ``jac[i][j] = d_j component_i``.
    """
    n = len(X)
    Y = jet.lift(X, n)
    d = Y[0].depth
    values, jac = [], []
    for y in field(Y):
        v, parts = jet.split(y, d, n)
        values.append(v)
        jac.append(parts)
    return values, jac


def _value_and_grad(f: ScalarField, X):
    n = len(X)
    Y = jet.lift(X, n)
    return jet.split(f(Y), Y[0].depth, n)


def derivative_along(a: VectorField, f: ScalarField, X):
    """``(a f)(X)`` at a tower point."""
    _, grad = _value_and_grad(f, X)
    return _dot(a(X), grad)


def directional_derivative(a: VectorField, f: ScalarField, p) -> float:
    """``(a f)(p) = a^mu(p) d_mu f(p)``."""
    return float(derivative_along(a, f, tuple(float(x) for x in p)))


def lie_bracket(a: VectorField, b: VectorField) -> VectorField:
    """``[a, b]^mu = a^nu d_nu b^mu - b^nu d_nu a^mu``."""

    def fn(X):
        A, dA = value_and_jacobian(a, X)
        B, dB = value_and_jacobian(b, X)
        n = len(A)
        return tuple(_dot(A, dB[mu]) - _dot(B, dA[mu]) for mu in range(n))

    return VectorField(fn, a.dim, f"[{a.label or 'a'}, {b.label or 'b'}]")


def d1form_components(omega: FormField, X) -> list:
    """Coordinate components of ``d omega`` at ``X``, ordered by ``mu < nu``."""
    _, J = value_and_jacobian(omega, X)
    n = len(X)
    return [J[nu][mu] - J[mu][nu] for mu in range(n) for nu in range(mu + 1, n)]


def exterior_derivative_1form(omega: FormField, p) -> KForm:
    """``d omega = sum_{mu<nu} (d_mu omega_nu - d_nu omega_mu) dx^mu ^ dx^nu``."""
    comps = d1form_components(omega, tuple(float(x) for x in p))
    return KForm(2, np.array([float(c) for c in comps]), omega.dim)


def exterior_derivative_1form_in_frame(omega: FormField, frame: "FramePair", p) -> KForm:
    """``d omega`` through a frame, without coordinate derivatives of ``omega``.

    ``d omega = sum_nu d(omega(e_nu)) ^ eps^nu - 1/2 <omega, [e_mu, e_nu]> eps^mu ^ eps^nu``,
    returned in the coordinate coframe.
    """
    p = tuple(float(x) for x in p)
    n = frame.dim
    W = frame.coframe_at(p)
    eps = [KForm(1, np.array([float(c) for c in W[mu]]), n) for mu in range(n)]
    vecs = frame.vectors
    Om = omega(p)
    out = KForm(2, np.zeros(n * (n - 1) // 2), n)
    for nu in range(n):
        out = out + wedge(scalar_differential(pairing(omega, vecs[nu]), p), eps[nu])
    for mu in range(n):
        for nu in range(mu + 1, n):
            # the mu > nu terms repeat these, cancelling the 1/2
            c = float(_dot(Om, lie_bracket(vecs[mu], vecs[nu])(p)))
            out = out - wedge(eps[mu], eps[nu]) * c
    return out


def scalar_differential(f: ScalarField, p) -> KForm:
    """``df`` at ``p`` in the coordinate coframe."""
    _, grad = _value_and_grad(f, tuple(float(x) for x in p))
    return KForm(1, np.array([float(g) for g in grad]), f.dim)


# -- tower linear algebra ------------------------------------------------


def tower_inverse(M: Sequence[Sequence], point=None) -> list[list]:
    """Inverse of a square matrix of tower values (Gauss-Jordan, pivoting on real parts)."""
    n = len(M)
    real = np.array([[jet.real_part(x) for x in row] for row in M])
    det = np.linalg.det(real) if n else 1.0
    if not abs(det) > SINGULAR_DET:
        raise SingularFrameError(f"singular matrix (|det| = {abs(det):.3g})", point)
    if all(not isinstance(x, jet.Jet) for row in M for x in row):
        return np.linalg.inv(real).tolist()
    A = [list(row) + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(jet.real_part(A[r][col])))
        A[col], A[piv] = A[piv], A[col]
        inv = 1.0 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r == col:
                continue
            factor = A[r][col]
            if isinstance(factor, float) and factor == 0.0:
                continue
            A[r] = [x - factor * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


# -- frames --------------------------------------------------------------


class FramePair:
    """A pair of dual frame fields ``{b_mu, beta^mu}``.

    ``vectors_at(X)[mu]`` holds the coordinate components of ``b_mu`` and
    ``coframe_at(X)[mu]`` those of ``beta^mu``; the coframe is the
    inverse-transpose of the frame matrix unless supplied explicitly.
    """

    def __init__(
        self,
        vectors_at: Callable,
        dim: int,
        coframe_at: Callable | None = None,
        *,
        is_coordinate: bool = False,
        label: str | None = None,
    ):
        self.dim = dim
        self.vectors_at = vectors_at
        self.is_coordinate = is_coordinate
        self.label = label
        if coframe_at is None:

            def coframe_at(X):
                E = vectors_at(X)
                inv = tower_inverse(E, _real_point(X))
                return [[inv[i][mu] for i in range(dim)] for mu in range(dim)]

        self.coframe_at = coframe_at

    def __repr__(self) -> str:
        return f"FramePair({self.label or '<fn>'})"

    @classmethod
    def coordinate(cls, dim: int) -> "FramePair":
        ident = [tuple(1.0 if i == j else 0.0 for j in range(dim)) for i in range(dim)]
        return cls(lambda X: ident, dim, lambda X: ident, is_coordinate=True, label="coordinate")

    @classmethod
    def from_vector_fields(cls, b: Sequence[VectorField], beta: Sequence[FormField] | None = None) -> "FramePair":
        fns = [v.fn for v in b]
        dim = len(fns)
        coframe_at = None
        if beta is not None:
            cfns = [w.fn for w in beta]
            coframe_at = lambda X: [f(X) for f in cfns]  # noqa: E731
        return cls(lambda X: [f(X) for f in fns], dim, coframe_at)

    @classmethod
    def from_matrix(cls, chart: Chart, rows: Sequence[Sequence]) -> "FramePair":
        """Frame whose ``b_mu`` has coordinate components ``rows[mu]`` (DSL sources)."""
        if len(rows) != chart.dim or any(len(r) != chart.dim for r in rows):
            raise DomainError(f"frame matrix must be {chart.dim}x{chart.dim}")
        fields = [VectorField.from_exprs(chart, r) for r in rows]
        frame = cls.from_vector_fields(fields)
        frame.label = "[" + "; ".join(f.label for f in fields) + "]"
        return frame

    def b(self, mu: int) -> VectorField:
        """Frame vector ``b_mu`` (0-based)."""
        at = self.vectors_at
        return VectorField(lambda X: tuple(at(X)[mu]), self.dim, f"b{mu + 1}")

    def beta(self, mu: int) -> FormField:
        """Dual form ``beta^mu`` (0-based)."""
        at = self.coframe_at
        return FormField(lambda X: tuple(at(X)[mu]), self.dim, f"beta{mu + 1}")

    @property
    def vectors(self) -> list[VectorField]:
        return [self.b(mu) for mu in range(self.dim)]

    @property
    def forms(self) -> list[FormField]:
        return [self.beta(mu) for mu in range(self.dim)]

    def duality_residual(self, p) -> float:
        """``max |<beta^mu, b_nu> - delta^mu_nu|`` at a real point."""
        p = tuple(float(x) for x in p)
        E = np.array(self.vectors_at(p), dtype=float)
        W = np.array(self.coframe_at(p), dtype=float)
        return float(np.max(np.abs(W @ E.T - np.eye(self.dim))))

    def check_invertible(self, points) -> None:
        for p in points:
            E = np.array(self.vectors_at(tuple(float(x) for x in p)), dtype=float)
            det = np.linalg.det(E)
            if not abs(det) > SINGULAR_DET:
                raise SingularFrameError(f"singular frame matrix (|det| = {abs(det):.3g})", p)


def dual_frame(b: Sequence[VectorField]) -> list[FormField]:
    """Dual coframe ``beta^mu`` with ``<beta^mu, b_nu> = delta^mu_nu``."""
    return FramePair.from_vector_fields(b).forms


def structure_coefficients(frame: FramePair, p) -> np.ndarray:
    """``c[sigma, mu, nu] = <beta^sigma, [b_mu, b_nu]>(p)`` (0-based axes)."""
    p = tuple(float(x) for x in p)
    n = frame.dim
    W = frame.coframe_at(p)
    c = np.zeros((n, n, n))
    vecs = frame.vectors
    for mu in range(n):
        for nu in range(n):
            if mu == nu:
                continue
            br = lie_bracket(vecs[mu], vecs[nu])(p)
            for s in range(n):
                c[s, mu, nu] = float(_dot(W[s], br))
    return c
