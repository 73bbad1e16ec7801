"""Symmetric, deformed, relative and split structures; Jacobian fields."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cartan import CurvatureFamily, TorsionFamily
from .connection import Connection, ElementaryExtensorField, VectorOperatorField, cov_deriv_extensor
from .errors import SingularFrameError
from .exterior import KForm, KVector, pair, vector, wedge
from .fields import SINGULAR_DET, FormField, FramePair, VectorField, _dot, exterior_derivative_1form

__all__ = [
    "SymmetryResult",
    "is_symmetric",
    "cyclic_residual",
    "curvature_extensor",
    "bianchi_residual",
    "Deformation",
    "deform",
    "deformed_vector_direct",
    "deformed_form_direct",
    "RelativeStructure",
    "relative_connection",
    "SplitDecomposition",
    "split",
    "JacobianField",
    "jacobian",
    "Compatibility",
    "compatibility",
    "coefficient_difference",
]


def _pt(p) -> tuple[float, ...]:
    return tuple(float(x) for x in p)


# -- symmetric connections -----------------------------------------------


@dataclass(frozen=True)
class SymmetryResult:
    symmetric: bool
    torsion_residual: float
    theta_residual: float
    samples: int


def is_symmetric(G: Connection, samples: Iterable, tol: float = 1e-10) -> SymmetryResult:
    """Decide ``tau = 0`` from samples ``(p, a, b)``; also checks every ``Theta^nu = 0``."""
    tf = TorsionFamily(G)
    tors = theta = 0.0
    count = 0
    for p, a, b in samples:
        p = _pt(p)
        tors = max(tors, tf.tau(a, b).at(p).norm())
        for nu in range(G.dim):
            theta = max(theta, tf.Theta_frame(nu, p).norm())
        count += 1
    return SymmetryResult(max(tors, theta) <= tol, tors, theta, count)


def cyclic_residual(G: Connection, a: VectorField, b: VectorField, c: VectorField, p) -> KVector:
    """``rho(a, b, c) + rho(b, c, a) + rho(c, a, b)``; vanishes for symmetric connections."""
    cf = CurvatureFamily(G)
    p = _pt(p)
    return cf.rho(a, b, c).at(p) + cf.rho(b, c, a).at(p) + cf.rho(c, a, b).at(p)


def curvature_extensor(G: Connection) -> ElementaryExtensorField:
    """``rho`` as a (3, 0) extensor field with vector output."""
    cf = CurvatureFamily(G)
    return ElementaryExtensorField(3, 0, "vector", cf.rho, "rho")


def bianchi_residual(G: Connection, w: VectorField, a: VectorField, b: VectorField, c: VectorField, p) -> KVector:
    """``(nabla_w rho)(a, b, c) + (nabla_a rho)(b, w, c) + (nabla_b rho)(w, a, c)``."""
    rho = curvature_extensor(G)
    p = _pt(p)
    total = cov_deriv_extensor(G, w, rho)(a, b, c).at(p)
    total = total + cov_deriv_extensor(G, a, rho)(b, w, c).at(p)
    return total + cov_deriv_extensor(G, b, rho)(w, a, c).at(p)


# -- deformations --------------------------------------------------------


class Deformation:
    """Invertible operator field ``lambda`` with its inverse and adjoints."""

    def __init__(self, lam: VectorOperatorField):
        self.lam = lam
        self.dim = lam.dim
        self.inv = lam.inverse()

    def __repr__(self) -> str:
        return f"Deformation({self.lam.label or '<fn>'})"

    def check(self, points: Iterable) -> None:
        """Raise :class:`SingularFrameError` where ``|det lambda| <= SINGULAR_DET``."""
        for p in points:
            det = np.linalg.det(self.lam.matrix(p))
            if not abs(det) > SINGULAR_DET:
                raise SingularFrameError(f"singular deformation (|det| = {abs(det):.3g})", _pt(p))

    def __call__(self, v: VectorField) -> VectorField:
        return self.lam(v)

    def inverse(self, v: VectorField) -> VectorField:
        return self.inv(v)

    def adjoint(self, omega: FormField) -> FormField:
        """``lambda^T omega``."""
        return self.lam.adjoint(omega)

    def inverse_adjoint(self, omega: FormField) -> FormField:
        """``lambda^{-T} omega``."""
        return self.inv.adjoint(omega)

    def compose(self, inner: "Deformation") -> "Deformation":
        """``self o inner``."""
        return Deformation(self.lam.compose(inner.lam))


def deform(G: Connection, d: Deformation | VectorOperatorField) -> Connection:
    """The deformed connection ``G^lambda(a, v) = lambda(G(a, lambda^-1 v))``, in ``G``'s frame."""
    if isinstance(d, VectorOperatorField):
        d = Deformation(d)
    frame = G.frame
    n = G.dim
    pulled = [d.inverse(b) for b in frame.vectors]

    def coeffs(X):
        L = d.lam.matrix_at(X)
        E, W = frame.vectors_at(X), frame.coframe_at(X)
        out = {}
        for k in range(n):
            for m in range(n):
                w = G._nabla_vec_at(E[m], pulled[k], X)
                lw = [_dot(row, w) for row in L]
                for s in range(n):
                    out[(s, m, k)] = _dot(W[s], lw)
        return out

    return Connection(frame, coeffs, f"{G.label or 'connection'} deformed by {d.lam.label or 'lambda'}")


def deformed_vector_direct(G: Connection, d: Deformation, a: VectorField, v: VectorField) -> VectorField:
    """``lambda(nabla_a lambda^-1 v)`` without forming coefficients."""
    return d(G.nabla(a, d.inverse(v)))


def deformed_form_direct(G: Connection, d: Deformation, a: VectorField, omega: FormField) -> FormField:
    """``lambda^{-T}(nabla_a lambda^T omega)``."""
    return d.inverse_adjoint(G.nabla_form(a, d.adjoint(omega)))


# -- relative structures -------------------------------------------------


class RelativeStructure:
    """The connection whose coefficients vanish in a given frame pair."""

    def __init__(self, frame: FramePair):
        self.frame = frame
        self.dim = frame.dim
        self.connection = Connection.flat(frame, f"relative({frame.label or 'frame'})")

    def __repr__(self) -> str:
        return f"RelativeStructure({self.frame!r})"

    def frame_parallel_residual(self, a: VectorField, p) -> float:
        """``max_mu |B(a, b_mu)|`` and ``max_mu |B_a beta^mu|`` (both vanish)."""
        p = _pt(p)
        B = self.connection
        r = max(B.nabla(a, b).at(p).norm() for b in self.frame.vectors)
        return max(r, max(B.nabla_form(a, w).at(p).norm() for w in self.frame.forms))

    def torsion_formula(self, a: VectorField, b: VectorField, p) -> KVector:
        """``d beta^s(a, b) b_s``."""
        p = _pt(p)
        ab = wedge(a.at(p), b.at(p))
        out = vector(np.zeros(self.dim))
        for s in range(self.dim):
            db = exterior_derivative_1form(self.frame.beta(s), p)
            out = out + pair(db, ab) * self.frame.b(s).at(p)
        return out

    def torsion_residual(self, a: VectorField, b: VectorField, p) -> float:
        tau = TorsionFamily(self.connection).tau(a, b).at(p)
        return (tau - self.torsion_formula(a, b, p)).norm()

    def theta_formula(self, omega, p) -> KForm:
        """``<omega, b_s> d beta^s``."""
        p = _pt(p)
        w = omega if isinstance(omega, KForm) else omega.at(p)
        out = KForm(2, np.zeros(self.dim * (self.dim - 1) // 2), self.dim)
        for s in range(self.dim):
            out = out + pair(w, self.frame.b(s).at(p)) * exterior_derivative_1form(self.frame.beta(s), p)
        return out

    def theta_residual(self, omega, p) -> float:
        theta = TorsionFamily(self.connection).Theta(omega, p)
        return (theta - self.theta_formula(omega, p)).norm()

    def curvature_residual(self, a: VectorField, b: VectorField, c: VectorField, p) -> float:
        return CurvatureFamily(self.connection).rho(a, b, c).at(p).norm()


def relative_connection(frame: FramePair) -> RelativeStructure:
    return RelativeStructure(frame)


# -- split decomposition -------------------------------------------------


class SplitDecomposition:
    """``Gamma = B + gamma`` with ``B`` the relative connection of ``frame``."""

    def __init__(self, G: Connection, frame: FramePair):
        self.G = G
        self.frame = frame
        self.dim = G.dim
        self.B = Connection.flat(frame, "B")

    def gamma(self, a: VectorField, v: VectorField) -> VectorField:
        """``gamma(a, v) = beta^m(v) nabla_a b_m``."""
        G, frame, n = self.G, self.frame, self.dim
        basis = frame.vectors

        def fn(X):
            A, V, W = a(X), v(X), frame.coframe_at(X)
            out = [0.0] * n
            for m in range(n):
                coeff = _dot(W[m], V)
                nb = G._nabla_vec_at(A, basis[m], X)
                out = [o + coeff * x for o, x in zip(out, nb)]
            return tuple(out)

        return VectorField(fn, n, "gamma")

    def gamma_adjoint(self, a: VectorField, omega: FormField) -> FormField:
        """``gamma_a^T omega`` with ``(gamma_a^T omega)(v) = omega(gamma(a, v))``."""
        n = self.dim
        cols = [self.gamma(a, VectorField.basis(i, n)) for i in range(n)]

        def fn(X):
            Om = omega(X)
            return tuple(_dot(Om, c(X)) for c in cols)

        return FormField(fn, n)

    def vector_residual(self, a: VectorField, v: VectorField, p) -> float:
        lhs = self.G.nabla(a, v).at(p)
        return (lhs - self.B.nabla(a, v).at(p) - self.gamma(a, v).at(p)).norm()

    def form_residual(self, a: VectorField, omega: FormField, p) -> float:
        lhs = self.G.nabla_form(a, omega).at(p)
        rhs = self.B.nabla_form(a, omega).at(p) - self.gamma_adjoint(a, omega).at(p)
        return (lhs - rhs).norm()


def split(G: Connection, frame: FramePair | None = None) -> SplitDecomposition:
    return SplitDecomposition(G, G.frame if frame is None else frame)


# -- Jacobian fields -----------------------------------------------------


class JacobianField:
    """``J(v) = beta^s(v) b'_s`` between frame pairs ``F`` and ``F'``."""

    def __init__(self, source: FramePair, target: FramePair):
        if source.dim != target.dim:
            raise ValueError("frames of different dimension")
        self.source = source
        self.target = target
        self.dim = source.dim
        self.J = self._operator(source, target)
        self.J_inv = self._operator(target, source)
        self.B = Connection.flat(source, "B")
        self.B_prime = Connection.flat(target, "B'")

    @staticmethod
    def _operator(src: FramePair, dst: FramePair) -> VectorOperatorField:
        n = src.dim

        def fn(X):
            W, E = src.coframe_at(X), dst.vectors_at(X)
            return [[_dot([E[s][i] for s in range(n)], [W[s][j] for s in range(n)]) for j in range(n)] for i in range(n)]

        return VectorOperatorField(fn, n)

    def __call__(self, v: VectorField) -> VectorField:
        return self.J(v)

    def frame_map_residual(self, p) -> float:
        """``J b_m = b'_m`` and ``J^-1 b'_m = b_m``."""
        p = _pt(p)
        r = 0.0
        for b, bp in zip(self.source.vectors, self.target.vectors):
            r = max(r, (self.J(b).at(p) - bp.at(p)).norm(), (self.J_inv(bp).at(p) - b.at(p)).norm())
        return r

    def vector_derivative_residual(self, a: VectorField, v: VectorField, p) -> float:
        """``B'(a, v) = J(B(a, J^-1 v))``."""
        lhs = self.B_prime.nabla(a, v).at(p)
        return (lhs - self.J(self.B.nabla(a, self.J_inv(v))).at(p)).norm()

    def form_derivative_residual(self, a: VectorField, omega: FormField, p) -> float:
        """``B'_a omega = J^{-T}(B_a J^T omega)``."""
        lhs = self.B_prime.nabla_form(a, omega).at(p)
        rhs = self.J_inv.adjoint(self.B.nabla_form(a, self.J.adjoint(omega))).at(p)
        return (lhs - rhs).norm()

    def coframe_residual(self, p) -> float:
        """``J^{-T} beta^m = beta'^m`` and ``J^T beta'^m = beta^m``."""
        p = _pt(p)
        r = 0.0
        for w, wp in zip(self.source.forms, self.target.forms):
            r = max(r, (self.J_inv.adjoint(w).at(p) - wp.at(p)).norm(), (self.J.adjoint(wp).at(p) - w.at(p)).norm())
        return r

    def deformation_residual(self, p) -> float:
        """Deforming ``B`` by ``J`` must give ``B'``."""
        return coefficient_difference(deform(self.B, self.J), self.B_prime, p)


def jacobian(source: FramePair, target: FramePair) -> JacobianField:
    return JacobianField(source, target)


# -- comparison helpers --------------------------------------------------


def coefficient_difference(G1: Connection, G2: Connection, p) -> float:
    """Max coefficient difference after expressing both in the coordinate frame."""
    coord = FramePair.coordinate(G1.dim)
    c1 = (G1 if G1.frame.is_coordinate else G1.reexpress(coord)).coefficient_array(p)
    c2 = (G2 if G2.frame.is_coordinate else G2.reexpress(coord)).coefficient_array(p)
    return float(np.max(np.abs(c1 - c2)))


@dataclass(frozen=True)
class Compatibility:
    compatible: bool
    max_difference: float


def compatibility(a: FramePair, b: FramePair, points: Sequence, tol: float = 1e-9) -> Compatibility:
    """Whether the relative connections of two frames agree on the sampled overlap."""
    Ga, Gb = Connection.flat(a), Connection.flat(b)
    diff = max((coefficient_difference(Ga, Gb, p) for p in points), default=0.0)
    return Compatibility(diff <= tol, diff)

