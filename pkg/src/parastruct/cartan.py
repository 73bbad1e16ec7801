"""Cartan connections, torsion and curvature families, structure equations.

All point values are returned as :class:`KVector` / :class:`KForm` in
coordinate components. The *active frame* ``{e_mu, eps^mu}`` used for frame
sums defaults to the connection's own frame; every quantity here is
frame-independent, which the tests exploit by switching frames.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .connection import Connection, max_abs
from .exterior import KForm, KVector, form, pair, vector, wedge
from .fields import (
    FormField,
    FramePair,
    VectorField,
    _dot,
    exterior_derivative_1form,
    lie_bracket,
)

__all__ = [
    "gamma_plus_field",
    "gamma_minus_field",
    "gamma_plus",
    "gamma_minus",
    "connection_forms",
    "nabla_from_gamma_plus",
    "nabla_form_from_gamma_minus",
    "residual_norm",
    "connection_forms_from_coefficients",
    "TorsionFamily",
    "CurvatureFamily",
    "torsion_family",
    "curvature_family",
    "cartan_first_residual",
    "cartan_first_frame_residual",
    "covariant_curl",
    "covariant_curl_direct",
    "cartan_second_residual",
    "cartan_second_product_residual",
    "cartan_second_frame_residual",
    "DualityReport",
    "duality_adjoint_residuals",
]


def _active(G: Connection, frame: FramePair | None) -> FramePair:
    return G.frame if frame is None else frame


def _frame_at(frame: FramePair, p):
    p = tuple(float(x) for x in p)
    E = np.array(frame.vectors_at(p), dtype=float)
    W = np.array(frame.coframe_at(p), dtype=float)
    return p, [vector(e) for e in E], [form(w) for w in W]


def _form_at(omega, p) -> KForm:
    return omega if isinstance(omega, KForm) else omega.at(p)


def _zero2(n: int) -> KForm:
    return KForm(2, np.zeros(n * (n - 1) // 2), n)


# -- Cartan connections --------------------------------------------------


def gamma_plus_field(G: Connection, v: VectorField, omega: FormField, frame: FramePair | None = None) -> FormField:
    """``Gamma+(v, omega) = <omega, nabla_{e_s} v> eps^s`` as a form field."""
    frame = _active(G, frame)
    n = G.dim

    def fn(X):
        E, W, Om = frame.vectors_at(X), frame.coframe_at(X), omega(X)
        coeff = [_dot(Om, G._nabla_vec_at(E[s], v, X)) for s in range(n)]
        return tuple(_dot(coeff, [W[s][i] for s in range(n)]) for i in range(n))

    return FormField(fn, n, "Gamma+")


def gamma_minus_field(G: Connection, v: VectorField, omega: FormField, frame: FramePair | None = None) -> FormField:
    """``Gamma-(v, omega) = <nabla_{e_s} omega, v> eps^s`` as a form field."""
    frame = _active(G, frame)
    n = G.dim

    def fn(X):
        E, W, V = frame.vectors_at(X), frame.coframe_at(X), v(X)
        coeff = [_dot(G._nabla_form_at(E[s], omega, X), V) for s in range(n)]
        return tuple(_dot(coeff, [W[s][i] for s in range(n)]) for i in range(n))

    return FormField(fn, n, "Gamma-")


def gamma_plus(G: Connection, v: VectorField, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    return gamma_plus_field(G, v, omega, frame).at(p)


def gamma_minus(G: Connection, v: VectorField, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    return gamma_minus_field(G, v, omega, frame).at(p)


def connection_forms(G: Connection, frame: FramePair | None = None) -> list[list[FormField]]:
    """``gamma[nu][mu] = Gamma+(e_mu, eps^nu)`` for the active frame."""
    frame = _active(G, frame)
    e, eps = frame.vectors, frame.forms
    n = G.dim
    return [[gamma_plus_field(G, e[mu], eps[nu], frame) for mu in range(n)] for nu in range(n)]


def connection_forms_from_coefficients(G: Connection) -> list[list[FormField]]:
    """``gamma[nu][mu] = G^nu_{s mu} beta^s`` in the connection's own frame."""
    frame = G.frame
    n = G.dim

    def make(nu, mu):
        def fn(X):
            C, W = G.coefficients_at(X), frame.coframe_at(X)
            coeff = [C.get((nu, s, mu), 0.0) for s in range(n)]
            return tuple(_dot(coeff, [W[s][i] for s in range(n)]) for i in range(n))

        return FormField(fn, n)

    return [[make(nu, mu) for mu in range(n)] for nu in range(n)]


def nabla_from_gamma_plus(G: Connection, a: VectorField, v: VectorField, p, frame: FramePair | None = None) -> KVector:
    """Rebuild ``nabla_a v = <Gamma+(v, eps^nu), a> e_nu``."""
    frame = _active(G, frame)
    p, e, _ = _frame_at(frame, p)
    A = a.at(p)
    out = vector(np.zeros(G.dim))
    for nu, eps in enumerate(frame.forms):
        out = out + pair(gamma_plus(G, v, eps, p, frame), A) * e[nu]
    return out


def nabla_form_from_gamma_minus(G: Connection, a: VectorField, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    """Rebuild ``nabla_a omega = <Gamma-(e_nu, omega), a> eps^nu``."""
    frame = _active(G, frame)
    p, _, eps = _frame_at(frame, p)
    A = a.at(p)
    out = form(np.zeros(G.dim))
    for nu, e in enumerate(frame.vectors):
        out = out + pair(gamma_minus(G, e, omega, p, frame), A) * eps[nu]
    return out


# -- torsion -------------------------------------------------------------


class TorsionFamily:
    """Torsion ``tau``, its extensor ``T_ext``, tensor ``T`` and 2-form ``Theta``."""

    def __init__(self, G: Connection, frame: FramePair | None = None):
        self.G = G
        self.frame = _active(G, frame)
        self.dim = G.dim

    def tau(self, a: VectorField, b: VectorField) -> VectorField:
        """``tau(a, b) = nabla_a b - nabla_b a - [a, b]``."""
        return self.G.nabla(a, b) - self.G.nabla(b, a) - lie_bracket(a, b)

    def _frame_taus(self, p):
        e = self.frame.vectors
        n = self.dim
        return {(m, k): self.tau(e[m], e[k]).at(p) for m in range(n) for k in range(n) if m != k}

    def T_ext(self, X2: KVector, p) -> KVector:
        """``T_ext(X2) = 1/2 <eps^m ^ eps^k, X2> tau(e_m, e_k)``."""
        p, _, eps = _frame_at(self.frame, p)
        out = vector(np.zeros(self.dim))
        for (m, k), t in self._frame_taus(p).items():
            out = out + 0.5 * pair(wedge(eps[m], eps[k]), X2) * t
        return out

    def T(self, a: VectorField, b: VectorField, omega, p) -> float:
        """``T(a, b, omega) = <omega, tau(a, b)>``."""
        return pair(_form_at(omega, p), self.tau(a, b).at(p))

    def Theta(self, omega, p) -> KForm:
        """``Theta(omega) = 1/2 <omega, tau(e_m, e_k)> eps^m ^ eps^k``."""
        p, _, eps = _frame_at(self.frame, p)
        w = _form_at(omega, p)
        out = _zero2(self.dim)
        for (m, k), t in self._frame_taus(p).items():
            out = out + 0.5 * pair(w, t) * wedge(eps[m], eps[k])
        return out

    def Theta_frame(self, nu: int, p) -> KForm:
        """Frame torsion form ``Theta^nu = Theta(eps^nu)``."""
        return self.Theta(self.frame.beta(nu), p)

    def components(self, p) -> np.ndarray:
        """``T[nu, a, b] = T(e_a, e_b, eps^nu)`` in the active frame."""
        p, _, eps = _frame_at(self.frame, p)
        n = self.dim
        out = np.zeros((n, n, n))
        for (m, k), t in self._frame_taus(p).items():
            for nu in range(n):
                out[nu, m, k] = pair(eps[nu], t)
        return out

    def reconstruct_tau(self, a: VectorField, b: VectorField, p) -> KVector:
        """``sum_mu T(a, b, eps^mu) e_mu``."""
        p, e, eps = _frame_at(self.frame, p)
        t = self.tau(a, b).at(p)
        out = vector(np.zeros(self.dim))
        for mu in range(self.dim):
            out = out + pair(eps[mu], t) * e[mu]
        return out


# -- curvature -----------------------------------------------------------


class CurvatureFamily:
    """Curvature ``rho``, extensor ``R_ext``, tensor ``R`` and 2-form ``Omega``."""

    def __init__(self, G: Connection, frame: FramePair | None = None):
        self.G = G
        self.frame = _active(G, frame)
        self.dim = G.dim

    def rho(self, a: VectorField, b: VectorField, c: VectorField) -> VectorField:
        """``rho(a, b, c) = [nabla_a, nabla_b] c - nabla_[a,b] c``."""
        nab = self.G.nabla
        return nab(a, nab(b, c)) - nab(b, nab(a, c)) - nab(lie_bracket(a, b), c)

    def _frame_rhos(self, c: VectorField, p):
        e = self.frame.vectors
        n = self.dim
        return {(m, k): self.rho(e[m], e[k], c).at(p) for m in range(n) for k in range(n) if m != k}

    def R_ext(self, X2: KVector, c: VectorField, p) -> KVector:
        """``R_ext(X2, c) = 1/2 <eps^m ^ eps^k, X2> rho(e_m, e_k, c)``."""
        p, _, eps = _frame_at(self.frame, p)
        out = vector(np.zeros(self.dim))
        for (m, k), r in self._frame_rhos(c, p).items():
            out = out + 0.5 * pair(wedge(eps[m], eps[k]), X2) * r
        return out

    def R(self, a: VectorField, b: VectorField, c: VectorField, omega, p) -> float:
        """``R(a, b, c, omega) = <omega, rho(b, c, a)>``.

        NOTE the rotated argument order: the first slot is the vector being
        differentiated, the next two are the commutator directions. The
        reconstruction ``rho(a, b, c) = R(c, a, b, eps^mu) e_mu`` relies on it.
        """
        return pair(_form_at(omega, p), self.rho(b, c, a).at(p))

    def Omega(self, c: VectorField, omega, p) -> KForm:
        """``Omega(c, omega) = 1/2 <omega, rho(e_m, e_k, c)> eps^m ^ eps^k``."""
        p, _, eps = _frame_at(self.frame, p)
        w = _form_at(omega, p)
        out = _zero2(self.dim)
        for (m, k), r in self._frame_rhos(c, p).items():
            out = out + 0.5 * pair(w, r) * wedge(eps[m], eps[k])
        return out

    def Omega_frame(self, mu: int, nu: int, p) -> KForm:
        """Frame curvature form ``Omega^nu_mu = Omega(e_mu, eps^nu)``."""
        return self.Omega(self.frame.b(mu), self.frame.beta(nu), p)

    def reconstruct_rho(self, a: VectorField, b: VectorField, c: VectorField, p) -> KVector:
        """``sum_mu R(c, a, b, eps^mu) e_mu``."""
        p, e, eps = _frame_at(self.frame, p)
        out = vector(np.zeros(self.dim))
        for mu in range(self.dim):
            out = out + self.R(c, a, b, eps[mu], p) * e[mu]
        return out


def torsion_family(G: Connection, frame: FramePair | None = None) -> TorsionFamily:
    return TorsionFamily(G, frame)


def curvature_family(G: Connection, frame: FramePair | None = None) -> CurvatureFamily:
    return CurvatureFamily(G, frame)


# -- structure equations -------------------------------------------------


def covariant_curl(G: Connection, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    """``nabla ^ omega = Gamma-(e_s, omega) ^ eps^s``."""
    frame = _active(G, frame)
    p, _, eps = _frame_at(frame, p)
    out = _zero2(G.dim)
    for s, e in enumerate(frame.vectors):
        out = out + wedge(gamma_minus(G, e, omega, p, frame), eps[s])
    return out


def covariant_curl_direct(G: Connection, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    """``nabla ^ omega = eps^m ^ nabla_{e_m} omega``."""
    frame = _active(G, frame)
    p, _, eps = _frame_at(frame, p)
    out = _zero2(G.dim)
    for m, e in enumerate(frame.vectors):
        out = out + wedge(eps[m], G.nabla_form(e, omega).at(p))
    return out


def cartan_first_residual(G: Connection, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    """``Theta(omega) - (d omega - nabla ^ omega)``."""
    theta = TorsionFamily(G, frame).Theta(omega, p)
    return theta - (exterior_derivative_1form(omega, p) - covariant_curl(G, omega, p, frame))


def cartan_first_frame_residual(G: Connection, nu: int, p, frame: FramePair | None = None) -> KForm:
    """``Theta^nu - (d eps^nu + gamma^nu_s ^ eps^s)``."""
    frame = _active(G, frame)
    p, e, eps = _frame_at(frame, p)
    eps_nu = frame.beta(nu)
    rhs = exterior_derivative_1form(eps_nu, p)
    for s, es in enumerate(frame.vectors):
        rhs = rhs + wedge(gamma_plus(G, es, eps_nu, p, frame), eps[s])
    return TorsionFamily(G, frame).Theta(eps_nu, p) - rhs


def _second_product(G, c, omega, p, frame) -> KForm:
    _, _, eps = _frame_at(frame, p)
    out = _zero2(G.dim)
    for s, es in enumerate(frame.vectors):
        out = out + wedge(gamma_plus(G, c, frame.beta(s), p, frame), gamma_minus(G, es, omega, p, frame))
    return out


def cartan_second_residual(G: Connection, c: VectorField, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    """``Omega(c, omega) - (d Gamma+(c, omega) + Gamma+(c, eps^s) ^ Gamma-(e_s, omega))``."""
    frame = _active(G, frame)
    p = tuple(float(x) for x in p)
    omega_cw = CurvatureFamily(G, frame).Omega(c, omega, p)
    d_plus = exterior_derivative_1form(gamma_plus_field(G, c, omega, frame), p)
    return omega_cw - (d_plus + _second_product(G, c, omega, p, frame))


def cartan_second_product_residual(G: Connection, c: VectorField, omega: FormField, p, frame: FramePair | None = None) -> KForm:
    """Product term against ``<nabla_{e_k} omega, nabla_{e_m} c> eps^m ^ eps^k``."""
    frame = _active(G, frame)
    p, _, eps = _frame_at(frame, p)
    e = frame.vectors
    n = G.dim
    dc = [G.nabla(e[m], c).at(p) for m in range(n)]
    dw = [G.nabla_form(e[k], omega).at(p) for k in range(n)]
    rhs = _zero2(n)
    for m in range(n):
        for k in range(n):
            if m != k:
                rhs = rhs + pair(dw[k], dc[m]) * wedge(eps[m], eps[k])
    return _second_product(G, c, omega, p, frame) - rhs


def cartan_second_frame_residual(G: Connection, mu: int, nu: int, p, frame: FramePair | None = None) -> KForm:
    """``Omega^nu_mu - (d gamma^nu_mu + gamma^nu_s ^ gamma^s_mu)``."""
    frame = _active(G, frame)
    p = tuple(float(x) for x in p)
    e, eps = frame.vectors, frame.forms
    n = G.dim
    rhs = exterior_derivative_1form(gamma_plus_field(G, e[mu], eps[nu], frame), p)
    for s in range(n):
        rhs = rhs + wedge(gamma_plus(G, e[s], eps[nu], p, frame), gamma_plus(G, e[mu], eps[s], p, frame))
    return CurvatureFamily(G, frame).Omega_frame(mu, nu, p) - rhs


# -- duality -------------------------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    torsion: float
    curvature: float
    samples: int


def duality_adjoint_residuals(G: Connection, samples: Iterable, frame: FramePair | None = None) -> DualityReport:
    """Max of ``|<omega, T_ext(X2)> - <Theta(omega), X2>|`` and the curvature analogue.

    Each sample is ``(p, omega, X2, c)`` with a 1-form ``omega``, a 2-vector
    ``X2`` (both pointwise) and a vector field ``c``.
    """
    tf, cf = TorsionFamily(G, frame), CurvatureFamily(G, frame)
    tors = curv = 0.0
    count = 0
    for p, omega, X2, c in samples:
        tors = max(tors, abs(pair(omega, tf.T_ext(X2, p)) - pair(tf.Theta(omega, p), X2)))
        curv = max(curv, abs(pair(omega, cf.R_ext(X2, c, p)) - pair(cf.Omega(c, omega, p), X2)))
        count += 1
    return DualityReport(tors, curv, count)


def residual_norm(x) -> float:
    """Max-abs magnitude of a residual (KVector, KForm, float or tuple)."""
    if isinstance(x, (KVector, KForm)):
        return x.norm()
    if isinstance(x, (tuple, list)):
        return max_abs(x)
    return abs(float(x))
