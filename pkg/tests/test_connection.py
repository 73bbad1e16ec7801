import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastruct import jet
from parastruct.connection import (
    Connection,
    ElementaryExtensorField,
    VectorOperatorField,
    check_connection_axioms,
    cov_deriv_extensor,
)
from parastruct.errors import DomainError
from parastruct.fields import FormField, VectorField, derivative_along, pairing
from parastruct.sampling import (
    SplitMix64,
    random_form_field,
    random_frame,
    random_operator,
    random_point,
    random_scalar_field,
    random_vector_field,
)

from conftest import D1, E1, E2, PI3

seeds = st.integers(0, 2**32)


def _axiom_samples(chart, rng, count):
    return [
        (random_point(chart, rng), random_scalar_field(2, rng), random_scalar_field(2, rng), *(random_vector_field(2, rng) for _ in range(4)))
        for _ in range(count)
    ]


def test_sphere_nabla_matches_oracle(sphere, sphere_oracle):
    got = sphere.nabla(E2, E2).at((PI3, 0.0)).components
    assert got.tolist() == pytest.approx(sphere_oracle["nabla_eph_eph_at_pi_over_3"], abs=1e-10)
    assert got[0] == pytest.approx(-math.sqrt(3) / 4, abs=1e-10)


def test_coordinate_fast_path_equals_frame_path(sphere, sphere_chart):
    rng = SplitMix64(3)
    other = sphere.reexpress(random_frame(2, rng))
    for _ in range(5):
        p = random_point(sphere_chart, rng)
        a, v, w = random_vector_field(2, rng), random_vector_field(2, rng), random_form_field(2, rng)
        assert (other.nabla(a, v).at(p) - sphere.nabla(a, v).at(p)).norm() <= 1e-11
        assert (other.nabla_form(a, w).at(p) - sphere.nabla_form(a, w).at(p)).norm() <= 1e-11


def test_relative_connection_in_coordinates(f3):
    # nabla b2 = 0 with b2 = x1 d2 forces nabla_{d1} d2 = -d2 / x1
    assert f3.nabla(E1, E2).at((2.0, 0.3)).components.tolist() == pytest.approx([0.0, -0.5], abs=1e-15)
    assert f3.coefficient_array((2.0, 0.3)).max() == 0.0


@pytest.mark.parametrize("which", ["flat", "sphere", "f3"])
def test_axioms_hold(which, request, plane_chart, sphere_chart):
    G = request.getfixturevalue(which)
    chart = sphere_chart if which == "sphere" else plane_chart
    report = check_connection_axioms(G, _axiom_samples(chart, SplitMix64(5), 10))
    assert report.samples == 10
    assert report.worst <= 1e-10


def test_axioms_detect_nonlinear_map(plane_chart):
    def bogus(a, v):
        f = v.fn
        return VectorField(lambda X: (jet.sqrt(f(X)[0] ** 2 + f(X)[1] ** 2 + 1.0), 0.0 * X[0]), 2)

    report = check_connection_axioms(bogus, _axiom_samples(plane_chart, SplitMix64(1), 5))
    assert report.quasi_linearity > 1e-3


def test_nabla_form_leibniz(sphere, sphere_chart):
    rng = SplitMix64(9)
    for _ in range(50):
        p = random_point(sphere_chart, rng)
        a, v, w = random_vector_field(2, rng), random_vector_field(2, rng), random_form_field(2, rng)
        lhs = derivative_along(a, pairing(w, v), p)
        rhs = pairing(sphere.nabla_form(a, w), v).at(p) + pairing(w, sphere.nabla(a, v)).at(p)
        assert lhs == pytest.approx(rhs, abs=1e-11)


def test_operator_inverse_and_adjoint(plane_chart):
    rng = SplitMix64(2)
    L = random_operator(2, rng)
    v, w = random_vector_field(2, rng), random_form_field(2, rng)
    p = (1.2, 0.4)
    assert (L.inverse()(L(v)).at(p) - v.at(p)).norm() <= 1e-13
    assert pairing(L.adjoint(w), v).at(p) == pytest.approx(pairing(w, L(v)).at(p), abs=1e-13)
    ident = L.compose(L.inverse()).matrix(p)
    assert abs(ident - [[1, 0], [0, 1]]).max() <= 1e-13
    M = VectorOperatorField.from_matrix(plane_chart, [["1", "0"], ["0", "x1"]])
    assert M(E2).at(p).components.tolist() == [0.0, 1.2]


def test_extensor_arity_and_type_checks():
    ident = ElementaryExtensorField(1, 0, "vector", lambda v: v)
    with pytest.raises(DomainError):
        ident(E1, E2)
    with pytest.raises(DomainError):
        ident(D1)
    with pytest.raises(DomainError):
        ElementaryExtensorField(1, 0, "scalar", lambda v: v)


def test_derivative_of_identity_extensor_vanishes(sphere):
    ident = ElementaryExtensorField(1, 0, "vector", lambda v: v, "id")
    v = VectorField(lambda X: (jet.sin(X[1]), X[0] * X[1]), 2)
    assert cov_deriv_extensor(sphere, E1 + E2, ident)(v).at((1.0, 0.5)).norm() <= 1e-13


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_extensor_derivative_matches_component_expansion(seed):
    # tau(v, w) = <w, v> u for a fixed u; expand (nabla_a tau) by hand
    rng = SplitMix64(seed)
    G = Connection.from_fields(random_frame(2, rng), {(s, m, k): random_scalar_field(2, rng) for s in range(2) for m in range(2) for k in range(2)})
    u, a, v = (random_vector_field(2, rng) for _ in range(3))
    w = random_form_field(2, rng)
    tau = ElementaryExtensorField(1, 1, "vector", lambda v_, w_: pairing(w_, v_) * u)
    p = (0.4, -0.3)
    got = cov_deriv_extensor(G, a, tau)(v, w).at(p)
    want = pairing(w, v).at(p) * G.nabla(a, u).at(p)
    assert (got - want).norm() <= 1e-10


def test_flat_connection_from_dimension():
    G = Connection.flat(3)
    v = VectorField(lambda X: (X[0] * X[1], X[2], 1.0 + 0.0 * X[0]), 3)
    a = VectorField.constant([1.0, 2.0, 3.0])
    assert G.nabla(a, v).at((1.0, 2.0, 3.0)).components.tolist() == [4.0, 3.0, 0.0]


def test_form_derivative_sign(sphere):
    # (nabla_{e_ph} d_th)(e_ph) = -G^th_{ph ph} = sin cos
    val = sphere.nabla_form(E2, D1).at((PI3, 0.0)).components[1]
    assert val == pytest.approx(math.sin(PI3) * math.cos(PI3), abs=1e-14)


def test_from_exprs_coordinate_default(plane_chart):
    G = Connection.from_exprs(plane_chart, {(1, 0, 1): "1/x1"})
    assert G.frame.is_coordinate
    assert G.coefficient(1, 0, 1).at((4.0, 0.0)) == 0.25
    assert isinstance(G.nabla_form(E1, D1), FormField)
