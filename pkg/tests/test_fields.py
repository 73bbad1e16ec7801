import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastruct import jet
from parastruct.errors import DomainError
from parastruct.fields import (
    Chart,
    FormField,
    FramePair,
    ScalarField,
    VectorField,
    directional_derivative,
    dual_frame,
    exterior_derivative_1form,
    exterior_derivative_1form_in_frame,
    lie_bracket,
    pairing,
    scalar_differential,
    structure_coefficients,
)
from parastruct.sampling import (
    SplitMix64,
    random_form_field,
    random_frame,
    random_point,
    random_scalar_field,
    random_vector_field,
)

from conftest import D1, E1, E2

seeds = st.integers(0, 2**32)


def test_chart_point_checks_domain(plane_chart):
    assert plane_chart.point([1.0, 0.0]) == (1.0, 0.0)
    with pytest.raises(DomainError):
        plane_chart.point([0.1, 0.0])
    with pytest.raises(DomainError):
        plane_chart.point([1.0])


def test_lie_bracket_spot(plane_chart):
    b = VectorField.from_exprs(plane_chart, ["0", "x1"])
    assert lie_bracket(E1, b).at((2.0, 0.3)).components.tolist() == [0.0, 1.0]


def test_exterior_derivative_spot(plane_chart):
    omega = FormField.from_exprs(plane_chart, ["0", "1/x1"])
    assert exterior_derivative_1form(omega, (2.0, 0.0))[1, 2] == pytest.approx(-0.25, abs=1e-15)


def test_scalar_differential_matches_directional_derivative(plane_chart):
    f = ScalarField.from_expr(plane_chart, "x1^2 * sin(x2)")
    p = (1.5, 0.7)
    df = scalar_differential(f, p)
    assert df.components.tolist() == pytest.approx([2 * 1.5 * math.sin(0.7), 1.5**2 * math.cos(0.7)], abs=1e-14)
    assert directional_derivative(E2, f, p) == pytest.approx(df.components[1], abs=1e-15)


def test_structure_coefficients_of_f3_frame(f3_frame):
    c = structure_coefficients(f3_frame, (2.0, 0.0))
    # [b1, b2] = d2 = b2 / x1
    assert c[1, 0, 1] == pytest.approx(0.5, abs=1e-15)
    assert c[1, 1, 0] == pytest.approx(-0.5, abs=1e-15)
    assert abs(c[0]).max() == 0.0


def test_frame_duality(f3_frame):
    assert f3_frame.duality_residual((1.3, 0.2)) <= 1e-15
    assert pairing(f3_frame.beta(1), f3_frame.b(1)).at((2.7, -1.0)) == pytest.approx(1.0, abs=1e-15)


def test_singular_frame_rejected(plane_chart):
    frame = FramePair.from_matrix(plane_chart, [["1", "0"], ["0", "x1 - 1"]])
    with pytest.raises(DomainError):
        frame.check_invertible([(1.0, 0.0)])


def test_from_exprs_wrong_length(plane_chart):
    with pytest.raises(DomainError):
        VectorField.from_exprs(plane_chart, ["1"])


def test_mixing_vector_and_form_fields_is_an_error():
    with pytest.raises(TypeError):
        E1 + D1


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_lie_bracket_antisymmetry_and_jacobi(seed):
    rng = SplitMix64(seed)
    a, b, c = (random_vector_field(2, rng) for _ in range(3))
    p = random_point(Chart.box(["x", "y"], [(-1, 1), (-1, 1)]), rng)
    assert (lie_bracket(a, b).at(p) + lie_bracket(b, a).at(p)).norm() <= 1e-12
    jac = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) + lie_bracket(c, lie_bracket(a, b))
    assert jac.at(p).norm() <= 1e-9


def _gradient(f):
    def fn(X):
        Y = jet.lift(X, 2)
        return tuple(jet.split(f(Y), Y[0].depth, 2)[1])

    return FormField(fn, 2)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_d_of_exact_form_vanishes(seed):
    rng = SplitMix64(seed)
    f = random_scalar_field(2, rng)
    assert exterior_derivative_1form(_gradient(f), (0.3, -0.4)).norm() <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_random_frame_is_dual(seed):
    frame = random_frame(3, SplitMix64(seed))
    assert frame.duality_residual((0.2, -0.5, 1.1)) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_frame_formula_for_d_matches_coordinates(seed):
    rng = SplitMix64(seed)
    omega, frame = random_form_field(2, rng), random_frame(2, rng)
    p = (rng.uniform(-1, 1), rng.uniform(-1, 1))
    diff = exterior_derivative_1form_in_frame(omega, frame, p) - exterior_derivative_1form(omega, p)
    assert diff.norm() <= 1e-10


def test_frame_formula_for_d_in_three_dimensions():
    rng = SplitMix64(31)
    for _ in range(5):
        omega, frame = random_form_field(3, rng), random_frame(3, rng)
        p = tuple(rng.uniform(-1, 1) for _ in range(3))
        assert (exterior_derivative_1form_in_frame(omega, frame, p) - exterior_derivative_1form(omega, p)).norm() <= 1e-10


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_derivation_leibniz_rule(seed):
    rng = SplitMix64(seed)
    a, f, g = random_vector_field(2, rng), random_scalar_field(2, rng), random_scalar_field(2, rng)
    p = (rng.uniform(-1, 1), rng.uniform(-1, 1))
    fg = ScalarField(lambda X: f(X) * g(X), 2)
    lhs = directional_derivative(a, fg, p)
    rhs = directional_derivative(a, f, p) * g.at(p) + f.at(p) * directional_derivative(a, g, p)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_dual_frame_duality_at_random_points():
    rng = SplitMix64(77)
    b = [random_vector_field(2, rng) for _ in range(2)]
    # diagonally dominant, so invertible everywhere on the box
    b = [VectorField(lambda X, v=v, i=i: tuple(v(X)[j] * 0.1 + (2.0 if j == i else 0.0) for j in range(2)), 2) for i, v in enumerate(b)]
    beta = dual_frame(b)
    worst = 0.0
    for _ in range(100):
        p = (rng.uniform(-1, 1), rng.uniform(-1, 1))
        for mu in range(2):
            for nu in range(2):
                worst = max(worst, abs(pairing(beta[mu], b[nu]).at(p) - (1.0 if mu == nu else 0.0)))
    assert worst <= 1e-12
