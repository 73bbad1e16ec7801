import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastruct.connection import Connection, VectorOperatorField
from parastruct.errors import DomainError
from parastruct.fields import Chart, FramePair
from parastruct.sampling import (
    SplitMix64,
    random_form_field,
    random_frame,
    random_operator,
    random_point,
    random_scalar_field,
    random_vector_field,
)
from parastruct.structures import (
    Deformation,
    bianchi_residual,
    coefficient_difference,
    compatibility,
    cyclic_residual,
    deform,
    deformed_form_direct,
    deformed_vector_direct,
    is_symmetric,
    jacobian,
    relative_connection,
    split,
)

seeds = st.integers(0, 2**32)
_BOX = Chart.box(("x", "y"), ((-1.0, 1.0), (-1.0, 1.0)))


def _vectors(rng, count, dim=2):
    return [random_vector_field(dim, rng) for _ in range(count)]


def _torsionful_curved(rng, dim=2):
    frame = random_frame(dim, rng)
    r = range(dim)
    coeffs = {(s, m, k): random_scalar_field(dim, rng) for s in r for m in r for k in r}
    return Connection.from_fields(frame, coeffs, "generic")


def test_symmetry_classification(sphere, f3, sphere_chart, plane_chart):
    rng = SplitMix64(1)
    samples = [(random_point(sphere_chart, rng), *_vectors(rng, 2)) for _ in range(5)]
    assert is_symmetric(sphere, samples).symmetric
    samples = [(random_point(plane_chart, rng), *_vectors(rng, 2)) for _ in range(5)]
    result = is_symmetric(f3, samples)
    assert not result.symmetric
    assert result.theta_residual > 0.1


def test_cyclic_and_bianchi_on_sphere(sphere, sphere_chart):
    rng = SplitMix64(2)
    for _ in range(3):
        p = random_point(sphere_chart, rng)
        assert cyclic_residual(sphere, *_vectors(rng, 3), p).norm() <= 1e-8
        assert bianchi_residual(sphere, *_vectors(rng, 4), p).norm() <= 1e-8


def test_cyclic_identity_detects_torsionful_curved_connection():
    rng = SplitMix64(8)
    G = _torsionful_curved(rng, 3)
    worst = max(cyclic_residual(G, *_vectors(rng, 3, 3), (0.2, 0.3, -0.1)).norm() for _ in range(3))
    assert worst > 1e-3


def test_cyclic_sum_is_vacuous_in_two_dimensions():
    # the cyclic sum is totally antisymmetric in (a, b, c), hence zero when n = 2
    rng = SplitMix64(8)
    G = _torsionful_curved(rng)
    assert cyclic_residual(G, *_vectors(rng, 3), (0.2, 0.3)).norm() <= 1e-10


def test_cyclic_sum_vanishes_for_flat_torsionful_connection(f3, plane_chart):
    # relative connections are flat, so the cyclic sum is zero despite torsion
    rng = SplitMix64(3)
    p = random_point(plane_chart, rng)
    assert cyclic_residual(f3, *_vectors(rng, 3), p).norm() <= 1e-10


def test_deformation_bridge(flat, f3, plane_chart):
    lam = VectorOperatorField.from_matrix(plane_chart, [["1", "0"], ["0", "x1"]])
    G = deform(flat, lam)
    rng = SplitMix64(4)
    for _ in range(10):
        assert coefficient_difference(G, f3, random_point(plane_chart, rng)) <= 1e-12


def test_singular_deformation_rejected(plane_chart):
    lam = Deformation(VectorOperatorField.from_matrix(plane_chart, [["1", "0"], ["0", "x1 - 1"]]))
    with pytest.raises(DomainError):
        lam.check([(1.0, 0.0)])


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_deformation_laws(seed):
    rng = SplitMix64(seed)
    G = _torsionful_curved(rng)
    lam, mu = Deformation(random_operator(2, rng)), Deformation(random_operator(2, rng))
    a, v = _vectors(rng, 2)
    omega = random_form_field(2, rng)
    p = (0.5, -0.1)
    Gl = deform(G, lam)
    assert (Gl.nabla(a, v).at(p) - deformed_vector_direct(G, lam, a, v).at(p)).norm() <= 1e-10
    assert (Gl.nabla_form(a, omega).at(p) - deformed_form_direct(G, lam, a, omega).at(p)).norm() <= 1e-10
    assert coefficient_difference(deform(Gl, mu), deform(G, mu.compose(lam)), p) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_relative_structure_identities(seed):
    rng = SplitMix64(seed)
    rel = relative_connection(random_frame(2, rng))
    a, b, c = _vectors(rng, 3)
    p = (-0.3, 0.4)
    assert rel.frame_parallel_residual(a, p) <= 1e-10
    assert rel.torsion_residual(a, b, p) <= 1e-10
    assert rel.theta_residual(random_form_field(2, rng), p) <= 1e-10
    assert rel.curvature_residual(a, b, c, p) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_split_decomposition(seed):
    rng = SplitMix64(seed)
    G = _torsionful_curved(rng)
    sp = split(G, random_frame(2, rng))
    a, v = _vectors(rng, 2)
    p = (0.0, 0.7)
    assert sp.vector_residual(a, v, p) <= 1e-10
    assert sp.form_residual(a, random_form_field(2, rng), p) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_jacobian_identities(seed):
    rng = SplitMix64(seed)
    J = jacobian(random_frame(2, rng), random_frame(2, rng))
    a, v = _vectors(rng, 2)
    p = (0.6, 0.1)
    assert J.frame_map_residual(p) <= 1e-10
    assert J.vector_derivative_residual(a, v, p) <= 1e-10
    assert J.form_derivative_residual(a, random_form_field(2, rng), p) <= 1e-10
    assert J.coframe_residual(p) <= 1e-10
    assert J.deformation_residual(p) <= 1e-10


def test_compatibility(f3_frame, plane_chart):
    doubled = FramePair.from_matrix(plane_chart, [["2", "0"], ["0", "2*x1"]])
    pts = [(1.0, 0.0), (2.5, 1.0)]
    assert compatibility(f3_frame, doubled, pts).compatible
    result = compatibility(f3_frame, FramePair.coordinate(2), pts)
    assert not result.compatible
    assert result.max_difference == pytest.approx(1.0)


def test_split_against_own_relative_connection_has_zero_gamma():
    rng = SplitMix64(52)
    for _ in range(10):
        frame = random_frame(2, rng)
        sp = split(Connection.flat(frame), frame)
        a, v = random_vector_field(2, rng), random_vector_field(2, rng)
        p = random_point(_BOX, rng)
        assert sp.gamma(a, v).at(p).norm() <= 1e-12


def test_jacobian_fields_are_mutually_inverse():
    rng = SplitMix64(53)
    for _ in range(10):
        A, B = random_frame(2, rng), random_frame(2, rng)
        forward, backward = jacobian(A, B).J, jacobian(B, A).J
        v = random_vector_field(2, rng)
        p = random_point(_BOX, rng)
        assert (backward(forward(v)).at(p) - v.at(p)).norm() <= 1e-10
        assert (forward(backward(v)).at(p) - v.at(p)).norm() <= 1e-10
