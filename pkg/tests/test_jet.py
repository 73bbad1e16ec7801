import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastruct import _jetkernel_py, jet
from parastruct.jet import Jet, TowerDomainError, lift, split

try:
    from parastruct import _jetkernel
except ImportError:  # pragma: no cover
    _jetkernel = None

BACKENDS = [_jetkernel_py] + ([_jetkernel] if _jetkernel is not None else [])


def _rand(rng, d, n):
    return rng.normal(size=(n + 1) ** d)


@pytest.mark.parametrize("da,db", [(1, 1), (2, 2), (3, 3), (1, 3), (3, 1), (0, 2)])
def test_backends_agree_on_mul(da, db):
    rng = np.random.default_rng(0)
    n = 2
    a, b = _rand(rng, da, n), _rand(rng, db, n)
    ref = _jetkernel_py.mul(a, da, b, db, n)
    for k in BACKENDS:
        np.testing.assert_allclose(k.mul(a, da, b, db, n), ref, rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_backends_agree_on_compose(d):
    rng = np.random.default_rng(1)
    n = 3
    x = _rand(rng, d, n)
    taylor = rng.normal(size=d + 1)
    ref = _jetkernel_py.compose(x, d, taylor, n)
    for k in BACKENDS:
        np.testing.assert_allclose(k.compose(x, d, taylor, n), ref, rtol=1e-13, atol=1e-13)


def test_compiled_backend_is_selected():
    assert jet.BACKEND in ("compiled", "python")
    if _jetkernel is not None:
        assert jet.BACKEND == "compiled"


def test_first_derivatives_of_product():
    x, y = lift((2.0, 3.0))
    f = x * x * y + jet.sin(y)
    v, parts = split(f, 1, 2)
    assert v == pytest.approx(12 + math.sin(3))
    assert parts[0] == pytest.approx(12)
    assert parts[1] == pytest.approx(4 + math.cos(3))


def test_nested_third_mixed_partial():
    # d^3/dx dy dy of sin(x) y^3 = 6 y cos(x)
    X = lift(lift(lift((0.7, 1.3))))
    f = jet.sin(X[0]) * X[1] ** 3
    _, p1 = split(f, 3, 2)
    _, p2 = split(p1[1], 2, 2)
    _, p3 = split(p2[1], 1, 2)
    assert p3[0] == pytest.approx(6 * 1.3 * math.cos(0.7), rel=1e-13)


def _central_diff(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.mark.parametrize(
    "name,fn,ref,x0",
    [
        ("sin", jet.sin, math.sin, 0.4),
        ("cos", jet.cos, math.cos, 1.1),
        ("tan", jet.tan, math.tan, 0.3),
        ("exp", jet.exp, math.exp, -0.5),
        ("log", jet.log, math.log, 1.7),
        ("sqrt", jet.sqrt, math.sqrt, 2.5),
    ],
)
def test_elementary_second_derivatives_match_finite_differences(name, fn, ref, x0):
    X = lift(lift((x0,)))
    _, p = split(fn(X[0]), 2, 1)
    v1, p2 = split(p[0], 1, 1)
    assert v1 == pytest.approx(_central_diff(ref, x0), rel=1e-8)
    d1 = lambda t: _central_diff(ref, t)  # noqa: E731
    assert p2[0] == pytest.approx(_central_diff(d1, x0, 1e-4), rel=1e-5, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.2, 3.0),
    st.floats(-2.0, 2.0),
    st.integers(-3, 4),
)
def test_power_rule_and_quotient(x0, y0, k):
    x, y = lift((x0, y0))
    f = x**k / (1.0 + y * y)
    v, parts = split(f, 1, 2)
    assert v == pytest.approx(x0**k / (1 + y0 * y0))
    assert parts[0] == pytest.approx(k * x0 ** (k - 1) / (1 + y0 * y0), rel=1e-12, abs=1e-12)
    assert parts[1] == pytest.approx(-(x0**k) * 2 * y0 / (1 + y0 * y0) ** 2, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_ring_laws(a, b, c):
    X = lift(lift((a, b, c)))
    x, y, z = X
    lhs = x * (y + z)
    rhs = x * y + x * z
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)
    np.testing.assert_allclose(((x * y) * z).coeffs, (x * (y * z)).coeffs, atol=1e-12)


def test_domain_errors():
    x = Jet.variable(-1.0, 0, 1)
    with pytest.raises(TowerDomainError):
        jet.log(x)
    with pytest.raises(TowerDomainError):
        jet.sqrt(x)
    with pytest.raises(ZeroDivisionError):
        1.0 / Jet.variable(0.0, 0, 1)
    with pytest.raises(TowerDomainError):
        jet.power(x, 0.5)


def test_split_of_constant_has_zero_partials():
    v, parts = split(3.0, 1, 2)
    assert v == 3.0 and parts == [0.0, 0.0]


def test_python_backend_via_environment():
    env = {**os.environ, "PARASTRUCT_BACKEND": "python"}
    out = subprocess.run(
        [sys.executable, "-c", "import parastruct.jet as j; print(j.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_sinusoid_matches_separate_terms(x0, a, b):
    X = lift(lift((x0, 0.5 * x0)))
    x = X[0] * X[1] + X[0]
    fused = jet.sinusoid(x, a, b)
    separate = a * jet.sin(x) + b * jet.cos(x)
    assert np.allclose(fused.coeffs, separate.coeffs, atol=1e-13)
    assert jet.sinusoid(x0, a, b) == pytest.approx(a * math.sin(x0) + b * math.cos(x0))
