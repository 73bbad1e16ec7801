import json
import math
from pathlib import Path

import pytest

from parastruct.connection import Connection
from parastruct.fields import Chart, FormField, FramePair, VectorField

DATA = Path(__file__).parent / "data"

SPHERE_COEFFS = {(0, 1, 1): "-sin(th)*cos(th)", (1, 0, 1): "cos(th)/sin(th)", (1, 1, 0): "cos(th)/sin(th)"}


@pytest.fixture(scope="session")
def sphere_oracle():
    return json.loads((DATA / "sphere_oracle.json").read_text())


@pytest.fixture
def plane_chart():
    return Chart.box(["x1", "x2"], [(0.5, 3.0), (-2.0, 2.0)])


@pytest.fixture
def sphere_chart():
    return Chart.box(["th", "ph"], [(0.3, 2.8), (-3.0, 3.0)])


@pytest.fixture
def flat(plane_chart):
    return Connection.flat(2)


@pytest.fixture
def sphere(sphere_chart):
    return Connection.from_exprs(sphere_chart, SPHERE_COEFFS, label="sphere")


@pytest.fixture
def f3_frame(plane_chart):
    return FramePair.from_matrix(plane_chart, [["1", "0"], ["0", "x1"]])


@pytest.fixture
def f3(f3_frame):
    return Connection.flat(f3_frame, "F3")


E1, E2 = VectorField.basis(0, 2), VectorField.basis(1, 2)
D1, D2 = FormField.basis(0, 2), FormField.basis(1, 2)
PI3 = math.pi / 3
