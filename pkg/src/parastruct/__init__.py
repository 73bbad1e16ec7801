"""Numerical verification kernel for parallelism structures on a coordinate chart.

Connections are given by frame-relative coefficient fields; covariant
derivatives, Cartan connections, torsion and curvature are evaluated exactly
(up to rounding) with nested forward-mode jets, and every identity between
them is exposed as a residual that the ``parastruct verify`` command samples.
"""

__version__ = "0.1.0"

from .cartan import (  # noqa: E402
    CurvatureFamily,
    TorsionFamily,
    cartan_first_residual,
    cartan_second_residual,
    connection_forms,
    covariant_curl,
    curvature_family,
    duality_adjoint_residuals,
    gamma_minus,
    gamma_plus,
    torsion_family,
)
from .config import SpecConfig, load_config  # noqa: E402
from .connection import (  # noqa: E402
    Connection,
    ElementaryExtensorField,
    VectorOperatorField,
    check_connection_axioms,
    cov_deriv_extensor,
    cov_deriv_form,
    cov_deriv_vector,
)
from .errors import DomainError, FieldEvaluationError, ParastructError, SingularFrameError  # noqa: E402
from .exterior import KForm, KVector, basis_kform, basis_kvector, pair, wedge  # noqa: E402
from .fields import Chart, FormField, FramePair, ScalarField, VectorField, lie_bracket  # noqa: E402
from .jet import BACKEND  # noqa: E402
from .quantities import evaluate_quantity  # noqa: E402
from .structures import (  # noqa: E402
    bianchi_residual,
    cyclic_residual,
    deform,
    is_symmetric,
    jacobian,
    relative_connection,
    split,
)
from .suites import Report, run_suites  # noqa: E402

__all__ = [
    "BACKEND",
    "Chart",
    "Connection",
    "CurvatureFamily",
    "DomainError",
    "ElementaryExtensorField",
    "FieldEvaluationError",
    "FormField",
    "FramePair",
    "KForm",
    "KVector",
    "ParastructError",
    "Report",
    "ScalarField",
    "SingularFrameError",
    "SpecConfig",
    "TorsionFamily",
    "VectorField",
    "VectorOperatorField",
    "basis_kform",
    "basis_kvector",
    "bianchi_residual",
    "cartan_first_residual",
    "cartan_second_residual",
    "check_connection_axioms",
    "connection_forms",
    "cov_deriv_extensor",
    "cov_deriv_form",
    "cov_deriv_vector",
    "covariant_curl",
    "curvature_family",
    "cyclic_residual",
    "deform",
    "duality_adjoint_residuals",
    "evaluate_quantity",
    "gamma_minus",
    "gamma_plus",
    "is_symmetric",
    "jacobian",
    "lie_bracket",
    "load_config",
    "pair",
    "relative_connection",
    "run_suites",
    "split",
    "torsion_family",
    "wedge",
]
