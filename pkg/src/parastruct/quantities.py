"""Pointwise evaluation of named quantities for the ``evaluate`` command."""

from __future__ import annotations

import re

from .cartan import CurvatureFamily, TorsionFamily, covariant_curl, gamma_minus, gamma_plus
from .config import SpecConfig
from .errors import DomainError
from .exterior import KForm, KVector
from .fields import FormField, FramePair, VectorField

__all__ = ["QUANTITIES", "parse_argument", "evaluate_quantity", "format_value"]

#: quantity -> argument kinds ("v" vector field, "f" form field)
QUANTITIES = {
    "nabla_v": "vv",
    "nabla_form": "vf",
    "gamma_plus": "vf",
    "gamma_minus": "vf",
    "torsion": "vv",
    "theta": "f",
    "rho": "vvv",
    "omega": "vf",
    "curl": "f",
}

_FIELD = re.compile(r"(vec|form)\[(.*)\]$", re.S)


def parse_argument(cfg: SpecConfig, token: str):
    """Resolve an argument token to a vector or form field.

    Accepted spellings (``c`` a coordinate name, ``k`` a 1-based index):
    ``e<k>``, ``e_<c>``, ``d<c>``, ``dx<k>``, ``b<k>``, ``beta<k>``,
    ``vec[expr; expr; ...]`` and ``form[expr; expr; ...]``.
    """
    chart = cfg.chart
    n = chart.dim
    coords = chart.coords
    tok = token.strip()
    m = _FIELD.match(tok)
    if m:
        kind, body = m.groups()
        parts = [s.strip() for s in body.split(";")]
        cls = VectorField if kind == "vec" else FormField
        return cls.from_exprs(chart, parts)

    def index(text: str) -> int | None:
        if text.isdigit() and 1 <= int(text) <= n:
            return int(text) - 1
        return None

    frame = cfg.frame if cfg.frame is not None else FramePair.coordinate(n)
    if tok.startswith("beta") and index(tok[4:]) is not None:
        return frame.beta(index(tok[4:]))
    if tok.startswith("b") and index(tok[1:]) is not None:
        return frame.b(index(tok[1:]))
    if tok.startswith("e_") and tok[2:] in coords:
        return VectorField.basis(coords.index(tok[2:]), n)
    if tok.startswith("e") and index(tok[1:]) is not None:
        return VectorField.basis(index(tok[1:]), n)
    if tok.startswith("d") and tok[1:] in coords:
        return FormField.basis(coords.index(tok[1:]), n)
    if tok.startswith("dx") and index(tok[2:]) is not None:
        return FormField.basis(index(tok[2:]), n)
    raise DomainError(f"cannot interpret argument {token!r}")


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.12g}"


def format_value(value, coords) -> str:
    """Render a point value in coordinate components."""
    if isinstance(value, KVector) and value.grade == 1 or isinstance(value, KForm) and value.grade == 1:
        return "(" + ", ".join(_fmt(c) for c in value.components) + ")"
    if isinstance(value, KForm):
        terms = []
        for idx, c in value.items():
            if c != 0.0:
                terms.append(f"{_fmt(c)} " + "^".join(f"d{coords[i - 1]}" for i in idx))
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"
    return _fmt(value)


def evaluate_quantity(cfg: SpecConfig, quantity: str, point, args) -> KVector | KForm:
    """Evaluate ``quantity`` at ``point`` with field arguments given as tokens."""
    if quantity not in QUANTITIES:
        raise DomainError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    kinds = QUANTITIES[quantity]
    if len(args) != len(kinds):
        raise DomainError(f"{quantity} takes {len(kinds)} argument(s), got {len(args)}")
    p = cfg.chart.point(point)
    fields = [parse_argument(cfg, a) for a in args]
    for f, k, tok in zip(fields, kinds, args):
        want = VectorField if k == "v" else FormField
        if not isinstance(f, want):
            raise DomainError(f"argument {tok!r} must be a {'vector' if k == 'v' else 'form'} field")
    G = cfg.connection
    if quantity == "nabla_v":
        return G.nabla(*fields).at(p)
    if quantity == "nabla_form":
        return G.nabla_form(*fields).at(p)
    if quantity == "gamma_plus":
        return gamma_plus(G, *fields, p)
    if quantity == "gamma_minus":
        return gamma_minus(G, *fields, p)
    if quantity == "torsion":
        return TorsionFamily(G).tau(*fields).at(p)
    if quantity == "theta":
        return TorsionFamily(G).Theta(fields[0], p)
    if quantity == "rho":
        return CurvatureFamily(G).rho(*fields).at(p)
    if quantity == "omega":
        return CurvatureFamily(G).Omega(fields[0], fields[1], p)
    return covariant_curl(G, fields[0], p)

