"""Configuration files: loading, validation and the fixture catalog.

A configuration describes one parallelism structure and how to verify it::

    name = "sphere_lc"
    description = "unit sphere, Levi-Civita connection"
    expected_asymmetric = false        # optional

    [chart]
    coords = ["th", "ph"]
    domain = [[0.3, 2.8], [-3.0, 3.0]]

    [frame]                            # optional; rows are b_1, ..., b_n
    vectors = [["1", "0"], ["0", "sin(th)"]]

    [connection]                       # coefficients refer to [frame] if given
    relative = false                   # true: the frame's relative connection
    "G^1_22" = "-sin(th)*cos(th)"      # G^s_mn, 1-based; omitted entries are 0

    [deformation]                      # optional; (lambda v)^i = M[i][j] v^j
    matrix = [["1", "0"], ["0", "th"]]

    [jacobian]                         # optional second frame and overlap box
    target = [["1", "0"], ["0", "2"]]
    overlap = [[0.5, 1.0], [0.0, 1.0]]

    [run]
    suites = ["all"]
    samples = 20
    seed = 0

    [tolerances]
    bianchi = 1e-8
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import expr as _expr
from .connection import Connection, VectorOperatorField
from .fields import Chart, FramePair
from .tomlsubset import Document, Located, TomlError, loads

__all__ = [
    "ConfigError",
    "SpecConfig",
    "SUITES",
    "DEFAULT_TOLERANCES",
    "load_config",
    "parse_config",
    "catalog_names",
    "catalog_path",
    "resolve_config",
]

#: Suites in execution order.
SUITES = (
    "axioms",
    "cartan1",
    "cartan2",
    "duality",
    "complement",
    "inversion",
    "symmetry",
    "cyclic",
    "bianchi",
    "deformation",
    "relative",
    "split",
    "jacobian",
)

#: First-order identities 1e-10, structure equations 1e-9, curvature identities 1e-8.
DEFAULT_TOLERANCES = {name: 1e-10 for name in SUITES}
DEFAULT_TOLERANCES.update({"cartan1": 1e-9, "cartan2": 1e-9, "cyclic": 1e-8, "bianchi": 1e-8})

DEFAULT_SAMPLES = 20


class ConfigError(TomlError):
    """Invalid configuration; carries ``path:line:col``."""


@dataclass
class SpecConfig:
    name: str
    description: str
    chart: Chart
    connection: Connection
    frame: FramePair | None = None
    frame_rows: list | None = None
    coefficients: dict = field(default_factory=dict)
    relative: bool = False
    deformation: VectorOperatorField | None = None
    deformation_rows: list | None = None
    jacobian_target: FramePair | None = None
    overlap: tuple | None = None
    suites: tuple = SUITES
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    expected_asymmetric: bool = False
    path: str | None = None

    @property
    def dim(self) -> int:
        return self.chart.dim


_COEFF_KEY = re.compile(r"G\^(\d+)_(\d+)(?:,(\d+))?$")

_ALLOWED = {
    None: {"name", "description", "expected_asymmetric"},
    "chart": {"coords", "domain"},
    "frame": {"vectors"},
    "connection": {"relative"},
    "deformation": {"matrix"},
    "jacobian": {"target", "overlap"},
    "run": {"suites", "samples", "seed"},
    "tolerances": set(SUITES),
}


class _Validator:
    def __init__(self, doc: Document, path: str | None):
        self.doc = doc
        self.path = path

    def fail(self, message: str, where) -> None:
        line, col = (where.line, where.col) if isinstance(where, Located) else where
        raise ConfigError(message, line, col, self.path)

    def table_pos(self, name):
        return self.doc.table_pos.get(name, (1, 1))

    def get(self, table, key, required=False) -> Located | None:
        src = self.doc.root if table is None else self.doc.tables.get(table, {})
        if key not in src and required:
            where = f"table [{table}]" if table else "top level"
            self.fail(f"missing required key {key!r} in {where}", self.table_pos(table))
        return src.get(key)

    # -- typed accessors --

    def string(self, loc: Located, what: str) -> str:
        if not isinstance(loc.value, str):
            self.fail(f"{what} must be a string", loc)
        return loc.value

    def boolean(self, loc: Located, what: str) -> bool:
        if not isinstance(loc.value, bool):
            self.fail(f"{what} must be true or false", loc)
        return loc.value

    def integer(self, loc: Located, what: str) -> int:
        if isinstance(loc.value, bool) or not isinstance(loc.value, int):
            self.fail(f"{what} must be an integer", loc)
        return loc.value

    def number(self, loc: Located, what: str) -> float:
        if isinstance(loc.value, bool) or not isinstance(loc.value, (int, float)):
            self.fail(f"{what} must be a number", loc)
        return float(loc.value)

    def array(self, loc: Located, what: str, length: int | None = None) -> list:
        if not isinstance(loc.value, list):
            self.fail(f"{what} must be an array", loc)
        if length is not None and len(loc.value) != length:
            self.fail(f"{what} must have {length} entries, found {len(loc.value)}", loc)
        return loc.value

    def expression(self, loc: Located, chart: Chart, what: str):
        src = self.string(loc, what)
        try:
            tree = _expr.parse(src)
        except _expr.ExprError as exc:
            self._expr_fail(exc, loc, what)
        for var in _var_nodes(tree):
            if var.name not in chart.coords:
                msg = f"unknown variable {var.name!r} (chart coordinates are {list(chart.coords)})"
                self._expr_fail(_expr.ExprError(msg, var.offset), loc, what)
        return src

    def _expr_fail(self, exc: _expr.ExprError, loc: Located, what: str):
        # column of the offending character: opening quote + 1 + offset when
        # the string has no escapes; otherwise point at the string itself
        col = loc.col + 1 + (exc.offset or 0) if loc.raw else loc.col
        self.fail(f"{what}: {exc.message}", (loc.line, col))

    def matrix(self, loc: Located, chart: Chart, what: str) -> list[list[str]]:
        n = chart.dim
        rows = self.array(loc, what)
        if len(rows) != n:
            self.fail(f"{what} must be {n}x{n} (found {len(rows)} rows)", loc)
        out = []
        for i, row in enumerate(rows):
            entries = self.array(row, f"{what} row {i + 1}")
            if len(entries) != n:
                self.fail(f"{what} must be square: row {i + 1} has {len(entries)} entries, expected {n}", row)
            out.append([self.expression(e, chart, f"{what}[{i + 1}][{j + 1}]") for j, e in enumerate(entries)])
        return out

    def box(self, loc: Located, chart_dim: int | None, what: str) -> tuple:
        rows = self.array(loc, what, chart_dim)
        box = []
        for i, row in enumerate(rows):
            pair = self.array(row, f"{what} interval {i + 1}", 2)
            lo, hi = (self.number(x, f"{what} bound") for x in pair)
            if not lo < hi:
                self.fail(f"{what} interval {i + 1} is empty: [{lo}, {hi}]", row)
            box.append((lo, hi))
        return tuple(box)

    # -- whole document --

    def run(self) -> SpecConfig:
        doc = self.doc
        for tname, table in [(None, doc.root)] + list(doc.tables.items()):
            if tname is not None and tname not in _ALLOWED:
                self.fail(f"unknown table [{tname}]", self.table_pos(tname))
            for key, loc in table.items():
                if tname == "connection" and _COEFF_KEY.match(key):
                    continue
                if key not in _ALLOWED[tname]:
                    where = f"[{tname}]" if tname else "top level"
                    pos = doc.key_pos.get((tname, key), (loc.line, loc.col))
                    hint = " (coefficients are written \"G^s_mn\")" if tname == "connection" else ""
                    self.fail(f"unknown key {key!r} in {where}{hint}", pos)

        name = self.string(self.get(None, "name", True), "name")
        desc_loc = self.get(None, "description")
        description = self.string(desc_loc, "description") if desc_loc else ""
        asym_loc = self.get(None, "expected_asymmetric")
        expected_asym = self.boolean(asym_loc, "expected_asymmetric") if asym_loc else False

        if "chart" not in doc.tables:
            self.fail("missing [chart] table", (1, 1))
        coords_loc = self.get("chart", "coords", True)
        coords = [self.string(c, "coordinate name") for c in self.array(coords_loc, "coords")]
        if not coords:
            self.fail("chart needs at least one coordinate", coords_loc)
        for c_loc, c in zip(coords_loc.value, coords):
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", c) or c in _expr.FUNCTIONS:
                self.fail(f"invalid coordinate name {c!r}", c_loc)
        if len(set(coords)) != len(coords):
            self.fail("duplicate coordinate names", coords_loc)
        domain = self.box(self.get("chart", "domain", True), len(coords), "domain")
        chart = Chart.box(coords, domain)
        n = chart.dim

        frame = frame_rows = None
        if "frame" in doc.tables:
            frame_rows = self.matrix(self.get("frame", "vectors", True), chart, "frame vectors")
            frame = FramePair.from_matrix(chart, frame_rows)

        relative = False
        coeffs: dict[tuple[int, int, int], str] = {}
        conn = doc.tables.get("connection", {})
        rel_loc = conn.get("relative")
        if rel_loc is not None:
            relative = self.boolean(rel_loc, "relative")
        for key, loc in conn.items():
            m = _COEFF_KEY.match(key)
            if not m:
                continue
            pos = doc.key_pos.get(("connection", key), (loc.line, loc.col))
            s, rest, extra = m.groups()
            if extra is None:
                if len(rest) != 2:
                    self.fail(f"coefficient key {key!r}: write lower indices as two digits or 'm,n'", pos)
                idx = (int(s), int(rest[0]), int(rest[1]))
            else:
                idx = (int(s), int(rest), int(extra))
            if any(not 1 <= i <= n for i in idx):
                self.fail(f"coefficient {key!r}: index out of range 1..{n}", pos)
            key0 = tuple(i - 1 for i in idx)
            if key0 in coeffs:
                self.fail(f"coefficient {key!r} given twice", pos)
            coeffs[key0] = self.expression(loc, chart, key)
        if relative and coeffs:
            self.fail("relative = true cannot be combined with explicit coefficients", rel_loc)
        if relative and frame is None:
            self.fail("relative = true needs a [frame] table", rel_loc)

        base = frame if frame is not None else FramePair.coordinate(n)
        if relative:
            connection = Connection.flat(base, f"relative({name})")
        else:
            connection = Connection.from_exprs(chart, coeffs, base, name)

        deformation = deformation_rows = None
        if "deformation" in doc.tables:
            deformation_rows = self.matrix(self.get("deformation", "matrix", True), chart, "deformation matrix")
            deformation = VectorOperatorField.from_matrix(chart, deformation_rows)

        target = overlap = None
        if "jacobian" in doc.tables:
            t_loc = self.get("jacobian", "target")
            if t_loc is not None:
                target = FramePair.from_matrix(chart, self.matrix(t_loc, chart, "jacobian target"))
            o_loc = self.get("jacobian", "overlap")
            if o_loc is not None:
                overlap = self.box(o_loc, n, "overlap")
                for (lo, hi), (clo, chi) in zip(overlap, domain):
                    if lo < clo or hi > chi:
                        self.fail("overlap box must lie inside the chart domain", o_loc)

        suites: tuple = SUITES
        samples, seed = DEFAULT_SAMPLES, 0
        s_loc = self.get("run", "suites")
        if s_loc is not None:
            suites = self.suite_list([self.string(x, "suite name") for x in self.array(s_loc, "suites")], s_loc)
        n_loc = self.get("run", "samples")
        if n_loc is not None:
            samples = self.integer(n_loc, "samples")
            if samples < 1:
                self.fail("samples must be positive", n_loc)
        seed_loc = self.get("run", "seed")
        if seed_loc is not None:
            seed = self.integer(seed_loc, "seed")
            if seed < 0:
                self.fail("seed must be non-negative", seed_loc)

        tolerances = dict(DEFAULT_TOLERANCES)
        for key, loc in doc.tables.get("tolerances", {}).items():
            tol = self.number(loc, f"tolerance {key}")
            if not tol > 0:
                self.fail(f"tolerance {key} must be positive", loc)
            tolerances[key] = tol

        return SpecConfig(
            name=name,
            description=description,
            chart=chart,
            connection=connection,
            frame=frame,
            frame_rows=frame_rows,
            coefficients=coeffs,
            relative=relative,
            deformation=deformation,
            deformation_rows=deformation_rows,
            jacobian_target=target,
            overlap=overlap,
            suites=suites,
            samples=samples,
            seed=seed,
            tolerances=tolerances,
            expected_asymmetric=expected_asym,
            path=self.path,
        )

    def suite_list(self, names, loc) -> tuple:
        if names == ["all"]:
            return SUITES
        for s in names:
            if s not in SUITES:
                self.fail(f"unknown suite {s!r}", loc)
        return tuple(s for s in SUITES if s in names)


def _var_nodes(e):
    """Variable nodes of an expression tree in source order."""
    if isinstance(e, _expr.Var):
        yield e
    elif isinstance(e, _expr.Neg):
        yield from _var_nodes(e.operand)
    elif isinstance(e, _expr.BinOp):
        yield from _var_nodes(e.left)
        yield from _var_nodes(e.right)
    elif isinstance(e, _expr.Call):
        for a in e.args:
            yield from _var_nodes(a)


def parse_config(text: str, path: str | None = None) -> SpecConfig:
    """Validate configuration source text."""
    return _Validator(loads(text, path), path).run()


def load_config(path) -> SpecConfig:
    """Read and validate a configuration file (or a catalog name)."""
    p = resolve_config(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc.strerror or exc}", 1, 1, str(path)) from None
    return parse_config(text, str(path))


# -- catalog -------------------------------------------------------------


def _fixture_dir():
    return resources.files("parastruct") / "fixtures"


def catalog_names() -> list[str]:
    return sorted(p.name[: -len(".toml")] for p in _fixture_dir().iterdir() if p.name.endswith(".toml"))


def catalog_path(name: str):
    stem = name[: -len(".toml")] if name.endswith(".toml") else name
    p = _fixture_dir() / f"{stem}.toml"
    if not p.is_file():
        raise KeyError(name)
    return p


def resolve_config(path) -> Path:
    """An existing file path, else a shipped fixture of that name."""
    p = Path(path)
    if p.exists():
        return p
    try:
        return Path(str(catalog_path(p.name)))
    except KeyError:
        return p
