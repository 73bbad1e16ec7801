import pytest

from parastruct.config import DEFAULT_TOLERANCES, ConfigError, catalog_names, load_config, parse_config
from parastruct.tomlsubset import TomlError, loads

HEAD = '''name = "t"

[chart]
coords = ["x1", "x2"]
domain = [[0.5, 3.0], [-2.0, 2.0]]
'''


def test_catalog_lists_fixtures():
    assert catalog_names() == ["flat2d", "relative_weitzenbock", "sphere_lc"]


def test_load_fixture_by_name():
    cfg = load_config("sphere_lc")
    assert cfg.chart.coords == ("th", "ph")
    assert cfg.frame is None
    assert cfg.connection.coefficient(0, 1, 1).at((1.0, 0.0)) == pytest.approx(-0.4546487134128409)
    assert cfg.tolerances == DEFAULT_TOLERANCES


def test_relative_fixture():
    cfg = load_config("relative_weitzenbock")
    assert cfg.expected_asymmetric
    assert cfg.frame is not None
    assert cfg.overlap == ((1.0, 2.5), (-1.0, 1.0))


def test_comma_indices_and_tolerances():
    cfg = parse_config(HEAD + '[connection]\n"G^2_1,2" = "1/x1"\n[tolerances]\ncyclic = 1e-6\n[run]\nsuites = ["cyclic", "axioms"]\n')
    assert cfg.connection.coefficient(1, 0, 1).at((2.0, 0.0)) == 0.5
    assert cfg.tolerances["cyclic"] == 1e-6
    assert cfg.suites == ("axioms", "cyclic")


@pytest.mark.parametrize(
    "tail,line,col,fragment",
    [
        ('[connection]\n"G^1_12" = "x1 ** 2"\n', 7, 17, "G^1_12"),
        ('[connection]\n"G^1_1" = "x1"\n', 7, 1, "two digits"),
        ('[connection]\n"G^1_12" = "x1"\n"G^1_1,2" = "x2"\n', 8, 1, "given twice"),
        ('[connection]\nrelative = true\n"G^1_12" = "x1"\n', 7, 12, "cannot be combined"),
        ("[run]\nsamples = 0\n", 7, 11, "positive"),
        ('[run]\nsuites = ["nope"]\n', 7, 10, "unknown suite"),
        ("[tolerances]\nbianchi = -1.0\n", 7, 11, "positive"),
        ('[chart]\n', 6, 1, "duplicate table"),
        ("[connection]\nrelative = 1\n", 7, 12, "true or false"),
        ('[jacobian]\ntarget = [["1", "0"], ["0", "1"]]\noverlap = [[0.0, 1.0], [0.0, 1.0]]\n', 8, 11, "inside the chart"),
    ],
)
def test_positioned_config_errors(tail, line, col, fragment):
    with pytest.raises(TomlError) as info:
        parse_config(HEAD + tail, "cfg.toml")
    err = info.value
    assert (err.line, err.col) == (line, col)
    assert fragment in err.message
    assert str(err).startswith(f"cfg.toml:{line}:{col}: ")


def test_missing_chart():
    with pytest.raises(ConfigError, match="missing \\[chart\\]"):
        parse_config('name = "t"\n')


def test_unknown_key_is_reported():
    with pytest.raises(ConfigError, match="unknown key 'domian'"):
        parse_config('name = "t"\n[chart]\ncoords = ["x"]\ndomian = [[0, 1]]\n')


def test_escaped_string_error_points_at_string():
    with pytest.raises(ConfigError) as info:
        parse_config(HEAD + '[connection]\n"G^1_12" = "\\t@"\n')
    assert info.value.col == 12


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/config.toml")


def test_toml_values_and_positions():
    doc = loads("a = 1\nb = -2.5e1  # note\n[t]\n'q k' = [\n  'lit\\\\',\n  \"x\\n\",\n]\nflag = true\n")
    assert doc.root["a"].value == 1
    assert doc.root["b"].value == -25.0
    arr = doc.tables["t"]["q k"]
    assert arr.plain() == ["lit\\\\", "x\n"]
    assert (arr.value[1].line, arr.value[1].col) == (6, 3)
    assert doc.tables["t"]["flag"].value is True
    assert doc.key_pos[("t", "flag")] == (8, 1)


@pytest.mark.parametrize(
    "src,line,col",
    [
        ("a = 1\na = 2\n", 2, 1),
        ("a = \n", 1, 5),
        ('a = "open\n', 1, 5),
        ("[[t]]\n", 1, 2),
        ("a = 1 b\n", 1, 7),
        ("a = [1 2]\n", 1, 8),
        ("= 1\n", 1, 1),
        ('a = "\\q"\n', 1, 6),
    ],
)
def test_toml_syntax_errors(src, line, col):
    with pytest.raises(TomlError) as info:
        loads(src)
    assert (info.value.line, info.value.col) == (line, col)
