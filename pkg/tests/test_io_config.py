import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cylspec import config, essential, io, profiles, sturm1d
from cylspec.cylinder import assemble_cylinder
from cylspec.errors import ConfigError

FINITE = st.floats(-1e6, 1e6)


@given(arrays(np.float64, (3, 4), elements=FINITE), st.booleans())
def test_potential_roundtrip(tmp_path_factory, values, zero_dim):
    z = profiles.axial_grid(2.0, 4)
    if zero_dim:
        V = profiles.CylinderPotential(None, z, values[:1], values[0, :1], values[1, :1])
    else:
        V = profiles.CylinderPotential(np.arange(3.0), z, values, values[:, 0], values[:, 1], "periodic")
    path = tmp_path_factory.mktemp("pot") / "V.json"
    io.write_potential(path, V)
    W = io.read_potential(path)
    assert W.zero_dim == V.zero_dim and W.bc_x == V.bc_x
    for name in ("values", "v_plus", "v_minus", "z_grid"):
        assert np.array_equal(getattr(W, name), getattr(V, name))


def test_read_potential_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"x_grid": null}')
    with pytest.raises(ConfigError):
        io.read_potential(bad)
    with pytest.raises(ConfigError):
        io.read_potential(tmp_path / "missing.json")


def test_json_cleaning_is_deterministic():
    doc = {"b": np.float64(1.5), "a": [np.int64(2), np.bool_(True)], "c": 1 + 2j,
           "d": np.array([np.inf, 0.0])}
    text = io.dumps(doc)
    assert text == io.dumps(dict(reversed(list(doc.items()))))
    assert io.json.loads(text) == {"a": [2, True], "b": 1.5, "c": {"re": 1.0, "im": 2.0},
                                   "d": [None, 0.0]}


@given(st.lists(st.tuples(FINITE, FINITE), min_size=1, max_size=20))
def test_csv_roundtrip_is_exact(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    io.write_csv(path, ["a", "b"], rows)
    header, back = io.read_csv(path)
    assert header == ["a", "b"]
    assert [(float(a), float(b)) for a, b in back] == [(float(a), float(b)) for a, b in rows]


def test_grid_vector_layout(tmp_path):
    x = profiles.interior_grid(1.0, 3, "dirichlet")
    z = profiles.axial_grid(1.0, 4)
    op = assemble_cylinder(profiles.CylinderPotential(x, z, np.zeros((3, 4)), np.zeros(3), np.zeros(3)), 0.0)
    io.write_grid_vector(tmp_path / "u.csv", op, x, z, np.arange(12.0))
    _, rows = io.read_csv(tmp_path / "u.csv")
    # x outermost, z inner; value at (x_i, z_j) is index j*n_x + i
    assert [float(r[2]) for r in rows[:4]] == [0.0, 3.0, 6.0, 9.0]
    assert float(rows[4][0]) == pytest.approx(x[1])


def test_svg_has_one_path_per_branch(tmp_path):
    sp_ = sturm1d.solve_sturm(sturm1d.assemble_sturm(np.zeros(9), np.pi))
    d = essential.dispersion_curves(sp_, sp_, 1.0, n_samples=21)
    io.write_dispersion_svg(tmp_path / "e.svg", d, [0.1 + 0.2j, -1.0])
    text = (tmp_path / "e.svg").read_text()
    assert text.count('<path class="branch"') == len(d.branches)
    assert text.count("<circle") == 2
    io.write_curves(tmp_path / "c.csv", d)
    _, rows = io.read_csv(tmp_path / "c.csv")
    assert len(rows) == 21 * len(d.branches)


def test_config_defaults():
    cfg = config.load_config()
    assert cfg.kind == "cylinder" and cfg.seed == 0
    assert cfg["wave"]["L"] == pytest.approx(4.5 * math.pi)
    assert cfg.formats() == ("csv", "json", "svg")


def test_config_from_toml_with_overrides(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('seed = 7\n[problem]\nkind = "allen-cahn"\n[nonlinearity]\na = 0.25\n')
    cfg = config.load_config(p, {"grid.h": 0.025})
    assert cfg.kind == "allen-cahn" and cfg.seed == 7
    assert cfg["problem"]["c"] is None and cfg["grid"]["h"] == 0.025


@pytest.mark.parametrize("doc", [
    {"unknown": 1},
    {"grid": {"n_x": 2}},
    {"grid": {"n_z": 10.5}},
    {"grid": 3},
    {"seed": -1},
    {"seed": 2 ** 64},
    {"nonlinearity": {"a": 1.2}},
    {"problem": {"kind": "allen-cahn"}, "nonlinearity": {"a": 0.7}},
    {"problem": {"kind": "allen-cahn", "c": 1.0}, "nonlinearity": {"a": 0.25}},
    {"problem": {"kind": "other"}},
    {"potential": {"source": "file"}},
    {"solver": {"shift": "big"}},
    {"output": {"formats": ["png"]}},
    {"hypotheses": {"window": 0.6}},
    {"wave": {"L": float("nan")}},
])
def test_config_rejects(doc):
    with pytest.raises(ConfigError):
        config.from_dict(doc)


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        config.load_config(tmp_path / "nope.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[grid\n")
    with pytest.raises(ConfigError):
        config.load_config(bad)
