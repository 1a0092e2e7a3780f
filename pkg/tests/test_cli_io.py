import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import catalog_design
from shellgrowth import catalog
from shellgrowth.cli import main
from shellgrowth.io import (GROWTH_COLUMNS, RunConfig, atomic_write, components_from_rows, csv_text, fmt17, grid_mesh,
                            load_config, obj_text, read_csv)
from shellgrowth.errors import ConfigError
from shellgrowth.surface import jet
from shellgrowth.verify import table_residuals


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(fmt17(x)) == x


def test_atomic_write_leaves_no_temporaries(tmp_path):
    atomic_write(tmp_path / "a" / "b.txt", "one\n")
    atomic_write(tmp_path / "a" / "b.txt", "two\n")
    assert (tmp_path / "a" / "b.txt").read_text() == "two\n"
    assert [p.name for p in (tmp_path / "a").iterdir()] == ["b.txt"]


def test_csv_round_trip(tmp_path, rng):
    rows = rng.normal(size=(5, 3))
    atomic_write(tmp_path / "t.csv", csv_text(("a", "b", "c"), rows, {"path": "special"}))
    header, cols, data = read_csv(tmp_path / "t.csv")
    assert header == {"path": "special"} and cols == ["a", "b", "c"]
    assert np.array_equal(data, rows)


def test_cylinder_mesh_counts_and_winding():
    s = catalog.cylinder(4.0, 2 * np.pi, 4.0)
    th = np.stack(np.meshgrid(np.linspace(0, 2 * np.pi, 33), np.linspace(0, 4, 33), indexing="ij"), -1)
    v, f = grid_mesh(s(th))
    assert len(v) == 1089 and len(f) == 2048
    a, b, c = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
    normal = np.cross(b - a, c - a)
    centroid = (a + b + c) / 3
    outward = centroid * np.array([1.0, 1.0, 0.0])
    assert np.all(np.einsum("ij,ij->i", normal, outward) > 0)


def test_two_by_two_grid_gives_two_triangles():
    v, f = grid_mesh(np.zeros((2, 2, 3)) + np.arange(4).reshape(2, 2, 1))
    assert len(v) == 4 and len(f) == 2


def test_obj_polylines_use_line_elements():
    text = obj_text(polylines=[np.zeros((3, 3)), np.ones((2, 3))])
    assert text.count("\nv ") + text.startswith("v ") == 5
    assert "l 1 2 3" in text and "l 4 5" in text


def test_config_rejects_unknown_keys(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("catalog: apple\nbogus: 1\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_config_grids_and_tolerances(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("catalog: trachea\ngrids:\n  verify: [12, 14]\ntolerances:\n  S0: 1.0e-9\n")
    cfg = load_config(p).validate()
    assert cfg.verify_grid == (12, 14) and cfg.tolerances == {"S0": 1e-9}


def test_growth_table_round_trip_reverifies(tmp_path):
    out = tmp_path / "o"
    assert main(["design", "--catalog", "trachea", "--grid", "6", "5", "--out", str(out)]) == 0
    header, cols, data = read_csv(out / "growth.csv")
    assert tuple(cols) == GROWTH_COLUMNS and header["path"] == "special"
    e = catalog.get("trachea")
    d = catalog_design("trachea")
    th = data[::3, :2]
    comps = components_from_rows(data)
    from_file = table_residuals(d.reference, d.target, th, [comps[k::3] for k in range(3)], e.h)
    _, G, _ = d.sample(th)
    in_memory = table_residuals(d.reference, d.target, th, [G.components(Z) for Z in (0.0, e.h, 2 * e.h)], e.h)
    for k in from_file:
        assert abs(from_file[k] - in_memory[k]) < 1e-12


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["verify", "--catalog", "identity_cylinder", "--grid", "6", "6", "--out", out]) == 0
    assert main(["verify", "--catalog", "identity_cylinder", "--grid", "6", "6", "--perturb", "0.01", "--out", out]) == 1
    assert main(["verify", "--catalog", "nope", "--out", out]) == 2
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("target:\n  expressions: ['t1 + 0*t2', 't1', 't1']\n  domain: [[0, 1], [0, 1]]\n")
    assert main(["design", "--config", str(cfg), "--out", out]) == 3
    with pytest.raises(SystemExit) as info:
        main(["verify", "--mode", "symbolic"])
    assert info.value.code == 2


def test_list_flag(capsys):
    assert main(["--list"]) == 0
    assert "spiral_cactus" in capsys.readouterr().out


def test_custom_config_runs_general_path(tmp_path):
    cfg = tmp_path / "spiral.yaml"
    cfg.write_text(
        "target:\n  expressions: ['2*t1/pi*sin(pi*t2)', '2*t1/pi*cos(pi*t2)', 't2']\n"
        "  domain: [[0, 3.141592653589793], [0, 4]]\n"
        "reference:\n  cylinder: {radius: 4, theta0: 3.141592653589793, length: 4}\n"
        "net:\n  forward: ['arcsinh(2*t1)/pi + t2', '-arcsinh(2*t1)/pi + t2']\n"
        "  inverse: ['sinh(pi*(e1 - e2)/2)/2', '(e1 + e2)/2']\n"
        "grids:\n  verify: [10, 10]\n")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def _obj_vertices(path):
    return np.array([[float(t) for t in line.split()[1:]] for line in Path(path).read_text().splitlines()
                     if line.startswith("v ")])


def test_mesh_command_writes_intermediate_cylinder(tmp_path):
    assert main(["mesh", "--catalog", "spiral_cactus", "--grid", "17", "17", "--out", str(tmp_path)]) == 0
    v = _obj_vertices(tmp_path / "intermediate.obj")
    assert len(v) == 289
    assert np.max(np.abs(np.hypot(v[:, 0], v[:, 1]) - 4.0)) < 1e-9
    assert "\nl " in (tmp_path / "net_lines.obj").read_text()


def test_mesh_command_special_path_has_no_intermediate(tmp_path):
    assert main(["mesh", "--catalog", "identity_cylinder", "--grid", "33", "33", "--out", str(tmp_path)]) == 0
    assert not (tmp_path / "intermediate.obj").exists()
    assert len(_obj_vertices(tmp_path / "target.obj")) == 1089
