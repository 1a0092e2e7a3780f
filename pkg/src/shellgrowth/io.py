"""Deterministic file output: growth tables (CSV), reports (JSON), meshes (OBJ), configs (YAML)."""

from __future__ import annotations

import io
import json
import os
import tempfile
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .errors import ConfigError

GROWTH_COLUMNS = ("theta1", "theta2", "Z", "lambda1", "lambda2",
                  "G11", "G12", "G21", "G22", "G13", "G23", "G31", "G32", "G33")
# (row, column) of each G column in the frame-component matrix
_G_INDEX = {"G11": (0, 0), "G12": (0, 1), "G21": (1, 0), "G22": (1, 1), "G13": (0, 2), "G23": (1, 2),
            "G31": (2, 0), "G32": (2, 1), "G33": (2, 2)}


def atomic_write(path, data: str | bytes):
    """Write via a temporary file in the same directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt17(x) -> str:
    return f"{float(x):.17g}"


def csv_text(columns, rows, header: Optional[dict] = None) -> str:
    buf = io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt17(v) for v in row) + "\n")
    return buf.getvalue()


def read_csv(path):
    """Return (header dict, column names, float array) for a file written by :func:`csv_text`."""
    header, cols, data = {}, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                header[key] = value
            elif cols is None:
                cols = line.split(",")
            elif line:
                data.append([float(v) for v in line.split(",")])
    return header, cols, np.array(data, dtype=float).reshape(-1, len(cols or ()))


def growth_rows(theta, Zs, functions_at, components_at):
    """Rows in GROWTH_COLUMNS order; θ-major, then Z."""
    flat = np.asarray(theta, dtype=float).reshape(-1, 2)
    out = []
    per_z = [(Z, functions_at(Z), components_at(Z).reshape(-1, 3, 3)) for Z in Zs]
    for k in range(flat.shape[0]):
        for Z, (l1, l2), comp in per_z:
            row = [flat[k, 0], flat[k, 1], Z, np.ravel(l1)[k], np.ravel(l2)[k]]
            row += [comp[k][_G_INDEX[c]] for c in GROWTH_COLUMNS[5:]]
            out.append(row)
    return out


def components_from_rows(data):
    """Frame-component matrices (m, 3, 3) from growth-table rows."""
    comp = np.zeros((data.shape[0], 3, 3))
    for c, (i, j) in _G_INDEX.items():
        comp[:, i, j] = data[:, GROWTH_COLUMNS.index(c)]
    return comp


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def grid_mesh(points):
    """Triangulate an (n1, n2, 3) grid of surface points; faces wind counter-clockwise about x,₁ × x,₂."""
    n1, n2 = points.shape[:2]
    verts = points.reshape(-1, 3)
    idx = np.arange(n1 * n2).reshape(n1, n2)
    faces = []
    for i in range(n1 - 1):
        for j in range(n2 - 1):
            a, b, c, d = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
            faces.append((a, b, c))
            faces.append((a, c, d))
    return verts, np.array(faces, dtype=int).reshape(-1, 3)


def obj_text(vertices=None, faces=None, polylines=(), comment=None) -> str:
    """OBJ with ``v``/``f`` records and polylines as ``l`` elements (1-based indices)."""
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    base = 0
    if vertices is not None:
        for v in vertices:
            buf.write("v " + " ".join(fmt17(c) for c in v) + "\n")
        for f in faces if faces is not None else ():
            buf.write("f " + " ".join(str(int(k) + 1) for k in f) + "\n")
        base = len(vertices)
    for line in polylines:
        line = np.asarray(line, dtype=float)
        if len(line) < 2:
            continue
        for v in line:
            buf.write("v " + " ".join(fmt17(c) for c in v) + "\n")
        buf.write("l " + " ".join(str(base + k + 1) for k in range(len(line))) + "\n")
        base += len(line)
    return buf.getvalue()


@dataclass
class RunConfig:
    """Everything a CLI run needs; loaded from YAML and overridden by flags."""

    catalog: Optional[str] = None
    reference: Optional[dict] = None
    target: Optional[dict] = None
    net: Optional[dict] = None
    mode: str = "analytic"
    h: Optional[float] = None
    C0: float = 1.0
    verify_grid: tuple = (30, 30)
    export_grid: tuple = (30, 30)
    net_grid: tuple = (128, 128)
    mesh_grid: tuple = (33, 33)
    tolerances: dict = field(default_factory=dict)
    out: str = "out"
    export: dict = field(default_factory=lambda: {"growth_csv": True, "report_json": True, "meshes": True})
    perturb: float = 0.0
    seed: int = 0
    c1_method: str = "complex"
    surface: str = "target"

    def validate(self):
        if self.mode not in ("analytic", "dual", "fd"):
            raise ConfigError(f"mode must be analytic, dual or fd (got {self.mode!r})")
        for name in ("verify_grid", "export_grid", "net_grid", "mesh_grid"):
            g = tuple(int(v) for v in getattr(self, name))
            if len(g) != 2 or min(g) < 2:
                raise ConfigError(f"{name} needs two dimensions >= 2")
            setattr(self, name, g)
        for k, v in self.tolerances.items():
            if not float(v) > 0:
                raise ConfigError(f"tolerance {k} must be positive")
        if self.h is not None and not self.h > 0:
            raise ConfigError("h must be positive")
        if self.catalog is None and self.target is None:
            raise ConfigError("give a catalog entry or a target surface")
        if self.c1_method not in ("complex", "central"):
            raise ConfigError("c1_method must be complex or central")
        return self


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("the config file must hold a mapping")
    known = {f.name for f in fields(RunConfig)}
    grids = raw.pop("grids", {}) or {}
    for key in ("verify", "export", "net", "mesh"):
        if key in grids:
            raw[f"{key}_grid"] = tuple(grids[key])
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return RunConfig(**raw)
