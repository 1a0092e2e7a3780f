"""Command-line interface.

Exit codes: 0 success (or all checks pass), 1 a verification check failed,
2 bad input or configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__, catalog
from .errors import ConfigError, InputError, NumericalError, ShellGrowthError
from .growth import GrowthDesign, design, identity_residual, is_curvature_net, net_tolerance
from .io import (GROWTH_COLUMNS, RunConfig, atomic_write, csv_text, grid_mesh, growth_rows, json_text, load_config,
                 obj_text)
from .net import CurvatureNet, build_net_closed_form
from .surface import ParamSurface, curvature, fundamental_forms, jet
from .verify import DEFAULT_TOLERANCES, verify

log = logging.getLogger("shellgrowth")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class Problem:
    name: str
    reference: ParamSurface
    target: ParamSurface
    net: Optional[CurvatureNet]
    h: float
    sampler: Callable
    entry: Optional[catalog.CatalogEntry] = None


def _surface_from_config(entry, mode, name):
    if not isinstance(entry, dict):
        raise ConfigError(f"{name} must be a mapping")
    try:
        if "cylinder" in entry:
            c = entry["cylinder"] or {}
            return catalog.cylinder(float(c.get("radius", catalog.R0)), float(c.get("theta0", np.pi)),
                                    float(c.get("length", 4.0)), mode)
        exprs, domain = entry["expressions"], entry["domain"]
    except KeyError as exc:
        raise ConfigError(f"{name} needs {exc.args[0]!r}") from None
    domain = np.asarray(domain, dtype=float)
    if domain.shape != (2, 2) or np.any(domain[:, 1] <= domain[:, 0]):
        raise ConfigError(f"{name} domain must be [[a1, b1], [a2, b2]] with a < b")
    if len(exprs) != 3:
        raise ConfigError(f"{name} needs three coordinate expressions")
    return ParamSurface.from_expressions(list(exprs), domain, mode=mode, name=name)


def build_problem(cfg: RunConfig) -> Problem:
    cfg.validate()
    mode = cfg.mode
    if cfg.catalog is not None and cfg.target is None:
        e = catalog.get(cfg.catalog)
        return Problem(e.name, e.reference(mode), e.target(mode), e.net(mode), cfg.h or e.h,
                       e.sample_grid, e)
    target = _surface_from_config(cfg.target, mode, "target")
    ref_entry = cfg.reference or {"cylinder": {}}
    reference = _surface_from_config(ref_entry, mode, "reference")
    net = None
    if cfg.net:
        try:
            net = build_net_closed_form(cfg.net["forward"], cfg.net["inverse"], target.domain, mode=mode)
        except KeyError as exc:
            raise ConfigError(f"net needs {exc.args[0]!r}") from None

    def sampler(n1, n2):
        return target.grid(n1, n2, margin=1e-3)

    return Problem(target.name or "custom", reference, target, net, cfg.h or 0.01, sampler)


def _design(p: Problem, cfg: RunConfig) -> GrowthDesign:
    return design(p.reference, p.target, p.net, h=p.h, net_resolution=cfg.net_grid, seed=cfg.seed)


def _provenance(p: Problem, cfg: RunConfig, d: GrowthDesign | None = None):
    out = {"shellgrowth": __version__, "source": f"catalog:{p.name}" if p.entry else "config",
           "mode": cfg.mode, "h": repr(p.h)}
    if d is not None:
        out["path"] = d.path
        out["net"] = d.net.kind
    return out


def cmd_analyze(p: Problem, cfg: RunConfig, out: Path):
    """Fundamental forms and curvatures of a surface."""
    surf = p.reference if cfg.surface == "reference" else p.target
    theta = p.sampler(*cfg.export_grid)
    forms = fundamental_forms(jet(surf, theta))
    cd = curvature(forms)
    cols = ("theta1", "theta2", "E", "F", "G", "L", "M", "N", "kappa1", "kappa2", "H", "K", "umbilic")
    fields_ = [theta[..., 0], theta[..., 1], forms.E, forms.F, forms.G, forms.L, forms.M, forms.N,
               cd.kappa1, cd.kappa2, cd.H, cd.K, cd.umbilic.astype(float)]
    rows = np.stack([np.ravel(f) for f in fields_], -1)
    atomic_write(out / "forms.csv", csv_text(cols, rows, {**_provenance(p, cfg), "surface": cfg.surface}))
    net_ok = is_curvature_net(surf)
    print(f"{p.name} ({cfg.surface}): {rows.shape[0]} samples")
    print(f"  θ lines are lines of curvature: {'yes' if net_ok else 'no'}")
    print(f"  κ1 ∈ [{cd.kappa1.min():.6g}, {cd.kappa1.max():.6g}]  κ2 ∈ [{cd.kappa2.min():.6g}, {cd.kappa2.max():.6g}]")
    print(f"  max 2h|H| = {np.max(np.abs(2 * p.h * cd.H)):.3e}  max 4h²|K| = {np.max(np.abs(4 * p.h**2 * cd.K)):.3e}")
    print(f"  umbilic samples: {int(np.count_nonzero(cd.umbilic))}")
    return EXIT_OK


def cmd_design(p: Problem, cfg: RunConfig, out: Path):
    """Compute the growth field and write the growth table."""
    d = _design(p, cfg)
    theta = p.sampler(*cfg.export_grid)
    gf, G, maps = d.sample(theta)
    Zs = (0.0, p.h, 2 * p.h)
    rows = growth_rows(theta, Zs, gf.combined, lambda Z: G.components(Z))
    header = {**_provenance(p, cfg, d), "net_tolerance": repr(net_tolerance(p.target)),
              "verify_tolerances": json.dumps({**DEFAULT_TOLERANCES, **cfg.tolerances}, sort_keys=True),
              "columns": "G_ij are components on g_i (x) g^j of the reference frame"}
    atomic_write(out / "growth.csv", csv_text(GROWTH_COLUMNS, rows, header))
    print(f"{p.name}: {d.path} path, net {d.net.kind}, {len(rows)} rows -> {out / 'growth.csv'}")
    if p.entry is not None and p.entry.has_oracle:
        dev = catalog.oracle_compare(p.entry, gf, theta, Zs)
        print(f"  max deviation from closed-form growth functions: {dev:.3e}")
    if maps is not None:
        print(f"  two-step identity residual: {identity_residual(maps, G, Zs):.3e}")
    return EXIT_OK


def cmd_verify(p: Problem, cfg: RunConfig, out: Path):
    """Check that the growth field is stress-free."""
    d = _design(p, cfg)
    theta = p.sampler(*cfg.verify_grid)
    rep = verify(d, theta, C0_mat=cfg.C0, perturb=cfg.perturb, method=cfg.c1_method, tolerances=cfg.tolerances)
    data = rep.to_dict()
    data.update({"name": p.name, "path": d.path, "net": d.net.kind, "perturb": cfg.perturb})
    if cfg.export.get("report_json", True):
        atomic_write(out / "report.json", json_text(data))
    print(f"{p.name}: {d.path} path, {rep.points} points, perturb {cfg.perturb:g}")
    print(rep.table())
    print("PASS" if rep.passed else "FAIL")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _net_lines(p: Problem, net: CurvatureNet, count=9, samples=201):
    """Coordinate lines η¹ = const and η² = const mapped onto the target, split where they leave the domain."""
    box = net.domain_star()
    lines = []
    for fam in range(2):
        levels = np.linspace(*box[fam], count + 2)[1:-1]
        s = np.linspace(*box[1 - fam], samples)
        for c in levels:
            eta = np.empty((samples, 2))
            eta[:, fam], eta[:, 1 - fam] = c, s
            with np.errstate(all="ignore"):
                ok = net.contains(eta)
                theta = net.inverse(eta)
            run = []
            for k in range(samples):
                if ok[k]:
                    run.append(theta[k])
                elif run:
                    lines.append(np.array(run))
                    run = []
            if run:
                lines.append(np.array(run))
    return [p.target(np.asarray(t)) for t in lines if len(t) > 1]


def cmd_net(p: Problem, cfg: RunConfig, out: Path):
    """Build the curvature net and export it."""
    d = _design(p, cfg)
    net = d.net
    theta = p.sampler(*cfg.export_grid)
    eta = net.forward(theta)
    detj = np.linalg.det(net.jac(theta))
    rows = np.stack([theta[..., 0].ravel(), theta[..., 1].ravel(), eta[..., 0].ravel(), eta[..., 1].ravel(),
                     detj.ravel()], -1)
    atomic_write(out / "net.csv", csv_text(("theta1", "theta2", "eta1", "eta2", "det_jac"), rows, _provenance(p, cfg, d)))
    atomic_write(out / "net_lines.obj", obj_text(polylines=_net_lines(p, net), comment=f"{p.name} curvature net"))
    print(f"{p.name}: net {net.kind}, det jac ∈ [{detj.min():.6g}, {detj.max():.6g}]")
    return EXIT_OK


def cmd_mesh(p: Problem, cfg: RunConfig, out: Path):
    """Export reference, intermediate and target meshes."""
    d = _design(p, cfg)
    n1, n2 = cfg.mesh_grid
    theta = np.stack(np.meshgrid(np.linspace(*p.target.domain[0], n1), np.linspace(*p.target.domain[1], n2),
                                 indexing="ij"), -1)
    meshes = {"reference.obj": p.reference(theta), "target.obj": p.target(theta)}
    if d.path == "general":
        meshes["intermediate.obj"] = d.intermediate.at_theta(theta)
    for fname, pts in meshes.items():
        v, f = grid_mesh(pts)
        atomic_write(out / fname, obj_text(v, f, comment=f"{p.name} {fname[:-4]} {n1}x{n2}"))
        print(f"{fname}: {len(v)} vertices, {len(f)} triangles")
    if d.path == "general":
        atomic_write(out / "net_lines.obj", obj_text(polylines=_net_lines(p, d.net), comment=f"{p.name} curvature net"))
    return EXIT_OK


def cmd_list(*_):
    """List the catalog."""
    print("\n".join(catalog.describe()))
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "design": cmd_design, "verify": cmd_verify, "net": cmd_net, "mesh": cmd_mesh,
            "list": cmd_list}
GRID_FIELD = {"analyze": "export_grid", "design": "export_grid", "verify": "verify_grid", "net": "export_grid",
              "mesh": "mesh_grid"}


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--catalog", help="catalog entry name")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--grid", type=int, nargs=2, metavar=("N", "M"), help="sample grid size")
    common.add_argument("--mode", choices=("analytic", "dual", "fd"), help="derivative mode")
    for key in ("c0", "c1", "det", "s0", "s1"):
        common.add_argument(f"--tol-{key}", type=float, metavar="TOL", help=f"{key.upper()} tolerance")
    common.add_argument("--perturb", type=float, help="relative perturbation of λ1⁽⁰⁾")
    common.add_argument("--seed", type=int, help="seed for the numeric net builder")
    common.add_argument("--surface", choices=("target", "reference"), help="surface to analyze")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="shellgrowth", description="Growth fields that shape thin shells.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list", action="store_true", help="list catalog entries and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=(COMMANDS[name].__doc__ or name))
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.catalog:
        cfg.catalog = args.catalog
        cfg.target = None if not args.config else cfg.target
    if args.mode:
        cfg.mode = args.mode
    if args.out:
        cfg.out = str(args.out)
    if args.grid:
        setattr(cfg, GRID_FIELD[args.command], tuple(args.grid))
    tol = dict(cfg.tolerances)
    for key, name in (("c0", "C0"), ("c1", "C1"), ("det", "det"), ("s0", "S0"), ("s1", "S1")):
        val = getattr(args, f"tol_{key}")
        if val is not None:
            tol[name] = val
    cfg.tolerances = tol
    if args.perturb is not None:
        cfg.perturb = args.perturb
    if args.seed is not None:
        cfg.seed = args.seed
    if args.surface:
        cfg.surface = args.surface
    return cfg


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.list or args.command == "list":
        return cmd_list()
    if args.command is None:
        parser.print_help()
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config_from_args(args)
        problem = build_problem(cfg)
        out = Path(cfg.out)
        t = time.perf_counter()
        code = COMMANDS[args.command](problem, cfg, out)
        log.info("%s finished in %.2f s", args.command, time.perf_counter() - t)
        return code
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ShellGrowthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
