"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import filecmp
import time

import numpy as np
import pytest

from conftest import random_rotation
from shellgrowth import catalog
from shellgrowth.cli import main
from shellgrowth.growth import design, eta_forms, identity_residual
from shellgrowth.net import build_net_numeric
from shellgrowth.surface import jet
from shellgrowth.verify import verify
from test_verify import stress_cross_check

REVOLUTION = ["sweet_melon", "morning_glory", "trachea", "apple"]
EXAMPLES = ["sweet_melon", "morning_glory", "trachea", "apple", "spiral_cactus", "pumpkin_tendril"]


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
        assert ok, detail
    return emit


def test_1_revolution_growth_matches_closed_forms(report):
    worst = {}
    slowest = 0.0
    for name in REVOLUTION:
        e = catalog.get(name)
        th = e.sample_grid(30, 30)
        for mode in ("analytic", "fd"):
            t = time.perf_counter()
            d = design(e.reference(mode), e.target(mode), h=e.h)
            gf, _, _ = d.sample(th)
            worst[name, mode] = catalog.oracle_compare(e, gf, th)
            slowest = max(slowest, time.perf_counter() - t)
    analytic = max(v for (n, m), v in worst.items() if m == "analytic")
    fd = max(v for (n, m), v in worst.items() if m == "fd")
    ok = analytic < 1e-10 and fd < 1e-6 and slowest < 5.0
    report(1, "revolution oracle match", ok,
           f"max |Δλ| analytic {analytic:.2e}, fd {fd:.2e}; slowest example {slowest:.2f} s")


def test_2_spiral_reparametrization(report, rng):
    e = catalog.get("spiral_cactus")
    net = e.net()
    th = e.sample_grid(30, 30)
    want = np.stack([np.arcsinh(2 * th[..., 0]) / np.pi + th[..., 1], -np.arcsinh(2 * th[..., 0]) / np.pi + th[..., 1]], -1)
    formula = float(np.max(np.abs(net.forward(th) - want)))
    round_trip = float(np.max(np.abs(net.inverse(net.forward(th)) - th)))
    numeric = build_net_numeric(e.target(), (128, 128))
    traced = float(np.max(np.abs(numeric.forward(th) - net.forward(th))))
    lo, hi = e.domain[:, 0] + e.margin, e.domain[:, 1] - e.margin
    pts = lo + (hi - lo) * rng.random((100, 2))
    d = design(e.reference(), e.target(), net, h=e.h)
    _, _, maps = d.sample(pts)
    eta = net.forward(pts)
    g1 = max(float(np.max(np.abs(a - b))) for Z in (0.0, e.h, 2 * e.h)
             for a, b in zip(maps.G1_components(Z), catalog.spiral_g1(eta, Z)))
    ok = formula < 1e-12 and round_trip < 1e-12 and traced < 5e-4 and g1 < 1e-8
    report(2, "spiral reparametrization", ok,
           f"formula {formula:.1e}, round trip {round_trip:.1e}, traced vs closed {traced:.1e}, G1 vs cosh forms {g1:.1e}")


def test_3_two_step_composition(report):
    out = {}
    for name in ("spiral_cactus", "pumpkin_tendril"):
        e = catalog.get(name)
        d = design(e.reference(), e.target(), e.net(), h=e.h)
        th = e.sample_grid(20, 20)
        _, G, maps = d.sample(th)
        out[name] = identity_residual(maps, G, (0.0, e.h, 2 * e.h))
        if name == "pumpkin_tendril":
            f = eta_forms(jet(e.target(), th), np.linalg.inv(d.net.jac(th)))
            ortho = float(np.max(np.abs(f.F) / np.sqrt(f.E * f.G)))
    ok = out["spiral_cactus"] < 1e-8 and out["pumpkin_tendril"] < 1e-8 and ortho < 1e-4
    report(3, "composition identity", ok,
           f"spiral {out['spiral_cactus']:.1e}, tendril {out['pumpkin_tendril']:.1e} (net |F|/√EG {ortho:.1e})")


def test_4_stress_free_certification(report):
    t = time.perf_counter()
    failures, worst = [], {}
    for name in EXAMPLES:
        e = catalog.get(name)
        rep = verify(design(e.reference(), e.target(), e.net(), h=e.h), e.sample_grid(30, 30))
        for k, v in rep.residuals.items():
            worst[k] = max(worst.get(k, 0.0), v)
        if not rep.passed:
            failures.append(name)
    elapsed = time.perf_counter() - t
    ok = not failures and elapsed < 30.0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(4, "stress-free certification", ok, f"worst {detail}; {elapsed:.1f} s; failing: {failures or 'none'}")


def test_5_perturbation_detector(report):
    lowest = np.inf
    for name in EXAMPLES + ["identity_cylinder"]:
        e = catalog.get(name)
        rep = verify(design(e.reference(), e.target(), e.net(), h=e.h), e.sample_grid(30, 30), perturb=0.01)
        lowest = min(lowest, rep.residuals["S0"])
    report(5, "detector sensitivity", lowest > 1e-3, f"smallest r_S0 under a 1% λ1 perturbation {lowest:.3f}")


def test_6_identity_and_rigid_motion(report, rng):
    e = catalog.get("identity_cylinder")
    d = design(e.reference(), e.target(), h=e.h)
    th = e.sample_grid(30, 30)
    _, G, _ = d.sample(th)
    g_dev = max(float(np.max(np.abs(G.components(Z) - np.eye(3)))) for Z in (0.0, e.h, 2 * e.h))
    ident = max(verify(d, th).residuals.values())
    drift = 0.0
    for name in ("sweet_melon", "apple", "spiral_cactus", "identity_cylinder"):
        en = catalog.get(name)
        moved = en.target().transformed(random_rotation(rng), rng.normal(size=3) * 5)
        ths = en.sample_grid(15, 15)
        for perturb in (0.0, 0.01):
            a = verify(design(en.reference(), en.target(), en.net(), h=en.h), ths, perturb=perturb).residuals
            b = verify(design(en.reference(), moved, en.net(), h=en.h), ths, perturb=perturb).residuals
            drift = max(drift, max(abs(a[k] - b[k]) / max(1.0, a[k]) for k in a))
    ok = g_dev < 1e-12 and ident < 1e-12 and drift < 1e-12
    report(6, "identity and rigid-motion invariance", ok,
           f"|G − I| {g_dev:.1e}, max residual {ident:.1e}, rigid-motion drift {drift:.1e}")


def test_7_neo_hookean_cross_check(report):
    gap = stress_cross_check(seed=2024, n=1000)
    report(7, "Neo-Hookean cross-check", gap < 1e-10,
           f"max componentwise gap {gap:.1e} relative to max(1, |S0|) over 1000 states")


def test_8_determinism(report, tmp_path):
    cfg = tmp_path / "tendril.yaml"
    cfg.write_text("catalog: pumpkin_tendril\ngrids:\n  net: [64, 64]\n  export: [12, 12]\n  verify: [12, 12]\n")
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        for cmd in ("design", "verify"):
            for args in (["--catalog", "spiral_cactus"], ["--config", str(cfg)]):
                sub = out / args[1].rsplit("/", 1)[-1]
                assert main([cmd, *args, "--out", str(sub)]) == 0
        runs.append(out)
    files = sorted(p.relative_to(runs[0]) for p in runs[0].rglob("*") if p.is_file())
    same = all(filecmp.cmp(runs[0] / f, runs[1] / f, shallow=False) for f in files)
    report(8, "determinism", same and len(files) == 4, f"{len(files)} output files byte-identical: {same}")
