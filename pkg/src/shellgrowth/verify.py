"""Certify that a growth field is stress-free.

Two independent checks are provided. The kinematic one rebuilds the grown
shell x(θ, Z) = x⁽⁰⁾(θ) + Z n_t(θ), forms F, A = F G⁻¹ and C = AᵀA, and
measures C⁽⁰⁾ − I, C⁽¹⁾ and det A⁽⁰⁾ − 1. The constitutive one evaluates the
closed-form thickness expansion of the nominal stress for an incompressible
Neo-Hookean shell and measures S⁽⁰⁾ and S⁽¹⁾.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from .errors import ThicknessSingularity
from .growth import (GrowthDesign, GrowthFunctions, GrowthTensor, ReferenceGeometry, growth_functions,
                     identity_residual)
from .net import pullback_jet
from .surface import (EPS_REG, FundamentalForms, ParamSurface, SurfaceJet, dual_basis, fundamental_forms, jet,
                      normal_derivatives, principal_curvatures)

DEFAULT_TOLERANCES = {"C0": 1e-8, "C1": 1e-6, "det": 1e-9, "S0": 1e-8, "S1": 1e-6}
COMPLEX_STEP = 1e-30


def diameter(points):
    """Largest distance between two sample points (invariant under rigid motions)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) > 4000:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass
    return float(pdist(pts).max()) if len(pts) > 1 else 0.0


def _outer(a, b):
    return np.einsum("...i,...j->...ij", a, b)


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


@dataclass(frozen=True)
class KinematicSample:
    """Shell kinematics at thickness coordinate ``Z`` plus the Z-expansion of C."""

    Z: float
    U: np.ndarray
    Uinv: np.ndarray
    F: np.ndarray
    A: np.ndarray
    C: np.ndarray
    detA: np.ndarray
    C0: np.ndarray
    C1: np.ndarray
    detA0: np.ndarray


def _deformation(ref_jet, ref_forms, tgt_jet, tgt_dn, G: GrowthTensor, Z, exact=True):
    """F, A, C, U and U⁻¹ at a (possibly complex) thickness coordinate."""
    K = ref_forms.shape_operator()
    U = np.eye(2) - Z * K
    Uinv = np.linalg.inv(U)
    g_up = dual_basis(ref_jet, ref_forms)
    hat = [sum(Uinv[..., a, d, None] * g_up[d] for d in range(2)) for a in range(2)]
    x_a = (tgt_jet.x1 + Z * tgt_dn[0], tgt_jet.x2 + Z * tgt_dn[1])
    F = _outer(x_a[0], hat[0]) + _outer(x_a[1], hat[1]) + _outer(tgt_jet.n, ref_jet.n)
    # A = F G⁻¹ = Σ (c⁻¹)ᵢⱼ (F gᵢ) ⊗ gʲ; building it from frame components avoids
    # the cancellation of a Cartesian inverse when G is strongly anisotropic
    cinv = np.linalg.inv(G.components(Z, exact))
    Fg = [x_a[0] * Uinv[..., 0, b, None] + x_a[1] * Uinv[..., 1, b, None] for b in range(2)] + [tgt_jet.n]
    con = [g_up[0], g_up[1], ref_jet.n]
    A = sum(cinv[..., i, j, None, None] * _outer(Fg[i], con[j]) for i in range(3) for j in range(3))
    C = np.swapaxes(A, -1, -2) @ A
    return U, Uinv, F, A, C


def reconstruct_kinematics(reference: ParamSurface, target: ParamSurface, G: GrowthTensor, theta, Z=0.0,
                           method="complex", h=None, exact=True) -> KinematicSample:
    """Kinematics of the stress-free ansatz x = x⁽⁰⁾ + Z n_t under growth ``G`` (sampled at the same θ).

    ``method`` selects how C⁽¹⁾ = ∂C/∂Z at Z = 0 is extracted: ``complex``
    (complex-step, exact to rounding) or ``central`` (central difference with
    step h/100).
    """
    theta = np.asarray(theta, dtype=float)
    rj = jet(reference, theta)
    rf = fundamental_forms(rj)
    k1, k2, _, _ = principal_curvatures(rf)
    zmax = max(abs(Z), 2 * h if h else 0.0)
    if np.max(np.maximum(np.abs(k1), np.abs(k2))) * zmax >= 1.0:
        raise ThicknessSingularity("|κ Z| >= 1 inside the shell")
    tj = jet(target, theta)
    tdn = normal_derivatives(tj)
    U, Uinv, F, A, C = _deformation(rj, rf, tj, tdn, G, Z, exact)
    _, _, F0, A0, C0 = _deformation(rj, rf, tj, tdn, G, 0.0, exact)
    if method == "complex":
        *_, Cc = _deformation(rj, rf, tj, tdn, G, 1j * COMPLEX_STEP, exact)
        C1 = Cc.imag / COMPLEX_STEP
    elif method == "central":
        hz = (h if h else 0.01) / 100.0
        *_, Cp = _deformation(rj, rf, tj, tdn, G, hz, exact)
        *_, Cm = _deformation(rj, rf, tj, tdn, G, -hz, exact)
        C1 = (Cp - Cm) / (2 * hz)
    else:
        raise ValueError("method must be 'complex' or 'central'")
    return KinematicSample(Z, U, Uinv, F, A, C, np.linalg.det(A), C0, C1, np.linalg.det(A0))


def incompressibility_check(sample: KinematicSample) -> float:
    """max |det A⁽⁰⁾ − 1|."""
    return float(np.max(np.abs(sample.detA0 - 1.0)))


@dataclass(frozen=True)
class NeoHookeanState:
    """Closed-form thickness expansion of an incompressible Neo-Hookean shell at each sample point."""

    C0_mat: float
    Lam: np.ndarray
    Del: np.ndarray
    xN: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    t: tuple
    B: np.ndarray
    avec: np.ndarray
    S0: np.ndarray = field(repr=False)
    S1: np.ndarray = field(repr=False)


def neo_hookean_fields(ref_jet: SurfaceJet, tgt_jet: SurfaceJet, growth: GrowthFunctions, C0_mat=1.0,
                       eps=EPS_REG) -> NeoHookeanState:
    """Evaluate x⁽¹⁾, p⁽⁰⁾, x⁽²⁾, p⁽¹⁾, S⁽⁰⁾ and S⁽¹⁾ from the target 2-jet and growth functions.

    Both jets must use the same coordinates, in which the reference is a
    curvature-line net; κ₁, κ₂ are the reference normal curvatures along them.
    """
    r, x = ref_jet, tgt_jet
    rf = fundamental_forms(r)
    k1, k2 = rf.L / rf.E, rf.N / rf.G
    f = fundamental_forms(x)
    E, F, G, L, M, N = f.E, f.F, f.G, f.L, f.M, f.N
    l10, l20, l11, l21 = growth.l10, growth.l20, growth.l11, growth.l21
    if growth.grad_l10 is None or growth.grad_l20 is None:
        raise ValueError("growth functions need the gradients of λ⁽⁰⁾")
    l10_1, l10_2 = growth.grad_l10[..., 0], growth.grad_l10[..., 1]
    l20_1, l20_2 = growth.grad_l20[..., 0], growth.grad_l20[..., 1]
    Lam = l10 * l20
    La1 = l10_1 * l20 + l10 * l20_1
    La2 = l10_2 * l20 + l10 * l20_2
    xN = np.cross(x.x1, x.x2)
    Del = _dot(xN, xN)
    if np.any(~(Del > eps)) or np.any(~(np.abs(Lam) > eps)):
        from .errors import DegenerateSurface
        raise DegenerateSurface("Λ or Δ too small for the Neo-Hookean expansion")
    xN1 = np.cross(x.x11, x.x2) + np.cross(x.x1, x.x12)
    xN2 = np.cross(x.x12, x.x2) + np.cross(x.x1, x.x22)
    D1, D2 = 2 * _dot(xN, xN1), 2 * _dot(xN, xN2)
    B11, B12 = _dot(r.x1, r.x11), _dot(r.x1, r.x12)
    B21, B22 = _dot(r.x2, r.x12), _dot(r.x2, r.x22)
    a = (l10**2)[..., None] * x.x22 + (l20**2)[..., None] * x.x11
    t1 = (k1 + k2) * Lam - l11 * l20 - l10 * l21
    t2 = (B11 + B21) * Lam
    t3 = (B12 + B22) * Lam
    t4 = Lam * (D1 * F - D2 * E) + Del * (E * (2 * La2 + t3) - F * (2 * La1 + t2))
    t5 = Lam * (D2 * F - D1 * G) + Del * (G * (2 * La1 + t2) - F * (2 * La2 + t3))
    t6 = l10_2 * Lam + l10 * (t3 - l20_2 * l10)
    t7 = l20_1 * Lam + l20 * (t2 - l10_1 * l20)
    t8 = l10**2 * N + l20**2 * L
    t9 = E * N - 2 * F * M + G * L
    s = lambda v: v[..., None]
    sq = np.sqrt(Del)
    x1v = s(Lam / Del) * xN
    p0 = 2 * C0_mat * Lam**2 / Del
    x2v = (s((Lam**2 * t9 + Del**2 / Lam**2 * t8 - Del * sq * t1) / Del**2.5) * xN - a / s(Lam**2)
           + (s(Lam**4 * t5 - Del**3 * l20 * t7) * x.x1 + s(Lam**4 * t4 - Del**3 * l10 * t6) * x.x2) / s(Del**3 * Lam**3))
    p1 = 2 * C0_mat * (t8 / (Lam * sq) - 2 * Lam * t1 / Del + Lam**3 * t9 / Del**2.5)
    q = p1 / (2 * C0_mat)
    # S⁽⁰⁾ = 2C₀ [g₁ ⊗ w₁ + g₂ ⊗ w₂]
    w1 = s(Lam**3 / Del**2) * (s(F) * x.x2 - s(G) * x.x1) + s(l20 / l10) * x.x1
    w2 = s(Lam**3 / Del**2) * (s(F) * x.x1 - s(E) * x.x2) + s(l10 / l20) * x.x2
    S0 = 2 * C0_mat * (_outer(r.x1, w1) + _outer(r.x2, w2))
    v1 = (s((-l11 * l20 + l10 * l21 + Lam * k1) / l10**2) * x.x1 - s(Lam**2 / Del) * np.cross(x.x2, x2v)
          + s(Lam**4 / Del**2.5) * (s(N) * x.x1 - s(M) * x.x2)
          + s(l20 * (Del * La1 - Lam * D1) / (Del**2 * l10)) * xN
          - s(Lam * (k2 * Lam**2 + q * Del) / Del**2) * (s(G) * x.x1 - s(F) * x.x2)
          + s(l20**2 / Del) * xN1)
    v2 = (s((l11 * l20 - l10 * l21 + Lam * k2) / l20**2) * x.x2 + s(Lam**2 / Del) * np.cross(x.x1, x2v)
          - s(Lam**4 / Del**2.5) * (s(M) * x.x1 - s(L) * x.x2)
          + s(l10 * (Del * La2 - Lam * D2) / (Del**2 * l20)) * xN
          + s(Lam * (k1 * Lam**2 + q * Del) / Del**2) * (s(F) * x.x1 - s(E) * x.x2)
          + s(l10**2 / Del) * xN2)
    v3 = (s(-Lam * t1 / Del - q) * xN + s(Lam) * x2v
          + s(Lam**2 / Del**3) * (s(Del * La1 - Lam * D1) * (s(G) * x.x1 - s(F) * x.x2)
                                  - s(Del * La2 - Lam * D2) * (s(F) * x.x1 - s(E) * x.x2))
          + s(Lam**3 / Del**2) * (np.cross(xN2, x.x1) - np.cross(xN1, x.x2)))
    S1 = 2 * C0_mat * (_outer(r.x1, v1) + _outer(r.x2, v2) + _outer(r.n, v3))
    B = np.stack([np.stack([B11, B12], -1), np.stack([B21, B22], -1)], -2)
    return NeoHookeanState(C0_mat, Lam, Del, xN, x1v, x2v, p0, p1, (t1, t2, t3, t4, t5, t6, t7, t8, t9), B, a, S0, S1)


def general_first_order_stress(ref_jet: SurfaceJet, tgt_jet: SurfaceJet, growth: GrowthFunctions, C0_mat=1.0):
    """Leading-order nominal stress J_G G⁻¹(2C₀Aᵀ − p A⁻¹) at Z = 0 for the Neo-Hookean energy.

    Uses x⁽¹⁾ = Λ x_N/Δ and p⁽⁰⁾ = 2C₀Λ²/Δ; the growth tensor at Z = 0 is
    (λ₁/√E_r) g₁⊗g¹ + (λ₂/√G_r) g₂⊗g² + n⊗n.
    """
    r, x = ref_jet, tgt_jet
    rf = fundamental_forms(r)
    g_up = dual_basis(r, rf)
    c1 = growth.l10 / np.sqrt(rf.E)
    c2 = growth.l20 / np.sqrt(rf.G)
    G0 = c1[..., None, None] * _outer(r.x1, g_up[0]) + c2[..., None, None] * _outer(r.x2, g_up[1]) + _outer(r.n, r.n)
    xN = np.cross(x.x1, x.x2)
    Del = _dot(xN, xN)
    Lam = growth.l10 * growth.l20
    x1v = (Lam / Del)[..., None] * xN
    p0 = 2 * C0_mat * Lam**2 / Del
    F0 = _outer(x.x1, g_up[0]) + _outer(x.x2, g_up[1]) + _outer(x1v, r.n)
    Ginv = np.linalg.inv(G0)
    A0 = F0 @ Ginv
    JG = np.linalg.det(G0)
    inner = 2 * C0_mat * np.swapaxes(A0, -1, -2) - p0[..., None, None] * np.linalg.inv(A0)
    return JG[..., None, None] * (Ginv @ inner), JG


@dataclass
class StressFreeReport:
    grid: tuple
    points: int
    h: float
    C0_mat: float
    residuals: dict
    tolerances: dict
    extras: dict = field(default_factory=dict)

    @property
    def flags(self):
        return {k: bool(self.residuals[k] < self.tolerances[k]) for k in self.tolerances}

    @property
    def passed(self):
        return all(self.flags.values())

    def to_dict(self):
        return {
            "grid": list(self.grid), "points": self.points, "h": self.h, "C0": self.C0_mat,
            "residuals": dict(self.residuals), "tolerances": dict(self.tolerances),
            "pass": self.flags, "passed": self.passed, "extras": dict(self.extras),
        }

    def table(self):
        rows = [f"{'check':<8}{'residual':>14}{'tolerance':>12}  status"]
        for k in self.tolerances:
            rows.append(f"{k:<8}{self.residuals[k]:>14.3e}{self.tolerances[k]:>12.1e}  {'pass' if self.flags[k] else 'FAIL'}")
        for k, v in self.extras.items():
            rows.append(f"{k:<8}{v:>14.3e}")
        return "\n".join(rows)


def stress_residuals(state: NeoHookeanState, h, C0_mat=None):
    """(r_S0, r_S1): max Frobenius norms of S⁽⁰⁾/(2C₀) and h S⁽¹⁾/(2C₀)."""
    c = state.C0_mat if C0_mat is None else C0_mat
    r0 = float(np.max(np.linalg.norm(state.S0, axis=(-2, -1)))) / (2 * c)
    r1 = float(np.max(np.linalg.norm(state.S1, axis=(-2, -1)))) * h / (2 * c)
    return r0, r1


def _eta_state(design: GrowthDesign, theta, gf_perturb, C0_mat):
    """Neo-Hookean state in η coordinates: intermediate surface as reference, pulled-back target."""
    P, T = design.net.inverse_jet(theta)
    tj = pullback_jet(jet(design.target, theta), P, T)
    rj = design.intermediate.jet_at_theta(theta)
    gf = growth_functions(ReferenceGeometry.from_jet(rj), fundamental_forms(tj), tj)
    return neo_hookean_fields(rj, tj, gf.perturbed(gf_perturb), C0_mat)


def verify(design: GrowthDesign, theta, *, C0_mat=1.0, perturb=0.0, method="complex", tolerances=None,
           exact=True) -> StressFreeReport:
    """Run the kinematic and constitutive checks over the θ samples."""
    theta = np.asarray(theta, dtype=float)
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    factor = 1.0 + perturb
    gf, G, maps = design.sample(theta)
    Gp = G.perturbed(factor)
    ks = reconstruct_kinematics(design.reference, design.target, Gp, theta, 0.0, method=method, h=design.h, exact=exact)
    diam = diameter(design.target(theta))
    eye = np.eye(3)
    res = {
        "C0": float(np.max(np.linalg.norm(ks.C0 - eye, axis=(-2, -1)))),
        "C1": float(np.max(np.linalg.norm(ks.C1, axis=(-2, -1)))) * diam,
        "det": incompressibility_check(ks),
    }
    if design.path == "special":
        state = neo_hookean_fields(jet(design.reference, theta), jet(design.target, theta), gf.perturbed(factor), C0_mat)
    else:
        state = _eta_state(design, theta, factor, C0_mat)
    res["S0"], res["S1"] = stress_residuals(state, design.h)
    tf = fundamental_forms(jet(design.target, theta))
    _, _, Hm, Km = principal_curvatures(tf)
    extras = {"max_2hH": float(np.max(np.abs(2 * design.h * Hm))), "max_4h2K": float(np.max(np.abs(4 * design.h**2 * Km)))}
    if maps is not None:
        extras["identity"] = identity_residual(maps, G, (0.0, design.h, 2 * design.h))
    return StressFreeReport(tuple(theta.shape[:-1]), int(np.prod(theta.shape[:-1])), design.h, C0_mat, res, tol, extras)


@dataclass(frozen=True)
class _TabulatedGrowth:
    """Growth tensor known only through frame components at a few thickness values."""

    frame: SurfaceJet
    by_z: dict

    def components(self, Z, exact=True):
        return self.by_z[Z]


def table_residuals(reference: ParamSurface, target: ParamSurface, theta, components, h):
    """Kinematic residuals from tabulated growth components at Z = 0, h, 2h.

    ``components`` is a sequence of three (..., 3, 3) arrays. C⁽¹⁾ uses the
    one-sided stencil (−3C(0) + 4C(h) − C(2h)) / 2h, so it carries an O(h²)
    error that the in-memory check does not.
    """
    theta = np.asarray(theta, dtype=float)
    rj = jet(reference, theta)
    rf = fundamental_forms(rj)
    tj = jet(target, theta)
    tdn = normal_derivatives(tj)
    Zs = (0.0, h, 2 * h)
    G = _TabulatedGrowth(rj, dict(zip(Zs, components)))
    Cs = [_deformation(rj, rf, tj, tdn, G, Z)[-1] for Z in Zs]
    A0 = _deformation(rj, rf, tj, tdn, G, 0.0)[3]
    C1 = (-3 * Cs[0] + 4 * Cs[1] - Cs[2]) / (2 * h)
    diam = diameter(target(theta))
    return {
        "C0": float(np.max(np.linalg.norm(Cs[0] - np.eye(3), axis=(-2, -1)))),
        "C1": float(np.max(np.linalg.norm(C1, axis=(-2, -1)))) * diam,
        "det": float(np.max(np.abs(np.linalg.det(A0) - 1.0))),
    }
