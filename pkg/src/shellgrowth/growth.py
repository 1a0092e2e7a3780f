"""Growth tensors that morph a reference midsurface into a target surface.

Tensor components are stored in the mixed reference frame: for
``c = components(Z)`` the tensor is Σ c[i, j] g_i ⊗ gʲ with (g₁, g₂, n) the
reference tangents and normal at θ and (g¹, g², n) the dual basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import NotCurvatureNet, ThicknessSingularity
from .net import CurvatureNet, IdentityNet, build_net_numeric, degenerate_net, intermediate_surface
from .surface import FundamentalForms, ParamSurface, SurfaceJet, dual_basis, fundamental_forms, jet

F_TOL = 1e-9
M_TOL = 1e-9
# finite-difference second partials are only good to ~1e-8, so the F = M = 0 test is looser there
FD_NET_TOL = 1e-6


def net_tolerance(surface: ParamSurface):
    return FD_NET_TOL if surface.mode == "fd" else F_TOL


@dataclass(frozen=True)
class ReferenceGeometry:
    """Metric and directional curvatures of a curvature-line reference along θ¹, θ²."""

    E_r: np.ndarray
    G_r: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray

    @classmethod
    def from_jet(cls, j: SurfaceJet):
        f = fundamental_forms(j)
        return cls(f.E, f.G, f.L / f.E, f.N / f.G)


@dataclass(frozen=True)
class GrowthFunctions:
    """λ₁⁽⁰⁾, λ₂⁽⁰⁾ (stretches) and λ₁⁽¹⁾, λ₂⁽¹⁾ (through-thickness gradients).

    ``grad_l10``/``grad_l20`` hold ∂λᵅ⁽⁰⁾/∂θᵝ when known (needed by the
    Neo-Hookean stress expansion).
    """

    l10: np.ndarray
    l20: np.ndarray
    l11: np.ndarray
    l21: np.ndarray
    grad_l10: Optional[np.ndarray] = None
    grad_l20: Optional[np.ndarray] = None

    def combined(self, Z):
        return self.l10 + Z * self.l11, self.l20 + Z * self.l21

    def admissible(self, h):
        ok = True
        for Z in (0.0, h, 2.0 * h):
            a, b = self.combined(Z)
            ok &= bool(np.all(a > 0) and np.all(b > 0))
        return ok

    def perturbed(self, factor1=1.0):
        """λ₁⁽⁰⁾ scaled by ``factor1`` (its gradient scales with it)."""
        g = None if self.grad_l10 is None else self.grad_l10 * factor1
        return replace(self, l10=self.l10 * factor1, grad_l10=g)


def _components(l0, l1, jac, kappa_ref, kappa_int, E_ref, Z):
    """Frame components c[α,β](Z) = (λα⁽⁰⁾+Zλα⁽¹⁾)/√E_rα · Jᵅ_β · (1−κ*_αZ)/(1−κ_βZ)."""
    shape = np.shape(l0[0])
    c = np.zeros(shape + (3, 3), dtype=np.result_type(Z, float))
    for a in range(2):
        stretch = (l0[a] + Z * l1[a]) / np.sqrt(E_ref[a])
        for b in range(2):
            ratio = (1.0 - kappa_int[a] * Z) / (1.0 - kappa_ref[b] * Z)
            c[..., a, b] = stretch * jac[..., a, b] * ratio
    c[..., 2, 2] = 1.0
    return c


@dataclass(frozen=True)
class GrowthTensor:
    """Growth tensor field sampled at a set of θ points.

    ``exact(Z)`` keeps the rational Z dependence of the shifter ratios;
    ``taylor(Z)`` is G⁽⁰⁾ + Z G⁽¹⁾. For the special case both coincide.
    """

    l0: tuple
    l1: tuple
    jac: np.ndarray
    kappa_ref: tuple
    kappa_int: tuple
    E_ref: tuple
    frame: SurfaceJet = field(repr=False)

    @property
    def G0(self):
        return _components(self.l0, self.l1, self.jac, self.kappa_ref, self.kappa_int, self.E_ref, 0.0)

    @property
    def G1(self):
        c = np.zeros_like(self.G0)
        for a in range(2):
            for b in range(2):
                c[..., a, b] = (self.l1[a] + self.l0[a] * (self.kappa_ref[b] - self.kappa_int[a])) \
                    * self.jac[..., a, b] / np.sqrt(self.E_ref[a])
        return c

    def exact(self, Z):
        return _components(self.l0, self.l1, self.jac, self.kappa_ref, self.kappa_int, self.E_ref, Z)

    def taylor(self, Z):
        return self.G0 + Z * self.G1

    def components(self, Z, exact=True):
        return self.exact(Z) if exact else self.taylor(Z)

    def spatial(self, Z, exact=True):
        """3×3 Cartesian matrix Σ c[i,j] g_i ⊗ gʲ."""
        c = self.components(Z, exact)
        cov, con = frame_matrices(self.frame)
        return cov @ c @ np.swapaxes(con, -1, -2)

    def det0(self):
        return np.linalg.det(self.G0)

    def perturbed(self, factor1=1.0):
        l0 = (self.l0[0] * factor1, self.l0[1])
        return replace(self, l0=l0)


def frame_matrices(j: SurfaceJet):
    """Columns (g₁, g₂, n) and (g¹, g², n) as (..., 3, 3) matrices."""
    g1, g2 = dual_basis(j)
    cov = np.stack([j.x1, j.x2, j.n], -1)
    con = np.stack([g1, g2, j.n], -1)
    return cov, con


def evaluate(G: GrowthTensor, Z, exact=True):
    """Frame components at Z with the orthonormalized frame (ĝ₁, ĝ₂, n).

    Returns (components, unit_components, frame) where ``unit_components`` are
    the components on ĝᵢ ⊗ ĝⱼ (valid for the orthogonal reference frames the
    method assumes).
    """
    c = G.components(Z, exact)
    j = G.frame
    s1 = np.linalg.norm(j.x1, axis=-1)
    s2 = np.linalg.norm(j.x2, axis=-1)
    scale = np.stack([s1, s2, np.ones_like(s1)], -1)
    unit = c * scale[..., :, None] / scale[..., None, :]
    frame = np.stack([j.x1 / s1[..., None], j.x2 / s2[..., None], j.n], -2)
    return c, unit, frame


def check_curvature_net(forms: FundamentalForms, f_tol=F_TOL, m_tol=M_TOL):
    rel_f = np.max(np.abs(forms.F) / np.sqrt(forms.E * forms.G))
    rel_m = np.max(np.abs(forms.M) / (np.abs(forms.L) + np.abs(forms.N) + 1e-30))
    if not (rel_f < f_tol and rel_m < m_tol):
        raise NotCurvatureNet(f"coordinate curves are not lines of curvature (|F|/√EG={rel_f:.3g}, |M|/(|L|+|N|)={rel_m:.3g})")


def is_curvature_net(surface: ParamSurface, n=32, margin=1e-3):
    """Whether θ curves are lines of curvature on a sample grid (the special-path test)."""
    forms = fundamental_forms(jet(surface, surface.grid(n, n, margin)))
    tol = net_tolerance(surface)
    try:
        check_curvature_net(forms, tol, tol)
    except NotCurvatureNet:
        return False
    return True


def growth_functions(ref: ReferenceGeometry, forms: FundamentalForms, j: SurfaceJet | None = None) -> GrowthFunctions:
    """λ⁽⁰⁾ = (√E, √G), λ⁽¹⁾ = ((κ₁ − L/E)√E, (κ₂ − N/G)√G)."""
    sE, sG = np.sqrt(forms.E), np.sqrt(forms.G)
    grad1 = grad2 = None
    if j is not None:
        dot = lambda a, b: np.einsum("...i,...i->...", a, b)
        grad1 = np.stack([dot(j.x1, j.x11), dot(j.x1, j.x12)], -1) / sE[..., None]
        grad2 = np.stack([dot(j.x2, j.x12), dot(j.x2, j.x22)], -1) / sG[..., None]
    return GrowthFunctions(sE, sG, (ref.kappa1 - forms.L / forms.E) * sE, (ref.kappa2 - forms.N / forms.G) * sG,
                           grad1, grad2)


def check_thickness(kappas, h):
    worst = max(float(np.max(np.abs(k))) for k in kappas) * 2.0 * h
    if not worst < 1.0:
        raise ThicknessSingularity(f"max |κ Z| over Z in [0, 2h] is {worst:.3g} >= 1")


def growth_special(ref: ReferenceGeometry, forms: FundamentalForms, frame: SurfaceJet, target_jet=None,
                   h=None, check=True):
    """Growth functions and tensor when the θ curves are lines of curvature on both surfaces."""
    if check:
        check_curvature_net(forms)
    if h is not None:
        check_thickness((ref.kappa1, ref.kappa2), h)
    gf = growth_functions(ref, forms, target_jet)
    shape = np.shape(gf.l10)
    eye = np.broadcast_to(np.eye(2), shape + (2, 2))
    G = GrowthTensor((gf.l10, gf.l20), (gf.l11, gf.l21), eye, (ref.kappa1, ref.kappa2),
                     (ref.kappa1, ref.kappa2), (ref.E_r, ref.G_r), frame)
    return gf, G


def eta_forms(target_jet: SurfaceJet, P) -> FundamentalForms:
    """Target fundamental forms in η coordinates from ∂θ/∂η (second form needs no second derivatives of θ)."""
    j = target_jet
    e1, e2 = P[..., :, 0], P[..., :, 1]
    t1 = e1[..., 0, None] * j.x1 + e1[..., 1, None] * j.x2
    t2 = e2[..., 0, None] * j.x1 + e2[..., 1, None] * j.x2
    n = j.n
    b = lambda u, v: (u[..., 0] * v[..., 0] * np.einsum("...i,...i->...", j.x11, n)
                      + (u[..., 0] * v[..., 1] + u[..., 1] * v[..., 0]) * np.einsum("...i,...i->...", j.x12, n)
                      + u[..., 1] * v[..., 1] * np.einsum("...i,...i->...", j.x22, n))
    dot = lambda a, c: np.einsum("...i,...i->...", a, c)
    return FundamentalForms(dot(t1, t1), dot(t1, t2), dot(t2, t2), b(e1, e1), b(e1, e2), b(e2, e2))


@dataclass(frozen=True)
class DeformationMaps:
    """First step F₀ (reference → intermediate), second step G₁ and rotation Q, as Cartesian tensors."""

    jac: np.ndarray
    mu0: tuple
    mu1: tuple
    kappa_ref: tuple
    kappa_int: tuple
    int_jet: SurfaceJet = field(repr=False)
    ref_jet: SurfaceJet = field(repr=False)

    def F0(self, Z):
        gi_cov = (self.int_jet.x1, self.int_jet.x2)
        gr_con = dual_basis(self.ref_jet)
        out = np.einsum("...i,...j->...ij", self.int_jet.n, self.ref_jet.n).astype(np.result_type(Z, float))
        for a in range(2):
            for b in range(2):
                ratio = (1.0 - self.kappa_int[a] * Z) / (1.0 - self.kappa_ref[b] * Z)
                out = out + (ratio * self.jac[..., a, b])[..., None, None] * np.einsum("...i,...j->...ij", gi_cov[a], gr_con[b])
        return out

    def G1(self, Z):
        gi_cov = (self.int_jet.x1, self.int_jet.x2)
        gi_con = dual_basis(self.int_jet)
        out = np.einsum("...i,...j->...ij", self.int_jet.n, self.int_jet.n).astype(np.result_type(Z, float))
        for a in range(2):
            mu = self.mu0[a] + Z * self.mu1[a]
            out = out + mu[..., None, None] * np.einsum("...i,...j->...ij", gi_cov[a], gi_con[a])
        return out

    def G1_components(self, Z):
        """Diagonal η-frame components of G₁ (coefficients of g_α(η) ⊗ gᵅ(η))."""
        return tuple(self.mu0[a] + Z * self.mu1[a] for a in range(2))

    @property
    def Q(self):
        unit = lambda v: v / np.linalg.norm(v, axis=-1)[..., None]
        out = np.einsum("...i,...j->...ij", self.int_jet.n, self.ref_jet.n)
        for gi, gr in ((self.int_jet.x1, self.ref_jet.x1), (self.int_jet.x2, self.ref_jet.x2)):
            out = out + np.einsum("...i,...j->...ij", unit(gi), unit(gr))
        return out


def identity_residual(maps: DeformationMaps, G: GrowthTensor, Zs):
    """max over Z of ‖G₁F₀ − QG‖∞ (Cartesian components)."""
    worst = 0.0
    Q = maps.Q
    for Z in Zs:
        lhs = maps.G1(Z) @ maps.F0(Z)
        rhs = Q @ G.spatial(Z)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def growth_general(reference: ParamSurface, target: ParamSurface, net: CurvatureNet, theta, h=None, check=True,
                   intermediate=None):
    """Two-step growth through the intermediate surface S_i = reference(η).

    Returns (DeformationMaps, GrowthTensor in the θ frame, η-frame GrowthFunctions).
    """
    theta = np.asarray(theta, dtype=float)
    ref_jet = jet(reference, theta)
    ref = ReferenceGeometry.from_jet(ref_jet)
    if intermediate is None:
        intermediate = intermediate_surface(reference, net)
    int_jet = intermediate.jet_at_theta(theta)
    inter = ReferenceGeometry.from_jet(int_jet)
    J = net.jac(theta)
    tgt_jet = jet(target, theta)
    forms = eta_forms(tgt_jet, np.linalg.inv(J))
    if check:
        fd = target.mode == "fd" or getattr(getattr(net, "forward_map", None), "mode", "") == "fd"
        tol = FD_NET_TOL if fd else F_TOL
        check_curvature_net(forms, tol, tol)
    if h is not None:
        check_thickness((ref.kappa1, ref.kappa2, inter.kappa1, inter.kappa2), h)
    gf = growth_functions(inter, forms)
    mu0 = (gf.l10 / np.sqrt(inter.E_r), gf.l20 / np.sqrt(inter.G_r))
    mu1 = (gf.l11 / np.sqrt(inter.E_r), gf.l21 / np.sqrt(inter.G_r))
    maps = DeformationMaps(J, mu0, mu1, (ref.kappa1, ref.kappa2), (inter.kappa1, inter.kappa2), int_jet, ref_jet)
    # total tensor: Σ μ_α r_αβ J^α_β √(E*_α/E_rα) g_α(θ)⊗g^β(θ) + n⊗n
    l0 = tuple(mu0[a] * np.sqrt((inter.E_r, inter.G_r)[a]) for a in range(2))
    l1 = tuple(mu1[a] * np.sqrt((inter.E_r, inter.G_r)[a]) for a in range(2))
    G = GrowthTensor(l0, l1, J, (ref.kappa1, ref.kappa2), (inter.kappa1, inter.kappa2), (ref.E_r, ref.G_r), ref_jet)
    return maps, G, gf


@dataclass
class GrowthDesign:
    """A designed growth field: which path was taken and how to sample it."""

    reference: ParamSurface
    target: ParamSurface
    net: CurvatureNet
    h: float
    path: str
    intermediate: object = None

    def __post_init__(self):
        if self.path == "general" and self.intermediate is None:
            self.intermediate = intermediate_surface(self.reference, self.net)

    def sample(self, theta, check=True):
        """(GrowthFunctions, GrowthTensor, DeformationMaps or None) at θ points."""
        theta = np.asarray(theta, dtype=float)
        if self.path == "special":
            rj = jet(self.reference, theta)
            tj = jet(self.target, theta)
            tol = net_tolerance(self.target)
            forms = fundamental_forms(tj)
            if check:
                check_curvature_net(forms, tol, tol)
            gf, G = growth_special(ReferenceGeometry.from_jet(rj), forms, rj, tj, h=self.h, check=False)
            return gf, G, None
        maps, G, gf = growth_general(self.reference, self.target, self.net, theta, h=self.h, check=check,
                                     intermediate=self.intermediate)
        return gf, G, maps


def design(reference: ParamSurface, target: ParamSurface, net: CurvatureNet | None = None, h=0.01,
           net_resolution=(128, 128), seed=None) -> GrowthDesign:
    """Route between the special and general constructions.

    The special path applies when θ curves are already lines of curvature on
    the target; otherwise the supplied net is used, or one is traced.
    """
    if net is None or net.kind == "identity":
        if is_curvature_net(target):
            return GrowthDesign(reference, target, IdentityNet(target.domain), h, "special")
        if net is None:
            net = build_net_numeric(target, net_resolution, seed=seed)
            if net.kind == "identity":
                return GrowthDesign(reference, target, net, h, "special")
    return GrowthDesign(reference, target, net, h, "general")
