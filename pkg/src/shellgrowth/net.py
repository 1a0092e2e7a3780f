"""Curvature-line reparametrization θ ↔ η of a target surface.

A net is represented by a forward map θ → η, its inverse, the Jacobian
∂η/∂θ, and the second-order jet of the inverse map so that target quantities
can be pulled back into η coordinates. Three kinds exist: the identity (the θ
curves are already lines of curvature), caller-supplied closed forms, and a
numeric net built by tracing principal-direction streamlines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator
from scipy.spatial import cKDTree

from .errors import (DomainError, NonBijective, OrientationError, UmbilicEncountered, UmbilicPoint)
from .smooth import SmoothMap
from .surface import (EPS_UMB, FundamentalForms, ParamSurface, SurfaceJet, direction_roots, fundamental_forms,
                      jet, jet_from_arrays, principal_curvatures, quadratic_residual)
from .tracing import trace_to_line

TIE_TOL = 1e-9


@dataclass(frozen=True)
class PrincipalAngles:
    xi1: np.ndarray
    xi2: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    A1s: np.ndarray
    A2s: np.ndarray

    @property
    def d1(self):
        return np.stack([np.cos(self.xi1), np.sin(self.xi1)], -1)

    @property
    def d2(self):
        return np.stack([np.cos(self.xi2), np.sin(self.xi2)], -1)


def order_families(xa, xb):
    """Label the two line directions as (ξ₁, ξ₂).

    ξ₁ is the direction closest to the θ¹ axis (on a tie, the one turned
    counter-clockwise) and is reported in (−π/2, π/2]; ξ₂ is chosen in
    (ξ₁, ξ₁+π) so that the pair is positively oriented.
    """
    wa = np.mod(xa + 0.5 * np.pi, np.pi) - 0.5 * np.pi
    wb = np.mod(xb + 0.5 * np.pi, np.pi) - 0.5 * np.pi
    da, db = np.abs(wa), np.abs(wb)
    tie = np.abs(da - db) < TIE_TOL
    a_first = np.where(tie, wa >= wb, da < db)
    x1 = np.where(a_first, wa, wb)
    other = np.where(a_first, wb, wa)
    x2 = x1 + np.mod(other - x1, np.pi)
    return x1, x2


def _check_umbilic(forms, points=None):
    k1, k2, _, _ = principal_curvatures(forms)
    umb = np.abs(k2 - k1) < EPS_UMB * np.maximum(np.maximum(np.abs(k1), np.abs(k2)), 1.0)
    if np.any(umb):
        if points is None:
            idx = tuple(int(i) for i in np.argwhere(umb)[0])
            raise UmbilicEncountered(f"umbilic point at sample index {idx}")
        loc = np.asarray(points)[umb][0]
        raise UmbilicEncountered(f"umbilic point near θ = {loc}", location=loc)


def principal_angles(forms: FundamentalForms, jac=None, points=None) -> PrincipalAngles:
    """Principal-direction angles in the parameter plane with net scale factors.

    ``A1``, ``A2`` are |∇η¹|, |∇η²| taken from ``jac`` (unit when no net is
    given); ``A1s``, ``A2s`` are the reciprocal factors |∂θ/∂ηᵅ|.
    """
    _check_umbilic(forms, points)
    xa, xb, _ = direction_roots(forms)
    x1, x2 = order_families(xa, xb)
    if jac is None:
        A1 = np.ones_like(x1)
        A2 = np.ones_like(x1)
    else:
        A1 = np.linalg.norm(jac[..., 0, :], axis=-1)
        A2 = np.linalg.norm(jac[..., 1, :], axis=-1)
    s = np.cos(x1) * np.sin(x2) - np.sin(x1) * np.cos(x2)
    return PrincipalAngles(x1, x2, A1, A2, 1.0 / (A1 * s), 1.0 / (A2 * s))


def metric_orthogonality(forms: FundamentalForms, xi1, xi2):
    """|E c₁c₂ + F(c₁s₂+s₁c₂) + G s₁s₂| normalized by the two direction lengths."""
    c1, s1, c2, s2 = np.cos(xi1), np.sin(xi1), np.cos(xi2), np.sin(xi2)
    f = forms
    cross = f.E * c1 * c2 + f.F * (c1 * s2 + s1 * c2) + f.G * s1 * s2
    n1 = f.E * c1 * c1 + 2 * f.F * c1 * s1 + f.G * s1 * s1
    n2 = f.E * c2 * c2 + 2 * f.F * c2 * s2 + f.G * s2 * s2
    return np.abs(cross) / np.sqrt(n1 * n2)


def pullback_jet(target_jet: SurfaceJet, P, T) -> SurfaceJet:
    """Jet of x(θ(η)) given the first (P[i,α]) and second (T[i,(11,12,22)]) partials of θ(η)."""
    d1 = np.stack([target_jet.x1, target_jet.x2], -2)  # (...,2,3) rows x,_i
    hess = np.stack([np.stack([target_jet.x11, target_jet.x12], -2),
                     np.stack([target_jet.x12, target_jet.x22], -2)], -3)  # (...,2,2,3)
    first = np.einsum("...ia,...ik->...ak", P, d1)
    pairs = ((0, 0), (0, 1), (1, 1))
    second = []
    for r, (a, b) in enumerate(pairs):
        term = np.einsum("...i,...j,...ijk->...k", P[..., :, a], P[..., :, b], hess)
        term = term + np.einsum("...i,...ik->...k", T[..., :, r], d1)
        second.append(term)
    return jet_from_arrays(target_jet.p, first, np.stack(second, -2), check=False)


class CurvatureNet:
    """Common interface for θ ↔ η reparametrizations."""

    kind = "abstract"

    def __init__(self, domain):
        self.domain = np.asarray(domain, dtype=float).reshape(2, 2)

    def forward(self, theta):
        raise NotImplementedError

    def inverse(self, eta):
        raise NotImplementedError

    def jac(self, theta):
        """∂ηᵅ/∂θᵝ as (..., 2, 2) with row α, column β."""
        raise NotImplementedError

    def inverse_jet(self, theta):
        """First (P[i,α] = ∂θⁱ/∂ηᵅ) and second (T[i,r], r ∈ 11,12,22) partials of θ(η) at η = forward(θ)."""
        raise NotImplementedError

    def domain_star(self, n=65):
        """Bounding box of the image Ω*_r from the boundary of Ω_r."""
        (a1, b1), (a2, b2) = self.domain
        t = np.linspace(0, 1, n)
        edge = np.concatenate([
            np.stack([a1 + (b1 - a1) * t, np.full(n, a2)], -1),
            np.stack([a1 + (b1 - a1) * t, np.full(n, b2)], -1),
            np.stack([np.full(n, a1), a2 + (b2 - a2) * t], -1),
            np.stack([np.full(n, b1), a2 + (b2 - a2) * t], -1),
        ])
        eta = self.forward(edge)
        return np.stack([eta.min(axis=0), eta.max(axis=0)], -1)

    def contains(self, eta):
        theta = self.inverse(eta)
        (a1, b1), (a2, b2) = self.domain
        tol = 1e-9 * np.max(self.domain[:, 1] - self.domain[:, 0])
        ok = np.all(np.isfinite(theta), axis=-1)
        with np.errstate(invalid="ignore"):
            ok &= (theta[..., 0] >= a1 - tol) & (theta[..., 0] <= b1 + tol)
            ok &= (theta[..., 1] >= a2 - tol) & (theta[..., 1] <= b2 + tol)
        return ok


class IdentityNet(CurvatureNet):
    kind = "identity"

    def forward(self, theta):
        return np.array(theta, dtype=float)

    def inverse(self, eta):
        return np.array(eta, dtype=float)

    def jac(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.broadcast_to(np.eye(2), theta.shape[:-1] + (2, 2)).copy()

    def inverse_jet(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.jac(theta), np.zeros(theta.shape[:-1] + (2, 3))


class ClosedFormNet(CurvatureNet):
    kind = "closed_form"

    def __init__(self, forward_map: SmoothMap, inverse_map: SmoothMap, domain):
        super().__init__(domain)
        self.forward_map = forward_map
        self.inverse_map = inverse_map

    def forward(self, theta):
        return self.forward_map(np.asarray(theta, dtype=float))

    def inverse(self, eta):
        return self.inverse_map(np.asarray(eta, dtype=float))

    def jac(self, theta):
        _, first, _ = self.forward_map.jet(np.asarray(theta, dtype=float))
        return np.swapaxes(first, -1, -2)

    def inverse_jet(self, theta):
        _, first, second = self.inverse_map.jet(self.forward(theta))
        return np.swapaxes(first, -1, -2), np.swapaxes(second, -1, -2)


def _as_map(source, mode, variables):
    if isinstance(source, SmoothMap):
        return source
    if callable(source):
        return SmoothMap(source, mode="dual" if mode == "analytic" else mode)
    return SmoothMap.from_expressions(list(source), variables=variables, mode=mode)


def build_net_closed_form(forward, inverse, domain, *, mode="analytic", check_grid=50) -> ClosedFormNet:
    """Wrap caller-supplied first integrals η(θ) and their inverse θ(η).

    ``forward``/``inverse`` are expression pairs (in t1, t2 and e1, e2), callables
    ``fn(a, b, ns)`` or ready :class:`SmoothMap` objects.
    """
    fwd = _as_map(forward, mode, ("t1", "t2"))
    inv = _as_map(inverse, mode, ("e1", "e2"))
    net = ClosedFormNet(fwd, inv, domain)
    if check_grid:
        (a1, b1), (a2, b2) = net.domain
        g = np.stack(np.meshgrid(np.linspace(a1, b1, check_grid), np.linspace(a2, b2, check_grid), indexing="ij"), -1)
        det = np.linalg.det(net.jac(g))
        if np.any(~(det > 0)):
            raise OrientationError("det(∂η/∂θ) <= 0 on the sampled domain")
    return net


def _edge_points(domain, axis, t):
    """Points on the edge through the corner where coordinate ``axis`` is fixed."""
    corner = domain[:, 0]
    pts = np.empty(np.shape(t) + (2,))
    pts[..., axis] = corner[axis]
    pts[..., 1 - axis] = t
    return pts


class NumericNet(CurvatureNet):
    """Net traced numerically and stored on regular grids.

    The forward map is bilinear on a θ-grid; the inverse is the exact inverse
    of that interpolant (Newton), seeded from a gridded η → θ table. The
    Jacobian uses the exact principal directions at θ with magnitudes read from
    the grid, so the pulled-back target is orthogonal to rounding.
    """

    kind = "numeric"

    def __init__(self, surface: ParamSurface, axes, eta_grid, *, first_family=None, edges=None, seed=None):
        super().__init__(surface.domain)
        self.surface = surface
        self.axes = axes
        self.eta_grid = eta_grid
        self.first_family = first_family
        self.edges = edges
        self.seed = seed
        self._fwd = RegularGridInterpolator(axes, eta_grid, method="linear", bounds_error=False, fill_value=None)
        grads = np.stack([np.stack(np.gradient(eta_grid[..., a], *axes, edge_order=2), -1) for a in range(2)], -2)
        self.grid_jac = grads
        self._grad = RegularGridInterpolator(axes, grads.reshape(grads.shape[:2] + (4,)), method="linear",
                                             bounds_error=False, fill_value=None)
        flat = eta_grid.reshape(-1, 2)
        self._tree = cKDTree(flat)
        self._nodes = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 2)
        box = np.stack([flat.min(axis=0), flat.max(axis=0)], -1)
        n1, n2 = eta_grid.shape[:2]
        self.eta_axes = (np.linspace(box[0, 0], box[0, 1], n1), np.linspace(box[1, 0], box[1, 1], n2))
        ee = np.stack(np.meshgrid(*self.eta_axes, indexing="ij"), -1)
        self.theta_grid = self.inverse(ee)

    # --- direction field -------------------------------------------------
    def angles(self, theta):
        theta = np.asarray(theta, dtype=float)
        f = fundamental_forms(jet(self.surface, theta))
        _check_umbilic(f, theta)
        xa, xb, _ = direction_roots(f)
        x1, x2 = order_families(xa, xb)
        if self.first_family == 2:
            x1, x2 = x2 - np.pi, x1
            x1 = np.mod(x1 + 0.5 * np.pi, np.pi) - 0.5 * np.pi
            x2 = x1 + np.mod(x2 - x1, np.pi)
        return x1, x2

    # --- maps ------------------------------------------------------------
    def forward(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self._fwd(theta.reshape(-1, 2)).reshape(theta.shape)

    def grid_gradient(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self._grad(theta.reshape(-1, 2)).reshape(theta.shape[:-1] + (2, 2))

    def jac(self, theta):
        theta = np.asarray(theta, dtype=float)
        x1, x2 = self.angles(theta)
        nu1 = np.stack([np.sin(x2), -np.cos(x2)], -1)
        nu2 = np.stack([-np.sin(x1), np.cos(x1)], -1)
        g = self.grid_gradient(theta)
        a1 = np.einsum("...i,...i->...", g[..., 0, :], nu1)
        a2 = np.einsum("...i,...i->...", g[..., 1, :], nu2)
        return np.stack([a1[..., None] * nu1, a2[..., None] * nu2], -2)

    def inverse(self, eta, tol=1e-13, max_iter=60):
        eta = np.asarray(eta, dtype=float)
        flat = eta.reshape(-1, 2)
        _, nearest = self._tree.query(flat)
        th = self._nodes[nearest].copy()
        scale = max(1.0, float(np.max(np.abs(self.eta_grid))))
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        span = hi - lo
        for _ in range(max_iter):
            r = self.forward(th) - flat
            if np.all(np.abs(r) <= tol * scale):
                break
            J = self.grid_gradient(th)
            step = np.linalg.solve(J, r[..., None])[..., 0]
            th = th - step
            # stay within a band around the domain so the interpolant is meaningful
            th = np.clip(th, lo - 0.5 * span, hi + 0.5 * span)
        r = np.max(np.abs(self.forward(th) - flat), axis=-1)
        pad = 1e-9 * np.max(span)
        inside = np.all((th >= lo - pad) & (th <= hi + pad), axis=-1) & (r <= 1e-9 * scale)
        th[~inside] = np.nan
        return th.reshape(eta.shape)

    def inverse_jet(self, theta, step=None):
        theta = np.asarray(theta, dtype=float)
        J = self.jac(theta)
        P = np.linalg.inv(J)
        ext = self.domain[:, 1] - self.domain[:, 0]
        delta = (2e-5 * ext) if step is None else np.broadcast_to(step, (2,))
        x1, x2 = self.angles(theta)
        d1 = np.stack([np.cos(x1), np.sin(x1)], -1)
        d2 = np.stack([np.cos(x2), np.sin(x2)], -1)
        grads = []
        for fam in (0, 1):
            g = []
            for axis in (0, 1):
                e = np.zeros(2)
                e[axis] = delta[axis]
                up = self.angles(theta + e)[fam]
                dn = self.angles(theta - e)[fam]
                diff = np.mod(up - dn + 0.5 * np.pi, np.pi) - 0.5 * np.pi
                g.append(diff / (2 * delta[axis]))
            grads.append(np.stack(g, -1))
        perp1 = np.stack([-np.sin(x1), np.cos(x1)], -1)
        perp2 = np.stack([-np.sin(x2), np.cos(x2)], -1)
        B1 = np.linalg.norm(P[..., :, 0], axis=-1)
        B2 = np.linalg.norm(P[..., :, 1], axis=-1)
        dot = lambda a, b: np.einsum("...i,...i->...", a, b)
        # (D d_α) v = perp_α (∇ξ_α · v)
        Dd1_d2 = perp1 * dot(grads[0], d2)[..., None]
        Dd2_d1 = perp2 * dot(grads[1], d1)[..., None]
        Dd1_d1 = perp1 * dot(grads[0], d1)[..., None]
        Dd2_d2 = perp2 * dot(grads[1], d2)[..., None]
        w = (B1 * B2)[..., None] * (Dd2_d1 - Dd1_d2)
        Mmat = np.stack([d1, -d2], -1)
        pq = np.linalg.solve(Mmat, w[..., None])[..., 0]
        r1, r2 = self._scale_derivatives(theta, d1, d2, B1, B2)
        T12 = pq[..., 0:1] * d1 + (B1 * B2)[..., None] * Dd1_d2
        T11 = r1[..., None] * d1 + (B1 * B1)[..., None] * Dd1_d1
        T22 = r2[..., None] * d2 + (B2 * B2)[..., None] * Dd2_d2
        return P, np.stack([T11, T12, T22], -1)

    def _scale_derivatives(self, theta, d1, d2, B1, B2):
        """∂B_α/∂ηᵅ by differencing B_α along its own line; B_α = |∂θ/∂ηᵅ|."""
        h = 0.5 * np.min((self.domain[:, 1] - self.domain[:, 0]) / (np.array(self.eta_grid.shape[:2]) - 1))
        out = []
        for fam, (d, B) in enumerate(((d1, B1), (d2, B2))):
            up = np.linalg.norm(np.linalg.inv(self.jac(theta + h * d))[..., :, fam], axis=-1)
            dn = np.linalg.norm(np.linalg.inv(self.jac(theta - h * d))[..., :, fam], axis=-1)
            out.append(B * (up - dn) / (2 * h))
        return out


def _transversality(field_angles, domain, axis, n=65):
    (a1, b1), (a2, b2) = domain
    lo, hi = domain[1 - axis]
    t = np.linspace(lo, hi, n)
    pts = _edge_points(domain, axis, t)
    xi = field_angles(pts)
    comp = np.cos(xi) if axis == 0 else np.sin(xi)
    return float(np.min(np.abs(comp)))


def degenerate_net(surface: ParamSurface, n=32, tol=1e-12):
    """True when F and M vanish (relative to the forms' scale) on a sample grid."""
    f = fundamental_forms(jet(surface, surface.grid(n, n)))
    rel_f = np.max(np.abs(f.F) / np.sqrt(f.E * f.G))
    rel_m = np.max(np.abs(f.M) / np.sqrt(np.abs(f.L * f.N) + f.M**2 + 1.0))
    return rel_f < tol and rel_m < tol


def build_net_numeric(surface: ParamSurface, resolution=(128, 128), *, gauge: Optional[Callable] = None,
                      first_family=None, rtol=1e-10, atol=1e-12, seed=None, identity_tol=1e-12) -> CurvatureNet:
    """Trace lines of curvature of ``surface`` and tabulate θ → η.

    η² is constant along family-1 lines and η¹ along family-2 lines. Each
    line is followed to a labelling edge through the corner (a₁, a₂); the
    edge used for a family is the one it crosses most transversally. Labels are
    target arc length from the corner along that edge (or ``gauge(points)``
    when supplied), signed so that ηᵅ grows along direction ξᵅ.
    """
    if degenerate_net(surface, tol=identity_tol):
        return IdentityNet(surface.domain)
    dom = surface.domain
    probe = NumericNet.__new__(NumericNet)
    probe.surface, probe.first_family = surface, first_family

    def fam_angle(k):
        return lambda pts: probe.angles(pts)[k]

    def fam_field(k):
        def field(pts):
            xi = probe.angles(pts)[k]
            return np.stack([np.cos(xi), np.sin(xi)], -1)
        return field

    n1, n2 = resolution
    axes = (np.linspace(dom[0, 0], dom[0, 1], n1), np.linspace(dom[1, 0], dom[1, 1], n2))
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 2)
    corner = dom[:, 0]
    x1c, x2c = probe.angles(corner[None, :])
    labels = np.empty((nodes.shape[0], 2))
    edges = {}
    for eta_index, lines_family in ((1, 0), (0, 1)):
        # η² is carried by family-1 lines, η¹ by family-2 lines
        scores = [_transversality(fam_angle(lines_family), dom, axis) for axis in (0, 1)]
        axis = int(np.argmax(scores))
        edges[eta_index] = axis
        ends, _ = trace_to_line(fam_field(lines_family), nodes, axis, corner[axis], rtol=rtol, atol=atol)
        t_hit = ends[:, 1 - axis]
        if gauge is not None:
            labels[:, eta_index] = np.asarray(gauge(ends))[:, eta_index]
            continue
        # ∇η^eta_index is normal to the carrying family; orient so η grows along its own family
        own = x1c[0] if eta_index == 0 else x2c[0]
        carry = x2c[0] if eta_index == 0 else x1c[0]
        grad = np.array([np.sin(carry), -np.cos(carry)])
        if grad @ np.array([np.cos(own), np.sin(own)]) < 0:
            grad = -grad
        sign = 1.0 if grad[1 - axis] > 0 else -1.0
        labels[:, eta_index] = sign * _arc_length(surface, axis, corner, t_hit)
    eta_grid = labels.reshape(n1, n2, 2)
    gj = np.stack([np.stack(np.gradient(eta_grid[..., a], *axes, edge_order=2), -1) for a in range(2)], -2)
    if np.any(~(np.linalg.det(gj) > 0)):
        raise NonBijective("the traced net folds (non-positive Jacobian on the grid)")
    return NumericNet(surface, axes, eta_grid, first_family=first_family, edges=edges, seed=seed)


def _arc_length(surface, axis, corner, t_hit, samples=4097):
    """Signed target arc length along the edge from the corner to each t."""
    lo = min(float(np.min(t_hit)), corner[1 - axis])
    hi = max(float(np.max(t_hit)), corner[1 - axis])
    if hi - lo <= 0:
        return np.zeros_like(t_hit)
    t = np.linspace(lo, hi, samples)
    pts = _edge_points(surface.domain, axis, t)
    _, first, _ = surface.map.jet(pts)
    speed = np.linalg.norm(first[:, 1 - axis, :], axis=-1)
    s = CubicSpline(t, speed).antiderivative()
    return s(t_hit) - s(corner[1 - axis])


@dataclass(frozen=True)
class IntermediateSurface:
    """S_i: the reference map evaluated on η, plus its θ-parametrized composite."""

    reference: ParamSurface
    net: CurvatureNet
    eta_surface: ParamSurface

    def at_theta(self, theta):
        return self.reference(self.net.forward(theta))

    def jet_at_theta(self, theta) -> SurfaceJet:
        """Jet of the η-parametrized S_i at η = forward(θ)."""
        return jet(self.eta_surface, self.net.forward(theta))


def intermediate_surface(reference: ParamSurface, net: CurvatureNet, n=33) -> IntermediateSurface:
    if net.kind == "identity":
        return IntermediateSurface(reference, net, reference)
    box = net.domain_star()
    eta_surface = reference.with_domain(box)
    g = np.stack(np.meshgrid(np.linspace(*box[0], n), np.linspace(*box[1], n), indexing="ij"), -1)
    with np.errstate(all="ignore"):
        vals = reference(g)
    if not np.all(np.isfinite(vals)):
        raise DomainError("the reference map is not finite on the image of the net")
    return IntermediateSurface(reference, net, eta_surface)


__all__ = [
    "PrincipalAngles", "principal_angles", "order_families", "metric_orthogonality", "quadratic_residual",
    "CurvatureNet", "IdentityNet", "ClosedFormNet", "NumericNet", "build_net_closed_form", "build_net_numeric",
    "IntermediateSurface", "intermediate_surface", "pullback_jet", "degenerate_net", "UmbilicPoint",
]
