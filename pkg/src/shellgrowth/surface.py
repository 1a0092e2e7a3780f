"""Pointwise differential geometry of parametric surfaces.

All functions are vectorized: parameter points are arrays of shape (..., 2) and
every returned field carries the same leading shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSurface
from .smooth import SmoothMap

EPS_REG = 1e-10
EPS_UMB = 1e-7


@dataclass(frozen=True)
class ParamSurface:
    """A twice-differentiable map from a parameter rectangle into R³."""

    map: SmoothMap
    domain: np.ndarray
    name: str = ""
    char_length: float = 1.0

    @classmethod
    def from_expressions(cls, sources, domain, mode="analytic", name="", fd_steps=None, char_length=1.0):
        if len(sources) != 3:
            raise ValueError("a surface needs exactly three component expressions")
        dom = np.asarray(domain, dtype=float).reshape(2, 2)
        smap = SmoothMap.from_expressions(sources, mode=mode, domain=dom, fd_steps=fd_steps)
        return cls(smap, dom, name, char_length)

    @classmethod
    def from_callable(cls, fn, domain, mode="dual", jet_fn=None, name="", fd_steps=None, char_length=1.0):
        dom = np.asarray(domain, dtype=float).reshape(2, 2)
        smap = SmoothMap(fn, mode=mode, jet_fn=jet_fn, domain=dom, fd_steps=fd_steps)
        return cls(smap, dom, name, char_length)

    @property
    def mode(self):
        return self.map.mode

    def with_mode(self, mode):
        return ParamSurface(self.map.with_mode(mode), self.domain, self.name, self.char_length)

    def with_domain(self, domain):
        dom = np.asarray(domain, dtype=float).reshape(2, 2)
        smap = self.map
        sources = getattr(smap, "sources", None)
        if sources is not None:
            smap = SmoothMap.from_expressions(sources, mode=smap.mode, domain=dom)
        else:
            smap = SmoothMap(smap.fn, mode=smap.mode, jet_fn=smap.jet_fn, domain=dom)
        return ParamSurface(smap, dom, self.name, self.char_length)

    def __call__(self, theta):
        return self.map(theta)

    def transformed(self, rotation, translation=(0.0, 0.0, 0.0)):
        """The same surface moved by x -> R x + t."""
        R = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
        inner = self.map

        def fn(a, b, ns):
            c = inner.fn(a, b, ns)
            return [R[i, 0] * c[0] + R[i, 1] * c[1] + R[i, 2] * c[2] + t[i] for i in range(3)]

        jet_fn = None
        if inner.jet_fn is not None:
            def jet_fn(a, b):
                v, d1, d2 = inner.jet_fn(a, b)
                return v @ R.T + t, d1 @ R.T, d2 @ R.T

        smap = SmoothMap(fn, mode=inner.mode, jet_fn=jet_fn, domain=inner.domain, fd_steps=(inner.h1, inner.h2))
        return ParamSurface(smap, self.domain, self.name, self.char_length)

    def grid(self, n1, n2, margin=0.0):
        """Regular (n1, n2, 2) grid of parameter points, shrunk by ``margin`` at each edge."""
        (a1, b1), (a2, b2) = self.domain
        u = np.linspace(a1 + margin, b1 - margin, n1)
        v = np.linspace(a2 + margin, b2 - margin, n2)
        return np.stack(np.meshgrid(u, v, indexing="ij"), axis=-1)


@dataclass(frozen=True)
class SurfaceJet:
    p: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    x11: np.ndarray
    x12: np.ndarray
    x22: np.ndarray
    n: np.ndarray
    area: np.ndarray = field(repr=False)

    @property
    def d1(self):
        return np.stack([self.x1, self.x2], axis=-2)

    @property
    def d2(self):
        return np.stack([self.x11, self.x12, self.x22], axis=-2)


def jet_from_arrays(value, first, second, eps_reg=EPS_REG, check=True):
    x1, x2 = first[..., 0, :], first[..., 1, :]
    cross = np.cross(x1, x2)
    area = np.linalg.norm(cross, axis=-1)
    if check and np.any(~(area > eps_reg)):
        bad = np.argwhere(~(area > eps_reg))
        raise DegenerateSurface(f"|x,1 ^ x,2| <= {eps_reg:g} at {bad.shape[0]} point(s)")
    with np.errstate(invalid="ignore", divide="ignore"):
        n = cross / area[..., None]
    return SurfaceJet(value, x1, x2, second[..., 0, :], second[..., 1, :], second[..., 2, :], n, area)


def jet(surface: ParamSurface, theta, check=True) -> SurfaceJet:
    """Point, first and second partials and unit normal at ``theta``."""
    value, first, second = surface.map.jet(np.asarray(theta, dtype=float))
    return jet_from_arrays(value, first, second, EPS_REG * surface.char_length**2, check)


@dataclass(frozen=True)
class FundamentalForms:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray

    def first(self):
        return np.stack([np.stack([self.E, self.F], -1), np.stack([self.F, self.G], -1)], -2)

    def second(self):
        return np.stack([np.stack([self.L, self.M], -1), np.stack([self.M, self.N], -1)], -2)

    @property
    def det_first(self):
        return self.E * self.G - self.F**2

    def shape_operator(self):
        """Mixed components K^α_β = g^{αγ} b_{γβ}."""
        return np.linalg.solve(self.first(), self.second())


def fundamental_forms(j: SurfaceJet) -> FundamentalForms:
    dot = lambda a, b: np.einsum("...i,...i->...", a, b)
    return FundamentalForms(
        dot(j.x1, j.x1), dot(j.x1, j.x2), dot(j.x2, j.x2),
        dot(j.x11, j.n), dot(j.x12, j.n), dot(j.x22, j.n),
    )


def dual_basis(j: SurfaceJet, forms: FundamentalForms | None = None):
    """Contravariant tangent vectors g¹, g² with gᵅ·g_β = δ."""
    f = forms or fundamental_forms(j)
    det = f.det_first[..., None]
    g1 = (f.G[..., None] * j.x1 - f.F[..., None] * j.x2) / det
    g2 = (f.E[..., None] * j.x2 - f.F[..., None] * j.x1) / det
    return g1, g2


def normal_derivatives(j: SurfaceJet, forms: FundamentalForms | None = None):
    """Weingarten relations n,α = −b_αβ g^β."""
    f = forms or fundamental_forms(j)
    g1, g2 = dual_basis(j, f)
    n1 = -(f.L[..., None] * g1 + f.M[..., None] * g2)
    n2 = -(f.M[..., None] * g1 + f.N[..., None] * g2)
    return n1, n2


def normal_curvature(forms: FundamentalForms, xi):
    c, s = np.cos(xi), np.sin(xi)
    num = forms.L * c * c + 2 * forms.M * c * s + forms.N * s * s
    den = forms.E * c * c + 2 * forms.F * c * s + forms.G * s * s
    return num / den


def direction_roots(forms: FundamentalForms):
    """Both roots of (LF−ME)cos²ξ + (LG−NE)cosξ sinξ + (MG−NF)sin²ξ = 0.

    Written in the doubled angle, the quadratic reads
    ½(a+c) + ½(a−c)cos2ξ + ½b sin2ξ = 0, which avoids dividing by a leading
    coefficient that may vanish. Returns (ξa, ξb, scale) where ``scale`` is
    the largest coefficient magnitude (zero at umbilics).
    """
    f = forms
    a = f.L * f.F - f.M * f.E
    b = f.L * f.G - f.N * f.E
    c = f.M * f.G - f.N * f.F
    R = 0.5 * np.hypot(a - c, b)
    phi = np.arctan2(b, a - c)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.clip(-0.5 * (a + c) / R, -1.0, 1.0)
    ratio = np.where(R > 0, ratio, 0.0)
    spread = np.arccos(ratio)
    xa = 0.5 * (phi + spread)
    xb = 0.5 * (phi - spread)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.abs(c))
    return xa, xb, scale


def quadratic_residual(forms: FundamentalForms, xi):
    f = forms
    a = f.L * f.F - f.M * f.E
    b = f.L * f.G - f.N * f.E
    c = f.M * f.G - f.N * f.F
    cs, sn = np.cos(xi), np.sin(xi)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.abs(c))
    return np.abs(a * cs * cs + b * cs * sn + c * sn * sn) / np.where(scale > 0, scale, 1.0)


@dataclass(frozen=True)
class CurvatureData:
    kappa1: np.ndarray
    kappa2: np.ndarray
    H: np.ndarray
    K: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    umbilic: np.ndarray


def principal_curvatures(forms: FundamentalForms):
    f = forms
    det = f.det_first
    H = (f.E * f.N - 2 * f.F * f.M + f.G * f.L) / (2 * det)
    K = (f.L * f.N - f.M**2) / det
    root = np.sqrt(np.maximum(H * H - K, 0.0))
    # the smaller-magnitude root via K/κ avoids cancellation
    big = np.where(H >= 0, H + root, H - root)
    with np.errstate(invalid="ignore", divide="ignore"):
        small = np.where(big != 0, K / big, 0.0)
    k1 = np.minimum(big, small)
    k2 = np.maximum(big, small)
    return k1, k2, H, K


def curvature(forms: FundamentalForms, eps_umb=EPS_UMB) -> CurvatureData:
    """Principal curvatures (κ₁ ≤ κ₂), H, K and the direction angle of each κ.

    At umbilics the directions are arbitrary; 0 and π/2 are reported and the
    ``umbilic`` flag is set.
    """
    k1, k2, H, K = principal_curvatures(forms)
    umb = np.abs(k2 - k1) < eps_umb * np.maximum(np.maximum(np.abs(k1), np.abs(k2)), 1.0)
    xa, xb, _ = direction_roots(forms)
    ka = normal_curvature(forms, xa)
    kb = normal_curvature(forms, xb)
    a_is_first = np.abs(ka - k1) <= np.abs(kb - k1)
    xi1 = np.where(umb, 0.0, np.where(a_is_first, xa, xb))
    xi2 = np.where(umb, 0.5 * np.pi, np.where(a_is_first, xb, xa))
    return CurvatureData(k1, k2, H, K, _wrap_line(xi1), _wrap_line(xi2), umb)


def _wrap_line(xi):
    """Map a line angle into (−π/2, π/2]."""
    w = np.mod(xi + 0.5 * np.pi, np.pi) - 0.5 * np.pi
    return np.where(np.isclose(w, -0.5 * np.pi, atol=1e-15, rtol=0), 0.5 * np.pi, w)
