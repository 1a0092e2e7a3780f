"""Built-in shell examples: a cylindrical reference and seven targets.

Every entry grows from the cylinder s = (R₀cosθ¹, R₀sinθ¹, θ²) with R₀ = 4
and half-thickness h = 0.01. Targets with closed-form growth functions carry
an oracle ``oracle(theta, Z) -> (λ₁, λ₂)`` of the combined stretches
λᵅ⁽⁰⁾ + Zλᵅ⁽¹⁾; the helicoid carries a closed-form curvature net as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NoOracle, UnknownEntry
from .net import CurvatureNet, build_net_closed_form
from .surface import ParamSurface

PI = np.pi
R0 = 4.0
H = 0.01
MARGIN = 1e-3


def cylinder(radius=R0, theta0=PI, length=4.0, mode="analytic"):
    r = repr(float(radius))
    return ParamSurface.from_expressions([f"{r}*cos(t1)", f"{r}*sin(t1)", "t2"], [[0.0, theta0], [0.0, length]],
                                         mode=mode, name=f"cylinder(R={radius:g})")


def _melon(theta, Z):
    t2 = theta[..., 1]
    return 8 * np.cos(9 * PI * (t2 - 2) / 40) + 0 * Z, (9 * PI / 40) * (Z + 4) + 0 * t2


def _morning_glory(theta, Z):
    t2 = theta[..., 1]
    q = 4 * t2 * (t2 - 7) + 53
    l1 = 0.5 * (t2 + 1) * (4 - 4 * (2 * t2 - 7) * Z / ((t2 + 1) * np.sqrt(q)) - Z)
    l2 = np.sqrt(t2 * (t2 - 7) + 53 / 4) - 4 * Z / q
    return l1, l2


def _trachea(theta, Z):
    t2 = theta[..., 1]
    q = PI**2 * np.cos(4 * PI * t2) + PI**2 + 50
    l1 = -(Z - 4) * np.sin(2 * PI * t2) / 20 + 4 + Z * (5 * np.sqrt(2) / np.sqrt(q) - 1)
    l2 = np.sqrt(2) / 5 * np.sqrt(q) + 20 * PI**2 * Z * np.sin(2 * PI * t2) / q
    return l1, l2


def _apple(theta, Z):
    t2 = theta[..., 1]
    q = 5 * np.cos(PI * t2) + 13
    l1 = -3 * np.sqrt(2) * Z * np.cos(PI * t2 / 2) / np.sqrt(q) - 2 * (Z - 4) * np.cos(PI * t2 / 4) ** 2
    l2 = PI * (np.sqrt(q) / np.sqrt(2) - 6 * Z / q)
    return l1, l2


def _identity(theta, Z):
    ones = np.ones(np.shape(theta)[:-1])
    return R0 * ones + 0 * Z, ones + 0 * Z


def spiral_g1(eta, Z):
    """Diagonal components of the second-step growth tensor for the helicoid, as functions of η¹ − η²."""
    u = PI * (eta[..., 0] - eta[..., 1])
    ch = np.cosh(u)
    c4 = np.sqrt(np.cosh(u / 2) ** 4)
    g11 = np.sqrt(ch + 1) / 8 - Z * (16 * PI * c4 + ch**2 + 2 * ch + 1) / (32 * (ch + 1) ** 1.5)
    g22 = np.sqrt(ch + 1) / 2 + 2 * PI * Z * c4 / (ch + 1) ** 1.5
    return g11, g22


SPIRAL_FORWARD = ("arcsinh(2*t1)/pi + t2", "-arcsinh(2*t1)/pi + t2")
SPIRAL_INVERSE = ("sinh(pi*(e1 - e2)/2)/2", "(e1 + e2)/2")


def _spiral_oracle(theta, Z):
    t1, t2 = theta[..., 0], theta[..., 1]
    eta = np.stack([np.arcsinh(2 * t1) / PI + t2, -np.arcsinh(2 * t1) / PI + t2], -1)
    g11, g22 = spiral_g1(eta, Z)
    # stretches relative to the intermediate cylinder: √E* = R₀, √G* = 1
    return R0 * g11, g22


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    title: str
    target_exprs: tuple
    theta0: float
    length: float
    path: str
    oracle: Optional[Callable] = None
    net_exprs: Optional[tuple] = None
    pole_bands: tuple = ()
    notes: str = ""
    radius: float = R0
    h: float = H
    margin: float = MARGIN

    @property
    def domain(self):
        return np.array([[0.0, self.theta0], [0.0, self.length]])

    def reference(self, mode="analytic") -> ParamSurface:
        return cylinder(self.radius, self.theta0, self.length, mode)

    def target(self, mode="analytic") -> ParamSurface:
        return ParamSurface.from_expressions(list(self.target_exprs), self.domain, mode=mode, name=self.name)

    def net(self, mode="analytic") -> Optional[CurvatureNet]:
        if self.net_exprs is None:
            return None
        return build_net_closed_form(self.net_exprs[0], self.net_exprs[1], self.domain, mode=mode)

    @property
    def has_oracle(self):
        return self.oracle is not None

    def axis_samples(self, axis, n):
        """n sample values along one parameter axis, avoiding the margin and any pole band."""
        lo, hi = self.domain[axis]
        lo, hi = lo + self.margin, hi - self.margin
        bands = sorted((c - w, c + w) for ax, c, w in self.pole_bands if ax == axis)
        pieces, start = [], lo
        for a, b in bands:
            pieces.append((start, a))
            start = b
        pieces.append((start, hi))
        total = sum(b - a for a, b in pieces)
        counts = [max(2, int(round(n * (b - a) / total))) for a, b in pieces]
        counts[-1] = n - sum(counts[:-1])
        return np.concatenate([np.linspace(a, b, c) for (a, b), c in zip(pieces, counts)])

    def sample_grid(self, n1=30, n2=30):
        u = self.axis_samples(0, n1)
        v = self.axis_samples(1, n2)
        return np.stack(np.meshgrid(u, v, indexing="ij"), -1)


_ENTRIES = {
    "sweet_melon": CatalogEntry(
        "sweet_melon", "Sweet melon",
        ("4*cos(2*t1)*cos(9*pi*(t2 - 2)/40)", "4*sin(2*t1)*cos(9*pi*(t2 - 2)/40)", "-4*cos(pi*(9*t2 + 2)/40)"),
        PI, 4.0, "special", _melon, notes="sphere of radius 4 without its polar caps"),
    "morning_glory": CatalogEntry(
        "morning_glory", "Morning glory",
        ("-(1 + t2)*cos(2*t1)", "-(1 + t2)*sin(2*t1)", "6 - (7 - 2*t2)**2/8"),
        PI, 4.0, "special", _morning_glory, notes="paraboloid-like trumpet"),
    "trachea": CatalogEntry(
        "trachea", "Trachea",
        ("cos(t1)*(20 + sin(2*pi*t2))/5", "sin(t1)*(20 + sin(2*pi*t2))/5", "2*(2 + t2)"),
        2 * PI, 4.0, "special", _trachea, notes="corrugated tube"),
    "apple": CatalogEntry(
        "apple", "Apple",
        ("8*cos(t1)*cos(pi*t2/4)**2", "8*sin(t1)*cos(pi*t2/4)**2", "-6*sin(pi*t2/2)"),
        2 * PI, 4.0, "special", _apple, pole_bands=((1, 2.0, 0.1),), notes="closes at a pole where θ² = 2"),
    "spiral_cactus": CatalogEntry(
        "spiral_cactus", "Spiral cactus",
        ("2*t1/pi*sin(pi*t2)", "2*t1/pi*cos(pi*t2)", "t2"),
        PI, 4.0, "general", _spiral_oracle, net_exprs=(SPIRAL_FORWARD, SPIRAL_INVERSE),
        notes="helicoid; closed-form curvature net"),
    "pumpkin_tendril": CatalogEntry(
        "pumpkin_tendril", "Pumpkin tendril",
        ("(cos(t1) + 2)*cos(pi*t2/2)", "(cos(t1) + 2)*sin(pi*t2/2)", "sin(t1) + t2"),
        2 * PI, 8.0, "general", None, notes="coiled tube; curvature net traced numerically"),
    "identity_cylinder": CatalogEntry(
        "identity_cylinder", "Identity cylinder",
        ("4*cos(t1)", "4*sin(t1)", "t2"),
        2 * PI, 4.0, "special", _identity, notes="target equals reference; growth is the identity"),
}


def names():
    return list(_ENTRIES)


def get(name) -> CatalogEntry:
    try:
        return _ENTRIES[name]
    except KeyError:
        raise UnknownEntry(f"unknown catalog entry {name!r}; choose from {', '.join(_ENTRIES)}") from None


def oracle_compare(entry: CatalogEntry, functions, theta, Zs=None):
    """Max |λᵢ − oracle λᵢ| over the θ samples and Z ∈ {0, h, 2h}."""
    if entry.oracle is None:
        raise NoOracle(f"{entry.name} has no closed-form growth functions")
    Zs = (0.0, entry.h, 2 * entry.h) if Zs is None else Zs
    worst = 0.0
    for Z in Zs:
        got = functions.combined(Z)
        want = entry.oracle(np.asarray(theta, dtype=float), Z)
        for a, b in zip(got, want):
            worst = max(worst, float(np.max(np.abs(np.asarray(a) - np.asarray(b)))))
    return worst


def describe():
    """One text line per entry: name, domain, path and oracle availability."""
    lines = []
    for e in _ENTRIES.values():
        (a1, b1), (a2, b2) = e.domain
        oracle = "growth oracle" if e.oracle is not None else "no oracle"
        net = ", closed-form net" if e.net_exprs else ""
        lines.append(f"{e.name:<18} θ¹∈[{a1:g}, {b1:.6g}] θ²∈[{a2:g}, {b2:g}]  {e.path} path, {oracle}{net}")
    return lines
