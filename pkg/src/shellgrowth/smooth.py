"""Two-parameter smooth maps with first and second partial derivatives.

Three derivative modes are offered: ``analytic`` (symbolic differentiation of
expression-language maps, or caller-supplied partials), ``dual`` (hyper-dual
forward differentiation of a generic callable) and ``fd`` (central differences,
switching to one-sided second-order stencils near the domain edge).
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp

from .expr import NUMERIC, compile_vector
from .hyperdual import HyperDual

MODES = ("analytic", "dual", "fd")

# one-sided and centred stencils: (offsets, weights) in units of the step
_D1 = {
    0: ((-1, 0, 1), (-0.5, 0.0, 0.5)),
    1: ((0, 1, 2), (-1.5, 2.0, -0.5)),
    -1: ((0, -1, -2), (1.5, -2.0, 0.5)),
}
_D2 = {
    0: ((-1, 0, 1, 0), (1.0, -2.0, 1.0, 0.0)),
    1: ((0, 1, 2, 3), (2.0, -5.0, 4.0, -1.0)),
    -1: ((0, -1, -2, -3), (2.0, -5.0, 4.0, -1.0)),
}


def _stack(components, shape):
    return np.stack([np.broadcast_to(np.asarray(c, dtype=float), shape) for c in components], axis=-1)


class SmoothMap:
    """A map (t1, t2) -> R^k with derivative access.

    ``fn(t1, t2, ns)`` returns a list of k components; ``ns`` supplies the
    elementary functions so the same callable serves numpy and hyper-dual
    inputs. ``jet_fn(t1, t2)`` may return (value, first, second) directly.
    """

    def __init__(
        self,
        fn: Callable,
        *,
        mode: str = "dual",
        jet_fn: Optional[Callable] = None,
        domain=None,
        fd_steps: Optional[Sequence[float]] = None,
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if mode == "analytic" and jet_fn is None:
            raise ValueError("analytic mode needs jet_fn (or use from_expressions)")
        self.fn = fn
        self.mode = mode
        self.jet_fn = jet_fn
        self.domain = None if domain is None else np.asarray(domain, dtype=float).reshape(2, 2)
        extent = np.ones(2) if self.domain is None else self.domain[:, 1] - self.domain[:, 0]
        if fd_steps is None:
            self.h1 = 1e-5 * extent
            self.h2 = 1e-4 * extent
        else:
            self.h1 = np.broadcast_to(np.asarray(fd_steps[0], float), (2,)).copy()
            self.h2 = np.broadcast_to(np.asarray(fd_steps[1], float), (2,)).copy()

    @classmethod
    def from_expressions(cls, sources, *, variables=("t1", "t2"), mode="analytic", domain=None, fd_steps=None):
        fn = compile_vector(sources, variables)
        jet_fn = symbolic_jet(fn.expressions, variables) if mode == "analytic" else None
        out = cls(fn, mode=mode, jet_fn=jet_fn, domain=domain, fd_steps=fd_steps)
        out.sources = tuple(sources)
        return out

    def with_mode(self, mode):
        sources = getattr(self, "sources", None)
        if sources is not None:
            variables = self.fn.expressions[0].variables
            return type(self).from_expressions(sources, variables=variables, mode=mode, domain=self.domain)
        return type(self)(self.fn, mode=mode, jet_fn=self.jet_fn, domain=self.domain, fd_steps=(self.h1, self.h2))

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return _stack(self.fn(theta[..., 0], theta[..., 1], NUMERIC), theta.shape[:-1])

    def jet(self, theta):
        """Return value (...,k), first partials (...,2,k), second partials (...,3,k) ordered 11, 12, 22."""
        theta = np.asarray(theta, dtype=float)
        if self.mode == "analytic":
            return self.jet_fn(theta[..., 0], theta[..., 1])
        if self.mode == "dual":
            return self._dual_jet(theta)
        return self._fd_jet(theta)

    def _dual_jet(self, theta):
        shape = theta.shape[:-1]
        a, b = theta[..., 0], theta[..., 1]
        one, zero = np.ones(shape), np.zeros(shape)

        def run(s1, s2):
            out = self.fn(HyperDual(a, s1[0], s2[0]), HyperDual(b, s1[1], s2[1]), NUMERIC)
            parts = []
            for c in out:
                if not isinstance(c, HyperDual):
                    c = HyperDual(np.broadcast_to(np.asarray(c, float), shape))
                parts.append(c)
            return parts

        p11 = run((one, zero), (one, zero))
        p22 = run((zero, one), (zero, one))
        p12 = run((one, zero), (zero, one))
        value = _stack([c.re for c in p11], shape)
        first = np.stack([_stack([c.e1 for c in p11], shape), _stack([c.e1 for c in p22], shape)], axis=-2)
        second = np.stack(
            [_stack([c.e12 for c in p11], shape), _stack([c.e12 for c in p12], shape), _stack([c.e12 for c in p22], shape)],
            axis=-2,
        )
        return value, first, second

    def _side(self, theta, axis, reach):
        """Stencil side per point: 0 centred, +1 forward, -1 backward."""
        side = np.zeros(theta.shape[:-1], dtype=int)
        if self.domain is None:
            return side
        lo, hi = self.domain[axis]
        t = theta[..., axis]
        side[t - reach < lo] = 1
        side[t + reach > hi] = -1
        return side

    def _fd_jet(self, theta):
        value = self(theta)
        shape = theta.shape[:-1]
        first, second = [], []
        sides = []
        for axis in range(2):
            side = self._side(theta, axis, 2 * self.h2[axis])
            sides.append(side)
            first.append(self._directional(theta, [(axis, side, _D1, self.h1[axis])]))
        second.append(self._directional(theta, [(0, sides[0], _D2, self.h2[0])]))
        second.append(self._directional(theta, [(0, sides[0], _D1, self.h2[0]), (1, sides[1], _D1, self.h2[1])]))
        second.append(self._directional(theta, [(1, sides[1], _D2, self.h2[1])]))
        del shape
        return value, np.stack(first, axis=-2), np.stack(second, axis=-2)

    def _directional(self, theta, parts):
        """Apply a tensor-product stencil; ``parts`` lists (axis, side, table, step)."""
        per_axis = []
        for axis, side, table, step in parts:
            k = len(table[0][0]) if table is _D1 else 4
            offs = np.zeros(side.shape + (k,))
            wts = np.zeros(side.shape + (k,))
            for s, (o, w) in table.items():
                mask = side == s
                offs[mask] = np.asarray(o, float)
                wts[mask] = np.asarray(w, float)
            per_axis.append((axis, offs * step, wts / (step ** (2 if table is _D2 else 1))))
        total = 0.0
        if len(per_axis) == 1:
            axis, offs, wts = per_axis[0]
            for j in range(offs.shape[-1]):
                pt = theta.copy()
                pt[..., axis] += offs[..., j]
                total = total + wts[..., j, None] * self(pt)
            return total
        (a0, o0, w0), (a1, o1, w1) = per_axis
        for i in range(o0.shape[-1]):
            for j in range(o1.shape[-1]):
                pt = theta.copy()
                pt[..., a0] += o0[..., i]
                pt[..., a1] += o1[..., j]
                total = total + (w0[..., i] * w1[..., j])[..., None] * self(pt)
        return total


def symbolic_jet(expressions, variables=("t1", "t2")):
    """Differentiate expression-language components with sympy and return a vectorized jet function."""
    syms = sp.symbols(variables, real=True)
    comps = [e.symbolic(syms) for e in expressions]
    d1 = [[sp.diff(c, s) for c in comps] for s in syms]
    d2 = [
        [sp.diff(c, syms[0], syms[0]) for c in comps],
        [sp.diff(c, syms[0], syms[1]) for c in comps],
        [sp.diff(c, syms[1], syms[1]) for c in comps],
    ]
    f0 = sp.lambdify(syms, comps, "numpy")
    f1 = sp.lambdify(syms, d1, "numpy")
    f2 = sp.lambdify(syms, d2, "numpy")

    def jet_fn(a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        shape = np.broadcast(a, b).shape
        value = _stack(f0(a, b), shape)
        first = np.stack([_stack(row, shape) for row in f1(a, b)], axis=-2)
        second = np.stack([_stack(row, shape) for row in f2(a, b)], axis=-2)
        return value, first, second

    return jet_fn
