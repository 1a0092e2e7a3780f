"""Hyper-dual numbers a + b·ε₁ + c·ε₂ + d·ε₁ε₂ with ε₁² = ε₂² = 0.

Seeding ε₁ and ε₂ on two inputs yields exact first partials in the ε parts and
the exact mixed second partial in the ε₁ε₂ part. Components are numpy arrays,
so one evaluation differentiates a whole grid.
"""

from __future__ import annotations

import numpy as np


class HyperDual:
    __slots__ = ("re", "e1", "e2", "e12")
    __array_priority__ = 1000

    def __init__(self, re, e1=0.0, e2=0.0, e12=0.0):
        self.re = np.asarray(re, dtype=float)
        self.e1 = np.asarray(e1, dtype=float)
        self.e2 = np.asarray(e2, dtype=float)
        self.e12 = np.asarray(e12, dtype=float)

    def __repr__(self):
        return f"HyperDual({self.re!r}, {self.e1!r}, {self.e2!r}, {self.e12!r})"

    def _chain(self, f0, f1, f2):
        # f(a + δ) with derivative values f0, f1 = f', f2 = f'' at a
        return HyperDual(f0, f1 * self.e1, f1 * self.e2, f1 * self.e12 + f2 * self.e1 * self.e2)

    def __add__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(self.re + other.re, self.e1 + other.e1, self.e2 + other.e2, self.e12 + other.e12)
        return HyperDual(self.re + other, self.e1, self.e2, self.e12)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.re, -self.e1, -self.e2, -self.e12)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(
                self.re * other.re,
                self.re * other.e1 + self.e1 * other.re,
                self.re * other.e2 + self.e2 * other.re,
                self.re * other.e12 + self.e1 * other.e2 + self.e2 * other.e1 + self.e12 * other.re,
            )
        return HyperDual(self.re * other, self.e1 * other, self.e2 * other, self.e12 * other)

    __rmul__ = __mul__

    def reciprocal(self):
        r = 1.0 / self.re
        return self._chain(r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other):
        if isinstance(other, HyperDual):
            return self * other.reciprocal()
        return HyperDual(self.re / other, self.e1 / other, self.e2 / other, self.e12 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, HyperDual):
            return exp(p * log(self))
        p = float(p)
        if p == 0.0:
            return HyperDual(np.ones_like(self.re))
        if p == int(p) and p > 0:
            # integer powers stay valid for negative bases
            out = self
            for _ in range(int(p) - 1):
                out = out * self
            return out
        a = self.re
        return self._chain(a**p, p * a ** (p - 1), p * (p - 1) * a ** (p - 2))

    def __rpow__(self, base):
        return exp(self * np.log(base))


def _lift(x):
    return x if isinstance(x, HyperDual) else None


def sin(x):
    if _lift(x) is None:
        return np.sin(x)
    s, c = np.sin(x.re), np.cos(x.re)
    return x._chain(s, c, -s)


def cos(x):
    if _lift(x) is None:
        return np.cos(x)
    s, c = np.sin(x.re), np.cos(x.re)
    return x._chain(c, -s, -c)


def sinh(x):
    if _lift(x) is None:
        return np.sinh(x)
    s, c = np.sinh(x.re), np.cosh(x.re)
    return x._chain(s, c, s)


def cosh(x):
    if _lift(x) is None:
        return np.cosh(x)
    s, c = np.sinh(x.re), np.cosh(x.re)
    return x._chain(c, s, c)


def exp(x):
    if _lift(x) is None:
        return np.exp(x)
    e = np.exp(x.re)
    return x._chain(e, e, e)


def log(x):
    if _lift(x) is None:
        return np.log(x)
    a = x.re
    return x._chain(np.log(a), 1.0 / a, -1.0 / (a * a))


def sqrt(x):
    if _lift(x) is None:
        return np.sqrt(x)
    r = np.sqrt(x.re)
    return x._chain(r, 0.5 / r, -0.25 / (r * x.re))


def arcsinh(x):
    if _lift(x) is None:
        return np.arcsinh(x)
    a = x.re
    q = 1.0 + a * a
    return x._chain(np.arcsinh(a), 1.0 / np.sqrt(q), -a / q**1.5)


def tan(x):
    if _lift(x) is None:
        return np.tan(x)
    t = np.tan(x.re)
    s2 = 1.0 + t * t
    return x._chain(t, s2, 2.0 * t * s2)


def arctan(x):
    if _lift(x) is None:
        return np.arctan(x)
    a = x.re
    q = 1.0 + a * a
    return x._chain(np.arctan(a), 1.0 / q, -2.0 * a / (q * q))


def power(x, p):
    if isinstance(x, HyperDual) or isinstance(p, HyperDual):
        return x**p
    return np.power(x, p)


pi = np.pi
