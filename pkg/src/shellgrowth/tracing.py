"""Vectorized adaptive Runge–Kutta tracing of line fields.

A line field assigns each point a unit vector defined only up to sign (for
example a principal direction). Streamlines are integrated in arc length with
the Dormand–Prince 5(4) pair; every stage vector is flipped to agree with the
direction the line had at the start of the step, so a line never doubles back
on itself. Each line keeps its own step size.
"""

from __future__ import annotations

import numpy as np

from .errors import IntegrationDiverged

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _align(v, ref):
    s = np.sign(np.einsum("ij,ij->i", v, ref))
    s[s == 0] = 1.0
    return v * s[:, None]


def trace_to_line(field, starts, axis, target, *, rtol=1e-10, atol=1e-12, h0=None,
                  h_min=1e-12, max_steps=20000, max_length=None, land_tol=1e-13):
    """Follow ``field`` from each start until coordinate ``axis`` equals ``target``.

    ``field(points (m,2)) -> (m,2)`` returns unit line directions. The initial
    orientation is the one that moves toward the target line. Returns the
    landing points (m, 2) and the arc length travelled (m,).
    """
    y = np.array(starts, dtype=float).reshape(-1, 2)
    m = y.shape[0]
    gap = target - y[:, axis]
    scale = max(1.0, float(np.max(np.abs(y))) if m else 1.0)
    if max_length is None:
        max_length = 50.0 * scale
    if h0 is None:
        h0 = 0.05 * scale
    length = np.zeros(m)
    done = np.abs(gap) <= land_tol * scale
    y[done, axis] = target
    if done.all():
        return y, length
    ref = np.zeros_like(y)
    d0 = field(y[~done])
    want = np.sign(gap[~done])
    flip = np.sign(d0[:, axis]) * want
    flip[flip == 0] = 1.0
    ref[~done] = d0 * flip[:, None]
    h = np.full(m, h0)
    steps = 0
    while not done.all():
        steps += 1
        if steps > max_steps:
            raise IntegrationDiverged(f"{int((~done).sum())} line(s) exceeded {max_steps} steps")
        idx = np.flatnonzero(~done)
        yi, hi, ri = y[idx], h[idx], ref[idx]
        k = np.empty((7,) + yi.shape)
        k[0] = _align(field(yi), ri)
        for s in range(1, 7):
            inc = sum(_A[s][j] * k[j] for j in range(s))
            k[s] = _align(field(yi + hi[:, None] * inc), ri)
        y5 = yi + hi[:, None] * np.tensordot(_B5, k, axes=1)
        y4 = yi + hi[:, None] * np.tensordot(_B4, k, axes=1)
        tol = atol + rtol * np.maximum(np.abs(yi), np.abs(y5))
        err = np.max(np.abs(y5 - y4) / tol, axis=1)
        ok = err <= 1.0
        before = yi[:, axis] - target
        after = y5[:, axis] - target
        crossed = ok & (np.sign(before) != np.sign(after)) & (np.abs(after) > land_tol * scale)
        # shrink crossing steps onto the target line instead of accepting them
        moved = y5[:, axis] - yi[:, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(moved != 0, -before / moved, 0.5)
        frac = np.clip(frac, 0.05, 0.999999)
        accept = ok & ~crossed
        a_idx = idx[accept]
        y[a_idx] = y5[accept]
        length[a_idx] += hi[accept]
        ref[a_idx] = k[6][accept]
        landed = accept & (np.abs(after) <= land_tol * scale)
        y[idx[landed], axis] = target
        done[idx[landed]] = True
        grow = 0.9 * np.maximum(err, 1e-10) ** -0.2
        h_next = hi * np.clip(grow, 0.2, 5.0)
        h_next = np.where(crossed, hi * frac, h_next)
        # never step past the target when the remaining gap is known to be close
        h[idx] = h_next
        # lines within a hair of the target finish with a straight projection along their direction
        live = idx[~landed]
        gap_now = target - y[live, axis]
        close = (np.abs(gap_now) <= 1e-9 * scale) & (np.abs(ref[live, axis]) > 1e-3)
        if np.any(close):
            c = live[close]
            y[c] = y[c] + ref[c] * (gap_now[close] / ref[c, axis])[:, None]
            y[c, axis] = target
            done[c] = True
            live = live[~close]
        if np.any(h[live] < h_min):
            raise IntegrationDiverged("step size fell below the floor")
        if np.any(length[idx] > max_length):
            raise IntegrationDiverged("a line exceeded the maximum traced length without reaching the seed line")
    return y, length
