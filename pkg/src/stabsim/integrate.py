"""Adaptive Dormand-Prince 5(4) integrator for small complex linear systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StiffnessError

# Dormand & Prince (1980) tableau, 5th-order solution with embedded 4th order.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# difference between the 5th- and 4th-order weights (FSAL stage included)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass
class StepStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    rtol: float = 0.0
    atol: float = 0.0


def dopri5(rhs, y0, s0, s1, *, rtol=1e-10, atol=None, h0=None, on_accept=None, max_steps=1_000_000):
    """Integrate ``y' = rhs(s, y)`` from s0 to s1 (s1 > s0).

    The local error estimate is scaled componentwise by
    ``atol + rtol * max(|y_old|, |y_new|)`` and the RMS of the scaled error
    must not exceed one.  ``on_accept(s, y)`` is called after every accepted
    step.  Returns ``(y, StepStats)``.
    """
    # overflowing trial steps are rejected below, not worth a warning
    with np.errstate(over="ignore", invalid="ignore"):
        return _dopri5(rhs, y0, s0, s1, rtol, atol, h0, on_accept, max_steps)


def _dopri5(rhs, y0, s0, s1, rtol, atol, h0, on_accept, max_steps):
    if atol is None:
        atol = rtol
    y = np.array(y0, dtype=complex)
    stats = StepStats(rtol=rtol, atol=atol)
    span = s1 - s0
    if span <= 0:
        return y, stats
    s = s0
    k1 = rhs(s, y)
    stats.evaluations += 1
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean(np.abs(y / scale) ** 2))
        d1 = np.sqrt(np.mean(np.abs(k1 / scale) ** 2))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6 * span
        h = min(h, span)
    else:
        h = h0
    h_min = 1e-14 * max(1.0, abs(s0), abs(s1))
    last = False
    while True:
        if s + h >= s1:
            h = s1 - s
            last = True
        ks = [k1]
        for i in range(1, 7):
            coeffs = _A[i]
            dy = coeffs[0] * ks[0]
            for j in range(1, i):
                if coeffs[j]:
                    dy = dy + coeffs[j] * ks[j]
            ytmp = y + h * dy
            if i == 6:
                y_new = ytmp
            ks.append(rhs(s + _C[i] * h, ytmp))
        stats.evaluations += 6
        err_vec = _E[0] * ks[0]
        for j in range(2, 7):
            err_vec = err_vec + _E[j] * ks[j]
        err_vec = h * err_vec
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean(np.abs(err_vec / scale) ** 2))
        if not np.isfinite(err):
            err = np.inf
        if err <= 1.0:
            s = s1 if last else s + h
            y = y_new
            k1 = ks[6]
            stats.steps += 1
            if on_accept is not None:
                on_accept(s, y)
            if last:
                return y, stats
            factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
            h *= factor
        else:
            stats.rejected += 1
            last = False
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            if h < h_min:
                raise StiffnessError(f"step size underflow at s = {s:.17g}", s)
        if stats.steps + stats.rejected >= max_steps:
            raise StiffnessError(f"step budget of {max_steps} exhausted at s = {s:.17g}", s)
