"""Bound-state amplitudes during the pulse and the resulting ionization.

In the frame rotating with E1 + omega1 and in normalized time s = t / tau the
amplitudes obey ``i dA/ds = theta * H(s) A`` with

    H11 = -(1/4) f^2 [a1(w1) + x a1(w2)]
    H22 = delta - (1/4) f^2 [a2(w1) + x a2(w2)]
    H12 = H21 = -(sqrt(x)/4) f^2 a12

and, for three levels, level 3 sharing the delta reference of level 2,

    H33 = delta - (1/4) f^2 [a3(w1) + x a3(w2)]
    H13 = H31 = -(sqrt(x)/4) f^2 a13
    H23 = H32 = -(1/4) f^2 [a23(w1) + x a23(w2)]

where f(s) is the common envelope.  Rectangular pulses are solved in closed
form; everything else is integrated numerically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .atoms import AtomDataset
from .dressed import DrivePoint, level_energies
from .integrate import dopri5
from .pulses import PURE_SIN2, RECTANGULAR, EnvelopeSpec

DEFAULT_TOL = 1e-10
TOL_RANGE = (1e-13, 1e-6)
ANALYTIC = "analytic"
ODE = "ode"


@dataclass(frozen=True)
class Outcome:
    """Level populations after the pulse.  ``w_i = 1 - w_res`` exactly."""

    w1: float
    w2: float
    w3: Optional[float] = None
    method: str = ANALYTIC
    ode_stats: Optional[dict] = None
    point: Optional[DrivePoint] = None
    envelope: Optional[EnvelopeSpec] = None
    w_res: float = field(init=False)
    w_i: float = field(init=False)

    def __post_init__(self):
        w_res = self.w1 + self.w2 + (self.w3 or 0.0)
        object.__setattr__(self, "w_res", w_res)
        object.__setattr__(self, "w_i", 1.0 - w_res)

    @property
    def levels(self) -> int:
        return 2 if self.w3 is None else 3

    CSV_COLUMNS = ("x", "delta", "theta", "shape", "a", "levels", "w1", "w2", "w3", "w_res", "w_i")

    def csv_row(self):
        p, env = self.point, self.envelope or EnvelopeSpec.rectangular()
        return (p.x if p else None, p.delta if p else None, p.theta if p else None,
                str(env).split(":")[0], env.a, self.levels,
                self.w1, self.w2, self.w3, self.w_res, self.w_i)


def _sinc(z):
    if abs(z) < 1e-4:
        z2 = z * z
        return 1 - z2 / 6 + z2 * z2 / 120
    return cmath.sin(z) / z


@dataclass(frozen=True)
class RectangularSolution:
    """Quasienergy superposition C_k(t) = A_k+ exp(-i y+ t) + A_k- exp(-i y- t).

    ``y_plus``/``y_minus`` use the principal square root for the splitting
    ``d`` (y+- = center +- d/2), not the width ordering.
    """

    A1_plus: complex
    A1_minus: complex
    A2_plus: complex
    A2_minus: complex
    y_plus: complex
    y_minus: complex

    def amplitudes(self, t):
        ep, em = cmath.exp(-1j * self.y_plus * t), cmath.exp(-1j * self.y_minus * t)
        return (self.A1_plus * ep + self.A1_minus * em,
                self.A2_plus * ep + self.A2_minus * em)


def amplitudes_rectangular(ds: AtomDataset, point: DrivePoint) -> RectangularSolution:
    e1, e2 = level_energies(ds, point.x, point.delta)
    dt = e2 - e1
    d = cmath.sqrt(dt * dt + 0.25 * ds.a12 * ds.a12 * point.x)
    if d == 0:
        raise ValueError("quasienergies are degenerate (branch point); no superposition exists")
    center = 0.5 * (e1 + e2)
    r = dt / d
    c2 = math.sqrt(point.x) * ds.a12 / (4 * d)
    return RectangularSolution(0.5 * (1 - r), 0.5 * (1 + r), -c2, c2,
                               center + 0.5 * d, center - 0.5 * d)


def _rect_amplitudes(ds: AtomDataset, point: DrivePoint):
    theta = point.theta
    if theta == 0:
        return 1 + 0j, 0j
    e1, e2 = level_energies(ds, point.x, point.delta)
    dt = e2 - e1
    d2 = dt * dt + 0.25 * ds.a12 * ds.a12 * point.x
    phi = 0.5 * theta * cmath.sqrt(d2)
    center = 0.5 * (e1 + e2)
    h12 = 0.25 * math.sqrt(point.x) * ds.a12
    if abs(phi) < 1.0:
        # entire functions of phi^2: no 0/0 at the branch point d = 0
        ph = cmath.exp(-1j * center * theta)
        sinc = _sinc(phi)
        a1 = ph * (cmath.cos(phi) + 0.5j * dt * theta * sinc)
        a2 = ph * 1j * h12 * theta * sinc
    else:
        # exponential form keeps every factor bounded for long pulses
        d = 2 * phi / theta
        ep = cmath.exp(-1j * (center + 0.5 * d) * theta)
        em = cmath.exp(-1j * (center - 0.5 * d) * theta)
        r = dt / d
        a1 = 0.5 * ((1 - r) * ep + (1 + r) * em)
        a2 = h12 / d * (em - ep)
    return a1, a2


def propagate_rectangular(ds: AtomDataset, point: DrivePoint) -> Outcome:
    """Closed-form populations after a rectangular pulse, starting in level 1."""
    a1, a2 = _rect_amplitudes(ds, point)
    return Outcome(abs(a1) ** 2, abs(a2) ** 2, None, ANALYTIC, None, point,
                   EnvelopeSpec.rectangular())


# --------------------------------------------------------------------------
# numerical propagation

def envelope_function(spec: EnvelopeSpec):
    """Fast scalar f(s) valid on the support (no bounds check)."""
    if spec.shape == RECTANGULAR:
        return lambda s: 1.0
    n = spec.norm
    if spec.shape == PURE_SIN2:
        def f(s):
            return math.cos(math.pi * n * s) ** 2
        return f
    a = spec.a

    def f(s):
        u = math.cos(math.pi * n * s) ** 2
        return (1 + a) * u / (1 + a * u)
    return f


def coupling_matrices(ds: AtomDataset, x: float, delta: float, levels: int):
    """(P, Q) with H(s) = P + f(s)^2 Q in the rotated frame."""
    if levels not in (2, 3):
        raise ValueError("levels must be 2 or 3")
    if levels == 3 and ds.levels != 3:
        raise ValueError(f"dataset {ds.name} has no third level")
    sx = math.sqrt(x)
    P = np.zeros((levels, levels), dtype=complex)
    Q = np.zeros((levels, levels), dtype=complex)
    P[1, 1] = delta
    Q[0, 0] = -0.25 * (ds.a1w1 + x * ds.a1w2)
    Q[1, 1] = -0.25 * (ds.a2w1 + x * ds.a2w2)
    Q[0, 1] = Q[1, 0] = -0.25 * sx * ds.a12
    if levels == 3:
        P[2, 2] = delta
        Q[2, 2] = -0.25 * (ds.a3w1 + x * ds.a3w2)
        Q[0, 2] = Q[2, 0] = -0.25 * sx * ds.a13
        Q[1, 2] = Q[2, 1] = -0.25 * (ds.a23w1 + x * ds.a23w2)
    return P, Q


def _check_tol(tol):
    lo, hi = TOL_RANGE
    if not lo <= tol <= hi:
        raise ValueError(f"tolerance {tol} outside [{lo:g}, {hi:g}]")


def _integrate(P, Q, scale, envelope, tol, t_scale=1.0):
    # i dA/dt = scale * (P + f(t / t_scale)^2 Q) A on the envelope support
    n = P.shape[0]
    f = envelope_function(envelope)
    M0 = -1j * scale * P
    Mq = -1j * scale * Q
    half = envelope.half_support * t_scale

    def rhs(t, A):
        f2 = f(t / t_scale) ** 2
        return M0 @ A + f2 * (Mq @ A)

    worst = [0.0]
    last = [1.0]

    def on_accept(t, A):
        norm = float(np.vdot(A, A).real)
        worst[0] = max(worst[0], norm - last[0])
        last[0] = norm

    A0 = np.zeros(n, dtype=complex)
    A0[0] = 1.0
    A, stats = dopri5(rhs, A0, -half, half, rtol=tol, atol=tol, on_accept=on_accept)
    info = {"steps": stats.steps, "rejected": stats.rejected,
            "evaluations": stats.evaluations, "tolerance": tol,
            "max_norm_increase": worst[0]}
    return A, info


def _outcome_from(A, info, point, envelope):
    w = [float(abs(v) ** 2) for v in A]
    return Outcome(w[0], w[1], w[2] if len(w) == 3 else None, ODE, info, point, envelope)


def propagate_ode(ds: AtomDataset, point: DrivePoint, envelope: EnvelopeSpec = None,
                  levels: int = 2, tol: float = DEFAULT_TOL) -> Outcome:
    """Integrate the amplitude equations through the pulse, starting in level 1.

    ``ode_stats`` records accepted/rejected steps and the largest increase of
    the total bound population between accepted steps (zero for exact
    continuum loss; of order ``tol`` numerically).
    """
    _check_tol(tol)
    envelope = envelope or EnvelopeSpec.rectangular()
    P, Q = coupling_matrices(ds, point.x, point.delta, levels)
    if point.theta == 0:
        A = np.zeros(levels, dtype=complex)
        A[0] = 1.0
        info = {"steps": 0, "rejected": 0, "evaluations": 0, "tolerance": tol,
                "max_norm_increase": 0.0}
        return _outcome_from(A, info, point, envelope)
    A, info = _integrate(P, Q, point.theta, envelope, tol)
    return _outcome_from(A, info, point, envelope)


def propagate(ds: AtomDataset, point: DrivePoint, envelope: EnvelopeSpec = None,
              levels: int = 2, tol: float = DEFAULT_TOL) -> Outcome:
    """Analytic solution where it exists (2 levels, rectangular), ODE otherwise."""
    envelope = envelope or EnvelopeSpec.rectangular()
    if levels == 2 and envelope.shape == RECTANGULAR:
        return propagate_rectangular(ds, point)
    return propagate_ode(ds, point, envelope, levels, tol)


# --------------------------------------------------------------------------
# scaling in absolute units

@dataclass(frozen=True)
class AbsoluteParams:
    """Detuning, squared peak fields and duration in atomic units."""

    delta_abs: float
    eps1_sq: float
    eps2_sq: float
    tau: float

    def drive_point(self) -> DrivePoint:
        return DrivePoint(self.eps2_sq / self.eps1_sq, self.delta_abs / self.eps1_sq,
                          self.tau * self.eps1_sq)


def scaling_transform(params: AbsoluteParams, lam: float) -> AbsoluteParams:
    """Delta -> lam Delta, eps^2 -> lam eps^2, tau -> tau / lam."""
    if not lam > 0:
        raise ValueError(f"scaling factor must be > 0, got {lam}")
    return AbsoluteParams(lam * params.delta_abs, lam * params.eps1_sq,
                          lam * params.eps2_sq, params.tau / lam)


def propagate_absolute(ds: AtomDataset, params: AbsoluteParams, envelope: EnvelopeSpec = None,
                       levels: int = 2, tol: float = DEFAULT_TOL) -> Outcome:
    """Integrate in physical time with absolute Delta, eps^2 and tau.

    Used to exhibit the scaling invariance: nothing here is expressed through
    the dimensionless (x, delta, theta).
    """
    _check_tol(tol)
    envelope = envelope or EnvelopeSpec.rectangular()
    e1, e2 = params.eps1_sq, params.eps2_sq
    # same matrices with I1 = 1, x -> eps2^2 / eps1^2 folded into absolute terms
    P = np.zeros((levels, levels), dtype=complex)
    Q = np.zeros((levels, levels), dtype=complex)
    cross = math.sqrt(e1 * e2)
    P[1, 1] = params.delta_abs
    Q[0, 0] = -0.25 * (ds.a1w1 * e1 + ds.a1w2 * e2)
    Q[1, 1] = -0.25 * (ds.a2w1 * e1 + ds.a2w2 * e2)
    Q[0, 1] = Q[1, 0] = -0.25 * cross * ds.a12
    if levels == 3:
        if ds.levels != 3:
            raise ValueError(f"dataset {ds.name} has no third level")
        P[2, 2] = params.delta_abs
        Q[2, 2] = -0.25 * (ds.a3w1 * e1 + ds.a3w2 * e2)
        Q[0, 2] = Q[2, 0] = -0.25 * cross * ds.a13
        Q[1, 2] = Q[2, 1] = -0.25 * (ds.a23w1 * e1 + ds.a23w2 * e2)
    A, info = _integrate(P, Q, 1.0, envelope, tol, t_scale=params.tau)
    return _outcome_from(A, info, params.drive_point(), envelope)
