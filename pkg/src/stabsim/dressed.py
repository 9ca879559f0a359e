"""Dressed two-level system: complex detuning, quasienergies and widths.

Everything here is dimensionless: energies are divided by the first-color
intensity I1, the detuning is ``delta = Delta / I1`` and the intensity ratio
``x = I2 / I1``.  Quasienergies are measured from E1 + omega1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .atoms import AtomDataset
from .table import SweepResult

WIDTH_ORDERED = "width-ordered"
CONTINUITY = "continuity"


@dataclass(frozen=True)
class DrivePoint:
    """Dimensionless drive: intensity ratio x, detuning delta, interaction time theta."""

    x: float
    delta: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.x >= 0 and math.isfinite(self.x)):
            raise ValueError(f"x must be finite and >= 0, got {self.x}")
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")
        if not (self.theta >= 0 and math.isfinite(self.theta)):
            raise ValueError(f"theta must be finite and >= 0, got {self.theta}")


@dataclass(frozen=True)
class QuasienergyPair:
    y_plus: complex
    y_minus: complex
    g_plus: float
    g_minus: float
    branch_rule: str = WIDTH_ORDERED


def level_energies(ds: AtomDataset, x: float, delta: float):
    """Dressed diagonal energies of levels 1 and 2 in the frame rotating with E1 + omega1."""
    e1 = -0.25 * (ds.a1w1 + ds.a1w2 * x)
    e2 = delta - 0.25 * (ds.a2w1 + ds.a2w2 * x)
    return e1, e2


def dressed_detuning(ds: AtomDataset, point: DrivePoint) -> complex:
    """Complex detuning between the ac-Stark-shifted, broadened levels."""
    x = point.x
    return point.delta - 0.25 * ((ds.a2w1 - ds.a1w1) + x * (ds.a2w2 - ds.a1w2))


def width_trace(ds: AtomDataset, x: float) -> float:
    """g_plus + g_minus, independent of delta and of the branch choice."""
    return 0.5 * (ds.a1w1.imag + ds.a2w1.imag + x * (ds.a1w2.imag + ds.a2w2.imag))


def _roots(ds: AtomDataset, x: float, delta: float):
    # Roots of (y - e1)(y - e2) = a12^2 x / 16.  The small correction u is
    # computed without cancellation, so each root stays accurate even when
    # |delta| dwarfs the widths.
    e1, e2 = level_energies(ds, x, delta)
    dt = e2 - e1
    h2 = ds.a12 * ds.a12 * x / 16.0
    d = cmath.sqrt(dt * dt + 4.0 * h2)
    if (dt.conjugate() * d).real < 0:
        d = -d
    big = 0.5 * (dt + d)
    u = -h2 / big if big != 0 else 0.5 * (dt - d)
    return e1 + u, e2 - u


def quasienergies(ds: AtomDataset, point: DrivePoint) -> QuasienergyPair:
    """Both complex quasienergies, labelled so that g_plus <= g_minus."""
    ya, yb = _roots(ds, point.x, point.delta)
    ga, gb = -2.0 * ya.imag, -2.0 * yb.imag
    if gb < ga:
        ya, yb, ga, gb = yb, ya, gb, ga
    return QuasienergyPair(ya, yb, ga, gb, WIDTH_ORDERED)


def widths(ds: AtomDataset, point: DrivePoint):
    """(g_plus, g_minus) for the width-ordered pair."""
    q = quasienergies(ds, point)
    return q.g_plus, q.g_minus


def width_curve(ds: AtomDataset, delta: float, x_grid, *, ambiguity_threshold: float = 0.9) -> SweepResult:
    """Widths along an x grid with branches followed by continuity.

    Branch 1 is the narrower level at the first grid point.  At each step the
    two new roots are assigned to the branches by the smaller total distance
    in the complex plane; if the rejected assignment is almost as close
    (cost ratio above ``ambiguity_threshold``) the row is flagged.
    """
    xs = [float(v) for v in x_grid]
    if not xs:
        raise ValueError("empty x grid")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("x grid must be strictly increasing")

    rows = []
    prev = None
    for x in xs:
        pair = _roots(ds, x, delta)
        ratio = 0.0
        if prev is None:
            if -2 * pair[1].imag < -2 * pair[0].imag:
                pair = pair[::-1]
        else:
            keep = abs(pair[0] - prev[0]) + abs(pair[1] - prev[1])
            swap = abs(pair[1] - prev[0]) + abs(pair[0] - prev[1])
            if swap < keep:
                pair = pair[::-1]
                keep, swap = swap, keep
            ratio = keep / swap if swap > 0 else 1.0
        prev = pair
        y1, y2 = pair
        rows.append((x, float(delta), -2 * y1.imag, -2 * y2.imag,
                     y1.real, y1.imag, y2.real, y2.imag,
                     ratio > ambiguity_threshold, ratio))

    diff = [r[2] - r[3] for r in rows]
    crossings = sum(1 for a, b in zip(diff, diff[1:]) if a * b < 0)
    result = SweepResult(
        kind="width_curve",
        columns=("x", "delta", "g_1", "g_2", "y1_re", "y1_im", "y2_re", "y2_im",
                 "ambiguous", "ambiguity"),
        rows=rows,
        axes={"x": xs},
        provenance={"dataset": ds.name, "dataset_sha256": ds.checksum(), "delta": float(delta),
                    "branch_rule": CONTINUITY},
        summary={"crossings": crossings,
                 "min_gap": min(abs(v) for v in diff),
                 "ambiguous_rows": sum(1 for r in rows if r[8])},
    )
    return result


def ideal_quasienergies(E1: float, E2: float, Gamma: float):
    """Quasienergies of two levels with equal, fully correlated ionization widths.

    Returns ``(gamma_plus, gamma_minus)``.  Below ``Gamma = E2 - E1`` both
    have imaginary part ``-Gamma/2``; above it the pair splits into a narrowing
    and a broadening level.
    """
    if E2 < E1:
        raise ValueError("E2 must be >= E1")
    if Gamma < 0:
        raise ValueError("Gamma must be >= 0")
    root = cmath.sqrt(complex((E2 - E1) ** 2 - Gamma ** 2))
    center = complex(E1 + E2, -Gamma)
    return 0.5 * (center + root), 0.5 * (center - root)
