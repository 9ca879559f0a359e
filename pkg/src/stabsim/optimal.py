"""Optimal detuning and the narrowest achievable quasienergy width.

Minimizing g_plus over delta at fixed x requires Im(dressed_detuning *
conj(a12)) = 0, which makes the optimal detuning linear in x.  Along that
line the widths reduce to a closed form, and the point where the complex
dressed detuning vanishes lies on it.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .atoms import AtomDataset
from .dressed import DrivePoint, widths
from .dynamics import DEFAULT_TOL, propagate
from .errors import (BracketingError, DegenerateCouplingError, DegenerateDatasetError,
                     PartialFitError, UnsupportedDatasetError)
from .pulses import EnvelopeSpec
from .search import bracketed_minimum, localmin


@dataclass(frozen=True)
class LinearLaw:
    """delta(x) = intercept + slope * x."""

    intercept: float
    slope: float
    fit_residual: float = 0.0

    def __call__(self, x):
        return self.intercept + self.slope * x

    CSV_FIELDS = ("intercept", "slope", "fit_residual")

    def csv_row(self):
        return (self.intercept, self.slope, self.fit_residual)


def delta_opt_law(ds: AtomDataset) -> LinearLaw:
    """Closed-form detuning of minimal g_plus as a linear function of x."""
    im12 = ds.a12.imag
    if im12 == 0:
        raise DegenerateCouplingError(f"Im a12 = 0 for {ds.name}: no continuum coupling")
    k = ds.a12.real / im12
    intercept = 0.25 * ((ds.a2w1.real - ds.a1w1.real) - k * (ds.a2w1.imag - ds.a1w1.imag))
    slope = 0.25 * ((ds.a2w2.real - ds.a1w2.real) - k * (ds.a2w2.imag - ds.a1w2.imag))
    return LinearLaw(intercept, slope)


def delta_opt(ds: AtomDataset, x: float) -> float:
    return delta_opt_law(ds)(x)


def _require_zero_im_a1w2(ds):
    if ds.a1w2.imag != 0:
        raise UnsupportedDatasetError(
            f"{ds.name}: Im a1(w2) = {ds.a1w2.imag:g} != 0; the closed form needs it to vanish, "
            "use minimize_width_over_delta instead")


def dressed_detuning_im_opt(ds: AtomDataset, x: float) -> float:
    """Imaginary part of the dressed detuning along the optimal line."""
    return -0.25 * (ds.a2w1.imag - ds.a1w1.imag + ds.a2w2.imag * x)


def g_opt(ds: AtomDataset, x: float):
    """(g_plus, g_minus) at delta = delta_opt(x), closed form."""
    _require_zero_im_a1w2(ds)
    dd = dressed_detuning_im_opt(ds, x)
    root = math.sqrt(dd * dd + 0.25 * ds.a12.imag ** 2 * x)
    base = 0.5 * ds.a1w1.imag - dd
    # base - root cancels at large x; (base - root)(base + root) expanded by hand
    g1, g21, g22 = ds.a1w1.imag, ds.a2w1.imag, ds.a2w2.imag
    prod = 0.25 * g1 * g21 + 0.25 * x * (g1 * g22 - ds.a12.imag ** 2)
    g_plus = prod / (base + root) if base + root > 0 else base - root
    return g_plus, base + root


def asymptotic_width(ds: AtomDataset, x: float) -> float:
    """Leading large-x term of g_plus along the optimal line, decaying as 1/x."""
    if not x > 0:
        raise ValueError("x must be > 0")
    if ds.a2w2.imag == 0:
        raise ZeroDivisionError(f"{ds.name}: Im a2(w2) = 0")
    return ds.a1w1.imag * ds.a2w1.imag / (2 * x * ds.a2w2.imag)


def zero_detuning_point(ds: AtomDataset):
    """(x0, delta0) where the complex dressed detuning vanishes."""
    den = ds.a2w2.imag - ds.a1w2.imag
    if den == 0:
        raise DegenerateDatasetError(f"{ds.name}: Im a2(w2) = Im a1(w2), no zero-detuning point")
    x0 = (ds.a1w1.imag - ds.a2w1.imag) / den
    delta0 = 0.25 * (ds.a2w1.real - ds.a1w1.real + x0 * (ds.a2w2.real - ds.a1w2.real))
    return x0, delta0


def minimize_width_over_delta(ds: AtomDataset, x: float, bracket, *, xtol=1e-8):
    """Numerically minimize g_plus(delta) at fixed x inside ``bracket``.

    Returns ``(delta_star, g_plus_min)``; raises BracketingError when the
    bracket holds no interior minimum.
    """
    lo, hi = sorted(map(float, bracket))

    def g(delta):
        return widths(ds, DrivePoint(x, delta))[0]

    return bracketed_minimum(g, lo, hi, xtol=xtol)


# --------------------------------------------------------------------------
# empirical law for smooth pulses

def default_bracket(ds: AtomDataset, x: float):
    """Search window around the closed-form optimum, widening with x."""
    center = delta_opt(ds, x)
    half = 40.0 + 40.0 * x
    return center - half, center + half


def _best_delta(args):
    ds, x, envelope, theta, lo, hi, levels, tol, scan_points, xtol = args

    def w(delta):
        return propagate(ds, DrivePoint(x, delta, theta), envelope, levels, tol).w_res

    grid = np.linspace(lo, hi, scan_points)
    values = [w(d) for d in grid]
    i = int(np.argmax(values))
    if i == 0 or i == scan_points - 1:
        return None
    delta, neg, _ = localmin(lambda d: -w(d), grid[i - 1], grid[i + 1], xtol=xtol)
    return delta, -neg


def optimal_deltas(ds, envelope, theta, x_grid, delta_bracket=None, *, levels=2,
                   tol=1e-9, scan_points=41, xtol=1e-8, workers=1):
    """For each x the detuning maximizing w_res (None where no interior maximum was found).

    ``delta_bracket`` is a fixed ``(lo, hi)``, a callable ``x -> (lo, hi)``,
    or None for :func:`default_bracket`.
    """
    cells = []
    for x in x_grid:
        if delta_bracket is None:
            lo, hi = default_bracket(ds, x)
        elif callable(delta_bracket):
            lo, hi = delta_bracket(x)
        else:
            lo, hi = delta_bracket
        cells.append((ds, float(x), envelope, theta, float(lo), float(hi), levels, tol,
                      scan_points, xtol))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_best_delta, cells))
    return [_best_delta(c) for c in cells]


def fit_delta_opt_empirical(ds: AtomDataset, envelope: EnvelopeSpec, theta: float, x_grid,
                            delta_bracket=None, *, levels=2, tol=1e-9, scan_points=41,
                            workers=1) -> LinearLaw:
    """Least-squares line through the w_res-maximizing detunings over ``x_grid``."""
    xs = [float(v) for v in x_grid]
    if len(xs) < 3:
        raise ValueError("need at least 3 grid points for a line fit")
    found = optimal_deltas(ds, envelope, theta, xs, delta_bracket, levels=levels, tol=tol,
                           scan_points=scan_points, workers=workers)
    failed = [x for x, r in zip(xs, found) if r is None]
    if failed:
        raise PartialFitError("no interior maximum of w_res for x = "
                              + ", ".join(f"{x:g}" for x in failed), failed)
    deltas = np.array([r[0] for r in found])
    slope, intercept = np.polyfit(np.array(xs), deltas, 1)
    resid = deltas - (intercept + slope * np.array(xs))
    return LinearLaw(float(intercept), float(slope), float(np.sqrt(np.mean(resid ** 2))))


__all__ = [
    "LinearLaw", "delta_opt_law", "delta_opt", "g_opt", "asymptotic_width",
    "zero_detuning_point", "minimize_width_over_delta", "fit_delta_opt_empirical",
    "optimal_deltas", "BracketingError",
]
