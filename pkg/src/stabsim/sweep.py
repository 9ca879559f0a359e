"""Grid experiments: resonance curves, stabilization windows, spectral profiles.

Each experiment returns a :class:`~stabsim.table.SweepResult` whose rows are
in grid order.  Cells are independent; with ``workers > 1`` they run in a
process pool and are merged back in grid order, so the CSV output does not
depend on the degree of parallelism.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .atoms import AtomDataset
from .dressed import DrivePoint
from .dynamics import DEFAULT_TOL, Outcome, propagate
from .optimal import LinearLaw
from .pulses import EnvelopeSpec
from .table import SweepResult

RATIO_FLOOR = 1e-300


def _cell(args):
    ds, point, envelope, levels, tol = args
    return propagate(ds, point, envelope, levels, tol)


def _run(ds, points, envelope, levels, tol, workers):
    cells = [(ds, p, envelope, levels, tol) for p in points]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cell, cells, chunksize=max(1, len(cells) // (4 * workers))))
    return [_cell(c) for c in cells]


def _provenance(ds, envelope, levels, tol, **extra):
    prov = {"dataset": ds.name, "dataset_sha256": ds.checksum(), "envelope": str(envelope),
            "levels": levels, "tolerance": tol}
    prov.update(extra)
    return prov


def grid_extremum(xs, ys, kind="max", refine=True):
    """Discrete arg-extremum, optionally refined by a parabola through its neighbours.

    Returns ``(x, y, index)``.
    """
    ys = np.asarray(ys, dtype=float)
    i = int(np.argmax(ys) if kind == "max" else np.argmin(ys))
    x, y = float(xs[i]), float(ys[i])
    if refine and 0 < i < len(ys) - 1:
        x0, x1, x2 = xs[i - 1], xs[i], xs[i + 1]
        y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
        den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
        if den != 0:
            num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
            xv = x1 - 0.5 * num / den
            if x0 < xv < x2:
                # vertex value of the interpolating parabola
                a = ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0)
                b = (y1 - y0) / (x1 - x0) - a * (x0 + x1)
                c = y0 - a * x0 ** 2 - b * x0
                x, y = float(xv), float(a * xv ** 2 + b * xv + c)
    return x, y, i


def resonance_scan(ds: AtomDataset, delta_list, x_grid, theta, envelope: EnvelopeSpec = None,
                   levels=2, *, law: LinearLaw = None, tol=DEFAULT_TOL, workers=1) -> SweepResult:
    """w_res(x) at each fixed delta, plus w_res(law(x), x) when ``law`` is given."""
    envelope = envelope or EnvelopeSpec.rectangular()
    xs = [float(v) for v in x_grid]
    curves = [(f"delta={float(d):g}", lambda x, d=float(d): d) for d in delta_list]
    if law is not None:
        curves.append(("peak_envelope", law))
    points = [DrivePoint(x, float(fn(x)), theta) for _, fn in curves for x in xs]
    outcomes = _run(ds, points, envelope, levels, tol, workers)

    rows, summary = [], {}
    for k, (label, _) in enumerate(curves):
        chunk = outcomes[k * len(xs):(k + 1) * len(xs)]
        rows.extend((label,) + o.csv_row() for o in chunk)
        xm, wm, i = grid_extremum(xs, [o.w_res for o in chunk], "max")
        summary[f"{label}.max_x"] = xm
        summary[f"{label}.max_w_res"] = wm
        summary[f"{label}.max_interior"] = 0 < i < len(xs) - 1
    return SweepResult(
        kind="resonance_scan", columns=("curve",) + Outcome.CSV_COLUMNS, rows=rows,
        axes={"x": xs, "delta": [float(d) for d in delta_list]},
        provenance=_provenance(ds, envelope, levels, tol, theta=theta,
                               law=None if law is None else f"{law.intercept!r}{law.slope:+.17g}*x"),
        summary=summary)


def stabilization_window(ds: AtomDataset, x_fixed, delta_ref, theta_ref, i1_grid,
                         envelope: EnvelopeSpec = None, levels=2, *, tol=DEFAULT_TOL,
                         workers=1) -> SweepResult:
    """Ionization versus I1/I0 at fixed x with fixed absolute detuning and duration.

    For r = I1/I0 the drive point is (x_fixed, delta_ref / r, theta_ref * r).
    """
    envelope = envelope or EnvelopeSpec.rectangular()
    rs = [float(r) for r in i1_grid]
    if any(r <= 0 for r in rs):
        raise ValueError("intensity ratios must be positive")
    points = [DrivePoint(x_fixed, delta_ref / r, theta_ref * r) for r in rs]
    outcomes = _run(ds, points, envelope, levels, tol, workers)
    rows = [(r,) + o.csv_row() for r, o in zip(rs, outcomes)]

    wi = np.array([o.w_i for o in outcomes])
    rise_end = next((i for i in range(len(wi) - 1) if wi[i] >= wi[i + 1]), len(wi) - 1)
    i_win = rise_end + int(np.argmin(wi[rise_end:]))
    i_plat = int(np.argmax(wi[:i_win + 1]))
    summary = {
        "plateau_r": rs[i_plat], "plateau_w_i": float(wi[i_plat]),
        "window_r": rs[i_win], "window_w_i": float(wi[i_win]),
        "window_interior": i_plat < i_win < len(rs) - 1,
    }
    return SweepResult(
        kind="stabilization_window", columns=("i1_ratio",) + Outcome.CSV_COLUMNS, rows=rows,
        axes={"i1_ratio": rs},
        provenance=_provenance(ds, envelope, levels, tol, x=x_fixed, delta_ref=delta_ref,
                               theta_ref=theta_ref),
        summary=summary)


def spectral_profile(ds: AtomDataset, x_fixed, i1_fixed, theta, delta_grid,
                     envelope: EnvelopeSpec = None, levels=2, *, tol=DEFAULT_TOL,
                     workers=1) -> SweepResult:
    """w_res(delta) at fixed x and theta, with its extrema located.

    ``i1_fixed`` (I1/I0 of the operating point) is recorded with the rows; the
    dimensionless profile itself does not depend on it.
    """
    envelope = envelope or EnvelopeSpec.rectangular()
    ds_grid = [float(d) for d in delta_grid]
    points = [DrivePoint(x_fixed, d, theta) for d in ds_grid]
    outcomes = _run(ds, points, envelope, levels, tol, workers)
    rows = [(i1_fixed,) + o.csv_row() for o in outcomes]

    w = np.array([o.w_res for o in outcomes])
    xmax, wmax, imax = grid_extremum(ds_grid, w, "max")
    xmin, wmin, imin = grid_extremum(ds_grid, w, "min")
    interior_min = 0 < imin < len(w) - 1
    dip = float(min(w[0], w[-1]) - w[imin]) if interior_min else 0.0
    inner = w[1:-1]
    n_peaks = int(np.sum((inner > w[:-2]) & (inner > w[2:])))
    summary = {
        "max_delta": xmax, "max_w_res": wmax, "min_delta": xmin, "min_w_res": wmin,
        "dip_depth": dip, "local_maxima": n_peaks,
        "fano_like": bool(wmax > 0 and dip > 0.01 * wmax),
    }
    return SweepResult(
        kind="spectral_profile", columns=("i1_ratio",) + Outcome.CSV_COLUMNS, rows=rows,
        axes={"delta": ds_grid},
        provenance=_provenance(ds, envelope, levels, tol, x=x_fixed, i1_ratio=i1_fixed,
                               theta=theta),
        summary=summary)


def population_ratio(ds: AtomDataset, law: LinearLaw, x_grid, theta,
                     envelope: EnvelopeSpec = None, levels=2, *, tol=DEFAULT_TOL,
                     workers=1) -> SweepResult:
    """w2/w1 and w1/w2 along delta = law(x); +inf where the denominator vanishes."""
    envelope = envelope or EnvelopeSpec.rectangular()
    xs = [float(v) for v in x_grid]
    points = [DrivePoint(x, float(law(x)), theta) for x in xs]
    outcomes = _run(ds, points, envelope, levels, tol, workers)

    def ratio(num, den):
        return float("inf") if den < RATIO_FLOOR else num / den

    rows = [o.csv_row() + (ratio(o.w2, o.w1), ratio(o.w1, o.w2)) for o in outcomes]
    return SweepResult(
        kind="population_ratio", columns=Outcome.CSV_COLUMNS + ("w2_over_w1", "w1_over_w2"),
        rows=rows, axes={"x": xs},
        provenance=_provenance(ds, envelope, levels, tol, theta=theta,
                               law=f"{law.intercept!r}{law.slope:+.17g}*x"))


def smoothing_study(ds: AtomDataset, delta, theta, a_list, x_grid, levels=2, *,
                    tol=DEFAULT_TOL, workers=1) -> SweepResult:
    """w_res(x) for each envelope; entries of ``a_list`` are smoothing factors or EnvelopeSpecs."""
    envs = [a if isinstance(a, EnvelopeSpec) else EnvelopeSpec.smoothed(a) for a in a_list]
    xs = [float(v) for v in x_grid]
    rows, summary = [], {}
    for env in envs:
        points = [DrivePoint(x, float(delta), theta) for x in xs]
        outcomes = _run(ds, points, env, levels, tol, workers)
        rows.extend(o.csv_row() for o in outcomes)
        xm, wm, _ = grid_extremum(xs, [o.w_res for o in outcomes], "max")
        summary[f"{env}.max_x"] = xm
        summary[f"{env}.max_w_res"] = wm
    return SweepResult(
        kind="smoothing_study", columns=Outcome.CSV_COLUMNS, rows=rows,
        axes={"x": xs, "envelope": [str(e) for e in envs]},
        provenance={"dataset": ds.name, "dataset_sha256": ds.checksum(), "levels": levels,
                    "tolerance": tol, "delta": float(delta), "theta": theta},
        summary=summary)
