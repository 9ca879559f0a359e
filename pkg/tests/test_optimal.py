import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabsim import DrivePoint, EnvelopeSpec, builtin_dataset
from stabsim.dressed import dressed_detuning, widths
from stabsim.errors import (BracketingError, DegenerateCouplingError, DegenerateDatasetError,
                            PartialFitError, UnsupportedDatasetError)
from stabsim.optimal import (LinearLaw, asymptotic_width, delta_opt, delta_opt_law,
                             fit_delta_opt_empirical, g_opt, minimize_width_over_delta,
                             zero_detuning_point)

# g_plus at x = 0.156 on the He constants, mpmath evaluation of the closed form
HE_GOPT_X0156 = 0.84196443861020340


def test_law_values(he, h2):
    assert delta_opt(he, 0.156) == pytest.approx(-13.3, abs=0.1)
    assert delta_opt(h2, 0.272) == pytest.approx(-47.2, abs=0.1)
    assert delta_opt_law(he).slope == pytest.approx(-83.57, rel=5e-3)
    assert delta_opt_law(he).fit_residual == 0


def test_law_is_callable_and_serializable():
    law = LinearLaw(1.5, -2.0, 0.25)
    assert law(2.0) == 1.5 - 4.0
    assert dict(zip(LinearLaw.CSV_FIELDS, law.csv_row())) == {
        "intercept": 1.5, "slope": -2.0, "fit_residual": 0.25}


def test_degenerate_coupling(he):
    with pytest.raises(DegenerateCouplingError):
        delta_opt_law(he.replace(a12=complex(38.74, 0)))


@given(st.floats(0, 50), st.floats(0, 50))
def test_linearity(x1, x2):
    ds = builtin_dataset("He2")
    lhs = delta_opt(ds, x1) + delta_opt(ds, x2)
    rhs = delta_opt(ds, 0) + delta_opt(ds, x1 + x2)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("name", ["He2", "H2"])
@pytest.mark.parametrize("x", [0.05, 0.156, 0.5, 1, 3, 10, 30])
def test_optimality_and_extremum_condition(name, x):
    ds = builtin_dataset(name)
    d = delta_opt(ds, x)
    eps = 1e-3 * max(1, abs(d))
    g0 = widths(ds, DrivePoint(x, d))[0]
    assert widths(ds, DrivePoint(x, d + eps))[0] >= g0
    assert widths(ds, DrivePoint(x, d - eps))[0] >= g0
    dt = dressed_detuning(ds, DrivePoint(x, d))
    assert abs((dt * ds.a12.conjugate()).imag) <= 1e-9 * abs(dt) * abs(ds.a12) + 1e-12


@pytest.mark.parametrize("name", ["He2", "H2"])
def test_zero_point_on_law(name):
    ds = builtin_dataset(name)
    x0, d0 = zero_detuning_point(ds)
    assert delta_opt(ds, x0) == pytest.approx(d0, rel=1e-9)
    assert abs(dressed_detuning(ds, DrivePoint(x0, d0))) < 1e-10 * abs(ds.a12)


def test_zero_point_degenerate(he):
    with pytest.raises(DegenerateDatasetError):
        zero_detuning_point(he.replace(a2w2=complex(-479.96, 0)))


def test_g_opt_values(he):
    assert g_opt(he, 0.156)[0] == pytest.approx(HE_GOPT_X0156, rel=1e-12)
    assert g_opt(he, 0.0)[0] == pytest.approx(1.605, rel=1e-12)


@pytest.mark.parametrize("name", ["He2", "H2"])
@pytest.mark.parametrize("x", [0.0, 0.01, 0.156, 1, 10, 100, 1e4])
def test_g_opt_matches_widths(name, x):
    ds = builtin_dataset(name)
    gp, gm = g_opt(ds, x)
    wp, wm = widths(ds, DrivePoint(x, delta_opt(ds, x)))
    assert gp == pytest.approx(wp, rel=1e-9, abs=1e-13)
    assert gm == pytest.approx(wm, rel=1e-9)


def test_g_opt_unsupported(he):
    with pytest.raises(UnsupportedDatasetError):
        g_opt(he.replace(a1w2=complex(-236.6, 0.5)), 1.0)


def test_asymptotic_width(he):
    assert asymptotic_width(he, 10) == pytest.approx(22.65 * 3.21 / (2 * 10 * 124.55))
    assert asymptotic_width(he, 1) == pytest.approx(0.292, abs=5e-4)
    with pytest.raises(ValueError):
        asymptotic_width(he, 0)
    with pytest.raises(ZeroDivisionError):
        asymptotic_width(he.replace(a2w2=complex(-479.96, 0)), 1.0)


def test_symmetrized_approaches_asymptote(he):
    sym = he.symmetrized()
    ratios = [g_opt(sym, x)[0] / asymptotic_width(sym, x) for x in (10, 100, 1000, 1e4)]
    assert all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(1, rel=1e-3)


def test_minimize_matches_closed_form(he):
    d, g = minimize_width_over_delta(he, 0.5, (-200, 100))
    assert d == pytest.approx(-42.05, abs=1e-2)
    assert d == pytest.approx(delta_opt(he, 0.5), abs=1e-4)
    _, g = minimize_width_over_delta(he, 0.156, (-100, 50))
    assert g == pytest.approx(0.84, abs=0.01)


def test_minimize_without_coupling_fails(he):
    ds = he.replace(a12=0j)
    with pytest.raises(BracketingError):
        minimize_width_over_delta(ds, 1.0, (-1e4, -5e3))


def test_minimize_bracket_missing_minimum(he):
    with pytest.raises(BracketingError):
        minimize_width_over_delta(he, 1.0, (0, 100))


@pytest.mark.slow
def test_fit_sin2_band(he):
    law = fit_delta_opt_empirical(he, EnvelopeSpec.pure_sin2(), 0.1, np.linspace(0.5, 5, 6))
    assert -80 <= law.slope <= -66
    assert 0 <= law.intercept <= 6
    assert law.fit_residual > 0


@pytest.mark.slow
def test_fit_rect_long_pulse_recovers_law(he):
    # for long pulses w_res is governed by the narrow width, so the maxima sit on the optimal line
    xs = [0.5, 1, 2, 3, 5]
    law = fit_delta_opt_empirical(he, EnvelopeSpec.rectangular(), 10.0, xs)
    ref = delta_opt_law(he)
    assert max(abs(law(x) - ref(x)) / abs(ref(x)) for x in xs) < 0.02
    assert law.slope == pytest.approx(ref.slope, rel=0.02)


def test_fit_needs_three_points(he):
    with pytest.raises(ValueError):
        fit_delta_opt_empirical(he, EnvelopeSpec.rectangular(), 1.0, [1, 2])


def test_fit_reports_failed_points(he):
    with pytest.raises(PartialFitError) as info:
        fit_delta_opt_empirical(he, EnvelopeSpec.rectangular(), 1e-3, [0.5, 1, 2], scan_points=11)
    assert list(info.value.failed_x) == [0.5, 1, 2]
