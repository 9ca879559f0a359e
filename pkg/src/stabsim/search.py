"""Derivative-free scalar minimization on a bracket (golden section with parabolic steps)."""

from __future__ import annotations

import math

from .errors import BracketingError

GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


def localmin(f, a, b, *, xtol=1e-8, max_iter=500):
    """Minimize ``f`` on ``[a, b]``.

    Golden-section steps guarantee convergence, parabolic interpolation
    through the three best points takes over once the function looks
    quadratic (Brent's scheme).  Stops when the bracket around the current
    best point is below ``xtol * max(1, |x|)``.  Returns ``(x, f(x), nfev)``.
    """
    if not a < b:
        raise ValueError("need a < b")
    x = w = v = a + GOLDEN * (b - a)
    fx = fw = fv = f(x)
    nfev = 1
    d = e = 0.0
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        tol1 = xtol * max(1.0, abs(x))
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        p = q = r = 0.0
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            else:
                q = -q
            r, e = e, d
        if q != 0 and abs(p) < abs(0.5 * q * r) and q * (a - x) < p < q * (b - x):
            d = p / q
            u = x + d
            if u - a < tol2 or b - u < tol2:
                d = tol1 if x < m else -tol1
        else:
            e = (b if x < m else a) - x
            d = GOLDEN * e
        u = x + (d if abs(d) >= tol1 else math.copysign(tol1, d))
        fu = f(u)
        nfev += 1
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v in (x, w):
                v, fv = u, fu
    return x, fx, nfev


def bracketed_minimum(f, lo, hi, *, xtol=1e-8):
    """Like :func:`localmin` but insists on a strict interior minimum.

    Raises :class:`BracketingError` if the result sits on an end of the
    bracket or the function is flat across it.
    """
    x, fx, _ = localmin(f, lo, hi, xtol=xtol)
    flo, fhi = f(lo), f(hi)
    edge = 10 * xtol * max(1.0, abs(x))
    noise = 1e-12 * max(1.0, abs(fx))
    if x - lo < edge or hi - x < edge or not (flo - fx > noise and fhi - fx > noise):
        raise BracketingError(
            f"no interior minimum in [{lo:g}, {hi:g}] (best x = {x:.10g}, "
            f"f = {fx:.10g}, f(lo) = {flo:.10g}, f(hi) = {fhi:.10g})")
    return x, fx
