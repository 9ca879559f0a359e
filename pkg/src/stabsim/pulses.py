"""Pulse envelopes with fixed peak field and fixed fluence.

Time is normalized to the pulse duration, ``s = t / tau``.  The smoothed
family

    f(s) = (1 + a) sin^2(u) / (1 + a sin^2(u)),   u = pi (N(a) s + 1/2)

lives on ``|s| <= 1 / (2 N(a))`` and satisfies ``int f^2 ds = 1`` for every
``a``.  It tends to the pure sin^2 envelope (N = 3/8) as a -> 0 and to the
unit rectangle on ``|s| <= 1/2`` as a -> infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import binom

RECTANGULAR = "rectangular"
SMOOTHED = "smoothed"
PURE_SIN2 = "pure_sin2"

SERIES_BELOW = 1e-3
_SERIES_TERMS = 10


def _series_coefficients(n):
    # 1 - (2 + 3a) / (2 (1 + a)^(3/2)) = sum_k c_k a^k, c_0 = c_1 = 0
    b = [binom(-1.5, k) for k in range(n + 2)]
    return [-(b[k] + 1.5 * b[k - 1]) for k in range(2, n + 2)]


_SERIES = _series_coefficients(_SERIES_TERMS)


def normalization_factor(a: float) -> float:
    """N(a), chosen so that the smoothed envelope carries unit fluence.

    For small ``a`` the closed form is a difference of nearly equal numbers,
    so a Taylor series is summed instead.
    """
    if not a > 0:
        raise ValueError(f"smoothing factor must be > 0, got {a}")
    if a < SERIES_BELOW:
        tail = 0.0
        for c in reversed(_SERIES):
            tail = tail * a + c
        return (1 + a) ** 2 * tail
    return (1 + a) ** 2 / a ** 2 * (1 - (2 + 3 * a) / (2 * (1 + a) ** 1.5))


@dataclass(frozen=True)
class EnvelopeSpec:
    """Shape of the common envelope of both colors."""

    shape: str = RECTANGULAR
    a: Optional[float] = None
    shared_shape: bool = True

    def __post_init__(self):
        if self.shape not in (RECTANGULAR, SMOOTHED, PURE_SIN2):
            raise ValueError(f"unknown envelope shape {self.shape!r}")
        if self.shape == SMOOTHED:
            if self.a is None or not self.a > 0 or not math.isfinite(self.a):
                raise ValueError("smoothed envelope needs a finite smoothing factor a > 0")
        elif self.a is not None:
            raise ValueError(f"{self.shape} envelope takes no smoothing factor")
        if not self.shared_shape:
            raise NotImplementedError("only a common envelope for both colors is supported")

    @classmethod
    def rectangular(cls):
        return cls(RECTANGULAR)

    @classmethod
    def smoothed(cls, a):
        return cls(SMOOTHED, float(a))

    @classmethod
    def pure_sin2(cls):
        return cls(PURE_SIN2)

    @classmethod
    def parse(cls, text: str) -> "EnvelopeSpec":
        """Parse ``rect``, ``sin2`` or ``smooth:a=<float>``."""
        text = text.strip()
        if text == "rect":
            return cls.rectangular()
        if text == "sin2":
            return cls.pure_sin2()
        if text.startswith("smooth:"):
            key, _, value = text[len("smooth:"):].partition("=")
            if key.strip() == "a":
                try:
                    a = float(value)
                except ValueError:
                    pass
                else:
                    return cls.smoothed(a)
        raise ValueError(f"bad envelope {text!r}; expected rect, sin2 or smooth:a=<float>")

    def __str__(self):
        if self.shape == RECTANGULAR:
            return "rect"
        if self.shape == PURE_SIN2:
            return "sin2"
        return f"smooth:a={self.a!r}"

    @property
    def norm(self) -> float:
        """N of the envelope: 1 for rectangular, 3/8 for pure sin^2."""
        if self.shape == RECTANGULAR:
            return 1.0
        if self.shape == PURE_SIN2:
            return 0.375
        return normalization_factor(self.a)

    @property
    def half_support(self) -> float:
        return 0.5 / self.norm


def envelope_value(spec: EnvelopeSpec, s):
    """Field-strength factor f(s) in [0, 1]; zero outside the support."""
    s_arr = np.asarray(s, dtype=float)
    half = spec.half_support
    inside = np.abs(s_arr) <= half
    if spec.shape == RECTANGULAR:
        out = np.where(inside, 1.0, 0.0)
    else:
        u = np.cos(np.pi * spec.norm * s_arr) ** 2
        if spec.shape == PURE_SIN2:
            val = u
        else:
            a = spec.a
            val = (1 + a) * u / (1 + a * u)
        out = np.where(inside, val, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def fluence(spec: EnvelopeSpec) -> float:
    """Integral of f(s)^2 over the support (unity by construction)."""
    if spec.shape == RECTANGULAR:
        return 1.0
    half = spec.half_support
    val, _ = integrate.quad(lambda s: envelope_value(spec, s) ** 2, -half, half,
                            epsabs=1e-13, epsrel=1e-12, limit=400)
    return val
