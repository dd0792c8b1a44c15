"""Mother window, its Fourier transform, and the smooth bump psi0.

The mother window is w(t) = (35/32)(1-t^2)^3 on [-1,1], zero outside: nonnegative,
even, unit mass, and C^2 across the boundary (first and second derivatives vanish
at t = +-1). Its transform has the closed form

    w_hat(xi) = 105 * j3(a) / a^3,      a = 2*pi*xi,

with j3 the spherical Bessel function, evaluated here by an explicit sin/cos
formula for large |a| and by a Taylor series in a^2 below the crossover (the
sin/cos form cancels catastrophically near 0). The smooth bump of Definition-style
support [0,1] is psi0(x) = 2*w(2x-1), with

    psi0_hat(xi) = exp(-i*pi*xi) * w_hat(xi/2).

All magnitude bounds used for truncation accounting come from `window_envelope`,
which dominates |w_hat| everywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

_TWO_PI = 2.0 * math.pi
_SERIES_CROSSOVER = 6.0  # |a| below this: Taylor series; above: sin/cos formula
_SERIES_TERMS = 28


def _series_coefficients() -> tuple[float, ...]:
    # w_hat(eta) = (35/32) * sum_m (-1)^m a^(2m)/(2m)! * c_m,
    # c_m = integral of (1-t^2)^3 t^(2m) over [-1,1], exact in rationals.
    coeffs = []
    for m in range(_SERIES_TERMS):
        c_m = 2 * (Fraction(1, 2 * m + 1) - Fraction(3, 2 * m + 3)
                   + Fraction(3, 2 * m + 5) - Fraction(1, 2 * m + 7))
        d_m = Fraction(35, 32) * c_m / math.factorial(2 * m)
        if m % 2:
            d_m = -d_m
        coeffs.append(float(d_m))
    return tuple(coeffs)


_SERIES = _series_coefficients()

#: second moment of w: integral of t^2 w(t) dt = 1/9
WINDOW_SECOND_MOMENT = float(Fraction(35, 32) * 2
                             * (Fraction(1, 3) - Fraction(3, 5)
                                + Fraction(3, 7) - Fraction(1, 9)))

#: peak value w(0) = 35/32
WINDOW_PEAK = 35.0 / 32.0


def mother_window(t):
    """w(t) = (35/32)(1-t^2)^3 on [-1,1], zero outside. Vectorized."""
    t = np.asarray(t, dtype=float)
    u = 1.0 - t * t
    out = np.where(u > 0.0, (35.0 / 32.0) * u * u * u, 0.0)
    return out if out.shape else float(out)


def mother_window_deriv(t):
    """w'(t), used for analytic Lipschitz bounds."""
    t = np.asarray(t, dtype=float)
    u = 1.0 - t * t
    out = np.where(u > 0.0, (35.0 / 32.0) * 3.0 * u * u * (-2.0 * t), 0.0)
    return out if out.shape else float(out)


def _series_eval(a2: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(a2)
    for d in reversed(_SERIES):
        acc = acc * a2 + d
    return acc


def _formula_eval(a: np.ndarray) -> np.ndarray:
    # 105 * j3(a)/a^3 with j3(a) = (15/a^4 - 6/a^2) sin a - (15/a^3 - 1/a) cos a
    inv = 1.0 / a
    inv2 = inv * inv
    j3 = (15.0 * inv2 * inv2 - 6.0 * inv2) * np.sin(a) \
        - (15.0 * inv2 * inv - inv) * np.cos(a)
    return 105.0 * j3 * inv2 * inv


def window_transform(xi):
    """Closed-form w_hat(xi), real and even, w_hat(0) = 1, |w_hat| <= 1. Vectorized."""
    xi_arr = np.asarray(xi, dtype=float)
    a = _TWO_PI * np.abs(xi_arr)
    small = a <= _SERIES_CROSSOVER
    out = np.empty_like(a)
    if small.any():
        a_s = a[small]
        out[small] = _series_eval(a_s * a_s)
    if (~small).any():
        out[~small] = _formula_eval(a[~small])
    return out if out.shape else float(out)


def window_transform_quad(xi: float, epsabs: float = 1e-13) -> complex:
    """Adaptive-quadrature oracle for w_hat(xi), absolute error <= 1e-12.

    Returns the complex transform; the imaginary part is asserted below 1e-12
    (it vanishes analytically by evenness).
    """
    from scipy.integrate import quad

    wvar = _TWO_PI * xi
    if wvar == 0.0:
        re, _ = quad(mother_window, -1.0, 1.0, epsabs=epsabs, limit=200)
        return complex(re, 0.0)
    re, _ = quad(mother_window, -1.0, 1.0, weight="cos", wvar=wvar,
                 epsabs=epsabs, limit=200)
    im, _ = quad(mother_window, -1.0, 1.0, weight="sin", wvar=wvar,
                 epsabs=epsabs, limit=200)
    im = -im  # e^{-2 pi i xi t} convention
    if abs(im) > 1e-12:
        raise AssertionError(f"odd part of w_hat({xi}) = {im:.3e} exceeds 1e-12")
    return complex(re, im)


def window_envelope(eta):
    """Upper bound for |w_hat(eta)|: min(1, 105*(1/a + 6/a^2 + 15/a^3 + 15/a^4)/a^3)."""
    eta_arr = np.asarray(eta, dtype=float)
    a = _TWO_PI * np.abs(eta_arr)
    with np.errstate(divide="ignore"):
        inv = np.where(a > 0.0, 1.0 / np.maximum(a, 1e-300), np.inf)
    poly = inv * (1.0 + inv * (6.0 + inv * (15.0 + 15.0 * inv)))
    out = np.minimum(1.0, 105.0 * poly * inv ** 3)
    return out if out.shape else float(out)


def envelope_integral_tail(eta0: float) -> float:
    """Upper bound for the integral of window_envelope over [eta0, +inf), eta0 > 0."""
    a0 = _TWO_PI * eta0
    if a0 <= 0.0:
        return math.inf
    val = 105.0 * (1.0 / (3.0 * a0 ** 3) + 6.0 / (4.0 * a0 ** 4)
                   + 15.0 / (5.0 * a0 ** 5) + 15.0 / (6.0 * a0 ** 6))
    return val / _TWO_PI


def envelope_l1_tail(eta0: float, step: float) -> float:
    """Upper bound for sum of window_envelope over the lattice {eta0, eta0+step, ...}.

    Valid for eta0 >= 1 where the envelope is decreasing; used for certified
    truncated-mass accounting of strided spectra.
    """
    if eta0 < 1.0:
        raise ValueError("tail bound requires eta0 >= 1 (envelope monotone there)")
    return window_envelope(eta0) + envelope_integral_tail(eta0) / step


class SmoothBump:
    """The smooth bump psi0(x) = 2*w(2x-1): C^2, supported in [0,1], unit mass,
    strictly positive on (0,1)."""

    support = (0.0, 1.0)
    mass = 1.0

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = 2.0 * mother_window(2.0 * x_arr - 1.0)
        return out if np.ndim(out) else float(out)

    def transform(self, xi):
        """psi0_hat(xi) = exp(-i*pi*xi) * w_hat(xi/2). Vectorized, complex."""
        xi_arr = np.asarray(xi, dtype=float)
        out = np.exp(-1j * math.pi * xi_arr) * window_transform(xi_arr / 2.0)
        return out if np.ndim(out) else complex(out)

    @staticmethod
    def transform_abs_envelope(delta):
        """Upper bound for |psi0_hat(delta)| (= |w_hat(delta/2)|)."""
        return window_envelope(np.asarray(delta, dtype=float) / 2.0)


def build_psi0() -> SmoothBump:
    """The canonical smooth bump used as level-0 density factor."""
    return SmoothBump()
