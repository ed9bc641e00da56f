"""Shared numerical machinery: quadrature helpers and tail summation.

The kernels of the symmetric phase convention decay like 1/x, so lattice
sums and Fourier-type integrals over them converge too slowly for brute
truncation.  Everything here reduces such tails to Lerch-transcendent
evaluations

    phi(z, s, a) = sum_{n>=0} z^n / (n + a)^s ,   |z| <= 1, a > 0,

computed through the integral representation

    phi(z, s, a) = (1/Gamma(s)) * int_0^inf t^(s-1) e^(-a t) / (1 - z e^(-t)) dt

with Gauss-Laguerre nodes, or through Euler-Maclaurin summation with the
generalized exponential integral when arg(z) is small and the integrand
becomes too stiff for Laguerre quadrature.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import integrate, special


class ConvergenceError(RuntimeError):
    """A quadrature or series evaluation missed its accuracy target."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


@lru_cache(maxsize=64)
def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def composite_gl(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on the cells defined by ``edges``.

    Returns flattened arrays over all cells; exact for polynomials of
    degree 2*order-1 per cell.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = _gl_nodes(order)
    lo = edges[:-1, None]
    hi = edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo) + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def quad_complex(f, a: float, b: float, *, points=None, epsabs: float = 1e-12,
                 limit: int = 300) -> tuple[complex, float]:
    """Adaptive quadrature (QUADPACK Gauss-Kronrod) of a complex integrand.

    Returns (value, error estimate). ``points`` marks known discontinuity
    abscissae for the subdivision.
    """
    kw = dict(epsabs=epsabs, epsrel=0.0, limit=limit)
    if points is not None:
        pts = [p for p in points if a < p < b]
        kw["points"] = pts or None
    re, re_err = integrate.quad(lambda t: f(t).real, a, b, **kw)
    im, im_err = integrate.quad(lambda t: f(t).imag, a, b, **kw)
    return complex(re, im), float(re_err + im_err)


@lru_cache(maxsize=32)
def _laguerre_nodes(order: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = special.roots_genlaguerre(order, alpha)
    return x, w


def _lerch_laguerre(z: complex, s: int, a: float, order: int = 64) -> complex:
    # int_0^inf u^(s-1) e^-u / (1 - z e^(-u/a)) du / (Gamma(s) a^s)
    u, w = _laguerre_nodes(order, float(s - 1))
    vals = 1.0 / (1.0 - z * np.exp(-u / a))
    return complex(np.sum(w * vals) / (special.gamma(s) * a**s))


def _expn_complex(s: int, w: complex) -> complex:
    # E_s(w) by upward recursion from E_1; scipy's exp1 accepts complex w.
    e = special.exp1(w)
    for k in range(1, s):
        e = (np.exp(-w) - w * e) / k
    return complex(e)


def _lerch_euler_maclaurin(z: complex, s: int, a: float) -> complex:
    # Summand f(n) = e^(i phi n)/(n+a)^s as a smooth function of n >= 0;
    # valid when |phi| is small enough that f varies slowly on unit steps.
    phi = np.angle(z)
    # int_0^inf f dn = e^(-i phi a) * a^(1-s) * E_s(-i a phi)
    integral = np.exp(-1j * phi * a) * a ** (1 - s) * _expn_complex(s, -1j * a * phi)

    def deriv(n: float, order: int) -> complex:
        # d^order/dn^order of e^(i phi n) (n+a)^-s at n
        from math import comb
        total = 0.0 + 0.0j
        fall = 1.0
        for j in range(order + 1):
            if j > 0:
                fall *= -(s + j - 1)
            total += (comb(order, j) * (1j * phi) ** (order - j) * fall
                      * (n + a) ** (-s - j))
        return total * np.exp(1j * phi * n)

    f0 = deriv(0.0, 0)
    f1 = deriv(0.0, 1)
    f3 = deriv(0.0, 3)
    f5 = deriv(0.0, 5)
    return complex(integral + 0.5 * f0 - f1 / 12.0 + f3 / 720.0 - f5 / 30240.0)


def lerch_tail(z: complex, s: int, a: float) -> complex:
    """phi(z, s, a) = sum_{n>=0} z^n/(n+a)^s for |z| <= 1 and a >> 1.

    For s = 1 the point z = 1 is a genuine divergence and is rejected.
    Accuracy is ~1e-12 for a >= 30 (validated against mpmath.lerchphi).
    """
    if a <= 0:
        raise ValueError(f"lerch_tail needs a > 0, got {a}")
    z = complex(z)
    if abs(z) > 1 + 1e-12:
        raise ValueError("lerch_tail needs |z| <= 1")
    phi = abs(np.angle(z))
    on_one = abs(z - 1.0) < 1e-15
    if on_one:
        if s == 1:
            raise ConvergenceError("lerch_tail diverges at z = 1, s = 1")
        return complex(special.zeta(s, a))
    # Criterion: Laguerre contour stays far from the integrand pole at
    # distance ~ a*phi; below that, Euler-Maclaurin on the raw series.
    if a * phi >= 40.0 and abs(abs(z) - 1.0) < 1e-12:
        return _lerch_laguerre(z, s, a)
    if abs(z) < 1 - 1e-9:
        return _lerch_laguerre(z, s, a)
    return _lerch_euler_maclaurin(z, s, a)


def oscillatory_inverse_power_tail(z: complex, s: int, n_start: int) -> complex:
    """sum_{n>=n_start} z^n / n^s, |z| = 1."""
    return z**n_start * lerch_tail(z, s, float(n_start))


def fejer_weights(half_width: int) -> np.ndarray:
    """Triangular (Cesaro) weights for indices -half_width..half_width."""
    idx = np.arange(-half_width, half_width + 1)
    return 1.0 - np.abs(idx) / (half_width + 1.0)
