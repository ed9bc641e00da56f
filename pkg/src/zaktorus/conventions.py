"""Phase-convention kernels for the periodic Zak basis.

A convention is a unit-modulus function chi(alpha, beta) on the torus obeying
the quasi-periodicity

    chi(alpha, beta) = chi(alpha + 2*pi, beta) * exp(-i*beta/2)
                     = exp(i*alpha/2) * chi(alpha, beta + 2*pi).

Three conventions are implemented:

    (a)  continuous in alpha, jumps across beta = pi (mod 2*pi),
    (b)  continuous in beta, jumps across alpha = pi (mod 2*pi),
    (c)  symmetric, chi(alpha,beta) = chi(-beta,alpha) = conj(chi(beta,alpha)),
         jumps in both variables.

Each convention is equivalently encoded by a single-argument kernel pair
(lambda, mu), Fourier transforms of each other; closed forms and quadrature
routes for both are provided here.  Values on discontinuity lines follow the
half-sum convention: the mean of the one-sided limits of the *final* value,
averaged independently per discontinuous variable (four-point average at
simultaneous ties).
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from .numerics import composite_gl, fejer_weights, quad_complex

TWO_PI = 2.0 * math.pi


class Convention(enum.Enum):
    A = "a"
    B = "b"
    C = "c"

    @classmethod
    def parse(cls, text: str) -> "Convention":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown convention {text!r}; expected a, b or c") from None


class TorusPoint(NamedTuple):
    alpha: float
    beta: float


def closest_integer(z):
    """Integer nearest to z; exact half-integers return k + 1/2.

    The tie value is the mean of the two one-sided limits k and k+1.
    Vectorized; the return dtype is float to carry the tie values.
    """
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("closest_integer requires finite input")
    n = np.floor(z)
    r = z - n
    out = n + (r > 0.5) + 0.5 * (r == 0.5)
    return float(out) if out.ndim == 0 else out


def _branches(z):
    """Lower/upper branch integers of round(z) with tie weights.

    Returns (lo, hi, w_hi): w_hi is 0.5 exactly at half-integer ties,
    else 0 and hi == lo.
    """
    z = np.asarray(z, dtype=float)
    n = np.floor(z)
    r = z - n
    tie = r == 0.5
    lo = np.where(tie, n, n + (r > 0.5))
    hi = np.where(tie, n + 1.0, lo)
    w_hi = np.where(tie, 0.5, 0.0)
    return lo, hi, w_hi


def reduce_to_standard_square(alpha: float, beta: float):
    """Write (alpha, beta) = (alpha0, beta0) + 2*pi*(a, b) with the reduced
    point in [-pi, pi) x [-pi, pi).

    Boundary policy: points on the upper edge alpha = pi (mod 2*pi) are
    labeled into the cell whose *lower* edge they sit on, i.e. alpha0 = -pi.
    """
    a = math.floor((alpha + math.pi) / TWO_PI)
    b = math.floor((beta + math.pi) / TWO_PI)
    return a, b, TorusPoint(alpha - TWO_PI * a, beta - TWO_PI * b)


def _chi_branch(conv: Convention, alpha, beta, a, b):
    if conv is Convention.A:
        return np.exp(1j * alpha * (beta / (2.0 * TWO_PI) - b))
    if conv is Convention.B:
        return np.exp(-1j * beta * (alpha / (2.0 * TWO_PI) - a))
    ai = np.rint(a).astype(np.int64)
    bi = np.rint(b).astype(np.int64)
    sign = np.where((ai * bi) % 2 == 0, 1.0, -1.0)
    return sign * np.exp(1j * (a * beta - alpha * b) / 2.0)


def chi(conv: Convention, alpha, beta):
    """Unit-modulus phase kernel chi(alpha, beta) of the given convention.

    On discontinuity lines the half-sum of one-sided limits is returned
    (ties are detected at exact floating-point half-integers of the
    branch variables alpha/2pi, beta/2pi).
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    a_lo, a_hi, wa = _branches(alpha / TWO_PI)
    b_lo, b_hi, wb = _branches(beta / TWO_PI)
    out = (1.0 - wa) * (1.0 - wb) * _chi_branch(conv, alpha, beta, a_lo, b_lo)
    out = out + wa * (1.0 - wb) * _chi_branch(conv, alpha, beta, a_hi, b_lo)
    out = out + (1.0 - wa) * wb * _chi_branch(conv, alpha, beta, a_lo, b_hi)
    out = out + wa * wb * _chi_branch(conv, alpha, beta, a_hi, b_hi)
    return complex(out) if out.ndim == 0 else out


def _sinc(x):
    # unnormalized sinc: sin(x)/x, value 1 at 0
    return np.sinc(np.asarray(x, dtype=float) / math.pi)


def lambda_of(conv: Convention, alpha):
    """Closed-form position kernel lambda(alpha)."""
    alpha = np.asarray(alpha, dtype=float)
    if conv is Convention.A:
        out = _sinc(alpha / 2.0)
    elif conv is Convention.B:
        lo, hi, w = _branches(alpha / TWO_PI)
        out = (1.0 - w) * (lo == 0) + w * (hi == 0)
    else:
        lo, hi, w = _branches(alpha / TWO_PI)
        out = ((1.0 - w) * _sinc((alpha + TWO_PI * lo) / 4.0)
               + w * _sinc((alpha + TWO_PI * hi) / 4.0))
    return float(out) if out.ndim == 0 else out


def mu_of(conv: Convention, beta):
    """Closed-form momentum kernel mu(beta); mirror of lambda with the
    roles of conventions (a) and (b) swapped, identical for (c)."""
    if conv is Convention.A:
        return lambda_of(Convention.B, beta)
    if conv is Convention.B:
        return lambda_of(Convention.A, beta)
    return lambda_of(Convention.C, beta)


def snc(z, alpha):
    """Incomplete sinc: sin(z*alpha)/alpha for 0 <= z <= 1, limit z at alpha=0."""
    z = np.asarray(z, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if np.any(z < 0.0) or np.any(z > 1.0):
        raise ValueError("snc requires 0 <= z <= 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(alpha == 0.0, z, np.sin(z * alpha) / np.where(alpha == 0.0, 1.0, alpha))
    if out.ndim == 0:
        return float(out)
    return out


def lambda_by_quadrature(conv: Convention, alpha: float, epsabs: float = 1e-11):
    """lambda(alpha) as the kernel average (1/2pi) int e^{i alpha beta/4pi}
    chi(alpha, beta) dbeta over one period.

    Adaptive Gauss-Kronrod; the integrand is smooth on (-pi, pi) because
    the beta-jumps of every convention sit at the interval ends.
    Returns (value, error_estimate).
    """
    alpha = float(alpha)

    def f(beta):
        return np.exp(1j * alpha * beta / (2.0 * TWO_PI)) * chi(conv, alpha, beta)

    return quad_complex(f, -math.pi, math.pi, epsabs=epsabs * math.pi)


def mu_by_quadrature(conv: Convention, beta: float, epsabs: float = 1e-11):
    """mu(beta) = (1/2pi) int e^{-i alpha beta/4pi} chi(alpha, beta) dalpha."""
    beta = float(beta)

    def f(alpha):
        return np.exp(-1j * alpha * beta / (2.0 * TWO_PI)) * chi(conv, alpha, beta)

    return quad_complex(f, -math.pi, math.pi, epsabs=epsabs * math.pi)


def _scaled(val, err, scale):
    return val / scale, err / scale


def lambda_by_quadrature_normalized(conv, alpha, epsabs=1e-11):
    return _scaled(*lambda_by_quadrature(conv, alpha, epsabs), TWO_PI)


def mu_by_quadrature_normalized(conv, beta, epsabs=1e-11):
    return _scaled(*mu_by_quadrature(conv, beta, epsabs), TWO_PI)


def chi_dalpha_smooth(conv: Convention, alpha, beta):
    """Smooth part of chi* (1/i) d(chi)/d(alpha); delta-comb terms on the
    discontinuity lines are excluded."""
    if conv is Convention.A:
        return beta / (2.0 * TWO_PI) - closest_integer(beta / TWO_PI)
    if conv is Convention.B:
        return -beta / (2.0 * TWO_PI)
    return -0.5 * closest_integer(beta / TWO_PI)


def chi_dbeta_smooth(conv: Convention, alpha, beta):
    """Smooth part of chi* i d(chi)/d(beta); delta-comb terms excluded."""
    if conv is Convention.A:
        return -alpha / (2.0 * TWO_PI)
    if conv is Convention.B:
        return alpha / (2.0 * TWO_PI) - closest_integer(alpha / TWO_PI)
    return -0.5 * closest_integer(alpha / TWO_PI)


def chi_from_lambda_series(conv: Convention, alpha, beta, m_max: int = 2000,
                           fejer: bool = True):
    """Reconstruct chi from the lambda kernel through its translate series

        chi = e^{-i alpha beta/4pi} sum_m lambda(alpha - 2pi m) e^{i m beta},

    Cesaro (Fejer) accelerated by default, for checking the kernel pair
    against the direct evaluation away from discontinuity lines.
    """
    alpha = float(alpha)
    beta = float(beta)
    m = np.arange(-m_max, m_max + 1)
    lam = lambda_of(conv, alpha - TWO_PI * m)
    w = fejer_weights(m_max) if fejer else np.ones_like(lam)
    series = np.sum(w * lam * np.exp(1j * m * beta))
    return np.exp(-1j * alpha * beta / (2.0 * TWO_PI)) * series


def halfsine(alpha):
    """(-1)^round(alpha/2pi) * sin(alpha/2), written in the jump-free form
    sin(alpha/2 - pi*round(alpha/2pi)); ties land on the half-sum value 0."""
    alpha = np.asarray(alpha, dtype=float)
    out = np.sin(alpha / 2.0 - math.pi * closest_integer(alpha / TWO_PI))
    return float(out) if out.ndim == 0 else out


def halfsine_sine_coefficient(j: int) -> float:
    """Coefficient of sin(j*alpha) in the two-sided sine series of halfsine,
    j running over all integers."""
    return (-1.0) ** (j + 1) / ((j + 0.5) * math.pi)


def halfsine_exp_coefficient(j: int, epsabs: float = 1e-12):
    """Exponential Fourier coefficient (1/2pi) int halfsine(a) e^{-i j a} da
    by quadrature.  The two-sided sine series is not a unique decomposition;
    its well-defined content is c_j - c_{-j} = 2i * (this coefficient)."""
    val, err = quad_complex(lambda a: halfsine(a) * np.exp(-1j * j * a),
                            -math.pi, math.pi, epsabs=epsabs)
    return val / TWO_PI, err / TWO_PI


def windowed_lambda_fourier(conv: Convention, betas, n_cells: int = 512,
                            order: int = 24):
    """Windowed numerical Fourier transform of the lambda kernel,

        mu_hat(beta) = int_{|alpha| <= 2pi n_cells} e^{-i alpha beta/2pi}
                       lambda(alpha) dalpha / 2pi,

    on a discontinuity-aligned cell partition.  Checks the kernel-pair
    duality; for convention (c) the kernel is its own transform.
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    bound = TWO_PI * n_cells
    odd = math.pi * (2 * np.arange(-(n_cells - 1), n_cells) + 1)
    edges = np.concatenate(([-bound], odd, [bound]))
    nodes, weights = composite_gl(edges, order)
    lam = lambda_of(conv, nodes)
    phase = np.exp(-1j * np.outer(betas, nodes) / TWO_PI)
    out = phase @ (weights * lam) / TWO_PI
    return out if out.shape != (1,) else out[0]


def discontinuity_distance(conv: Convention, alpha, beta):
    """Max-norm distance (after reduction to the standard square) from the
    convention's discontinuity lines."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    # with alpha0 in [-pi, pi), the distance to {alpha = pi mod 2pi} is pi - |alpha0|
    dist_a = math.pi - np.abs(np.mod(alpha + math.pi, TWO_PI) - math.pi)
    dist_b = math.pi - np.abs(np.mod(beta + math.pi, TWO_PI) - math.pi)
    if conv is Convention.A:
        out = dist_b
    elif conv is Convention.B:
        out = dist_a
    else:
        out = np.minimum(dist_a, dist_b)
    return float(out) if np.ndim(out) == 0 else out
