"""Discrete Zak basis wavefunctions and their lattice sums.

The basis state |l, m> has position wavefunction

    <x|l,m> = e^{i l p0 x / hbar} lambda(p0 x/hbar - 2 pi m) / sqrt(x0)

and momentum wavefunction

    <p|l,m> = e^{-i m x0 p / hbar} mu(x0 p/hbar - 2 pi l) / sqrt(p0).

The forward Zak map needs sums of these over the position lattice
x_k = x0 (alpha/2pi + k).  For conventions (a) and (c) the kernel decays
like 1/x, so the sums converge conditionally; they are evaluated as an
explicit head plus Lerch-transcendent tails.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .conventions import TWO_PI, Convention, lambda_of, mu_of
from .numerics import lerch_tail
from .units import DEFAULT_UNITS, UnitsConfig


def discrete_wf_x(conv: Convention, l: int, m: int, x, units: UnitsConfig = DEFAULT_UNITS):
    """Position wavefunction of the discrete basis state (l, m)."""
    x = np.asarray(x, dtype=float)
    big_a = units.p0 * x / units.hbar
    out = (np.exp(1j * l * big_a) * lambda_of(conv, big_a - TWO_PI * m)
           / math.sqrt(units.x0))
    return complex(out) if out.ndim == 0 else out


def discrete_wf_p(conv: Convention, l: int, m: int, p, units: UnitsConfig = DEFAULT_UNITS):
    """Momentum wavefunction of the discrete basis state (l, m)."""
    p = np.asarray(p, dtype=float)
    big_b = units.x0 * p / units.hbar
    out = (np.exp(-1j * m * big_b) * mu_of(conv, big_b - TWO_PI * l)
           / math.sqrt(units.p0))
    return complex(out) if out.ndim == 0 else out


def _tail_pair(u: complex, g: float, k_cut: int) -> complex:
    """sum_{k > k_cut} u^k/(k + g) - sum_{k > k_cut} conj(u)^k/(k - g).

    The two one-sided lattice tails always enter in this combination; at
    u = 1 each side diverges but the difference is a digamma difference.
    """
    if abs(u - 1.0) < 1e-13:
        return complex(special.digamma(k_cut + 1 - g) - special.digamma(k_cut + 1 + g))
    plus = u ** (k_cut + 1) * lerch_tail(u, 1, k_cut + 1 + g)
    minus = np.conj(u) ** (k_cut + 1) * lerch_tail(np.conj(u), 1, k_cut + 1 - g)
    return complex(plus - minus)


def basis_lattice_sum(conv: Convention, l: int, m: int, alpha, beta,
                      units: UnitsConfig = DEFAULT_UNITS, k_head: int = 2048):
    """sum_k e^{-i beta (alpha/2pi + k)} <x_k|l,m> over the position lattice
    x_k = x0 (alpha/2pi + k).

    Head terms are summed directly from the wavefunction; the 1/k tails of
    conventions (a) and (c) are added analytically through Lerch
    transcendents.  Convention (b) has compact support and needs no tail.
    Vectorized over (alpha, beta) arrays of equal shape.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if alpha.shape != beta.shape:
        raise ValueError("alpha and beta must have matching shapes")
    scalar = alpha.size == 1 and alpha.ndim == 1

    k_cut = int(k_head + abs(m) + int(np.max(np.abs(alpha)) / TWO_PI) + 2)
    k = np.arange(-k_cut, k_cut + 1)
    # lattice points for every (alpha, k)
    xk = units.x0 * (alpha[..., None] / TWO_PI + k)
    psi = discrete_wf_x(conv, l, m, xk, units)
    head = np.sum(np.exp(-1j * beta[..., None] * (alpha[..., None] / TWO_PI + k)) * psi,
                  axis=-1)

    if conv is not Convention.B:
        gamma0 = alpha - TWO_PI * m
        pref = np.exp(-1j * beta * alpha / TWO_PI) * np.exp(1j * l * alpha) / math.sqrt(units.x0)
        tails = np.zeros_like(head)
        flat_idx = np.ndindex(alpha.shape)
        for idx in flat_idx:
            u = -np.exp(-1j * beta[idx])
            g0 = gamma0[idx]
            if conv is Convention.A:
                coef = 2.0 * math.sin(g0 / 2.0) / TWO_PI
                tails[idx] = coef * _tail_pair(u, g0 / TWO_PI, k_cut)
            else:
                a0 = math.floor(g0 / TWO_PI + 0.5)
                u0 = g0 - TWO_PI * a0
                coef = (-1.0) ** a0 * math.sin(u0 / 4.0) / math.pi
                tails[idx] = coef * _tail_pair(u, a0 + u0 / (2.0 * TWO_PI), k_cut)
        head = head + pref * tails

    return complex(head[0]) if scalar else head


def basis_overlap(conv: Convention, lm, lpmp, units: UnitsConfig = DEFAULT_UNITS,
                  n_cells: int = 10_000, order: int = 16) -> complex:
    """<l,m|l',m'> by quadrature in the representation where the kernel has
    compact support; convention (c) uses a wide tail-bounded window.

    Conventions (a) and (b) reduce to one exact box integral, so the result
    is accurate to machine precision.  For (c) the kernel-product tail decays
    like 1/alpha^2 and the window bounds the error by roughly 16/(pi * window).
    """
    (l, m), (lp, mp) = lm, lpmp
    if conv is Convention.B:
        # x-representation boxes: disjoint supports unless m == m'
        if m != mp:
            return 0.0 + 0.0j
        nodes, w = np.polynomial.legendre.leggauss(max(order, 2 * abs(lp - l) + 12))
        # integral over the width-x0 box centered at m*x0
        x = units.x0 * (m + 0.5 * nodes)
        big_a = units.p0 * x / units.hbar
        vals = np.exp(1j * (lp - l) * big_a)
        return complex(np.sum(0.5 * w * vals))
    if conv is Convention.A:
        if l != lp:
            return 0.0 + 0.0j
        nodes, w = np.polynomial.legendre.leggauss(max(order, 2 * abs(mp - m) + 12))
        p = units.p0 * (l + 0.5 * nodes)
        big_b = units.x0 * p / units.hbar
        vals = np.exp(1j * (mp - m) * big_b)
        return complex(np.sum(0.5 * w * vals))

    # convention (c): int (dalpha/2pi) e^{i(l'-l)alpha} lam(alpha-2pi m) lam(alpha-2pi m')
    from .numerics import composite_gl
    edges = math.pi * (2 * np.arange(-n_cells, n_cells + 1) + 1)
    nodes, w = composite_gl(edges, order)
    lam1 = lambda_of(conv, nodes - TWO_PI * m)
    lam2 = lambda_of(conv, nodes - TWO_PI * mp)
    vals = np.exp(1j * (lp - l) * nodes) * lam1 * lam2
    return complex(np.sum(w * vals) / TWO_PI)
