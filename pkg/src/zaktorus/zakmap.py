"""The line-torus mapping: forward/inverse Zak transforms and the discrete
coefficient layer.

Forward map (position-lattice reduction of the transform kernel):

    Psi(alpha, beta) = sqrt(x0) conj(chi(alpha,beta)) e^{i alpha beta/4pi}
                       * sum_k e^{-i beta (alpha/2pi + k)} psi(x0 (alpha/2pi + k)).

Fields are sampled at cell centers of [-pi, pi)^2, which keeps every sample
off the discontinuity lines; boundary values are never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import basis_lattice_sum, discrete_wf_x
from .conventions import TWO_PI, Convention, chi, lambda_of
from .numerics import ConvergenceError
from .states import (DiscreteBasisState, Gaussian, LineState, Sampled,
                     Superposition, apply_displacement)  # noqa: F401  (re-export)
from .units import DEFAULT_UNITS, UnitsConfig


@dataclass(frozen=True)
class TorusField:
    """Complex amplitudes <alpha,beta|psi> on a cell-center grid."""
    convention: Convention
    values: np.ndarray  # (n_alpha, n_beta)
    units: UnitsConfig = DEFAULT_UNITS
    truncation_error: float = field(default=0.0, compare=False)

    @property
    def n_alpha(self) -> int:
        return self.values.shape[0]

    @property
    def n_beta(self) -> int:
        return self.values.shape[1]

    @property
    def alphas(self) -> np.ndarray:
        return cell_centers(self.n_alpha)

    @property
    def betas(self) -> np.ndarray:
        return cell_centers(self.n_beta)

    def norm_squared(self) -> float:
        """(1/2pi)^2 * double integral of |Psi|^2, midpoint rule."""
        return float(np.mean(np.abs(self.values) ** 2))


@dataclass(frozen=True)
class DiscreteZakCoeffs:
    """Coefficients c_{l,m} = <l,m|psi> on a rectangular index window."""
    convention: Convention
    l_values: np.ndarray
    m_values: np.ndarray
    c: np.ndarray  # (n_l, n_m)
    units: UnitsConfig = DEFAULT_UNITS

    def sum_sq(self) -> float:
        return float(np.sum(np.abs(self.c) ** 2))

    def leakage(self) -> float:
        """1 - sum |c|^2; Bessel defect of the window for a unit-norm state."""
        return 1.0 - self.sum_sq()


def cell_centers(n: int) -> np.ndarray:
    return -math.pi + (np.arange(n) + 0.5) * TWO_PI / n


def _gaussian_k_range(state: Gaussian, units: UnitsConfig) -> tuple[int, int, float]:
    lo, hi = state.support(units)
    k_lo = math.floor(lo / units.x0) - 1
    k_hi = math.ceil(hi / units.x0) + 1
    # |psi| at the outermost retained lattice ring bounds the dropped tail
    tail = float(np.abs(state.psi_x(np.array([lo - units.x0, hi + units.x0]), units)).max())
    return k_lo, k_hi, tail


def _lattice_sum(state: LineState, alpha: np.ndarray, beta: np.ndarray,
                 units: UnitsConfig) -> tuple[np.ndarray, float]:
    """sum_k e^{-i beta (alpha/2pi + k)} psi(x_k) and a truncation bound."""
    if isinstance(state, DiscreteBasisState):
        return basis_lattice_sum(state.convention, state.l, state.m,
                                 alpha, beta, units), 0.0
    if isinstance(state, Gaussian):
        k_lo, k_hi, tail = _gaussian_k_range(state, units)
        k = np.arange(k_lo, k_hi + 1)
        frac = alpha[..., None] / TWO_PI + k
        vals = state.psi_x(units.x0 * frac, units)
        out = np.sum(np.exp(-1j * beta[..., None] * frac) * vals, axis=-1)
        return out, tail
    if isinstance(state, Superposition):
        total = 0.0
        bound = 0.0
        for w, s in state.terms:
            part, b = _lattice_sum(s, alpha, beta, units)
            total = total + w * part
            bound += abs(w) * b
        return total, bound
    if isinstance(state, Sampled):
        step = units.x0 / state.dx
        if abs(step - round(step)) > 1e-9:
            raise ConvergenceError(
                "sampled grid spacing is not commensurate with x0; "
                "lattice translation would need interpolation")
        step = int(round(step))
        n = state.values.size
        edge = float(max(abs(state.values[0]), abs(state.values[-1])))
        out = np.zeros(alpha.shape, dtype=complex)
        for idx in np.ndindex(alpha.shape):
            a = alpha[idx]
            i0 = (units.x0 * a / TWO_PI - state.x_min) / state.dx
            k0 = math.ceil(-i0 / step)
            i0k = i0 + k0 * step
            near = round(i0k)
            if abs(i0k - near) > 1e-6:
                raise ConvergenceError(
                    f"alpha = {a!r} does not align with the sample grid")
            ks = np.arange(0, (n - 1 - near) // step + 1)
            ii = near + ks * step
            frac = a / TWO_PI + (k0 + ks)
            out[idx] = np.sum(np.exp(-1j * beta[idx] * frac) * state.values[ii])
        return out, edge
    raise TypeError(f"unsupported state {type(state)!r}")


def zak_point(state: LineState, conv: Convention, alpha, beta,
              units: UnitsConfig = DEFAULT_UNITS):
    """<alpha,beta|psi> at arbitrary phase points (vectorized)."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    scalar = alpha.ndim == 1 and alpha.size == 1
    s, _ = _lattice_sum(state, alpha, beta, units)
    out = (math.sqrt(units.x0) * np.conj(chi(conv, alpha, beta))
           * np.exp(1j * alpha * beta / (2.0 * TWO_PI)) * s)
    return complex(out[0]) if scalar else out


def zak_forward(state: LineState, conv: Convention, grid: tuple[int, int] = (64, 64),
                units: UnitsConfig = DEFAULT_UNITS) -> TorusField:
    """Sample the Zak transform of ``state`` on an (n_alpha, n_beta) grid."""
    n_alpha, n_beta = grid
    if n_alpha < 2 or n_beta < 2:
        raise ValueError("grid must be at least 2x2")
    al, be = np.meshgrid(cell_centers(n_alpha), cell_centers(n_beta), indexing="ij")
    s, bound = _lattice_sum(state, al, be, units)
    vals = (math.sqrt(units.x0) * np.conj(chi(conv, al, be))
            * np.exp(1j * al * be / (2.0 * TWO_PI)) * s)
    if bound > 1e-6:
        raise ConvergenceError(
            "state support is not covered by its sample grid "
            f"(edge magnitude {bound:.2e})", estimate=bound)
    return TorusField(conv, vals, units, truncation_error=bound * math.sqrt(units.x0))


def native_x_values(n_alpha: int, k_lo: int, k_hi: int,
                    units: UnitsConfig = DEFAULT_UNITS) -> np.ndarray:
    """Position lattice x = x0 (alpha_i/2pi + k) matching a field's alpha grid.

    The returned grid is uniform with spacing x0/n_alpha, so the inverse
    transform can reconstruct on it without interpolating in alpha.
    """
    al = cell_centers(n_alpha)
    return (units.x0 * (al[None, :] / TWO_PI + np.arange(k_lo, k_hi + 1)[:, None])).ravel()


def zak_inverse(field: TorusField, x_values,
                units: UnitsConfig | None = None) -> Sampled:
    """Reconstruct psi on a uniform x grid aligned with the field's columns.

    Each requested x must satisfy 2 pi x / x0 = alpha_i (mod 2 pi) for a
    sampled column alpha_i; ``native_x_values`` produces such grids.  The
    attached error estimate is the difference against a half-resolution
    beta quadrature.
    """
    units = units or field.units
    x_values = np.asarray(x_values, dtype=float)
    dx = units.x0 / field.n_alpha
    steps = np.diff(x_values) / dx
    if x_values.size < 2 or np.any(np.abs(steps - np.rint(steps)) > 1e-8) \
            or np.any(np.rint(steps) < 1):
        raise ValueError("x_values must be strictly increasing on the native lattice")
    if np.any(np.abs(steps - 1) > 1e-12):
        raise ValueError("x_values must be contiguous native lattice points")

    al = field.alphas
    be = field.betas
    alpha_x = units.p0 * x_values / units.hbar  # exact phase coordinate of each x
    col = (alpha_x - (al[0] - TWO_PI * np.floor((alpha_x - al[0]) / TWO_PI))) / (TWO_PI / field.n_alpha)
    idx = np.rint(col).astype(int) % field.n_alpha
    resid = np.abs(alpha_x - (al[idx] + TWO_PI * np.round((alpha_x - al[idx]) / TWO_PI)))
    if np.any(resid > 1e-8):
        raise ValueError("x grid does not align with the field's alpha columns")

    def reconstruct(b_idx: np.ndarray) -> np.ndarray:
        phases = (chi(field.convention, alpha_x[:, None], be[None, b_idx])
                  * np.exp(-1j * alpha_x[:, None] * be[None, b_idx] / (2.0 * TWO_PI))
                  * np.exp(1j * be[None, b_idx] * alpha_x[:, None] / TWO_PI))
        return np.mean(phases * field.values[idx][:, b_idx], axis=1) / math.sqrt(units.x0)

    full = reconstruct(np.arange(field.n_beta))
    half = reconstruct(np.arange(0, field.n_beta, 2))
    est = float(np.max(np.abs(full - half)))
    return Sampled(float(x_values[0]), dx, full, error_estimate=est)


def _is_basis_combination(state: LineState, conv: Convention) -> bool:
    if isinstance(state, DiscreteBasisState):
        return state.convention is conv
    if isinstance(state, Superposition):
        return all(_is_basis_combination(s, conv) for _, s in state.terms)
    return False


def _basis_terms(state: LineState):
    if isinstance(state, DiscreteBasisState):
        yield 1.0 + 0.0j, state
        return
    for w, s in state.terms:
        for w2, b in _basis_terms(s):
            yield w * w2, b


def _gl_box(order: int):
    return np.polynomial.legendre.leggauss(order)


def coeffs_extract(state: LineState, conv: Convention,
                   l_window: tuple[int, int], m_window: tuple[int, int],
                   units: UnitsConfig = DEFAULT_UNITS,
                   order: int | None = None) -> DiscreteZakCoeffs:
    """c_{l,m} = int conj(<x|l,m>) psi(x) dx over the index window.

    The quadrature runs in whichever representation makes the basis kernel
    compactly supported: position boxes for (b), momentum boxes for (a).
    Convention (c) integrates in position over the state's support with
    cells split at the kernel discontinuities.
    """
    l_lo, l_hi = l_window
    m_lo, m_hi = m_window
    if l_hi < l_lo or m_hi < m_lo:
        raise ValueError("empty coefficient window")
    ls = np.arange(l_lo, l_hi + 1)
    ms = np.arange(m_lo, m_hi + 1)
    lmax = int(np.max(np.abs(ls)))
    mmax = int(np.max(np.abs(ms)))

    if conv is Convention.C and _is_basis_combination(state, conv):
        # the 1/x kernel tails defeat support-window quadrature; use the
        # wide discontinuity-aligned overlap integrals instead
        from .basis import basis_overlap
        c = np.zeros((ls.size, ms.size), dtype=complex)
        for weight, bstate in _basis_terms(state):
            for i, l in enumerate(ls):
                for j, m in enumerate(ms):
                    c[i, j] += weight * basis_overlap(
                        conv, (int(l), int(m)), (bstate.l, bstate.m), units,
                        n_cells=2000)
        return DiscreteZakCoeffs(conv, ls, ms, c, units)

    if conv is Convention.B:
        ordr = order or max(32, 4 * lmax + 16)
        nodes, w = _gl_box(ordr)
        c = np.empty((ls.size, ms.size), dtype=complex)
        for j, m in enumerate(ms):
            x = units.x0 * (m + 0.5 * nodes)
            psi = state.psi_x(x, units)
            big_a = units.p0 * x / units.hbar
            phases = np.exp(-1j * np.outer(ls, big_a))
            c[:, j] = phases @ (0.5 * units.x0 * w * psi) / math.sqrt(units.x0)
        return DiscreteZakCoeffs(conv, ls, ms, c, units)

    if conv is Convention.A:
        ordr = order or max(32, 4 * mmax + 16)
        nodes, w = _gl_box(ordr)
        c = np.empty((ls.size, ms.size), dtype=complex)
        for i, l in enumerate(ls):
            p = units.p0 * (l + 0.5 * nodes)
            psi_p = state.psi_p(p, units)
            big_b = units.x0 * p / units.hbar
            phases = np.exp(1j * np.outer(ms, big_b))
            c[i, :] = phases @ (0.5 * units.p0 * w * psi_p) / math.sqrt(units.p0)
        return DiscreteZakCoeffs(conv, ls, ms, c, units)

    # convention (c): composite position quadrature over the state support,
    # cells split at the kernel discontinuities.  The e^{-i l A} factor
    # oscillates |l| cycles per cell, so the Gauss-Legendre order is chosen
    # per |l| band rather than once for the whole window.
    from .numerics import composite_gl
    from .states import _support_of
    lo, hi = _support_of(state, units)
    j_lo = math.floor(lo / units.x0 - 0.5)
    j_hi = math.ceil(hi / units.x0 + 0.5)
    edges = units.x0 * (np.arange(j_lo, j_hi + 2) - 0.5)
    c = np.empty((ls.size, ms.size), dtype=complex)
    band_top = 32
    done = np.zeros(ls.size, dtype=bool)
    while not np.all(done):
        band = (~done) & (np.abs(ls) <= band_top)
        if np.any(band):
            ordr = max(order or 0, 4 * band_top + 24)
            nodes, w = composite_gl(edges, ordr)
            psi = state.psi_x(nodes, units)
            big_a = units.p0 * nodes / units.hbar
            lam = lambda_of(conv, big_a[None, :] - TWO_PI * ms[:, None])
            phases = np.exp(-1j * np.outer(ls[band], big_a))
            c[band, :] = (phases * (w * psi)[None, :]) @ lam.T / math.sqrt(units.x0)
            done |= band
        band_top *= 2
    return DiscreteZakCoeffs(conv, ls, ms, c, units)


def synthesize_torus(coeffs: DiscreteZakCoeffs, alpha, beta,
                     mode: str = "fejer"):
    """Evaluate the truncated double Fourier series sum c_{l,m} e^{i(l a - m b)}.

    ``mode='fejer'`` applies per-axis triangular weights (the right choice
    for states whose transform is discontinuous); ``mode='plain'`` uses the
    raw partial sum.
    """
    if mode not in ("fejer", "plain"):
        raise ValueError("mode must be 'fejer' or 'plain'")
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    scalar = alpha.ndim == 1 and alpha.size == 1
    ls, ms = coeffs.l_values, coeffs.m_values
    if mode == "fejer":
        lc = 0.5 * (ls[0] + ls[-1])
        mc = 0.5 * (ms[0] + ms[-1])
        wl = 1.0 - np.abs(ls - lc) / (0.5 * (ls[-1] - ls[0]) + 1.0)
        wm = 1.0 - np.abs(ms - mc) / (0.5 * (ms[-1] - ms[0]) + 1.0)
    else:
        wl = np.ones(ls.size)
        wm = np.ones(ms.size)
    el = np.exp(1j * np.multiply.outer(alpha, ls))  # (..., n_l)
    em = np.exp(-1j * np.multiply.outer(beta, ms))  # (..., n_m)
    weighted = (wl[:, None] * wm[None, :]) * coeffs.c
    out = np.einsum("...l,lm,...m->...", el, weighted, em)
    return complex(out[0]) if scalar else out
