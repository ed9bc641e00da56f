"""Wigner functions of the discrete basis states.

Closed forms exist for conventions (b) and (c); convention (a) is the
(b) form with position and momentum interchanged.  All are bounded by
-2 <= W <= 2, continuous, and centered at (m x0, l p0) for the state
(l, m) through the shift law W_lm(x, p) = W_00(x - m x0, p - l p0).

The integral-definition oracle integrates the kernel product

    W_00(x, p) = 2 int (dalpha/2pi) lam(A + alpha) e^{2 i alpha p/p0}
                 lam(A - alpha),           A = p0 x / hbar,

directly.  For convention (c) the product decays like 1/alpha^2 only, so
the oracle sums whole 2pi cells explicitly up to a cutoff and closes the
remainder with a 1/n expansion whose n-sums are polylogarithm tails; the
returned error estimate includes the truncated expansion term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .conventions import TWO_PI, Convention, lambda_of, mu_of, snc
from .numerics import composite_gl, lerch_tail, quad_complex
from .units import DEFAULT_UNITS, UnitsConfig


@dataclass(frozen=True)
class TileCoords:
    """Half-cell tile label and offsets: 2x/x0 = a + s, 2p/p0 = b + t
    with s, t in [-1/2, 1/2]."""
    a: int
    b: int
    s: float
    t: float


def tile_decompositions(u: float) -> list[tuple[int, float, float]]:
    """(integer, fraction, weight) decompositions of u = n + s with
    |s| <= 1/2; exact half-integer ties return both neighbours at
    weight 1/2 each (the two one-sided tile limits)."""
    n = math.floor(u)
    r = u - n
    if r == 0.5:
        return [(n, 0.5, 0.5), (n + 1, -0.5, 0.5)]
    if r > 0.5:
        return [(n + 1, r - 1.0, 1.0)]
    return [(n, r, 1.0)]


def _sgn(v: float) -> float:
    return float(np.sign(v))


def _w00_b(x_over_x0, p_over_p0):
    x = np.asarray(x_over_x0, dtype=float)
    p = np.asarray(p_over_p0, dtype=float)
    z = np.clip(1.0 - 2.0 * np.abs(x), 0.0, 1.0)
    return np.where(np.abs(x) < 0.5, 2.0 * snc(z, TWO_PI * p), 0.0)


def _w00_c_tile(a, b, s, t):
    ai = np.rint(np.asarray(a)).astype(np.int64)
    bi = np.rint(np.asarray(b)).astype(np.int64)
    total = 0.0
    for j in (0, 1):
        for k in (0, 1):
            sign = np.where(((ai + j) * (bi + k)) % 2 == 0, 1.0, -1.0)
            total = total + sign \
                * snc(np.abs(1.0 - np.abs(t) - k), (2 * a + s + j * np.sign(s)) * math.pi / 2.0) \
                * snc(np.abs(1.0 - np.abs(s) - j), (2 * b + t + k * np.sign(t)) * math.pi / 2.0)
    return 2.0 * total


def _w00_c(x_over_x0, p_over_p0):
    from .conventions import _branches
    u = 2.0 * np.asarray(x_over_x0, dtype=float)
    v = 2.0 * np.asarray(p_over_p0, dtype=float)
    a_lo, a_hi, wa = _branches(u)
    b_lo, b_hi, wb = _branches(v)
    out = 0.0
    for a, w_a in ((a_lo, 1.0 - wa), (a_hi, wa)):
        for b, w_b in ((b_lo, 1.0 - wb), (b_hi, wb)):
            out = out + (w_a * w_b) * _w00_c_tile(a, b, u - a, v - b)
    return out


def wigner_closed(conv: Convention, l: int, m: int, x, p,
                  units: UnitsConfig = DEFAULT_UNITS):
    """Closed-form Wigner function W_lm(x, p); vectorized over x, p."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    xs = (x - m * units.x0) / units.x0
    ps = (p - l * units.p0) / units.p0
    if conv is Convention.B:
        out = _w00_b(xs, ps)
    elif conv is Convention.A:
        out = _w00_b(ps, xs)
    else:
        out = np.asarray(_w00_c(xs, ps))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# integral oracle

def _oracle_compact(a_big: float, c_freq: float) -> tuple[float, float]:
    """2 int (dalpha/2pi) over the overlap of two width-2pi boxes centered
    at -+ a_big, of e^{i c alpha}; for the box-kernel conventions."""
    half = math.pi - abs(a_big)
    if half <= 0.0:
        return 0.0, 0.0
    val, err = quad_complex(lambda al: np.exp(1j * c_freq * al) + 0.0j, -half, half,
                            epsabs=1e-13)
    return float(val.real / math.pi), float(err / math.pi)


@lru_cache(maxsize=4096)
def _polylog_tails(z_key: tuple[float, float], n_start: int) -> tuple[complex, ...]:
    z = complex(*z_key)
    return tuple(z**n_start * lerch_tail(z, s, float(n_start)) for s in (2, 3, 4, 5))


def _wigner_c_oracle(a_big: float, c_freq: float, n_cells: int = 96,
                     order: int = 48) -> tuple[float, float]:
    """Convention-(c) kernel-product integral with analytic 1/n tail."""
    # interior breakpoints of floor((A +- v)/2pi + 1/2) within v in (-pi, pi)
    def wrap(v):
        return v - TWO_PI * math.floor((v + math.pi) / TWO_PI)

    bp = sorted({wrap(math.pi - a_big), wrap(a_big - math.pi)} - {-math.pi, math.pi})
    edges = np.array([-math.pi] + bp + [math.pi])
    v, w = composite_gl(edges, order)

    # head: whole cells n = -(N-1) .. N-1
    n = np.arange(-(n_cells - 1), n_cells)
    alpha = TWO_PI * n[:, None] + v[None, :]
    prod = lambda_of(Convention.C, a_big + alpha) * lambda_of(Convention.C, a_big - alpha)
    head = np.sum(w[None, :] * prod * np.exp(1j * c_freq * alpha)) / math.pi
    # (2 / 2pi = 1/pi)

    # tail: lam(A+alpha) lam(A-alpha) = -sigma(v) / ((pi n + c')(pi n - c''))
    wp = np.floor((a_big + v) / TWO_PI + 0.5)
    wpp = np.floor((a_big - v) / TWO_PI + 0.5)
    up = a_big + v - TWO_PI * wp
    upp = a_big - v - TWO_PI * wpp
    sigma = (-1.0) ** (wp + wpp) * np.sin(up / 4.0) * np.sin(upp / 4.0)
    cp = math.pi * wp + up / 4.0
    cpp = math.pi * wpp + upp / 4.0
    g = [np.ones_like(v),
         cpp - cp,
         cpp**2 - cp * cpp + cp**2,
         cpp**3 - cp * cpp**2 + cp**2 * cpp - cp**3]
    phase = np.exp(1j * c_freq * v)
    j_moments = [np.sum(w * sigma * gq * phase) for gq in g]

    z = np.exp(1j * TWO_PI * c_freq)
    if abs(z.imag) < 1e-15 and abs(z.real - 1.0) < 1e-15:
        z = 1.0 + 0.0j
    s_tails = _polylog_tails((z.real, z.imag), n_cells)
    tail_plus = -(1.0 / math.pi) * sum(
        j_moments[q] * s_tails[q] / math.pi ** (2 + q) for q in range(4))
    tail = 2.0 * tail_plus.real

    c_max = float(np.max(np.abs(np.concatenate([cp, cpp]))))
    remainder = (4.0 * TWO_PI * c_max**4 / math.pi**7) * (n_cells - 1) ** -5 / 5.0
    value = head.real + tail
    return float(value), float(abs(head.imag) + remainder)


def wigner_integral_oracle(conv: Convention, x: float, p: float,
                           units: UnitsConfig = DEFAULT_UNITS,
                           n_cells: int = 96) -> tuple[float, float]:
    """W_00(x, p) from the kernel-product integral (independent of the
    closed forms).  Returns (value, error_estimate).

    The compactly supported kernel of (b) (and of (a), via its momentum
    kernel) reduces to one finite adaptive quadrature; (c) uses explicit
    cells plus the polylogarithm tail closure.
    """
    big_a = units.p0 * x / units.hbar
    big_b = units.x0 * p / units.hbar
    if conv is Convention.B:
        return _oracle_compact(big_a, 2.0 * p / units.p0)
    if conv is Convention.A:
        # mu-form: 2 int (dbeta/2pi) mu(B-beta) e^{2 i beta x/x0} mu(B+beta)
        return _oracle_compact(big_b, 2.0 * x / units.x0)
    return _wigner_c_oracle(big_a, 2.0 * p / units.p0, n_cells=n_cells)


def wigner_from_state(conv: Convention, l: int, m: int, x: float, p: float,
                      units: UnitsConfig = DEFAULT_UNITS) -> tuple[float, float]:
    """W_lm(x, p) integrated directly from the state's wavefunction,

        W(x,p) = 2 int dy psi*(x+y) psi(x-y) e^{2 i p y/hbar},

    in whichever representation is compactly supported ((b): position,
    (a): momentum).  Independent cross-check of the shift law.
    """
    from .basis import discrete_wf_p, discrete_wf_x
    if conv is Convention.B:
        lo = units.x0 * (m - 0.5)
        hi = units.x0 * (m + 0.5)
        half = min(hi - x, x - lo)
        if half <= 0:
            return 0.0, 0.0
        val, err = quad_complex(
            lambda y: np.conj(discrete_wf_x(conv, l, m, x + y, units))
            * discrete_wf_x(conv, l, m, x - y, units) * np.exp(2j * p * y / units.hbar),
            -half, half, epsabs=1e-13)
        return float(2.0 * val.real), float(2.0 * err)
    if conv is Convention.A:
        lo = units.p0 * (l - 0.5)
        hi = units.p0 * (l + 0.5)
        half = min(hi - p, p - lo)
        if half <= 0:
            return 0.0, 0.0
        val, err = quad_complex(
            lambda q: np.conj(discrete_wf_p(conv, l, m, p + q, units))
            * discrete_wf_p(conv, l, m, p - q, units) * np.exp(-2j * x * q / units.hbar),
            -half, half, epsabs=1e-13)
        return float(2.0 * val.real), float(2.0 * err)
    raise ValueError("state-quadrature route needs a compactly supported kernel; "
                     "use wigner_integral_oracle for convention (c)")


# ---------------------------------------------------------------------------
# maps and marginals

@dataclass(frozen=True)
class WignerMap:
    convention: Convention
    l: int
    m: int
    x_over_x0: np.ndarray
    p_over_p0: np.ndarray
    values: np.ndarray  # (n_x, n_p)
    contour_levels: tuple[float, ...] = (0.0, 1.0)


def wigner_map(conv: Convention, l: int, m: int,
               window: tuple[float, float, float, float],
               resolution: tuple[int, int],
               units: UnitsConfig = DEFAULT_UNITS) -> WignerMap:
    """Sampled closed-form map over window (x_lo, x_hi, p_lo, p_hi) in
    units of (x0, p0)."""
    nx, npnts = resolution
    if nx < 2 or npnts < 2:
        raise ValueError("resolution must be at least 2x2")
    xs = np.linspace(window[0], window[1], nx)
    ps = np.linspace(window[2], window[3], npnts)
    xx, pp = np.meshgrid(xs * units.x0, ps * units.p0, indexing="ij")
    vals = wigner_closed(conv, l, m, xx, pp, units)
    return WignerMap(conv, l, m, xs, ps, vals)


def map_contours(wmap: WignerMap) -> dict[str, list]:
    """Marching-squares polylines at the standard contour levels (advisory
    output; requires scikit-image)."""
    try:
        from skimage import measure
    except ImportError as exc:  # pragma: no cover
        raise RuntimeError("contour extraction needs scikit-image "
                           "(pip install zaktorus[contours])") from exc
    out: dict[str, list] = {}
    dx = wmap.x_over_x0[1] - wmap.x_over_x0[0]
    dp = wmap.p_over_p0[1] - wmap.p_over_p0[0]
    for level in wmap.contour_levels:
        polys = []
        for seg in measure.find_contours(wmap.values, level):
            polys.append([[wmap.x_over_x0[0] + dx * r, wmap.p_over_p0[0] + dp * c]
                          for r, c in seg])
        out[f"level_{level:g}"] = polys
    return out


def wigner_marginals(conv: Convention, l: int, m: int, axis: str, grid,
                     units: UnitsConfig = DEFAULT_UNITS,
                     window: float = 4000.0, samples_per_unit: int = 16):
    """Marginals of W_lm along one axis, two ways.

    axis='x': int W dp at the grid positions (in x), against the kernel
    form p0 |lambda(p0 x/hbar - 2pi m)|^2; axis='p' mirrors with mu.
    Returns (map_route, kernel_route, error_estimate); the map route
    integrates the sampled closed form over |arg| <= window atomic units
    and is tail-limited at ~1/window.
    """
    from scipy.integrate import simpson
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    n = int(2 * window * samples_per_unit) | 1
    if axis == "x":
        ps = np.linspace(-window * units.p0, window * units.p0, n)
        vals = wigner_closed(conv, l, m, grid[:, None], ps[None, :], units)
        map_route = simpson(vals, x=ps, axis=1)
        kernel_route = units.p0 * np.abs(
            lambda_of(conv, units.p0 * grid / units.hbar - TWO_PI * m)) ** 2
    elif axis == "p":
        xs = np.linspace(-window * units.x0, window * units.x0, n)
        vals = wigner_closed(conv, l, m, xs[:, None], grid[None, :], units)
        map_route = simpson(vals, x=xs, axis=0)
        kernel_route = units.x0 * np.abs(
            mu_of(conv, units.x0 * grid / units.hbar - TWO_PI * l)) ** 2
    else:
        raise ValueError("axis must be 'x' or 'p'")
    # oscillatory 1/arg integrand: truncation error ~ (unit scale)/window
    est = 2.0 / (math.pi * window)
    return map_route, kernel_route, est * (units.p0 if axis == "x" else units.x0)


def wigner_normalization(conv: Convention, l: int = 0, m: int = 0,
                         units: UnitsConfig = DEFAULT_UNITS,
                         window: float = 3000.0) -> float:
    """Phase-space average int W dx dp / (2 pi hbar), via the kernel-route
    marginal integrated over a wide window (tail ~ 1/window)."""
    n = int(window * 64) | 1
    xs = np.linspace(-window * units.x0, window * units.x0, n)
    marg = units.p0 * np.abs(
        lambda_of(conv, units.p0 * xs / units.hbar - TWO_PI * m)) ** 2
    from scipy.integrate import simpson
    return float(simpson(marg, x=xs) / (TWO_PI * units.hbar))
