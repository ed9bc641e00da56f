"""States on the line: analytic forms and uniform samples.

All analytic forms are unit-norm by construction; superpositions are
Gram-corrected at construction and sampled states are trapezoid-normalized.
Displacements U^j V^k act exactly on every form (position-space phase and
translation), so ladder identities can be checked pointwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import discrete_wf_p, discrete_wf_x
from .conventions import Convention
from .numerics import quad_complex
from .units import DEFAULT_UNITS, UnitsConfig

#: |psi| of a unit Gaussian is below 1e-18 beyond this many widths
TAIL_WIDTHS = 9.5


@dataclass(frozen=True)
class Gaussian:
    """Normalized Gaussian wavepacket: center, 1/e half-width of |psi|^2
    is width, mean momentum boost; phase keeps displacement bookkeeping."""
    center: float
    width: float
    boost: float = 0.0
    phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("Gaussian width must be positive")

    def psi_x(self, x, units: UnitsConfig = DEFAULT_UNITS):
        x = np.asarray(x, dtype=float)
        norm = (math.pi * self.width**2) ** -0.25
        out = (self.phase * norm
               * np.exp(-((x - self.center) ** 2) / (2.0 * self.width**2)
                        + 1j * self.boost * (x - self.center) / units.hbar))
        return complex(out) if out.ndim == 0 else out

    def psi_p(self, p, units: UnitsConfig = DEFAULT_UNITS):
        p = np.asarray(p, dtype=float)
        norm = (self.width**2 / (math.pi * units.hbar**2)) ** 0.25
        out = (self.phase * norm
               * np.exp(-((p - self.boost) ** 2) * self.width**2 / (2.0 * units.hbar**2)
                        - 1j * p * self.center / units.hbar))
        return complex(out) if out.ndim == 0 else out

    def dpsi_dx(self, x, units: UnitsConfig = DEFAULT_UNITS):
        x = np.asarray(x, dtype=float)
        return ((-(x - self.center) / self.width**2 + 1j * self.boost / units.hbar)
                * self.psi_x(x, units))

    def support(self, units: UnitsConfig = DEFAULT_UNITS):
        r = TAIL_WIDTHS * self.width
        return (self.center - r, self.center + r)

    def support_p(self, units: UnitsConfig = DEFAULT_UNITS):
        r = TAIL_WIDTHS * units.hbar / self.width
        return (self.boost - r, self.boost + r)


@dataclass(frozen=True)
class DiscreteBasisState:
    """Discrete Zak basis ket (l, m) of a fixed phase convention."""
    l: int
    m: int
    convention: Convention

    def psi_x(self, x, units: UnitsConfig = DEFAULT_UNITS):
        return discrete_wf_x(self.convention, self.l, self.m, x, units)

    def psi_p(self, p, units: UnitsConfig = DEFAULT_UNITS):
        return discrete_wf_p(self.convention, self.l, self.m, p, units)


@dataclass(frozen=True)
class Superposition:
    """Finite superposition; weights are Gram-corrected to unit norm."""
    terms: tuple  # of (complex weight, state)

    def psi_x(self, x, units: UnitsConfig = DEFAULT_UNITS):
        return sum(w * s.psi_x(x, units) for w, s in self.terms)

    def psi_p(self, p, units: UnitsConfig = DEFAULT_UNITS):
        return sum(w * s.psi_p(p, units) for w, s in self.terms)


@dataclass(frozen=True)
class Sampled:
    """Uniform complex samples psi(x_min + i*dx); trapezoid-normalized."""
    x_min: float
    dx: float
    values: np.ndarray
    error_estimate: float | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("Sampled needs a 1-d array of at least 2 values")
        if self.dx <= 0:
            raise ValueError("Sampled needs dx > 0")

    @property
    def x_values(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.values.size)

    def norm_squared(self) -> float:
        return float(np.trapezoid(np.abs(self.values) ** 2, dx=self.dx))

    def normalized(self) -> "Sampled":
        return Sampled(self.x_min, self.dx, self.values / math.sqrt(self.norm_squared()))

    def psi_x(self, x, units: UnitsConfig = DEFAULT_UNITS):
        """Values at grid points only; off-grid queries are rejected
        (no silent interpolation)."""
        x = np.asarray(x, dtype=float)
        idx = (x - self.x_min) / self.dx
        near = np.rint(idx)
        if np.any(np.abs(idx - near) > 1e-8 * np.maximum(1.0, np.abs(idx))):
            raise ValueError("requested x is not on the sample grid")
        near = near.astype(int)
        inside = (near >= 0) & (near < self.values.size)
        out = np.where(inside, self.values[np.clip(near, 0, self.values.size - 1)], 0.0)
        return complex(out) if out.ndim == 0 else out

    def psi_p(self, p, units: UnitsConfig = DEFAULT_UNITS):
        """Trapezoid Fourier transform of the samples (adequate for
        smooth, well-resolved states)."""
        p = np.asarray(p, dtype=float)
        x = self.x_values
        w = np.full(x.size, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        phases = np.exp(-1j * np.multiply.outer(p, x) / units.hbar)
        out = phases @ (w * self.values) / math.sqrt(2.0 * math.pi * units.hbar)
        return complex(out) if out.ndim == 0 else out


LineState = Gaussian | DiscreteBasisState | Superposition | Sampled


def inner_product(bra: LineState, ket: LineState,
                  units: UnitsConfig = DEFAULT_UNITS) -> complex:
    """<bra|ket> = int conj(psi_bra) psi_ket dx by adaptive quadrature.

    Basis states of one convention use their verified orthonormality.
    """
    if isinstance(bra, DiscreteBasisState) and isinstance(ket, DiscreteBasisState) \
            and bra.convention is ket.convention:
        return 1.0 + 0.0j if (bra.l, bra.m) == (ket.l, ket.m) else 0.0 + 0.0j
    # bilinear expansion keeps the slowly-decaying kernel tails exact
    if isinstance(bra, Superposition):
        return sum(np.conj(w) * inner_product(s, ket, units) for w, s in bra.terms)
    if isinstance(ket, Superposition):
        return sum(w * inner_product(bra, s, units) for w, s in ket.terms)
    if isinstance(bra, Sampled) or isinstance(ket, Sampled):
        samp = bra if isinstance(bra, Sampled) else ket
        x = samp.x_values
        w = np.full(x.size, samp.dx)
        w[0] = w[-1] = 0.5 * samp.dx
        return complex(np.sum(w * np.conj(bra.psi_x(x, units)) * ket.psi_x(x, units)))
    lo, hi = _joint_support(bra, ket, units)
    pts = sorted(set(_kink_points(bra, units, lo, hi)) | set(_kink_points(ket, units, lo, hi)))
    val, _ = quad_complex(lambda x: np.conj(bra.psi_x(x, units)) * ket.psi_x(x, units),
                          lo, hi, points=pts or None, epsabs=1e-12)
    return val


def _support_of(state: LineState, units: UnitsConfig):
    if isinstance(state, Gaussian):
        return state.support(units)
    if isinstance(state, DiscreteBasisState):
        # kernel decays like 1/x for (a)/(c); wide window for quadrature use
        r = (abs(state.m) + 60.0) * units.x0
        return (-r, r)
    if isinstance(state, Superposition):
        spans = [_support_of(s, units) for _, s in state.terms]
        return (min(s[0] for s in spans), max(s[1] for s in spans))
    return (state.x_min, state.x_min + state.dx * (state.values.size - 1))


def _joint_support(a: LineState, b: LineState, units: UnitsConfig):
    sa, sb = _support_of(a, units), _support_of(b, units)
    return (max(sa[0], sb[0]), min(sa[1], sb[1]))


def _kink_points(state: LineState, units: UnitsConfig, lo: float, hi: float) -> list:
    """Kernel discontinuity abscissae inside (lo, hi), for quadrature splits."""
    if isinstance(state, DiscreteBasisState) and state.convention is not Convention.A:
        # lambda jumps where p0 x/hbar - 2 pi m crosses pi mod 2 pi
        k_lo = math.ceil(lo / units.x0 - 0.5)
        k_hi = math.floor(hi / units.x0 - 0.5)
        return [units.x0 * (k + 0.5) for k in range(k_lo, k_hi + 1)]
    if isinstance(state, Superposition):
        pts: set = set()
        for _, s in state.terms:
            pts.update(_kink_points(s, units, lo, hi))
        return sorted(pts)
    return []


def superposition(terms, units: UnitsConfig = DEFAULT_UNITS) -> Superposition:
    """Build a Gram-corrected unit-norm superposition from (weight, state)."""
    terms = [(complex(w), s) for w, s in terms]
    if not terms:
        raise ValueError("superposition needs at least one term")
    n = len(terms)
    gram = np.empty((n, n), dtype=complex)
    for i, (_, si) in enumerate(terms):
        for j, (_, sj) in enumerate(terms):
            gram[i, j] = inner_product(si, sj, units) if j >= i else np.conj(gram[j, i])
    w = np.array([t[0] for t in terms])
    norm2 = float(np.real(np.conj(w) @ gram @ w))
    if norm2 <= 1e-14:
        raise ValueError("superposition has numerically zero norm")
    scale = 1.0 / math.sqrt(norm2)
    return Superposition(tuple((wi * scale, si) for wi, (_, si) in zip(w, terms)))


def apply_displacement(state: LineState, j: int, k: int,
                       units: UnitsConfig = DEFAULT_UNITS) -> LineState:
    """Apply U^j V^k: psi(x) -> e^{-i j p0 x / hbar} psi(x + k x0).

    U and V commute, so the order of the two factors is immaterial.  Every
    analytic form maps onto a form of the same kind, exactly.
    """
    if j == 0 and k == 0:
        return state
    if isinstance(state, DiscreteBasisState):
        return DiscreteBasisState(state.l - j, state.m - k, state.convention)
    if isinstance(state, Gaussian):
        center = state.center - k * units.x0
        phase = state.phase * cmath.exp(-1j * j * units.p0 * center / units.hbar)
        return Gaussian(center=center, width=state.width,
                        boost=state.boost - j * units.p0, phase=phase)
    if isinstance(state, Superposition):
        return Superposition(tuple((w, apply_displacement(s, j, k, units))
                                   for w, s in state.terms))
    if isinstance(state, Sampled):
        x_new = state.x_values - k * units.x0
        vals = state.values * np.exp(-1j * j * units.p0 * x_new / units.hbar)
        return Sampled(state.x_min - k * units.x0, state.dx, vals)
    raise TypeError(f"unsupported state {type(state)!r}")


def norm_squared(state: LineState, units: UnitsConfig = DEFAULT_UNITS) -> float:
    return float(np.real(inner_product(state, state, units)))
