"""Identity-check suites: every structural property the library claims is
verified numerically here, one residual row per check.

The same suites back the ``zak verify`` command and the acceptance tests;
tolerances are fixed constants of the suite definitions, not inputs.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from . import basis, operators, qubits, wigner
from .conventions import (TWO_PI, Convention, chi, discontinuity_distance,
                          lambda_by_quadrature_normalized, lambda_of,
                          mu_by_quadrature_normalized, mu_of,
                          windowed_lambda_fourier)
from .states import DiscreteBasisState, Gaussian, superposition
from .units import DEFAULT_UNITS, UnitsConfig
from .zakmap import DiscreteZakCoeffs, coeffs_extract, zak_point

DEFAULT_SEED = 20240813


class CheckRow(NamedTuple):
    suite: str
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def _seeded_offline_points(conv: Convention, n: int, rng, span: float = 12.0,
                           min_dist: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    al = np.empty(n)
    be = np.empty(n)
    have = 0
    while have < n:
        a, b = rng.uniform(-span, span, 2)
        if discontinuity_distance(conv, a, b) > min_dist:
            al[have], be[have] = a, b
            have += 1
    return al, be


# ---------------------------------------------------------------------------

def suite_chi_constraints(units: UnitsConfig = DEFAULT_UNITS,
                          seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """Unit modulus and quasi-periodicity of the phase kernel."""
    rng = np.random.default_rng(seed)
    rows = []
    for conv in Convention:
        al, be = _seeded_offline_points(conv, 10_000, rng)
        c = chi(conv, al, be)
        rows.append(CheckRow("chi-constraints", f"|chi|=1 ({conv.value})",
                             float(np.max(np.abs(np.abs(c) - 1.0))), 1e-12))
        r1 = np.max(np.abs(c - chi(conv, al + TWO_PI, be) * np.exp(-1j * be / 2)))
        r2 = np.max(np.abs(c - np.exp(1j * al / 2) * chi(conv, al, be + TWO_PI)))
        rows.append(CheckRow("chi-constraints", f"quasi-periodicity ({conv.value})",
                             float(max(r1, r2)), 1e-12))
    return rows


def suite_kernel_quadrature(units: UnitsConfig = DEFAULT_UNITS,
                            seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """Closed-form kernels against their defining period averages."""
    rng = np.random.default_rng(seed + 1)
    rows = []
    for conv in Convention:
        args = rng.uniform(-15.0, 15.0, 200)
        worst = 0.0
        worst_im = 0.0
        for a in args:
            val, _ = lambda_by_quadrature_normalized(conv, a)
            worst = max(worst, abs(val.real - lambda_of(conv, a)))
            worst_im = max(worst_im, abs(val.imag))
            val, _ = mu_by_quadrature_normalized(conv, a)
            worst = max(worst, abs(val.real - mu_of(conv, a)))
            worst_im = max(worst_im, abs(val.imag))
        rows.append(CheckRow("kernel-quadrature", f"lambda/mu closed vs quadrature ({conv.value})",
                             worst, 1e-9))
        rows.append(CheckRow("kernel-quadrature", f"kernel average imaginary part ({conv.value})",
                             worst_im, 1e-9))
    return rows


def suite_self_duality(units: UnitsConfig = DEFAULT_UNITS,
                       seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """The symmetric kernel is its own Fourier transform."""
    betas = np.linspace(-4.0 * math.pi, 4.0 * math.pi, 97)
    betas = betas[discontinuity_distance(Convention.A, 0.0, betas) > 0.25]
    mu_hat = windowed_lambda_fourier(Convention.C, betas, n_cells=512)
    resid = float(np.max(np.abs(mu_hat - mu_of(Convention.C, betas))))
    gammas = np.linspace(-8.0 * math.pi, 8.0 * math.pi, 1601)
    lam = lambda_of(Convention.C, gammas)
    center = float(lam[800])
    rows = [
        CheckRow("self-duality", "windowed transform of lambda_c vs mu_c", resid, 5e-3),
        CheckRow("self-duality", "lambda_c(0) = 1 exactly", abs(center - 1.0), 0.0),
        CheckRow("self-duality", "kernel data bounded by 1",
                 max(0.0, float(np.max(np.abs(lam)) - 1.0)), 0.0),
    ]
    return rows


def suite_orthonormality(units: UnitsConfig = DEFAULT_UNITS,
                         seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """<l,m|l',m'> = delta delta for all pairs in a 3x3 window."""
    idx = [(l, m) for l in (-1, 0, 1) for m in (-1, 0, 1)]
    rows = []
    for conv, tol, cells in ((Convention.A, 1e-12, None), (Convention.B, 1e-12, None),
                             (Convention.C, 1e-3, 10_000)):
        worst = 0.0
        for i, lm in enumerate(idx):
            for lpmp in idx[i:]:
                kw = {"n_cells": cells} if cells else {}
                got = basis.basis_overlap(conv, lm, lpmp, units, **kw)
                want = 1.0 if lm == lpmp else 0.0
                worst = max(worst, abs(got - want))
        rows.append(CheckRow("orthonormality", f"basis overlaps ({conv.value})", worst, tol))
    return rows


def suite_mutual_unbiasedness(units: UnitsConfig = DEFAULT_UNITS,
                              seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """|<alpha,beta|l,m>| = 1 for a 5x5 window at seeded torus points."""
    rng = np.random.default_rng(seed + 2)
    rows = []
    for conv in Convention:
        al, be = _seeded_offline_points(conv, 100, rng, span=math.pi)
        worst = 0.0
        for l in range(-2, 3):
            for m in range(-2, 3):
                psi = zak_point(DiscreteBasisState(l, m, conv), conv, al, be, units)
                worst = max(worst, float(np.max(np.abs(np.abs(psi) - 1.0))))
        rows.append(CheckRow("mutual-unbiasedness", f"|field| = 1 ({conv.value})", worst, 1e-9))
    return rows


def suite_ladder_law(units: UnitsConfig = DEFAULT_UNITS,
                     seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """U^j V^k |l,m> = |l-j, m-k> as a pointwise wavefunction identity."""
    xs = np.linspace(-3.3, 3.7, 41) * units.x0
    rows = []
    for conv in Convention:
        worst = 0.0
        for l in (-1, 0, 1):
            for m in (-1, 0, 1):
                src = DiscreteBasisState(l, m, conv)
                for j in range(-2, 3):
                    for k in range(-2, 3):
                        moved = (np.exp(-1j * j * units.p0 * xs / units.hbar)
                                 * src.psi_x(xs + k * units.x0, units))
                        target = DiscreteBasisState(l - j, m - k, conv).psi_x(xs, units)
                        worst = max(worst, float(np.max(np.abs(moved - target))))
        rows.append(CheckRow("ladder-law", f"pointwise shift identity ({conv.value})",
                             worst, 1e-12))
    return rows


def suite_wigner_forms(units: UnitsConfig = DEFAULT_UNITS,
                       seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """Closed Wigner forms vs the kernel-product integral oracle, center
    values, tile centers, bounds and both symmetries."""
    rows = []
    rng = np.random.default_rng(seed + 3)

    def grid_check(conv, x_span, p_span):
        xs = np.linspace(-x_span, x_span, 41) * units.x0
        ps = np.linspace(-p_span, p_span, 41) * units.p0
        worst = 0.0
        bound = 0.0
        for x in xs:
            closed = wigner.wigner_closed(conv, 0, 0, np.full(ps.size, x), ps, units)
            bound = max(bound, float(np.max(np.abs(closed))) - 2.0)
            for p, cval in zip(ps, closed):
                oval, _ = wigner.wigner_integral_oracle(conv, float(x), float(p), units)
                worst = max(worst, abs(oval - cval))
        return worst, bound

    worst_b, bound_b = grid_check(Convention.B, 0.75, 5.25)
    rows.append(CheckRow("wigner-forms", "closed vs integral oracle (b), map window",
                         worst_b, 1e-6))
    worst_c, bound_c = grid_check(Convention.C, 2.25, 2.25)
    rows.append(CheckRow("wigner-forms", "closed vs integral oracle (c), peak window",
                         worst_c, 1e-6))
    rows.append(CheckRow("wigner-forms", "bound |W| <= 2", max(bound_b, bound_c, 0.0), 1e-12))
    rows.append(CheckRow("wigner-forms", "peak value (b)",
                         abs(wigner.wigner_closed(Convention.B, 0, 0, 0.0, 0.0, units) - 2.0), 1e-9))
    rows.append(CheckRow("wigner-forms", "peak value (c)",
                         abs(wigner.wigner_closed(Convention.C, 0, 0, 0.0, 0.0, units) - 2.0), 1e-9))
    worst = 0.0
    for a in range(-2, 3):
        for b in range(-2, 3):
            got = wigner.wigner_closed(Convention.C, 0, 0, a * units.x0 / 2, b * units.p0 / 2, units)
            worst = max(worst, abs(got - (2.0 if a == b == 0 else 0.0)))
    rows.append(CheckRow("wigner-forms", "tile-center values (c)", worst, 1e-9))
    xs = rng.uniform(-2, 2, 60) * units.x0
    ps = rng.uniform(-2, 2, 60) * units.p0
    swap = np.max(np.abs(
        wigner.wigner_closed(Convention.A, 0, 0, xs, ps, units)
        - wigner.wigner_closed(Convention.B, 0, 0, units.x0 * ps / units.p0,
                               units.p0 * xs / units.x0, units)))
    rows.append(CheckRow("wigner-forms", "x-p interchange (a) vs (b)", float(swap), 1e-12))
    sym = np.max(np.abs(
        wigner.wigner_closed(Convention.C, 0, 0, xs, ps, units)
        - wigner.wigner_closed(Convention.C, 0, 0, units.x0 * ps / units.p0,
                               units.p0 * xs / units.x0, units)))
    rows.append(CheckRow("wigner-forms", "self-symmetry (c)", float(sym), 1e-12))
    return rows


def suite_wigner_marginals(units: UnitsConfig = DEFAULT_UNITS,
                           seed: int = DEFAULT_SEED) -> list[CheckRow]:
    rows = []
    xs = np.linspace(-0.4, 0.4, 9)
    for conv in Convention:
        mr, kr, _ = wigner.wigner_marginals(conv, 0, 0, "x", xs * units.x0, units)
        rows.append(CheckRow("wigner-marginals", f"p-integral vs p0|lambda|^2 ({conv.value})",
                             float(np.max(np.abs(mr - kr))) / units.p0, 1e-3))
        mr, kr, _ = wigner.wigner_marginals(conv, 0, 0, "p", xs * units.p0, units)
        rows.append(CheckRow("wigner-marginals", f"x-integral vs x0|mu|^2 ({conv.value})",
                             float(np.max(np.abs(mr - kr))) / units.x0, 1e-3))
        rows.append(CheckRow("wigner-marginals", f"phase-space average = 1 ({conv.value})",
                             abs(wigner.wigner_normalization(conv, units=units) - 1.0), 1e-3))
    return rows


def suite_operator_identities(units: UnitsConfig = DEFAULT_UNITS,
                              seed: int = DEFAULT_SEED) -> list[CheckRow]:
    rows = []
    win = operators.window_operators((-32, 31), (-32, 31))
    comm = operators.commutator_residuals(win)
    rows.append(CheckRow("operator-identities", "torus commutators, 64x64 interior",
                         max(comm.values()), 0.0))
    alg = qubits.pauli_algebra_check((-32, 31), (-32, 31))
    rows.append(CheckRow("operator-identities", "Pauli algebra, 64x64 interior",
                         max(alg.values()), 0.0))

    rng = np.random.default_rng(seed + 4)
    worst = 0.0
    count = 0
    while count < 100:
        x = rng.uniform(-2, 2) * units.x0
        p = rng.uniform(-2, 2) * units.p0
        al, be = rng.uniform(-2.5, 2.5, 2)
        big_a = units.p0 * x / units.hbar
        big_b = units.x0 * p / units.hbar
        if min(discontinuity_distance(Convention.B, big_a + al, big_b),
               discontinuity_distance(Convention.B, big_a, big_b - be)) < 0.05:
            continue
        closed = operators.lm_generator_element(Convention.B, x, p, al, be, units)
        series = operators.lm_generator_series(Convention.B, x, p, al, be,
                                               l_half=20_000, units=units)
        worst = max(worst, abs(closed - series))
        count += 1
    rows.append(CheckRow("operator-identities", "generator element vs double series (b)",
                         worst, 1e-2))

    worst = 0.0
    count = 0
    while count < 60:
        conv = list(Convention)[count % 3]
        x = rng.uniform(-2, 2) * units.x0
        p = rng.uniform(-2, 2) * units.p0
        big_a = units.p0 * x / units.hbar
        big_b = units.x0 * p / units.hbar
        if discontinuity_distance(conv, big_a, big_b) < 0.05:
            continue
        l_el, m_el = operators.xlp_element(conv, x, p, units)
        h = 1e-5

        def gen(a, b):
            return operators.lm_generator_element(conv, x, p, a, b, units)

        d1 = (gen(h, 0) - gen(-h, 0)) / (2 * h)
        d2 = (gen(h / 2, 0) - gen(-h / 2, 0)) / h
        worst = max(worst, abs((4 * d2 - d1) / 3 - 1j * l_el))
        d1 = (gen(0, h) - gen(0, -h)) / (2 * h)
        d2 = (gen(0, h / 2) - gen(0, -h / 2)) / h
        worst = max(worst, abs((4 * d2 - d1) / 3 + 1j * m_el))
        count += 1
    rows.append(CheckRow("operator-identities", "generator derivatives vs L,M elements",
                         worst, 1e-6))
    return rows


def _lm_test_states(conv: Convention, units: UnitsConfig):
    if conv is Convention.A:
        return [Gaussian(0.2 * units.x0, 3.0 * units.x0, 2.3 * units.p0),
                Gaussian(-0.4 * units.x0, 2.8 * units.x0, -1.2 * units.p0),
                Gaussian(0.0, 3.2 * units.x0, 0.15 * units.p0)]
    if conv is Convention.B:
        return [Gaussian(1.6 * units.x0, 0.021 * units.x0, 0.0),
                Gaussian(-0.3 * units.x0, 0.022 * units.x0, 0.4 * units.p0),
                Gaussian(2.2 * units.x0, 0.022 * units.x0, -0.6 * units.p0)]
    return [Gaussian(0.2 * units.x0, 0.35 * units.x0, 0.3 * units.p0),
            Gaussian(-0.3 * units.x0, 0.30 * units.x0, -0.4 * units.p0),
            Gaussian(0.1 * units.x0, 0.40 * units.x0, 0.2 * units.p0)]


def suite_expectation_routes(units: UnitsConfig = DEFAULT_UNITS,
                             seed: int = DEFAULT_SEED) -> list[CheckRow]:
    """<L>, <M> from the line-representation lattice-sum formulas against
    the coefficient sums, three adapted Gaussians per convention."""
    rows = []
    for conv in Convention:
        worst = 0.0
        for state in _lm_test_states(conv, units):
            route = operators.expectation_L_M(state, conv, units)
            if conv is Convention.C:
                l_c, m_c, _ = operators.expectation_from_coeffs_extrapolated(
                    state, conv, units, base_window=64)
            elif conv is Convention.A:
                co = coeffs_extract(state, conv, (-8, 8), (-40, 40), units)
                l_c, m_c = operators.expectation_from_coeffs(co)
            else:
                co = coeffs_extract(state, conv, (-40, 40), (-8, 8), units)
                l_c, m_c = operators.expectation_from_coeffs(co)
            worst = max(worst, abs(route.l_value - l_c), abs(route.m_value - m_c))
        rows.append(CheckRow("expectation-routes", f"lattice-sum vs coefficients ({conv.value})",
                             worst, 1e-6))
    return rows


def suite_modular_operators(units: UnitsConfig = DEFAULT_UNITS,
                            seed: int = DEFAULT_SEED) -> list[CheckRow]:
    rng = np.random.default_rng(seed + 5)
    rows = []
    vals = rng.uniform(-8, 8, 2000) * units.x0
    worst_re = 0.0
    worst_half = -math.inf
    worst_arg = 0.0
    for v in vals:
        parts = operators.modular_decompose(float(v), units.x0)
        worst_re = max(worst_re, abs(parts.reassemble(units.x0) - v))
        worst_half = max(worst_half, abs(parts.modular_part) - units.x0 / 2)
        worst_arg = max(worst_arg, abs(parts.modular_part
                                       - operators.modular_decompose_arg(float(v), units.x0)))
    rows.append(CheckRow("modular-operators", "decomposition reassembly",
                         worst_re, 1e-15 * units.x0 * 8))
    rows.append(CheckRow("modular-operators", "modular part within half cell",
                         max(worst_half, 0.0), 0.0))
    rows.append(CheckRow("modular-operators", "operator-logarithm route agrees",
                         worst_arg, 1e-12))

    rep = operators.verify_modular_identification(
        Gaussian(0.0, 3.0 * units.x0, 2.3 * units.p0), units, window=40)
    rows.append(CheckRow("modular-operators", "integer momentum part = L of (a)",
                         rep["n_p_residual"], 1e-6))
    rep = operators.verify_modular_identification(
        Gaussian(1.6 * units.x0, 0.021 * units.x0, 0.0), units, window=40)
    rows.append(CheckRow("modular-operators", "integer position part = M of (b)",
                         rep["n_x_residual"], 1e-6))
    return rows


def suite_qubit_extraction(units: UnitsConfig = DEFAULT_UNITS,
                           seed: int = DEFAULT_SEED) -> list[CheckRow]:
    rows = []
    ground = coeffs_extract(DiscreteBasisState(0, 0, Convention.B), Convention.B,
                            (-4, 4), (-4, 4), units)
    e0 = qubits.pauli_expectations(ground)
    s0 = qubits.assemble_rho(e0)
    verdict0, min_pt0 = qubits.entanglement_verdict(s0)
    rows.append(CheckRow("qubit-extraction", "ground state is a product state",
                         float(np.max(np.abs(e0.t_dyadic - np.outer(e0.a_vec, e0.b_vec)))), 1e-12))
    rows.append(CheckRow("qubit-extraction", "ground-state verdict separable",
                         0.0 if verdict0 == "separable" else 1.0, 0.0))

    bell = superposition([(1.0, DiscreteBasisState(0, 0, Convention.B)),
                          (1.0, DiscreteBasisState(1, 1, Convention.B))], units)
    cb = coeffs_extract(bell, Convention.B, (-4, 4), (-4, 4), units)
    eb = qubits.pauli_expectations(cb)
    sb = qubits.assemble_rho(eb)
    verdict, min_pt = qubits.entanglement_verdict(sb)
    rows.append(CheckRow("qubit-extraction", "Bell dyadic diag(1,-1,1)",
                         float(np.max(np.abs(eb.t_dyadic - np.diag([1.0, -1.0, 1.0])))), 1e-9))
    rows.append(CheckRow("qubit-extraction", "Bell minimal PT eigenvalue -1/2",
                         abs(min_pt + 0.5), 1e-9))
    rows.append(CheckRow("qubit-extraction", "Bell verdict entangled",
                         0.0 if verdict == "entangled" else 1.0, 0.0))
    for name, st in (("ground", s0), ("Bell", sb)):
        rows.append(CheckRow("qubit-extraction", f"{name} rho trace 1",
                             abs(complex(np.trace(st.rho)) - 1.0), 1e-12))
        rows.append(CheckRow("qubit-extraction", f"{name} rho Hermitian",
                             float(np.max(np.abs(st.rho - st.rho.conj().T))), 1e-12))
        rows.append(CheckRow("qubit-extraction", f"{name} rho positive (zero leakage)",
                             max(0.0, -float(np.linalg.eigvalsh(st.rho).min())), 1e-10))
    return rows


ALL_SUITES: dict[str, Callable[..., list[CheckRow]]] = {
    "chi-constraints": suite_chi_constraints,
    "kernel-quadrature": suite_kernel_quadrature,
    "self-duality": suite_self_duality,
    "orthonormality": suite_orthonormality,
    "mutual-unbiasedness": suite_mutual_unbiasedness,
    "ladder-law": suite_ladder_law,
    "wigner-forms": suite_wigner_forms,
    "wigner-marginals": suite_wigner_marginals,
    "operator-identities": suite_operator_identities,
    "expectation-routes": suite_expectation_routes,
    "modular-operators": suite_modular_operators,
    "qubit-extraction": suite_qubit_extraction,
}


def run_all(units: UnitsConfig = DEFAULT_UNITS, seed: int = DEFAULT_SEED,
            suites: list[str] | None = None, parallel: bool = True) -> list[CheckRow]:
    """Run the named (default: all) suites and return rows sorted by suite
    and check name; safe to run concurrently since every suite is pure."""
    names = suites or list(ALL_SUITES)
    unknown = set(names) - set(ALL_SUITES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    rows: list[CheckRow] = []
    if parallel:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=4) as pool:
            futures = [pool.submit(ALL_SUITES[n], units, seed) for n in names]
            for fut in futures:
                rows.extend(fut.result())
    else:
        for n in names:
            rows.extend(ALL_SUITES[n](units, seed))
    return sorted(rows, key=lambda r: (r.suite, r.name))
