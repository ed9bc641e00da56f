"""Toroidal qubit pair extracted from a single line degree of freedom.

The parity of L together with U builds one Pauli triple (sigma), the parity
of M together with V builds the other (tau); the two commute, so any state
on the line induces a two-qubit density operator from the 15 expectation
values (Bloch vectors and correlation dyadic).  Truncation of the
coefficient window is tracked as leakage and propagated into an additive
error bound and into the separability dead-band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .zakmap import DiscreteZakCoeffs

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class PauliExpectations:
    """Bloch vectors and correlation dyadic of the extracted qubit pair."""
    a_vec: np.ndarray  # <sigma_i>
    b_vec: np.ndarray  # <tau_j>
    t_dyadic: np.ndarray  # <sigma_i tau_j>, 3x3
    leakage: float
    error_bound: float


@dataclass(frozen=True)
class TwoQubitState:
    rho: np.ndarray  # 4x4, product basis (sigma qubit) x (tau qubit)
    provenance: PauliExpectations | None = None


def _chain_paulis(values: np.ndarray) -> list[np.ndarray]:
    """sigma_1, sigma_2, sigma_3 on an integer index chain: sigma_3 is the
    parity (-1)^n and sigma_+ = [1 + (-1)^(n-1)] shift(n -> n-1)."""
    n = values.size
    parity = np.diag(((-1.0) ** np.abs(values)).astype(complex))
    raise_mat = np.zeros((n, n), dtype=complex)
    for i, val in enumerate(values):
        if i >= 1 and val % 2 != 0:  # odd n maps to n-1 with amplitude 2
            raise_mat[i - 1, i] = 2.0
    s1 = (raise_mat + raise_mat.conj().T) / 2.0
    s2 = (raise_mat - raise_mat.conj().T) / 2j
    return [s1, s2, parity]


def pauli_expectations(coeffs: DiscreteZakCoeffs,
                       leakage_warn: float = 0.05) -> PauliExpectations:
    """Expectation values of the two Pauli triples from a coefficient window.

    The window amplitudes are renormalized; the discarded weight (leakage)
    is reported and converted into an additive bound on how far any
    expectation can sit from its untruncated value.
    """
    if coeffs.c.size == 0:
        raise ValueError("empty coefficient window")
    total = coeffs.sum_sq()
    if total <= 1e-14:
        raise ValueError("coefficient window carries no weight")
    leak = max(0.0, 1.0 - total)
    c = coeffs.c / math.sqrt(total)
    sig = _chain_paulis(coeffs.l_values)
    tau = _chain_paulis(coeffs.m_values)
    a_vec = np.array([np.vdot(c, s @ c) for s in sig])
    b_vec = np.array([np.vdot(c, c @ t.T) for t in tau])
    t_dyadic = np.array([[np.vdot(c, s @ c @ t.T) for t in tau] for s in sig])
    herm_resid = max(float(np.max(np.abs(a_vec.imag))), float(np.max(np.abs(b_vec.imag))),
                     float(np.max(np.abs(t_dyadic.imag))))
    if herm_resid > 1e-10:
        raise RuntimeError(f"Pauli expectations acquired imaginary parts ({herm_resid:.2e})")
    bound = 2.0 * math.sqrt(leak) + leak
    if leak > leakage_warn:
        import warnings
        warnings.warn(f"coefficient window leaks {leak:.3g} of the norm; "
                      f"expectation error bound {bound:.3g}", stacklevel=2)
    return PauliExpectations(a_vec.real, b_vec.real, t_dyadic.real, leak, bound)


def assemble_rho(e: PauliExpectations) -> TwoQubitState:
    """rho = (1 + sigma.a + b.tau + sigma.T.tau) / 4 in the product basis."""
    rho = np.eye(4, dtype=complex)
    for i in range(3):
        rho += e.a_vec[i] * np.kron(PAULI[i], np.eye(2))
        rho += e.b_vec[i] * np.kron(np.eye(2), PAULI[i])
        for j in range(3):
            rho += e.t_dyadic[i, j] * np.kron(PAULI[i], PAULI[j])
    return TwoQubitState(rho / 4.0, e)


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Transpose of the second qubit factor."""
    r = rho.reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def entanglement_verdict(state: TwoQubitState,
                         dead_band: float = 1e-10) -> tuple[str, float]:
    """(verdict, min eigenvalue of the partial transpose).

    Positivity of the partial transpose is necessary and sufficient for
    separability of two qubits.  The dead band absorbs numerical noise and
    is widened by the provenance leakage bound; a state that is non-positive
    beyond that bound yields 'indeterminate'.
    """
    rho = state.rho
    band = dead_band
    if state.provenance is not None:
        band += state.provenance.error_bound
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = complex(np.trace(rho))
    if herm > 1e-10 or abs(tr - 1.0) > 1e-10:
        raise ValueError(f"not a density operator: hermiticity {herm:.2e}, trace {tr}")
    min_rho = float(np.linalg.eigvalsh(rho).min())
    if min_rho < -band:
        return "indeterminate", float(np.linalg.eigvalsh(partial_transpose(rho)).min())
    min_pt = float(np.linalg.eigvalsh(partial_transpose(rho)).min())
    if min_pt < -band:
        return "entangled", min_pt
    return "separable", min_pt


def pauli_algebra_check(l_window: tuple[int, int], m_window: tuple[int, int]) -> dict[str, float]:
    """Exact interior residuals of the Pauli algebra of both triples.

    The chain matrices square to one, obey sigma_i sigma_j = i sigma_k
    cyclically, commute between the triples, and have vanishing partial
    traces over any even number of consecutive chain sites (the statement
    of tracelessness that survives truncation).  The window matrices have
    at most two entries per row, so everything runs sparse.
    """
    from scipy import sparse
    ls = np.arange(l_window[0], l_window[1] + 1)
    ms = np.arange(m_window[0], m_window[1] + 1)
    if ls.size < 6 or ms.size < 6:
        raise ValueError("window too small for interior algebra checks")
    sig_l = _chain_paulis(ls)
    tau_m = _chain_paulis(ms)
    il = sparse.identity(ls.size, dtype=complex, format="csr")
    im = sparse.identity(ms.size, dtype=complex, format="csr")
    sig = [sparse.kron(sparse.csr_matrix(s), im, format="csr") for s in sig_l]
    tau = [sparse.kron(il, sparse.csr_matrix(t), format="csr") for t in tau_m]

    # interior: one full qubit block (two sites) trimmed at each chain end
    keep_l = np.zeros(ls.size, dtype=bool)
    keep_l[2:-2] = True
    keep_m = np.zeros(ms.size, dtype=bool)
    keep_m[2:-2] = True
    inside = np.where(np.kron(keep_l, keep_m).astype(bool))[0]

    def interior_max(mat) -> float:
        sub = mat.tocsr()[inside][:, inside]
        return float(np.abs(sub.data).max()) if sub.nnz else 0.0

    out: dict[str, float] = {}
    eye = sparse.identity(ls.size * ms.size, dtype=complex, format="csr")
    for i in range(3):
        out[f"sigma{i + 1}^2-1"] = interior_max(sig[i] @ sig[i] - eye)
        out[f"tau{i + 1}^2-1"] = interior_max(tau[i] @ tau[i] - eye)
    for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        out[f"sigma{i + 1}sigma{j + 1}-i*sigma{k + 1}"] = interior_max(
            sig[i] @ sig[j] - 1j * sig[k])
        out[f"tau{i + 1}tau{j + 1}-i*tau{k + 1}"] = interior_max(
            tau[i] @ tau[j] - 1j * tau[k])
    for i in range(3):
        for j in range(3):
            out[f"[sigma{i + 1},tau{j + 1}]"] = interior_max(
                sig[i] @ tau[j] - tau[j] @ sig[i])

    # partial traces over even runs of consecutive l at fixed m
    worst = 0.0
    for s in sig_l:
        diag = np.real(np.diag(s))
        csum = np.concatenate(([0.0], np.cumsum(diag)))
        for start in range(0, ls.size - 1):
            for stop in range(start + 2, ls.size + 1, 2):
                worst = max(worst, abs(float(csum[stop] - csum[start])))
    out["even-run partial traces"] = worst
    return out
