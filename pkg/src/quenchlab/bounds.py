"""Leakage decomposition of a state against a designated subspace and the
observable bounds that follow from it.

A normalized state splits as sqrt(1-DELTA^2)|phi> + DELTA|phi_perp> with phi
inside the subspace and phi_perp orthogonal to it; DELTA^2 is the leakage
probability. For any observable with operator norm <= 1 the cross term is
bounded by 2*DELTA*sqrt(1-DELTA^2), which is verified numerically here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import TargetSubspace
from .dynamics import TimeGrid, evolve_grid, eigenbasis_coefficients
from .hamiltonians import HermitianOperator, pauli_string_action
from .hilbert import HilbertSpace, StateVector
from .spectra import SpectralData

DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class HsiDecomposition:
    """Split of a state into in-subspace and orthogonal normalized components.

    Both components carry the phase convention that their leading nonzero
    amplitude is real-positive; the removed global phases are recorded so the
    original state reconstructs exactly.
    """

    delta: float
    phi: np.ndarray              # None when delta == 1 (flagged degenerate)
    phi_perp: np.ndarray         # None when delta == 0
    phase_phi: complex
    phase_perp: complex
    subspace: TargetSubspace
    degenerate: str              # "", "inside" (delta=0) or "orthogonal" (delta=1)

    def reconstruct(self) -> np.ndarray:
        parts = []
        if self.phi is not None:
            parts.append(np.sqrt(1 - self.delta ** 2) * self.phase_phi * self.phi)
        if self.phi_perp is not None:
            parts.append(self.delta * self.phase_perp * self.phi_perp)
        return sum(parts)


def _normalize_leading_phase(v: np.ndarray):
    """Return (normalized v with real-positive leading amplitude, removed phase)."""
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    lead = v[nz[0]]
    phase = lead / abs(lead)
    return v / phase, phase


def hsi_decompose(psi: StateVector, subspace: TargetSubspace) -> HsiDecomposition:
    """Project a normalized state onto a subspace and normalize both pieces."""
    b = subspace.basis
    if b.shape[0] != psi.space.dim:
        raise ValueError("state and subspace dimensions differ")
    amps = psi.amplitudes
    proj = b @ (b.conj().T @ amps)
    perp = amps - proj
    p_in = float(np.linalg.norm(proj))
    p_out = float(np.linalg.norm(perp))
    delta = min(p_out, 1.0)

    if p_out <= DEGENERATE_TOL:
        phi, phase = _normalize_leading_phase(proj)
        return HsiDecomposition(
            delta=0.0, phi=phi, phi_perp=None, phase_phi=phase, phase_perp=1.0,
            subspace=subspace, degenerate="inside",
        )
    if p_in <= DEGENERATE_TOL:
        perp_n, phase = _normalize_leading_phase(perp)
        return HsiDecomposition(
            delta=1.0, phi=None, phi_perp=perp_n, phase_phi=1.0, phase_perp=phase,
            subspace=subspace, degenerate="orthogonal",
        )
    phi, phase_phi = _normalize_leading_phase(proj / p_in)
    perp_n, phase_perp = _normalize_leading_phase(perp / p_out)
    return HsiDecomposition(
        delta=delta, phi=phi, phi_perp=perp_n,
        phase_phi=phase_phi, phase_perp=phase_perp,
        subspace=subspace, degenerate="",
    )


def pauli_string_observable(space: HilbertSpace, string) -> HermitianOperator:
    """Dense observable for a Pauli string; operator norm is exactly 1."""
    perm, phase = pauli_string_action(space, string)
    m = np.zeros((space.dim, space.dim), dtype=complex)
    m[perm, np.arange(space.dim)] = phase
    if np.abs(m.imag).max() == 0:
        m = m.real
    return HermitianOperator(matrix=m, space=space, terms=((1.0, tuple(string)),))


def _check_operator_norm(obs: HermitianOperator):
    """Observables must have operator norm <= 1 for the bounds to hold."""
    if obs.terms and all(len(t) >= 1 for _, t in obs.terms):
        total = sum(abs(c) for c, _ in obs.terms)
        if total <= 1 + 1e-12:
            return
    if obs.space.dim <= 4096:
        top = float(np.abs(np.linalg.eigvalsh(obs.matrix)).max())
        if top <= 1 + 1e-12:
            return
        raise ValueError(f"operator norm {top:.6f} exceeds 1")
    raise ValueError("cannot certify operator norm <= 1 for this observable")


@dataclass(frozen=True)
class BoundReport:
    """Time-resolved pieces of the expectation decomposition and bound margins."""

    times: np.ndarray
    delta: float
    o_nonth: np.ndarray          # <phi(t)|O|phi(t)>
    o_th_inst: np.ndarray        # <phi_perp(t)|O|phi_perp(t)>
    o_th_late: float             # late-time average of o_th_inst
    cross: np.ndarray            # 2 D sqrt(1-D^2) Re<phi(t)|O|phi_perp(t)>
    exact: np.ndarray            # <psi(t)|O|psi(t)>
    margin: np.ndarray           # 2 D sqrt(1-D^2) - |full cross magnitude|
    truncated_low: np.ndarray    # o_nonth - 2 delta
    truncated_high: np.ndarray
    delta_est: float             # late-time max of |<phi(t)|O|phi_perp(t)>|


def _evolved_columns(spec: SpectralData, vec: np.ndarray, grid: TimeGrid) -> np.ndarray:
    coeffs = eigenbasis_coefficients(
        StateVector(amplitudes=vec.astype(complex), space=spec.space), spec
    )
    return evolve_grid(spec, coeffs, grid)


def expectation_decomposition(
    decomp: HsiDecomposition,
    spec: SpectralData,
    obs: HermitianOperator,
    grid: TimeGrid,
    late_fraction: float = 0.5,
) -> BoundReport:
    """Evolve both components and split <O>(t) into its three exact pieces."""
    _check_operator_norm(obs)
    d = decomp.delta
    w_in = np.sqrt(max(1 - d ** 2, 0.0))
    times = grid.times
    nt = len(times)
    zeros = np.zeros(nt)

    if decomp.phi is not None:
        phi_t = _evolved_columns(spec, decomp.phase_phi * decomp.phi, grid)
        o_phi_t = obs.matrix @ phi_t
        o_nonth = np.real(np.einsum("it,it->t", phi_t.conj(), o_phi_t))
    else:
        phi_t, o_nonth = None, zeros
    if decomp.phi_perp is not None:
        perp_t = _evolved_columns(spec, decomp.phase_perp * decomp.phi_perp, grid)
        o_th_inst = np.real(
            np.einsum("it,it->t", perp_t.conj(), obs.matrix @ perp_t)
        )
    else:
        perp_t, o_th_inst = None, zeros

    if phi_t is not None and perp_t is not None:
        cross_amp = np.einsum("it,it->t", phi_t.conj(), obs.matrix @ perp_t)
    else:
        cross_amp = np.zeros(nt, dtype=complex)
    cross = 2 * d * w_in * np.real(cross_amp)
    exact = (1 - d ** 2) * o_nonth + d ** 2 * o_th_inst + cross
    margin = 2 * d * w_in - 2 * d * w_in * np.abs(cross_amp)

    late = grid.late_window(late_fraction)
    return BoundReport(
        times=times,
        delta=d,
        o_nonth=o_nonth,
        o_th_inst=o_th_inst,
        o_th_late=float(o_th_inst[late].mean()),
        cross=cross,
        exact=exact,
        margin=margin,
        truncated_low=o_nonth - 2 * d,
        truncated_high=o_nonth + 2 * d,
        delta_est=float(np.abs(cross_amp)[late].max()),
    )


def verify_loose_bound(report: BoundReport, tol: float = 1e-9) -> bool:
    """Cauchy-Schwarz bound check; a violation beyond tol means a code bug."""
    worst = float(report.margin.min())
    if worst < -tol:
        raise AssertionError(
            f"loose bound violated: margin {worst:.3e} below -{tol:.0e}"
        )
    return True


def cross_term_trace(
    run_report, L_values, **kwargs
) -> dict:
    """Late-time cross-term magnitude estimates per system size.

    `run_report(L)` returns the BoundReport for one size; the L-dependence is
    reported, not asserted.
    """
    return {int(L): run_report(int(L)).delta_est for L in L_values}
