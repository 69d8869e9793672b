"""Full dense Hermitian diagonalization and overlap statistics.

The N-statistic is the minimum number of eigenstates needed to capture a
given fraction (default 80%) of an initial state's spectral weight; its
growth with system size separates thermalizing from non-thermalizing
initial conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hamiltonians import HermitianOperator
from .hilbert import HilbertSpace, StateVector, make_product_state


class EigensolverError(Exception):
    """Dense eigensolver failed to converge."""


@dataclass(frozen=True)
class SpectralData:
    """Ascending eigenvalues and orthonormal eigenvector columns of H."""

    energies: np.ndarray
    eigenvectors: np.ndarray     # column n is the n-th eigenvector
    space: HilbertSpace
    residual_bound: float

    @property
    def dim(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class OverlapProfile:
    """Eigenbasis weights |<E_n|psi>|^2 of a source state."""

    weights: np.ndarray
    energies: np.ndarray
    source: str

    @property
    def cumulative_sorted(self) -> np.ndarray:
        return np.cumsum(np.sort(self.weights)[::-1])


def diagonalize(H: HermitianOperator, check_residual: bool = True) -> SpectralData:
    """Full spectrum of a dense Hermitian operator, residual-checked."""
    m = H.matrix
    try:
        if np.isrealobj(m):
            energies, vecs = scipy.linalg.eigh(m, driver="evd")
        else:
            energies, vecs = scipy.linalg.eigh(m)
    except scipy.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigh failed at dim {m.shape[0]}: {exc}") from exc
    residual = 0.0
    if check_residual:
        # spot-check a spread of eigenpairs; full residual is O(dim^3) again
        dim = m.shape[0]
        probe = np.unique(np.linspace(0, dim - 1, min(dim, 32)).astype(int))
        r = m @ vecs[:, probe] - vecs[:, probe] * energies[probe]
        residual = float(np.abs(r).max())
        spread = max(float(energies[-1] - energies[0]), 1.0)
        if residual > 1e-8 * spread:
            raise EigensolverError(
                f"residual {residual:.3e} exceeds tolerance at dim {dim}"
            )
    return SpectralData(
        energies=energies,
        eigenvectors=vecs,
        space=H.space,
        residual_bound=residual,
    )


def overlaps(state: StateVector, spec: SpectralData) -> OverlapProfile:
    """Per-eigenstate weights |<E_n|psi>|^2."""
    if state.space.dim != spec.dim:
        raise ValueError("state and spectrum dimensions differ")
    c = spec.eigenvectors.conj().T @ state.amplitudes
    return OverlapProfile(
        weights=np.abs(c) ** 2, energies=spec.energies, source="state"
    )


def n_statistic(profile: OverlapProfile, threshold: float = 0.8):
    """Smallest count of largest weights whose sum reaches the threshold.

    Returns (N, contributing indices). Indices are sorted by descending
    weight, ties broken by ascending energy then ascending index.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    w = profile.weights
    order = np.lexsort((np.arange(len(w)), profile.energies, -w))
    cum = np.cumsum(w[order])
    # slack absorbs rounding in the cumulative sum (e.g. ten 0.1 weights)
    n = int(np.searchsorted(cum, threshold - 1e-12) + 1)
    n = min(n, len(w))
    return n, order[:n]


def spectral_entropies(spec: SpectralData, cut: int) -> np.ndarray:
    """Half-chain entanglement entropy of every eigenstate (for spectrum scans)."""
    from .dynamics import entanglement_entropy

    out = np.empty(spec.dim)
    for n in range(spec.dim):
        state = StateVector(
            amplitudes=spec.eigenvectors[:, n].astype(complex), space=spec.space
        )
        out[n] = entanglement_entropy(state, cut)
    return out


def n_scaling(
    build, spec_for_L, kind: str, L_values, gamma_values, threshold: float = 0.8
):
    """Table of N over (L, gamma) for one model family and initial-state kind.

    `spec_for_L(L, gamma)` supplies the Hamiltonian spec; `build` materializes
    it. Deterministic for disorder-free models.
    """
    rows = []
    for L in L_values:
        for g in gamma_values:
            H = build(spec_for_L(L, g))
            sd = diagonalize(H)
            psi = make_product_state(kind, L)
            n, _ = n_statistic(overlaps(psi, sd), threshold)
            rows.append({"L": int(L), "gamma": float(g), "N": n})
    return rows
