"""Spectral-decomposition quench dynamics and the associated diagnostics:
charge-sector populations P_Q(t), half-chain entanglement entropy, survival
probability."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import ChargeMap, HilbertSpace, ParityMap, StateVector, make_product_state
from .spectra import SpectralData, overlaps

NEGLIGIBLE_SECTOR_THRESHOLD = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Strictly ascending sample times in units of inverse energy (hbar = 1)."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 1 or np.any(np.diff(t) <= 0):
            raise ValueError("times must be a strictly ascending 1-d array")
        object.__setattr__(self, "times", t)

    @classmethod
    def linear(cls, t_max: float = 50.0, points: int = 501, t_min: float = 0.0):
        return cls(times=np.linspace(t_min, t_max, points))

    def late_window(self, fraction: float = 0.5) -> np.ndarray:
        """Index mask of the final `fraction` of the grid."""
        cutoff = self.times[-1] - fraction * (self.times[-1] - self.times[0])
        return self.times >= cutoff - 1e-12


@dataclass(frozen=True)
class QuenchSeries:
    """Time-resolved diagnostics of one quench."""

    grid: TimeGrid
    pq: dict                     # Q -> probability array over times (retained sectors)
    pq_full: dict                # Q -> probability array, all sectors
    entropy: np.ndarray          # half-chain entropy, nats
    survival: np.ndarray
    norm_deviation: np.ndarray
    omitted_sectors: tuple       # Q values whose time-max probability < 1e-6


def eigenbasis_coefficients(state: StateVector, spec: SpectralData) -> np.ndarray:
    """Complex coefficients c_n = <E_n|psi>."""
    if state.space.dim != spec.dim:
        raise ValueError("state and spectrum dimensions differ")
    return spec.eigenvectors.conj().T @ state.amplitudes


def evolve(spec: SpectralData, coeffs: np.ndarray, t: float) -> StateVector:
    """|psi(t)> = sum_n c_n e^{-i E_n t} |E_n>; no renormalization applied."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    amps = spec.eigenvectors @ (coeffs * np.exp(-1j * spec.energies * t))
    return StateVector(amplitudes=amps, space=spec.space)


def evolve_grid(spec: SpectralData, coeffs: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Amplitudes for all grid times at once; shape (dim, n_times)."""
    phases = np.exp(-1j * np.outer(spec.energies, grid.times))
    return spec.eigenvectors @ (coeffs[:, None] * phases)


def charge_distribution(state: StateVector, cmap) -> dict:
    """Per-sector probability P_Q = sum over basis states in sector Q of |amp|^2."""
    if cmap.space.dim != state.space.dim:
        raise ValueError("charge map and state dimensions differ")
    probs = np.abs(state.amplitudes) ** 2
    return {q: float(probs[idx].sum()) for q, idx in cmap.sectors.items()}


def entanglement_entropy(state: StateVector, cut: int) -> float:
    """Von Neumann entropy (nats) of the left block of `cut` sites.

    Site 0 is the least-significant bit, so the left block {0..cut-1} is the
    fast index of the reshaped amplitude matrix.
    """
    L = state.space.L
    if not 1 <= cut <= L - 1:
        raise ValueError(f"cut {cut} out of range for L={L}")
    # index = rest * 2^cut + block  ->  reshape to (rest, block)
    m = state.amplitudes.reshape(2 ** (L - cut), 2 ** cut)
    s = np.linalg.svd(m, compute_uv=False)
    p = s ** 2
    p = p[p > 1e-300]
    return float(-(p * np.log(p)).sum())


def _entropies_for_columns(amps: np.ndarray, L: int, cut: int) -> np.ndarray:
    out = np.empty(amps.shape[1])
    space = HilbertSpace(L)
    for k in range(amps.shape[1]):
        out[k] = entanglement_entropy(
            StateVector(amplitudes=amps[:, k], space=space), cut
        )
    return out


def quench_series(
    spec: SpectralData,
    initial: StateVector,
    grid: TimeGrid = None,
    cmap: ChargeMap = None,
) -> QuenchSeries:
    """Evolve an initial state over a grid and collect all diagnostics."""
    if grid is None:
        grid = TimeGrid.linear()
    space = initial.space
    if cmap is None:
        cmap = ChargeMap.build(space)
    coeffs = eigenbasis_coefficients(initial, spec)
    amps = evolve_grid(spec, coeffs, grid)

    probs = np.abs(amps) ** 2
    norm_dev = np.abs(probs.sum(axis=0) - 1.0)
    pq_full = {q: probs[idx].sum(axis=0) for q, idx in cmap.sectors.items()}
    retained = {q: p for q, p in pq_full.items() if p.max() >= NEGLIGIBLE_SECTOR_THRESHOLD}
    omitted = tuple(sorted(set(pq_full) - set(retained)))

    survival = np.abs(initial.amplitudes.conj() @ amps) ** 2
    entropy = _entropies_for_columns(amps, space.L, space.L // 2)

    return QuenchSeries(
        grid=grid,
        pq=retained,
        pq_full=pq_full,
        entropy=entropy,
        survival=survival,
        norm_deviation=norm_dev,
        omitted_sectors=omitted,
    )


def late_time_average(series: QuenchSeries, values: np.ndarray, fraction: float = 0.5):
    mask = series.grid.late_window(fraction)
    return float(np.asarray(values)[mask].mean())


def steady_entropy(series: QuenchSeries, fraction: float = 0.5) -> float:
    """Steady-state entropy = time average over the final part of the grid."""
    return late_time_average(series, series.entropy, fraction)


def steady_entropy_scaling(run_series, L_values, fraction: float = 0.5) -> dict:
    """Steady entropy versus L with a least-squares linear fit.

    `run_series(L)` returns the QuenchSeries for one system size.
    """
    Ls = np.asarray(list(L_values), dtype=float)
    s_inf = np.array([steady_entropy(run_series(int(L)), fraction) for L in Ls])
    slope, intercept = np.polyfit(Ls, s_inf, 1)
    return {
        "L": Ls.astype(int).tolist(),
        "S_inf": s_inf.tolist(),
        "slope": float(slope),
        "intercept": float(intercept),
    }
