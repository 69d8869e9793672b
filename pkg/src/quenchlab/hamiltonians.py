"""Dense Hamiltonian builders for the three periodic spin-1/2 chains.

All three models have purely real matrix elements in the computational
basis (YY terms flip both bits and pick up a real sign), so operators are
stored as real symmetric float64 matrices. Downstream code treats them as
Hermitian; amplitudes stay complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .hilbert import HilbertSpace, StateVector

DEFAULT_L_CAP = 14

PauliString = tuple  # ((site, axis), ...) with axis in {"x","y","z"}


class DimensionCapError(Exception):
    """Requested system size exceeds the configured dense-matrix cap."""


@dataclass(frozen=True)
class HamiltonianSpecU1:
    """Anisotropic XY chain with NNN Heisenberg terms and a tiny uniform field."""

    L: int
    gamma: float
    lambda1: float = 0.2
    lambda2: float = 0.32
    h: float = 1e-7

    def __post_init__(self):
        if self.L < 3:
            raise ValueError("next-nearest-neighbor terms need L >= 3")
        for name in ("gamma", "lambda1", "lambda2", "h"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class HamiltonianSpecZ2:
    """Transverse-field Ising-type chain with random longitudinal fields."""

    L: int
    gamma: float
    fields: tuple
    delta1: float = 0.84
    W: float = 2.4

    def __post_init__(self):
        fields = tuple(float(f) for f in self.fields)
        if len(fields) != self.L:
            raise ValueError(f"fields length {len(fields)} != L={self.L}")
        if any(abs(f) > self.W + 1e-12 for f in fields):
            raise ValueError(f"field magnitudes must not exceed W={self.W}")
        object.__setattr__(self, "fields", fields)


@dataclass(frozen=True)
class HamiltonianSpecU1Disordered:
    """Anisotropic XY chain with ZZ coupling and random longitudinal fields."""

    L: int
    gamma: float
    fields: tuple
    mu: float = 0.8
    W: float = 4.8

    def __post_init__(self):
        fields = tuple(float(f) for f in self.fields)
        if len(fields) != self.L:
            raise ValueError(f"fields length {len(fields)} != L={self.L}")
        if any(abs(f) > self.W + 1e-12 for f in fields):
            raise ValueError(f"field magnitudes must not exceed W={self.W}")
        object.__setattr__(self, "fields", fields)


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix plus the weighted Pauli strings that built it."""

    matrix: np.ndarray
    space: HilbertSpace
    terms: tuple = ()            # ((coeff, PauliString), ...)

    def hermiticity_defect(self) -> float:
        m = self.matrix
        return float(np.abs(m - m.conj().T).max())


def apply_pauli(state: StateVector, site: int, axis: str) -> StateVector:
    """Apply a single Pauli operator to one site of a statevector."""
    L = state.space.L
    if not 0 <= site < L:
        raise ValueError(f"site {site} out of range for L={L}")
    idx = np.arange(state.space.dim)
    bits = (idx >> site) & 1
    v = state.amplitudes
    out = np.empty_like(v)
    if axis == "z":
        out = (1 - 2 * bits) * v
    elif axis == "x":
        out[idx ^ (1 << site)] = v
    elif axis == "y":
        # sigma^y |0> = i|1>, sigma^y |1> = -i|0>
        out[idx ^ (1 << site)] = (1j - 2j * bits) * v
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return StateVector(amplitudes=out, space=state.space)


def pauli_string_action(space: HilbertSpace, string: PauliString):
    """Permutation and phase arrays of a Pauli string: P|i> = phase[i] |perm[i]>."""
    idx = np.arange(space.dim)
    perm = idx.copy()
    phase = np.ones(space.dim, dtype=complex)
    for site, axis in string:
        bits = (perm >> site) & 1
        if axis == "z":
            phase = phase * (1 - 2 * bits)
        elif axis == "x":
            perm = perm ^ (1 << site)
        elif axis == "y":
            phase = phase * (1j - 2j * bits)
            perm = perm ^ (1 << site)
        else:
            raise ValueError(f"unknown axis {axis!r}")
    return perm, phase


def apply_operator_terms(op: HermitianOperator, vec: np.ndarray) -> np.ndarray:
    """Matrix-free H @ vec from the stored Pauli strings (test oracle path)."""
    out = np.zeros(op.space.dim, dtype=complex)
    for coeff, string in op.terms:
        perm, phase = pauli_string_action(op.space, string)
        np.add.at(out, perm, coeff * phase * vec)
    return out


def _check_cap(L: int, cap: int):
    if L > cap:
        raise DimensionCapError(f"L={L} exceeds the dense cap {cap}")


def _accumulate(space: HilbertSpace, terms) -> HermitianOperator:
    """Sum weighted Pauli strings into a dense real symmetric matrix.

    Only strings with an even number of y factors appear in these models,
    so every matrix element is real.
    """
    dim = space.dim
    idx = np.arange(dim)
    H = np.zeros((dim, dim))
    for coeff, string in terms:
        perm, phase = pauli_string_action(space, string)
        if np.abs(phase.imag).max() > 0:
            raise ValueError(f"string {string} has complex elements")
        H[perm, idx] += coeff * phase.real
    return HermitianOperator(matrix=H, space=space, terms=tuple(terms))


def build_h_u1(spec: HamiltonianSpecU1, cap: int = DEFAULT_L_CAP) -> HermitianOperator:
    """NN XX/YY/ZZ plus NNN Heisenberg chain; U(1)-symmetric at gamma=1."""
    _check_cap(spec.L, cap)
    space = HilbertSpace(spec.L)
    L = spec.L
    terms = []
    for j in range(L):
        k = (j + 1) % L
        terms.append((-1.0, ((j, "x"), (k, "x"))))
        terms.append((-spec.gamma, ((j, "y"), (k, "y"))))
        terms.append((-spec.lambda1, ((j, "z"), (k, "z"))))
    for j in range(L):
        k = (j + 2) % L
        for ax in ("x", "y", "z"):
            terms.append((-spec.lambda2, ((j, ax), (k, ax))))
    for j in range(L):
        terms.append((+spec.h, ((j, "z"),)))
    return _accumulate(space, terms)


def build_h_z2(spec: HamiltonianSpecZ2, cap: int = DEFAULT_L_CAP) -> HermitianOperator:
    """XX + ZZ chain with transverse gamma term; parity-symmetric at gamma=0."""
    _check_cap(spec.L, cap)
    space = HilbertSpace(spec.L)
    L = spec.L
    terms = []
    for j in range(L):
        k = (j + 1) % L
        terms.append((-1.0, ((j, "x"), (k, "x"))))
        terms.append((-spec.delta1, ((j, "z"), (k, "z"))))
        terms.append((-spec.gamma, ((j, "x"),)))
    for j in range(L):
        terms.append((-spec.fields[j], ((j, "z"),)))
    return _accumulate(space, terms)


def build_h_u1_disordered(
    spec: HamiltonianSpecU1Disordered, cap: int = DEFAULT_L_CAP
) -> HermitianOperator:
    """Anisotropic XY + ZZ chain with random z fields; U(1)-symmetric at gamma=1."""
    _check_cap(spec.L, cap)
    space = HilbertSpace(spec.L)
    L = spec.L
    terms = []
    for j in range(L):
        k = (j + 1) % L
        terms.append((-1.0, ((j, "x"), (k, "x"))))
        terms.append((-spec.gamma, ((j, "y"), (k, "y"))))
        terms.append((-spec.mu, ((j, "z"), (k, "z"))))
    for j in range(L):
        terms.append((-spec.fields[j], ((j, "z"),)))
    return _accumulate(space, terms)


def total_charge_matrix(space: HilbertSpace) -> np.ndarray:
    """Diagonal matrix of the total sigma^z charge."""
    from .hilbert import popcounts

    return np.diag((space.L - 2 * popcounts(space)).astype(float))


def parity_matrix(space: HilbertSpace) -> np.ndarray:
    """Diagonal matrix of the spin-flip parity."""
    from .hilbert import popcounts

    return np.diag((1 - 2 * (popcounts(space) & 1)).astype(float))
