"""Basis conventions, product-state constructors, and symmetry-charge maps.

Conventions (fixed, not configurable):
  * basis index i encodes the bitstring with site 0 at the least-significant bit
  * bit 0 <-> spin-up <-> sigma^z = +1; bit 1 <-> spin-down <-> sigma^z = -1
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PRODUCT_STATE_KINDS = ("F", "AF", "FlipOne")


@dataclass(frozen=True)
class HilbertSpace:
    """Computational basis of a chain of L spin-1/2 sites."""

    L: int
    dim: int = field(init=False)

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"need at least 2 sites, got L={self.L}")
        object.__setattr__(self, "dim", 1 << self.L)

    def bit(self, index: int, site: int) -> int:
        return (index >> site) & 1


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over the computational basis."""

    amplitudes: np.ndarray
    space: HilbertSpace

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise ValueError(
                f"amplitude length {amps.shape} does not match dim {self.space.dim}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def popcounts(space: HilbertSpace) -> np.ndarray:
    """Number of set bits for every basis index, vectorized."""
    counts = np.zeros(space.dim, dtype=np.int64)
    for s in range(space.L):
        counts += (np.arange(space.dim) >> s) & 1
    return counts


@dataclass(frozen=True)
class ChargeMap:
    """Total-sigma^z charge Q = L - 2*popcount(i) for every basis state."""

    space: HilbertSpace
    charges: np.ndarray          # per basis index
    sectors: dict                # Q -> sorted array of basis indices

    @classmethod
    def build(cls, space: HilbertSpace) -> "ChargeMap":
        charges = space.L - 2 * popcounts(space)
        sectors = {
            int(q): np.flatnonzero(charges == q)
            for q in range(-space.L, space.L + 1, 2)
        }
        return cls(space=space, charges=charges, sectors=sectors)


@dataclass(frozen=True)
class ParityMap:
    """Spin-flip parity (-1)^popcount(i) for every basis state."""

    space: HilbertSpace
    parities: np.ndarray
    sectors: dict                # +1/-1 -> basis indices

    @classmethod
    def build(cls, space: HilbertSpace) -> "ParityMap":
        parities = 1 - 2 * (popcounts(space) & 1)
        sectors = {
            +1: np.flatnonzero(parities == 1),
            -1: np.flatnonzero(parities == -1),
        }
        return cls(space=space, parities=parities, sectors=sectors)


def charge_of(index: int, space: HilbertSpace) -> int:
    """U(1) charge Q = L - 2*popcount of a single basis index."""
    if not 0 <= index < space.dim:
        raise ValueError(f"basis index {index} out of range for dim {space.dim}")
    return space.L - 2 * bin(index).count("1")


def parity_of(index: int, space: HilbertSpace) -> int:
    """Spin-flip parity (-1)^popcount of a single basis index."""
    if not 0 <= index < space.dim:
        raise ValueError(f"basis index {index} out of range for dim {space.dim}")
    return -1 if bin(index).count("1") & 1 else +1


def product_state_index(kind: str, L: int) -> int:
    """Basis index of the named product state.

    F: all spins up (|00...0>).  AF: alternating, spin-up on even sites
    (|0101...>).  FlipOne: F with a single flip at site L//2.
    """
    if L < 2:
        raise ValueError(f"need at least 2 sites, got L={L}")
    if kind == "F":
        return 0
    if kind == "AF":
        # down spins on odd sites: bits 1, 3, 5, ...
        return sum(1 << s for s in range(1, L, 2))
    if kind == "FlipOne":
        return 1 << (L // 2)
    raise ValueError(f"unknown product state kind {kind!r}")


def make_product_state(kind: str, L: int) -> StateVector:
    """Computational basis state with unit amplitude at a single index."""
    space = HilbertSpace(L)
    amps = np.zeros(space.dim, dtype=complex)
    amps[product_state_index(kind, L)] = 1.0
    return StateVector(amplitudes=amps, space=space)
