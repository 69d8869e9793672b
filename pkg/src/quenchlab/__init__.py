"""Exact-diagonalization laboratory for spin-1/2 chain quench dynamics:
Hamiltonian builders, full spectra and overlap statistics, charge-sector
and entanglement diagnostics, disorder ensembles, a variational state
preparation circuit, and observable-bound checks."""

from .hilbert import (
    ChargeMap,
    HilbertSpace,
    ParityMap,
    StateVector,
    charge_of,
    make_product_state,
    parity_of,
)
from .hamiltonians import (
    HamiltonianSpecU1,
    HamiltonianSpecU1Disordered,
    HamiltonianSpecZ2,
    HermitianOperator,
    apply_pauli,
    build_h_u1,
    build_h_u1_disordered,
    build_h_z2,
)
from .spectra import SpectralData, diagonalize, n_statistic, overlaps
from .dynamics import (
    TimeGrid,
    QuenchSeries,
    charge_distribution,
    entanglement_entropy,
    evolve,
    quench_series,
)
from .ensemble import EnsembleConfig, run_ensemble, sample_fields
from .circuit import (
    Ansatz,
    OptimizerConfig,
    TargetSubspace,
    ansatz_state,
    apply_rotation,
    apply_zz,
    gradient,
    optimize,
    overlap_objective,
    select_target_subspace,
)
from .bounds import (
    BoundReport,
    HsiDecomposition,
    expectation_decomposition,
    hsi_decompose,
    pauli_string_observable,
    verify_loose_bound,
)

__version__ = "0.1.0"
