"""Statevector simulation of the layered variational circuit, the
subspace-overlap objective, exact parameter-shift gradients, and an Adam
ascent optimizer.

One composite layer = an Rx row, an Ry row, an Rz row (one angle per qubit
each), then a row of two-qubit ZZ phase gates on adjacent open-chain pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import HilbertSpace, StateVector
from .spectra import OverlapProfile, SpectralData, n_statistic, overlaps

ROTATION_SHIFT = (np.pi / 2, 0.5)    # (shift, coefficient) for R_alpha(theta)
ZZ_SHIFT = (np.pi / 4, 1.0)          # for exp(-i Z Z theta)


@dataclass(frozen=True)
class Ansatz:
    """Circuit structure: L qubits, n_layers composite layers."""

    L: int
    n_layers: int

    @property
    def params_per_layer(self) -> int:
        return 4 * self.L - 1

    @property
    def n_params(self) -> int:
        return self.n_layers * self.params_per_layer

    def zero_parameters(self) -> np.ndarray:
        return np.zeros(self.n_params)

    def parameter_kinds(self) -> list:
        """Per-parameter gate class ("rot" or "zz"), in layout order."""
        kinds = ["rot"] * (3 * self.L) + ["zz"] * (self.L - 1)
        return kinds * self.n_layers


@dataclass(frozen=True)
class TargetSubspace:
    """Orthonormal eigenvector columns spanning the target subspace."""

    basis: np.ndarray            # shape (dim, m)
    provenance: str = ""

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2 or b.shape[1] == 0:
            raise ValueError("subspace basis must be a non-empty 2-d array")
        gram = b.conj().T @ b
        if np.abs(gram - np.eye(b.shape[1])).max() > 1e-10:
            raise ValueError("subspace basis is not orthonormal")

    @property
    def size(self) -> int:
        return self.basis.shape[1]


def _apply_single_qubit(amps: np.ndarray, L: int, site: int, u: np.ndarray) -> np.ndarray:
    """Apply a 2x2 unitary to one site; site 0 is the least-significant bit."""
    a = amps.reshape(2 ** (L - site - 1), 2, 2 ** site)
    return np.einsum("ab,ibj->iaj", u, a).reshape(-1)


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "z":
        return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]])
    raise ValueError(f"unknown axis {axis!r}")


def apply_rotation(state: StateVector, site: int, axis: str, theta: float) -> StateVector:
    """R_alpha(theta) = exp(-i sigma_alpha theta / 2) on one site."""
    L = state.space.L
    if not 0 <= site < L:
        raise ValueError(f"site {site} out of range for L={L}")
    amps = _apply_single_qubit(state.amplitudes, L, site, rotation_matrix(axis, theta))
    return StateVector(amplitudes=amps, space=state.space)


def _zz_phases(L: int, pair: int, theta: float) -> np.ndarray:
    idx = np.arange(1 << L)
    aligned = ((idx >> pair) & 1) == ((idx >> (pair + 1)) & 1)
    return np.where(aligned, np.exp(-1j * theta), np.exp(1j * theta))


def apply_zz(state: StateVector, pair: int, theta: float) -> StateVector:
    """exp(-i Z_i Z_{i+1} theta) on the adjacent pair (pair, pair+1)."""
    L = state.space.L
    if not 0 <= pair < L - 1:
        raise ValueError(f"pair {pair} out of range for L={L}")
    amps = state.amplitudes * _zz_phases(L, pair, theta)
    return StateVector(amplitudes=amps, space=state.space)


def _run_circuit(theta: np.ndarray, ansatz: Ansatz, amps: np.ndarray) -> np.ndarray:
    L = ansatz.L
    v = amps
    k = 0
    for _ in range(ansatz.n_layers):
        for axis in ("x", "y", "z"):
            for site in range(L):
                v = _apply_single_qubit(v, L, site, rotation_matrix(axis, theta[k]))
                k += 1
        for pair in range(L - 1):
            v = v * _zz_phases(L, pair, theta[k])
            k += 1
    return v


def ansatz_state(theta: np.ndarray, ansatz: Ansatz, input_state: StateVector) -> StateVector:
    """Output statevector of the circuit for a flat parameter vector."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ansatz.n_params,):
        raise ValueError(
            f"expected {ansatz.n_params} parameters, got {theta.shape}"
        )
    amps = _run_circuit(theta, ansatz, input_state.amplitudes.astype(complex))
    return StateVector(amplitudes=amps, space=input_state.space)


def overlap_objective(
    theta: np.ndarray, ansatz: Ansatz, input_state: StateVector, target: TargetSubspace
) -> float:
    """Squared norm of the circuit output's projection onto the target subspace."""
    if target.basis.shape[0] != input_state.space.dim:
        raise ValueError("target subspace dimension mismatch")
    out = ansatz_state(theta, ansatz, input_state)
    proj = target.basis.conj().T @ out.amplitudes
    return float(np.real(proj.conj() @ proj))


def gradient(
    theta: np.ndarray, ansatz: Ansatz, input_state: StateVector, target: TargetSubspace
) -> np.ndarray:
    """Exact parameter-shift gradient of the overlap objective."""
    theta = np.asarray(theta, dtype=float)
    kinds = ansatz.parameter_kinds()
    grad = np.empty(len(theta))
    for k, kind in enumerate(kinds):
        shift, coeff = ROTATION_SHIFT if kind == "rot" else ZZ_SHIFT
        plus = theta.copy()
        plus[k] += shift
        minus = theta.copy()
        minus[k] -= shift
        grad[k] = coeff * (
            overlap_objective(plus, ansatz, input_state, target)
            - overlap_objective(minus, ansatz, input_state, target)
        )
    return grad


def _apply_generator(amps: np.ndarray, L: int, kind: str, k_in_layer: int) -> np.ndarray:
    """Apply the gate generator A (with exp(-i A theta) the gate) to a vector."""
    if kind == "rot":
        axis = "xyz"[k_in_layer // L]
        site = k_in_layer % L
        sigma = {
            "x": np.array([[0, 1], [1, 0]], complex),
            "y": np.array([[0, -1j], [1j, 0]]),
            "z": np.array([[1, 0], [0, -1]], complex),
        }[axis]
        return _apply_single_qubit(amps, L, site, sigma / 2)
    pair = k_in_layer - 3 * L
    idx = np.arange(len(amps))
    aligned = ((idx >> pair) & 1) == ((idx >> (pair + 1)) & 1)
    return np.where(aligned, 1.0, -1.0) * amps


def gradient_adjoint(
    theta: np.ndarray, ansatz: Ansatz, input_state: StateVector, target: TargetSubspace
) -> np.ndarray:
    """Reverse-mode exact gradient; identical values to the parameter-shift
    rule at a cost of O(gate count) instead of O(parameter count x gates)."""
    theta = np.asarray(theta, dtype=float)
    L = ansatz.L
    ppl = ansatz.params_per_layer
    psi = _run_circuit(theta, ansatz, input_state.amplitudes.astype(complex))
    lam = target.basis @ (target.basis.conj().T @ psi)
    grad = np.empty(ansatz.n_params)
    for k in range(ansatz.n_params - 1, -1, -1):
        k_in_layer = k % ppl
        kind = "rot" if k_in_layer < 3 * L else "zz"
        grad[k] = 2.0 * np.imag(
            np.vdot(lam, _apply_generator(psi, L, kind, k_in_layer))
        )
        # undo gate k on both vectors before moving to the previous one
        if kind == "rot":
            axis = "xyz"[k_in_layer // L]
            site = k_in_layer % L
            u_dag = rotation_matrix(axis, -theta[k])
            psi = _apply_single_qubit(psi, L, site, u_dag)
            lam = _apply_single_qubit(lam, L, site, u_dag)
        else:
            phases = _zz_phases(L, k_in_layer - 3 * L, -theta[k])
            psi = psi * phases
            lam = lam * phases
    return grad


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.02
    max_iterations: int = 2000
    patience: int = 100
    tolerance: float = 1e-6
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    gradient_tolerance: float = 1e-9
    init: str = "zeros"          # "zeros" or "random"
    seed: int = 0


@dataclass
class TrainingResult:
    theta: np.ndarray
    history: np.ndarray          # objective value per iteration, history[0] = start
    converged: bool
    diverged: bool


def optimize(
    ansatz: Ansatz,
    input_state: StateVector,
    target: TargetSubspace,
    config: OptimizerConfig = OptimizerConfig(),
) -> TrainingResult:
    """Adam gradient ascent on the subspace-overlap probability."""
    if config.init == "zeros":
        theta = ansatz.zero_parameters()
    elif config.init == "random":
        rng = np.random.default_rng(config.seed)
        theta = rng.uniform(-0.1, 0.1, ansatz.n_params)
    else:
        raise ValueError(f"unknown init {config.init!r}")

    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    history = [overlap_objective(theta, ansatz, input_state, target)]
    converged = diverged = False
    kicks = 0

    for it in range(1, config.max_iterations + 1):
        g = gradient_adjoint(theta, ansatz, input_state, target)
        if np.abs(g).max() < config.gradient_tolerance:
            if history[-1] >= 1.0 - config.tolerance or kicks >= 3:
                # at the objective ceiling, or a persistent stationary point
                converged = True
                break
            # exact stationary point below the ceiling (theta = 0 is one for
            # product-state inputs): break the symmetry deterministically
            kick_rng = np.random.default_rng((config.seed, kicks))
            theta = theta + kick_rng.uniform(-0.05, 0.05, theta.shape)
            kicks += 1
            history.append(overlap_objective(theta, ansatz, input_state, target))
            continue
        m = config.beta1 * m + (1 - config.beta1) * g
        v = config.beta2 * v + (1 - config.beta2) * g ** 2
        m_hat = m / (1 - config.beta1 ** it)
        v_hat = v / (1 - config.beta2 ** it)
        theta = theta + config.learning_rate * m_hat / (np.sqrt(v_hat) + config.eps)
        history.append(overlap_objective(theta, ansatz, input_state, target))

        if it >= config.patience:
            window = history[-config.patience - 1:]
            if max(window) - min(window) < config.tolerance:
                converged = True
                break
            if all(b < a for a, b in zip(window, window[1:])):
                diverged = True
                break

    return TrainingResult(
        theta=theta,
        history=np.array(history),
        converged=converged,
        diverged=diverged,
    )


def select_target_subspace(
    spec: SpectralData,
    reference: StateVector,
    rule: str = "n_set",
    threshold: float = 0.8,
    k: int = None,
) -> TargetSubspace:
    """Pick target eigenvectors for training.

    "n_set": the minimal set capturing `threshold` of the reference state's
    weight. "top_k": the k largest-weight eigenvectors.
    """
    profile = overlaps(reference, spec)
    if rule == "n_set":
        _, indices = n_statistic(profile, threshold)
    elif rule == "top_k":
        if k is None or k < 1:
            raise ValueError("top_k rule needs k >= 1")
        order = np.argsort(-profile.weights, kind="stable")
        indices = order[:k]
    else:
        raise ValueError(f"unknown selection rule {rule!r}")
    if len(indices) == 0:
        raise ValueError("empty target subspace selection")
    basis = spec.eigenvectors[:, np.sort(indices)].astype(complex)
    return TargetSubspace(basis=basis, provenance=f"{rule} of reference state")
