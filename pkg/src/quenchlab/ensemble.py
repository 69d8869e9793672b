"""Disorder ensembles: counter-based field sampling, parallel realization
execution with optional checkpointing, and averaged diagnostics.

Aggregation runs in fixed realization order after all workers finish, so
results are bit-identical regardless of worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import TimeGrid, quench_series
from .hamiltonians import (
    HamiltonianSpecU1Disordered,
    HamiltonianSpecZ2,
    build_h_u1_disordered,
    build_h_z2,
)
from .hilbert import ChargeMap, ParityMap, make_product_state
from .spectra import diagonalize, n_statistic, overlaps

MODEL_FAMILIES = ("z2", "u1_disordered")


class RealizationError(Exception):
    """A single disorder realization failed; carries its index and seed."""


@dataclass(frozen=True)
class EnsembleConfig:
    family: str                  # "z2" or "u1_disordered"
    L: int
    gamma: float
    W: float
    R: int = 400
    master_seed: int = 2024
    coupling: float = None       # delta1 (z2) or mu (u1_disordered); None = default
    t_max: float = 50.0
    t_points: int = 501
    n_threshold: float = 0.8

    def __post_init__(self):
        if self.family not in MODEL_FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if self.R < 1:
            raise ValueError("need at least one realization")
        if self.W < 0:
            raise ValueError("disorder width must be non-negative")

    def grid(self) -> TimeGrid:
        return TimeGrid.linear(self.t_max, self.t_points)


@dataclass(frozen=True)
class EnsembleResult:
    config: EnsembleConfig
    mean_pq: dict                # Q -> mean probability array over times
    se_pq: dict
    mean_entropy: np.ndarray
    se_entropy: np.ndarray
    mean_n: float
    se_n: float
    n_values: np.ndarray         # per-realization N
    times: np.ndarray


def sample_fields(W: float, L: int, realization: int, master_seed: int) -> np.ndarray:
    """I.i.d. uniform fields on [-W, W], reproducible per realization.

    The stream is keyed by (master_seed, realization), so any realization can
    be regenerated in isolation with no sequential dependence on the others.
    """
    if W < 0:
        raise ValueError("disorder width must be non-negative")
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(realization,))
    rng = np.random.default_rng(seq)
    return rng.uniform(-W, W, size=L)


def _build_hamiltonian(cfg: EnsembleConfig, fields: np.ndarray):
    if cfg.family == "z2":
        kwargs = {} if cfg.coupling is None else {"delta1": cfg.coupling}
        spec = HamiltonianSpecZ2(
            L=cfg.L, gamma=cfg.gamma, fields=tuple(fields), W=cfg.W, **kwargs
        )
        return build_h_z2(spec)
    kwargs = {} if cfg.coupling is None else {"mu": cfg.coupling}
    spec = HamiltonianSpecU1Disordered(
        L=cfg.L, gamma=cfg.gamma, fields=tuple(fields), W=cfg.W, **kwargs
    )
    return build_h_u1_disordered(spec)


def run_realization(cfg: EnsembleConfig, kind: str, realization: int) -> dict:
    """One disorder realization: build, diagonalize, quench, N-statistic."""
    fields = sample_fields(cfg.W, cfg.L, realization, cfg.master_seed)
    try:
        H = _build_hamiltonian(cfg, fields)
        sd = diagonalize(H)
        psi = make_product_state(kind, cfg.L)
        n, _ = n_statistic(overlaps(psi, sd), cfg.n_threshold)
        # sector label: parity for the z2 family, total charge otherwise
        cmap = (ParityMap.build(psi.space) if cfg.family == "z2"
                else ChargeMap.build(psi.space))
        series = quench_series(sd, psi, cfg.grid(), cmap=cmap)
    except Exception as exc:
        raise RealizationError(
            f"realization {realization} (master seed {cfg.master_seed}) failed: {exc}"
        ) from exc
    return {
        "realization": realization,
        "pq": {q: p for q, p in series.pq_full.items()},
        "entropy": series.entropy,
        "n": n,
    }


def _checkpoint_path(directory: str, cfg: EnsembleConfig, kind: str, r: int) -> str:
    tag = (
        f"{cfg.family}_{kind}_L{cfg.L}_g{cfg.gamma}_W{cfg.W}"
        f"_seed{cfg.master_seed}_r{r:05d}.npz"
    )
    return os.path.join(directory, tag)


def _save_checkpoint(path: str, payload: dict):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    qs = sorted(payload["pq"])
    np.savez_compressed(
        path,
        realization=payload["realization"],
        qs=np.array(qs),
        pq=np.stack([payload["pq"][q] for q in qs]),
        entropy=payload["entropy"],
        n=payload["n"],
    )


def _load_checkpoint(path: str) -> dict:
    with np.load(path) as z:
        qs = z["qs"].tolist()
        return {
            "realization": int(z["realization"]),
            "pq": {int(q): z["pq"][i] for i, q in enumerate(qs)},
            "entropy": z["entropy"],
            "n": int(z["n"]),
        }


def run_ensemble(
    cfg: EnsembleConfig,
    kind: str,
    workers: int = 1,
    checkpoint_dir: str = None,
) -> EnsembleResult:
    """Average quench diagnostics over cfg.R independent disorder realizations."""
    payloads = [None] * cfg.R
    pending = []
    for r in range(cfg.R):
        if checkpoint_dir is not None:
            path = _checkpoint_path(checkpoint_dir, cfg, kind, r)
            if os.path.exists(path):
                payloads[r] = _load_checkpoint(path)
                continue
        pending.append(r)

    if pending:
        if workers <= 1:
            results = (run_realization(cfg, kind, r) for r in pending)
            done = zip(pending, results)
            for r, payload in done:
                payloads[r] = payload
                if checkpoint_dir is not None:
                    _save_checkpoint(_checkpoint_path(checkpoint_dir, cfg, kind, r), payload)
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {r: pool.submit(run_realization, cfg, kind, r) for r in pending}
                for r, fut in futures.items():
                    payloads[r] = fut.result()
                    if checkpoint_dir is not None:
                        _save_checkpoint(
                            _checkpoint_path(checkpoint_dir, cfg, kind, r), payloads[r]
                        )

    return aggregate(cfg, payloads)


def aggregate(cfg: EnsembleConfig, payloads) -> EnsembleResult:
    """Pointwise means and standard errors over realizations, in fixed order."""
    R = len(payloads)
    qs = sorted(payloads[0]["pq"])
    pq_stack = {q: np.stack([p["pq"][q] for p in payloads]) for q in qs}
    ent_stack = np.stack([p["entropy"] for p in payloads])
    n_values = np.array([p["n"] for p in payloads], dtype=float)

    denom = np.sqrt(R)
    mean_pq = {q: s.mean(axis=0) for q, s in pq_stack.items()}
    se_pq = {q: s.std(axis=0, ddof=1) / denom if R > 1 else np.zeros(s.shape[1])
             for q, s in pq_stack.items()}
    return EnsembleResult(
        config=cfg,
        mean_pq=mean_pq,
        se_pq=se_pq,
        mean_entropy=ent_stack.mean(axis=0),
        se_entropy=(ent_stack.std(axis=0, ddof=1) / denom if R > 1
                    else np.zeros(ent_stack.shape[1])),
        mean_n=float(n_values.mean()),
        se_n=float(n_values.std(ddof=1) / denom) if R > 1 else 0.0,
        n_values=n_values,
        times=cfg.grid().times,
    )
