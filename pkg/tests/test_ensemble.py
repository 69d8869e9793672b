import numpy as np
import pytest

from quenchlab.dynamics import TimeGrid, quench_series
from quenchlab.ensemble import (
    EnsembleConfig,
    RealizationError,
    run_ensemble,
    run_realization,
    sample_fields,
)
from quenchlab.hamiltonians import HamiltonianSpecU1Disordered, build_h_u1_disordered
from quenchlab.hilbert import ChargeMap, make_product_state
from quenchlab.spectra import diagonalize

SMALL = dict(family="u1_disordered", L=6, gamma=0.9, W=4.8,
             master_seed=99, t_max=10.0, t_points=21)


def test_sample_fields_zero_width():
    assert np.all(sample_fields(0.0, 8, 3, 42) == 0.0)


def test_sample_fields_support_and_reproducibility():
    f1 = sample_fields(2.4, 10, 7, 42)
    f2 = sample_fields(2.4, 10, 7, 42)
    assert np.array_equal(f1, f2)
    assert np.all(np.abs(f1) <= 2.4)
    assert not np.array_equal(f1, sample_fields(2.4, 10, 8, 42))
    assert not np.array_equal(f1, sample_fields(2.4, 10, 7, 43))


def test_sample_fields_mean():
    # 1e5 draws: empirical mean within 3 sigma of 0 for uniform variance W^2/3
    W = 4.8
    draws = np.concatenate([sample_fields(W, 100, r, 1234) for r in range(1000)])
    assert abs(draws.mean()) < 3 * W / np.sqrt(3 * len(draws))


def test_single_realization_matches_direct_quench():
    cfg = EnsembleConfig(R=1, **SMALL)
    result = run_ensemble(cfg, "F")
    fields = sample_fields(cfg.W, cfg.L, 0, cfg.master_seed)
    H = build_h_u1_disordered(
        HamiltonianSpecU1Disordered(L=cfg.L, gamma=cfg.gamma, fields=tuple(fields))
    )
    sd = diagonalize(H)
    psi = make_product_state("F", cfg.L)
    series = quench_series(sd, psi, cfg.grid(), ChargeMap.build(psi.space))
    for q, p in series.pq_full.items():
        assert np.array_equal(result.mean_pq[q], p)
    assert np.array_equal(result.mean_entropy, series.entropy)
    assert result.se_n == 0.0


def test_ensemble_mean_pq_sums_to_one():
    cfg = EnsembleConfig(R=4, **SMALL)
    result = run_ensemble(cfg, "AF")
    total = sum(result.mean_pq.values())
    assert np.abs(total - 1.0).max() < 1e-9


def test_worker_count_determinism():
    cfg = EnsembleConfig(R=4, **SMALL)
    r1 = run_ensemble(cfg, "F", workers=1)
    r2 = run_ensemble(cfg, "F", workers=3)
    for q in r1.mean_pq:
        assert np.array_equal(r1.mean_pq[q], r2.mean_pq[q])
        assert np.array_equal(r1.se_pq[q], r2.se_pq[q])
    assert np.array_equal(r1.mean_entropy, r2.mean_entropy)
    assert np.array_equal(r1.n_values, r2.n_values)


def test_checkpoint_resume(tmp_path):
    cfg = EnsembleConfig(R=3, **SMALL)
    r1 = run_ensemble(cfg, "F", checkpoint_dir=str(tmp_path))
    assert len(list(tmp_path.iterdir())) == 3
    # resumed run must reproduce the same aggregate from files alone
    r2 = run_ensemble(cfg, "F", checkpoint_dir=str(tmp_path))
    for q in r1.mean_pq:
        assert np.array_equal(r1.mean_pq[q], r2.mean_pq[q])
    assert np.array_equal(r1.n_values, r2.n_values)


def test_standard_error_scaling():
    # doubling R roughly halves the standard error (within 30%)
    base = dict(SMALL)
    cfg1 = EnsembleConfig(R=16, **base)
    cfg2 = EnsembleConfig(R=64, **base)
    r1 = run_ensemble(cfg1, "AF")
    r2 = run_ensemble(cfg2, "AF")
    s1 = np.mean([p.mean() for p in r1.se_pq.values()])
    s2 = np.mean([p.mean() for p in r2.se_pq.values()])
    assert s2 < s1         # more realizations, tighter errors
    ratio = s1 / s2
    assert 2.0 * 0.7 < ratio < 2.0 * 1.3


def test_af_plus_minus_symmetry_in_mean():
    cfg = EnsembleConfig(R=8, **SMALL)
    result = run_ensemble(cfg, "AF")
    gap = np.abs(result.mean_pq[2] - result.mean_pq[-2]).max()
    se = max(result.se_pq[2].max(), result.se_pq[-2].max())
    assert gap <= 2 * se + 1e-12


def test_invalid_configs():
    with pytest.raises(ValueError):
        EnsembleConfig(family="bogus", L=4, gamma=0.9, W=1.0)
    with pytest.raises(ValueError):
        EnsembleConfig(family="z2", L=4, gamma=0.9, W=-1.0)
    with pytest.raises(ValueError):
        EnsembleConfig(family="z2", L=4, gamma=0.9, W=1.0, R=0)
