import numpy as np
import pytest
import scipy.linalg

from quenchlab.dynamics import (
    TimeGrid,
    charge_distribution,
    eigenbasis_coefficients,
    entanglement_entropy,
    evolve,
    late_time_average,
    quench_series,
    steady_entropy_scaling,
)
from quenchlab.hamiltonians import HamiltonianSpecU1, build_h_u1
from quenchlab.hilbert import ChargeMap, HilbertSpace, StateVector, make_product_state
from quenchlab.spectra import diagonalize

RNG = np.random.default_rng(3)


def random_state(L):
    v = RNG.normal(size=2 ** L) + 1j * RNG.normal(size=2 ** L)
    return StateVector(amplitudes=v / np.linalg.norm(v), space=HilbertSpace(L))


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(times=np.array([0.0, 0.0, 1.0]))
    grid = TimeGrid.linear(50.0, 501)
    assert len(grid.times) == 501 and grid.times[0] == 0.0
    assert grid.late_window().sum() == 251


def test_evolve_t0_identity():
    H = build_h_u1(HamiltonianSpecU1(L=4, gamma=0.8))
    sd = diagonalize(H)
    psi = random_state(4)
    c = eigenbasis_coefficients(psi, sd)
    out = evolve(sd, c, 0.0)
    assert np.abs(out.amplitudes - psi.amplitudes).max() < 1e-10


def test_evolve_eigenstate_survival():
    H = build_h_u1(HamiltonianSpecU1(L=4, gamma=0.8))
    sd = diagonalize(H)
    psi = StateVector(amplitudes=sd.eigenvectors[:, 3].astype(complex), space=H.space)
    c = eigenbasis_coefficients(psi, sd)
    for t in (0.5, 3.0, 17.0):
        out = evolve(sd, c, t)
        assert abs(abs(psi.amplitudes.conj() @ out.amplitudes) - 1.0) < 1e-10


@pytest.mark.parametrize("t", [0.3, 1.7, 8.0])
def test_evolve_matches_matrix_exponential(t):
    H = build_h_u1(HamiltonianSpecU1(L=6, gamma=0.55))
    sd = diagonalize(H)
    psi = random_state(6)
    c = eigenbasis_coefficients(psi, sd)
    spectral = evolve(sd, c, t).amplitudes
    oracle = scipy.linalg.expm(-1j * H.matrix * t) @ psi.amplitudes
    assert np.abs(spectral - oracle).max() < 1e-8


def test_energy_conservation():
    H = build_h_u1(HamiltonianSpecU1(L=6, gamma=0.55))
    sd = diagonalize(H)
    psi = make_product_state("AF", 6)
    c = eigenbasis_coefficients(psi, sd)
    e0 = np.real(psi.amplitudes.conj() @ H.matrix @ psi.amplitudes)
    scale = max(abs(e0), 1.0)
    for t in np.linspace(0, 40, 9):
        a = evolve(sd, c, t).amplitudes
        e = np.real(a.conj() @ H.matrix @ a)
        assert abs(e - e0) / scale < 1e-8


def test_charge_distribution_basic():
    psi = make_product_state("F", 12)
    dist = charge_distribution(psi, ChargeMap.build(psi.space))
    assert dist[12] == 1.0
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_charge_distribution_bell():
    space = HilbertSpace(2)
    bell = StateVector(
        amplitudes=np.array([1, 0, 0, 1], complex) / np.sqrt(2), space=space
    )
    dist = charge_distribution(bell, ChargeMap.build(space))
    assert dist[2] == pytest.approx(0.5) and dist[-2] == pytest.approx(0.5)


def test_entropy_product_state():
    assert entanglement_entropy(make_product_state("AF", 6), 3) == 0.0


def test_entropy_bell_pair():
    space = HilbertSpace(2)
    bell = StateVector(
        amplitudes=np.array([1, 0, 0, 1], complex) / np.sqrt(2), space=space
    )
    assert entanglement_entropy(bell, 1) == pytest.approx(np.log(2), abs=1e-12)


def test_entropy_maximal():
    # uniform Schmidt rank 2^(L/2): pairwise-entangled Bell state of each
    # site k with site k + L/2
    L = 6
    space = HilbertSpace(L)
    half = L // 2
    amps = np.zeros(2 ** L, dtype=complex)
    for b in range(2 ** half):
        amps[b | (b << half)] = 1.0
    amps /= np.linalg.norm(amps)
    s = entanglement_entropy(StateVector(amplitudes=amps, space=space), half)
    assert s == pytest.approx(half * np.log(2), abs=1e-9)


def test_entropy_cut_range():
    with pytest.raises(ValueError):
        entanglement_entropy(make_product_state("F", 4), 0)
    with pytest.raises(ValueError):
        entanglement_entropy(make_product_state("F", 4), 4)


def test_quench_series_invariants():
    H = build_h_u1(HamiltonianSpecU1(L=8, gamma=0.6))
    sd = diagonalize(H)
    series = quench_series(sd, make_product_state("AF", 8), TimeGrid.linear(20, 101))
    total = sum(series.pq_full.values())
    assert np.abs(total - 1.0).max() < 1e-9
    assert all(p.min() >= -1e-12 for p in series.pq_full.values())
    assert series.norm_deviation.max() < 1e-9
    assert series.entropy.min() >= 0.0
    assert series.entropy.max() <= 4 * np.log(2) + 1e-9
    assert series.survival[0] == pytest.approx(1.0, abs=1e-10)


def test_quench_series_sector_freezing_at_gamma_1():
    H = build_h_u1(HamiltonianSpecU1(L=6, gamma=1.0))
    sd = diagonalize(H)
    series = quench_series(sd, make_product_state("AF", 6), TimeGrid.linear(20, 101))
    for p in series.pq_full.values():
        assert p.max() - p.min() < 1e-10


def test_quench_series_omits_negligible_sectors():
    H = build_h_u1(HamiltonianSpecU1(L=8, gamma=0.9))
    sd = diagonalize(H)
    series = quench_series(sd, make_product_state("F", 8), TimeGrid.linear(20, 51))
    for q in series.omitted_sectors:
        assert series.pq_full[q].max() < 1e-6
    assert set(series.pq) | set(series.omitted_sectors) == set(series.pq_full)


def test_af_plus_minus_symmetry_small():
    H = build_h_u1(HamiltonianSpecU1(L=8, gamma=0.7))
    sd = diagonalize(H)
    series = quench_series(sd, make_product_state("AF", 8), TimeGrid.linear(30, 151))
    assert np.abs(series.pq_full[4] - series.pq_full[-4]).max() < 1e-6


def test_steady_entropy_scaling_product_eigenstate():
    # F state is frozen under the symmetric model: steady entropy stays 0
    def run(L):
        sd = diagonalize(build_h_u1(HamiltonianSpecU1(L=L, gamma=1.0, h=0.0)))
        return quench_series(sd, make_product_state("F", L), TimeGrid.linear(10, 51))

    table = steady_entropy_scaling(run, [4, 6])
    assert all(abs(s) < 1e-9 for s in table["S_inf"])
    assert abs(table["slope"]) < 1e-9
