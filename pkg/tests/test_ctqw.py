import numpy as np
import pytest

from bhwalk.ctqw import (
    free_two_particle_state,
    single_particle_propagator,
    spread,
    walk_amplitudes,
)
from bhwalk.fock import enumerate_basis
from bhwalk.operators import BHParams, build_hamiltonian
from bhwalk.solve import StateVector, evolve


def test_initial_delta():
    walk = walk_amplitudes(7, 1.0, 0.0)
    expect = np.zeros(7, dtype=complex)
    expect[3] = 1.0
    np.testing.assert_allclose(walk.amplitudes, expect, atol=1e-12)


def test_even_sites_rejected():
    with pytest.raises(ValueError):
        walk_amplitudes(6, 1.0, 1.0)


@pytest.mark.parametrize("t", [0.4, 1.3, 3.0])
def test_three_site_closed_form(t):
    walk = walk_amplitudes(3, 1.0, t)
    assert walk.amplitudes[1] == pytest.approx(np.cos(np.sqrt(2) * t), abs=1e-12)
    assert walk.amplitudes[0] == pytest.approx(walk.amplitudes[2], abs=1e-12)
    assert abs(walk.amplitudes[0]) ** 2 == pytest.approx(
        np.sin(np.sqrt(2) * t) ** 2 / 2, abs=1e-12
    )


@pytest.mark.parametrize("M", [5, 11, 21])
@pytest.mark.parametrize("t", [0.7, 4.2])
def test_odd_mode_shortcut_equals_full_sum(M, t):
    fast = walk_amplitudes(M, 1.0, t, only_odd_modes=True)
    full = walk_amplitudes(M, 1.0, t, only_odd_modes=False)
    np.testing.assert_allclose(fast.amplitudes, full.amplitudes, atol=1e-12)


@pytest.mark.parametrize("M", [3, 9, 41])
def test_normalization_and_mirror_symmetry(M):
    for t in (0.5, 2.5, 8.0):
        walk = walk_amplitudes(M, 1.0, t)
        p = walk.probabilities()
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(np.abs(walk.amplitudes),
                                   np.abs(walk.amplitudes[::-1]), atol=1e-12)


def test_ballistic_peaks_long_chain():
    # at Jt = 5 the fronts sit near sites 21 +/- 10 (group velocity 2J)
    p = walk_amplitudes(41, 1.0, 5.0).probabilities()
    right = 22 + int(np.argmax(p[21:]))  # site labels are 1-based
    left = 1 + int(np.argmax(p[:20]))
    assert abs(right - 31) <= 3
    assert abs(left - 11) <= 3
    assert left + right == 42  # mirror pair


@pytest.mark.parametrize("M", [3, 7, 21, 41])
def test_agrees_with_krylov_evolution(M):
    basis = enumerate_basis(M, 1, 1)
    H = build_hamiltonian(basis, BHParams(J=1.0))
    cfg = [0] * M
    cfg[(M - 1) // 2] = 1
    psi = StateVector.from_config(basis, cfg)
    perm = [basis.rank(tuple(1 if j == i else 0 for j in range(M)))
            for i in range(M)]
    prev = 0.0
    for t in (1.0, 3.5, 9.0):
        psi = evolve(H, psi, t - prev, tol=1e-12)
        prev = t
        ana = walk_amplitudes(M, 1.0, t).amplitudes
        assert np.linalg.norm(psi.amplitudes[perm] - ana) < 1e-10


def test_propagator_unitary_and_consistent():
    M, t = 9, 2.3
    U = single_particle_propagator(M, 1.0, t)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(M), atol=1e-12)
    walk = walk_amplitudes(M, 1.0, t)
    np.testing.assert_allclose(U[:, (M - 1) // 2], walk.amplitudes, atol=1e-12)


def test_spread_delta_and_uniform():
    delta = np.zeros(5)
    delta[2] = 1.0
    assert spread(delta) == 0.0
    assert spread(np.ones(3) / 3) == pytest.approx(np.sqrt(2 / 3), abs=1e-12)


def test_spread_rejects_unnormalized():
    with pytest.raises(ValueError):
        spread(np.array([0.5, 0.2]))


def test_quantum_spread_linear_preboundary():
    ts = np.arange(0.5, 6.01, 0.5)
    deltas = [spread(walk_amplitudes(41, 1.0, t).probabilities()) for t in ts]
    slope = np.polyfit(np.log(ts), np.log(deltas), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("t", [0.6, 2.4, 5.1])
def test_free_two_particle_matches_exact_evolution(t):
    basis = enumerate_basis(8, 2, 2)
    H = build_hamiltonian(basis, BHParams(J=1.0, U=0.0))
    psi0 = StateVector.from_config(basis, (0, 0, 0, 1, 1, 0, 0, 0))
    num = evolve(H, psi0, t, tol=1e-12)
    ora = free_two_particle_state(basis, 4, 5, 1.0, t)
    assert np.linalg.norm(num.amplitudes - ora.amplitudes) < 1e-9
    assert ora.norm == pytest.approx(1.0, abs=1e-12)
