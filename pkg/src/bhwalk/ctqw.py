"""Closed-form continuous-time quantum walk on a finite line.

Serves as the analytic oracle for single-particle dynamics: the amplitude
sum over path-graph momentum modes, the single-particle propagator, and
the symmetrized two-particle product states of the non-interacting walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import OccupationBasis
from .solve import StateVector


@dataclass
class WalkAmplitudes:
    """Amplitudes c_i(t) of a walk started at the middle of an M-site line."""

    n_sites: int
    time: float
    amplitudes: np.ndarray

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _mode_table(n_sites: int, only_odd: bool = True):
    k = np.arange(1, n_sites + 1)
    if only_odd:
        k = k[k % 2 == 1]  # sin(pi k / 2) kills even k
    return k


def walk_amplitudes(n_sites: int, J: float, t: float,
                    only_odd_modes: bool = True) -> WalkAmplitudes:
    """Amplitudes of the walk started at site (M+1)/2 on an odd-M line.

    Evaluates the momentum-mode sum
        c_i(t) = 2/(M+1) sum_k sin(pi k/2) sin(pi k i/(M+1))
                 exp(2 i J t cos(k pi/(M+1)))
    over k = 1..M. Even k carry a vanishing sin(pi k/2) factor and are
    skipped by default; tests assert equality with the full sum.
    """
    if n_sites % 2 == 0:
        raise ValueError(f"need an odd number of sites, got {n_sites}")
    k = _mode_table(n_sites, only_odd_modes)
    i = np.arange(1, n_sites + 1)
    theta = np.pi * k / (n_sites + 1)
    weights = np.sin(np.pi * k / 2) * np.exp(2j * J * t * np.cos(theta))
    modes = np.sin(np.outer(i, k) * np.pi / (n_sites + 1))
    c = (2.0 / (n_sites + 1)) * (modes @ weights)
    return WalkAmplitudes(n_sites, t, c)


def single_particle_propagator(n_sites: int, J: float, t: float) -> np.ndarray:
    """Matrix U(t) = exp(-i H t) for one particle on the open chain.

    Built from the analytic path-graph eigenbasis, so it is independent
    of any numerical propagator it is used to check.
    """
    k = np.arange(1, n_sites + 1)
    theta = np.pi * k / (n_sites + 1)
    phi = np.sqrt(2.0 / (n_sites + 1)) * np.sin(
        np.outer(np.arange(1, n_sites + 1), theta)
    )
    phases = np.exp(2j * J * t * np.cos(theta))
    return (phi * phases) @ phi.T


def spread(probabilities) -> float:
    """Standard deviation of the site index under distribution p.

    Sites are labeled 1..M; Delta = sqrt(sum p_i i^2 - (sum p_i i)^2).
    """
    p = np.asarray(probabilities, dtype=float)
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()}, expected 1")
    i = np.arange(1, len(p) + 1)
    mean = p @ i
    return float(np.sqrt(max(p @ i**2 - mean**2, 0.0)))


def free_two_particle_state(
    basis: OccupationBasis, start_a: int, start_b: int, J: float, t: float
) -> StateVector:
    """Two non-interacting bosons evolved from sites (start_a, start_b).

    Uses the product identity for free bosons: the evolved amplitude on a
    configuration with particles at sites i <= j is the symmetrized product
    (permanent) of single-particle propagator entries. Requires an N=2
    basis with n_max >= 2.
    """
    if basis.n_particles != 2:
        raise ValueError("product identity implemented for the two-particle sector")
    if basis.n_max < 2:
        raise ValueError("n_max >= 2 required to represent doubly occupied sites")
    U = single_particle_propagator(basis.n_sites, J, t)
    a, b = start_a - 1, start_b - 1
    amps = np.zeros(basis.dim, dtype=np.complex128)
    for idx in range(basis.dim):
        sites = np.flatnonzero(basis.configs[idx])
        if len(sites) == 2:
            i, j = sites
            amps[idx] = U[i, a] * U[j, b] + U[j, a] * U[i, b]
        else:
            (i,) = sites
            amps[idx] = np.sqrt(2.0) * U[i, a] * U[i, b]
    return StateVector(basis, amps)
