"""Sparse operators over occupation bases: the chain Hamiltonian, number
operators, and creation maps between adjacent particle-number sectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .fock import OccupationBasis
from .solve import StateVector


@dataclass(frozen=True)
class BHParams:
    """Bose-Hubbard chain parameters (energies in units of J, hbar = 1).

    J : nearest-neighbour tunneling amplitude (sets the time unit 1/J)
    U : on-site pairwise interaction
    epsilon : per-site energies; None means all zero
    mu : chemical potential; in a fixed-N sector it only shifts all
         energies by -mu*N and is kept as a documented offset
    """

    J: float = 1.0
    U: float = 0.0
    epsilon: tuple | None = None
    mu: float = 0.0

    def __post_init__(self):
        if self.J <= 0:
            raise ValueError(f"tunneling J must be positive, got {self.J}")
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", tuple(float(e) for e in self.epsilon))

    def site_energies(self, n_sites: int) -> np.ndarray:
        if self.epsilon is None:
            return np.zeros(n_sites)
        eps = np.asarray(self.epsilon, dtype=float)
        if eps.shape != (n_sites,):
            raise ValueError(f"epsilon has {eps.shape} entries, chain has {n_sites}")
        return eps


class SparseOperator:
    """Hermitian sparse matrix tied to one occupation basis."""

    def __init__(self, basis: OccupationBasis, matrix):
        matrix = scipy.sparse.csr_matrix(matrix, dtype=np.complex128)
        if matrix.shape != (basis.dim, basis.dim):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match basis dim {basis.dim}"
            )
        self.basis = basis
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.basis.dim

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, psi: StateVector) -> StateVector:
        return StateVector(self.basis, self.matrix @ psi.amplitudes)

    def expectation(self, psi: StateVector) -> float:
        val = np.vdot(psi.amplitudes, self.matrix @ psi.amplitudes)
        return float(val.real)

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.conjugate().transpose()
        return float(np.max(np.abs(d.toarray()))) if d.nnz else 0.0


def build_hamiltonian(basis: OccupationBasis, params: BHParams) -> SparseOperator:
    """Bose-Hubbard Hamiltonian on an open chain, restricted to `basis`.

    Hopping -J sqrt(n_i + 1) sqrt(n_{i+1}) connects configurations that
    differ by one particle moved across a bond; moves that would exceed
    n_max are absent (truncation artifact of the capped basis). Diagonal:
    sum_i eps_i n_i + (U/2) sum_i n_i (n_i - 1) - mu N.
    """
    M = basis.n_sites
    eps = params.site_energies(M)
    occ = basis.configs
    diag = (
        occ @ eps
        + 0.5 * params.U * np.sum(occ * (occ - 1), axis=1)
        - params.mu * basis.n_particles
    )
    rows = list(range(basis.dim))
    cols = list(range(basis.dim))
    vals = list(diag.astype(float))
    for c in range(basis.dim):
        config = occ[c]
        for i in range(M - 1):
            # move one particle from site i+1 to site i (a^dag_i a_{i+1});
            # the reverse bond direction is the Hermitian partner below
            if config[i + 1] > 0 and config[i] < basis.n_max:
                target = config.copy()
                target[i] += 1
                target[i + 1] -= 1
                r = basis.rank(target)
                amp = -params.J * np.sqrt((config[i] + 1) * config[i + 1])
                rows.extend((r, c))
                cols.extend((c, r))
                vals.extend((amp, amp))
    matrix = scipy.sparse.coo_matrix(
        (vals, (rows, cols)), shape=(basis.dim, basis.dim)
    )
    return SparseOperator(basis, matrix)


def number_operator(basis: OccupationBasis, site: int) -> SparseOperator:
    """Diagonal operator n_hat at `site` (1-based, matching chain labels)."""
    if not 1 <= site <= basis.n_sites:
        raise ValueError(f"site {site} outside chain 1..{basis.n_sites}")
    diag = basis.configs[:, site - 1].astype(float)
    return SparseOperator(basis, scipy.sparse.diags(diag))


def create_particle(
    basis_from: OccupationBasis,
    basis_to: OccupationBasis,
    site: int,
    state: StateVector,
):
    """Apply a^dag_site, mapping the N sector into the N+1 sector.

    Components that would exceed n_max are dropped; the pre-normalization
    norm is returned alongside the normalized result so truncation loss
    stays observable.

    Returns (StateVector in basis_to, pre-normalization norm factor).
    """
    if (
        basis_from.n_sites != basis_to.n_sites
        or basis_from.n_max != basis_to.n_max
        or basis_to.n_particles != basis_from.n_particles + 1
    ):
        raise ValueError(
            "target basis must share M and n_max and hold one more particle"
        )
    if not 1 <= site <= basis_from.n_sites:
        raise ValueError(f"site {site} outside chain 1..{basis_from.n_sites}")
    if state.basis is not basis_from and state.basis.configs.shape != basis_from.configs.shape:
        raise ValueError("state does not live in the source basis")
    j = site - 1
    out = np.zeros(basis_to.dim, dtype=np.complex128)
    for c in range(basis_from.dim):
        amp = state.amplitudes[c]
        if amp == 0:
            continue
        config = basis_from.configs[c]
        if config[j] >= basis_from.n_max:
            continue  # truncated component
        target = config.copy()
        target[j] += 1
        out[basis_to.rank(target)] = amp * np.sqrt(config[j] + 1)
    factor = float(np.linalg.norm(out))
    if factor == 0.0:
        raise ValueError("creation removed the entire state (all components capped)")
    return StateVector(basis_to, out / factor), factor
