"""Spatially delocalized qubits: projection onto the one-particle-per-pair
subspace, success probability, and two-qubit entanglement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entanglement import partial_transpose
from .solve import StateVector

P_THRESHOLD = 1e-9


class ProjectionFailedError(RuntimeError):
    """Projection probability below threshold; the qubits carry no data."""


@dataclass(frozen=True)
class SDQDefinition:
    """Two qubits, each encoded in a pair of adjacent sites.

    Logical 0 on a pair (i, i+1) means occupations (nbar + 1, nbar),
    logical 1 means (nbar, nbar + 1); nbar is the background filling.
    Qubit A is the left pair, qubit B the right pair, and the 4x4 index
    is alpha * 2 + beta (A first). Sites are 1-based.
    """

    pair_a: tuple[int, int]
    pair_b: tuple[int, int]
    nbar: int = 0

    def __post_init__(self):
        for name, (i, j) in (("A", self.pair_a), ("B", self.pair_b)):
            if j != i + 1:
                raise ValueError(f"qubit {name} pair {self.pair_a, self.pair_b} must be adjacent sites")
        if set(self.pair_a) & set(self.pair_b):
            raise ValueError("qubit site pairs overlap")
        if self.nbar < 0:
            raise ValueError("background filling must be non-negative")

    @property
    def sites(self) -> tuple[int, int, int, int]:
        return (*self.pair_a, *self.pair_b)


@dataclass
class SDQState:
    """Unnormalized 4x4 two-qubit matrix and its success probability."""

    matrix: np.ndarray
    p: float

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        if self.matrix.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got {self.matrix.shape}")

    def populations(self) -> np.ndarray:
        """Diagonal of the normalized state, ordered |00>, |01>, |10>, |11>."""
        if self.p <= 0.0:
            return np.zeros(4)
        return np.real(np.diag(self.matrix)) / self.p


def sdq_project(psi: StateVector, definition: SDQDefinition) -> SDQState:
    """Project |psi><psi| onto the logical subspace of both qubit pairs.

    A configuration contributes iff each qubit's site pair carries exactly
    the logical-0 or logical-1 occupation pattern; environment sites are
    unconstrained and are summed over coherently per logical entry.
    """
    basis = psi.basis
    nbar = definition.nbar
    for s in definition.sites:
        if not 1 <= s <= basis.n_sites:
            raise ValueError(f"qubit site {s} outside chain 1..{basis.n_sites}")
    cols = [s - 1 for s in definition.sites]
    occ = basis.configs[:, cols]

    def logical(n_left, n_right):
        out = np.full(len(n_left), -1, dtype=np.int64)
        out[(n_left == nbar + 1) & (n_right == nbar)] = 0
        out[(n_left == nbar) & (n_right == nbar + 1)] = 1
        return out

    alpha = logical(occ[:, 0], occ[:, 1])
    beta = logical(occ[:, 2], occ[:, 3])
    keep = (alpha >= 0) & (beta >= 0)
    logical_idx = alpha[keep] * 2 + beta[keep]
    env_cols = [c for c in range(basis.n_sites) if c not in cols]
    env_keys = basis.pack_columns(env_cols)[keep]
    _, env_ids = np.unique(env_keys, return_inverse=True)
    n_env = env_ids.max() + 1 if len(env_ids) else 0
    S = np.zeros((n_env, 4), dtype=np.complex128)
    np.add.at(S, (env_ids, logical_idx), psi.amplitudes[keep])
    rho = S.T @ S.conj()
    return SDQState(rho, float(np.trace(rho).real))


def sdq_entanglement(state: SDQState, p_threshold: float = P_THRESHOLD):
    """(p, LN) of the normalized two-qubit state.

    Raises ProjectionFailedError below the probability threshold, keeping
    "no data" distinct from "no entanglement".
    """
    if state.p < p_threshold:
        raise ProjectionFailedError(
            f"projection probability {state.p:.3e} below threshold {p_threshold:.0e}"
        )
    rho = state.matrix / state.p
    pt = partial_transpose(rho, (2, 2), subsystem=1)
    evals = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    ln = max(float(np.log2(np.sum(np.abs(evals)))), 0.0)
    return state.p, ln
