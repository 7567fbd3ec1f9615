"""State vectors, eigen-solving, Krylov time propagation, classical walks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .fock import OccupationBasis

#: seed of the deterministic Lanczos starting vector; fixed for reproducibility
LANCZOS_SEED = 1234

#: dimension below which dense eigensolvers replace iterative Lanczos
DENSE_CUTOFF = 64

DEFAULT_KRYLOV_DIM = 30


class ConvergenceError(RuntimeError):
    """Eigensolver failed to reach the requested residual."""


class StepUnderflowError(RuntimeError):
    """Krylov propagation could not reach tolerance even with tiny steps."""


@dataclass
class StateVector:
    """Complex amplitudes over an OccupationBasis."""

    basis: OccupationBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude array of length {self.amplitudes.shape} does not "
                f"match basis dimension {self.basis.dim}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / n)

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        if other.basis is not self.basis and (
            other.basis.n_sites != self.basis.n_sites
            or other.basis.n_particles != self.basis.n_particles
            or other.basis.n_max != self.basis.n_max
        ):
            raise ValueError("states live in different sectors")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def mean_occupations(self) -> np.ndarray:
        """<n_i> for each site i."""
        return self.probabilities() @ self.basis.configs

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes.copy())

    @classmethod
    def from_config(cls, basis: OccupationBasis, config) -> "StateVector":
        """Basis state |n_1, ..., n_M>."""
        amps = np.zeros(basis.dim, dtype=np.complex128)
        amps[basis.rank(config)] = 1.0
        return cls(basis, amps)


def ground_state(H, tol: float = 1e-10, max_iter: int = 2000):
    """Lowest eigenpair of a Hermitian sparse operator.

    Returns (energy, StateVector) with residual ||H psi - E psi|| <= tol.
    Uses dense diagonalization below DENSE_CUTOFF, otherwise implicitly
    restarted Lanczos started from a fixed seeded random vector.
    """
    basis = H.basis
    dim = basis.dim
    if dim <= DENSE_CUTOFF:
        w, v = np.linalg.eigh(H.to_dense())
        energy, vec = float(w[0]), v[:, 0]
        gap = float(w[1] - w[0]) if dim > 1 else np.inf
    else:
        rng = np.random.default_rng(LANCZOS_SEED)
        v0 = rng.standard_normal(dim)
        k = 2  # second eigenvalue only for the degeneracy flag
        w, v = scipy.sparse.linalg.eigsh(
            H.matrix, k=k, which="SA", v0=v0, tol=tol, maxiter=max_iter
        )
        order = np.argsort(w)
        energy, vec = float(w[order[0]]), v[:, order[0]]
        gap = float(w[order[1]] - w[order[0]])
    residual = float(np.linalg.norm(H.matrix @ vec - energy * vec))
    if residual > max(tol, 1e-8):
        raise ConvergenceError(
            f"ground-state residual {residual:.2e} exceeds tolerance {tol:.2e}"
        )
    if gap < 1e-10:
        warnings.warn(
            f"ground state is (near-)degenerate, gap {gap:.2e}; "
            "returning one eigenvector",
            stacklevel=2,
        )
    psi = StateVector(basis, vec.astype(np.complex128)).normalized()
    return energy, psi


def _lanczos_expv(matvec, v: np.ndarray, dt: float, tol: float, m_max: int):
    """One Krylov step w ~= exp(-i dt H) v for Hermitian H.

    Returns (w, error_estimate, converged). Full reorthogonalization keeps
    the small tridiagonal problem faithful at the tolerances used here.
    """
    beta0 = np.linalg.norm(v)
    V = [v / beta0]
    alphas: list[float] = []
    betas: list[float] = []
    for j in range(m_max):
        w = matvec(V[j])
        a = float(np.vdot(V[j], w).real)
        w = w - a * V[j]
        if j > 0:
            w = w - betas[-1] * V[j - 1]
        for u in V:  # reorthogonalize
            w = w - np.vdot(u, w) * u
        b = float(np.linalg.norm(w))
        alphas.append(a)
        betas.append(b)
        m = j + 1
        T = np.diag(alphas)
        if m > 1:
            off = np.array(betas[:-1])
            T = T + np.diag(off, 1) + np.diag(off, -1)
        u_small = scipy.linalg.expm(-1j * dt * T)[:, 0]
        err = abs(b * u_small[-1])
        if err < tol or b < 1e-14:
            out = beta0 * (np.column_stack(V) @ u_small)
            return out, err, True
        V.append(w / b)
    out = beta0 * (np.column_stack(V[:m_max]) @ u_small)
    return out, err, False


def evolve(H, psi0: StateVector, t: float, tol: float = 1e-10,
           m_max: int = DEFAULT_KRYLOV_DIM) -> StateVector:
    """Krylov propagation exp(-i H t)|psi0> with adaptive substeps.

    The step size halves whenever the Krylov residual estimate misses the
    per-step tolerance at the maximum subspace dimension.
    """
    if abs(t) == 0.0:
        return psi0.copy()
    matvec = H.matrix.__matmul__
    v = psi0.amplitudes.copy()
    remaining = float(t)
    sign = np.sign(remaining)
    remaining = abs(remaining)
    dt = remaining
    # split tolerance across the (a-priori unknown) number of steps
    step_tol = tol / max(1.0, 2.0 * abs(t))
    while remaining > 1e-14 * abs(t):
        dt = min(dt, remaining)
        w, err, ok = _lanczos_expv(matvec, v, sign * dt, step_tol * dt, m_max)
        if ok:
            v = w
            remaining -= dt
            if err < 0.1 * step_tol * dt:
                dt *= 2.0
        else:
            dt /= 2.0
            if dt < 1e-12 * abs(t):
                raise StepUnderflowError(
                    f"Krylov step size underflow at residual {err:.2e}"
                )
    return StateVector(psi0.basis, v)


@dataclass
class ClassicalDistribution:
    """Site-occupation probabilities of a classical walker at one time."""

    probabilities: np.ndarray
    time: float

    def __post_init__(self):
        self.probabilities = np.asarray(self.probabilities, dtype=np.float64)


def ctrw_generator(n_sites: int, rate: float) -> np.ndarray:
    """Rate matrix of the continuous-time random walk on a path graph.

    Off-diagonal entries are `rate` on edges; diagonals balance each column
    so that total probability is conserved.
    """
    G = np.zeros((n_sites, n_sites))
    for i in range(n_sites - 1):
        G[i, i + 1] = rate
        G[i + 1, i] = rate
    np.fill_diagonal(G, -G.sum(axis=0))
    return G


def ctrw_distribution(n_sites: int, rate: float, t: float) -> ClassicalDistribution:
    """Classical walk distribution at time t, started at the middle site."""
    if n_sites % 2 == 0:
        raise ValueError("classical walk scenarios use an odd number of sites")
    G = ctrw_generator(n_sites, rate)
    p0 = np.zeros(n_sites)
    p0[(n_sites - 1) // 2] = 1.0
    p = scipy.linalg.expm(G * t) @ p0
    return ClassicalDistribution(p, t)
