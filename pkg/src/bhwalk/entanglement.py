"""Two-site reduced density matrices and logarithmic negativity.

Includes the closed-form single-particle negativity, the superfluid
ground-state spectra gamma_k (with and without an extra particle), and the
first-maximum extraction shared with the scenario runners.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .solve import StateVector

PSD_TOL = 1e-10


@dataclass
class TwoSiteRDM:
    """Reduced state of two sites in the ordered basis |n_a, n_b>.

    levels : occupation cutoff d; per-site occupations run 0..d-1
    matrix : Hermitian (d^2, d^2) array, index n_a * d + n_b
    truncated_weight : probability weight lost to the occupation cutoff
        (nonzero only for analytically constructed superfluid states)
    """

    levels: int
    matrix: np.ndarray
    truncated_weight: float = 0.0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        d2 = self.levels**2
        if self.matrix.shape != (d2, d2):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match cutoff {self.levels}"
            )

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def sector_of_index(self, idx: int) -> int:
        """Total particle number n_a + n_b of a basis index."""
        return idx // self.levels + idx % self.levels

    def block_defect(self) -> float:
        """Largest matrix element connecting different particle-number sectors."""
        sectors = np.array([self.sector_of_index(i) for i in range(self.levels**2)])
        mask = sectors[:, None] != sectors[None, :]
        return float(np.max(np.abs(self.matrix[mask]))) if mask.any() else 0.0

    def check(self, tol: float = PSD_TOL):
        """Raise if the state is not a valid (Hermitian, PSD, unit-trace) RDM."""
        herm = float(np.max(np.abs(self.matrix - self.matrix.conj().T)))
        if herm > tol:
            raise ValueError(f"hermiticity defect {herm:.2e}")
        if abs(self.trace - 1.0) > tol:
            raise ValueError(f"trace {self.trace} differs from 1")
        evals = np.linalg.eigvalsh(self.matrix)
        if evals.min() < -tol:
            raise ValueError(f"negative eigenvalue {evals.min():.2e}")


def reduce_two_sites(psi: StateVector, site_a: int, site_b: int) -> TwoSiteRDM:
    """Partial trace of |psi><psi| down to sites (site_a, site_b).

    Exact sum over environment configurations; the cutoff is n_max + 1
    levels per site. Sites are 1-based.
    """
    basis = psi.basis
    M = basis.n_sites
    if site_a == site_b:
        raise ValueError("the two sites must differ")
    for s in (site_a, site_b):
        if not 1 <= s <= M:
            raise ValueError(f"site {s} outside chain 1..{M}")
    d = basis.n_max + 1
    a, b = site_a - 1, site_b - 1
    env_cols = [c for c in range(M) if c not in (a, b)]
    env_keys = basis.pack_columns(env_cols)
    pair_idx = basis.configs[:, a] * d + basis.configs[:, b]
    _, env_ids = np.unique(env_keys, return_inverse=True)
    n_env = env_ids.max() + 1 if len(env_ids) else 0
    # rho[q, q'] = sum_env psi[env, q] conj(psi[env, q'])
    S = np.zeros((n_env, d * d), dtype=np.complex128)
    np.add.at(S, (env_ids, pair_idx), psi.amplitudes)
    rho = S.T @ S.conj()
    return TwoSiteRDM(d, rho)


def partial_transpose(matrix: np.ndarray, dims: tuple[int, int],
                      subsystem: int = 1) -> np.ndarray:
    """Transpose the indices of one tensor factor of a bipartite matrix."""
    da, db = dims
    r = matrix.reshape(da, db, da, db)
    if subsystem == 0:
        r = r.transpose(2, 1, 0, 3)
    elif subsystem == 1:
        r = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 0 or 1")
    return r.reshape(da * db, da * db)


def log_negativity(rho: TwoSiteRDM, herm_tol: float = 1e-8) -> float:
    """log2 of the trace norm of the partial transpose; >= 0.

    The transposed side is irrelevant (the two choices are transposes of
    each other); subsystem b is used.
    """
    herm = float(np.max(np.abs(rho.matrix - rho.matrix.conj().T)))
    if herm > herm_tol:
        raise ValueError(f"input not Hermitian, defect {herm:.2e}")
    pt = partial_transpose(rho.matrix, (rho.levels, rho.levels), subsystem=1)
    evals = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return max(float(np.log2(np.sum(np.abs(evals)))), 0.0)


def single_particle_rdm(p1: float, levels: int = 2) -> TwoSiteRDM:
    """Outer-site reduced state of a single walker with edge probability p1.

    Direct sum of a vacuum weight 1 - 2 p1 and 2 p1 on the symmetric
    one-particle state (|1,0> + |0,1>)/sqrt(2).
    """
    if not 0.0 <= p1 <= 0.5:
        raise ValueError(f"edge probability must lie in [0, 1/2], got {p1}")
    d = levels
    rho = np.zeros((d * d, d * d), dtype=np.complex128)
    rho[0, 0] = 1.0 - 2.0 * p1
    i10, i01 = 1 * d + 0, 0 * d + 1
    for r in (i10, i01):
        for c in (i10, i01):
            rho[r, c] = p1
    return TwoSiteRDM(d, rho)


def ln_single_particle(p1: float) -> float:
    """Closed-form negativity of the single-walker outer-site state."""
    if not 0.0 <= p1 <= 0.5:
        raise ValueError(f"edge probability must lie in [0, 1/2], got {p1}")
    alpha = 1.0 - 4.0 * p1 + 6.0 * p1**2
    beta = 1.0 - 4.0 * p1 + 8.0 * p1**2
    root = (1.0 - 2.0 * p1) * np.sqrt(beta)
    total = (
        2.0 * p1
        + np.sqrt(max(alpha + root, 0.0) / 2.0)
        + np.sqrt(max(alpha - root, 0.0) / 2.0)
    )
    return float(np.log2(total))


def sf_gamma_sq(n_sites: int, nbar: int, k: int) -> Fraction:
    """Exact weight gamma_k^2 of the superfluid outer-pair decomposition."""
    if n_sites <= 2:
        raise ValueError("outer-pair decomposition needs more than two sites")
    total = n_sites * nbar
    if not 0 <= k <= total:
        raise ValueError(f"k must lie in 0..{total}, got {k}")
    return Fraction(
        comb(total, k) * 2**k * (n_sites - 2) ** (total - k), n_sites**total
    )


def sf_gamma(n_sites: int, nbar: int, k: int) -> float:
    """gamma_k of the superfluid ground state (positive square root)."""
    return float(np.sqrt(float(sf_gamma_sq(n_sites, nbar, k))))


def sf_gamma_extra_sq(n_sites: int, nbar: int, k: int) -> Fraction:
    """Weight (gamma'_k)^2 after adding one symmetric outer-pair particle."""
    if k == 0:
        return Fraction(0)
    total = n_sites * nbar
    if not 1 <= k <= total + 1:
        raise ValueError(f"k must lie in 0..{total + 1}, got {k}")
    return k * sf_gamma_sq(n_sites, nbar, k - 1) / (1 + 2 * nbar)


def _pair_mode_state(k: int, levels: int) -> np.ndarray:
    """|phi_k> = (1/sqrt(k!)) ((a1^dag + aM^dag)/sqrt(2))^k |0>, truncated.

    Expanded in |n_1, n_M>: amplitude sqrt(C(k, j) / 2^k) on |j, k - j>.
    Components with an occupation >= levels are dropped.
    """
    vec = np.zeros(levels**2, dtype=np.complex128)
    for j in range(k + 1):
        if j < levels and k - j < levels:
            vec[j * levels + (k - j)] = np.sqrt(comb(k, j) / 2.0**k)
    return vec


def sf_rdm(n_sites: int, nbar: int, extra: bool = False,
           levels: int | None = None) -> TwoSiteRDM:
    """Outer-site reduced state of the superfluid ground state at filling nbar.

    With extra=True, one particle created symmetrically on the outer pair is
    added, reweighting the pair-mode mixture. The occupation cutoff defaults
    to min(M*nbar + 2, 12); lost weight is reported on the result and the
    matrix is renormalized to unit trace.
    """
    if n_sites <= 2:
        raise ValueError("outer-pair decomposition needs more than two sites")
    total = n_sites * nbar + (1 if extra else 0)
    if levels is None:
        levels = min(n_sites * nbar + 2, 12)
    weight = (
        (lambda k: float(sf_gamma_extra_sq(n_sites, nbar, k)))
        if extra
        else (lambda k: float(sf_gamma_sq(n_sites, nbar, k)))
    )
    rho = np.zeros((levels**2, levels**2), dtype=np.complex128)
    kept = 0.0
    for k in range(total + 1):
        w = weight(k)
        if w == 0.0:
            continue
        vec = _pair_mode_state(k, levels)
        rho += w * np.outer(vec, vec.conj())
        kept += w * float(np.vdot(vec, vec).real)
    if kept <= 0.0:
        raise ValueError("occupation cutoff removed the entire state")
    return TwoSiteRDM(levels, rho / kept, truncated_weight=1.0 - kept)


def first_maximum(times, values, threshold: float = 1e-3):
    """Earliest local maximum of a sampled curve, quadratically refined.

    Returns (t_max, v_max), or None if no local maximum exceeds the
    threshold (which exists to skip numerical ripples near zero). Interior
    points only; a parabola through the three samples around the discrete
    maximum refines both location and value.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or len(t) < 3:
        raise ValueError("need matching time/value arrays with >= 3 samples")
    for i in range(1, len(v) - 1):
        if v[i] >= v[i - 1] and v[i] >= v[i + 1] and v[i] > threshold:
            denom = v[i - 1] - 2.0 * v[i] + v[i + 1]
            if denom == 0.0:
                return float(t[i]), float(v[i])
            shift = 0.5 * (v[i - 1] - v[i + 1]) / denom
            shift = float(np.clip(shift, -1.0, 1.0))
            dt = 0.5 * (t[i + 1] - t[i - 1])
            t_ref = t[i] + shift * dt
            v_ref = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * shift
            return float(t_ref), float(v_ref)
    return None
