"""Occupation-number bases restricted to a fixed particle-number sector.

A basis here is the set of all site-occupation tuples (n_1, ..., n_M) with
sum(n_i) = N and n_i <= n_max, ordered lexicographically decreasing, with
O(1) rank lookup via a packed-key table.
"""

from __future__ import annotations

import numpy as np


class InfeasibleSectorError(ValueError):
    """Raised when the requested sector contains no configurations."""


def sector_dimension(n_sites: int, n_particles: int, n_max: int) -> int:
    """Count configurations without enumerating them.

    Computes the coefficient of x**n_particles in
    (1 + x + ... + x**n_max)**n_sites by polynomial convolution; used by
    feasibility estimators before any allocation happens.
    """
    if n_sites < 1 or n_particles < 0 or n_max < 1:
        raise ValueError("need n_sites >= 1, n_particles >= 0, n_max >= 1")
    poly = np.zeros(n_particles + 1, dtype=object)
    poly[0] = 1
    site = np.zeros(n_particles + 1, dtype=object)
    site[: n_max + 1] = 1
    for _ in range(n_sites):
        poly = np.convolve(poly, site)[: n_particles + 1]
    return int(poly[n_particles])


def _generate(n_sites: int, n_particles: int, n_max: int):
    """Yield occupation tuples in lexicographically decreasing order."""
    if n_sites == 1:
        if n_particles <= n_max:
            yield (n_particles,)
        return
    lo = max(0, n_particles - (n_sites - 1) * n_max)
    for first in range(min(n_particles, n_max), lo - 1, -1):
        for rest in _generate(n_sites - 1, n_particles - first, n_max):
            yield (first,) + rest


class OccupationBasis:
    """Ordered basis of bosonic occupation configurations for one sector.

    Attributes
    ----------
    n_sites, n_particles, n_max : int
        Sector parameters (M sites, N particles, per-site cap).
    configs : ndarray, shape (dim, n_sites)
        Occupation tuples, one per row, lexicographically decreasing.
    """

    def __init__(self, n_sites: int, n_particles: int, n_max: int):
        if n_sites < 1:
            raise ValueError(f"need at least one site, got {n_sites}")
        if n_max < 1:
            raise ValueError(f"need n_max >= 1, got {n_max}")
        if n_particles < 0 or n_particles > n_sites * n_max:
            raise InfeasibleSectorError(
                f"no configurations with N={n_particles} on "
                f"{n_sites} sites capped at {n_max} per site"
            )
        self.n_sites = n_sites
        self.n_particles = n_particles
        self.n_max = n_max
        self.configs = np.array(
            list(_generate(n_sites, n_particles, n_max)), dtype=np.int64
        )
        # packed base-(n_max+1) keys give an exact, collision-free lookup
        self._radix = (n_max + 1) ** np.arange(n_sites - 1, -1, -1, dtype=np.int64)
        keys = self.configs @ self._radix
        self._index = {int(k): i for i, k in enumerate(keys)}

    @property
    def dim(self) -> int:
        return self.configs.shape[0]

    def __len__(self) -> int:
        return self.dim

    def config(self, k: int):
        """Occupation tuple at ordinal k."""
        return tuple(int(n) for n in self.configs[k])

    def rank(self, config) -> int:
        """Ordinal of a configuration; inverse of config()."""
        occ = np.asarray(config, dtype=np.int64)
        if occ.shape != (self.n_sites,):
            raise ValueError(f"expected {self.n_sites} occupations, got {occ.shape}")
        key = int(occ @ self._radix)
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"configuration {tuple(occ)} not in basis") from None

    def pack_columns(self, columns) -> np.ndarray:
        """Packed keys for the given site columns only (0-based).

        Used to group configurations by their restriction to a subset of
        sites, e.g. by the environment of a two-site reduced state.
        """
        cols = np.asarray(columns, dtype=np.int64)
        radix = (self.n_max + 1) ** np.arange(len(cols) - 1, -1, -1, dtype=np.int64)
        if len(cols) == 0:
            return np.zeros(self.dim, dtype=np.int64)
        return self.configs[:, cols] @ radix

    def __repr__(self):
        return (
            f"OccupationBasis(M={self.n_sites}, N={self.n_particles}, "
            f"n_max={self.n_max}, dim={self.dim})"
        )


def enumerate_basis(n_sites: int, n_particles: int, n_max: int) -> OccupationBasis:
    """Build the occupation basis for the (n_sites, n_particles, n_max) sector."""
    return OccupationBasis(n_sites, n_particles, n_max)


def config_rank(basis: OccupationBasis, config) -> int:
    """Ordinal of `config` within `basis`; raises ValueError if absent."""
    return basis.rank(config)
