"""Scenario runners assembling the library into the reproducible experiments:
single-walker spreading, defect transport on Mott backgrounds, the
entanglement-vs-interaction sweep, co-tunneling, and the delocalized-qubit
protocols."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import ctqw, entanglement, sdq
from .fock import InfeasibleSectorError, enumerate_basis, sector_dimension
from .operators import BHParams, build_hamiltonian, create_particle
from .solve import StateVector, ctrw_distribution, evolve, ground_state

#: largest sector dimension a scenario may allocate
DIM_CAP = 5_000_000

FIRST_MAX_THRESHOLD = 1e-3


class InfeasibleScenarioError(RuntimeError):
    """Scenario rejected before allocation: sector dimension over budget."""

    def __init__(self, msg, dim=None):
        super().__init__(msg)
        self.dim = dim


@dataclass
class TimeSeries:
    """Named columns over a strictly increasing index (time or sweep value)."""

    name: str
    index_name: str
    index: np.ndarray
    columns: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = np.asarray(self.index, dtype=float)
        if np.any(np.diff(self.index) <= 0):
            raise ValueError("index must be strictly increasing")
        for key, col in self.columns.items():
            col = np.asarray(col)
            if col.shape != self.index.shape:
                raise ValueError(f"column {key} length does not match index")
            self.columns[key] = col

    def header(self) -> list[str]:
        return [self.index_name, *self.columns.keys()]

    def rows(self):
        cols = list(self.columns.values())
        for i, x in enumerate(self.index):
            yield [float(x)] + [float(c[i]) for c in cols]


def check_feasible(n_sites: int, n_particles: int, n_max: int,
                   cap: int = DIM_CAP) -> int:
    """Sector dimension, or InfeasibleScenarioError if it exceeds the cap."""
    try:
        dim = sector_dimension(n_sites, n_particles, n_max)
    except ValueError as exc:
        raise InfeasibleScenarioError(str(exc)) from exc
    if dim == 0:
        raise InfeasibleScenarioError(
            f"sector (M={n_sites}, N={n_particles}, n_max={n_max}) is empty"
        )
    if dim > cap:
        raise InfeasibleScenarioError(
            f"sector dimension {dim} exceeds the configured cap {cap}", dim=dim
        )
    return dim


def time_grid(t_max: float, dt: float = 0.05) -> np.ndarray:
    if t_max <= 0 or dt <= 0:
        raise ValueError("need positive horizon and step")
    n = int(round(t_max / dt))
    return np.linspace(0.0, n * dt, n + 1)


def _trajectory(H, psi0: StateVector, times: np.ndarray, tol: float = 1e-10):
    """Yield (t, psi(t)) along a grid, evolving incrementally."""
    psi = psi0.copy()
    prev = times[0]
    if prev != 0.0:
        psi = evolve(H, psi, prev, tol=tol)
    yield prev, psi
    for t in times[1:]:
        psi = evolve(H, psi, t - prev, tol=tol)
        prev = t
        yield t, psi


def run_ctqw_figure(n_sites: int = 41, jt_max: float = 10.0, dt: float = 0.05,
                    J: float = 1.0) -> TimeSeries:
    """Single-walker probability map |c_i(t)|^2 over an odd-length chain."""
    times = time_grid(jt_max, dt)
    probs = np.empty((len(times), n_sites))
    for k, t in enumerate(times):
        probs[k] = ctqw.walk_amplitudes(n_sites, J, t).probabilities()
    columns = {f"p_{i + 1}": probs[:, i] for i in range(n_sites)}
    columns["spread"] = np.array([ctqw.spread(p) for p in probs])
    return TimeSeries("ctqw", "t", times, columns,
                      meta={"n_sites": n_sites, "J": J})


def run_ctrw_reference(n_sites: int = 41, jt_max: float = 10.0,
                       dt: float = 0.05, J: float = 1.0) -> TimeSeries:
    """Classical-walk counterpart of run_ctqw_figure (diffusive baseline)."""
    times = time_grid(jt_max, dt)
    probs = np.empty((len(times), n_sites))
    for k, t in enumerate(times):
        probs[k] = ctrw_distribution(n_sites, J, t).probabilities
    columns = {f"p_{i + 1}": probs[:, i] for i in range(n_sites)}
    columns["spread"] = np.array([ctqw.spread(p) for p in probs])
    return TimeSeries("ctrw", "t", times, columns,
                      meta={"n_sites": n_sites, "J": J})


def _mott_defect_initial(n_sites: int, nbar: int, u_over_j: float, n_max: int,
                         gs_tol: float = 1e-10):
    """Ground state of the filled sector plus one particle at the middle."""
    if n_sites % 2 == 0:
        raise ValueError("defect transport uses an odd number of sites")
    params = BHParams(J=1.0, U=u_over_j)
    mid = (n_sites + 1) // 2
    n_fill = n_sites * nbar
    check_feasible(n_sites, n_fill + 1, n_max)
    basis_fill = enumerate_basis(n_sites, n_fill, n_max)
    basis_plus = enumerate_basis(n_sites, n_fill + 1, n_max)
    H_fill = build_hamiltonian(basis_fill, params)
    energy, gs = ground_state(H_fill, tol=gs_tol)
    psi0, factor = create_particle(basis_fill, basis_plus, mid, gs)
    H = build_hamiltonian(basis_plus, params)
    return H, psi0, {"gs_energy": energy, "creation_norm": factor, "mid": mid}


def run_mott_transport(n_sites: int, nbar: int, u_over_j: float,
                       t_max: float, dt: float = 0.05,
                       n_max: int = 5, tol: float = 1e-10) -> TimeSeries:
    """Defect propagation on an interacting background.

    Records site occupations and the entanglement of the mirror-symmetric
    site pairs (mid - k, mid + k); the outermost pair is (1, M).
    """
    H, psi0, info = _mott_defect_initial(n_sites, nbar, u_over_j, n_max)
    mid = info["mid"]
    times = time_grid(t_max, dt)
    n_cols = np.empty((len(times), n_sites))
    k_max = (n_sites - 1) // 2
    ln_cols = np.empty((len(times), k_max))
    for i, (t, psi) in enumerate(_trajectory(H, psi0, times, tol=tol)):
        n_cols[i] = psi.mean_occupations()
        for k in range(1, k_max + 1):
            rho = entanglement.reduce_two_sites(psi, mid - k, mid + k)
            ln_cols[i, k - 1] = entanglement.log_negativity(rho)
    columns = {f"n_{i + 1}": n_cols[:, i] for i in range(n_sites)}
    for k in range(1, k_max + 1):
        columns[f"ln_pair_{k}"] = ln_cols[:, k - 1]
    return TimeSeries("transport", "t", times, columns,
                      meta={"n_sites": n_sites, "nbar": nbar,
                            "u_over_j": u_over_j, "n_max": n_max, **info})


def mott_effective_state(basis, nbar: int, J: float, t: float) -> StateVector:
    """Effective-model trajectory of a defect on a unit-filled background.

    The defect hops (nbar + 1) times faster than a bare walker, so the
    predicted state is sum_i c_i((nbar + 1) t) |i_nbar>, with |i_nbar> the
    filled product configuration plus one particle at site i.
    """
    M = basis.n_sites
    walk = ctqw.walk_amplitudes(M, J, (nbar + 1) * t)
    amps = np.zeros(basis.dim, dtype=np.complex128)
    for i in range(M):
        config = np.full(M, nbar, dtype=np.int64)
        config[i] += 1
        amps[basis.rank(config)] = walk.amplitudes[i]
    return StateVector(basis, amps)


def run_ln_vs_u_sweep(n_sites: int = 9, nbar: int = 1,
                      u_values=(6.0, 10.0, 15.0, 25.0, 40.0),
                      t_max: float = 3.0, dt: float = 0.05,
                      n_max: int = 3, tol: float = 1e-9) -> TimeSeries:
    """First maximum of the outer-site entanglement versus interaction.

    Desk-scale stand-in for the long-chain sweep: reduced chain length,
    exact sector evolution. Returns rows (U/J, t_first_max, ln_first_max).
    """
    u_values = sorted(float(u) for u in u_values)
    t_first = []
    ln_first = []
    for u in u_values:
        series = run_mott_transport(n_sites, nbar, u, t_max, dt=dt,
                                    n_max=n_max, tol=tol)
        outer = series.columns[f"ln_pair_{(n_sites - 1) // 2}"]
        peak = entanglement.first_maximum(series.index, outer,
                                          threshold=FIRST_MAX_THRESHOLD)
        if peak is None:
            raise RuntimeError(
                f"no outer-site entanglement maximum below t={t_max} at U/J={u}"
            )
        t_first.append(peak[0])
        ln_first.append(peak[1])
    return TimeSeries(
        "ln_sweep", "u_over_j", np.array(u_values),
        {"t_first_max": np.array(t_first), "ln_first_max": np.array(ln_first)},
        meta={"n_sites": n_sites, "nbar": nbar, "n_max": n_max,
              "t_max": t_max, "dt": dt},
    )


def run_cotunneling(n_sites: int = 7, n_particles: int = 2,
                    u_over_j: float = 40.0, t_max: float = 40.0,
                    dt: float = 0.1, n_max: int | None = None,
                    tol: float = 1e-10) -> TimeSeries:
    """Cloud of N particles released from the middle site.

    For strong repulsion the particles move as a bound composite with a
    second-order pair-hopping rate, so the cloud spreads far slower than
    free walkers.
    """
    if n_sites % 2 == 0:
        raise ValueError("release scenarios use an odd number of sites")
    if n_max is None:
        n_max = n_particles
    check_feasible(n_sites, n_particles, n_max)
    basis = enumerate_basis(n_sites, n_particles, n_max)
    H = build_hamiltonian(basis, BHParams(J=1.0, U=u_over_j))
    mid = (n_sites + 1) // 2
    config = np.zeros(n_sites, dtype=np.int64)
    config[mid - 1] = n_particles
    psi0 = StateVector.from_config(basis, config)
    times = time_grid(t_max, dt)
    n_cols = np.empty((len(times), n_sites))
    spreads = np.empty(len(times))
    for i, (t, psi) in enumerate(_trajectory(H, psi0, times, tol=tol)):
        n_cols[i] = psi.mean_occupations()
        spreads[i] = ctqw.spread(n_cols[i] / n_particles)
    columns = {f"n_{i + 1}": n_cols[:, i] for i in range(n_sites)}
    columns["spread"] = spreads
    return TimeSeries("cotunnel", "t", times, columns,
                      meta={"n_sites": n_sites, "n_particles": n_particles,
                            "u_over_j": u_over_j, "n_max": n_max})


#: predefined delocalized-qubit scenarios: chain length, launch sites,
#: qubit pairs. The long chain launches from the two central sites.
SDQ_VARIANTS = {
    "fig4": {"n_sites": 24, "start": (12, 13), "pair_a": (1, 2), "pair_b": (23, 24)},
    "fig5": {"n_sites": 4, "start": (2, 3), "pair_a": (1, 2), "pair_b": (3, 4)},
}


def run_sdq_scenario(variant: str = "fig5", u_over_j: float = 0.0,
                     t_max: float = 8.0, dt: float = 0.05,
                     nbar: int = 0, tol: float = 1e-10) -> TimeSeries:
    """Two extra particles launched toward delocalized qubits at the ends.

    Tracks site occupations, projection probability p, the conditional
    two-qubit entanglement (NaN while p is below threshold), their product,
    and the normalized logical populations. With nbar > 0 the same protocol
    runs on a filled product background.
    """
    if variant not in SDQ_VARIANTS:
        raise ValueError(f"unknown scenario {variant!r}; options {sorted(SDQ_VARIANTS)}")
    cfg = SDQ_VARIANTS[variant]
    M = cfg["n_sites"]
    n_max = nbar + 2
    n_total = M * nbar + 2
    check_feasible(M, n_total, n_max)
    basis = enumerate_basis(M, n_total, n_max)
    H = build_hamiltonian(basis, BHParams(J=1.0, U=u_over_j))
    config = np.full(M, nbar, dtype=np.int64)
    for s in cfg["start"]:
        config[s - 1] += 1
    psi0 = StateVector.from_config(basis, config)
    definition = sdq.SDQDefinition(cfg["pair_a"], cfg["pair_b"], nbar=nbar)
    times = time_grid(t_max, dt)
    n_cols = np.empty((len(times), M))
    p_col = np.empty(len(times))
    ln_col = np.empty(len(times))
    pops = np.empty((len(times), 4))
    for i, (t, psi) in enumerate(_trajectory(H, psi0, times, tol=tol)):
        n_cols[i] = psi.mean_occupations()
        state = sdq.sdq_project(psi, definition)
        p_col[i] = state.p
        pops[i] = state.populations()
        try:
            _, ln_col[i] = sdq.sdq_entanglement(state)
        except sdq.ProjectionFailedError:
            ln_col[i] = np.nan
    columns = {f"n_{i + 1}": n_cols[:, i] for i in range(M)}
    columns["p"] = p_col
    columns["ln"] = ln_col
    columns["p_ln"] = p_col * ln_col
    for j, label in enumerate(("00", "01", "10", "11")):
        columns[f"pop_{label}"] = pops[:, j]
    return TimeSeries("sdq", "t", times, columns,
                      meta={"variant": variant, "u_over_j": u_over_j,
                            "nbar": nbar, **cfg})


def run_ground_state(n_sites: int, nbar: int, u_over_j: float,
                     n_max: int = 5, tol: float = 1e-10) -> dict:
    """Ground state of the filled sector plus outer-site diagnostics."""
    n_fill = n_sites * nbar
    dim = check_feasible(n_sites, n_fill, n_max) if n_fill else 1
    basis = enumerate_basis(n_sites, n_fill, n_max)
    H = build_hamiltonian(basis, BHParams(J=1.0, U=u_over_j))
    energy, gs = ground_state(H, tol=tol)
    rho = entanglement.reduce_two_sites(gs, 1, n_sites)
    return {
        "n_sites": n_sites,
        "nbar": nbar,
        "u_over_j": u_over_j,
        "n_max": n_max,
        "dim": dim,
        "energy": energy,
        "occupations": [float(n) for n in gs.mean_occupations()],
        "ln_outer": entanglement.log_negativity(rho),
        "purity_outer": rho.purity(),
    }


# ---------------------------------------------------------------------------
# built-in oracle cross-checks (the `validate` subcommand)

def _check(name, fn):
    try:
        detail = fn()
        return (name, True, detail or "ok")
    except Exception as exc:  # noqa: BLE001 - report, don't crash the suite
        return (name, False, f"{type(exc).__name__}: {exc}")


def run_validation():
    """Structural invariant suite; returns a list of (name, passed, detail)."""
    results = []

    def basis_roundtrip():
        for M, N, n_max in [(4, 4, 2), (5, 3, 3), (6, 6, 2)]:
            basis = enumerate_basis(M, N, n_max)
            brute = sum(
                1 for occ in itertools.product(range(n_max + 1), repeat=M)
                if sum(occ) == N
            )
            assert basis.dim == brute, f"dim {basis.dim} != brute {brute}"
            for k in range(basis.dim):
                assert basis.rank(basis.config(k)) == k
        return "rank/unrank and brute-force counts agree"

    def hermiticity():
        basis = enumerate_basis(6, 6, 3)
        H = build_hamiltonian(basis, BHParams(J=1.0, U=7.3))
        defect = H.hermiticity_defect()
        assert defect == 0.0, f"hermiticity defect {defect}"
        return "Hamiltonian exactly Hermitian"

    def conservation():
        basis = enumerate_basis(5, 5, 3)
        H = build_hamiltonian(basis, BHParams(J=1.0, U=4.0))
        rng = np.random.default_rng(7)
        amps = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        psi = StateVector(basis, amps).normalized()
        e0 = H.expectation(psi)
        for t in (0.7, 1.9):
            phi = evolve(H, psi, t, tol=1e-11)
            assert abs(phi.norm - 1.0) < 1e-9, f"norm drift {phi.norm - 1.0}"
            assert abs(H.expectation(phi) - e0) < 1e-9, "energy drift"
            n_tot = phi.mean_occupations().sum()
            assert abs(n_tot - basis.n_particles) < 1e-9, "particle drift"
        return "norm, energy, particle number conserved to 1e-9"

    def walk_oracle():
        basis = enumerate_basis(11, 1, 1)
        H = build_hamiltonian(basis, BHParams(J=1.0))
        psi0 = StateVector.from_config(basis, [0] * 5 + [1] + [0] * 5)
        for t in (1.3, 4.2):
            num = evolve(H, psi0, t, tol=1e-12)
            ana = ctqw.walk_amplitudes(11, 1.0, t).amplitudes
            err = np.linalg.norm(num.amplitudes - ana)
            assert err < 1e-10, f"walk mismatch {err:.2e} at t={t}"
        return "closed-form walk matches Krylov evolution to 1e-10"

    def rdm_structure():
        basis = enumerate_basis(5, 3, 2)
        H = build_hamiltonian(basis, BHParams(J=1.0, U=3.0))
        _, gs = ground_state(H)
        psi = evolve(H, gs, 0.9, tol=1e-11)
        rho = entanglement.reduce_two_sites(psi, 1, 5)
        rho.check()
        assert rho.block_defect() < 1e-12, "particle-number blocks mix"
        pt_a = entanglement.partial_transpose(rho.matrix, (rho.levels,) * 2, 0)
        pt_b = entanglement.partial_transpose(rho.matrix, (rho.levels,) * 2, 1)
        ev_a = np.sort(np.linalg.eigvalsh(pt_a))
        ev_b = np.sort(np.linalg.eigvalsh(pt_b))
        assert np.max(np.abs(ev_a - ev_b)) < 1e-10, "transpose side matters"
        return "RDM Hermitian/PSD/unit-trace, block structure, side invariance"

    def ln_closed_form():
        for p1 in np.linspace(0.0, 0.5, 41):
            closed = entanglement.ln_single_particle(p1)
            direct = entanglement.log_negativity(
                entanglement.single_particle_rdm(p1, levels=3)
            )
            assert abs(closed - direct) < 1e-12, f"mismatch at p1={p1}"
        return "closed-form negativity matches explicit partial transpose"

    def sdq_structure():
        series = run_sdq_scenario("fig5", u_over_j=0.0, t_max=1.0, dt=0.25)
        p = series.columns["p"]
        assert np.all(p <= 1.0 + 1e-12) and np.all(p >= -1e-12), "p outside [0,1]"
        assert abs(p[0] - 1.0) < 1e-12 and abs(series.columns["ln"][0]) < 1e-12
        return "delocalized-qubit projection PSD with p in [0, 1]"

    results.append(_check("basis round-trip", basis_roundtrip))
    results.append(_check("hamiltonian hermiticity", hermiticity))
    results.append(_check("conservation laws", conservation))
    results.append(_check("walk closed form vs numeric", walk_oracle))
    results.append(_check("reduced-state structure", rdm_structure))
    results.append(_check("negativity closed form", ln_closed_form))
    results.append(_check("delocalized-qubit projection", sdq_structure))
    return results
