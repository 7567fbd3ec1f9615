import numpy as np
import pytest

from bhwalk.ctqw import walk_amplitudes
from bhwalk.entanglement import first_maximum
from bhwalk.experiments import (
    InfeasibleScenarioError,
    TimeSeries,
    check_feasible,
    mott_effective_state,
    run_cotunneling,
    run_ctqw_figure,
    run_ctrw_reference,
    run_ground_state,
    run_ln_vs_u_sweep,
    run_mott_transport,
    run_sdq_scenario,
    run_validation,
    time_grid,
)
from bhwalk.fock import enumerate_basis


def test_time_series_validation():
    with pytest.raises(ValueError):
        TimeSeries("x", "t", [0.0, 0.0, 1.0], {})
    with pytest.raises(ValueError):
        TimeSeries("x", "t", [0.0, 1.0], {"a": np.zeros(3)})


def test_time_grid():
    grid = time_grid(1.0, 0.25)
    np.testing.assert_allclose(grid, [0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        time_grid(-1.0, 0.1)


def test_feasibility_estimator_rejects_before_allocation():
    with pytest.raises(InfeasibleScenarioError):
        check_feasible(41, 41, 5)  # far beyond the dimension cap
    with pytest.raises(InfeasibleScenarioError):
        check_feasible(3, 10, 2)  # empty sector
    assert check_feasible(9, 10, 3) == enumerate_basis(9, 10, 3).dim


def test_ctqw_figure_initial_delta_and_symmetry():
    series = run_ctqw_figure(n_sites=9, jt_max=2.0, dt=0.5)
    assert series.columns["p_5"][0] == pytest.approx(1.0)
    for i in range(9):
        if i != 4:
            assert series.columns[f"p_{i + 1}"][0] == pytest.approx(0.0, abs=1e-12)
    # mirror symmetry at every sampled time
    for i in range(9):
        np.testing.assert_allclose(series.columns[f"p_{i + 1}"],
                                   series.columns[f"p_{9 - i}"], atol=1e-12)


def test_ctrw_reference_conserves_probability():
    series = run_ctrw_reference(n_sites=7, jt_max=2.0, dt=0.5)
    total = sum(series.columns[f"p_{i + 1}"] for i in range(7))
    np.testing.assert_allclose(total, 1.0, atol=1e-10)


def test_mott_transport_conservation_and_columns():
    series = run_mott_transport(5, 1, 50.0, 0.6, dt=0.2, n_max=3)
    total = sum(series.columns[f"n_{i + 1}"] for i in range(5))
    np.testing.assert_allclose(total, 6.0, atol=1e-9)
    assert "ln_pair_1" in series.columns and "ln_pair_2" in series.columns
    assert np.all(series.columns["ln_pair_2"] >= 0.0)
    # the injected defect starts at the middle site; the U/J=50 ground
    # state is close to, but not exactly, the filled product state
    assert series.columns["n_3"][0] == pytest.approx(2.0, abs=0.01)


def test_mott_transport_reproducible():
    a = run_mott_transport(5, 1, 30.0, 0.4, dt=0.2, n_max=3)
    b = run_mott_transport(5, 1, 30.0, 0.4, dt=0.2, n_max=3)
    for key in a.columns:
        np.testing.assert_array_equal(a.columns[key], b.columns[key])


def test_effective_model_tracks_deep_mott():
    basis = enumerate_basis(5, 6, 3)
    eff = mott_effective_state(basis, 1, 1.0, 0.4)
    assert eff.norm == pytest.approx(1.0, abs=1e-12)
    walk = walk_amplitudes(5, 1.0, 0.8)  # defect speed doubled at nbar=1
    cfg = np.array([1, 1, 2, 1, 1])
    assert abs(eff.amplitudes[basis.rank(cfg)]) == pytest.approx(
        abs(walk.amplitudes[2]), abs=1e-12
    )


def test_single_particle_sweep_u_independent():
    # one particle never collides: the outer-site entanglement cannot
    # depend on the interaction strength
    peaks = []
    for u in (0.0, 8.0):
        series = run_mott_transport(5, 0, u, 2.5, dt=0.05, n_max=1)
        outer = series.columns["ln_pair_2"]
        peaks.append(first_maximum(series.index, outer))
    assert peaks[0] == pytest.approx(peaks[1], abs=1e-9)


def test_sweep_table_shape():
    series = run_ln_vs_u_sweep(5, 1, (10.0, 40.0), t_max=1.6, dt=0.05, n_max=3)
    assert list(series.index) == [10.0, 40.0]
    assert series.columns["ln_first_max"].shape == (2,)
    assert np.all(series.columns["ln_first_max"] > 0)


def test_cotunneling_free_matches_two_walkers():
    series = run_cotunneling(7, 2, 0.0, t_max=1.5, dt=0.5)
    for k, t in enumerate(series.index):
        p = walk_amplitudes(7, 1.0, t).probabilities()
        occ = np.array([series.columns[f"n_{i + 1}"][k] for i in range(7)])
        np.testing.assert_allclose(occ, 2 * p, atol=1e-9)


def test_cotunneling_suppression():
    free = run_cotunneling(7, 2, 0.0, t_max=2.0, dt=0.5)
    strong = run_cotunneling(7, 2, 40.0, t_max=2.0, dt=0.5)
    assert free.columns["spread"][-1] > 5 * strong.columns["spread"][-1]


def test_sdq_scenario_fig5_initial_values():
    series = run_sdq_scenario("fig5", 0.0, t_max=1.0, dt=0.25)
    assert series.columns["p"][0] == pytest.approx(1.0, abs=1e-12)
    assert series.columns["ln"][0] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(
        [series.columns[f"pop_{s}"][0] for s in ("00", "01", "10", "11")],
        [0, 0, 1, 0], atol=1e-12,
    )


def test_sdq_scenario_unknown_variant():
    with pytest.raises(ValueError):
        run_sdq_scenario("fig9")


def test_sdq_mott_background_projects_early():
    series = run_sdq_scenario("fig5", 40.0, t_max=0.3, dt=0.1, nbar=1)
    assert np.all(series.columns["p"] > 0.9)


def test_ground_state_runner():
    rec = run_ground_state(5, 1, 100.0, n_max=3)
    assert rec["ln_outer"] == pytest.approx(0.0, abs=1e-6)
    np.testing.assert_allclose(rec["occupations"], 1.0, atol=0.01)
    assert rec["energy"] < 0


def test_validation_suite_green():
    results = run_validation()
    failures = [(n, d) for n, ok, d in results if not ok]
    assert not failures, failures
