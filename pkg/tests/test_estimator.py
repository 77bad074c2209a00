import numpy as np
import pytest

from spinid.errors import AtypicalInstanceError, ConditioningError, DimensionError
from spinid.estimator import (
    CSV_HEADER,
    DataTrace,
    ExperimentConfig,
    ParameterizedSystem,
    default_error_scaling_spec,
    default_truncation_order,
    error_scaling_csv,
    estimate_entry,
    identify_hamiltonian,
    run_error_scaling,
    simulate_trace,
    truncation_bound,
)
from spinid.linsys import LinearSystem
from spinid.spin_models import Family, HamiltonianSpec

ROTATION = LinearSystem(
    np.array([[0.0, 1.0], [-1.0, 0.0]]), [0.0, 1.0], [1.0, 0.0]
)


def test_config_validation():
    assert ExperimentConfig(dt=0.1, n_samples=100).resolved_q == 33
    assert ExperimentConfig(dt=0.1, n_samples=10).resolved_q == 6
    assert ExperimentConfig(dt=0.1, n_samples=10, q=4).resolved_q == 4
    assert default_truncation_order(100) == 33
    with pytest.raises(DimensionError):
        ExperimentConfig(dt=0.0, n_samples=10)
    with pytest.raises(DimensionError):
        ExperimentConfig(dt=0.1, n_samples=1)
    with pytest.raises(DimensionError):
        ExperimentConfig(dt=0.1, n_samples=10, noise_sigma=-1.0)
    with pytest.raises(DimensionError):
        ExperimentConfig(dt=0.1, n_samples=10, repeats=0)
    with pytest.raises(DimensionError):
        ExperimentConfig(dt=0.1, n_samples=10, q=11)
    with pytest.raises(DimensionError):
        ExperimentConfig(dt=0.1, n_samples=10, q=0)


def test_trace_validation():
    with pytest.raises(DimensionError):
        DataTrace(values=np.zeros((2, 2)), dt=0.1, y0=0.0)
    with pytest.raises(DimensionError):
        DataTrace(values=np.zeros(3), dt=0.1, y0=0.0, noise_sigma=-0.1)
    tr = DataTrace(values=np.ones(3), dt=0.1, y0=1.0)
    with pytest.raises(ValueError):
        tr.values[0] = 2.0


def test_simulate_trace_rotation_is_sine():
    cfg = ExperimentConfig(dt=0.1, n_samples=50)
    tr = simulate_trace(ROTATION, cfg, source="rotation probe")
    p = np.arange(1, 51)
    assert np.allclose(tr.values, np.sin(p * 0.1), atol=1e-14)
    assert tr.y0 == 0.0
    assert tr.noise_sigma == 0.0
    assert tr.source == "rotation probe"


def test_simulate_trace_noise_determinism_and_mean():
    cfg = ExperimentConfig(dt=0.1, n_samples=1000, noise_sigma=0.001, seed=7)
    a = simulate_trace(ROTATION, cfg)
    b = simulate_trace(ROTATION, cfg)
    assert np.array_equal(a.values, b.values)
    # sample mean of the injected noise stays within 3 sigma / sqrt(N)
    big = ExperimentConfig(dt=0.1, n_samples=100000, noise_sigma=0.001, seed=11)
    noisy = simulate_trace(ROTATION, big)
    clean = simulate_trace(ROTATION, ExperimentConfig(dt=0.1, n_samples=100000))
    mean = float(np.mean(noisy.values - clean.values))
    assert abs(mean) < 3 * 0.001 / np.sqrt(100000)


def test_estimate_entry_sine_probe():
    cfg = ExperimentConfig(dt=0.1, n_samples=50, q=18)
    est = estimate_entry(simulate_trace(ROTATION, cfg), 18)
    assert abs(est.entry_estimate - 1.0) < 1e-9  # spec asks 1e-6; exact solve does far better
    assert est.psi_hat.shape == (18,)
    assert est.amplification == pytest.approx(527.8978524643661, rel=1e-6)
    assert est.condition == pytest.approx(14.857879867737235, rel=1e-6)
    assert est.residual_norm < 1e-12


def test_estimate_entry_zero_trace_gives_zero():
    tr = DataTrace(values=np.zeros(40), dt=0.1, y0=0.0)
    est = estimate_entry(tr, 10)
    assert est.entry_estimate == 0.0
    assert np.all(est.psi_hat == 0.0)


def test_estimate_entry_rejects_bad_order():
    tr = DataTrace(values=np.zeros(10), dt=0.1, y0=0.0)
    with pytest.raises(DimensionError):
        estimate_entry(tr, 11)
    with pytest.raises(DimensionError):
        estimate_entry(tr, 0)


def test_estimate_entry_noisy_branch_close_to_truth():
    cfg = ExperimentConfig(dt=0.1, n_samples=100, q=33, noise_sigma=0.001, seed=3)
    est = estimate_entry(simulate_trace(ROTATION, cfg), 33)
    # the spectral floor trades a ~1e-2 bias for noise robustness
    assert abs(est.entry_estimate - 1.0) < 5e-2
    assert est.amplification < 1e3
    # the floored monomial solve reports the kept-spectrum condition number
    assert est.condition > 1e10


def test_conditioning_guard_fires_on_tiny_dt():
    bad = ExperimentConfig(dt=1e-6, n_samples=40, q=15, noise_sigma=0.001, seed=0)
    with pytest.raises(ConditioningError) as exc:
        estimate_entry(simulate_trace(ROTATION, bad), 15)
    assert exc.value.cond == pytest.approx(3.571e7, rel=1e-3)
    assert "reduce q or increase dt*N" in str(exc.value)
    exact = ExperimentConfig(dt=1e-6, n_samples=40, q=15)
    with pytest.raises(ConditioningError):
        estimate_entry(simulate_trace(ROTATION, exact), 15)


def test_truncation_bound_examples():
    tb = truncation_bound(1.0, 0.01, 10, 10)
    assert tb.w == pytest.approx(10 * 1.0 * 0.01 * np.e, rel=1e-12)
    assert tb.z == 11
    assert 0.0 < tb.bound < 1e-6
    assert tb.bound == pytest.approx(2.588215610363096e-19, rel=1e-6)
    assert truncation_bound(0.0, 0.01, 10, 5).bound == 0.0
    assert truncation_bound(1.5, 0.05, 60, 21).bound == pytest.approx(
        4.722615715317669e-07, rel=1e-6
    )


def test_truncation_bound_monotone_in_q():
    bounds = [truncation_bound(1.5, 0.05, 60, q).bound for q in range(5, 26)]
    assert all(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:]))
    assert all(b > 0 for b in bounds)


def test_identify_noiseless_pins():
    spec = default_error_scaling_spec()
    expected = {
        10: 0.00023569992300714662,
        50: 8.034052666396072e-06,
        100: 3.5399456815685706e-07,
    }
    for n, rel in expected.items():
        res = identify_hamiltonian(spec, ExperimentConfig(dt=0.1, n_samples=n))
        assert res.relative_error == pytest.approx(rel, rel=1e-6)
        assert res.relative_error < 1e-4 or n == 10
        assert len(res.theta_hat) == spec.n
        signs = [np.sign(h) == np.sign(t) for h, t in zip(res.theta_hat, spec.theta)]
        assert all(signs)
    res = identify_hamiltonian(spec, ExperimentConfig(dt=0.1, n_samples=100))
    assert res.norm_source == "true"
    assert set(res.per_entry) == {(0, 1), (1, 2), (2, 3), (3, 4)}
    for report in res.per_entry.values():
        assert report.bound.q == 33
        assert report.amplification < 1e6


def test_identify_atypical_zero_parameter():
    spec = HamiltonianSpec(Family.EXCHANGE_NO_FIELD, 2, (1.0, 0.0))
    with pytest.raises(AtypicalInstanceError) as exc:
        identify_hamiltonian(spec, ExperimentConfig(dt=0.1, n_samples=50))
    assert "parameter 2" in str(exc.value)


def test_identify_conditioning_names_entry():
    spec = default_error_scaling_spec()
    cfg = ExperimentConfig(dt=1e-6, n_samples=40, q=15, noise_sigma=0.001)
    with pytest.raises(ConditioningError) as exc:
        identify_hamiltonian(spec, cfg)
    assert "entry (0,1)" in str(exc.value)


def test_identify_parameterized_system():
    w = 0.73
    A = np.array([[0.0, w], [-w, 0.0]])
    model = ParameterizedSystem(A, {1: [(0, 1, 1.0), (1, 0, -1.0)]})
    res = identify_hamiltonian(model, ExperimentConfig(dt=0.1, n_samples=60))
    assert res.theta_hat[0] == pytest.approx(w, abs=1e-8)
    with pytest.raises(DimensionError):
        ParameterizedSystem(np.zeros((2, 3)), {1: [(0, 1, 1.0)]})
    with pytest.raises(DimensionError):
        ParameterizedSystem(A, {1: []})
    with pytest.raises(DimensionError):
        ParameterizedSystem(A, {1: [(0, 5, 1.0)]})
    with pytest.raises(DimensionError):
        ParameterizedSystem(A, {1: [(0, 1, 0.0)]})
    with pytest.raises(DimensionError):
        identify_hamiltonian("not a model", ExperimentConfig(dt=0.1, n_samples=10))


def test_identify_estimates_ignore_unreachable_blocks():
    # the probed trace lives entirely in the reachable block, so junk
    # coordinates outside it must not move the estimate beyond roundoff
    w = 1.17
    rng = np.random.default_rng(2)
    locs = {1: [(0, 1, 1.0), (1, 0, -1.0)]}
    cfg = ExperimentConfig(dt=0.1, n_samples=60)
    results = []
    for _ in range(2):
        A = np.zeros((5, 5))
        A[0, 1], A[1, 0] = w, -w
        A[:2, 2:] = rng.normal(size=(2, 3))
        A[2:, 2:] = rng.normal(size=(3, 3))
        res = identify_hamiltonian(ParameterizedSystem(A, locs), cfg)
        results.append(res.theta_hat[0])
    assert abs(results[0] - results[1]) < 1e-10
    assert results[0] == pytest.approx(w, abs=1e-8)


def test_error_scaling_degenerate_monte_carlo():
    spec = default_error_scaling_spec()
    pts = run_error_scaling(spec, (10, 100), repeats=3, seed=5, noise_sigma=0.0)
    assert pts[0].std_rel_error == 0.0 and pts[1].std_rel_error == 0.0
    assert pts[0].mean_rel_error == pytest.approx(0.00023569992300714662, rel=1e-6)
    assert pts[1].mean_rel_error == pytest.approx(3.5399456815685706e-07, rel=1e-6)
    assert pts[0].repeats == 3 and pts[0].seed == 5


def test_error_scaling_csv_deterministic():
    spec = default_error_scaling_spec()
    pts = run_error_scaling(spec, (10, 20), repeats=2, seed=9)
    again = run_error_scaling(spec, (10, 20), repeats=2, seed=9)
    text = error_scaling_csv(pts)
    assert text == error_scaling_csv(again)
    lines = text.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    assert lines[1].startswith("10,") and lines[2].startswith("20,")
    assert all(p.mean_rel_error > 0 for p in pts)
