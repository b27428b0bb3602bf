from dataclasses import replace

import numpy as np
import pytest

from ivrls.experiment import (
    estimate_from_csv,
    estimator_config,
    lambda_sweep,
    mode_label,
    run_dataset,
    run_experiment,
    write_experiment,
)
from ivrls.lti import LtiIntervalEstimator
from ivrls.simulate import REFERENCE_DRIFT_RADIUS, SimConfig, generate_lti


def small_config(**kwargs):
    base = dict(runs=3, horizon=40, seed=100, modes=(10, None), monotonic=True)
    base.update(kwargs)
    return SimConfig(**base)


def test_mode_label():
    assert mode_label(None) == "exact"
    assert mode_label(25) == "m25"


def test_run_experiment_audits_every_run_and_mode():
    config = small_config()
    result = run_experiment(config)
    assert len(result.audits) == config.runs * len(config.modes)
    assert result.all_contained
    for audit in result.audits:
        assert audit.raw_contained and audit.refined_contained
        assert audit.inconsistent_steps == 0
        assert audit.seed == config.seed + audit.run


def test_averages_are_componentwise_means():
    config = small_config(runs=2, modes=(None,))
    result = run_experiment(config, keep_traces=True)
    stacked = np.stack([result.traces[r][0].radius for r in range(2)])
    np.testing.assert_array_equal(result.average("exact").radius, stacked.mean(axis=0))
    counts = result.average("exact").inconsistent_counts
    assert counts.shape == (config.horizon,)
    assert np.all(counts == 0)


def test_parallel_matches_serial_bitwise():
    serial = run_experiment(small_config(workers=1))
    parallel = run_experiment(small_config(workers=2))
    for a, b in zip(serial.averages, parallel.averages):
        assert a.label == b.label
        np.testing.assert_array_equal(a.lower, b.lower)
        np.testing.assert_array_equal(a.upper, b.upper)
        np.testing.assert_array_equal(a.mono_lower, b.mono_lower)
        np.testing.assert_array_equal(a.point, b.point)


def test_run_dataset_matches_direct_estimator_loop():
    config = small_config(modes=(None,), monotonic=False)
    ds = generate_lti(config, seed=config.seed)
    trace = run_dataset(ds, config)[0]
    est = LtiIntervalEstimator(
        estimator_config(4, config.lam, config.p0_scale, config.prior_radius)
    )
    for i in range(ds.N):
        out = est.step(ds.X[i], ds.y[i], ds.v_low[i], ds.v_high[i])
        np.testing.assert_array_equal(trace.lower[i], out.raw.lower)
        np.testing.assert_array_equal(trace.upper[i], out.raw.upper)
        np.testing.assert_array_equal(trace.point[i], out.point)


def test_ltv_experiment_runs_and_audits():
    config = small_config(
        drift_radius=REFERENCE_DRIFT_RADIUS, lam=0.1, modes=(5, None), runs=2
    )
    result = run_experiment(config)
    assert result.all_contained
    assert {a.label for a in result.averages} == {"m5", "exact"}


def test_write_experiment_files(tmp_path):
    result = run_experiment(small_config(runs=2))
    paths = write_experiment(result, tmp_path)
    names = sorted(p.split("/")[-1] for p in paths)
    assert names == ["audit.csv", "avg_exact.csv", "avg_m10.csv"]
    audit_lines = (tmp_path / "audit.csv").read_text().splitlines()
    assert audit_lines[0] == (
        "run,seed,mode,raw_contained,refined_contained,inconsistent_steps"
    )
    assert len(audit_lines) == 1 + 2 * 2
    avg_lines = (tmp_path / "avg_exact.csv").read_text().splitlines()
    assert avg_lines[0].startswith("t,theta_hat_1")
    assert "mono_lo_1" in avg_lines[0]


def test_lambda_sweep_matches_single_experiment():
    config = small_config(modes=(None,), runs=2)
    sweep = lambda_sweep(config, [0.7])
    direct = run_experiment(replace(config, lam=0.7))
    avg = direct.average("exact")
    np.testing.assert_array_equal(
        sweep.final_width(0.7, "exact"), avg.mono_upper[-1] - avg.mono_lower[-1]
    )
    with pytest.raises(KeyError):
        sweep.final_width(0.9, "exact")


def test_estimate_from_csv_matches_library_run(tmp_path):
    config = small_config(modes=(10,))
    ds = generate_lti(config, seed=config.seed)
    in_path = tmp_path / "ds.csv"
    out_path = tmp_path / "est.csv"
    ds.to_csv(in_path)
    audit = estimate_from_csv(
        in_path, out_path, lam=config.lam, p0_scale=config.p0_scale,
        prior_radius=config.prior_radius, m=10, monotonic=True,
    )
    assert audit.raw_contained and audit.refined_contained
    # written estimates agree with an in-memory run on the same rows
    trace = run_dataset(ds, config)[0]
    lines = [l for l in out_path.read_text().splitlines() if not l.startswith("#")]
    assert len(lines) == 1 + ds.N
    last = np.array([float(c) for c in lines[-1].split(",")])
    np.testing.assert_array_equal(last[1:5], trace.point[-1])
    np.testing.assert_array_equal(last[13:17], trace.lower[-1])
    comment = out_path.read_text().splitlines()[-1]
    assert comment.startswith("# audit raw_contained=1")


def test_estimate_from_csv_scalar_hand_trace(tmp_path):
    # one-parameter stream checked against the hand-computed recursion:
    # lam=1/2, P0=1, theta0=0, rows x=(1,2,1), y=(1,1,2), no noise,
    # prior radius 5 gives theta(3)=26/27 and radius 5/27
    path = tmp_path / "scalar.csv"
    path.write_text(
        "t,y,x_1,v_lo,v_hi\n"
        "1,1,1,0,0\n"
        "2,1,2,0,0\n"
        "3,2,1,0,0\n"
    )
    out_path = tmp_path / "est.csv"
    estimate_from_csv(
        path, out_path, lam=0.5, p0_scale=1.0, prior_radius=5.0,
        m=None, monotonic=False,
    )
    rows = [l.split(",") for l in out_path.read_text().splitlines()[1:]]
    theta = [float(r[1]) for r in rows]
    radius = [float(r[3]) for r in rows]
    np.testing.assert_allclose(theta, [2 / 3, 10 / 19, 26 / 27], rtol=1e-14)
    np.testing.assert_allclose(radius, [5 / 3, 5 / 19, 5 / 27], rtol=1e-13)


def test_estimate_from_csv_without_truth_returns_none(tmp_path):
    config = small_config()
    ds = generate_lti(config, seed=1)
    ds.theta_true = None
    ds.v = None
    in_path = tmp_path / "ds.csv"
    ds.to_csv(in_path)
    audit = estimate_from_csv(
        in_path, tmp_path / "est.csv", lam=0.99, p0_scale=1000.0, prior_radius=4.0
    )
    assert audit is None


def test_estimate_from_csv_uses_ltv_when_drift_columns_present(tmp_path):
    config = small_config(
        drift_radius=REFERENCE_DRIFT_RADIUS, lam=0.1, modes=(5,), runs=1
    )
    from ivrls.simulate import generate_ltv

    ds = generate_ltv(config, seed=5)
    in_path = tmp_path / "ds.csv"
    ds.to_csv(in_path)
    audit = estimate_from_csv(
        in_path, tmp_path / "est.csv", lam=0.1, p0_scale=1000.0,
        prior_radius=4.0, m=5,
    )
    assert audit.raw_contained and audit.refined_contained


def test_sweep_csv_layout(tmp_path):
    config = small_config(modes=(None,), runs=2)
    sweep = lambda_sweep(config, [0.6, 0.9])
    path = tmp_path / "sweep.csv"
    sweep.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "lambda,mode,width_1,width_2,width_3,width_4"
    assert len(lines) == 1 + 2
    assert lines[1].startswith("0.59999999999999998,exact,")
