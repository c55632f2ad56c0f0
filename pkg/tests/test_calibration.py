import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybrid_actuator.calibration import (
    DataKind,
    ExperimentDataset,
    IdentifiabilityError,
    fit_parameters,
    load_dataset,
    predict,
    residual_report,
    rmse,
)
from hybrid_actuator.geometry import ActuatorGeometry, inflate
from hybrid_actuator.statics import CalibratedParams, model_coefficients

TRUE = CalibratedParams(0.07, 5.0)
PRESSURES = np.arange(0.0, 62.0, 2.0)


@pytest.fixture
def geom8():
    return ActuatorGeometry(n=8)


def synthetic(geom, params=TRUE, kind="bend", pressures=PRESSURES, n=8):
    blank = ExperimentDataset(kind, [(p, 0.0) for p in pressures], "synthetic", n)
    return ExperimentDataset(kind, list(zip(pressures, predict(params, blank, geom))), "synthetic", n)


def test_round_trip_bend(geom8):
    params, report = fit_parameters(synthetic(geom8), geom8)
    assert params.mu == pytest.approx(0.07, rel=5e-3)
    assert params.m_f_max == pytest.approx(5.0, rel=5e-3)
    assert report["rmse"] < 1e-6
    assert report["n_samples"] == len(PRESSURES)
    assert set(report) >= {"mu_mpa", "mf_max_nmm", "rmse", "n_samples", "per_point"}


def test_force_only_is_unidentifiable(geom8):
    with pytest.raises(IdentifiabilityError, match="bending"):
        fit_parameters(synthetic(geom8, kind="force", pressures=np.arange(0, 131, 5.0)), geom8)


def test_round_trip_bend_plus_force(geom8):
    data = [synthetic(geom8), synthetic(geom8, kind="force", pressures=np.arange(0, 131, 5.0))]
    params, report = fit_parameters(data, geom8)
    assert params.mu == pytest.approx(0.07, rel=5e-3)
    assert params.m_f_max == pytest.approx(5.0, rel=5e-3)
    assert {r["kind"] for r in report["per_point"]} == {"bend", "force"}


def test_joint_fit_across_configurations():
    data = [synthetic(ActuatorGeometry(n=n), n=n) for n in (7, 9, 11)]
    params, report = fit_parameters(data, ActuatorGeometry())
    assert params.mu == pytest.approx(0.07, rel=5e-3)
    assert params.m_f_max == pytest.approx(5.0, rel=5e-3)
    assert report["n_samples"] == 3 * len(PRESSURES)


def test_noisy_recovery(geom8):
    clean = synthetic(geom8)
    hits = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        noisy = clean.measurements * (1 + 0.02 * rng.standard_normal(len(PRESSURES)))
        params, _ = fit_parameters(ExperimentDataset("bend", list(zip(PRESSURES, noisy)), n_segments=8), geom8)
        hits += abs(params.mu / 0.07 - 1) < 0.10
    assert hits >= 18


def test_all_zero_pressure_is_unidentifiable(geom8):
    with pytest.raises(IdentifiabilityError):
        fit_parameters(ExperimentDataset("bend", [(0.0, 0.0)] * 4, n_segments=8), geom8)


def test_all_below_threshold_is_unidentifiable(geom8):
    with pytest.raises(IdentifiabilityError):
        fit_parameters(ExperimentDataset("bend", [(5.0, 0.0), (10.0, 0.0), (15.0, 0.0)], n_segments=8), geom8)


def test_dataset_invariants():
    with pytest.raises(ValueError):
        ExperimentDataset("bend", [(0.0, 0.0), (1.0, 1.0)])
    with pytest.raises(ValueError):
        ExperimentDataset("bend", [(-1.0, 0.0), (1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(ValueError):
        ExperimentDataset("torque", [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])


def test_residuals_zero_on_perfect_data(geom8):
    assert all(abs(r["residual"]) < 1e-9 for r in residual_report(TRUE, synthetic(geom8), geom8))


def test_residuals_from_friction_shift(geom8):
    data = synthetic(geom8)
    shifted = CalibratedParams(0.07, 6.0)
    report = residual_report(shifted, data, geom8)
    k3 = model_coefficients(geom8, inflate(geom8), TRUE.material, 5.0).k3
    offset = math.degrees(7 * 1.0 / k3)
    shifted_coeffs = model_coefficients(geom8, inflate(geom8), TRUE.material, 6.0)
    for row in report:
        if row["pressure_kpa"] / 1000 > shifted_coeffs.threshold_pressure:
            assert row["residual"] == pytest.approx(offset, rel=1e-9)


def test_rmse_tracks_noise_scale(geom8):
    clean = synthetic(geom8)
    rng = np.random.default_rng(7)
    sigma = 3.0
    noisy = clean.measurements + sigma * rng.standard_normal(len(PRESSURES))
    report = residual_report(TRUE, ExperimentDataset("bend", list(zip(PRESSURES, noisy)), n_segments=8), geom8)
    assert sigma / 2 <= rmse(report) <= 2 * sigma


def test_fit_invariant_to_sample_order(geom8):
    clean = synthetic(geom8)
    rng = np.random.default_rng(3)
    noisy = list(zip(PRESSURES, clean.measurements * (1 + 0.02 * rng.standard_normal(len(PRESSURES)))))
    a, _ = fit_parameters(ExperimentDataset("bend", noisy, n_segments=8), geom8)
    b, _ = fit_parameters(ExperimentDataset("bend", noisy[::-1], n_segments=8), geom8)
    assert a.mu == pytest.approx(b.mu, rel=1e-6)
    assert a.m_f_max == pytest.approx(b.m_f_max, rel=1e-5, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(mu=st.floats(0.03, 0.2), mf=st.floats(0.0, 15.0))
def test_round_trip_property(mu, mf):
    g = ActuatorGeometry(n=8)
    params = CalibratedParams(mu, mf)
    coeffs = model_coefficients(g, inflate(g), params.material, mf)
    p_thr = coeffs.threshold_pressure * 1000
    pressures = np.linspace(0, p_thr * 2.5, 20)
    fitted, _ = fit_parameters(synthetic(g, params, pressures=pressures), g)
    assert fitted.mu == pytest.approx(mu, rel=5e-3)
    assert fitted.m_f_max == pytest.approx(mf, rel=5e-3, abs=1e-3)


def test_load_dataset(tmp_path):
    path = tmp_path / "trial1.csv"
    path.write_text("# 8-segment trial\npressure_kpa,angle_deg\n0,0\n# mid comment\n30,10\n40,60\n")
    ds = load_dataset(path, n_segments=8)
    assert ds.kind is DataKind.BEND and ds.config_label == "trial1"
    assert ds.samples == ((0.0, 0.0), (30.0, 10.0), (40.0, 60.0))


def test_load_force_dataset(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("pressure_kpa,force_n\n0,0\n100,1\n130,2\n")
    assert load_dataset(path).kind is DataKind.FORCE


@pytest.mark.parametrize("text", ["pressure,angle\n0,0\n1,1\n2,2\n", "pressure_kpa,angle_deg\n0,0,1\n1,1\n2,2\n", ""])
def test_load_dataset_rejects_malformed(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ValueError):
        load_dataset(path)
