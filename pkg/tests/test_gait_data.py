"""CSV ingestion, velocity estimation, resampling, synthetic generation."""

import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impedfit import presets
from impedfit.gait_data import (
    GaitCycleData,
    GaitDataError,
    InvalidCellError,
    MissingColumnError,
    NonMonotonePhaseError,
    SyntheticSpec,
    TooFewRowsError,
    estimate_velocity,
    load_gait_csv,
    resample,
    synthesize,
)
from impedfit.impedance import torque_trajectory
from helpers import random_params


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


# ---------------------------------------------------------------- loading

def test_bundled_ankle_dataset(ankle_data):
    d = ankle_data
    assert d.joint_label == "ankle"
    assert d.n_samples >= 2
    assert d.phase[0] == 0.0 and d.phase[-1] == 1.0
    assert np.all(np.diff(d.phase) > 0)
    for channel in (d.angle, d.velocity, d.torque):
        assert channel.size == d.n_samples
        assert np.all(np.isfinite(channel))


def test_bundled_knee_dataset(knee_data):
    assert knee_data.joint_label == "knee"
    assert knee_data.phase[0] == 0.0 and knee_data.phase[-1] == 1.0


def test_percent_phase_with_schema(tmp_path):
    path = tmp_path / "pct.csv"
    pct = np.arange(101)
    ang = np.sin(2 * np.pi * pct / 100)
    vel = 2 * np.pi * np.cos(2 * np.pi * pct / 100)
    trq = np.linspace(-1, 1, 101) ** 2
    write_csv(path, ["pct", "ang", "vel", "trq"], zip(pct, ang, vel, trq))
    d = load_gait_csv(path, schema={"phase": "pct", "angle": "ang",
                                    "velocity": "vel", "torque": "trq"})
    assert d.n_samples == 101
    assert d.phase[0] == 0.0 and d.phase[-1] == 1.0
    np.testing.assert_allclose(d.phase, pct / 100.0, atol=1e-15)
    np.testing.assert_array_equal(d.velocity, vel)


def test_velocity_derived_when_absent(tmp_path):
    path = tmp_path / "novel.csv"
    t = np.linspace(0, 1, 51)
    write_csv(path, ["phase", "angle", "torque"],
              zip(t, 0.5 * t, np.zeros_like(t)))
    d = load_gait_csv(path)
    np.testing.assert_allclose(d.velocity, 0.5, atol=1e-12)


def test_non_monotone_phase_error(tmp_path):
    path = tmp_path / "dup.csv"
    write_csv(path, ["phase", "angle", "torque"],
              [(0, 0.1, 0.2), (0, 0.2, 0.3), (1, 0.3, 0.4)])
    with pytest.raises(NonMonotonePhaseError) as info:
        load_gait_csv(path)
    assert info.value.row == 1
    assert "row 1" in str(info.value)


def test_nan_cell_error_names_row_and_column(tmp_path):
    path = tmp_path / "nan.csv"
    write_csv(path, ["phase", "angle", "torque"],
              [(0, 0.1, 0.2), (0.5, 0.2, "NaN"), (1, 0.3, 0.4)])
    with pytest.raises(InvalidCellError) as info:
        load_gait_csv(path)
    assert info.value.row == 1
    assert info.value.column == "torque"
    assert "torque" in str(info.value) and "row 1" in str(info.value)


def test_unparseable_cell_error(tmp_path):
    path = tmp_path / "bad.csv"
    write_csv(path, ["phase", "angle", "torque"],
              [(0, 0.1, 0.2), (0.5, "oops", 0.3), (1, 0.3, 0.4)])
    with pytest.raises(InvalidCellError) as info:
        load_gait_csv(path)
    assert info.value.column == "angle"


def test_missing_column_error(tmp_path):
    path = tmp_path / "missing.csv"
    write_csv(path, ["phase", "angle"], [(0, 0.1), (1, 0.2)])
    with pytest.raises(MissingColumnError) as info:
        load_gait_csv(path)
    assert info.value.column == "torque"
    assert "torque" in str(info.value)


def test_too_few_rows_error(tmp_path):
    path = tmp_path / "short.csv"
    write_csv(path, ["phase", "angle", "torque"], [(0, 0.1, 0.2)])
    with pytest.raises(TooFewRowsError):
        load_gait_csv(path)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_loader_output_satisfies_invariants(data):
    n = data.draw(st.integers(min_value=2, max_value=30))
    steps = data.draw(st.lists(
        st.floats(min_value=0.01, max_value=1.0), min_size=n - 1, max_size=n - 1))
    finite = st.floats(min_value=-50.0, max_value=50.0)
    angle = data.draw(st.lists(finite, min_size=n, max_size=n))
    torque = data.draw(st.lists(finite, min_size=n, max_size=n))
    phase = np.concatenate([[0.0], np.cumsum(steps)])
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "cycle.csv"
        write_csv(path, ["phase", "angle", "torque"],
                  zip(phase, angle, torque))
        if n == 2:
            with pytest.raises(GaitDataError):
                load_gait_csv(path)   # too short to differentiate
            return
        d = load_gait_csv(path)
    assert d.phase[0] == 0.0 and d.phase[-1] == 1.0
    assert np.all(np.diff(d.phase) > 0)
    for channel in (d.angle, d.velocity, d.torque):
        assert np.all(np.isfinite(channel))
        assert channel.size == n


# ---------------------------------------------------------------- velocity

def test_estimate_velocity_linear_signal():
    t = np.linspace(0, 1, 21)
    np.testing.assert_allclose(estimate_velocity(t * 1.0, t), 1.0, atol=1e-12)


def test_estimate_velocity_constant_signal():
    t = np.linspace(0, 1, 21)
    np.testing.assert_allclose(estimate_velocity(np.full(21, 0.3), t), 0.0,
                               atol=1e-15)


def test_estimate_velocity_sine_oracle():
    t = np.linspace(0.0, 1.0, 1001)
    vel = estimate_velocity(np.sin(2 * np.pi * t), t, cycle_duration=1.0)
    exact = 2 * np.pi * np.cos(2 * np.pi * t)
    assert float(np.abs(vel - exact).max()) < 1e-3


def test_estimate_velocity_cycle_duration_scales():
    t = np.linspace(0, 1, 101)
    fast = estimate_velocity(t * 1.0, t, cycle_duration=0.5)
    np.testing.assert_allclose(fast, 2.0, atol=1e-12)


def test_estimate_velocity_errors():
    with pytest.raises(GaitDataError):
        estimate_velocity([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(GaitDataError):
        estimate_velocity([0, 1, 2], [0, 0.5, 1], cycle_duration=0.0)


# ---------------------------------------------------------------- resample

def test_resample_same_grid_is_identity(ankle_data):
    r = resample(ankle_data, ankle_data.n_samples)
    for a, b in ((r.angle, ankle_data.angle), (r.velocity, ankle_data.velocity),
                 (r.torque, ankle_data.torque)):
        assert float(np.abs(a - b).max()) <= 1e-12


def test_resample_linear_interpolation():
    d = GaitCycleData(phase=[0.0, 0.5, 1.0], angle=[0.0, 0.0, 0.0],
                      velocity=[0.0, 0.0, 0.0], torque=[0.0, 1.0, 0.0])
    r = resample(d, 5)
    np.testing.assert_allclose(r.torque, [0.0, 0.5, 1.0, 0.5, 0.0], atol=1e-15)
    np.testing.assert_allclose(r.phase, [0.0, 0.25, 0.5, 0.75, 1.0], atol=0)


def test_resample_idempotent(ankle_data):
    once = resample(ankle_data, 401)
    twice = resample(once, 401)
    np.testing.assert_array_equal(once.torque, twice.torque)
    np.testing.assert_array_equal(once.angle, twice.angle)


def test_resample_preserves_endpoints(ankle_data):
    r = resample(ankle_data, 37)
    assert r.torque[0] == ankle_data.torque[0]
    assert r.torque[-1] == ankle_data.torque[-1]


def test_resample_needs_two_points(ankle_data):
    with pytest.raises(GaitDataError):
        resample(ankle_data, 1)


# ---------------------------------------------------------------- synthesize

def test_synthesize_zero_impedance(ankle_data):
    truth = random_params(np.random.default_rng(1), 0, (0.0, 1.0))
    zero = truth.__class__(
        stiffness=truth.stiffness.__class__(coeffs=[0.0]),
        damping=truth.damping.__class__(coeffs=[0.0]),
        schedule=truth.schedule,
    )
    d = synthesize(SyntheticSpec(ground_truth=zero, kinematics=ankle_data))
    np.testing.assert_array_equal(d.torque, np.zeros(ankle_data.n_samples))


def test_synthesize_hand_arithmetic():
    from impedfit.impedance import (EquilibriumSchedule, ImpedanceParameters,
                                    ImpedanceProfile)
    t = np.linspace(0.0, 1.0, 11)
    kin = GaitCycleData(phase=t, angle=np.full(11, 0.1),
                        velocity=np.zeros(11), torque=np.zeros(11))
    truth = ImpedanceParameters(
        stiffness=ImpedanceProfile(coeffs=[10.0]),
        damping=ImpedanceProfile(coeffs=[0.0]),
        schedule=EquilibriumSchedule(boundaries=[0.0, 1.0], angles=[0.0]),
    )
    d = synthesize(SyntheticSpec(ground_truth=truth, kinematics=kin))
    np.testing.assert_array_equal(d.torque, np.full(11, 1.0))


def test_synthesize_deterministic_under_seed(ankle_data):
    truth = random_params(np.random.default_rng(4), 4,
                          presets.reference_boundaries("A"))
    a = synthesize(SyntheticSpec(ground_truth=truth, kinematics=ankle_data,
                                 noise_std=0.5, seed=42))
    b = synthesize(SyntheticSpec(ground_truth=truth, kinematics=ankle_data,
                                 noise_std=0.5, seed=42))
    c = synthesize(SyntheticSpec(ground_truth=truth, kinematics=ankle_data,
                                 noise_std=0.5, seed=43))
    np.testing.assert_array_equal(a.torque, b.torque)
    assert not np.array_equal(a.torque, c.torque)


def test_synthesize_round_trip_identity(ankle_data):
    truth = random_params(np.random.default_rng(6), 3,
                          presets.reference_boundaries("C"))
    d = synthesize(SyntheticSpec(ground_truth=truth, kinematics=ankle_data))
    tau = torque_trajectory(truth, d)
    assert float(np.abs(tau - d.torque).max()) <= 1e-12


def test_synthesize_negative_noise_rejected(ankle_data):
    truth = random_params(np.random.default_rng(8), 2, (0.0, 1.0))
    with pytest.raises(ValueError):
        SyntheticSpec(ground_truth=truth, kinematics=ankle_data, noise_std=-0.1)


# ---------------------------------------------------------------- data type

def test_data_type_validation():
    with pytest.raises(GaitDataError):
        GaitCycleData(phase=[0.0, 1.0], angle=[0.0], velocity=[0.0, 0.0],
                      torque=[0.0, 0.0])
    with pytest.raises(GaitDataError):
        GaitCycleData(phase=[0.0, 0.9], angle=[0.0, 0.0],
                      velocity=[0.0, 0.0], torque=[0.0, 0.0])
    with pytest.raises(NonMonotonePhaseError):
        GaitCycleData(phase=[0.0, 0.5, 0.5, 1.0], angle=np.zeros(4),
                      velocity=np.zeros(4), torque=np.zeros(4))
    with pytest.raises(GaitDataError):
        GaitCycleData(phase=[0.0, 1.0], angle=[0.0, np.inf],
                      velocity=[0.0, 0.0], torque=[0.0, 0.0])
    with pytest.raises(GaitDataError):
        GaitCycleData(phase=[0.0, 1.0], angle=[0.0, 0.0],
                      velocity=[0.0, 0.0], torque=[0.0, 0.0],
                      joint_label="hip")
