"""Generate the bundled representative ankle and knee gait datasets.

Each dataset is one averaged cycle on a 101-point percent grid, built
from smooth periodic spline kinematics shaped after normative gait
curves, with the torque channel produced by playing a known feasible
impedance controller over those kinematics plus a small smooth
deviation (so the data is realistic rather than an exact playback).
Everything is seeded and rerunnable; the script asserts that the
ground-truth profiles are nonnegative before writing anything.

Run from the repository root:  python3 tools/make_datasets.py
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from impedfit.impedance import (
    EquilibriumSchedule,
    ImpedanceParameters,
    ImpedanceProfile,
    profile_curve,
)
from impedfit.gait_data import GaitCycleData, SyntheticSpec, synthesize

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = ROOT / "data"
N_SAMPLES = 101
STANCE_END = 0.63


def quartic_through(points) -> np.ndarray:
    """Ascending coefficients of the quartic interpolating 5 (t, y) points."""
    points = list(points)
    t = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    V = t[:, None] ** np.arange(5)
    return np.linalg.solve(V, y)


def feasible_profile(coeffs: np.ndarray, name: str) -> ImpedanceProfile:
    prof = ImpedanceProfile(coeffs=coeffs, stance_end=STANCE_END)
    grid = np.linspace(0.0, 1.0, 2001)
    lowest = profile_curve(prof, grid).min()
    assert lowest >= 0.0, f"{name} ground truth dips to {lowest:.4g}"
    return prof


def periodic_kinematics(knot_t, knot_angle, cycle_duration: float,
                        joint_label: str) -> GaitCycleData:
    spline = CubicSpline(knot_t, knot_angle, bc_type="periodic")
    phase = np.linspace(0.0, 1.0, N_SAMPLES)
    angle = spline(phase)
    velocity = spline(phase, 1) / cycle_duration
    return GaitCycleData(phase=phase, angle=angle, velocity=velocity,
                         torque=np.zeros(N_SAMPLES), joint_label=joint_label)


def smooth_deviation(amplitude: float, seed: int) -> np.ndarray:
    """Periodic, zero-mean, spline-smooth torque deviation."""
    rng = np.random.default_rng(seed)
    knots_t = np.linspace(0.0, 1.0, 17)
    values = rng.normal(0.0, amplitude / 2.0, size=knots_t.size)
    values -= values.mean()
    values[-1] = values[0]
    spline = CubicSpline(knots_t, values, bc_type="periodic")
    dev = spline(np.linspace(0.0, 1.0, N_SAMPLES))
    peak = np.abs(dev).max()
    if peak > amplitude:
        dev *= amplitude / peak
    return dev


def write_csv(path: Path, data: GaitCycleData) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase", "angle", "velocity", "torque"])
        for i in range(data.n_samples):
            writer.writerow([
                f"{data.phase[i] * 100:g}",
                repr(float(data.angle[i])),
                repr(float(data.velocity[i])),
                repr(float(data.torque[i])),
            ])


def make_ankle() -> None:
    # dorsiflexion-positive ankle trace: early plantarflex dip, stance
    # dorsiflexion ramp, rapid push-off plantarflexion, swing recovery
    knot_t = [0.0, 0.07, 0.13, 0.25, 0.40, 0.48, 0.57, 0.63,
              0.70, 0.85, 1.0]
    knot_angle = [0.0, -0.06, -0.04, 0.01, 0.05, 0.10, 0.16, -0.12,
                  -0.25, 0.02, 0.0]
    kin = periodic_kinematics(knot_t, knot_angle, cycle_duration=1.1,
                              joint_label="ankle")

    stance_knots = np.linspace(0.0, STANCE_END, 5)
    k_coeffs = quartic_through(zip(stance_knots, [4.0, 60.0, 140.0, 125.0, 12.0]))
    d_coeffs = quartic_through(zip(stance_knots, [0.2, 2.2, 1.0, 0.4, 0.1]))
    truth = ImpedanceParameters(
        stiffness=feasible_profile(k_coeffs, "ankle stiffness"),
        damping=feasible_profile(d_coeffs, "ankle damping"),
        schedule=EquilibriumSchedule(boundaries=[0.0, 1.0], angles=[-0.43]),
    )
    clean = synthesize(SyntheticSpec(ground_truth=truth, kinematics=kin))
    torque = clean.torque + smooth_deviation(2.5, seed=123)
    data = GaitCycleData(phase=kin.phase, angle=kin.angle,
                         velocity=kin.velocity, torque=torque,
                         joint_label="ankle")
    write_csv(DATA_DIR / "ankle_gait.csv", data)
    print(f"ankle:  torque range [{torque.min():.2f}, {torque.max():.2f}] N.m, "
          f"K peak {profile_curve(truth.stiffness, np.linspace(0, 0.63, 631)).max():.1f}")


def make_knee() -> None:
    # flexion-positive knee trace: stance flexion wave, large swing flexion
    knot_t = [0.0, 0.08, 0.15, 0.25, 0.40, 0.55, 0.63, 0.73,
              0.82, 0.92, 1.0]
    knot_angle = [0.08, 0.22, 0.28, 0.16, 0.06, 0.12, 0.45, 1.05,
                  0.90, 0.30, 0.08]
    kin = periodic_kinematics(knot_t, knot_angle, cycle_duration=1.1,
                              joint_label="knee")

    stance_knots = np.linspace(0.0, STANCE_END, 5)
    k_coeffs = quartic_through(zip(stance_knots, [8.0, 70.0, 95.0, 55.0, 12.0]))
    d_coeffs = quartic_through(zip(stance_knots, [0.3, 1.8, 0.9, 0.35, 0.15]))
    truth = ImpedanceParameters(
        stiffness=feasible_profile(k_coeffs, "knee stiffness"),
        damping=feasible_profile(d_coeffs, "knee damping"),
        schedule=EquilibriumSchedule(boundaries=[0.0, 0.40, 0.63, 1.0],
                                     angles=[0.14, 0.20, 0.45]),
    )
    clean = synthesize(SyntheticSpec(ground_truth=truth, kinematics=kin))
    torque = clean.torque + smooth_deviation(1.5, seed=19620301)
    data = GaitCycleData(phase=kin.phase, angle=kin.angle,
                         velocity=kin.velocity, torque=torque,
                         joint_label="knee")
    write_csv(DATA_DIR / "knee_gait.csv", data)
    print(f"knee:   torque range [{torque.min():.2f}, {torque.max():.2f}] N.m")


def main() -> None:
    DATA_DIR.mkdir(exist_ok=True)
    make_ankle()
    make_knee()


if __name__ == "__main__":
    main()
