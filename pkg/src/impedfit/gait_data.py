"""Gait-cycle time series: CSV ingestion, differentiation, resampling,
and synthetic data generation.

Phase is the independent variable everywhere, normalised to [0, 1] over
one cycle.  Wall-clock time enters only through the configured cycle
duration when differentiating angle into velocity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from impedfit import kernels
from impedfit.impedance import ImpedanceParameters

__all__ = [
    "JOINT_LABELS",
    "GaitCycleData",
    "SyntheticSpec",
    "GaitDataError",
    "MissingColumnError",
    "TooFewRowsError",
    "InvalidCellError",
    "NonMonotonePhaseError",
    "load_gait_csv",
    "estimate_velocity",
    "resample",
    "synthesize",
]

JOINT_LABELS = ("ankle", "knee", "other")


class GaitDataError(ValueError):
    """Base class for gait-data ingestion and validation failures."""


class MissingColumnError(GaitDataError):
    def __init__(self, column: str, path=None):
        self.column = column
        where = f" in {path}" if path else ""
        super().__init__(f"missing column {column!r}{where}")


class TooFewRowsError(GaitDataError):
    def __init__(self, n_rows: int, minimum: int = 2):
        self.n_rows = n_rows
        super().__init__(f"need at least {minimum} data rows, got {n_rows}")


class InvalidCellError(GaitDataError):
    def __init__(self, row: int, column: str, value):
        self.row = row
        self.column = column
        super().__init__(
            f"invalid value {value!r} in column {column!r} at data row {row}")


class NonMonotonePhaseError(GaitDataError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(
            f"phase must be strictly increasing; violated at data row {row}")


def _channel(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise GaitDataError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise GaitDataError(f"{name} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GaitCycleData:
    """One averaged gait cycle sampled on a strictly increasing phase grid."""

    phase: np.ndarray
    angle: np.ndarray
    velocity: np.ndarray
    torque: np.ndarray
    joint_label: str = "other"
    units_note: str = ""

    def __post_init__(self):
        phase = _channel(self.phase, "phase")
        angle = _channel(self.angle, "angle")
        velocity = _channel(self.velocity, "velocity")
        torque = _channel(self.torque, "torque")
        n = phase.size
        if n < 2:
            raise TooFewRowsError(n)
        for name, arr in (("angle", angle), ("velocity", velocity),
                          ("torque", torque)):
            if arr.size != n:
                raise GaitDataError(
                    f"{name} has {arr.size} samples but phase has {n}")
        if phase[0] != 0.0 or phase[-1] != 1.0:
            raise GaitDataError(
                f"phase must span [0, 1] exactly, got [{phase[0]}, {phase[-1]}]")
        if np.any(np.diff(phase) <= 0):
            row = int(np.argmax(np.diff(phase) <= 0)) + 1
            raise NonMonotonePhaseError(row)
        if self.joint_label not in JOINT_LABELS:
            raise GaitDataError(
                f"joint_label must be one of {JOINT_LABELS}, got {self.joint_label!r}")
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "angle", angle)
        object.__setattr__(self, "velocity", velocity)
        object.__setattr__(self, "torque", torque)

    @property
    def n_samples(self) -> int:
        return self.phase.size


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic cycle: play an impedance law over kinematics."""

    ground_truth: ImpedanceParameters
    kinematics: GaitCycleData
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.noise_std < 0.0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")


def _parse_cell(raw: str, row: int, column: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise InvalidCellError(row, column, raw) from None
    if not math.isfinite(value):
        raise InvalidCellError(row, column, raw)
    return value


def _normalize_phase(raw: np.ndarray, phase_format: str) -> np.ndarray:
    if phase_format == "auto":
        top = raw.max()
        if top <= 1.0:
            phase_format = "fraction"
        elif top <= 100.0:
            phase_format = "percent"
        else:
            phase_format = "index"
    if phase_format not in ("fraction", "percent", "index"):
        raise GaitDataError(f"unknown phase format {phase_format!r}")
    # affine map of the observed span onto [0, 1]; identity for a
    # fraction column that already runs 0..1
    span = raw[-1] - raw[0]
    if span <= 0:
        raise NonMonotonePhaseError(1)
    return (raw - raw[0]) / span


def load_gait_csv(path, schema: dict | None = None, *,
                  joint_label: str = "other",
                  phase_format: str = "auto",
                  cycle_duration: float = 1.0,
                  units_note: str = "") -> GaitCycleData:
    """Read one gait cycle from a headered CSV file.

    ``schema`` maps the canonical channel names (``phase``, ``angle``,
    ``velocity``, ``torque``) to the file's column headers.  Omitting
    ``velocity`` from the schema derives it from the angle channel via
    :func:`estimate_velocity` with the given ``cycle_duration`` (s).
    """
    explicit_schema = schema is not None
    schema = dict(schema or {})
    columns = {
        "phase": schema.get("phase", "phase"),
        "angle": schema.get("angle", "angle"),
        "torque": schema.get("torque", "torque"),
    }
    velocity_column = schema.get("velocity", "velocity")

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        # with an explicit schema the velocity column is read only when
        # declared; with default names it is read when present
        if explicit_schema:
            has_velocity = "velocity" in schema
        else:
            has_velocity = velocity_column in header
        needed = list(columns.values())
        if has_velocity:
            needed.append(velocity_column)
        for col in needed:
            if col not in header:
                raise MissingColumnError(col, path)
        rows = list(reader)

    if len(rows) < 2:
        raise TooFewRowsError(len(rows))

    def column_values(col: str) -> np.ndarray:
        return np.array([_parse_cell(row[col], i, col)
                         for i, row in enumerate(rows)], dtype=np.float64)

    raw_phase = column_values(columns["phase"])
    diffs = np.diff(raw_phase)
    if np.any(diffs <= 0):
        raise NonMonotonePhaseError(int(np.argmax(diffs <= 0)) + 1)
    phase = _normalize_phase(raw_phase, phase_format)

    angle = column_values(columns["angle"])
    torque = column_values(columns["torque"])
    if has_velocity:
        velocity = column_values(velocity_column)
    else:
        velocity = estimate_velocity(angle, phase, cycle_duration=cycle_duration)

    return GaitCycleData(phase=phase, angle=angle, velocity=velocity,
                         torque=torque, joint_label=joint_label,
                         units_note=units_note)


def estimate_velocity(angle, phase, cycle_duration: float = 1.0) -> np.ndarray:
    """Differentiate angle with respect to time (rad/s).

    Central differences in the interior, one-sided at the endpoints,
    on the possibly nonuniform grid phase * cycle_duration.
    """
    angle = np.asarray(angle, dtype=np.float64)
    phase = np.asarray(phase, dtype=np.float64)
    if angle.shape != phase.shape:
        raise GaitDataError("angle and phase must have equal length")
    if angle.size < 3:
        raise GaitDataError(
            f"need at least 3 samples to differentiate, got {angle.size}")
    if cycle_duration <= 0.0:
        raise GaitDataError(f"cycle_duration must be positive, got {cycle_duration}")
    return np.gradient(angle, phase * cycle_duration)


def resample(data: GaitCycleData, n: int) -> GaitCycleData:
    """Linearly interpolate all channels onto a uniform n-point grid."""
    if n < 2:
        raise GaitDataError(f"resample needs n >= 2, got {n}")
    grid = np.linspace(0.0, 1.0, int(n))
    return replace(
        data,
        phase=grid,
        angle=np.interp(grid, data.phase, data.angle),
        velocity=np.interp(grid, data.phase, data.velocity),
        torque=np.interp(grid, data.phase, data.torque),
    )


def synthesize(spec: SyntheticSpec) -> GaitCycleData:
    """Torque channel generated by the impedance law over the kinematics."""
    kin = spec.kinematics
    params = spec.ground_truth
    torque = kernels.torque_values(
        params.stiffness.coeffs, params.stiffness.swing_value,
        params.damping.coeffs, params.damping.swing_value,
        params.stance_end,
        params.schedule.boundaries, params.schedule.angles,
        kin.angle, kin.velocity, kin.phase)
    if spec.noise_std > 0.0:
        rng = np.random.default_rng(spec.seed)
        torque = torque + rng.normal(0.0, spec.noise_std, size=torque.shape)
    return replace(kin, torque=torque)
