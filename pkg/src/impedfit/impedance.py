"""Piecewise impedance profiles, equilibrium schedules, and the torque law.

A joint controller is described by a stiffness profile K(t), a damping
profile D(t) and a schedule of equilibrium angles theta_eq(t), where
t in [0, 1] is the normalised gait phase.  Profiles are polynomial over
the stance portion of the cycle and constant over swing, with the swing
constant pinned to the polynomial's constant term so that the value at
t = 0 equals the value at t = 1 (continuity between consecutive cycles).
The commanded torque is

    tau = K(t) * (theta - theta_eq(t)) + D(t) * theta_dot
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from impedfit import kernels

__all__ = [
    "ImpedanceProfile",
    "EquilibriumSchedule",
    "ImpedanceParameters",
    "ConstraintCheck",
    "ValidationReport",
    "eval_profile",
    "profile_curve",
    "equilibrium_at",
    "equilibrium_curve",
    "impedance_torque",
    "torque_trajectory",
    "joint_power",
    "validate",
    "params_to_dict",
    "params_from_dict",
    "save_params",
    "load_params",
]

DEFAULT_STANCE_END = 0.63


def _readonly_f64(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ImpedanceProfile:
    """Stance polynomial (ascending powers of phase) plus swing constant.

    ``swing_value`` must equal ``coeffs[0]``; it may be omitted, in which
    case it is filled in from the constant term.
    """

    coeffs: np.ndarray
    swing_value: float | None = None
    stance_end: float = DEFAULT_STANCE_END

    def __post_init__(self):
        coeffs = _readonly_f64(self.coeffs, "coeffs")
        if coeffs.size == 0:
            raise ValueError("coeffs must contain at least the constant term")
        object.__setattr__(self, "coeffs", coeffs)
        swing = self.swing_value
        if swing is None:
            swing = float(coeffs[0])
        elif float(swing) != float(coeffs[0]):
            raise ValueError(
                f"swing_value {swing!r} must equal the constant term "
                f"{coeffs[0]!r} (cycle continuity)"
            )
        object.__setattr__(self, "swing_value", float(swing))
        if not (0.0 < self.stance_end < 1.0):
            raise ValueError(f"stance_end must lie in (0, 1), got {self.stance_end}")
        object.__setattr__(self, "stance_end", float(self.stance_end))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1


@dataclass(frozen=True)
class EquilibriumSchedule:
    """Gait-phase sections with one equilibrium angle per section."""

    boundaries: np.ndarray
    angles: np.ndarray
    label: str | None = None

    def __post_init__(self):
        boundaries = _readonly_f64(self.boundaries, "boundaries")
        angles = _readonly_f64(self.angles, "angles")
        if boundaries.size < 2:
            raise ValueError("boundaries must contain at least [0, 1]")
        if boundaries[0] != 0.0 or boundaries[-1] != 1.0:
            raise ValueError("boundaries must start at 0 and end at 1")
        if np.any(np.diff(boundaries) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        if angles.size != boundaries.size - 1:
            raise ValueError(
                f"expected {boundaries.size - 1} angles for "
                f"{boundaries.size} boundaries, got {angles.size}"
            )
        object.__setattr__(self, "boundaries", boundaries)
        object.__setattr__(self, "angles", angles)

    @property
    def n_sections(self) -> int:
        return self.angles.size


@dataclass(frozen=True)
class ImpedanceParameters:
    """Complete controller description: stiffness, damping, equilibria."""

    stiffness: ImpedanceProfile
    damping: ImpedanceProfile
    schedule: EquilibriumSchedule

    def __post_init__(self):
        if self.stiffness.stance_end != self.damping.stance_end:
            raise ValueError(
                "stiffness and damping must share the same stance_end "
                f"({self.stiffness.stance_end} != {self.damping.stance_end})"
            )

    @property
    def stance_end(self) -> float:
        return self.stiffness.stance_end


def _check_phase(t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"phase must lie in [0, 1], got {t}")
    return t


def eval_profile(profile: ImpedanceProfile, t: float) -> float:
    """Profile value at a single phase (Horner over stance, constant swing)."""
    t = _check_phase(t)
    if t >= profile.stance_end:
        return profile.swing_value
    acc = profile.coeffs[-1]
    for c in profile.coeffs[-2::-1]:
        acc = acc * t + c
    return float(acc)


def profile_curve(profile: ImpedanceProfile, t) -> np.ndarray:
    """Vectorised :func:`eval_profile`."""
    t = np.asarray(t, dtype=np.float64)
    if t.size and (t.min() < 0.0 or t.max() > 1.0):
        raise ValueError("phase values must lie in [0, 1]")
    return kernels.profile_values(profile.coeffs, profile.swing_value,
                                  profile.stance_end, t)


def equilibrium_at(schedule: EquilibriumSchedule, t: float) -> float:
    """Equilibrium angle of the half-open section containing t.

    Sections are [b_i, b_{i+1}); the final section is closed at t = 1.
    """
    t = _check_phase(t)
    idx = int(np.searchsorted(schedule.boundaries, t, side="right")) - 1
    idx = min(max(idx, 0), schedule.n_sections - 1)
    return float(schedule.angles[idx])


def equilibrium_curve(schedule: EquilibriumSchedule, t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.size and (t.min() < 0.0 or t.max() > 1.0):
        raise ValueError("phase values must lie in [0, 1]")
    return kernels.schedule_values(schedule.boundaries, schedule.angles, t)


def impedance_torque(params: ImpedanceParameters, theta: float,
                     theta_dot: float, t: float) -> float:
    """Spring-damper torque at one sample."""
    t = _check_phase(t)
    stiff = eval_profile(params.stiffness, t)
    damp = eval_profile(params.damping, t)
    eq = equilibrium_at(params.schedule, t)
    return stiff * (theta - eq) + damp * theta_dot


def torque_trajectory(params: ImpedanceParameters, data) -> np.ndarray:
    """Elementwise torque over a gait cycle's samples."""
    return kernels.torque_values(
        params.stiffness.coeffs, params.stiffness.swing_value,
        params.damping.coeffs, params.damping.swing_value,
        params.stance_end,
        params.schedule.boundaries, params.schedule.angles,
        data.angle, data.velocity, data.phase)


def joint_power(torque, velocity) -> np.ndarray:
    """Mechanical power tau * theta_dot, elementwise."""
    torque = np.asarray(torque, dtype=np.float64)
    velocity = np.asarray(velocity, dtype=np.float64)
    if torque.shape != velocity.shape:
        raise ValueError(
            f"length mismatch: torque {torque.shape} vs velocity {velocity.shape}")
    return torque * velocity


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    satisfied: bool
    worst_violation: float
    worst_phase: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "satisfied": self.satisfied,
            "worst_violation": self.worst_violation,
            "worst_phase": self.worst_phase,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConstraintCheck":
        return cls(name=d["name"], satisfied=bool(d["satisfied"]),
                   worst_violation=float(d["worst_violation"]),
                   worst_phase=d.get("worst_phase"))


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ConstraintCheck, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.satisfied for c in self.checks)

    @property
    def worst_violation(self) -> float:
        return max((c.worst_violation for c in self.checks), default=0.0)

    def check(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"checks": [c.to_dict() for c in self.checks]}

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationReport":
        return cls(tuple(ConstraintCheck.from_dict(c) for c in d["checks"]))


def _nonneg_check(name: str, profile: ImpedanceProfile, grid: np.ndarray,
                  tol: float) -> ConstraintCheck:
    values = kernels.profile_values(profile.coeffs, profile.swing_value,
                                    profile.stance_end, grid)
    worst_idx = int(np.argmin(values))
    violation = max(0.0, -float(values[worst_idx]))
    return ConstraintCheck(name, violation <= tol, violation,
                           float(grid[worst_idx]))


def validate(params: ImpedanceParameters, grid_n: int = 1001,
             tol: float = 0.0) -> ValidationReport:
    """Check nonnegativity (on a uniform grid) and cycle continuity.

    Violations are report content, not errors; ``tol`` is the magnitude
    below which a violation still counts as satisfied.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_n)
    checks = [
        _nonneg_check("stiffness_nonneg", params.stiffness, grid, tol),
        _nonneg_check("damping_nonneg", params.damping, grid, tol),
    ]
    for name, profile in (("stiffness_cycle_continuity", params.stiffness),
                          ("damping_cycle_continuity", params.damping)):
        gap = abs(eval_profile(profile, 0.0) - eval_profile(profile, 1.0))
        checks.append(ConstraintCheck(name, gap == 0.0, gap, None))
    return ValidationReport(tuple(checks))


def _profile_to_dict(profile: ImpedanceProfile) -> dict:
    return {
        "coeffs": [float(c) for c in profile.coeffs],
        "swing": profile.swing_value,
        "stance_end": profile.stance_end,
    }


def _profile_from_dict(d: dict) -> ImpedanceProfile:
    return ImpedanceProfile(coeffs=d["coeffs"], swing_value=d["swing"],
                            stance_end=d["stance_end"])


def params_to_dict(params: ImpedanceParameters) -> dict:
    return {
        "stiffness": _profile_to_dict(params.stiffness),
        "damping": _profile_to_dict(params.damping),
        "schedule": {
            "boundaries": [float(b) for b in params.schedule.boundaries],
            "angles": [float(a) for a in params.schedule.angles],
            "label": params.schedule.label,
        },
    }


def params_from_dict(d: dict) -> ImpedanceParameters:
    sched = d["schedule"]
    return ImpedanceParameters(
        stiffness=_profile_from_dict(d["stiffness"]),
        damping=_profile_from_dict(d["damping"]),
        schedule=EquilibriumSchedule(boundaries=sched["boundaries"],
                                     angles=sched["angles"],
                                     label=sched.get("label")),
    )


def save_params(params: ImpedanceParameters, path) -> None:
    # json round-trips doubles bit-exactly (repr-based decimal strings)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params_to_dict(params), fh, indent=2)
        fh.write("\n")


def load_params(path) -> ImpedanceParameters:
    with open(path, "r", encoding="utf-8") as fh:
        return params_from_dict(json.load(fh))
