"""Reference ankle controllers for four equilibrium sectionings.

Four bundled parameter sets, labelled A through D, share one quartic
stiffness/damping structure and differ in how finely the gait cycle is
sectioned for the equilibrium angle: A uses four sections, B three,
C two (stance/swing), D a single constant angle.  Each set carries the
equilibrium angles produced by the estimator ("optimized") and a
hand-adjusted variant used on hardware ("tuned"), along with the
scaling factors that map the former controller to the latter.
"""

from __future__ import annotations

from dataclasses import dataclass

from impedfit.impedance import (
    EquilibriumSchedule,
    ImpedanceParameters,
    ImpedanceProfile,
)

__all__ = [
    "SET_LABELS",
    "SECTION_BOUNDARIES",
    "TuningFactors",
    "TUNING_FACTORS",
    "reference_boundaries",
    "reference_schedule",
    "reference_parameters",
    "tuned_angles",
]

SET_LABELS = ("A", "B", "C", "D")

# phase boundaries of the equilibrium sections, per set
SECTION_BOUNDARIES = {
    "A": (0.0, 0.13, 0.40, 0.63, 1.0),
    "B": (0.0, 0.40, 0.63, 1.0),
    "C": (0.0, 0.63, 1.0),
    "D": (0.0, 1.0),
}

# equilibrium angles (rad) straight out of the estimator
_OPTIMIZED_ANGLES = {
    "A": (0.0294, -0.3428, -0.3491, 0.3029),
    "B": (-0.4258, -0.4363, 0.0000),
    "C": (-0.4363, 0.1453),
    "D": (-0.4655,),
}

# equilibrium angles (rad) after manual adjustment for hardware
_TUNED_ANGLES = {
    "A": (0.0100, -0.0875, -0.3490, 0.0873),
    "B": (-0.1745, -0.2617, 0.0000),
    "C": (-0.2617, 0.1452),
    "D": (-0.2617,),
}

# stance stiffness coefficients (N.m/rad), ascending powers of phase
_STIFFNESS_COEFFS = {
    "A": (2.21, 586.04, -7061.82, 28322.46, -29870.57),
    "B": (0.32, 199.97, -3424.51, 17340.71, -19977.92),
    "C": (0.75, 181.16, -3333.05, 17146.19, -19822.71),
    "D": (0.00, 136.56, -2596.67, 14144.17, -16520.32),
}

# stance damping coefficients (N.m.s/rad), ascending powers of phase
_DAMPING_COEFFS = {
    "A": (0.12, 18.76, -76.20, 88.08, -22.45),
    "B": (0.12, 31.21, -158.46, 261.35, -140.21),
    "C": (0.18, 35.04, -181.22, 303.05, -164.32),
    "D": (0.26, 34.53, -182.97, 311.36, -171.23),
}

STANCE_END = 0.63


@dataclass(frozen=True)
class TuningFactors:
    """Scalings that turn an estimated controller into a deployable one."""

    stiffness_scale: float
    damping_scale: float
    stiffness_offset: float


# per-set factors used to derive the hardware controllers
TUNING_FACTORS = {
    "A": TuningFactors(stiffness_scale=0.4, damping_scale=0.2, stiffness_offset=20.0),
    "B": TuningFactors(stiffness_scale=0.5, damping_scale=0.166, stiffness_offset=20.0),
    "C": TuningFactors(stiffness_scale=0.5, damping_scale=0.166, stiffness_offset=20.0),
    "D": TuningFactors(stiffness_scale=0.5, damping_scale=0.166, stiffness_offset=20.0),
}


def _check_label(label: str) -> str:
    label = str(label).upper()
    if label not in SET_LABELS:
        raise KeyError(f"unknown parameter set {label!r}; expected one of {SET_LABELS}")
    return label


def reference_boundaries(label: str) -> tuple[float, ...]:
    return SECTION_BOUNDARIES[_check_label(label)]


def reference_schedule(label: str, tuned: bool = False) -> EquilibriumSchedule:
    label = _check_label(label)
    angles = (_TUNED_ANGLES if tuned else _OPTIMIZED_ANGLES)[label]
    return EquilibriumSchedule(boundaries=SECTION_BOUNDARIES[label],
                               angles=angles, label=label)


def reference_parameters(label: str, tuned: bool = False) -> ImpedanceParameters:
    """Full controller for one set; ``tuned`` selects the hardware angles."""
    label = _check_label(label)
    return ImpedanceParameters(
        stiffness=ImpedanceProfile(coeffs=_STIFFNESS_COEFFS[label],
                                   stance_end=STANCE_END),
        damping=ImpedanceProfile(coeffs=_DAMPING_COEFFS[label],
                                 stance_end=STANCE_END),
        schedule=reference_schedule(label, tuned=tuned),
    )


def tuned_angles(label: str) -> tuple[float, ...]:
    return _TUNED_ANGLES[_check_label(label)]
