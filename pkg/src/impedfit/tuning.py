"""Experimental tuning transform: scale and shift an estimated controller.

Stiffness becomes alpha*K(t) + gamma (the offset shifts the whole curve
uniformly, so it lands on the constant term and the swing value alike),
damping becomes beta*D(t), and the equilibrium angles may be replaced
wholesale by hand-tuned values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from impedfit.impedance import (
    EquilibriumSchedule,
    ImpedanceParameters,
    ImpedanceProfile,
)

__all__ = ["TuningSpec", "tune"]


@dataclass(frozen=True)
class TuningSpec:
    """alpha scales stiffness, gamma offsets it, beta scales damping."""

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.0
    tuned_angles: tuple[float, ...] | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if value < 0.0:
                raise ValueError(f"{name} must be >= 0, got {value}")
        if self.tuned_angles is not None:
            object.__setattr__(self, "tuned_angles",
                               tuple(float(a) for a in self.tuned_angles))


def tune(params: ImpedanceParameters, spec: TuningSpec) -> ImpedanceParameters:
    """Apply the tuning transform; output keeps all profile invariants."""
    k = spec.alpha * params.stiffness.coeffs
    k[0] += spec.gamma
    stiffness = ImpedanceProfile(coeffs=k, stance_end=params.stance_end)
    damping = ImpedanceProfile(coeffs=spec.beta * params.damping.coeffs,
                               stance_end=params.stance_end)
    schedule = params.schedule
    if spec.tuned_angles is not None:
        if len(spec.tuned_angles) != schedule.n_sections:
            raise ValueError(
                f"need {schedule.n_sections} tuned angles, got {len(spec.tuned_angles)}")
        schedule = EquilibriumSchedule(boundaries=schedule.boundaries,
                                       angles=np.asarray(spec.tuned_angles),
                                       label=schedule.label)
    return ImpedanceParameters(stiffness=stiffness, damping=damping,
                               schedule=schedule)
