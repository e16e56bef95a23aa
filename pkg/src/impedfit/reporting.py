"""Fit metrics, qualitative trend checks, and cross-set comparison tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from impedfit.estimator import EstimationResult
from impedfit.gait_data import GaitCycleData
from impedfit.impedance import (
    ImpedanceParameters,
    joint_power,
    profile_curve,
    torque_trajectory,
)

__all__ = [
    "FitMetrics",
    "TrendReport",
    "metrics",
    "trend_report",
    "compare_sets",
    "comparison_text",
    "comparison_csv",
    "comparison_json",
]

PUSHOFF_WINDOW = (0.40, 0.70)


@dataclass(frozen=True)
class FitMetrics:
    rmse: float
    peak_torque: float
    peak_torque_phase: float
    peak_power: float
    peak_power_phase: float
    pushoff_phase: float

    def to_dict(self) -> dict:
        return {
            "rmse": self.rmse,
            "peak_torque": self.peak_torque,
            "peak_torque_phase": self.peak_torque_phase,
            "peak_power": self.peak_power,
            "peak_power_phase": self.peak_power_phase,
            "pushoff_phase": self.pushoff_phase,
        }


def metrics(params: ImpedanceParameters, data: GaitCycleData) -> FitMetrics:
    """RMSE plus torque/power extrema of the modelled trajectory."""
    tau = torque_trajectory(params, data)
    power = joint_power(tau, data.velocity)
    rmse = float(np.sqrt(np.mean((tau - data.torque) ** 2)))
    i_tau = int(np.argmax(tau))
    i_pow = int(np.argmax(power))
    lo, hi = PUSHOFF_WINDOW
    window = (data.phase >= lo) & (data.phase <= hi)
    idx = np.flatnonzero(window)
    i_push = int(idx[np.argmax(power[idx])]) if idx.size else i_pow
    return FitMetrics(
        rmse=rmse,
        peak_torque=float(tau[i_tau]),
        peak_torque_phase=float(data.phase[i_tau]),
        peak_power=float(power[i_pow]),
        peak_power_phase=float(data.phase[i_pow]),
        pushoff_phase=float(data.phase[i_push]),
    )


@dataclass(frozen=True)
class TrendReport:
    """Qualitative shape checks with the numbers that back them.

    Expected gait shape: stiffness rises from heel-strike to a peak in
    mid/terminal stance and sits at a constant value through swing;
    damping is highest just after heel-strike and nearly vanishes by
    terminal stance.
    """

    stiffness_peak_phase: float
    stiffness_peak_value: float
    stiffness_start_value: float
    stiffness_peak_in_stance: bool
    stiffness_peak_exceeds_start: bool
    swing_constant: bool
    damping_early_max: float
    damping_early_phase: float
    damping_late_min: float
    damping_late_phase: float
    damping_drops_late: bool

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def trend_report(params: ImpedanceParameters, grid_n: int = 1001) -> TrendReport:
    if grid_n < 10:
        raise ValueError(f"grid_n must be >= 10, got {grid_n}")
    grid = np.linspace(0.0, 1.0, grid_n)
    K = profile_curve(params.stiffness, grid)
    D = profile_curve(params.damping, grid)
    stance_end = params.stance_end

    i_peak = int(np.argmax(K))
    peak_phase = float(grid[i_peak])
    peak_value = float(K[i_peak])
    start_value = float(K[0])

    swing = grid >= stance_end
    swing_constant = bool(np.all(K[swing] == K[swing][0])) if swing.any() else True

    early = grid <= 0.3
    late = (grid >= 0.4) & (grid < stance_end)
    i_early = int(np.flatnonzero(early)[np.argmax(D[early])])
    i_late = int(np.flatnonzero(late)[np.argmin(D[late])]) if late.any() else i_early

    return TrendReport(
        stiffness_peak_phase=peak_phase,
        stiffness_peak_value=peak_value,
        stiffness_start_value=start_value,
        stiffness_peak_in_stance=bool(0.0 < peak_phase < stance_end),
        stiffness_peak_exceeds_start=bool(peak_value > start_value),
        swing_constant=swing_constant,
        damping_early_max=float(D[i_early]),
        damping_early_phase=float(grid[i_early]),
        damping_late_min=float(D[i_late]),
        damping_late_phase=float(grid[i_late]),
        damping_drops_late=bool(D[i_early] > D[i_late]),
    )


def _result_row(result: EstimationResult) -> dict:
    params = result.params
    trend = trend_report(params)
    return {
        "label": params.schedule.label or "?",
        "cost": result.cost,
        "converged": result.converged,
        "feasible": result.feasible,
        "worst_violation": result.constraint_report.worst_violation,
        "equilibria": [float(a) for a in params.schedule.angles],
        "stiffness_peak_in_stance": trend.stiffness_peak_in_stance,
        "stiffness_peak_exceeds_start": trend.stiffness_peak_exceeds_start,
        "damping_drops_late": trend.damping_drops_late,
    }


def compare_sets(results) -> list[dict]:
    """One row per estimation result, sorted by schedule label."""
    results = list(results)
    if not results:
        raise ValueError("need at least one result to compare")
    rows = [_result_row(r) for r in results]
    return sorted(rows, key=lambda row: row["label"])


def comparison_text(rows: list[dict]) -> str:
    headers = ["set", "cost", "converged", "feasible", "worst_viol",
               "trend_ok", "equilibria [rad]"]
    table = []
    for row in rows:
        trend_ok = (row["stiffness_peak_in_stance"]
                    and row["stiffness_peak_exceeds_start"]
                    and row["damping_drops_late"])
        table.append([
            row["label"],
            f"{row['cost']:.6g}",
            "yes" if row["converged"] else "no",
            "yes" if row["feasible"] else "no",
            f"{row['worst_violation']:.2e}",
            "yes" if trend_ok else "no",
            ", ".join(f"{a:+.4f}" for a in row["equilibria"]),
        ])
    widths = [max(len(headers[j]), max((len(r[j]) for r in table), default=0))
              for j in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in table:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def comparison_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["label", "cost", "converged", "feasible",
                     "worst_violation", "stiffness_peak_in_stance",
                     "stiffness_peak_exceeds_start", "damping_drops_late",
                     "equilibria"])
    for row in rows:
        writer.writerow([
            row["label"], repr(row["cost"]), row["converged"], row["feasible"],
            repr(row["worst_violation"]), row["stiffness_peak_in_stance"],
            row["stiffness_peak_exceeds_start"], row["damping_drops_late"],
            ";".join(repr(a) for a in row["equilibria"]),
        ])
    return buf.getvalue()


def comparison_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2) + "\n"
