"""Regenerate the frozen regression fixture used by the test suite.

Runs the standard multi-start estimate with Set A sectioning on the bundled
ankle dataset and records the resulting parameters plus scalar regression
values at full precision.  Rerun only when the bundled data or the estimation
pipeline intentionally changes; the test suite compares against these files
to within 1e-9.
"""
from __future__ import annotations

import json
import pathlib

from impedfit import estimator, gait_data, impedance, presets, reporting

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"


def main() -> None:
    data = gait_data.load_gait_csv(ROOT / "data" / "ankle_gait.csv")
    prob = estimator.build_problem(
        data, presets.reference_boundaries("A"), label="A")
    result = estimator.multi_start(prob, n_starts=8, seed=0)
    if not (result.converged and result.feasible):
        raise SystemExit("fixture run did not converge feasibly; not freezing")

    m = reporting.metrics(result.params, data)
    cost = estimator.fit_cost(result.params, data, prob.fit_window)

    FIXTURES.mkdir(parents=True, exist_ok=True)
    impedance.save_params(result.params, FIXTURES / "ankle_setA_params.json")
    frozen = {
        "fit_cost": cost,
        "rmse": m.rmse,
        "pushoff_phase": m.pushoff_phase,
        "n_starts": 8,
        "seed": 0,
    }
    with open(FIXTURES / "ankle_setA_frozen.json", "w") as fh:
        json.dump(frozen, fh, indent=2)
        fh.write("\n")
    print(json.dumps(frozen, indent=2))


if __name__ == "__main__":
    main()
