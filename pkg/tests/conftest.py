import json
import time
from pathlib import Path

import pytest

from impedfit import estimator, gait_data, impedance, presets

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = ROOT / "data"
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def ankle_data():
    return gait_data.load_gait_csv(DATA_DIR / "ankle_gait.csv",
                                   joint_label="ankle")


@pytest.fixture(scope="session")
def knee_data():
    return gait_data.load_gait_csv(DATA_DIR / "knee_gait.csv",
                                   joint_label="knee")


@pytest.fixture(scope="session")
def setA_fixture_params():
    """Frozen estimate produced by tools/freeze_fixtures.py."""
    return impedance.load_params(FIXTURES_DIR / "ankle_setA_params.json")


@pytest.fixture(scope="session")
def frozen():
    with open(FIXTURES_DIR / "ankle_setA_frozen.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def four_set_results(ankle_data):
    """label -> (multi_start result, wall seconds), computed once."""
    out = {}
    for label in presets.SET_LABELS:
        prob = estimator.build_problem(
            ankle_data, presets.reference_boundaries(label), label=label)
        t0 = time.perf_counter()
        result = estimator.multi_start(prob, n_starts=8, seed=0)
        out[label] = (result, time.perf_counter() - t0)
    return out
