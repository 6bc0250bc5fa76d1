import sys
from pathlib import Path

# make the oracle helpers importable as plain modules
sys.path.insert(0, str(Path(__file__).parent))

import math
import time

import pytest


@pytest.fixture(scope="session")
def unsteady_400():
    """The 400x200 wedge run, shared by the unsteady and acceptance tests.

    Returns (state, fit, report, grid, seconds).
    """
    from wedgeflow import AIR, Grid2D, run_to_steady
    grid = Grid2D.box(400, 200)
    t0 = time.perf_counter()
    state, fit, rep = run_to_steady(grid, AIR, 2.0, 1.0, math.radians(10))
    return state, fit, rep, grid, time.perf_counter() - t0
