import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from motoguard.controller import ControllerConfig  # noqa: E402
from motoguard.facerec import FaceDb, enroll  # noqa: E402
from motoguard.imaging import GrayImage  # noqa: E402

OWNER = "+639170000000"
PASSCODE = "4321"


def synthetic_face(seed, size=64):
    """Deterministic textured frame: a smooth blob plus seeded grain."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size] / size
    cx, cy = rng.uniform(0.3, 0.7, 2)
    blob = 160 * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / 0.08)
    grain = rng.integers(0, 60, (size, size))
    return GrayImage.from_array(np.clip(blob + grain, 0, 255).astype(np.uint8))


@pytest.fixture
def config():
    return ControllerConfig(owner_number=OWNER, passcode=PASSCODE)


@pytest.fixture
def owner_face():
    return synthetic_face(101)


@pytest.fixture
def stranger_face():
    return synthetic_face(202)


@pytest.fixture
def facedb(owner_face):
    return enroll(FaceDb(), "owner", owner_face)


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_RESULTS = {}
WALL_LIMIT_S = 60.0


def pytest_sessionstart(session):
    session.config._motoguard_t0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    elapsed = time.perf_counter() - config._motoguard_t0
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k.split()[0][2:]), k)):
        ok, note = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {note}")
    ok = elapsed < WALL_LIMIT_S
    terminalreporter.write_line(
        f"{'PASS' if ok else 'FAIL'}  AC9 suite wall time  {elapsed:.1f}s (limit {WALL_LIMIT_S:.0f}s)"
    )


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config._motoguard_t0
    if ACCEPTANCE_RESULTS and elapsed >= WALL_LIMIT_S and session.exitstatus == 0:
        session.exitstatus = 1
