import os
import subprocess
import sys
from pathlib import Path

import hypothesis
import pytest

from lib.algebra import PresentedAlgebra
from lib.bases import BlockParams, interleaved_base
from lib.forcing import SParams
from lib.formats import load_base, load_strings

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=500, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: checks that run near full acceptance size")


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def sample_algebra() -> PresentedAlgebra:
    """Rows 110, 011, 100 over three generators."""
    return PresentedAlgebra.create(3, [(1, 1, 0), (0, 1, 1), (1, 0, 0)])


@pytest.fixture
def free2() -> PresentedAlgebra:
    return PresentedAlgebra.free(2)


@pytest.fixture
def sample_base():
    """eta = 0000, 0001 | 1110, 1111 with A the even-length strings."""
    return load_base(DATA / "base.txt")


@pytest.fixture
def base12():
    """Six two-index blocks interleaved at depth 8; eta 2 = 00100000 and eta 8 = 11100000."""
    params = BlockParams(8, 2, (0, 2, 4, 6, 8, 10, 12))
    return interleaved_base(load_strings(DATA / "nu12.txt"), load_strings(DATA / "rho12.txt"), params)


@pytest.fixture
def tiny_params() -> SParams:
    return SParams(chi=(1, 2), ucap=3)


@pytest.fixture
def run_cli(tmp_path):
    """Run main.py in a scratch directory so the log file lands there."""

    def run(*args: str) -> subprocess.CompletedProcess:
        return subprocess.run(
            [sys.executable, str(ROOT / "main.py"), *args],
            cwd=tmp_path,
            capture_output=True,
            text=True,
        )

    return run
