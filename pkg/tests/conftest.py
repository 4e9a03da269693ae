import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from liecurv import GnSpec, InvariantForm, build_gn, so3  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data"


def random_spd(rng, n, lo=0.5, hi=3.0):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Q @ np.diag(rng.uniform(lo, hi, n)) @ Q.T


def random_symmetric(rng, n):
    A = rng.normal(size=(n, n))
    return 0.5 * (A + A.T)


def random_gn_spec(rng, n):
    return GnSpec(tuple(np.sort(rng.uniform(0.5, 3.0, n))))


def so3_quadratic():
    return so3(), InvariantForm(np.eye(3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def g1():
    return build_gn(GnSpec((1.0,)))


@pytest.fixture
def data_dir():
    return DATA


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
