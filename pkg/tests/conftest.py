import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

# Seven points whose K=2 interaction graph has the groups of the textbook
# example: f1(x1,x3,x4) f2(x2,x3,x4) f3(x2,x3,x4) f4(x1,x3,x4) f5(x5,x6,x7)
# f6(x3,x5,x6) f7(x5,x6,x7). Found by random search, frozen here.
FIG1_POINTS = np.array([[2.0, 10.0], [0.0, 2.0], [1.0, 5.0], [0.0, 8.0],
                        [10.0, 5.0], [8.0, 3.0], [11.0, 0.0]])
FIG1_GROUPS = [[0, 2, 3], [1, 2, 3], [1, 2, 3], [0, 2, 3], [4, 5, 6], [2, 4, 5], [4, 5, 6]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def blobs(n_per=50, centers=((0.0, 0.0), (40.0, 40.0)), sd=1.0, seed=0):
    """Isotropic, well separated Gaussian blobs with their labels (1, 2, ...)."""
    r = np.random.default_rng(seed)
    pts = np.vstack([r.normal(c, sd, size=(n_per, len(c))) for c in centers])
    labels = np.repeat(np.arange(1, len(centers) + 1), n_per)
    return pts, labels


def random_points(n, dims=2, seed=0):
    return np.random.default_rng(seed).uniform(0, 10, size=(n, dims))


# Acceptance results, one line per criterion, printed after the run.
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
