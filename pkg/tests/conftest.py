import numpy as np
import pytest

from outer_billiard.curve import CurveSpec, build_curve

# two-mode support function: not an ellipse, curvature in [0.78, 1.30]
TWO_MODE = CurveSpec.fourier([(0, 1.0, 0.0), (2, 0.04, 0.0), (3, 0.0, 0.02)])

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def circle():
    return build_curve(CurveSpec.circle(1.0))


@pytest.fixture(scope="session")
def ellipse():
    return build_curve(CurveSpec.ellipse(2.0, 1.0))


@pytest.fixture(scope="session")
def perturbed():
    return build_curve(CurveSpec.perturbed_circle(0.05, 3))


@pytest.fixture(scope="session")
def two_mode():
    return build_curve(TWO_MODE)


@pytest.fixture(scope="session")
def curves(circle, ellipse, perturbed, two_mode):
    return {"circle": circle, "ellipse": ellipse, "perturbed": perturbed, "two_mode": two_mode}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def random_pairs(curve, rng, n, lo=0.05, hi=0.95):
    """Random phase points with ``s1`` a fraction in ``(lo, hi)`` of the way to ``s0*``."""
    from outer_billiard.curve import antipodal

    s0 = rng.uniform(0.0, curve.total_length, n)
    star = antipodal(curve, s0)
    return s0, s0 + rng.uniform(lo, hi, n) * (star - s0)
