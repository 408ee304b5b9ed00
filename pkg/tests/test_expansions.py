import numpy as np
import pytest

from outer_billiard.expansions import (
    H_remainder,
    check_A,
    check_H,
    loglog_slope,
    map_coefficients,
    map_remainder,
)


def test_loglog_slope():
    x = np.geomspace(1e-3, 1e-1, 7)
    assert loglog_slope(x, 3 * x**5) == pytest.approx(5.0, abs=1e-12)


def test_circle_H_remainder_matches_tangent_series(circle):
    # 2 tan(d/2) - taylor = 17 d^7 / 40320 + ...
    d = 0.05
    r, delta = H_remainder(circle, 0.3, d)
    assert delta == pytest.approx(d, rel=1e-15)
    assert r == pytest.approx(17 * d**7 / 40320, rel=1e-2)


def test_circle_map_coefficients_vanish(circle):
    assert map_coefficients(circle, 0.4) == pytest.approx((0.0, 0.0, 0.0), abs=1e-14)
    r, _ = map_remainder(circle, 0.4, 0.05)
    assert abs(r) < 1e-30


def test_H_slope_two_mode(two_mode):
    rep = check_H(two_mode, deltas=np.geomspace(2e-3, 5e-2, 5), n_base=2)
    assert rep.passed, rep.summary()


def test_A_extraction_perturbed(perturbed):
    rows = check_A(perturbed, n=4)
    assert max(r[3] for r in rows) < 1e-2
