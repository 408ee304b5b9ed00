"""Remainder-order measurements for the small-step expansions.

Each check samples a few base points, evaluates the remainder of an expansion
on a geometric ladder of step sizes and fits the slope of the maximum
remainder in log-log coordinates.  Generating-function and map remainders are
computed in extended precision (see ``_precise``); the Lazutkin remainder is
large enough for double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from ._precise import precise
from .curve import TWO_PI, CurveModel
from .lazutkin import LazutkinChart, conjugated_step


@dataclass
class SlopeReport:
    name: str
    steps: np.ndarray
    remainders: np.ndarray
    slope: float
    expected: float
    band: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return abs(self.slope - self.expected) <= self.band

    def summary(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name}: slope {self.slope:.4f} (expected {self.expected} +/- {self.band}) {verdict}"


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _base_angles(n):
    # irrational offset keeps the samples off symmetry axes
    return (np.arange(n) + 0.3819660112501051) * TWO_PI / n


def _jets(curve, theta, order):
    return [float(v) for v in curve.curvature_derivs(np.array(theta), order)]


def H_remainder(curve: CurveModel, theta0, dtheta):
    """``H - taylor_H`` at the pair of normal angles ``(theta0, theta0 + dtheta)``, and its ``delta``."""
    P = precise(curve.spec)
    k, k1, k2 = _jets(curve, theta0, 2)
    with mp.workdps(P.dps):
        t0 = mp.mpf(theta0)
        t1 = t0 + mp.mpf(dtheta)
        d = P.arc(t0, t1)
        poly = d + k**2 / 12 * d**3 + k * k1 / 12 * d**4 + (2 * k**4 + 4 * k1**2 + 7 * k * k2) / 240 * d**5
        return float(P.H(t0, t1) - poly), float(d)


def check_H(curve: CurveModel, deltas=None, n_base=4):
    """Slope of ``max |H - taylor_H|`` over ``delta`` in ``[1e-3, 1e-1]``; expected 6."""
    deltas = np.geomspace(1e-3, 1e-1, 9) if deltas is None else np.asarray(deltas)
    rem = np.zeros(len(deltas))
    actual = np.zeros(len(deltas))
    for th0 in _base_angles(n_base):
        rho = float(curve.rho(th0))
        for i, d in enumerate(deltas):
            r, dd = H_remainder(curve, th0, d / rho)
            rem[i] = max(rem[i], abs(r))
            actual[i] = dd
    return SlopeReport("H", deltas, rem, loglog_slope(deltas, rem), 6.0, 0.2)


def map_coefficients(curve: CurveModel, theta):
    """``A, B, C`` of the expansion ``eps1 = eps0 + A eps0^2 + B eps0^3 + C eps0^4``."""
    k, k1, k2, k3 = _jets(curve, theta, 3)
    A = -2.0 * k1 / (3.0 * k)
    B = 10.0 * k1**2 / (9.0 * k**2) - 2.0 * k2 / (3.0 * k)
    C = (-24.0 * k**4 * k1 - 1160.0 * k1**3 + 1200.0 * k * k1 * k2 - 216.0 * k**2 * k3) / (540.0 * k**3)
    return A, B, C


def _eps_pair(P, theta0, dtheta):
    t0 = mp.mpf(theta0)
    t1 = t0 + mp.mpf(dtheta)
    t2 = P.next_theta(t0, t1)
    return P.arc(t0, t1), P.arc(t1, t2)


def map_remainder(curve: CurveModel, theta0, dtheta):
    P = precise(curve.spec)
    A, B, C = map_coefficients(curve, theta0)
    with mp.workdps(P.dps):
        e0, e1 = _eps_pair(P, theta0, dtheta)
        return float(e1 - e0 - A * e0**2 - B * e0**3 - C * e0**4), float(e0)


def check_map(curve: CurveModel, eps=None, n_base=4):
    """Slope of the degree-four remainder of ``eps1``; expected 5."""
    eps = np.geomspace(2e-3, 5e-2, 8) if eps is None else np.asarray(eps)
    rem = np.zeros(len(eps))
    for th0 in _base_angles(n_base):
        rho = float(curve.rho(th0))
        for i, e in enumerate(eps):
            r, _ = map_remainder(curve, th0, e / rho)
            rem[i] = max(rem[i], abs(r))
    return SlopeReport("map", eps, rem, loglog_slope(eps, rem), 5.0, 0.2)


def extract_A(curve: CurveModel, theta, h=2e-2, levels=4):
    """Limit of ``(eps1 - eps0) / eps0^2`` as ``eps0 -> 0`` by Richardson extrapolation.

    The quotient is ``A + B eps0 + ...``; step sizes in angle are halved and
    the table is built on the measured ``eps0``.
    """
    P = precise(curve.spec)
    rho = float(curve.rho(theta))
    with mp.workdps(P.dps):
        xs, ys = [], []
        for j in range(levels):
            e0, e1 = _eps_pair(P, theta, h / rho / 2**j)
            xs.append(e0)
            ys.append((e1 - e0) / e0**2)
        # Neville extrapolation to eps0 = 0 of the polynomial through the samples
        table = list(ys)
        for m in range(1, levels):
            for i in range(levels - m):
                table[i] = (xs[i] * table[i + 1] - xs[i + m] * table[i]) / (xs[i] - xs[i + m])
        return float(table[0])


def check_A(curve: CurveModel, n=10):
    """Relative error of the extracted ``A`` against ``-2 k' / (3 k)`` at ``n`` angles."""
    thetas = _base_angles(n)
    out = []
    for th in thetas:
        extracted = extract_A(curve, th)
        formula = map_coefficients(curve, th)[0]
        out.append((float(th), extracted, formula, abs(extracted - formula) / abs(formula)))
    return out


def check_lazutkin(curve: CurveModel, ys=None, n_x=41):
    """Slope of ``max_x |y' - y|`` over ``y`` in ``[1e-3, 5e-2]``; expected 4."""
    ys = np.geomspace(1e-3, 5e-2, 8) if ys is None else np.asarray(ys)
    chart = LazutkinChart(curve)
    xs = np.arange(n_x) / n_x
    rem = np.array([max(abs(conjugated_step(curve, x, y, chart=chart)[1] - y) for x in xs) for y in ys])
    return SlopeReport("lazutkin", ys, rem, loglog_slope(ys, rem), 4.0, 0.3)
