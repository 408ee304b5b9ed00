"""Generating function of the outer length billiard and its derivatives.

``H(s0, s1)`` is the sum of the two tangent lengths from the tangent
intersection ``P`` to the curve.  The map satisfies
``H2(s0, s1) + H1(s1, s2) = 0`` and ``H12 < 0`` (twist).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _geometry as geo
from .billiard import DEFAULT_TOL, PhasePair, Tolerances, step
from .curve import CurveModel, CurveSpec, antipodal
from .errors import ParallelTangents

# below this fraction of the length the wedge ratio loses digits to cancellation
TAYLOR_SWITCH = 1e-4
FD_STEP = 1e-5


@dataclass
class HJet:
    H: float
    H1: float
    H2: float
    H11: float
    H12: float
    H22: float


def _frames(curve, s0, s1):
    s0 = np.asarray(s0, dtype=float)
    s1 = np.asarray(s1, dtype=float)
    delta = s1 - s0
    if np.any(delta < 0.0):
        raise ParallelTangents("pairs need s0 <= s1")
    th0 = curve.theta_of_s(s0)
    th1 = th0 + (curve.theta_of_s(s1) - curve.theta_of_s(s0))
    if np.any(th1 - th0 >= np.pi - 1e-12):
        raise ParallelTangents("s1 is at or beyond the antipodal parameter of s0")
    return th0, th1, delta


def taylor_H(curve: CurveModel, s0, delta):
    """Degree-five expansion of ``H(s0, s0 + delta)`` in ``delta``."""
    delta = np.asarray(delta, dtype=float)
    kd = curve.curvature_derivs(curve.theta_of_s(np.asarray(s0, dtype=float)), 2)
    k, k1, k2 = kd
    return (
        delta
        + k**2 / 12.0 * delta**3
        + k * k1 / 12.0 * delta**4
        + (2.0 * k**4 + 4.0 * k1**2 + 7.0 * k * k2) / 240.0 * delta**5
    )


def eval_H(curve: CurveModel, s0, s1):
    """Generating function ``H(s0, s1)``.

    Uses the closed form in the mid-angle tangent; for very short pairs the
    Taylor polynomial is returned instead.
    """
    th0, th1, delta = _frames(curve, s0, s1)
    exact = geo.H_value(geo.Frame(curve, th0), geo.Frame(curve, th1))
    near = delta < TAYLOR_SWITCH * curve.total_length
    if np.any(near):
        approx = taylor_H(curve, s0, delta)
        exact = np.where(near, approx, exact)
    return exact if np.ndim(exact) else float(exact)


def tangent_length_sum(curve: CurveModel, s0, s1):
    """``|P gamma(s0)| + |P gamma(s1)|`` computed from the tangent intersection."""
    th0, th1, _ = _frames(curve, s0, s1)
    f0, f1 = geo.Frame(curve, th0), geo.Frame(curve, th1)
    p = geo.intersection(f0, f1)
    return np.hypot(*(p - f0.p)) + np.hypot(*(p - f1.p))


def _first_partials(curve, th0, th1):
    f0, f1 = geo.Frame(curve, th0), geo.Frame(curve, th1)
    return geo.H1(f0, f1), geo.H2(f0, f1)


def eval_H_jet(curve: CurveModel, s0, s1) -> HJet:
    """Value, gradient and Hessian of ``H`` at one pair.

    ``H1``, ``H2`` and ``H11`` are closed forms.  ``H12`` and ``H22`` are
    Richardson-extrapolated central differences of the closed forms in ``s1``.
    """
    th0, th1, _ = _frames(curve, float(s0), float(s1))
    f0 = geo.Frame(curve, th0, with_k1=True)
    f1 = geo.Frame(curve, th1)
    h_s = FD_STEP * curve.total_length
    return HJet(
        H=float(geo.H_value(f0, f1)),
        H1=float(geo.H1(f0, f1)),
        H2=float(geo.H2(f0, f1)),
        H11=float(geo.H11(f0, f1)),
        H12=float(geo.d_ds1(curve, geo.H1, th0, th1, h_s)),
        H22=float(geo.d_ds1(curve, geo.H2, th0, th1, h_s)),
    )


def hessian_terms(curve: CurveModel, th0, th1):
    """Vectorized ``(H1, H2, H11, H12, H22)`` for pairs given by normal angles."""
    th0 = np.asarray(th0, dtype=float)
    th1 = np.asarray(th1, dtype=float)
    f0 = geo.Frame(curve, th0, with_k1=True)
    f1 = geo.Frame(curve, th1)
    h_s = FD_STEP * curve.total_length
    return (
        geo.H1(f0, f1),
        geo.H2(f0, f1),
        geo.H11(f0, f1),
        geo.d_ds1(curve, geo.H1, th0, th1, h_s),
        geo.d_ds1(curve, geo.H2, th0, th1, h_s),
    )


def twist_formula(curve: CurveModel, s0, s1):
    """``-k0 k1 H / (2 sin^2(phi / 2))`` with ``phi`` the interior angle at ``P``."""
    th0, th1, _ = _frames(curve, float(s0), float(s1))
    phi = np.pi - (th1 - th0)
    k0, k1 = 1.0 / curve.rho(th0), 1.0 / curve.rho(th1)
    H = geo.H_value(geo.Frame(curve, th0), geo.Frame(curve, th1))
    return float(-k0 * k1 * H / (2.0 * np.sin(0.5 * phi) ** 2))


def twist_formula_check(curve: CurveModel, s0, s1, relative=False):
    """Distance between the numerical ``H12`` and :func:`twist_formula`."""
    numeric = eval_H_jet(curve, s0, s1).H12
    formula = twist_formula(curve, s0, s1)
    err = abs(numeric - formula)
    return err / abs(formula) if relative else err


def mather_criterion(curve: CurveModel, s0, s1, tol: Tolerances = DEFAULT_TOL):
    """``H22(s0, s1) + H11(s1, s2)`` with ``s2`` the image of the pair."""
    s2 = step(curve, PhasePair(float(s0), float(s1)), tol).s1
    return float(_mather_terms(curve, s0, s1, s2))


def _mather_terms(curve, s0, s1, s2):
    th0, th1, _ = _frames(curve, s0, s1)
    th1b, th2, _ = _frames(curve, s1, s2)
    h22 = geo.d_ds1(curve, geo.H2, th0, th1, FD_STEP * curve.total_length)
    f1 = geo.Frame(curve, th1b, with_k1=True)
    return h22 + geo.H11(f1, geo.Frame(curve, th2))


@dataclass
class MatherScan:
    """Values of :func:`mather_criterion` on an ``n x n`` phase grid.

    Row ``i`` is the base point ``s0 = i l / n``; column ``j`` the fraction
    ``(j + 1) / (n + 1)`` of the way from ``s0`` to its antipodal parameter.
    """

    s0: np.ndarray
    fractions: np.ndarray
    values: np.ndarray

    @property
    def maximum(self):
        return float(np.max(self.values))

    def rows(self):
        for i, a in enumerate(self.s0):
            for j, u in enumerate(self.fractions):
                yield float(a), float(u), float(self.values[i, j])


def mather_scan(curve: CurveModel, n: int = 50, tol: Tolerances = DEFAULT_TOL) -> MatherScan:
    if n < 2:
        raise ValueError("grid size must be at least 2")
    s0 = curve.total_length * np.arange(n) / n
    fractions = np.arange(1, n + 1) / (n + 1)
    star = antipodal(curve, s0)
    a = np.repeat(s0, n)
    b = (s0[:, None] + fractions[None, :] * (star - s0)[:, None]).ravel()
    c = np.array([step(curve, PhasePair(float(x), float(y)), tol).s1 for x, y in zip(a, b)])
    values = _mather_terms(curve, a, b, c).reshape(n, n)
    return MatherScan(s0=s0, fractions=fractions, values=values)


def rho_family_spec(c, harmonic=3):
    """Curve with radius of curvature ``1 - c cos(harmonic theta)``."""
    return CurveSpec.perturbed_circle(amplitude=c / (harmonic**2 - 1), harmonic=harmonic)
