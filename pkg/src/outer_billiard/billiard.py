"""The outer length billiard map.

A phase pair ``(s0, s1)`` stands for the exterior point ``P`` whose two
tangent lines touch the curve at ``gamma(s0)`` and ``gamma(s1)``.  The image
``(s1, s2)`` is fixed by the circle tangent to the curve at ``gamma(s1)`` and to
the line ``P gamma(s0)``: its second common tangent with the curve touches at
``gamma(s2)``.  Orbits live on the universal cover, so ``s`` increases
without reduction modulo the length.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _geometry as geo
from .curve import TWO_PI, CurveModel
from .errors import (
    ConsistencyError,
    DegeneratePair,
    InsidePoint,
    ParallelTangents,
    RootBracketFailure,
    StepError,
)


@dataclass
class Tolerances:
    """Numerical settings of the map.

    ``delta_min`` is relative to the curve length; ``residual`` bounds the
    variational residual ``|H2(s0, s1) + H1(s1, s2)|`` accepted after a step,
    relative to ``max(1, |H2(s0, s1)|)``;
    ``consistency`` bounds the disagreement in ``s2`` between the geometric and
    the variational constructions.
    """

    delta_min: float = 1e-8
    residual: float = 1e-9
    root: float = 1e-15
    consistency: float = 1e-10


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class PhasePair:
    s0: float
    s1: float

    @property
    def eps(self):
        return self.s1 - self.s0


@dataclass
class OrbitTrace:
    """Pairs visited by an orbit, their vertices and per-step residuals.

    ``s0[i], s1[i]`` is the i-th pair (``i = 0`` the initial one),
    ``vertices[i]`` its exterior point and ``residuals[i - 1]`` the
    variational residual of the step that produced pair ``i``.
    """

    s0: np.ndarray
    s1: np.ndarray
    vertices: np.ndarray
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def eps(self):
        return self.s1 - self.s0

    @property
    def pairs(self):
        return [PhasePair(float(a), float(b)) for a, b in zip(self.s0, self.s1)]

    def __len__(self):
        return len(self.s0)

    def to_csv(self, path_or_file):
        """Write columns step, s0, s1, eps, Px, Py, residual at 17 significant digits."""
        rows = []
        for i in range(len(self.s0)):
            res = self.residuals[i - 1] if i > 0 else float("nan")
            rows.append(
                [str(i)]
                + [_fmt(v) for v in (self.s0[i], self.s1[i], self.s1[i] - self.s0[i])]
                + [_fmt(self.vertices[i, 0]), _fmt(self.vertices[i, 1]), _fmt(res)]
            )
        _write_csv(path_or_file, ["step", "s0", "s1", "eps", "Px", "Py", "residual"], rows)


def _fmt(x):
    return format(float(x), ".17g")


def _write_csv(path_or_file, header, rows):
    if hasattr(path_or_file, "write"):
        writer = csv.writer(path_or_file, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(path_or_file, "w", newline="") as fh:
        _write_csv(fh, header, rows)


def _thetas(curve, s0, s1):
    return curve.theta_of_s(np.asarray(s0, dtype=float)), curve.theta_of_s(np.asarray(s1, dtype=float))


def _check_pair(curve, th0, th1, eps, tol):
    if eps < tol.delta_min * curve.total_length:
        raise DegeneratePair(f"eps = {eps:.3g} is below delta_min")
    if th1 - th0 >= np.pi - 1e-12:
        raise ParallelTangents("s1 is at or beyond the antipodal parameter of s0")


def tangent_intersection(curve: CurveModel, s0, s1):
    """Exterior point ``P`` whose tangents touch at ``s0`` (negative) and ``s1``."""
    th0, th1 = _thetas(curve, s0, s1)
    if np.any(th1 - th0 >= np.pi - 1e-12) or np.any(th1 <= th0):
        raise ParallelTangents("tangent lines at s0 and s1 do not meet ahead of s0")
    return geo.intersection(geo.Frame(curve, th0), geo.Frame(curve, th1))


def tangent_circle_radius(curve: CurveModel, s0, s1):
    """Radius of the circle tangent to the boundary at ``gamma(s1)`` and to line ``P gamma(s0)``.

    ``(gamma(s0) - gamma(s1)) ^ gamma'(s0) / (1 + gamma'(s0) . gamma'(s1))``.
    """
    th0, th1 = _thetas(curve, s0, s1)
    denom = 1.0 + np.cos(th1 - th0)
    if np.any(denom <= 1e-14):
        raise ParallelTangents("tangent lines are parallel")
    return geo.radius(geo.Frame(curve, th0), geo.Frame(curve, th1))


def variational_residual(curve: CurveModel, s0, s1, s2):
    """``H2(s0, s1) + H1(s1, s2)``; zero exactly on orbits."""
    th0 = curve.theta_of_s(np.asarray(s0, dtype=float))
    th1 = curve.theta_of_s(np.asarray(s1, dtype=float))
    th2 = curve.theta_of_s(np.asarray(s2, dtype=float))
    return _residual_theta(curve, th0, th1, th2)


def _residual_theta(curve, th0, th1, th2):
    f1 = geo.Frame(curve, th1)
    return geo.H2(geo.Frame(curve, th0), f1) + geo.H1(f1, geo.Frame(curve, th2))


def _solve_theta2(curve, th1, fun, tol):
    margin = max(tol.delta_min * curve.total_length * curve.curvature_bounds[0], 1e-13)
    lo, hi = th1 + margin, th1 + np.pi - margin
    flo, fhi = fun(lo), fun(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise RootBracketFailure(f"no sign change on ({lo:.17g}, {hi:.17g}): f = {flo:.3g}, {fhi:.3g}")
    return brentq(fun, lo, hi, xtol=tol.root, rtol=4 * np.finfo(float).eps, maxiter=200)


def _geometric_theta(curve, th0, th1, tol):
    f0, f1 = geo.Frame(curve, th0), geo.Frame(curve, th1)
    r = float(geo.radius(f0, f1))
    p1, t1 = f1.p, f1.t

    def g(th2):
        f2 = geo.Frame(curve, th2)
        return float(geo.wedge(f2.p - p1, f2.t) - r * (1.0 + geo.dot(f2.t, t1)))

    return _solve_theta2(curve, th1, g, tol)


def _variational_theta(curve, th0, th1, tol):
    f1 = geo.Frame(curve, th1)
    y1 = float(geo.H2(geo.Frame(curve, th0), f1))

    def g(th2):
        return y1 + float(geo.H1(f1, geo.Frame(curve, th2)))

    return _solve_theta2(curve, th1, g, tol)


def _advance(curve, pair, tol, solver, check):
    s0, s1 = float(pair.s0), float(pair.s1)
    turns = np.floor(s1 / curve.total_length)
    base = turns * curve.total_length
    th0, th1 = _thetas(curve, s0 - base, s1 - base)
    _check_pair(curve, th0, th1, s1 - s0, tol)
    th2 = solver(curve, float(th0), float(th1), tol)
    s2 = s1 + float(curve.s_of_theta(th2) - curve.s_of_theta(th1))
    residual = 0.0
    if check:
        f1 = geo.Frame(curve, th1)
        y1 = float(geo.H2(geo.Frame(curve, th0), f1))
        residual = y1 + float(geo.H1(f1, geo.Frame(curve, th2)))
        # H2 blows up near the antipodal boundary; compare on its scale
        if abs(residual) > tol.residual * max(1.0, abs(y1)):
            raise ConsistencyError(f"variational residual {residual:.3g} exceeds {tol.residual:.1g}")
    return PhasePair(s1, s2), residual


def step(curve: CurveModel, pair: PhasePair, tol: Tolerances = DEFAULT_TOL) -> PhasePair:
    """Apply the map through the tangent-circle construction.

    ``s2`` is the root in ``(s1, s1*)`` of
    ``(gamma(s2) - gamma(s1)) ^ gamma'(s2) - R (1 + gamma'(s2) . gamma'(s1))``
    with ``R`` the radius of :func:`tangent_circle_radius`.  The result is
    checked against the variational law ``H2(s0, s1) + H1(s1, s2) = 0``.
    """
    return _advance(curve, pair, tol, _geometric_theta, True)[0]


def step_variational(curve: CurveModel, pair: PhasePair, tol: Tolerances = DEFAULT_TOL) -> PhasePair:
    """Apply the map by solving ``H2(s0, s1) + H1(s1, s2) = 0`` for ``s2``."""
    return _advance(curve, pair, tol, _variational_theta, False)[0]


def step_checked(curve: CurveModel, pair: PhasePair, tol: Tolerances = DEFAULT_TOL) -> PhasePair:
    """Run both constructions and raise :class:`ConsistencyError` if they disagree."""
    geo_pair = step(curve, pair, tol)
    var_pair = step_variational(curve, pair, tol)
    if abs(geo_pair.s1 - var_pair.s1) > tol.consistency * max(1.0, curve.total_length):
        raise ConsistencyError(
            f"geometric s2 = {geo_pair.s1:.17g}, variational s2 = {var_pair.s1:.17g}"
        )
    return geo_pair


def iterate(curve: CurveModel, pair: PhasePair, n: int, tol: Tolerances = DEFAULT_TOL) -> OrbitTrace:
    """Apply :func:`step` ``n`` times, recording vertices and residuals."""
    if n < 1:
        raise ValueError("iterate needs n >= 1")
    s0 = np.empty(n + 1)
    s1 = np.empty(n + 1)
    res = np.empty(n)
    s0[0], s1[0] = pair.s0, pair.s1
    current = pair
    for i in range(n):
        try:
            current, res[i] = _advance(curve, current, tol, _geometric_theta, True)
        except Exception as exc:
            raise StepError(i + 1, exc) from exc
        s0[i + 1], s1[i + 1] = current.s0, current.s1
    vertices = _vertices(curve, s0, s1)
    return OrbitTrace(s0=s0, s1=s1, vertices=vertices, residuals=res)


def _vertices(curve, s0, s1):
    turns = np.floor(s0 / curve.total_length) * curve.total_length
    th0, th1 = _thetas(curve, s0 - turns, s1 - turns)
    return geo.intersection(geo.Frame(curve, th0), geo.Frame(curve, th1)).T


def pair_from_exterior_point(curve: CurveModel, point) -> PhasePair:
    """Tangency parameters of the two tangent lines through an exterior point.

    The visible arc is where the point lies beyond the support line,
    ``P . n(theta) > h(theta)``; its ends are the negative and positive
    tangency points.  ``s0`` is returned in ``[0, l)``.
    """
    px, py = map(float, point)
    n = 4096
    grid = TWO_PI * np.arange(n + 1) / n

    def f(theta):
        return px * np.cos(theta) + py * np.sin(theta) - curve.h_derivs(theta, 0)[0]

    vals = f(grid)
    if vals.max() <= 0.0:
        raise InsidePoint(f"point ({px}, {py}) is inside or on the curve")
    up = np.nonzero((vals[:-1] <= 0.0) & (vals[1:] > 0.0))[0]
    down = np.nonzero((vals[:-1] > 0.0) & (vals[1:] <= 0.0))[0]
    if vals.min() > 0.0 or len(up) != 1 or len(down) != 1:
        raise InsidePoint(f"point ({px}, {py}) is too close to the curve to resolve its tangents")
    i, j = up[0], down[0]
    th0 = brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    th1 = brentq(f, grid[j], grid[j + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if th1 < th0:
        th1 += TWO_PI
    s0 = float(curve.s_of_theta(th0))
    return PhasePair(s0, s0 + float(curve.s_of_theta(th1) - curve.s_of_theta(th0)))
