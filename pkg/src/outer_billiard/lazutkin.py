"""Lazutkin coordinates and caustics of confocal ellipses.

In the coordinate ``x(s) = (1/L) int_0^s k^(2/3)`` the map is close to the
integrable shear ``(x, y) -> (x + y, y)`` near the boundary.  Outside an
ellipse every confocal ellipse is an invariant curve of the vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .billiard import (
    DEFAULT_TOL,
    PhasePair,
    Tolerances,
    _fmt,
    _write_csv,
    iterate,
    pair_from_exterior_point,
    step,
)
from .curve import CurveModel, CurveSpec, build_curve
from .errors import BadParams, DegeneratePair


class LazutkinChart:
    """Forward map ``x(s)`` and its inverse on the universal cover."""

    def __init__(self, curve: CurveModel):
        self.curve = curve
        self.L = curve.lazutkin_constant

    def x(self, s):
        s = np.asarray(s, dtype=float)
        return self.curve.lazutkin_theta(self.curve.theta_of_s(s)) / self.L

    def x_of_theta(self, theta):
        return self.curve.lazutkin_theta(theta) / self.L

    def theta_of_x(self, x):
        return self.curve._laz.inverse(np.asarray(x, dtype=float) * self.L)

    def inverse(self, x):
        """``a0(x)``: arclength whose Lazutkin coordinate is ``x``."""
        return self.curve.s_of_theta(self.theta_of_x(x))

    __call__ = x


def lazutkin_x(curve: CurveModel, s):
    return LazutkinChart(curve).x(s)


def conjugated_step(curve: CurveModel, x, y, tol: Tolerances = DEFAULT_TOL, chart=None):
    """The map in Lazutkin coordinates, ``(x, y) -> (x + y, y')``."""
    if y <= 0.0:
        raise DegeneratePair("y must be positive")
    chart = chart or LazutkinChart(curve)
    s0 = float(chart.inverse(x))
    s1 = float(chart.inverse(x + y))
    s2 = step(curve, PhasePair(s0, s1), tol).s1
    # y' = x(s2) - x(s1), with x(s1) = x + y up to the inverse tolerance
    return x + y, float(chart.x(s2) - chart.x(s1))


def confocal_ellipse(a, b, lam) -> CurveSpec:
    """Ellipse with semi-axes ``sqrt(a^2 + lam)``, ``sqrt(b^2 + lam)``; same foci as ``(a, b)``."""
    if not (a >= b > 0):
        raise BadParams(f"need a >= b > 0, got a = {a}, b = {b}")
    if not lam > 0:
        raise BadParams(f"lambda must be positive, got {lam}")
    A, B = np.sqrt(a * a + lam), np.sqrt(b * b + lam)
    if A == B:
        return CurveSpec.circle(A)
    return CurveSpec.ellipse(A, B)


def _axes(spec: CurveSpec):
    if spec.kind == "circle":
        return spec.radius, spec.radius
    if spec.kind == "ellipse":
        return spec.a, spec.b
    raise BadParams("outer curve must be an ellipse or a circle")


def ellipse_deviation(spec: CurveSpec, points):
    """Signed distance-like residual of ``points`` (shape ``(m, 2)``) from an axis-aligned ellipse.

    The normal angle ``theta`` of the ellipse at the point with the same
    gradient direction is used, and ``P . n(theta) - h(theta)`` returned.
    """
    A, B = _axes(spec)
    p = np.atleast_2d(np.asarray(points, dtype=float))
    theta = np.arctan2(p[:, 1] / B**2, p[:, 0] / A**2)
    c, s = np.cos(theta), np.sin(theta)
    h = np.sqrt((A * c) ** 2 + (B * s) ** 2)
    return p[:, 0] * c + p[:, 1] * s - h


def ellipse_point(spec: CurveSpec, t):
    A, B = _axes(spec)
    return np.array([A * np.cos(t), B * np.sin(t)])


def _inner_axes_like(curve: CurveModel):
    spec = curve.spec
    if spec.kind in ("circle", "ellipse"):
        return _axes(spec)
    mean = sum(cn for n, cn, _ in spec.coeffs if n == 0)
    return mean, mean


def candidate_caustic(inner: CurveModel, lam) -> CurveSpec:
    """Confocal ellipse of an ellipse; for other curves, the circle for the mean width."""
    a, b = _inner_axes_like(inner)
    return confocal_ellipse(a, b, lam)


@dataclass
class CausticProbe:
    params: dict
    steps: int
    vertices: np.ndarray
    deviations: np.ndarray
    scale: float = 1.0
    extra: dict = field(default_factory=dict)

    @property
    def max_deviation(self):
        return float(np.max(np.abs(self.deviations)))

    @property
    def relative_max_deviation(self):
        return self.max_deviation / self.scale

    def to_csv(self, path_or_file):
        rows = [
            [str(i), _fmt(p[0]), _fmt(p[1]), _fmt(d)]
            for i, (p, d) in enumerate(zip(self.vertices, self.deviations))
        ]
        _write_csv(path_or_file, ["step", "Px", "Py", "deviation"], rows)


def caustic_drift(inner: CurveModel, lam, start, n: int, tol: Tolerances = DEFAULT_TOL) -> CausticProbe:
    """Iterate from a point of the candidate caustic and record the distance of each vertex from it.

    ``start`` is either a point ``(x, y)`` on the caustic or a scalar ellipse
    parameter ``t`` giving ``(A cos t, B sin t)``.
    """
    gamma = candidate_caustic(inner, lam)
    if np.ndim(start) == 0:
        p0 = ellipse_point(gamma, float(start))
    else:
        p0 = np.asarray(start, dtype=float)
    scale = inner.total_length
    if abs(ellipse_deviation(gamma, p0)[0]) > 1e-12 * max(1.0, scale):
        raise BadParams("start point is not on the caustic")
    pair = pair_from_exterior_point(inner, p0)
    trace = iterate(inner, pair, n, tol)
    dev = ellipse_deviation(gamma, trace.vertices)
    return CausticProbe(
        params={"lambda": float(lam), "caustic": gamma.to_dict(), "inner": inner.spec.to_dict()},
        steps=n,
        vertices=trace.vertices,
        deviations=dev,
        scale=scale,
    )


def orthogonality_check(inner: CurveModel, outer: CurveModel | CurveSpec, p0):
    """Cosine of the angle between the chord ``P0 P1`` and ``Q - R``.

    ``P0 P1`` is the chord of the outer ellipse tangent to the inner curve at
    ``Q`` (the forward tangency of ``P0``) and ``R`` is the intersection of the
    outer tangents at ``P0`` and ``P1``.
    """
    spec = outer.spec if isinstance(outer, CurveModel) else outer
    A, B = _axes(spec)
    p0 = np.asarray(p0, dtype=float)
    pair = pair_from_exterior_point(inner, p0)
    q = inner.point(inner.theta_of_s(pair.s1))
    u = q - p0
    m = np.array([1.0 / A**2, 1.0 / B**2])
    # P0 lies on the ellipse, so the second intersection is at t = -2 (P0 M u) / (u M u)
    t = -2.0 * np.dot(p0 * m, u) / np.dot(u * m, u)
    p1 = p0 + t * u
    n0, n1 = p0 * m, p1 * m
    det = n0[0] * n1[1] - n0[1] * n1[0]
    if abs(det) < 1e-14:
        raise DegeneratePair("outer tangents at P0 and P1 are parallel")
    # tangent line at P on the ellipse: P . M X = 1
    r = np.array([n1[1] - n0[1], n0[0] - n1[0]]) / det
    chord, qr = p1 - p0, q - r
    return float(abs(np.dot(chord, qr)) / (np.linalg.norm(chord) * np.linalg.norm(qr)))


def confocal_pair(a, b, lam, resolution=1024):
    """Build the inner ellipse and its confocal caustic."""
    inner_spec = CurveSpec.circle(a) if a == b else CurveSpec.ellipse(a, b)
    return build_curve(inner_spec, resolution), build_curve(confocal_ellipse(a, b, lam), resolution)
