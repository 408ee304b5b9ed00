"""Vectorized kernels in normal-angle coordinates.

All functions take normal angles ``th0, th1`` (arrays broadcast together) and
return arclength-based quantities: partial derivatives are with respect to
arclength, converted through ``d/ds = k d/dtheta``.
"""

import numpy as np


def wedge(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def rot(v):
    """Rotation by +pi/2."""
    return np.stack([-v[1], v[0]])


class Frame:
    """Point, tangent and the first curvature data at normal angles ``theta``."""

    __slots__ = ("theta", "p", "t", "k", "k1")

    def __init__(self, curve, theta, with_k1=False):
        theta = np.asarray(theta, dtype=float)
        self.theta = theta
        self.p = curve.point(theta)
        self.t = curve.tangent(theta)
        if with_k1:
            kd = curve.curvature_derivs(theta, 1)
            self.k, self.k1 = kd[0], kd[1]
        else:
            self.k = 1.0 / curve.rho(theta)
            self.k1 = None

    @property
    def n(self):
        return np.stack([self.t[1], -self.t[0]])

    @property
    def g2(self):
        return self.k * rot(self.t)

    @property
    def g3(self):
        return -self.k**2 * self.t + self.k1 * rot(self.t)


def H_value(f0, f1):
    """Generating function: wedge ratio written with the mid-angle tangent.

    ``((g1 - g0) ^ (t1 - t0)) / (t0 ^ t1)`` simplifies exactly to
    ``(g1 - g0) . t(mid) / cos(delta / 2)``, which has no 0/0 at the diagonal.
    """
    half = 0.5 * (f1.theta - f0.theta)
    mid = 0.5 * (f0.theta + f1.theta)
    chord = f1.p - f0.p
    return (-chord[0] * np.sin(mid) + chord[1] * np.cos(mid)) / np.cos(half)


def tangent_lengths(f0, f1):
    """Signed distances ``|P g0|`` and ``|P g1|`` from the tangent intersection."""
    d = f1.theta - f0.theta
    chord = f1.p - f0.p
    sd = np.sin(d)
    a = dot(chord, f1.n) / sd
    b = -dot(chord, f0.n) / sd
    return a, b


def H1(f0, f1):
    """Closed form of dH/ds0 in wedge products."""
    dd = wedge(f0.t, f1.t)
    chord = f1.p - f0.p
    num = wedge(chord, f1.t - f0.t)
    g2 = f0.g2
    return -1.0 - wedge(chord, g2) / dd - num * wedge(g2, f1.t) / dd**2


def H2(f0, f1):
    """Closed form of dH/ds1 in wedge products."""
    dd = wedge(f0.t, f1.t)
    chord = f1.p - f0.p
    num = wedge(chord, f1.t - f0.t)
    g2 = f1.g2
    return 1.0 + wedge(chord, g2) / dd - num * wedge(f0.t, g2) / dd**2


def H11(f0, f1):
    """Closed form of d^2H/ds0^2; ``f0`` needs ``with_k1=True``."""
    dd = wedge(f0.t, f1.t)
    chord = f1.p - f0.p
    num = wedge(chord, f1.t - f0.t)
    g2, g3 = f0.g2, f0.g3
    x = wedge(chord, g2)
    y = wedge(g2, f1.t)
    return (
        wedge(f0.t, g2) / dd
        - wedge(chord, g3) / dd
        + 2.0 * x * y / dd**2
        + y / dd
        - num * wedge(g3, f1.t) / dd**2
        + 2.0 * num * y**2 / dd**3
    )


def radius(f0, f1):
    """Radius of the circle tangent to the curve at ``g1`` and to the line ``P g0``.

    Equals ``|P g1| tan(delta / 2)`` where ``P`` is the tangent intersection.
    """
    return wedge(f0.p - f1.p, f0.t) / (1.0 + dot(f0.t, f1.t))


def intersection(f0, f1):
    """Intersection of the tangent lines at ``f0`` and ``f1``."""
    a, _ = tangent_lengths(f0, f1)
    return f0.p + a * f0.t


def d_ds1(curve, fn, th0, th1, h_s):
    """Richardson-extrapolated central difference of ``fn(f0, f1)`` in ``s1``."""
    f0 = Frame(curve, th0)
    th1 = np.asarray(th1, dtype=float)
    ht = h_s / curve.rho(th1)

    def central(h):
        return (fn(f0, Frame(curve, th1 + h)) - fn(f0, Frame(curve, th1 - h))) / (2.0 * h)

    coarse = central(ht)
    fine = central(0.5 * ht)
    # d/ds1 = k1 d/dtheta1
    return (4.0 * fine - coarse) / 3.0 / curve.rho(th1)
