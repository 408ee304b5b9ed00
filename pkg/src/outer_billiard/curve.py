"""Strictly convex closed curves described by their support function.

A curve is parametrized by the angle ``theta`` of its outward normal.  With
support function ``h``, the boundary point is ``h n + h' t`` where
``n = (cos theta, sin theta)`` and ``t = (-sin theta, cos theta)`` is the unit
tangent of the counter-clockwise orientation, and the radius of curvature is
``rho = h + h''``.  Arclength is ``s(theta) = int_0^theta rho``, so ``s = 0``
sits at ``theta = 0`` and ``d/ds = (1/rho) d/dtheta``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _series
from .errors import BadSpec, NonConvex

TWO_PI = 2.0 * np.pi
VALIDATION_GRID = 4096
KINDS = ("circle", "ellipse", "fourier_support")


@dataclass(frozen=True)
class CurveSpec:
    """Parameters of a convex curve.

    ``coeffs`` holds ``(n, cos_amplitude, sin_amplitude)`` triples of the
    support function; the ``n = 0`` cosine amplitude is the mean width term.
    """

    kind: str
    radius: float | None = None
    a: float | None = None
    b: float | None = None
    coeffs: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadSpec(f"unknown curve kind {self.kind!r}")
        if self.kind == "circle":
            if self.radius is None or not self.radius > 0:
                raise BadSpec("circle requires radius > 0")
        elif self.kind == "ellipse":
            if self.a is None or self.b is None or not self.a >= self.b > 0:
                raise BadSpec("ellipse requires a >= b > 0")
        else:
            if not self.coeffs:
                raise BadSpec("fourier_support requires coefficients")
            clean = []
            for item in self.coeffs:
                if len(item) != 3:
                    raise BadSpec(f"coefficient {item!r} is not (n, cn, sn)")
                n, cn, sn = item
                if int(n) != n or n < 0:
                    raise BadSpec(f"harmonic index {n!r} must be a non-negative integer")
                clean.append((int(n), float(cn), float(sn)))
            object.__setattr__(self, "coeffs", tuple(clean))

    @classmethod
    def circle(cls, radius=1.0):
        return cls("circle", radius=float(radius))

    @classmethod
    def ellipse(cls, a, b):
        return cls("ellipse", a=float(a), b=float(b))

    @classmethod
    def fourier(cls, coeffs):
        return cls("fourier_support", coeffs=tuple(tuple(c) for c in coeffs))

    @classmethod
    def perturbed_circle(cls, amplitude=0.05, harmonic=3, mean=1.0):
        """Support function ``mean + amplitude cos(harmonic theta)``."""
        return cls.fourier([(0, mean, 0.0), (harmonic, amplitude, 0.0)])

    def rotated(self, angle):
        """Same curve rotated by ``angle`` about the origin."""
        if self.kind == "circle":
            return self
        if self.kind == "ellipse":
            raise BadSpec("ellipse specs carry no orientation; rotate a fourier_support spec instead")
        out = []
        for n, cn, sn in self.coeffs:
            c, s = np.cos(n * angle), np.sin(n * angle)
            # h(theta - angle) expanded back onto cos/sin(n theta)
            out.append((n, cn * c - sn * s, cn * s + sn * c))
        return CurveSpec.fourier(out)

    def to_dict(self):
        if self.kind == "circle":
            return {"kind": "circle", "radius": self.radius}
        if self.kind == "ellipse":
            return {"kind": "ellipse", "a": self.a, "b": self.b}
        return {"kind": self.kind, "coeffs": [list(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise BadSpec("curve spec must be a JSON object")
        allowed = {"kind", "radius", "a", "b", "coeffs"}
        unknown = set(data) - allowed
        if unknown:
            raise BadSpec(f"unknown fields in curve spec: {sorted(unknown)}")
        if "kind" not in data:
            raise BadSpec("curve spec needs a 'kind'")
        coeffs = data.get("coeffs") or ()
        try:
            return cls(
                data["kind"],
                radius=data.get("radius"),
                a=data.get("a"),
                b=data.get("b"),
                coeffs=tuple(tuple(c) for c in coeffs),
            )
        except TypeError as exc:
            raise BadSpec(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadSpec(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())

    def to_json(self):
        return json.dumps(self.to_dict())


@dataclass
class CurveJet:
    """Local data at arclength ``s``.

    ``gamma[n]`` is the n-th arclength derivative of the position (``gamma[0]``
    the point itself); ``k`` and ``k1..k4`` are the curvature and its
    arclength derivatives.  Fields are arrays when evaluated at many points,
    with the vector component on the first axis.
    """

    s: np.ndarray
    theta: np.ndarray
    k: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k4: np.ndarray
    gamma: list = field(default_factory=list)

    @property
    def point(self):
        return self.gamma[0]

    @property
    def tangent(self):
        return self.gamma[1]


class PeriodicPrimitive:
    """Primitive ``F(theta) = int_0^theta f`` of a positive 2*pi-periodic ``f``.

    The Fourier series of ``f`` is obtained from ``n`` samples and integrated
    term by term, which is spectrally accurate for smooth ``f``.  The inverse
    uses a dense monotone table for the initial guess followed by Newton
    iterations with the exact derivative ``f``.
    """

    def __init__(self, f: Callable, n: int):
        self.f = f
        grid = TWO_PI * np.arange(n) / n
        c = np.fft.rfft(f(grid)) / n
        self.mean = c[0].real
        a = 2.0 * c[1:].real
        b = -2.0 * c[1:].imag
        if n % 2 == 0:
            a, b = a[:-1], b[:-1]
        scale = max(abs(self.mean), 1e-300)
        keep = np.nonzero(np.hypot(a, b) > 1e-15 * scale)[0]
        m = keep[-1] + 1 if keep.size else 0
        self.modes = np.arange(1, m + 1, dtype=float)
        self.a = a[:m]
        self.b = b[:m]
        self.period = TWO_PI * self.mean
        self._grid = np.linspace(0.0, TWO_PI, 8 * n + 1)
        self._table = self._reduced(self._grid)

    def _reduced(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.modes.size == 0:
            return self.mean * theta
        flat = theta.reshape(-1)
        out = self.mean * flat
        chunk = 4096
        for i in range(0, flat.size, chunk):
            nt = np.outer(flat[i : i + chunk], self.modes)
            out[i : i + chunk] += (np.sin(nt) @ (self.a / self.modes)) + (
                (1.0 - np.cos(nt)) @ (self.b / self.modes)
            )
        return out.reshape(theta.shape)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        turns = np.floor(theta / TWO_PI)
        return turns * self.period + self._reduced(theta - turns * TWO_PI)

    def inverse(self, value, tol=1e-15):
        value = np.asarray(value, dtype=float)
        turns = np.floor(value / self.period)
        r = value - turns * self.period
        theta = np.interp(r, self._table, self._grid)
        for _ in range(12):
            step = (self._reduced(theta) - r) / self.f(theta)
            theta = theta - step
            if np.all(np.abs(step) <= tol * TWO_PI):
                break
        return theta + turns * TWO_PI


class CurveModel:
    """Immutable evaluated curve.

    Build with :func:`build_curve`.  Methods taking ``theta`` work on normal
    angles; the public ones taking ``s`` convert through the arclength table.
    """

    def __init__(self, spec: CurveSpec, resolution: int = 1024):
        self.spec = spec
        self.resolution = int(resolution)
        if spec.kind == "ellipse":
            a, b = spec.a, spec.b
            self._ell = (0.5 * (a * a + b * b), 0.5 * (a * a - b * b))
        grid = TWO_PI * np.arange(VALIDATION_GRID) / VALIDATION_GRID
        rho = self.rho(grid)
        if not np.all(np.isfinite(rho)) or rho.min() <= 0.0:
            raise NonConvex(
                f"radius of curvature h + h'' reaches {rho.min():.6g} <= 0; curve is not strictly convex"
            )
        self.curvature_bounds = (1.0 / rho.max(), 1.0 / rho.min())
        self._arc = PeriodicPrimitive(self.rho, self.resolution)
        self._laz = PeriodicPrimitive(lambda t: np.cbrt(self.rho(t)), self.resolution)
        self.total_length = self._arc.period
        self.lazutkin_constant = self._laz.period

    def __repr__(self):
        return f"CurveModel({self.spec!r}, length={self.total_length:.12g})"

    # support function ---------------------------------------------------
    def h_derivs(self, theta, order=6):
        """Array of ``h^(j)(theta)`` for ``j = 0..order``."""
        theta = np.asarray(theta, dtype=float)
        spec = self.spec
        out = np.zeros((order + 1,) + theta.shape)
        if spec.kind == "circle":
            out[0] = spec.radius
        elif spec.kind == "ellipse":
            mean, amp = self._ell
            u = amp * _series.cos_series(theta, order, freq=2.0)
            u[0] = u[0] + mean
            out = _series.to_derivatives(_series.sqrt(u))
        else:
            for n, cn, sn in spec.coeffs:
                for j in range(order + 1):
                    shift = n * theta + j * np.pi / 2
                    out[j] += float(n) ** j * (cn * np.cos(shift) + sn * np.sin(shift))
        return out

    def rho(self, theta):
        """Radius of curvature ``ds/dtheta``."""
        if self.spec.kind == "ellipse":
            theta = np.asarray(theta, dtype=float)
            a, b = self.spec.a, self.spec.b
            h2 = (a * np.cos(theta)) ** 2 + (b * np.sin(theta)) ** 2
            return (a * b) ** 2 / (h2 * np.sqrt(h2))
        d = self.h_derivs(theta, 2)
        return d[0] + d[2]

    def point(self, theta):
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        if self.spec.kind == "ellipse":
            a2, b2 = self.spec.a**2, self.spec.b**2
            h = np.sqrt(a2 * c * c + b2 * s * s)
            return np.stack([a2 * c / h, b2 * s / h])
        d = self.h_derivs(theta, 1)
        return np.stack([d[0] * c - d[1] * s, d[0] * s + d[1] * c])

    @staticmethod
    def tangent(theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack([-np.sin(theta), np.cos(theta)])

    def curvature_derivs(self, theta, order=4):
        """Arclength derivatives ``k, k', ..., k^(order)`` at normal angle ``theta``.

        Exact chain rule through ``d/ds = (1/rho) d/dtheta`` carried out on
        truncated Taylor series in ``theta``.
        """
        theta = np.asarray(theta, dtype=float)
        hc = _series.from_derivatives(self.h_derivs(theta, order + 2))
        j = np.arange(order + 1).reshape((-1,) + (1,) * theta.ndim)
        rho = hc[: order + 1] + hc[2:] * (j + 2) * (j + 1)
        inv_rho = _series.recip(rho)
        f = inv_rho.copy()
        out = [f[0]]
        for _ in range(order):
            f = _series.mul(_series.deriv(f), inv_rho)
            out.append(f[0])
        return np.array(out)

    # arclength ------------------------------------------------------------
    def s_of_theta(self, theta):
        return self._arc(theta)

    def theta_of_s(self, s):
        return self._arc.inverse(s)

    def lazutkin_theta(self, theta):
        """``int_0^theta rho^(1/3) dtheta = int k^(2/3) ds`` (unnormalized)."""
        return self._laz(theta)

    def jet_theta(self, theta, order=3, s=None):
        theta = np.asarray(theta, dtype=float)
        kd = self.curvature_derivs(theta, 4)
        if s is None:
            s = self.s_of_theta(theta)
        gamma = [self.point(theta)]
        if order >= 1:
            t = self.tangent(theta)
            jt = np.stack([-t[1], t[0]])
            gamma.append(t)
            # gamma^(n) = a_n t + b_n J t, with (a, b)' = (a' - k b, b' + k a)
            kser = _series.from_derivatives(kd)
            a = np.zeros((len(kser) + 1,) + kser.shape[1:])
            b = np.zeros_like(a)
            a[0] = 1.0
            for _ in range(2, order + 1):
                m = len(a) - 1
                a, b = (
                    _series.deriv(a) - _series.mul(b, kser)[:m],
                    _series.deriv(b) + _series.mul(a, kser)[:m],
                )
                gamma.append(a[0] * t + b[0] * jt)
        return CurveJet(s=np.asarray(s), theta=theta, k=kd[0], k1=kd[1], k2=kd[2], k3=kd[3], k4=kd[4], gamma=gamma)


def build_curve(spec: CurveSpec, resolution: int = 1024) -> CurveModel:
    """Evaluate ``spec`` into a :class:`CurveModel`.

    Raises :class:`NonConvex` when ``h + h''`` is not positive on the
    validation grid and :class:`BadSpec` for invalid parameters.
    """
    if resolution < 256:
        raise BadSpec("resolution must be at least 256")
    return CurveModel(spec, resolution)


def jet_at(curve: CurveModel, s, order: int = 3) -> CurveJet:
    """Position, derivatives up to ``order`` (<= 6) and curvature jet at ``s``."""
    if not 0 <= order <= 6:
        raise BadSpec("jet order must be between 0 and 6")
    s = np.asarray(s, dtype=float)
    return curve.jet_theta(curve.theta_of_s(s), order=order, s=s)


def antipodal(curve: CurveModel, s):
    """Parameter ``s*`` with parallel tangent, lifted to lie in ``(s, s + l)``."""
    theta = curve.theta_of_s(np.asarray(s, dtype=float))
    return curve.s_of_theta(theta + np.pi)


def periodic_quadrature(curve: CurveModel, integrand: Callable, n: int | None = None):
    """``int_0^l f(jet(s)) ds`` by the trapezoid rule in the normal angle."""
    n = n or curve.resolution
    theta = TWO_PI * np.arange(n) / n
    jet = curve.jet_theta(theta, order=1)
    return float(np.sum(integrand(jet) * curve.rho(theta)) * TWO_PI / n)


def holder_bound(curve: CurveModel):
    """Upper bound ``(2 pi)^(2/3) l^(1/3)`` for the Lazutkin constant."""
    return TWO_PI ** (2.0 / 3.0) * curve.total_length ** (1.0 / 3.0)
