"""Extended-precision geometry for remainder-order measurements.

Expansion remainders shrink like ``delta^6`` and fall far below double
precision at the small end of the fitted ranges, so the quantities entering
those fits are recomputed here with mpmath.  Pairs are parametrized by normal
angles; arclength differences are integrals of ``rho`` over the angle interval,
so no inversion of ``s(theta)`` is needed.
"""

import mpmath as mp

from .errors import BadSpec

DPS = 40


class PreciseCurve:
    def __init__(self, spec, dps=DPS):
        self.spec = spec
        self.dps = dps
        if spec.kind not in ("circle", "ellipse", "fourier_support"):
            raise BadSpec(f"no precise evaluator for {spec.kind!r}")

    def h(self, th, j=0):
        spec = self.spec
        if spec.kind == "circle":
            return mp.mpf(spec.radius) if j == 0 else mp.mpf(0)
        if spec.kind == "ellipse":
            a2, b2 = mp.mpf(spec.a) ** 2, mp.mpf(spec.b) ** 2
            f = lambda t: mp.sqrt(a2 * mp.cos(t) ** 2 + b2 * mp.sin(t) ** 2)
            return f(th) if j == 0 else mp.diff(f, th, j)
        out = mp.mpf(0)
        for n, cn, sn in spec.coeffs:
            shift = n * th + j * mp.pi / 2
            out += mp.mpf(n) ** j * (cn * mp.cos(shift) + sn * mp.sin(shift))
        return out

    def rho(self, th):
        if self.spec.kind == "ellipse":
            a, b = mp.mpf(self.spec.a), mp.mpf(self.spec.b)
            h2 = (a * mp.cos(th)) ** 2 + (b * mp.sin(th)) ** 2
            return (a * b) ** 2 / h2 ** mp.mpf(1.5)
        return self.h(th) + self.h(th, 2)

    def point(self, th):
        h0, h1 = self.h(th), self.h(th, 1)
        c, s = mp.cos(th), mp.sin(th)
        return (h0 * c - h1 * s, h0 * s + h1 * c)

    def arc(self, th0, th1):
        """Arclength between normal angles ``th0 < th1``."""
        return mp.quad(self.rho, [th0, th1])

    def lazutkin_arc(self, th0, th1):
        return mp.quad(lambda t: mp.cbrt(self.rho(t)), [th0, th1])

    def H(self, th0, th1):
        p0, p1 = self.point(th0), self.point(th1)
        mid, half = (th0 + th1) / 2, (th1 - th0) / 2
        return ((p1[0] - p0[0]) * -mp.sin(mid) + (p1[1] - p0[1]) * mp.cos(mid)) / mp.cos(half)

    def next_theta(self, th0, th1):
        """Normal angle of the image point through the tangent-circle construction."""
        p0, p1 = self.point(th0), self.point(th1)
        t0 = (-mp.sin(th0), mp.cos(th0))
        t1 = (-mp.sin(th1), mp.cos(th1))
        r = ((p0[0] - p1[0]) * t0[1] - (p0[1] - p1[1]) * t0[0]) / (1 + t0[0] * t1[0] + t0[1] * t1[1])

        def g(th2):
            p2 = self.point(th2)
            t2 = (-mp.sin(th2), mp.cos(th2))
            w = (p2[0] - p1[0]) * t2[1] - (p2[1] - p1[1]) * t2[0]
            return w - r * (1 + t2[0] * t1[0] + t2[1] * t1[1])

        # the image turns by about as much as the incoming pair
        guess = 2 * th1 - th0
        return mp.findroot(g, guess, tol=mp.mpf(10) ** (-self.dps + 5))


def precise(spec, dps=DPS):
    return PreciseCurve(spec, dps)


def workdps(dps=DPS):
    return mp.workdps(dps)
