"""Truncated Taylor series arithmetic.

A series is an array ``c`` of shape ``(n + 1, ...)`` holding the normalized
coefficients ``c[j] = f^(j)(x0) / j!``; trailing axes are batch axes, so every
operation is vectorized over evaluation points.
"""

from math import factorial

import numpy as np


def mul(a, b):
    n = min(len(a), len(b))
    out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for j in range(n):
        for i in range(j + 1):
            out[j] = out[j] + a[i] * b[j - i]
    return out


def recip(a):
    out = np.zeros_like(a, dtype=float)
    out[0] = 1.0 / a[0]
    for j in range(1, len(a)):
        acc = 0.0
        for i in range(1, j + 1):
            acc = acc + a[i] * out[j - i]
        out[j] = -acc * out[0]
    return out


def sqrt(a):
    out = np.zeros_like(a, dtype=float)
    out[0] = np.sqrt(a[0])
    for j in range(1, len(a)):
        acc = 0.0
        for i in range(1, j):
            acc = acc + out[i] * out[j - i]
        out[j] = (a[j] - acc) / (2.0 * out[0])
    return out


def deriv(a):
    """Series of the derivative; one degree shorter."""
    j = np.arange(1, len(a)).reshape((-1,) + (1,) * (a.ndim - 1))
    return a[1:] * j


def cos_series(x0, n, freq=1.0):
    """Taylor coefficients of ``cos(freq * (x0 + t))`` in ``t`` up to degree n."""
    x0 = np.asarray(x0, dtype=float)
    out = np.empty((n + 1,) + x0.shape)
    for j in range(n + 1):
        out[j] = freq**j * np.cos(freq * x0 + j * np.pi / 2) / factorial(j)
    return out


def to_derivatives(c):
    """Convert normalized coefficients to plain derivatives ``f^(j)``."""
    scale = np.array([factorial(j) for j in range(len(c))], dtype=float)
    return c * scale.reshape((-1,) + (1,) * (c.ndim - 1))


def from_derivatives(d):
    scale = np.array([factorial(j) for j in range(len(d))], dtype=float)
    return d / scale.reshape((-1,) + (1,) * (d.ndim - 1))
