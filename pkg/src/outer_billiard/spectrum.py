"""Minimal circumscribed polygons and the coefficients of the beta function.

A q-periodic orbit of rotation number ``1/q`` is a cyclic configuration
``s_0 < s_1 < ... < s_q = s_0 + l`` critical for the action
``W = sum H(s_i, s_{i+1})``; the minimum of ``W`` is the perimeter of the
smallest circumscribed q-gon and ``beta(1/q) = W / q``.

The expansion ``beta(1/q) ~ b1/q + b3/q^3 + b5/q^5 + ...`` has known
leading coefficients ``b1 = l``, ``b3 = L^3 / 12`` and
``b5 = L^4 int (k^(4/3) / 120 + k^(-8/3) k'^2 / 2160) ds``, with ``L`` the
Lazutkin constant ``int k^(2/3) ds``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from . import _geometry as geo
from .billiard import _fmt, _write_csv
from .curve import CurveModel, PeriodicPrimitive, periodic_quadrature
from .errors import BadParams, IllConditionedFit, MonotonicityLoss, NoConvergence
from .generating import FD_STEP
from .lazutkin import LazutkinChart

MAX_ITER = 200
FIT_COND_LIMIT = 1e12


@dataclass
class OrbitConfig:
    q: int
    s: np.ndarray
    action: float
    residual: float
    length: float
    iterations: int = 0
    min_eigenvalue: float = float("nan")

    @property
    def eps(self):
        """Gaps ``s_{i+1} - s_i`` including the closing one."""
        return np.diff(np.append(self.s, self.s[0] + self.length))

    @property
    def beta(self):
        return self.action / self.q


# --- action and its derivatives -------------------------------------------


class _Action:
    """Action of a cyclic configuration with vectorized derivatives."""

    def __init__(self, curve: CurveModel, q: int):
        self.curve = curve
        self.q = q
        self.length = curve.total_length

    def thetas(self, s):
        """Normal angles of ``s_0..s_q`` on a continuous lift."""
        ext = np.append(s, s[0] + self.length)
        return self.curve.theta_of_s(ext)

    def value(self, s):
        th = self.thetas(s)
        f = geo.Frame(self.curve, th)
        f0, f1 = _slice(f, slice(0, -1)), _slice(f, slice(1, None))
        return float(np.sum(geo.H_value(f0, f1)))

    def gradient(self, s):
        th = self.thetas(s)
        f = geo.Frame(self.curve, th)
        f0, f1 = _slice(f, slice(0, -1)), _slice(f, slice(1, None))
        h1 = geo.H1(f0, f1)  # pair i: derivative in s_i
        h2 = geo.H2(f0, f1)  # pair i: derivative in s_{i+1}
        return h1 + np.roll(h2, 1)

    def hessian(self, s):
        """Diagonal and cyclic super-diagonal (``[i, i+1]`` entries, last one wrapping)."""
        th = self.thetas(s)
        t0, t1 = th[:-1], th[1:]
        f0 = geo.Frame(self.curve, t0, with_k1=True)
        f1 = geo.Frame(self.curve, t1)
        h_s = FD_STEP * self.length
        h11 = geo.H11(f0, f1)
        h12 = geo.d_ds1(self.curve, geo.H1, t0, t1, h_s)
        h22 = geo.d_ds1(self.curve, geo.H2, t0, t1, h_s)
        return h11 + np.roll(h22, 1), h12


def _slice(frame, sl):
    out = object.__new__(geo.Frame)
    out.theta = frame.theta[sl]
    out.p = frame.p[:, sl]
    out.t = frame.t[:, sl]
    out.k = frame.k[sl]
    out.k1 = None
    return out


def solve_cyclic_tridiagonal(diag, off, rhs):
    """Solve ``M x = rhs`` with ``M`` symmetric cyclic tridiagonal.

    ``off[i]`` couples ``i`` and ``i + 1`` (mod n).  The corner entries are
    removed by a Sherman-Morrison rank-one correction and the remaining
    tridiagonal systems solved with a banded solver.
    """
    n = len(diag)
    if n < 3:
        raise BadParams("cyclic system needs n >= 3")
    corner = off[-1]
    gamma = -diag[0]
    d = diag.astype(float).copy()
    d[0] -= gamma
    d[-1] -= corner * corner / gamma
    ab = np.zeros((3, n))
    ab[0, 1:] = off[:-1]
    ab[1] = d
    ab[2, :-1] = off[:-1]
    u = np.zeros(n)
    u[0], u[-1] = gamma, corner
    y = solve_banded((1, 1), ab, rhs)
    z = solve_banded((1, 1), ab, u)
    # v = (1, 0, ..., 0, corner / gamma)
    vy = y[0] + corner / gamma * y[-1]
    vz = z[0] + corner / gamma * z[-1]
    return y - z * (vy / (1.0 + vz))


def cyclic_matrix(diag, off):
    n = len(diag)
    m = np.diag(diag) + np.diag(off[:-1], 1) + np.diag(off[:-1], -1)
    m[0, -1] += off[-1]
    m[-1, 0] += off[-1]
    return m


# --- minimization ------------------------------------------------------------


def lazutkin_guess(curve: CurveModel, q: int, phase=0.0, chart=None):
    """Points equidistributed in the Lazutkin coordinate."""
    chart = chart or LazutkinChart(curve)
    return np.asarray(chart.inverse((np.arange(q) + phase) / q), dtype=float)


def _ordered(curve, s):
    eps = np.diff(np.append(s, s[0] + curve.total_length))
    if np.any(eps <= 0.0):
        return False
    th = curve.theta_of_s(np.append(s, s[0] + curve.total_length))
    return bool(np.all(np.diff(th) < np.pi - 1e-9))


def minimize_orbit(
    curve: CurveModel,
    q: int,
    init: OrbitConfig | np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = MAX_ITER,
    check_minimum: bool = True,
) -> OrbitConfig:
    """Minimal-action q-periodic configuration of rotation number ``1/q``.

    Levenberg-Marquardt damped Newton iterations on the cyclic configuration:
    the damping ``mu`` is shrunk after an accepted step and grown whenever a
    step would raise the action or break the cyclic ordering.  The damping
    also regularizes the singular Hessian of integrable curves, whose periodic
    orbits come in one-parameter families.  A critical point whose Hessian
    has a negative eigenvalue is left along that eigenvector and the
    iteration restarted.
    """
    q = int(q)
    if q < 3:
        raise BadParams("q must be at least 3")
    if init is None:
        s = lazutkin_guess(curve, q)
    else:
        s = np.array(init.s if isinstance(init, OrbitConfig) else init, dtype=float)
        if len(s) != q:
            raise BadParams(f"initial configuration has {len(s)} points, expected {q}")
    if not _ordered(curve, s):
        raise MonotonicityLoss("initial configuration is not cyclically ordered")
    act = _Action(curve, q)
    threshold = tol * curve.total_length
    total_iter = 0
    for _ in range(MAX_ESCAPES + 1):
        s, g, it = _newton(curve, act, s, threshold, max_iter - total_iter)
        total_iter += it
        # keep s_0 in [0, l) for reproducibility
        s = s - np.floor(s[0] / curve.total_length) * curve.total_length
        cfg = OrbitConfig(
            q=q,
            s=s,
            action=act.value(s),
            residual=float(np.max(np.abs(g))),
            length=curve.total_length,
            iterations=total_iter,
        )
        if not check_minimum:
            return cfg
        diag, off = act.hessian(s)
        lam, vec = np.linalg.eigh(cyclic_matrix(diag, off))
        cfg.min_eigenvalue = float(lam[0])
        # finite-difference noise in the Hessian is ~1e-11; saddles of soft
        # phase modes still show eigenvalues around -1e-8 at q ~ 16
        if lam[0] >= -SADDLE_TOL * max(1.0, np.max(np.abs(diag))):
            return cfg
        # a saddle (typically a symmetric configuration): leave it downhill
        s = _escape(curve, act, s, vec[:, 0])
    raise NoConvergence(f"q = {q}: critical configurations found are not minima")


MAX_ESCAPES = 4
SADDLE_TOL = 1e-9


def _escape(curve, act, s, direction):
    w = act.value(s)
    amp = 0.25 * np.min(np.diff(np.append(s, s[0] + curve.total_length)))
    direction = direction / np.max(np.abs(direction))
    while amp > 1e-10:
        for sign in (1.0, -1.0):
            trial = s + sign * amp * direction
            if _ordered(curve, trial) and act.value(trial) < w:
                return trial
        amp *= 0.5
    raise NoConvergence("cannot leave a saddle configuration")


def _newton(curve, act, s, threshold, max_iter):
    q = act.q
    w = act.value(s)
    g = act.gradient(s)
    mu = 1e-8
    it = 0
    while np.max(np.abs(g)) >= threshold:
        if it >= max_iter:
            raise NoConvergence(f"q = {q}: gradient {np.max(np.abs(g)):.3g} after {it} iterations")
        it += 1
        diag, off = act.hessian(s)
        scale = np.mean(np.abs(diag))
        while True:
            dx = solve_cyclic_tridiagonal(diag + mu * scale, off, -g)
            trial = s + dx
            if _ordered(curve, trial):
                w_new = act.value(trial)
                g_new = act.gradient(trial)
                if w_new < w:
                    break
                # at the minimum the action only changes at rounding level
                if w_new - w <= 1e-13 * abs(w) and np.max(np.abs(g_new)) < np.max(np.abs(g)):
                    break
            mu *= 8.0
            if mu > 1e12:
                raise MonotonicityLoss(f"q = {q}: damping exhausted without an admissible step")
        s, w, g = trial, w_new, g_new
        mu = max(mu / 8.0, 1e-12)
    # polish: the threshold leaves soft modes (eigenvalues ~ (2 pi / q)^3)
    # loosely resolved, so keep going while the gradient still shrinks
    for _ in range(POLISH_STEPS):
        diag, off = act.hessian(s)
        dx = solve_cyclic_tridiagonal(diag + mu * np.mean(np.abs(diag)), off, -g)
        if np.max(np.abs(dx)) < 1e-14 * act.length:
            break
        trial = s + dx
        if not _ordered(curve, trial):
            break
        g_new = act.gradient(trial)
        if np.max(np.abs(g_new)) > 0.5 * np.max(np.abs(g)):
            break
        s, g = trial, g_new
        it += 1
    return s, g, it


POLISH_STEPS = 6


def action_gradient(curve: CurveModel, s):
    return _Action(curve, len(s)).gradient(np.asarray(s, dtype=float))


def total_action(curve: CurveModel, s):
    return _Action(curve, len(s)).value(np.asarray(s, dtype=float))


def polygon_perimeter(curve: CurveModel, cfg: OrbitConfig):
    """Perimeter of the circumscribed polygon traced by the tangent intersections."""
    th = _Action(curve, cfg.q).thetas(cfg.s)
    f = geo.Frame(curve, th)
    verts = geo.intersection(_slice(f, slice(0, -1)), _slice(f, slice(1, None)))
    closed = np.concatenate([verts, verts[:, :1]], axis=1)
    return float(np.sum(np.hypot(*np.diff(closed, axis=1))))


def beta_of(curve: CurveModel, q: int) -> float:
    return minimize_orbit(curve, q).beta


# --- theoretical coefficients ---------------------------------------------


def theoretical_coeffs(curve: CurveModel):
    """``(b1, b3, b5)`` from the length, the Lazutkin constant and a curvature quadrature."""
    L = curve.lazutkin_constant

    def integrand(jet):
        return jet.k ** (4.0 / 3.0) / 120.0 + jet.k ** (-8.0 / 3.0) * jet.k1**2 / 2160.0

    return curve.total_length, L**3 / 12.0, L**4 * periodic_quadrature(curve, integrand)


def isoperimetric_defect(curve: CurveModel) -> float:
    """``L^3 / 4 - pi^2 l``; zero for circles and negative otherwise."""
    return curve.lazutkin_constant**3 / 4.0 - np.pi**2 * curve.total_length


# --- fitting ----------------------------------------------------------------


def fit_powers(n_values: int, even: bool = False):
    """Inverse powers of ``q`` in the fit basis.

    Odd powers ``1, 3, 5, 7, 9`` (optionally with ``2, 4``) truncated to the
    number of data points, so a five-rung ladder is fitted exactly through
    ``q^-9``.
    """
    powers = [1, 2, 3, 4, 5, 7, 9] if even else [1, 3, 5, 7, 9]
    return powers[: min(len(powers), n_values)]


def fit_beta(q_list, betas, powers, weight_power=5.0):
    """Weighted least squares of ``beta`` on ``q^-p``; returns ``{p: coefficient}``."""
    q = np.asarray(q_list, dtype=float)
    X = np.stack([q ** (-p) for p in powers], axis=1)
    w = q**weight_power
    A = X * w[:, None]
    scale = np.abs(A).max(axis=0)
    An = A / scale
    cond = np.linalg.cond(An)
    if not np.isfinite(cond) or cond > FIT_COND_LIMIT:
        raise IllConditionedFit(f"design matrix condition number {cond:.3g} exceeds {FIT_COND_LIMIT:.0e}")
    coef = np.linalg.lstsq(An, np.asarray(betas) * w, rcond=None)[0] / scale
    return {p: float(c) for p, c in zip(powers, coef)}


def _check_ladder(q_list):
    q = sorted(int(v) for v in q_list)
    if len(q) < 4 or len(set(q)) != len(q):
        raise BadParams("the q ladder needs at least 4 distinct values")
    if q[0] < 3:
        raise BadParams("q must be at least 3")
    if q[-1] < 8 * q[0]:
        raise BadParams("the q ladder must span at least a factor 8")
    return q


def compute_orbits(curve: CurveModel, q_list, workers=None):
    """Minimal orbits for every q, computed concurrently; returned in ``q_list`` order."""
    q_list = [int(q) for q in q_list]
    if workers == 1 or len(q_list) == 1:
        return [minimize_orbit(curve, q) for q in q_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(minimize_orbit, curve, q) for q in q_list]
        out = []
        for q, fut in zip(q_list, futures):
            try:
                out.append(fut.result())
            except NoConvergence as exc:
                exc.q = q
                raise
        return out


@dataclass
class BetaReport:
    q: list
    beta: list
    fitted: dict
    theoretical: dict
    defect: float
    length: float
    even_fit: dict = field(default_factory=dict)

    @property
    def relative_errors(self):
        return {
            key: abs(self.fitted[key] - self.theoretical[key]) / abs(self.theoretical[key])
            for key in ("b1", "b3", "b5")
        }

    def to_dict(self):
        out = {
            "q": list(self.q),
            "beta": [float(b) for b in self.beta],
            "fitted": {k: float(v) for k, v in self.fitted.items()},
            "theoretical": {k: float(v) for k, v in self.theoretical.items()},
            "relative_error": {k: float(v) for k, v in self.relative_errors.items()},
            "defect": float(self.defect),
        }
        if self.even_fit:
            out["even_fit"] = {k: float(v) for k, v in self.even_fit.items()}
        return out

    def to_json(self):
        # repr of floats round-trips; sort keys for byte-stable output
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self, path_or_file):
        rows = [
            [str(q), _fmt(b), _fmt(b - self.length / q)] for q, b in zip(self.q, self.beta)
        ]
        _write_csv(path_or_file, ["q", "beta", "beta_minus_ell_over_q"], rows)


def fit_coeffs(curve: CurveModel, q_list, even=False, workers=None) -> BetaReport:
    """Compute ``beta(1/q)`` along a ladder and fit the odd coefficients.

    With ``even=True`` a second fit including ``q^-2`` and ``q^-4`` is
    stored in ``even_fit`` under keys ``b2``, ``b4`` (and the odd ones).
    """
    q = _check_ladder(q_list)
    orbits = compute_orbits(curve, q, workers)
    betas = [o.beta for o in orbits]
    coef = fit_beta(q, betas, fit_powers(len(q)))
    fitted = {f"b{p}": v for p, v in coef.items()}
    b1, b3, b5 = theoretical_coeffs(curve)
    report = BetaReport(
        q=q,
        beta=betas,
        fitted=fitted,
        theoretical={"b1": b1, "b3": b3, "b5": b5},
        defect=isoperimetric_defect(curve),
        length=curve.total_length,
    )
    if even:
        coef_e = fit_beta(q, betas, fit_powers(len(q), even=True))
        report.even_fit = {f"b{p}": v for p, v in coef_e.items()}
    return report


# --- orbit asymptotics ------------------------------------------------------


@dataclass
class AsymptoticsReport:
    """Orbit profile errors per q and the a2 comparison at the largest q.

    ``a2`` is only defined up to a multiple of ``a0'`` (a shift of the
    phase), so both the measured and the closed-form ``a2`` are divided by
    ``a0'`` and centred before comparing.  ``a2_discrepancy`` compares them
    as is and ``a2_discrepancy_flipped`` against the negated closed form.
    """

    q: list
    position_error: list
    gap_error: list
    position_slope: float
    gap_slope: float
    a2_empirical_max: float
    a2_formula_max: float
    a2_discrepancy: float
    a2_discrepancy_flipped: float
    c: float


def a2_formula(curve: CurveModel, chart: LazutkinChart | None = None):
    """Callable ``x -> a2(x)`` from the closed form, with its constant ``c``.

    ``a2(x) = k^(-2/3)(a0(x)) (int_0^x L^3 f(a0(t)) dt + c x)`` where
    ``f = (9 k'' k^(-7/3) - 12 k'^2 k^(-10/3)) / 810 + k^(2/3) / 15`` and
    ``c`` makes ``L^3 f + c`` mean-free.  Since ``dx = k^(2/3) ds / L`` the
    integral is a periodic primitive in the normal angle.
    """
    chart = chart or LazutkinChart(curve)
    L = chart.L

    def g(theta):
        k, k1, k2 = curve.curvature_derivs(theta, 2)
        f = (9.0 * k2 * k ** (-7.0 / 3.0) - 12.0 * k1**2 * k ** (-10.0 / 3.0)) / 810.0 + k ** (2.0 / 3.0) / 15.0
        return L**2 * f * k ** (2.0 / 3.0) * curve.rho(theta)

    prim = PeriodicPrimitive(g, curve.resolution)
    total = prim.period
    c = -total

    def a2(x):
        x = np.asarray(x, dtype=float)
        th = chart.theta_of_x(x)
        k = 1.0 / curve.rho(th)
        return k ** (-2.0 / 3.0) * (prim(th) + c * x)

    return a2, c


def orbit_profile(curve: CurveModel, cfg: OrbitConfig, chart: LazutkinChart | None = None):
    """Deviations of an orbit from the leading asymptotic profile.

    The phase ``x0`` is the mean of ``x(s_k) - k/q``; positions are compared
    with ``a0(x0 + k/q)`` and gaps with ``b1/q + b2/q^2`` at the same points.
    """
    chart = chart or LazutkinChart(curve)
    q = cfg.q
    L = chart.L
    k_idx = np.arange(q)
    x0 = float(np.mean(chart.x(cfg.s) - k_idx / q))
    xk = x0 + k_idx / q
    a0 = chart.inverse(xk)
    th = chart.theta_of_x(xk)
    kd = curve.curvature_derivs(th, 1)
    b1 = L * kd[0] ** (-2.0 / 3.0)
    b2 = -(L**2) * kd[1] * kd[0] ** (-7.0 / 3.0) / 3.0
    pos = cfg.s - a0
    gap = cfg.eps - b1 / q - b2 / q**2
    return xk, pos, gap


def orbit_asymptotics_check(curve: CurveModel, q_list, workers=None) -> AsymptoticsReport:
    q = sorted(int(v) for v in q_list)
    chart = LazutkinChart(curve)
    orbits = compute_orbits(curve, q, workers)
    pos_err, gap_err = [], []
    last = None
    for cfg in orbits:
        xk, pos, gap = orbit_profile(curve, cfg, chart)
        pos_err.append(float(np.max(np.abs(pos))))
        gap_err.append(float(np.max(np.abs(gap))))
        last = (cfg.q, xk, pos)
    a2, c = a2_formula(curve, chart)
    qq, xk, pos = last
    a0_prime = chart.L * curve.rho(chart.theta_of_x(xk)) ** (2.0 / 3.0)
    emp = qq**2 * pos / a0_prime
    form = a2(xk) / a0_prime
    emp -= emp.mean()
    form -= form.mean()
    return AsymptoticsReport(
        q=q,
        position_error=pos_err,
        gap_error=gap_err,
        position_slope=-_slope(q, pos_err),
        gap_slope=-_slope(q, gap_err),
        a2_empirical_max=float(np.max(np.abs(emp))),
        a2_formula_max=float(np.max(np.abs(form))),
        a2_discrepancy=float(np.max(np.abs(emp - form))),
        a2_discrepancy_flipped=float(np.max(np.abs(emp + form))),
        c=float(c),
    )


def _slope(x, y):
    y = np.maximum(np.asarray(y, dtype=float), np.finfo(float).tiny)
    return float(np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(y), 1)[0])
