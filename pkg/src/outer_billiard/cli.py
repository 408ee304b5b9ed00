"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 bad curve spec, 3 failure of the
billiard dynamics, 4 numerical failure.  Numbers are printed with 17
significant digits and data files carry no timestamps, so identical runs
produce identical output.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .billiard import PhasePair, Tolerances, _fmt, _write_csv, iterate, pair_from_exterior_point
from .curve import CurveSpec, build_curve, periodic_quadrature
from .errors import BilliardError, StepError
from .expansions import check_H, check_lazutkin, check_map
from .generating import mather_scan
from .lazutkin import caustic_drift, confocal_pair, ellipse_point, orthogonality_check
from .spectrum import fit_coeffs, isoperimetric_defect, orbit_asymptotics_check

EXIT_OK, EXIT_USAGE, EXIT_SPEC, EXIT_DYNAMICS, EXIT_NUMERICAL = range(5)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_curve(args):
    if not args.spec:
        raise UsageError("--spec is required")
    try:
        spec = CurveSpec.load(args.spec)
    except OSError as exc:
        raise UsageError(f"cannot read spec: {exc}") from exc
    return build_curve(spec)


def _tolerances(args):
    tol = Tolerances()
    if args.tol_residual is not None:
        if args.tol_residual <= 0:
            raise UsageError("--tol-residual must be positive")
        tol.residual = args.tol_residual
    if args.tol_root is not None:
        if args.tol_root <= 0:
            raise UsageError("--tol-root must be positive")
        tol.root = args.tol_root
    return tol


def _line(label, value):
    if isinstance(value, (float, np.floating)):
        value = _fmt(value)
    print(f"{label}: {value}")


def cmd_curve_info(args):
    curve = _load_curve(args)
    kmin, kmax = curve.curvature_bounds
    turning = periodic_quadrature(curve, lambda jet: jet.k)
    _line("length", curve.total_length)
    _line("lazutkin_L", curve.lazutkin_constant)
    _line("k_min", float(kmin))
    _line("k_max", float(kmax))
    _line("total_turning", turning)
    _line("defect", isoperimetric_defect(curve))
    return EXIT_OK


def cmd_orbit(args):
    curve = _load_curve(args)
    tol = _tolerances(args)
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if args.px is not None and args.py is not None:
        pair = pair_from_exterior_point(curve, (args.px, args.py))
    elif args.s0 is not None and args.s1 is not None:
        pair = PhasePair(args.s0, args.s1)
    else:
        raise UsageError("give either --s0/--s1 or --px/--py")
    trace = iterate(curve, pair, args.steps, tol)
    if args.out:
        trace.to_csv(args.out)
    else:
        trace.to_csv(sys.stdout)
    print(f"max_residual: {_fmt(np.max(np.abs(trace.residuals)))}", file=sys.stderr)
    return EXIT_OK


def _ladder(qmin, qmax):
    if qmin < 3:
        raise UsageError("--qmin must be at least 3")
    if qmax < 8 * qmin:
        raise UsageError("--qmax must be at least 8 * qmin")
    out = [qmin]
    while out[-1] * 2 <= qmax:
        out.append(out[-1] * 2)
    return out


def cmd_beta(args):
    q_list = _ladder(args.qmin, args.qmax)
    curve = _load_curve(args)
    report = fit_coeffs(curve, q_list, workers=args.workers)
    for key in ("b1", "b3", "b5"):
        print(
            f"{key}: fitted {_fmt(report.fitted[key])} theoretical {_fmt(report.theoretical[key])} "
            f"relative_error {_fmt(report.relative_errors[key])}"
        )
    _line("defect", report.defect)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json() + "\n")
        report.to_csv(_csv_path(args.out))
    return EXIT_OK


def _csv_path(path):
    return path[:-5] + ".csv" if path.endswith(".json") else path + ".csv"


DEFAULT_EXPANSION_CURVE = CurveSpec.perturbed_circle()


def cmd_expansion_check(args):
    curve = _load_curve(args) if args.spec else build_curve(DEFAULT_EXPANSION_CURVE)
    if args.which == "orbit":
        rep = orbit_asymptotics_check(curve, [32, 64, 128, 256])
        results = [
            ("orbit_position", rep.q, rep.position_error, rep.position_slope, 2.0, 0.3),
            ("orbit_gap", rep.q, rep.gap_error, rep.gap_slope, 3.0, 0.3),
        ]
        for name, xs, ys, slope, expected, band in results:
            verdict = "PASS" if abs(slope - expected) <= band else "FAIL"
            print(f"{name}: slope {_fmt(slope)} (expected {expected} +/- {band}) {verdict}")
        _line("a2_discrepancy", rep.a2_discrepancy)
        _line("a2_discrepancy_flipped", rep.a2_discrepancy_flipped)
        rows = [[name, _fmt(x), _fmt(y)] for name, xs, ys, *_ in results for x, y in zip(xs, ys)]
    else:
        check = {"H": check_H, "map": check_map, "lazutkin": check_lazutkin}[args.which]
        rep = check(curve)
        print(f"{rep.name}: slope {_fmt(rep.slope)} (expected {rep.expected} +/- {rep.band}) "
              f"{'PASS' if rep.passed else 'FAIL'}")
        rows = [[rep.name, _fmt(x), _fmt(y)] for x, y in zip(rep.steps, rep.remainders)]
    if args.out:
        _write_csv(args.out, ["check", "step", "remainder"], rows)
    return EXIT_OK


def cmd_caustic(args):
    if args.a is None or args.b is None or args.lam is None:
        raise UsageError("--a, --b and --lambda are required")
    if not args.lam > 0:
        raise UsageError("--lambda must be positive")
    if not args.a >= args.b > 0:
        raise UsageError("need a >= b > 0")
    inner, outer = confocal_pair(args.a, args.b, args.lam)
    probe = caustic_drift(inner, args.lam, args.t0, args.steps, _tolerances(args))
    rng = np.random.default_rng(args.seed)
    ortho = max(
        orthogonality_check(inner, outer, ellipse_point(outer.spec, t))
        for t in rng.uniform(0.0, 2.0 * np.pi, args.chords)
    )
    _line("max_deviation", probe.max_deviation)
    _line("max_deviation_over_length", probe.relative_max_deviation)
    _line("max_orthogonality_residual", ortho)
    if args.out:
        probe.to_csv(args.out)
    return EXIT_OK


def cmd_mather_scan(args):
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    curve = _load_curve(args)
    scan = mather_scan(curve, args.grid, _tolerances(args))
    _line("max_M", scan.maximum)
    _line("min_M", float(np.min(scan.values)))
    if args.out:
        rows = [[_fmt(a), _fmt(u), _fmt(m)] for a, u, m in scan.rows()]
        _write_csv(args.out, ["s0", "fraction", "M"], rows)
    return EXIT_OK


# dynamics failures are fatal for the orbit command only; elsewhere they are numerical
COMMANDS = {
    "curve-info": (cmd_curve_info, EXIT_DYNAMICS),
    "orbit": (cmd_orbit, EXIT_DYNAMICS),
    "beta": (cmd_beta, EXIT_NUMERICAL),
    "expansion-check": (cmd_expansion_check, EXIT_NUMERICAL),
    "caustic": (cmd_caustic, EXIT_NUMERICAL),
    "mather-scan": (cmd_mather_scan, EXIT_NUMERICAL),
}


def build_parser():
    parser = _Parser(prog="outer-billiard", description="Outer length billiard toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", help="curve spec JSON file")
        p.add_argument("--out", help="output file")
        p.add_argument("--tol-residual", type=float, default=None)
        p.add_argument("--tol-root", type=float, default=None)

    common(sub.add_parser("curve-info", help="length, Lazutkin constant, curvature range, defect"))

    p = sub.add_parser("orbit", help="iterate the map and write the orbit as CSV")
    common(p)
    p.add_argument("--s0", type=float)
    p.add_argument("--s1", type=float)
    p.add_argument("--px", type=float)
    p.add_argument("--py", type=float)
    p.add_argument("--steps", type=int, default=100)

    p = sub.add_parser("beta", help="beta(1/q) ladder and coefficient fit")
    common(p)
    p.add_argument("--qmin", type=int, default=8)
    p.add_argument("--qmax", type=int, default=128)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("expansion-check", help="remainder slope of an expansion")
    common(p)
    p.add_argument("--which", choices=["H", "map", "lazutkin", "orbit"], required=True)

    p = sub.add_parser("caustic", help="confocal ellipse caustic probe")
    common(p, spec=False)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--t0", type=float, default=0.3, help="ellipse parameter of the start point")
    p.add_argument("--chords", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("mather-scan", help="H22 + H11 on a phase grid")
    common(p)
    p.add_argument("--grid", type=int, default=50)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    func, dynamics_code = COMMANDS[args.command]
    try:
        return func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BilliardError as exc:
        category = exc.category
        label = type(exc.error).__name__ if isinstance(exc, StepError) else type(exc).__name__
        q = getattr(exc, "q", None)
        where = f" (q = {q})" if q is not None else ""
        print(f"{label}{where}: {exc}", file=sys.stderr)
        if category == "spec":
            return EXIT_SPEC
        if category == "dynamics":
            return dynamics_code
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
