"""Minimal circumscribed polygons of the unit circle.

For the disk the optimal q-gon is regular, so beta(1/q) = 2 tan(pi/q).  The
script compares the optimizer against that value and then fits the odd
coefficients of the expansion in 1/q.
"""

import numpy as np

from outer_billiard import CurveSpec, build_curve
from outer_billiard.spectrum import compute_orbits, fit_coeffs

curve = build_curve(CurveSpec.circle())
ladder = [8, 16, 32, 64, 128]

print(f"{'q':>5} {'beta':>22} {'2 tan(pi/q)':>22}")
for orbit in compute_orbits(curve, ladder):
    print(f"{orbit.q:5d} {orbit.beta:22.17g} {2 * np.tan(np.pi / orbit.q):22.17g}")

report = fit_coeffs(curve, ladder)
print()
for key in ("b1", "b3", "b5"):
    print(f"{key}: fitted {report.fitted[key]:.12g}  expected {report.theoretical[key]:.12g}")
