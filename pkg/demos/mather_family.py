"""Scan H22 + H11 over the phase space for curves approaching zero curvature.

The radius of curvature is 1 - c cos(3 theta); as c grows the minimum
curvature radius goes to zero.  Prints the extreme values of the scan.
"""

import numpy as np

from outer_billiard import build_curve
from outer_billiard.generating import mather_scan, rho_family_spec

for c in (0.5, 0.9, 0.99):
    scan = mather_scan(build_curve(rho_family_spec(c)), 30)
    print(f"c={c}: max {scan.maximum:.4g}  min {np.min(scan.values):.4g}")
