"""Measure remainder orders of the small-step expansions on a perturbed circle."""

from outer_billiard import CurveSpec, build_curve
from outer_billiard.expansions import check_H, check_lazutkin, check_map

curve = build_curve(CurveSpec.perturbed_circle())
for check in (check_H, check_map, check_lazutkin):
    print(check(curve).summary())
