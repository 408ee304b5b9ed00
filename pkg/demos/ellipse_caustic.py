"""A confocal ellipse is an invariant curve of the outer map around an ellipse.

Start on the confocal ellipse with parameter lambda and iterate; every vertex
of the orbit should stay on it to rounding error.
"""

from outer_billiard.lazutkin import caustic_drift, confocal_pair

for a, b, lam in [(2, 1, 0.5), (2, 1, 1.0), (3, 1, 2.0)]:
    inner, outer = confocal_pair(a, b, lam)
    probe = caustic_drift(inner, lam, 0.7, 2000)
    print(f"a={a} b={b} lambda={lam}: outer axes {outer.spec.a:.6f} x {outer.spec.b:.6f}, "
          f"max deviation / length = {probe.relative_max_deviation:.2e}")
