"""How well conditioned are spline systems?

Gershgorin-type intervals bound every singular value by 4; a random sweep
shows the condition number staying below 4 in practice.
"""
import numpy as np

from qspline.conditioning import condition_report, conditioning_sweep, gershgorin_sv_bounds
from qspline.spline import SplineDataset, build_system, natural

x = np.arange(8.0)
system = build_system(SplineDataset(x, np.cos(x)), natural())
b = gershgorin_sv_bounds(system)
print("singular values:", np.round(b.singular_values, 4))
print("intervals:      ", b.intervals.tolist())
print(condition_report(system).as_dict())

res = conditioning_sweep(2000, (2, 256), seed=0)
print(f"{res['trials']} random systems: max kappa {res['max_kappa']:.4f} (worst {res['worst']})")
print("kappa <= 4 sqrt 2:", res["bound_4sqrt2_ok"], " kappa <= 4:", res["bound_4_ok"])
