"""End to end: fit a spline with HHL and evaluate it with swap tests.

The scale of |M> is lost by normalization; one row of the system,
evaluated on swap-test estimates of three amplitudes, recovers it.
"""
import numpy as np

from qspline.pipeline import PipelineConfig, compare_report, quantum_evaluate, quantum_fit
from qspline.spline import SplineDataset, evaluate, fit, natural, periodic

ds = SplineDataset([0, 1, 2], [0, 1, 0])
qf = quantum_fit(ds, natural())
print("fidelity of |M>:", round(qf.diagnostics["fidelity"], 8))
print("recovered scale:", round(qf.scale, 5), " classical M:", fit(ds, natural()).M)

ev = quantum_evaluate(qf, 0.5)
print(f"S(0.5)  = {ev.S:.5f}  (classical {evaluate(ds, fit(ds, natural()), 0.5)[0]})")
print(f"S'(0.5) = {ev.S1:.5f},  S''(0.5) = {ev.S2:.5f},  budget {np.round(ev.error_budget, 5)}")
print(f"S''(1)  = {quantum_evaluate(qf, 1.0).S2:.5f}  (M_1 = -3)")

# a periodic curve through one period of a sine
t = np.linspace(0, 2 * np.pi, 9)
y = np.sin(t)
y[-1] = y[0]
rep = compare_report(SplineDataset(t, y), periodic(), np.linspace(0, 2 * np.pi, 7), PipelineConfig(phase_bits=10))
for row in rep["points"]:
    print(f"x = {row['x']:.3f}  classical {row['classical']['S']:+.5f}  quantum {row['quantum']['S']:+.5f}")
print("max |error|:", rep["max_abs_error"])
