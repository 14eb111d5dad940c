"""HHL on the tridiagonal system of a clamped cubic spline.

Spline systems have singular values in [1/sqrt(2), 4], so a fixed
evolution time and inversion constant work for every dataset.
"""
import numpy as np

from qspline.hhl import HHLConfig, LinearSystem, solve
from qspline.spline import SplineDataset, build_system, clamped, thomas_solve
from qspline.statevector import Statevector, fidelity

rng = np.random.default_rng(3)
x = np.cumsum(np.concatenate([[0.0], rng.uniform(0.2, 2.0, 7)]))
ds = SplineDataset(x, np.sin(x))
system = build_system(ds, clamped())
print("A =\n", np.round(system.to_dense(), 3))

M = thomas_solve(system).M
target = Statevector(M / np.linalg.norm(M))

for bits in (4, 6, 8, 10, 12):
    res = solve(LinearSystem(system.to_dense(), system.rhs), HHLConfig.for_spline(bits))
    print(f"{bits:2d} phase bits: fidelity {fidelity(res.solution_state, target):.8f}"
          f"  success {res.success_probability:.4f}"
          f"  ||M||/||d|| estimate {res.norm_estimate:.4f} (exact {np.linalg.norm(M) / np.linalg.norm(system.rhs):.4f})")
