"""Phase estimation on a single-qubit phase gate.

A dyadic phase is read out exactly; any other phase spreads over the
neighbouring outcomes with the |sin(N d pi) / (N sin(d pi))|^2 profile.
"""
import math

import numpy as np

from qspline.qpe import (
    PhaseEstimationConfig,
    analytic_distribution,
    good_set_bound,
    good_set_probability,
    run_qpe,
)
from qspline.statevector import Operator, make_basis_state


def gate(theta):
    return Operator(np.diag([1.0, np.exp(2j * np.pi * theta)]), unitary=True)


eigenstate = make_basis_state(1, 1)  # |1> picks up e^{2 pi i theta}

# theta = 3/8 fits in three bits
out = run_qpe(gate(3 / 8), eigenstate, PhaseEstimationConfig(3))
print("theta = 3/8 :", np.round(out.distribution, 12))

# theta = 1/3 does not
out = run_qpe(gate(1 / 3), eigenstate, PhaseEstimationConfig(3))
print("theta = 1/3 :", np.round(out.distribution, 4))
print("closed form :", np.round(analytic_distribution(1 / 3, 3), 4))
y0, y1 = out.two_candidates(1 / 3)
print(f"mass on y = {y0}, {y1}: {out.probability([y0, y1]):.4f}  (4/pi^2 = {4 / math.pi**2:.4f})")

# spending p extra qubits buys confidence in m accuracy bits
for p in (2, 3, 4):
    cfg = PhaseEstimationConfig(3 + p, 3)
    mass = min(good_set_probability(t, cfg) for t in np.linspace(0.01, 0.99, 41))
    print(f"p = {p}: worst good-set mass {mass:.4f} >= {good_set_bound(p):.4f}")
