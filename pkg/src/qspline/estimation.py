"""Amplitude estimation and swap-test inner products.

An instance is a state ``|phi> = sin(theta)|0>|u> + cos(theta)|1>|v>`` with
a distinguished flag qubit. The Grover operator
``G = (2|phi><phi| - I)(Y (x) I)``, ``Y = diag(-1, 1)`` on the flag, has
eigenphases ``+-2 theta`` on the plane spanned by the two branches, so
phase estimation on ``G`` started from ``|phi>`` reads out ``theta``.

Phase-to-angle convention: an outcome ``y`` gives phase ``phi = y / N``
in ``[0, 1)``; both ``phi`` and ``1 - phi`` correspond to the same
``theta``, so we fold to ``min(phi, 1 - phi)`` and set ``theta = pi phi``.
Because of the factor ``pi`` the phase register is sized for precision
``epsilon / pi`` whenever ``theta`` itself must be within ``epsilon``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .qpe import HADAMARD, PhaseEstimationConfig, run_qpe
from .statevector import (
    Operator,
    Statevector,
    apply_controlled,
    apply_operator,
    branch,
    inner_product,
    make_basis_state,
    probabilities_on,
)
from .stateprep import amplitude_encode

__all__ = [
    "AmplitudeInstance",
    "AngleEstimate",
    "build_grover_operator",
    "estimate_angle",
    "estimate_amplitude",
    "hadamard_test_state",
    "swap_test_real",
    "swap_test_full",
]


@dataclass(frozen=True)
class AmplitudeInstance:
    """``|phi>`` together with the index of its flag qubit.

    ``sin(theta)`` is the amplitude norm of the flag-0 branch.
    """

    phi: Statevector
    flag: int

    def __post_init__(self):
        if not 0 <= self.flag < self.phi.num_qubits:
            raise InputError(f"flag qubit {self.flag} outside the register")
        if abs(self.phi.norm() - 1.0) > 1e-10:
            raise InputError("instance state must be normalized")

    @classmethod
    def from_angle(cls, theta: float, u: Statevector, v: Statevector) -> "AmplitudeInstance":
        """``sin(theta)|0>|u> + cos(theta)|1>|v>`` with the flag on top."""
        if u.dim != v.dim:
            raise InputError("branch states must share a dimension")
        amps = np.concatenate([math.sin(theta) * u.amplitudes, math.cos(theta) * v.amplitudes])
        return cls(Statevector(amps), u.num_qubits)

    @property
    def theta(self) -> float:
        """Exact angle, computed classically (oracle use only)."""
        p0 = probabilities_on(self.phi, [self.flag])[0]
        return math.asin(math.sqrt(min(1.0, max(0.0, p0))))

    def branches(self) -> tuple:
        """Normalized ``(|u>, |v>)``; ``None`` for a branch with zero weight."""
        out = []
        for bit in (0, 1):
            sub, prob = branch(self.phi, [self.flag], [bit], normalize=False)
            out.append(Statevector(sub.amplitudes / math.sqrt(prob)) if prob > 1e-28 else None)
        return tuple(out)


def build_grover_operator(instance: AmplitudeInstance) -> Operator:
    phi = instance.phi.amplitudes
    dim = phi.size
    reflect = 2.0 * np.outer(phi, phi.conj()) - np.eye(dim)
    flag_bits = (np.arange(dim) >> instance.flag) & 1
    y_diag = np.where(flag_bits == 0, -1.0, 1.0)
    return Operator(reflect * y_diag[None, :], unitary=True)


@dataclass(frozen=True)
class AngleEstimate:
    theta: float
    phase: float
    outcome: int
    phase_bits: int

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)


def estimate_angle(
    instance: AmplitudeInstance,
    epsilon: float,
    delta: float = 0.1,
    mode: str = "exact",
    shots: int = 64,
    seed: int = 0,
) -> AngleEstimate:
    """Phase estimation on the Grover operator; ``|theta_hat - theta| <= epsilon``.

    ``mode="exact"`` reads the most likely outcome from the exact
    distribution, ``mode="shots"`` takes the most frequent outcome of a
    seeded sample.
    """
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    config = PhaseEstimationConfig.from_precision(epsilon / math.pi, delta)
    outcome = run_qpe(build_grover_operator(instance), instance.phi, config)
    if mode == "exact":
        y = outcome.most_likely()
    elif mode == "shots":
        counts = np.random.default_rng(seed).multinomial(
            shots, np.clip(outcome.distribution, 0, None) / outcome.distribution.sum()
        )
        y = int(np.argmax(counts))
    else:
        raise InputError(f"unknown mode {mode!r}")
    phase = y / config.N
    folded = min(phase, 1.0 - phase)
    return AngleEstimate(math.pi * folded, phase, y, config.n)


def estimate_amplitude(
    instance: AmplitudeInstance, epsilon: float, delta: float = 0.1, **kwargs
) -> tuple[float, float]:
    """``(sin(theta), cos(theta))`` estimated to precision ``epsilon``."""
    est = estimate_angle(instance, epsilon, delta, **kwargs)
    return est.sin_theta, est.cos_theta


def hadamard_test_state(x: Statevector, y: Statevector) -> AmplitudeInstance:
    """``(|0>(|x>+|y>) + |1>(|x>-|y>)) / 2`` built by the interference circuit.

    The flag sits above the data register; ``|x>`` is prepared on the
    flag-0 branch and ``|y>`` on the flag-1 branch.
    """
    if x.dim != y.dim:
        raise InputError(f"size mismatch: {x.num_qubits} vs {y.num_qubits} qubits")
    k = x.num_qubits
    data = list(range(k))
    ux = Operator(amplitude_encode(x.amplitudes)[0].unitary())
    uy = Operator(amplitude_encode(y.amplitudes)[0].unitary())
    state = make_basis_state(k + 1, 0)
    state = apply_operator(state, HADAMARD, [k])
    state = apply_controlled(state, ux, [k], data, control_values=[0])
    state = apply_controlled(state, uy, [k], data, control_values=[1])
    state = apply_operator(state, HADAMARD, [k])
    return AmplitudeInstance(state, k)


def swap_test_real(
    x: Statevector,
    y: Statevector,
    epsilon: float,
    delta: float = 0.1,
    mode: str = "exact",
    shots: int = 64,
    seed: int = 0,
) -> float:
    """Estimate ``Re<x|y>`` to within ``epsilon``.

    ``Prob(flag = 0) = (1 + Re<x|y>) / 2 = sin^2(theta)``, so
    ``Re<x|y> = -cos(2 theta)``; the slope bound ``|d/dtheta| <= 2`` sets
    the angle precision to ``epsilon / 2``.
    """
    instance = hadamard_test_state(x.normalized(), y.normalized())
    est = estimate_angle(instance, epsilon / 2.0, delta, mode=mode, shots=shots, seed=seed)
    return -math.cos(2.0 * est.theta)


def swap_test_full(
    x: Statevector, y: Statevector, epsilon: float, delta: float = 0.1, **kwargs
) -> complex:
    """Estimate ``<x|y>``; real and imaginary parts each get ``epsilon / 2``.

    ``Im<x|y> = -Re<x|iy>``.
    """
    re = swap_test_real(x, y, epsilon / 2.0, delta, **kwargs)
    iy = Statevector(1j * y.amplitudes)
    im = -swap_test_real(x, iy, epsilon / 2.0, delta, **kwargs)
    return complex(re, im)


def exact_real_overlap(x: Statevector, y: Statevector) -> float:
    """Oracle counterpart of :func:`swap_test_real`."""
    return inner_product(x.normalized(), y.normalized()).real
