"""Quantum phase estimation on the dense simulator.

Register layout for :func:`run_qpe` / :func:`run_qpe_superposed`: the
system occupies qubits ``0..s-1`` and the ``n`` phase qubits sit above it,
so a joint basis index is ``y * 2**s + k`` for phase value ``y`` and
system index ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BoundInapplicableError, InputError
from .statevector import (
    Operator,
    Statevector,
    apply_controlled,
    apply_operator,
    make_basis_state,
    probabilities_on,
    tensor,
)

__all__ = [
    "PhaseEstimationConfig",
    "PhaseOutcome",
    "qft_matrix",
    "apply_qft",
    "controlled_powers",
    "phase_estimation",
    "run_qpe",
    "run_qpe_superposed",
    "required_qubits",
    "good_set",
    "listed_good_set",
    "good_set_bound",
    "good_set_probability",
    "analytic_distribution",
]

HADAMARD = Operator(np.array([[1, 1], [1, -1]]) / math.sqrt(2), unitary=True)


def required_qubits(epsilon: float, delta: float) -> int:
    """Phase-register width for precision ``epsilon`` and failure ``delta``.

    ``ceil(log2 1/eps) + ceil(log2(2 + 1/(2 delta)))``.
    """
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 0.5:
        raise InputError(f"delta must lie in (0, 1/2), got {delta}")
    return _ceil_log2(1.0 / epsilon) + _ceil_log2(2.0 + 1.0 / (2.0 * delta))


def _ceil_log2(value: float) -> int:
    k = math.ceil(math.log2(value))
    # guard against log2 rounding at exact powers of two
    while 2.0**k < value:
        k += 1
    while k > 0 and 2.0 ** (k - 1) >= value:
        k -= 1
    return k


@dataclass(frozen=True)
class PhaseEstimationConfig:
    """``n`` phase qubits, of which ``m`` are accuracy bits (``p = n - m``)."""

    n: int
    m: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"need at least one phase qubit, got {self.n}")
        if self.m is not None and not 0 <= self.m <= self.n:
            raise InputError(f"accuracy bits m={self.m} must lie in [0, n={self.n}]")

    @classmethod
    def from_precision(cls, epsilon: float, delta: float) -> "PhaseEstimationConfig":
        n = required_qubits(epsilon, delta)
        return cls(n=n, m=_ceil_log2(1.0 / epsilon))

    @property
    def accuracy_bits(self) -> int:
        return self.n if self.m is None else self.m

    @property
    def p(self) -> int:
        return self.n - self.accuracy_bits

    @property
    def N(self) -> int:
        return 1 << self.n


def qft_matrix(n: int, inverse: bool = False) -> np.ndarray:
    """Dense QFT on ``n`` qubits: ``F[y, x] = exp(2 pi i x y / N) / sqrt(N)``."""
    N = 1 << n
    sign = -1.0 if inverse else 1.0
    k = np.arange(N)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / N) / math.sqrt(N)


def apply_qft(state: Statevector, qubits: Sequence[int], inverse: bool = False) -> Statevector:
    """QFT on the register ``qubits`` (``qubits[0]`` least significant).

    Evaluated with an orthonormal FFT along the register; equal to applying
    :func:`qft_matrix` with :func:`apply_operator`.
    """
    n = state.num_qubits
    qubits = list(qubits)
    if not qubits:
        return state
    axes = [n - 1 - q for q in reversed(qubits)]
    psi = state.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, axes, list(range(len(axes))))
    shape = psi.shape
    flat = psi.reshape(1 << len(qubits), -1)
    flat = np.fft.fft(flat, axis=0, norm="ortho") if inverse else np.fft.ifft(flat, axis=0, norm="ortho")
    psi = np.moveaxis(flat.reshape(shape), list(range(len(axes))), axes)
    return Statevector(psi.reshape(-1))


def controlled_powers(unitary: np.ndarray, n: int) -> list:
    """``[U, U^2, U^4, ..., U^(2^(n-1))]`` by repeated squaring."""
    powers = [np.asarray(unitary, dtype=complex)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ powers[-1])
    return powers


def phase_estimation(
    state: Statevector,
    unitary: Operator,
    system: Sequence[int],
    phase: Sequence[int],
    inverse: bool = False,
    powers: list | None = None,
    hadamards: bool = True,
) -> Statevector:
    """Hadamards, controlled ``U^(2^k)`` from ``phase[k]``, inverse QFT.

    With ``inverse=True`` the adjoint circuit is applied instead, which
    undoes a previous forward call exactly. ``hadamards=False`` skips the
    first layer for callers that already hold the uniform superposition.
    """
    system, phase = list(system), list(phase)
    if powers is None:
        powers = controlled_powers(unitary.matrix, len(phase))
    if not inverse:
        if hadamards:
            for q in phase:
                state = apply_operator(state, HADAMARD, [q])
        for k, q in enumerate(phase):
            state = apply_controlled(state, Operator(powers[k]), [q], system)
        return apply_qft(state, phase, inverse=True)
    state = apply_qft(state, phase, inverse=False)
    for k, q in reversed(list(enumerate(phase))):
        state = apply_controlled(state, Operator(powers[k].conj().T), [q], system)
    for q in phase:
        state = apply_operator(state, HADAMARD, [q])
    return state


@dataclass
class PhaseOutcome:
    """Exact outcome distribution over the ``N = 2**n`` phase values."""

    distribution: np.ndarray
    n: int

    @property
    def N(self) -> int:
        return 1 << self.n

    def most_likely(self) -> int:
        return int(np.argmax(self.distribution))

    def probability(self, outcomes) -> float:
        outs = {int(y) % self.N for y in np.atleast_1d(outcomes)}
        return float(self.distribution[sorted(outs)].sum())

    def two_candidates(self, theta: float) -> tuple[int, int]:
        """``(y_theta, y_theta + 1 mod N)`` bracketing ``theta``."""
        y = int(math.floor(theta * self.N)) % self.N
        return y, (y + 1) % self.N


def _validate(unitary: Operator, state: Statevector) -> None:
    if not unitary.unitary:
        mat = unitary.matrix
        if not np.allclose(mat.conj().T @ mat, np.eye(unitary.dim), rtol=0, atol=1e-10):
            raise InputError("phase estimation needs a unitary operator")
    if state.dim != unitary.dim:
        raise InputError(
            f"state dimension {state.dim} does not match operator dimension {unitary.dim}"
        )


def run_qpe_superposed(
    unitary: Operator, input_state: Statevector, config: PhaseEstimationConfig
) -> Statevector:
    """Joint phase-register/system state after the four-step procedure."""
    _validate(unitary, input_state)
    s = input_state.num_qubits
    # H^{(x)n}|0...0> written down directly
    uniform = Statevector(np.full(config.N, 1.0 / math.sqrt(config.N)))
    state = tensor(uniform, input_state)
    return phase_estimation(
        state, unitary, range(s), range(s, s + config.n), hadamards=False
    )


def run_qpe(
    unitary: Operator, eigenstate: Statevector, config: PhaseEstimationConfig
) -> PhaseOutcome:
    state = run_qpe_superposed(unitary, eigenstate, config)
    s = eigenstate.num_qubits
    return PhaseOutcome(probabilities_on(state, range(s, s + config.n)), config.n)


def analytic_distribution(theta: float, n: int) -> np.ndarray:
    """``|sin(N d pi) / (N sin(d pi))|^2`` with ``d = theta - y/N``."""
    N = 1 << n
    d = theta - np.arange(N) / N
    num = np.sin(N * np.pi * d)
    den = N * np.sin(np.pi * d)
    out = np.ones(N)
    ok = np.abs(den) > 1e-300
    out[ok] = (num[ok] / den[ok]) ** 2
    # d an integer: the sum of N unit phasors is N
    near = np.abs(np.sin(np.pi * d)) < 1e-13
    out[near] = 1.0
    return out


def listed_good_set(theta: float, config: PhaseEstimationConfig) -> set:
    """``{(2^p alpha_m + t) mod N : t = 0..2^p}`` with ``alpha_m`` the m-bit truncation."""
    m, p, N = config.accuracy_bits, config.p, config.N
    alpha = int(math.floor(theta * (1 << m)))
    return {((alpha << p) + t) % N for t in range((1 << p) + 1)}


def good_set(theta: float, config: PhaseEstimationConfig) -> set:
    """All outcomes ``y`` with circular distance ``|theta - y/N| <= 2^-m``.

    Superset of :func:`listed_good_set`; this is the event the failure bound
    ``1/(2(2^p - 2))`` controls.
    """
    N, m = config.N, config.accuracy_bits
    y = np.arange(N)
    dist = np.abs(theta - y / N)
    dist = np.minimum(dist, 1.0 - dist)
    return {int(v) for v in y[dist <= 2.0**-m + 1e-15]}


def good_set_bound(p: int) -> float:
    """``1 - 1/(2(2^p - 2))``; meaningful only for ``p >= 2``."""
    if p < 2:
        raise BoundInapplicableError(f"success bound is vacuous for p = {p} < 2")
    return 1.0 - 1.0 / (2.0 * ((1 << p) - 2))


def good_set_probability(theta: float, config: PhaseEstimationConfig) -> float:
    """Exact mass of :func:`good_set` from a simulated run on ``diag(1, e^{2 pi i theta})``."""
    if not 0 <= theta < 1:
        raise InputError(f"theta must lie in [0, 1), got {theta}")
    good_set_bound(config.p)
    u = Operator(np.diag([1.0, np.exp(2j * np.pi * theta)]), unitary=True)
    outcome = run_qpe(u, make_basis_state(1, 1), config)
    return outcome.probability(sorted(good_set(theta, config)))
