"""Amplitude-encoding state preparation.

Three routes to ``|x> = x / ||x||``:

* :func:`amplitude_encode` -- a binary tree of uniformly controlled
  Y-rotations followed by a diagonal phase layer.
* :func:`prepare_flat` -- a linear combination of basis states
  ``sum_j x_j |j>`` realized by the index-register LCU procedure; costs
  ``s / ||y|| = ||x||_1 / ||x||_2`` repetitions.
* :func:`prepare_binned` -- split ``x`` into magnitude bins whose entries
  differ by at most a factor two, prepare each bin flat, and recombine the
  bins with one more LCU round weighted by ``||y_j|| / ||x||``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.linalg import block_diag

from .errors import DegeneratePostselectionError, InputError
from .statevector import (
    Operator,
    Statevector,
    apply_controlled,
    apply_operator,
    branch,
    make_basis_state,
)

__all__ = [
    "PrepPlan",
    "LcuSpec",
    "BinDecomposition",
    "vector_kappa",
    "amplitude_encode",
    "lcu_combine",
    "prepare_flat",
    "bin_decompose",
    "prepare_binned",
]


def _as_target(x) -> np.ndarray:
    vec = np.asarray(x, dtype=complex).reshape(-1)
    if vec.size == 0:
        raise InputError("empty target vector")
    if not np.any(vec != 0):
        raise InputError("target vector is identically zero")
    return vec


def vector_kappa(x) -> float:
    """``max |x_k| / min_{x_k != 0} |x_k|``."""
    mags = np.abs(_as_target(x))
    nz = mags[mags > 0]
    return float(nz.max() / nz.min())


def _ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class PrepPlan:
    """Rotation-tree description of a state-preparation unitary.

    ``angles[level]`` holds ``2**level`` Y-rotation angles; level ``l``
    rotates qubit ``k - 1 - l`` conditioned on the ``l`` more significant
    qubits already fixed. ``phases`` is the final diagonal layer.
    """

    num_qubits: int
    angles: tuple
    phases: np.ndarray
    length: int

    @property
    def depth(self) -> int:
        return len(self.angles)

    def layers(self):
        """Yield ``(Operator, targets)`` pairs in application order."""
        k = self.num_qubits
        for level, angs in enumerate(self.angles):
            blocks = [_ry(a) for a in angs]
            targets = list(range(k - 1 - level, k))
            yield Operator(block_diag(*blocks)), targets
        if np.any(self.phases != 0):
            yield Operator(np.diag(np.exp(1j * self.phases))), list(range(k))

    def apply(self, state: Statevector, qubits: Sequence[int]) -> Statevector:
        """Run the plan on ``qubits`` (``qubits[0]`` least significant)."""
        qubits = list(qubits)
        if len(qubits) != self.num_qubits:
            raise InputError(f"plan needs {self.num_qubits} qubits, got {len(qubits)}")
        for op, local in self.layers():
            state = apply_operator(state, op, [qubits[t] for t in local])
        return state

    def unitary(self) -> np.ndarray:
        """Dense matrix of the full plan."""
        k = self.num_qubits
        mat = np.eye(1 << k, dtype=complex)
        for op, local in self.layers():
            # every layer acts on a contiguous block of the most significant qubits
            low = k - len(local)
            mat = np.kron(op.matrix, np.eye(1 << low)) @ mat
        return mat


def _plan_for(vec: np.ndarray) -> PrepPlan:
    k = max(0, (vec.size - 1).bit_length())
    padded = np.zeros(1 << k, dtype=complex)
    padded[: vec.size] = vec
    mags = np.abs(padded)
    angles = []
    for level in range(k):
        width = 1 << (k - level)
        sub = mags.reshape(-1, width)
        left = np.linalg.norm(sub[:, : width // 2], axis=1)
        right = np.linalg.norm(sub[:, width // 2 :], axis=1)
        angles.append(tuple(2.0 * np.arctan2(right, left)))
    phases = np.where(mags > 0, np.angle(padded), 0.0)
    return PrepPlan(k, tuple(angles), phases, vec.size)


def amplitude_encode(x) -> tuple[PrepPlan, Statevector]:
    """Rotation-tree preparation of ``x / ||x||`` (zero-padded to ``2**k``)."""
    vec = _as_target(x)
    plan = _plan_for(vec)
    state = plan.apply(make_basis_state(plan.num_qubits, 0), range(plan.num_qubits))
    return plan, state


Component = Union[Statevector, PrepPlan]


@dataclass
class LcuSpec:
    """``y = sum_j alpha_j |x_j>`` with ``alpha_j = r_j exp(i theta_j)``."""

    coefficients: Sequence[complex]
    components: Sequence[Component]

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if len(self.coefficients) != len(self.components):
            raise InputError("one coefficient per component is required")
        if len(self.coefficients) == 0:
            raise InputError("empty linear combination")
        if np.any(np.abs(self.coefficients) == 0):
            raise InputError("LCU coefficients must have r_j > 0")
        plans = []
        for comp in self.components:
            if isinstance(comp, Statevector):
                plans.append(_plan_for(comp.amplitudes))
            elif isinstance(comp, PrepPlan):
                plans.append(comp)
            else:
                raise InputError(f"unsupported component {type(comp).__name__}")
        widths = {p.num_qubits for p in plans}
        if len(widths) != 1:
            raise InputError(f"components differ in qubit count: {sorted(widths)}")
        self._plans = plans

    @property
    def plans(self) -> list:
        return self._plans

    @property
    def s(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def target(self) -> np.ndarray:
        """Classical ``y`` (used only for reporting, never by the circuit)."""
        k = self._plans[0].num_qubits
        out = np.zeros(1 << k, dtype=complex)
        for a, plan in zip(self.coefficients, self._plans):
            out += a * plan.apply(make_basis_state(k, 0), range(k)).amplitudes
        return out


def lcu_combine(spec: LcuSpec) -> tuple[Statevector, float]:
    """Simulate the three-step LCU circuit and postselect the index register.

    Layout: system register on the low qubits, index register above it.
    Returns ``(y/||y||, ||y||^2 / s^2)``.
    """
    r = np.abs(spec.coefficients)
    theta = np.angle(spec.coefficients)
    m = r.size
    sys_q = spec.plans[0].num_qubits
    idx_q = max(0, (m - 1).bit_length())
    system = list(range(sys_q))
    index = list(range(sys_q, sys_q + idx_q))

    s_plan = _plan_for(np.sqrt(r / r.sum()))
    state = make_basis_state(sys_q + idx_q, 0)
    state = s_plan.apply(state, index)
    for j, (plan, phase) in enumerate(zip(spec.plans, theta)):
        u = Operator(np.exp(1j * phase) * plan.unitary())
        bits = [(j >> b) & 1 for b in range(idx_q)]
        if idx_q:
            state = apply_controlled(state, u, index, system, control_values=bits)
        else:
            state = apply_operator(state, u, system)
    # S^dagger on the index register
    s_dag = Operator(s_plan.unitary().conj().T)
    if idx_q:
        state = apply_operator(state, s_dag, index)
    try:
        out, prob = branch(state, index, [0] * idx_q)
    except DegeneratePostselectionError as exc:
        raise DegeneratePostselectionError(
            "linear combination cancels to zero (destructive interference)"
        ) from exc
    return out, prob


@dataclass
class PrepReport:
    """Cost accounting for a preparation route."""

    method: str
    kappa: float
    success_probability: float
    s: float
    y_norm: float
    repetition_factor: float
    nonzeros: int
    q: int = 1
    bin_weight_sum: float = 1.0
    bin_reports: list = field(default_factory=list)

    @property
    def expected_trials(self) -> float:
        return 1.0 / self.success_probability

    @property
    def relative_factor(self) -> float:
        """Repetition factor divided by its Cauchy-Schwarz ceiling ``sqrt(nnz)``."""
        return self.repetition_factor / math.sqrt(self.nonzeros)

    def as_dict(self) -> dict:
        out = {
            "method": self.method,
            "kappa": self.kappa,
            "q": self.q,
            "success_prob": self.success_probability,
            "s": self.s,
            "y_norm": self.y_norm,
            "repetition_factor": self.repetition_factor,
            "expected_trials": self.expected_trials,
            "nonzeros": self.nonzeros,
        }
        if self.method == "binned":
            out["bin_weight_sum"] = self.bin_weight_sum
            out["sqrt_q"] = math.sqrt(self.q)
            out["bin_repetition_factors"] = [b.repetition_factor for b in self.bin_reports]
        return out


def prepare_flat(x) -> tuple[Statevector, PrepReport]:
    """LCU over basis states: ``|x_j> = |j>`` for each nonzero ``x_j``."""
    vec = _as_target(x)
    k = max(0, (vec.size - 1).bit_length())
    nz = np.flatnonzero(vec)
    spec = LcuSpec(vec[nz], [make_basis_state(k, int(j)) for j in nz])
    state, prob = lcu_combine(spec)
    s = spec.s
    y_norm = float(np.linalg.norm(vec))
    report = PrepReport(
        method="flat",
        kappa=vector_kappa(vec),
        success_probability=prob,
        s=s,
        y_norm=y_norm,
        repetition_factor=s / y_norm,
        nonzeros=int(nz.size),
    )
    return state, report


@dataclass
class BinDecomposition:
    """``x = y_1 + ... + y_q`` with magnitudes of ``y_j`` in ``[2^{j-1} a, 2^j a)``.

    ``a`` is the smallest nonzero magnitude; the last bin is closed on the
    right so the largest entry always lands somewhere.
    """

    base: float
    q: int
    bins: list
    x_norm: float

    @property
    def weights(self) -> np.ndarray:
        return np.array([np.linalg.norm(b) for b in self.bins]) / self.x_norm

    def nonempty(self) -> list:
        return [j for j, b in enumerate(self.bins) if np.any(b != 0)]


def _bin_count(kappa: float) -> int:
    q = max(1, math.ceil(math.log2(kappa)))
    while 2.0**q < kappa:
        q += 1
    while q > 1 and 2.0 ** (q - 1) >= kappa:
        q -= 1
    return q


def bin_decompose(x) -> BinDecomposition:
    vec = _as_target(x)
    mags = np.abs(vec)
    base = float(mags[mags > 0].min())
    q = _bin_count(float(mags.max() / base))
    bins = [np.zeros_like(vec) for _ in range(q)]
    for k in np.flatnonzero(mags):
        ratio = mags[k] / base
        j = math.floor(math.log2(ratio)) + 1
        while j > 1 and ratio < 2.0 ** (j - 1):
            j -= 1
        while ratio >= 2.0**j:
            j += 1
        bins[min(j, q) - 1][k] = vec[k]
    return BinDecomposition(base, q, bins, float(np.linalg.norm(vec)))


def prepare_binned(x) -> tuple[Statevector, PrepReport]:
    """Magnitude-binned preparation: flat per bin, then one LCU across bins."""
    vec = _as_target(x)
    dec = bin_decompose(vec)
    used = dec.nonempty()
    weights = dec.weights
    states, reports = [], []
    for j in used:
        st, rep = prepare_flat(dec.bins[j])
        states.append(st)
        reports.append(rep)
    lam = weights[used]
    if len(used) == 1:
        state, prob = states[0], 1.0
    else:
        state, prob = lcu_combine(LcuSpec(lam, states))
    weight_sum = float(lam.sum())
    if weight_sum > math.sqrt(dec.q) + 1e-12:
        raise AssertionError(
            f"bin weight sum {weight_sum} exceeds sqrt(q) = {math.sqrt(dec.q)}"
        )
    report = PrepReport(
        method="binned",
        kappa=vector_kappa(vec),
        success_probability=prob,
        s=weight_sum,
        y_norm=1.0,
        repetition_factor=weight_sum,
        nonzeros=int(np.count_nonzero(vec)),
        q=dec.q,
        bin_weight_sum=weight_sum,
        bin_reports=reports,
    )
    return state, report
