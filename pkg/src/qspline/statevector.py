"""Dense statevector simulation core.

Qubit ordering is little-endian everywhere in the package: qubit 0 is the
least significant bit of a basis index, so basis state ``|k>`` on ``n``
qubits has ``amplitudes[k] == 1``. The same convention is used for the
index of a multi-qubit operator acting on ``targets``: ``targets[0]`` is
the least significant bit of the operator's row/column index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneratePostselectionError, InputError, ResourceError

MAX_QUBITS = 24
ATOL = 1e-10

__all__ = [
    "MAX_QUBITS",
    "Statevector",
    "Operator",
    "make_basis_state",
    "from_amplitudes",
    "apply_operator",
    "apply_controlled",
    "inner_product",
    "probabilities_on",
    "postselect",
    "branch",
    "sample",
    "tensor",
    "fidelity",
]


def _check_width(num_qubits: int) -> None:
    if num_qubits < 0:
        raise InputError(f"negative qubit count {num_qubits}")
    if num_qubits > MAX_QUBITS:
        raise ResourceError(
            f"{num_qubits} qubits exceeds the dense-simulation cap of {MAX_QUBITS}"
        )


@dataclass(frozen=True, eq=False)
class Statevector:
    """Complex amplitudes over ``num_qubits`` qubits.

    States returned by public operations are normalized; the constructor
    itself only checks the length so intermediate values can be built.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        size = amps.size
        if size == 0 or size & (size - 1):
            raise InputError(f"amplitude count {size} is not a power of two")
        _check_width(size.bit_length() - 1)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Statevector":
        nrm = self.norm()
        if nrm == 0.0:
            raise DegeneratePostselectionError("cannot normalize the zero vector")
        return Statevector(self.amplitudes / nrm)

    def __len__(self) -> int:
        return self.dim

    def __repr__(self) -> str:
        return f"Statevector(num_qubits={self.num_qubits}, amplitudes={self.amplitudes!r})"


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square matrix acting on a register of ``num_qubits`` qubits.

    Parameters
    ----------
    matrix : array_like
        ``2**k x 2**k`` complex matrix.
    unitary, hermitian : bool
        Claimed properties, verified at construction to ``1e-10`` entrywise.
    """

    matrix: np.ndarray
    unitary: bool = False
    hermitian: bool = False

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"operator must be square, got shape {mat.shape}")
        dim = mat.shape[0]
        if dim & (dim - 1):
            raise InputError(f"operator dimension {dim} is not a power of two")
        if self.unitary and not np.allclose(
            mat.conj().T @ mat, np.eye(dim), rtol=0, atol=ATOL
        ):
            raise InputError("operator flagged unitary is not unitary")
        if self.hermitian and not np.allclose(mat, mat.conj().T, rtol=0, atol=ATOL):
            raise InputError("operator flagged Hermitian is not Hermitian")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, unitary=self.unitary, hermitian=self.hermitian)

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(
            self.matrix @ other.matrix, unitary=self.unitary and other.unitary
        )


def make_basis_state(num_qubits: int, index: int) -> Statevector:
    _check_width(num_qubits)
    dim = 1 << num_qubits
    if not 0 <= index < dim:
        raise InputError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return Statevector(amps)


def from_amplitudes(values: Sequence[complex], normalize: bool = True) -> Statevector:
    """Build a state from raw amplitudes, zero-padding to a power of two."""
    vals = np.asarray(values, dtype=complex).reshape(-1)
    if vals.size == 0:
        raise InputError("empty amplitude vector")
    dim = 1 << max(0, (vals.size - 1).bit_length())
    amps = np.zeros(dim, dtype=complex)
    amps[: vals.size] = vals
    state = Statevector(amps)
    return state.normalized() if normalize else state


def tensor(high: Statevector, low: Statevector) -> Statevector:
    """``|high>|low>``: ``low`` occupies the least significant qubits."""
    return Statevector(np.kron(high.amplitudes, low.amplitudes))


def _check_qubits(num_qubits: int, qubits: Sequence[int], what: str = "qubit") -> list:
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise InputError(f"repeated {what} indices {qubits}")
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise InputError(f"{what} index {q} out of range for {num_qubits} qubits")
    return qubits


def _axes(num_qubits: int, qubits: Sequence[int]) -> list:
    # tensor axes (C order, most significant first) of qubits[-1], ..., qubits[0]
    return [num_qubits - 1 - q for q in reversed(qubits)]


def _apply_on_axes(psi: np.ndarray, mat: np.ndarray, axes: list) -> np.ndarray:
    k = len(axes)
    op = mat.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _is_low_block(targets: list) -> bool:
    return targets == list(range(len(targets)))


def _apply_matrix(amps: np.ndarray, num_qubits: int, mat: np.ndarray, targets: list) -> np.ndarray:
    if not targets:
        return amps * mat[0, 0]
    if _is_low_block(targets):
        return (amps.reshape(-1, mat.shape[0]) @ mat.T).reshape(-1)
    if len(targets) == 1:
        q = targets[0]
        psi = amps.reshape(-1, 2, 1 << q)
        out = np.empty_like(psi)
        out[:, 0] = mat[0, 0] * psi[:, 0] + mat[0, 1] * psi[:, 1]
        out[:, 1] = mat[1, 0] * psi[:, 0] + mat[1, 1] * psi[:, 1]
        return out.reshape(-1)
    psi = amps.reshape((2,) * num_qubits)
    return _apply_on_axes(psi, mat, _axes(num_qubits, targets)).reshape(-1)


def apply_operator(state: Statevector, op: Operator, targets: Sequence[int]) -> Statevector:
    """Apply ``op`` to ``targets``, identity on every other qubit."""
    targets = _check_qubits(state.num_qubits, targets, "target")
    if op.dim != 1 << len(targets):
        raise InputError(
            f"operator of dimension {op.dim} cannot act on {len(targets)} qubits"
        )
    return Statevector(_apply_matrix(state.amplitudes, state.num_qubits, op.matrix, targets))


def apply_controlled(
    state: Statevector,
    op: Operator,
    controls: Sequence[int],
    targets: Sequence[int],
    control_values: Sequence[int] | None = None,
) -> Statevector:
    """Apply ``op`` to ``targets`` on the subspace selected by ``controls``.

    By default every control must read 1; ``control_values`` selects a
    different pattern (one bit per control).
    """
    controls = _check_qubits(state.num_qubits, controls, "control")
    targets = _check_qubits(state.num_qubits, targets, "target")
    if set(controls) & set(targets):
        raise InputError(f"controls {controls} and targets {targets} overlap")
    if control_values is None:
        control_values = [1] * len(controls)
    if len(control_values) != len(controls):
        raise InputError("one control value per control qubit is required")
    if op.dim != 1 << len(targets):
        raise InputError(
            f"operator of dimension {op.dim} cannot act on {len(targets)} qubits"
        )
    n = state.num_qubits
    if any(v not in (0, 1) for v in control_values):
        raise InputError(f"control values must be bits, got {list(control_values)}")
    k = len(targets)
    if k and _is_low_block(targets):
        # targets form the trailing axis; index the control axes above it
        psi = state.amplitudes.reshape((2,) * (n - k) + (1 << k,)).copy()
        index = [slice(None)] * (n - k + 1)
        for q, v in zip(controls, control_values):
            index[n - 1 - q] = int(v)
        index = tuple(index)
        psi[index] = psi[index] @ op.matrix.T
        return Statevector(psi.reshape(-1))
    psi = state.amplitudes.reshape((2,) * n).copy()
    index = [slice(None)] * n
    for q, v in zip(controls, control_values):
        index[n - 1 - q] = int(v)
    control_axes = sorted(n - 1 - q for q in controls)
    # target axes renumbered inside the sub-tensor with the control axes removed
    sub_axes = [
        ax - sum(1 for c in control_axes if c < ax) for ax in _axes(n, targets)
    ]
    index = tuple(index)
    psi[index] = _apply_on_axes(psi[index], op.matrix, sub_axes)
    return Statevector(psi.reshape(-1))


def inner_product(a: Statevector, b: Statevector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.dim != b.dim:
        raise InputError(f"size mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: Statevector, b: Statevector) -> float:
    """``|<a|b>|^2`` of the normalized states."""
    return abs(inner_product(a.normalized(), b.normalized())) ** 2


def probabilities_on(state: Statevector, qubits: Sequence[int]) -> np.ndarray:
    """Marginal distribution over ``qubits``; outcome bit j is ``qubits[j]``."""
    n = state.num_qubits
    qubits = _check_qubits(n, qubits)
    probs = (np.abs(state.amplitudes) ** 2).reshape((2,) * n) if n else np.abs(state.amplitudes) ** 2
    if not qubits:
        return np.array([probs.sum()])
    keep = _axes(n, qubits)
    other = tuple(ax for ax in range(n) if ax not in keep)
    marg = probs.sum(axis=other)
    # remaining axes are in increasing order; reorder to keep's order
    order = np.argsort(np.argsort(keep))
    marg = np.transpose(marg, axes=order)
    return marg.reshape(-1)


def branch(
    state: Statevector, qubits: Sequence[int], bits: Sequence[int], normalize: bool = True
) -> tuple[Statevector, float]:
    """Project ``qubits`` onto ``bits`` and drop them from the register.

    Returns the state on the remaining qubits (in their original relative
    order) and the branch probability.
    """
    n = state.num_qubits
    qubits = _check_qubits(n, qubits)
    if len(bits) != len(qubits):
        raise InputError("one outcome bit per qubit is required")
    psi = state.amplitudes.reshape((2,) * n) if n else state.amplitudes
    index = [slice(None)] * n
    for q, b in zip(qubits, bits):
        if b not in (0, 1):
            raise InputError(f"outcome bit must be 0 or 1, got {b}")
        index[n - 1 - q] = int(b)
    sub = np.asarray(psi[tuple(index)]).reshape(-1)
    prob = float(np.vdot(sub, sub).real)
    if not normalize:
        return Statevector(sub), prob
    if prob < 1e-14:
        raise DegeneratePostselectionError(
            f"branch {list(bits)} on qubits {qubits} has probability {prob:.3e}"
        )
    return Statevector(sub / np.sqrt(prob)), prob


def postselect(state: Statevector, qubit: int, outcome: int) -> tuple[Statevector, float]:
    """Condition on ``qubit`` reading ``outcome``; the register is kept intact."""
    n = state.num_qubits
    _check_qubits(n, [qubit])
    if outcome not in (0, 1):
        raise InputError(f"outcome must be 0 or 1, got {outcome}")
    mask = ((np.arange(state.dim) >> qubit) & 1) == outcome
    amps = np.where(mask, state.amplitudes, 0.0)
    prob = float(np.vdot(amps, amps).real)
    if prob < 1e-14:
        raise DegeneratePostselectionError(
            f"outcome {outcome} on qubit {qubit} has probability {prob:.3e}"
        )
    return Statevector(amps / np.sqrt(prob)), prob


def sample(state: Statevector, qubits: Sequence[int], shots: int, seed: int) -> np.ndarray:
    """Seeded measurement histogram over ``qubits`` (counts per outcome)."""
    if shots < 1:
        raise InputError(f"shots must be positive, got {shots}")
    probs = probabilities_on(state, qubits)
    probs = np.clip(probs, 0.0, None)
    rng = np.random.default_rng(seed)
    return rng.multinomial(shots, probs / probs.sum())
