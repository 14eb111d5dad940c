"""HHL linear-system solver on the dense simulator.

Register layout (low to high): system qubits, one rotation ancilla, phase
register. The ancilla starts in ``|1>``; the eigenvalue-dependent rotation
moves amplitude ``C / lambda`` onto ``|0>`` and the ``|0>`` branch is kept.

Eigenvalues are decoded with a signed convention: phase-register values
in the upper half of ``[0, N)`` stand for negative eigenvalues, which is
what a Hermitian embedding ``[[0, A], [A^dagger, 0]]`` needs since its
spectrum is ``+-`` the singular values of ``A``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegeneratePostselectionError, IllConditionedError, InputError
from .qpe import controlled_powers, phase_estimation
from .statevector import Operator, Statevector, branch, tensor

__all__ = [
    "LinearSystem",
    "HHLConfig",
    "HHLResult",
    "hermitian_embed",
    "evolve",
    "signed_phase_decode",
    "gershgorin_radius",
    "solve",
    "apply_matrix_function",
    "SPLINE_LAMBDA_BOUND",
    "SPLINE_EIGENVALUE_FLOOR",
]

# every singular value of a spline system lies in [1/sqrt(2), 4]
SPLINE_LAMBDA_BOUND = 4.0
SPLINE_EIGENVALUE_FLOOR = 1.0 / math.sqrt(2.0)


def _is_hermitian(mat: np.ndarray, tol: float = 1e-12) -> bool:
    return mat.shape[0] == mat.shape[1] and np.allclose(mat, mat.conj().T, rtol=0, atol=tol)


def hermitian_embed(A) -> Operator:
    """``[[0, A], [A^dagger, 0]]``; solving it against ``(b, 0)`` gives ``(0, x)``.

    ``A`` must have power-of-two size; :meth:`LinearSystem.padded` does that.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"embedding needs a square matrix, got shape {A.shape}")
    n = A.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = A
    out[n:, :n] = A.conj().T
    return Operator(out, hermitian=True)


def evolve(A, t: float) -> Operator:
    """``exp(i A t)`` through the eigendecomposition of Hermitian ``A``."""
    mat = A.matrix if isinstance(A, Operator) else np.asarray(A, dtype=complex)
    if not _is_hermitian(mat, 1e-10):
        raise InputError("time evolution needs a Hermitian matrix")
    w, v = np.linalg.eigh(mat)
    return Operator((v * np.exp(1j * w * t)) @ v.conj().T, unitary=True)


def signed_phase_decode(value: int, n: int, t: float) -> float:
    """Eigenvalue for phase-register ``value``: ``2 pi wrap(value / 2^n) / t``.

    ``wrap`` sends ``[1/2, 1)`` to ``[-1/2, 0)``.
    """
    N = 1 << n
    if not 0 <= value < N:
        raise InputError(f"register value {value} outside [0, {N})")
    frac = value / N
    if frac >= 0.5:
        frac -= 1.0
    return 2.0 * math.pi * frac / t


def gershgorin_radius(mat: np.ndarray) -> float:
    """Upper bound on the spectral radius: the largest absolute row sum."""
    return float(np.abs(np.asarray(mat)).sum(axis=1).max())


@dataclass
class LinearSystem:
    """``A x = b``; ``A`` need not be Hermitian nor of power-of-two size."""

    A: np.ndarray
    b: np.ndarray
    hermitian: bool | None = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex).reshape(-1)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise InputError(f"A must be square, got shape {self.A.shape}")
        if self.A.shape[0] != self.b.size:
            raise InputError(f"A is {self.A.shape[0]}x{self.A.shape[0]} but b has {self.b.size} entries")
        if not np.any(self.b != 0):
            raise InputError("right-hand side is zero")
        if self.hermitian is None:
            self.hermitian = _is_hermitian(self.A)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    def padded(self) -> tuple[np.ndarray, np.ndarray]:
        """Identity-padded ``A`` and zero-padded ``b`` at a power-of-two size."""
        n = self.size
        dim = 1 << max(0, (n - 1).bit_length())
        A = np.eye(dim, dtype=complex)
        A[:n, :n] = self.A
        b = np.zeros(dim, dtype=complex)
        b[:n] = self.b
        return A, b

    def hermitian_form(self) -> tuple[np.ndarray, np.ndarray, slice]:
        """Hermitian matrix, right-hand side, and where padded ``x`` lives in its solution."""
        A, b = self.padded()
        dim = A.shape[0]
        if self.hermitian:
            return A, b, slice(0, dim)
        return hermitian_embed(A).matrix, np.concatenate([b, np.zeros(dim)]), slice(dim, 2 * dim)


@dataclass
class HHLConfig:
    """Phase-register width, evolution time and inversion constant.

    ``evolution_time`` defaults to ``2 pi (1/2 - 2^-n) / lambda_bound`` so every
    eigenvalue in ``[-lambda_bound, lambda_bound]`` maps into the signed
    phase window without aliasing. ``inversion_constant`` defaults to the
    eigenvalue floor. ``lambda_bound=None`` means a Gershgorin row bound
    of the Hermitian matrix actually simulated.
    """

    phase_bits: int = 8
    eigenvalue_floor: float = SPLINE_EIGENVALUE_FLOOR
    lambda_bound: float | None = SPLINE_LAMBDA_BOUND
    evolution_time: float | None = None
    inversion_constant: float | None = None
    uncompute_tolerance: float = 1e-8
    strict: bool = True

    def __post_init__(self):
        if self.phase_bits < 2:
            raise InputError("HHL needs at least two phase bits")
        if self.eigenvalue_floor <= 0:
            raise InputError("eigenvalue floor must be positive")
        if self.inversion_constant is not None and self.inversion_constant > self.eigenvalue_floor:
            raise InputError("inversion constant must not exceed the eigenvalue floor")

    @classmethod
    def for_spline(cls, phase_bits: int = 8, **kw) -> "HHLConfig":
        return cls(phase_bits=phase_bits, eigenvalue_floor=SPLINE_EIGENVALUE_FLOOR,
                   lambda_bound=SPLINE_LAMBDA_BOUND, **kw)

    @classmethod
    def suggest(cls, A, phase_bits: int = 8, **kw) -> "HHLConfig":
        """Floor from the classical spectrum of ``A``, bound from Gershgorin."""
        system = LinearSystem(A, np.ones(np.asarray(A).shape[0]))
        H, _, _ = system.hermitian_form()
        mags = np.abs(np.linalg.eigvalsh(H))
        floor = float(mags[mags > 1e-12].min())
        return cls(phase_bits=phase_bits, eigenvalue_floor=floor,
                   lambda_bound=gershgorin_radius(H), **kw)

    @property
    def C(self) -> float:
        return self.eigenvalue_floor if self.inversion_constant is None else self.inversion_constant

    def bound_for(self, H: np.ndarray) -> float:
        return gershgorin_radius(H) if self.lambda_bound is None else self.lambda_bound

    def time_for(self, H: np.ndarray) -> float:
        if self.evolution_time is not None:
            return self.evolution_time
        return 2.0 * math.pi * (0.5 - 2.0**-self.phase_bits) / self.bound_for(H)

    def kappa_configured(self, H: np.ndarray) -> float:
        """``lambda_bound / floor``: the condition number the run is sized for."""
        return self.bound_for(H) / self.eigenvalue_floor


@dataclass
class HHLResult:
    """Postselected solution and its bookkeeping.

    ``success_probability`` is the mass of the ancilla-``|0>`` branch;
    ``solution_state`` additionally conditions the phase register on
    ``|0...0>`` and holds only the ``x`` coordinates. ``residual_weight``
    is the share of the ancilla-``|0>`` branch that did not return to the
    all-zero phase register or sits outside the solution coordinates.
    """

    solution_state: Statevector
    success_probability: float
    norm_estimate: float
    residual_weight: float
    evolution_time: float
    phase_bits: int
    kappa_configured: float
    extra: dict = field(default_factory=dict)

    @property
    def repetitions_naive(self) -> float:
        return 1.0 / self.success_probability

    @property
    def repetitions_amplified(self) -> float:
        return 1.0 / math.sqrt(self.success_probability)


def _check_conditioning(H: np.ndarray, b: np.ndarray, floor: float, strict: bool) -> dict:
    w, v = np.linalg.eigh(H)
    gamma = v.conj().T @ (b / np.linalg.norm(b))
    weight = np.abs(gamma) ** 2
    null = np.abs(w) < 1e-12
    ill = (~null) & (np.abs(w) < floor * (1 - 1e-12))
    ill_weight = float(weight[ill].sum())
    if strict and ill_weight > 1e-8:
        raise IllConditionedError(
            f"right-hand side has weight {ill_weight:.3e} on eigenvalues below the floor {floor}"
        )
    return {"null_weight": float(weight[null].sum()), "ill_weight": ill_weight,
            "eigenvalues": w}


def _run(system: LinearSystem, config: HHLConfig, response: Callable[[np.ndarray], np.ndarray],
         check: bool) -> HHLResult:
    H, rhs, where = system.hermitian_form()
    info = _check_conditioning(H, rhs, config.eigenvalue_floor, config.strict and check)
    n = config.phase_bits
    N = 1 << n
    t = config.time_for(H)
    sys_q = H.shape[0].bit_length() - 1
    anc = sys_q
    phase = list(range(sys_q + 1, sys_q + 1 + n))

    b_state = Statevector(rhs / np.linalg.norm(rhs))
    # ancilla |1>, uniform phase register
    start = tensor(Statevector(np.array([0.0, 1.0])), b_state)
    start = tensor(Statevector(np.full(N, 1.0 / math.sqrt(N))), start)

    U = evolve(H, t)
    powers = controlled_powers(U.matrix, n)
    system_qubits = list(range(sys_q))
    state = phase_estimation(start, U, system_qubits, phase, powers=powers, hadamards=False)

    # conditional rotation, one 2x2 block per phase-register value
    lam = np.array([signed_phase_decode(v, n, t) for v in range(N)])
    amp0 = np.clip(response(lam), -1.0, 1.0)
    amp0[0] = 0.0  # eigenvalue indistinguishable from zero: no rotation
    amp1 = np.sqrt(1.0 - amp0**2)
    psi = state.amplitudes.reshape(N, 2, -1)
    zero, one = psi[:, 0, :].copy(), psi[:, 1, :].copy()
    # R|1> = c|0> + s|1>,  R|0> = s|0> - c|1>
    psi[:, 0, :] = amp1[:, None] * zero + amp0[:, None] * one
    psi[:, 1, :] = -amp0[:, None] * zero + amp1[:, None] * one
    state = Statevector(psi.reshape(-1))

    state = phase_estimation(state, U, system_qubits, phase, inverse=True, powers=powers)

    branch0, p_success = branch(state, [anc], [0], normalize=False)
    if p_success < 1e-14:
        raise DegeneratePostselectionError(f"ancilla |0> branch has probability {p_success:.3e}")
    clean, p_clean = branch(branch0, list(range(sys_q, sys_q + n)), [0] * n, normalize=False)
    x_padded = clean.amplitudes[where]
    x = x_padded[: system.size]
    p_x = float(np.vdot(x, x).real)
    if p_x < 1e-14:
        raise DegeneratePostselectionError("solution coordinates carry no weight")
    pad = x_padded[system.size:]
    info["padding_weight"] = float(np.vdot(pad, pad).real) / p_success
    info["phase_clean_probability"] = p_clean
    residual = 1.0 - p_x / p_success
    if config.strict and check and residual > config.uncompute_tolerance:
        info["uncompute_warning"] = True
    dim = 1 << max(0, (x.size - 1).bit_length())
    out = np.zeros(dim, dtype=complex)
    out[: x.size] = x / math.sqrt(p_x)
    return HHLResult(
        solution_state=Statevector(out),
        success_probability=p_success,
        norm_estimate=math.sqrt(p_success) / config.C,
        residual_weight=max(0.0, residual),
        evolution_time=t,
        phase_bits=n,
        kappa_configured=config.kappa_configured(H),
        extra=info,
    )


def solve(system: LinearSystem, config: HHLConfig | None = None) -> HHLResult:
    """Prepare ``|x> ~ A^{-1} b`` (the pseudo-inverse on the null space).

    ``norm_estimate`` approximates ``||A^{-1} b|| / ||b||`` as
    ``sqrt(success_probability) / C``.
    """
    config = config or HHLConfig()
    C = config.C
    return _run(system, config, lambda lam: C / np.where(lam == 0, np.inf, lam), check=True)


def apply_matrix_function(system: LinearSystem, poly_coefficients: Sequence[float],
                          config: HHLConfig | None = None) -> HHLResult:
    """Prepare ``p(A)|b>`` for ``p(s) = sum_k c_k s^k`` (coefficients ascending).

    The polynomial is divided by its largest magnitude over the decodable
    eigenvalue grid when that exceeds one. The zero register value maps to
    no rotation, so ``p(0)`` contributes nothing.
    """
    config = config or HHLConfig()
    coeffs = np.asarray(poly_coefficients, dtype=float)
    H, _, _ = system.hermitian_form()
    n = config.phase_bits
    t = config.time_for(H)
    grid = np.array([signed_phase_decode(v, n, t) for v in range(1 << n)])
    scale = max(1.0, float(np.abs(np.polynomial.polynomial.polyval(grid, coeffs)).max()))
    result = _run(system, config,
                  lambda lam: np.polynomial.polynomial.polyval(lam, coeffs) / scale, check=False)
    result.norm_estimate = math.sqrt(result.success_probability) * scale
    result.extra["polynomial_scale"] = scale
    return result
