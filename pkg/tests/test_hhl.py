import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from qspline.errors import IllConditionedError, InputError
from qspline.hhl import (
    HHLConfig,
    LinearSystem,
    apply_matrix_function,
    evolve,
    hermitian_embed,
    signed_phase_decode,
    solve,
)
from qspline.spline import SplineDataset, build_system, clamped, thomas_solve
from qspline.statevector import Statevector, fidelity


def normalized(v):
    v = np.asarray(v, dtype=complex)
    dim = 1 << max(0, (v.size - 1).bit_length())
    out = np.zeros(dim, dtype=complex)
    out[: v.size] = v
    return Statevector(out / np.linalg.norm(out))


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


class TestEmbed:
    def test_block_structure(self):
        A = np.array([[0, 1], [0, 0]])
        H = hermitian_embed(A).matrix
        assert np.allclose(H[:2, 2:], A) and np.allclose(H[2:, :2], A.T)
        assert np.allclose(H[:2, :2], 0) and np.allclose(H[2:, 2:], 0)

    def test_hermitian_and_paired(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        H = hermitian_embed(A).matrix
        assert np.allclose(H, H.conj().T, atol=1e-12)
        w = np.sort(np.linalg.eigvalsh(H))
        assert np.allclose(w, -w[::-1])

    def test_odd_size_rejected(self):
        # callers pad first (LinearSystem.padded)
        with pytest.raises(InputError):
            hermitian_embed(np.eye(3))

    def test_hermitian_system_not_embedded(self):
        system = LinearSystem(np.diag([1.0, 2.0]), [1, 1])
        H, rhs, where = system.hermitian_form()
        assert H.shape == (2, 2) and where == slice(0, 2)


class TestEvolve:
    def test_zero_time(self):
        H = random_hermitian(np.random.default_rng(1), 4)
        assert np.allclose(evolve(H, 0).matrix, np.eye(4))

    def test_diagonal(self):
        U = evolve(np.diag([0.3, -1.2]), 2.0)
        assert np.allclose(U.matrix, np.diag(np.exp(1j * np.array([0.3, -1.2]) * 2.0)))

    def test_group_property(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            H = random_hermitian(rng, 4)
            assert np.allclose(evolve(H, 0.7).matrix @ evolve(H, -0.7).matrix, np.eye(4), atol=1e-10)

    def test_non_hermitian_rejected(self):
        with pytest.raises(InputError):
            evolve(np.array([[0, 1], [0, 0]]), 1.0)


class TestDecode:
    def test_zero(self):
        assert signed_phase_decode(0, 4, 1.0) == 0.0

    def test_most_negative(self):
        assert np.isclose(signed_phase_decode(8, 4, 2.0), -math.pi / 2.0)

    def test_embedded_singular_value(self):
        V = unitary_group.rvs(2, random_state=3)
        W = unitary_group.rvs(2, random_state=4)
        A = V @ np.diag([0.5, 0.5]) @ W
        H = hermitian_embed(A).matrix
        n, t = 4, math.pi
        decoded = set()
        for lam in np.linalg.eigvalsh(H):
            value = int(round(lam * t / (2 * math.pi) * 16)) % 16
            decoded.add(round(signed_phase_decode(value, n, t), 12))
        assert decoded == {-0.5, 0.5}


class TestSolve:
    def test_identity(self):
        b = np.array([0.2, -0.4, 0.1j, 0.9])
        cfg = HHLConfig(phase_bits=4, eigenvalue_floor=1.0, lambda_bound=2.0)
        res = solve(LinearSystem(np.eye(4), b), cfg)
        assert abs(fidelity(res.solution_state, normalized(b)) - 1) <= 1e-10

    def test_diagonal_exact(self):
        cfg = HHLConfig(phase_bits=4, eigenvalue_floor=0.5, evolution_time=math.pi / 2)
        res = solve(LinearSystem(np.diag([1.0, 0.5]), [0, 1]), cfg)
        assert np.allclose(np.abs(res.solution_state.amplitudes), [0, 1])
        assert abs(res.norm_estimate - 2) <= 1e-6
        assert res.residual_weight <= 1e-12

    def test_clamped_four(self):
        ds = SplineDataset([0, 0.7, 1.5, 3.0], [0.2, -1.0, 0.4, 1.1])
        system = build_system(ds, clamped())
        direct = thomas_solve(system).M
        res = solve(LinearSystem(system.to_dense(), system.rhs), HHLConfig.for_spline(8))
        assert fidelity(res.solution_state, normalized(direct)) >= 0.99
        assert res.success_probability >= 1 / res.kappa_configured**2

    def test_fidelity_improves(self):
        ds = SplineDataset([0, 1, 1.5, 3.5, 4], [1, 0, 2, -1, 0.5])
        system = build_system(ds, clamped())
        target = normalized(thomas_solve(system).M)
        fids = [fidelity(solve(LinearSystem(system.to_dense(), system.rhs), HHLConfig.for_spline(n)).solution_state, target)
                for n in (6, 9, 12)]
        assert fids[0] <= fids[1] + 1e-9 <= fids[2] + 2e-9

    def test_ill_conditioned(self):
        cfg = HHLConfig(phase_bits=5, eigenvalue_floor=1.0, lambda_bound=2.0)
        with pytest.raises(IllConditionedError):
            solve(LinearSystem(np.diag([1.0, 0.1]), [1, 1]), cfg)

    def test_non_power_of_two_padding(self):
        A = np.array([[2.0, 1, 0], [0.5, 2, 0.5], [0, 1, 2]])
        b = np.array([1.0, -2.0, 0.5])
        res = solve(LinearSystem(A, b), HHLConfig.for_spline(10))
        assert fidelity(res.solution_state, normalized(np.linalg.solve(A, b))) >= 0.999
        assert res.extra["padding_weight"] <= 1e-8

    def test_zero_rhs_rejected(self):
        with pytest.raises(InputError):
            LinearSystem(np.eye(2), [0, 0])

    def test_suggest(self):
        cfg = HHLConfig.suggest(np.diag([0.5, 3.0]), phase_bits=10)
        assert np.isclose(cfg.eigenvalue_floor, 0.5)
        res = solve(LinearSystem(np.diag([0.5, 3.0]), [1, 1]), cfg)
        assert fidelity(res.solution_state, normalized([2, 1 / 3])) >= 0.999


class TestMatrixFunction:
    def cfg(self):
        return HHLConfig(phase_bits=4, eigenvalue_floor=0.25, evolution_time=math.pi)

    def test_constant(self):
        b = np.array([1.0, 1.0]) / math.sqrt(2)
        res = apply_matrix_function(LinearSystem(np.diag([0.5, 0.25]), b), [1.0], self.cfg())
        assert fidelity(res.solution_state, normalized(b)) >= 1 - 1e-10

    def test_linear(self):
        b = np.array([1.0, 1.0]) / math.sqrt(2)
        res = apply_matrix_function(LinearSystem(np.diag([0.5, 0.25]), b), [0.0, 1.0], self.cfg())
        assert fidelity(res.solution_state, normalized([0.5, 0.25])) >= 1 - 1e-6

    def test_square_is_linear_twice(self):
        rng = np.random.default_rng(8)
        for _ in range(3):
            lam = rng.choice([0.25, 0.5, 0.75], 4)
            A = np.diag(lam)
            b = rng.normal(size=4)
            once = apply_matrix_function(LinearSystem(A, b), [0, 1], self.cfg()).solution_state
            twice = apply_matrix_function(LinearSystem(A, once.amplitudes), [0, 1], self.cfg()).solution_state
            square = apply_matrix_function(LinearSystem(A, b), [0, 0, 1], self.cfg()).solution_state
            assert fidelity(twice, square) >= 1 - 1e-8
            assert fidelity(square, normalized(lam**2 * b)) >= 1 - 1e-8
