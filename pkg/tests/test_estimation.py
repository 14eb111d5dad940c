import math

import numpy as np
import pytest

from qspline.errors import InputError
from qspline.estimation import (
    AmplitudeInstance,
    build_grover_operator,
    estimate_amplitude,
    estimate_angle,
    exact_real_overlap,
    hadamard_test_state,
    swap_test_full,
    swap_test_real,
)
from qspline.statevector import Statevector, inner_product, make_basis_state


def rand_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return Statevector(v / np.linalg.norm(v))


def plane_eigenphases(instance):
    # eigenphases of G restricted to span{|0>|u>, |1>|v>}
    G = build_grover_operator(instance).matrix
    u, v = instance.branches()
    basis = np.stack([np.concatenate([u.amplitudes, 0 * u.amplitudes]),
                      np.concatenate([0 * v.amplitudes, v.amplitudes])], axis=1)
    return np.sort(np.angle(np.linalg.eigvals(basis.conj().T @ G @ basis)))


class TestGrover:
    def test_balanced(self):
        inst = AmplitudeInstance.from_angle(math.pi / 4, make_basis_state(1, 0), make_basis_state(1, 1))
        assert np.allclose(plane_eigenphases(inst), [-math.pi / 2, math.pi / 2])

    def test_sin_point_six(self):
        theta = math.asin(0.6)
        inst = AmplitudeInstance.from_angle(theta, make_basis_state(1, 0), make_basis_state(1, 1))
        assert np.allclose(plane_eigenphases(inst), [-2 * 0.6435011087932844, 2 * 0.6435011087932844], atol=1e-10)

    def test_unitary(self):
        inst = AmplitudeInstance.from_angle(0.3, rand_state(np.random.default_rng(0), 2), rand_state(np.random.default_rng(1), 2))
        G = build_grover_operator(inst).matrix
        assert np.allclose(G.conj().T @ G, np.eye(8))

    def test_theta_zero_rotation(self):
        # on the invariant plane G is the rotation by 2 theta = 0: eigenvalue 1
        inst = AmplitudeInstance(make_basis_state(2, 2), 1)
        G = build_grover_operator(inst).matrix
        phi = inst.phi.amplitudes
        assert np.allclose(G @ phi, phi)


class TestEstimateAngle:
    def test_flag_one(self):
        inst = AmplitudeInstance(make_basis_state(2, 2), 1)
        s, c = estimate_amplitude(inst, 1e-2)
        assert s == 0.0 and c == 1.0

    def test_balanced(self):
        inst = AmplitudeInstance.from_angle(math.pi / 4, make_basis_state(1, 0), make_basis_state(1, 1))
        s, c = estimate_amplitude(inst, 1e-2)
        assert abs(s - 1 / math.sqrt(2)) <= 1e-2 and abs(c - 1 / math.sqrt(2)) <= 1e-2

    def test_sin_point_six(self):
        theta = math.asin(0.6)
        inst = AmplitudeInstance.from_angle(theta, make_basis_state(1, 0), make_basis_state(1, 1))
        est = estimate_angle(inst, 2**-6)
        assert abs(est.theta - 0.64350) <= 2**-6

    @pytest.mark.parametrize("eps", [1e-2, 1e-3])
    def test_precision(self, eps):
        rng = np.random.default_rng(7)
        for theta in rng.uniform(0, math.pi / 2, 6):
            inst = AmplitudeInstance.from_angle(theta, rand_state(rng, 1), rand_state(rng, 1))
            assert abs(estimate_angle(inst, eps).theta - theta) <= eps

    def test_shots_mode_deterministic(self):
        inst = AmplitudeInstance.from_angle(0.9, make_basis_state(1, 0), make_basis_state(1, 1))
        a = estimate_angle(inst, 1e-2, mode="shots", seed=4)
        b = estimate_angle(inst, 1e-2, mode="shots", seed=4)
        assert a == b and abs(a.theta - 0.9) <= 1e-2

    def test_oracle_theta(self):
        inst = AmplitudeInstance.from_angle(0.4, make_basis_state(1, 0), make_basis_state(1, 1))
        assert np.isclose(inst.theta, 0.4)

    def test_bad_mode(self):
        inst = AmplitudeInstance.from_angle(0.4, make_basis_state(1, 0), make_basis_state(1, 1))
        with pytest.raises(InputError):
            estimate_angle(inst, 1e-2, mode="magic")


class TestSwapTest:
    def test_interference_state(self):
        rng = np.random.default_rng(2)
        x, y = rand_state(rng, 2), rand_state(rng, 2)
        inst = hadamard_test_state(x, y)
        assert np.isclose(inst.theta, math.asin(math.sqrt((1 + inner_product(x, y).real) / 2)))

    def test_same(self):
        x = rand_state(np.random.default_rng(3), 2)
        assert abs(swap_test_real(x, x, 1e-2) - 1) <= 1e-2

    def test_orthogonal(self):
        assert abs(swap_test_real(make_basis_state(1, 0), make_basis_state(1, 1), 1e-2)) <= 1e-2

    def test_value(self):
        x = Statevector(np.array([1.0, 0.0]))
        y = Statevector(np.array([0.6, 0.8]))
        assert abs(swap_test_real(x, y, 1e-3) - 0.6) <= 1e-3

    def test_full_same(self):
        x = rand_state(np.random.default_rng(4), 1)
        assert abs(swap_test_full(x, x, 1e-2) - 1) <= 1e-2 * math.sqrt(2)

    def test_full_phase(self):
        x = rand_state(np.random.default_rng(5), 1)
        iy = Statevector(1j * x.amplitudes)
        assert abs(swap_test_full(x, iy, 1e-2) - 1j) <= 1e-2 * math.sqrt(2)

    def test_full_random(self):
        rng = np.random.default_rng(6)
        x, y = rand_state(rng, 2), rand_state(rng, 2)
        assert abs(swap_test_full(x, y, 1e-3) - inner_product(x, y)) <= 2e-3

    def test_exact_overlap(self):
        assert np.isclose(exact_real_overlap(Statevector(np.array([1.0, 0])), Statevector(np.array([0.6, 0.8]))), 0.6)

    def test_size_mismatch(self):
        with pytest.raises(InputError):
            swap_test_real(make_basis_state(1, 0), make_basis_state(2, 0), 1e-2)
