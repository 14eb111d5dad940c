import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from qspline.errors import DegeneratePostselectionError, InputError, ResourceError
from qspline.statevector import (
    MAX_QUBITS,
    Operator,
    Statevector,
    apply_controlled,
    apply_operator,
    branch,
    fidelity,
    from_amplitudes,
    inner_product,
    make_basis_state,
    postselect,
    probabilities_on,
    sample,
    tensor,
)

H = Operator(np.array([[1, 1], [1, -1]]) / math.sqrt(2), unitary=True)
X = Operator(np.array([[0, 1], [1, 0]]), unitary=True)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return Statevector(v / np.linalg.norm(v))


class TestBasis:
    def test_zero_state(self):
        assert np.allclose(make_basis_state(1, 0).amplitudes, [1, 0])

    def test_index_three(self):
        assert np.allclose(make_basis_state(2, 3).amplitudes, [0, 0, 0, 1])

    def test_empty_register(self):
        s = make_basis_state(0, 0)
        assert s.dim == 1 and np.isclose(s.amplitudes[0], 1)

    def test_out_of_range(self):
        with pytest.raises(InputError):
            make_basis_state(2, 4)

    def test_width_cap(self):
        with pytest.raises(ResourceError):
            make_basis_state(MAX_QUBITS + 1, 0)

    def test_from_amplitudes_pads(self):
        s = from_amplitudes([3, 4, 0])
        assert s.dim == 4
        assert np.allclose(s.amplitudes, [0.6, 0.8, 0, 0])

    def test_non_power_of_two_rejected(self):
        with pytest.raises(InputError):
            Statevector(np.ones(3))


class TestApplyOperator:
    def test_hadamard(self):
        out = apply_operator(make_basis_state(1, 0), H, [0])
        assert np.allclose(out.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_identity(self):
        s = random_state(np.random.default_rng(0), 3)
        out = apply_operator(s, Operator(np.eye(4), unitary=True), [0, 2])
        assert np.allclose(out.amplitudes, s.amplitudes)

    def test_norm_preserved(self):
        rng = np.random.default_rng(1)
        u = Operator(unitary_group.rvs(4, random_state=2), unitary=True)
        s = random_state(rng, 3)
        assert np.isclose(apply_operator(s, u, [2, 0]).norm(), 1, atol=1e-12)

    def test_matches_kron(self):
        # targets[0] is the least significant bit of the operator index
        rng = np.random.default_rng(3)
        u = unitary_group.rvs(4, random_state=4)
        s = random_state(rng, 3)
        out = apply_operator(s, Operator(u, unitary=True), [1, 2])
        full = np.kron(u, np.eye(2))
        assert np.allclose(out.amplitudes, full @ s.amplitudes)

    def test_reversed_targets(self):
        rng = np.random.default_rng(5)
        u = unitary_group.rvs(4, random_state=6)
        s = random_state(rng, 2)
        out = apply_operator(s, Operator(u, unitary=True), [1, 0])
        swap = np.eye(4)[[0, 2, 1, 3]]
        assert np.allclose(out.amplitudes, swap @ u @ swap @ s.amplitudes)

    def test_size_mismatch(self):
        with pytest.raises(InputError):
            apply_operator(make_basis_state(2, 0), H, [0, 1])

    def test_non_unitary_flag_rejected(self):
        with pytest.raises(InputError):
            Operator(np.array([[1, 1], [0, 1]]), unitary=True)


class TestApplyControlled:
    def test_cnot(self):
        # |10>: qubit 1 set, qubit 0 clear
        out = apply_controlled(make_basis_state(2, 2), X, [1], [0])
        assert np.allclose(out.amplitudes, make_basis_state(2, 3).amplitudes)

    def test_control_off(self):
        u = Operator(unitary_group.rvs(2, random_state=0), unitary=True)
        s = tensor(make_basis_state(1, 0), Statevector(np.array([0.6, 0.8])))
        out = apply_controlled(s, u, [1], [0])
        assert np.allclose(out.amplitudes, s.amplitudes)

    def test_controlled_phase(self):
        w = np.exp(2j * np.pi * 3 / 8)
        cp = Operator(np.diag([1, w]), unitary=True)
        # control on qubit 1 in (|0>+|1>)/sqrt2, target qubit 0 in |1>
        s = tensor(Statevector(np.array([1, 1]) / math.sqrt(2)), make_basis_state(1, 1))
        out = apply_controlled(s, cp, [1], [0])
        assert np.allclose(out.amplitudes[[1, 3]], [1 / math.sqrt(2), w / math.sqrt(2)])

    def test_control_value_zero(self):
        out = apply_controlled(make_basis_state(2, 0), X, [1], [0], control_values=[0])
        assert np.allclose(out.amplitudes, make_basis_state(2, 1).amplitudes)

    def test_overlap_rejected(self):
        with pytest.raises(InputError):
            apply_controlled(make_basis_state(2, 0), X, [0], [0])

    @pytest.mark.parametrize("controls,targets", [([2], [0, 1]), ([0], [2, 1]), ([1, 3], [0]), ([0, 2], [3, 1])])
    def test_matches_dense(self, controls, targets):
        rng = np.random.default_rng(len(controls) + targets[0])
        n = 4
        u = unitary_group.rvs(1 << len(targets), random_state=7)
        s = random_state(rng, n)
        out = apply_controlled(s, Operator(u, unitary=True), controls, targets)
        # dense reference built index by index
        dense = np.zeros((16, 16), dtype=complex)
        for col in range(16):
            if all((col >> c) & 1 for c in controls):
                t_in = sum(((col >> q) & 1) << k for k, q in enumerate(targets))
                base = col & ~sum(1 << q for q in targets)
                for t_out in range(1 << len(targets)):
                    row = base | sum(((t_out >> k) & 1) << q for k, q in enumerate(targets))
                    dense[row, col] += u[t_out, t_in]
            else:
                dense[col, col] = 1
        assert np.allclose(out.amplitudes, dense @ s.amplitudes)


class TestInnerProduct:
    def test_self(self):
        s = random_state(np.random.default_rng(0), 2)
        assert np.isclose(inner_product(s, s), 1)

    def test_orthogonal(self):
        assert np.isclose(inner_product(make_basis_state(1, 0), make_basis_state(1, 1)), 0)

    def test_value(self):
        a = Statevector(np.array([1.0, 0.0]))
        b = Statevector(np.array([0.6, 0.8]))
        assert np.isclose(inner_product(a, b), 0.6)

    def test_conjugate_linear(self):
        a = Statevector(np.array([1j, 0]))
        assert np.isclose(inner_product(a, make_basis_state(1, 0)), -1j)

    def test_fidelity_phase_invariant(self):
        s = random_state(np.random.default_rng(1), 2)
        assert np.isclose(fidelity(s, Statevector(1j * s.amplitudes)), 1)


class TestProbabilities:
    def test_plus(self):
        s = Statevector(np.array([1, 1]) / math.sqrt(2))
        assert np.allclose(probabilities_on(s, [0]), [0.5, 0.5])

    def test_basis(self):
        assert np.allclose(probabilities_on(make_basis_state(2, 3), [0, 1]), [0, 0, 0, 1])

    def test_qpe_distribution_value(self):
        # |sin(N d pi)/(N sin(d pi))|^2 with N = 8, d = 1/3 - 3/8
        N, d = 8, 1 / 3 - 3 / 8
        expected = (math.sin(N * d * math.pi) / (N * math.sin(d * math.pi))) ** 2
        assert abs(expected - 0.6880) < 1e-3

    def test_order_of_qubits(self):
        # outcome bit j is qubits[j]
        s = make_basis_state(3, 0b011)
        p = probabilities_on(s, [2, 0])
        assert np.isclose(p[0b10], 1)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**16 - 1))
    def test_marginal_sums_to_one(self, seed):
        s = random_state(np.random.default_rng(seed), 3)
        assert np.isclose(probabilities_on(s, [1, 2]).sum(), 1)


class TestBranch:
    def test_plus_zero(self):
        s = Statevector(np.array([1, 1]) / math.sqrt(2))
        out, p = branch(s, [0], [0])
        assert out.dim == 1 and np.isclose(p, 0.5)

    def test_one(self):
        out, p = postselect(make_basis_state(1, 1), 0, 1)
        assert np.allclose(out.amplitudes, [0, 1]) and np.isclose(p, 1)

    def test_lcu_branch(self):
        # index register (qubit 1) after S^dagger: (|0>|0> + |0>|1>)/2 + ...
        amps = np.array([0.5, 0.5, 0.5, -0.5])
        out, p = branch(Statevector(amps), [1], [0])
        assert np.isclose(p, 0.5)
        assert np.allclose(out.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_zero_branch(self):
        with pytest.raises(DegeneratePostselectionError):
            branch(make_basis_state(1, 0), [0], [1])
        with pytest.raises(DegeneratePostselectionError):
            postselect(make_basis_state(1, 0), 0, 1)


class TestSample:
    def test_basis(self):
        counts = sample(make_basis_state(2, 2), [0, 1], 100, seed=0)
        assert counts[2] == 100

    def test_binomial(self):
        s = Statevector(np.array([1, 1]) / math.sqrt(2))
        counts = sample(s, [0], 10**5, seed=1)
        sigma = math.sqrt(10**5 * 0.25)
        assert np.all(np.abs(counts - 50000) <= 5 * sigma)

    def test_deterministic(self):
        s = random_state(np.random.default_rng(2), 3)
        assert np.array_equal(sample(s, [0, 1, 2], 500, 9), sample(s, [0, 1, 2], 500, 9))
