import math

import numpy as np
import pytest

from qspline.conditioning import (
    KAPPA_BOUND,
    condition_report,
    conditioning_sweep,
    gershgorin_sv_bounds,
    random_spline_system,
)
from qspline.errors import BoundViolation, InputError
from qspline.spline import SplineDataset, build_system, clamped, natural


class TestGershgorin:
    def test_identity(self):
        b = gershgorin_sv_bounds(np.eye(3))
        assert np.allclose(b.intervals, [[1, 1]] * 3)
        assert b.all_contained()

    def test_uniform_natural(self):
        s = build_system(SplineDataset(np.arange(9.0), np.sin(np.arange(9.0))), natural())
        b = gershgorin_sv_bounds(s)
        assert np.all(b.intervals[:, 0] >= 1 - 1e-12) and np.all(b.intervals[:, 1] <= 3 + 1e-12)

    def test_sigma_max(self):
        rng = np.random.default_rng(0)
        for kind in ("type1", "type2", "type3"):
            b = gershgorin_sv_bounds(random_spline_system(rng, 30, kind))
            assert b.sigma_max <= 4 + 1e-9 and b.all_contained()

    def test_cap(self):
        with pytest.raises(InputError):
            gershgorin_sv_bounds(np.eye(1025))


class TestConditionReport:
    def test_uniform_natural_size_eight(self):
        s = build_system(SplineDataset(np.arange(8.0), np.cos(np.arange(8.0))), natural())
        assert condition_report(s).kappa <= 3

    def test_two_point_clamped(self):
        rep = condition_report(build_system(SplineDataset([0, 1], [0, 1]), clamped()))
        assert np.isclose(rep.sigma_max, 3) and np.isclose(rep.sigma_min, 1) and np.isclose(rep.kappa, 3)

    def test_moderate_sweep(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for k in range(60):
            kind = ("type1", "type2", "type3")[k % 3]
            rep = condition_report(random_spline_system(rng, int(rng.integers(2, 257)), kind, (0.1, 10)))
            assert rep.kappa <= KAPPA_BOUND and rep.sigma_min_ok and rep.frobenius_ok
            worst = max(worst, rep.kappa)
        assert worst > 1

    def test_violation_raised(self):
        with pytest.raises(BoundViolation):
            condition_report(np.array([[2.0, 0], [0, 0.1]]))

    def test_unchecked(self):
        rep = condition_report(np.array([[2.0, 0], [0, 0.1]]), check=False)
        assert not rep.kappa_bound_ok

    def test_as_dict_keys(self):
        rep = condition_report(build_system(SplineDataset([0, 1, 2], [0, 1, 0]), natural()))
        assert {"kappa", "bound_4sqrt2_ok", "bound_4_ok", "frobenius_9n_ok"} <= set(rep.as_dict())


class TestSweep:
    def test_small(self):
        res = conditioning_sweep(60, (2, 64), seed=3)
        assert res["bound_4sqrt2_ok"] and res["gershgorin_ok"] and res["sigma_min_ok"] and res["frobenius_ok"]
        assert 1 < res["max_kappa"] <= 4 * math.sqrt(2)

    def test_deterministic(self):
        assert conditioning_sweep(20, (2, 32), seed=5) == conditioning_sweep(20, (2, 32), seed=5)

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            random_spline_system(np.random.default_rng(0), 4, "type9")
