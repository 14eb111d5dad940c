"""Singular-value bounds and condition numbers of spline systems.

Gershgorin-type intervals for singular values: with off-diagonal row sums
``r_i``, column sums ``c_i`` and ``s_i = max(r_i, c_i)``, every singular
value lies in ``U_i [max(0, |a_ii| - s_i), |a_ii| + s_i]``. For a spline
system ``|a_ii| = 2`` and ``s_i <= 2``, hence ``sigma_max <= 4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import svdvals

from .errors import BoundViolation, InputError
from .spline import (
    FirstDerivativeBC,
    PeriodicBC,
    SecondDerivativeBC,
    SplineDataset,
    TridiagonalSystem,
    build_system,
)

__all__ = [
    "SvBounds",
    "ConditionReport",
    "gershgorin_sv_bounds",
    "condition_report",
    "random_spline_system",
    "conditioning_sweep",
    "KAPPA_BOUND",
    "KAPPA_EMPIRICAL",
    "MAX_SIZE",
]

KAPPA_BOUND = 4.0 * math.sqrt(2.0)
KAPPA_EMPIRICAL = 4.0
MAX_SIZE = 1024


def _dense(system) -> np.ndarray:
    if isinstance(system, TridiagonalSystem):
        return system.to_dense()
    A = np.asarray(system)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"need a square matrix, got shape {A.shape}")
    return A


@dataclass
class SvBounds:
    r: np.ndarray
    c: np.ndarray
    s: np.ndarray
    intervals: np.ndarray  # shape (size, 2)
    frobenius: float
    singular_values: np.ndarray

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values.max())

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values.min())

    @property
    def condition_number(self) -> float:
        return self.sigma_max / self.sigma_min if self.sigma_min > 0 else math.inf

    @property
    def upper(self) -> float:
        return float(self.intervals[:, 1].max())

    def contains(self, values, tol: float = 1e-9) -> np.ndarray:
        values = np.atleast_1d(values)
        lo, hi = self.intervals[:, 0], self.intervals[:, 1]
        return np.any((values[:, None] >= lo - tol) & (values[:, None] <= hi + tol), axis=1)

    def all_contained(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.contains(self.singular_values, tol)))


def gershgorin_sv_bounds(system) -> SvBounds:
    """Interval union for the singular values, alongside the SVD ones."""
    A = _dense(system)
    if A.shape[0] > MAX_SIZE:
        raise InputError(f"size {A.shape[0]} exceeds the dense cap {MAX_SIZE}")
    mag = np.abs(A)
    diag = np.diag(mag)
    r = mag.sum(axis=1) - diag
    c = mag.sum(axis=0) - diag
    s = np.maximum(r, c)
    intervals = np.stack([np.maximum(0.0, diag - s), diag + s], axis=1)
    return SvBounds(r, c, s, intervals, float(np.linalg.norm(A, "fro")), svdvals(A))


@dataclass
class ConditionReport:
    size: int
    sigma_max: float
    sigma_min: float
    kappa: float
    frobenius_sq: float
    frobenius_floor: float
    frobenius_floor_9n: float
    gershgorin_upper: float
    gershgorin_ok: bool

    @property
    def frobenius_ok(self) -> bool:
        return self.frobenius_sq >= self.frobenius_floor - 1e-9

    @property
    def frobenius_9n_ok(self) -> bool:
        """``||A||_F^2 >= 9n/2 - 1/2`` read with ``n = size - 1``; flagged, not enforced."""
        return self.frobenius_sq >= self.frobenius_floor_9n - 1e-9

    @property
    def sigma_min_ok(self) -> bool:
        return self.sigma_min >= 1.0 / math.sqrt(2.0) - 1e-12

    @property
    def kappa_bound_ok(self) -> bool:
        return self.kappa <= KAPPA_BOUND + 1e-9

    @property
    def kappa_empirical_ok(self) -> bool:
        return self.kappa <= KAPPA_EMPIRICAL + 1e-9

    def as_dict(self) -> dict:
        return {
            "size": self.size,
            "sigma_max": self.sigma_max,
            "sigma_min": self.sigma_min,
            "kappa": self.kappa,
            "frobenius_sq": self.frobenius_sq,
            "frobenius_ok": self.frobenius_ok,
            "frobenius_9n_ok": self.frobenius_9n_ok,
            "sigma_min_ok": self.sigma_min_ok,
            "bound_4sqrt2_ok": self.kappa_bound_ok,
            "bound_4_ok": self.kappa_empirical_ok,
            "gershgorin_upper": self.gershgorin_upper,
            "gershgorin_ok": self.gershgorin_ok,
        }


def condition_report(system, check: bool = True) -> ConditionReport:
    """SVD-based conditioning of a spline system.

    Raises :class:`BoundViolation` when ``check`` is set and the Frobenius
    floor ``4 size + (size - 2)/2``, the Gershgorin containment or
    ``kappa <= 4 sqrt 2`` fails. ``kappa <= 4`` is only reported.
    """
    bounds = gershgorin_sv_bounds(system)
    size = bounds.s.size
    rep = ConditionReport(
        size=size,
        sigma_max=bounds.sigma_max,
        sigma_min=bounds.sigma_min,
        kappa=bounds.condition_number,
        frobenius_sq=bounds.frobenius**2,
        frobenius_floor=4.0 * size + (size - 2) / 2.0,
        frobenius_floor_9n=9.0 * (size - 1) / 2.0 - 0.5,
        gershgorin_upper=bounds.upper,
        gershgorin_ok=bounds.all_contained() and bounds.upper <= 4.0 + 1e-9,
    )
    if check:
        if not rep.gershgorin_ok:
            raise BoundViolation("singular values escape the Gershgorin union or exceed 4")
        if not rep.frobenius_ok:
            raise BoundViolation(
                f"||A||_F^2 = {rep.frobenius_sq} below {rep.frobenius_floor}"
            )
        if not rep.kappa_bound_ok:
            raise BoundViolation(f"condition number {rep.kappa} exceeds 4 sqrt 2")
    return rep


def random_spline_system(rng: np.random.Generator, size: int, kind: str,
                         h_range=(1e-3, 1e3)) -> TridiagonalSystem:
    """System of the requested size with log-uniform spacings in ``h_range``."""
    lo, hi = np.log(h_range[0]), np.log(h_range[1])
    if kind == "type3":
        n = size
        if n < 2:
            raise InputError("periodic systems need size >= 2")
    else:
        n = size - 1
        if n < 1:
            raise InputError("size must be at least 2")
    h = np.exp(rng.uniform(lo, hi, n))
    x = np.concatenate([[0.0], np.cumsum(h)])
    y = rng.normal(size=n + 1)
    if kind == "type1":
        bc = FirstDerivativeBC(*rng.normal(size=2))
    elif kind == "type2":
        bc = SecondDerivativeBC(*rng.normal(size=2))
    elif kind == "type3":
        y[-1] = y[0]
        bc = PeriodicBC()
    else:
        raise InputError(f"unknown boundary kind {kind!r}")
    return build_system(SplineDataset(x, y), bc)


def conditioning_sweep(trials: int, sizes=(2, 256), seed: int = 0,
                       kinds=("type1", "type2", "type3"), h_range=(1e-3, 1e3)) -> dict:
    """Seeded sweep over random spline systems; one independent stream per trial."""
    lo, hi = sizes
    children = np.random.SeedSequence(seed).spawn(trials)
    max_kappa, max_upper, worst = 0.0, 0.0, None
    all_contained = True
    bound_ok = True
    sigma_min_ok = True
    frobenius_ok = True
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        kind = kinds[k % len(kinds)]
        size = int(rng.integers(lo, hi + 1))
        system = random_spline_system(rng, size, kind, h_range)
        rep = condition_report(system, check=False)
        all_contained &= rep.gershgorin_ok
        bound_ok &= rep.kappa_bound_ok
        sigma_min_ok &= rep.sigma_min_ok
        frobenius_ok &= rep.frobenius_ok
        max_upper = max(max_upper, rep.gershgorin_upper)
        if rep.kappa > max_kappa:
            max_kappa, worst = rep.kappa, {"trial": k, "kind": kind, "size": size}
    return {
        "trials": trials,
        "max_kappa": max_kappa,
        "worst": worst,
        "bound_4sqrt2_ok": bool(bound_ok),
        "bound_4_ok": bool(max_kappa <= KAPPA_EMPIRICAL + 1e-9),
        "gershgorin_ok": bool(all_contained),
        "gershgorin_max_upper": max_upper,
        "sigma_min_ok": bool(sigma_min_ok),
        "frobenius_ok": bool(frobenius_ok),
    }
