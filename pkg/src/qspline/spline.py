"""Classical cubic-spline engine (second-derivative formulation).

The spline is parametrized by its second derivatives ``M_i = S''(x_i)``.
On ``[x_i, x_{i+1}]`` with ``h_i = x_{i+1} - x_i``, ``a = x_{i+1} - x`` and
``b = x - x_i``::

    C_i(x) = M_i a^3/(6h) + M_{i+1} b^3/(6h)
             + (y_i - M_i h^2/6) a/h + (y_{i+1} - M_{i+1} h^2/6) b/h

and C1 continuity at the interior knots gives the tridiagonal equations
``mu_i M_{i-1} + 2 M_i + lambda_i M_{i+1} = d_i``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError, InputError, SolverError

__all__ = [
    "SplineDataset",
    "FirstDerivativeBC",
    "SecondDerivativeBC",
    "PeriodicBC",
    "clamped",
    "natural",
    "periodic",
    "TridiagonalSystem",
    "SplineSolution",
    "divided_differences",
    "build_system",
    "thomas_solve",
    "solve_tridiagonal",
    "fit",
    "evaluate",
    "eval_features",
    "Features",
    "load_csv",
]

PIVOT_TOL = 1e-13


@dataclass(frozen=True)
class SplineDataset:
    """Knots ``x_0 < ... < x_n`` and values ``y_0 .. y_n`` (``n >= 1``)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.size != y.size:
            raise InputError(f"{x.size} knots but {y.size} values")
        if x.size < 2:
            raise InputError("a spline needs at least two knots")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise InputError("knots and values must be finite")
        if np.any(np.diff(x) <= 0):
            raise InputError("knots must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        """Number of intervals."""
        return self.x.size - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.x)


@dataclass(frozen=True)
class FirstDerivativeBC:
    """Type 1: ``S'(x_0) = start``, ``S'(x_n) = end`` (clamped when both are 0)."""

    start: float = 0.0
    end: float = 0.0
    kind = "type1"


@dataclass(frozen=True)
class SecondDerivativeBC:
    """Type 2: ``S''(x_0) = start``, ``S''(x_n) = end`` (natural when both are 0)."""

    start: float = 0.0
    end: float = 0.0
    kind = "type2"


@dataclass(frozen=True)
class PeriodicBC:
    """Type 3: value, slope and curvature match at both ends; needs ``y_0 = y_n``."""

    kind = "type3"


BoundaryCondition = Union[FirstDerivativeBC, SecondDerivativeBC, PeriodicBC]


def clamped() -> FirstDerivativeBC:
    return FirstDerivativeBC(0.0, 0.0)


def natural() -> SecondDerivativeBC:
    return SecondDerivativeBC(0.0, 0.0)


def periodic() -> PeriodicBC:
    return PeriodicBC()


@dataclass
class TridiagonalSystem:
    """Band storage: ``sub[i] = A[i+1, i]``, ``sup[i] = A[i, i+1]``.

    ``corner_upper`` is ``A[0, -1]`` and ``corner_lower`` is ``A[-1, 0]``;
    both are zero except for periodic systems. For a periodic system the
    unknowns are ``M_1 .. M_n``.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray
    corner_upper: float = 0.0
    corner_lower: float = 0.0
    kind: str = "type2"

    @property
    def size(self) -> int:
        return self.diag.size

    @property
    def periodic(self) -> bool:
        return self.kind == "type3"

    def to_dense(self) -> np.ndarray:
        n = self.size
        A = np.diag(self.diag.astype(float))
        if n > 1:
            A += np.diag(self.sub, -1) + np.diag(self.sup, 1)
            A[0, n - 1] += self.corner_upper
            A[n - 1, 0] += self.corner_lower
        return A

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.to_dense() @ np.asarray(v)


@dataclass
class SplineSolution:
    """Second derivatives ``M_0 .. M_n`` at every knot."""

    M: np.ndarray
    system: TridiagonalSystem | None = field(default=None, repr=False)


def divided_differences(dataset: SplineDataset) -> tuple[np.ndarray, np.ndarray]:
    """First-order ``S[x_i, x_{i+1}]`` and second-order ``S[x_i, x_{i+1}, x_{i+2}]`` tables."""
    x, y = dataset.x, dataset.y
    first = np.diff(y) / np.diff(x)
    second = np.diff(first) / (x[2:] - x[:-2])
    return first, second


def build_system(dataset: SplineDataset, boundary: BoundaryCondition) -> TridiagonalSystem:
    h = dataset.h
    n = dataset.n
    first, second = divided_differences(dataset)
    mu_int = h[:-1] / (h[:-1] + h[1:])  # mu_1 .. mu_{n-1}
    lam_int = 1.0 - mu_int
    d_int = 6.0 * second

    if isinstance(boundary, PeriodicBC):
        if n < 2:
            raise InputError("a periodic spline needs at least two intervals")
        if abs(dataset.y[0] - dataset.y[-1]) > 1e-12:
            raise InputError(
                f"periodic data must have y_0 = y_n (got {dataset.y[0]} and {dataset.y[-1]})"
            )
        lam_n = h[0] / (h[-1] + h[0])
        mu_n = 1.0 - lam_n
        d_n = 6.0 * (first[0] - first[-1]) / (h[0] + h[-1])
        # rows for knots 1..n, unknowns M_1..M_n (M_0 = M_n)
        mu = np.append(mu_int, mu_n)
        lam = np.append(lam_int, lam_n)
        return TridiagonalSystem(
            sub=mu[1:].copy(),
            diag=np.full(n, 2.0),
            sup=lam[:-1].copy(),
            rhs=np.append(d_int, d_n),
            corner_upper=float(mu[0]),
            corner_lower=float(lam[-1]),
            kind="type3",
        )

    if isinstance(boundary, FirstDerivativeBC):
        lam0, mun = 1.0, 1.0
        d0 = 6.0 * (first[0] - boundary.start) / h[0]
        dn = 6.0 * (boundary.end - first[-1]) / h[-1]
        kind = "type1"
    elif isinstance(boundary, SecondDerivativeBC):
        lam0, mun = 0.0, 0.0
        d0 = 2.0 * boundary.start
        dn = 2.0 * boundary.end
        kind = "type2"
    else:
        raise InputError(f"unknown boundary condition {boundary!r}")
    return TridiagonalSystem(
        sub=np.append(mu_int, mun),
        diag=np.full(n + 1, 2.0),
        sup=np.insert(lam_int, 0, lam0),
        rhs=np.concatenate([[d0], d_int, [dn]]),
        kind=kind,
    )


def solve_tridiagonal(sub, diag, sup, rhs) -> np.ndarray:
    """Thomas algorithm (forward elimination, back substitution)."""
    n = len(diag)
    c = np.zeros(n)
    d = np.zeros(n)
    if abs(diag[0]) < PIVOT_TOL:
        raise SolverError("zero pivot in row 0")
    c[0] = sup[0] / diag[0] if n > 1 else 0.0
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * c[i - 1]
        if abs(piv) < PIVOT_TOL:
            raise SolverError(f"zero pivot in row {i}")
        if i < n - 1:
            c[i] = sup[i] / piv
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _solve_cyclic(system: TridiagonalSystem) -> np.ndarray:
    n = system.size
    if n <= 2:
        A = system.to_dense()
        if abs(np.linalg.det(A)) < PIVOT_TOL:
            raise SolverError("singular periodic system")
        return np.linalg.solve(A, system.rhs)
    # Sherman-Morrison: A = T + u v^T with u = (g, 0.., alpha), v = (1, 0.., beta/g)
    alpha, beta = system.corner_lower, system.corner_upper
    gamma = -system.diag[0]
    diag = system.diag.astype(float).copy()
    diag[0] -= gamma
    diag[-1] -= alpha * beta / gamma
    x = solve_tridiagonal(system.sub, diag, system.sup, system.rhs)
    u = np.zeros(n)
    u[0], u[-1] = gamma, alpha
    z = solve_tridiagonal(system.sub, diag, system.sup, u)
    factor = (x[0] + beta * x[-1] / gamma) / (1.0 + z[0] + beta * z[-1] / gamma)
    return x - factor * z


def thomas_solve(system: TridiagonalSystem) -> SplineSolution:
    """Direct O(n) solve; periodic systems get a rank-one corner correction."""
    if system.periodic:
        inner = _solve_cyclic(system)
        M = np.concatenate([[inner[-1]], inner])
    else:
        M = solve_tridiagonal(system.sub, system.diag, system.sup, system.rhs)
    return SplineSolution(M, system)


def fit(dataset: SplineDataset, boundary: BoundaryCondition) -> SplineSolution:
    return thomas_solve(build_system(dataset, boundary))


def _locate(dataset: SplineDataset, xt: np.ndarray) -> np.ndarray:
    x = dataset.x
    if np.any(xt < x[0]) or np.any(xt > x[-1]) or np.any(np.isnan(xt)):
        raise DomainError(f"evaluation point outside [{x[0]}, {x[-1]}]")
    # an interior knot belongs to the interval on its left
    return np.clip(np.searchsorted(x, xt, side="left") - 1, 0, dataset.n - 1)


@dataclass(frozen=True)
class Features:
    """``S = M_i X_i + M_{i+1} X_{i+1} + Y_i`` (and likewise for ``S'``, ``S''``)."""

    index: np.ndarray
    left: np.ndarray
    right: np.ndarray
    offset: np.ndarray


def eval_features(dataset: SplineDataset, xt, order: int = 0) -> Features:
    """Weights of ``M_i`` and ``M_{i+1}`` plus the affine term at ``xt``.

    ``order`` selects the value (0), first derivative (1) or second
    derivative (2).
    """
    xt = np.asarray(xt, dtype=float)
    i = _locate(dataset, xt)
    x, y = dataset.x, dataset.y
    h = x[i + 1] - x[i]
    a = x[i + 1] - xt
    b = xt - x[i]
    if order == 0:
        left = a**3 / (6 * h) - h * a / 6
        right = b**3 / (6 * h) - h * b / 6
        offset = y[i] * a / h + y[i + 1] * b / h
    elif order == 1:
        left = -(a**2) / (2 * h) + h / 6
        right = b**2 / (2 * h) - h / 6
        offset = (y[i + 1] - y[i]) / h
    elif order == 2:
        left = a / h
        right = b / h
        offset = np.zeros_like(xt)
    else:
        raise InputError(f"derivative order must be 0, 1 or 2, got {order}")
    return Features(i, left, right, offset)


def evaluate(dataset: SplineDataset, solution: SplineSolution, xt):
    """``(S, S', S'')`` at ``xt`` (scalar or array); no extrapolation."""
    xt_arr = np.asarray(xt, dtype=float)
    i = _locate(dataset, xt_arr)
    x, y, M = dataset.x, dataset.y, np.asarray(solution.M)
    h = x[i + 1] - x[i]
    a = x[i + 1] - xt_arr
    b = xt_arr - x[i]
    Mi, Mj = M[i], M[i + 1]
    s = (Mi * a**3 + Mj * b**3) / (6 * h) + (y[i] - Mi * h**2 / 6) * a / h + (y[i + 1] - Mj * h**2 / 6) * b / h
    s1 = (-Mi * a**2 + Mj * b**2) / (2 * h) + (y[i + 1] - y[i]) / h - (Mj - Mi) * h / 6
    s2 = (Mi * a + Mj * b) / h
    if xt_arr.ndim == 0:
        return float(s), float(s1), float(s2)
    return s, s1, s2


def load_csv(path) -> SplineDataset:
    """Read a dataset from a CSV with header ``x,y``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "y"} <= {f.strip() for f in reader.fieldnames}:
            raise InputError(f"{path}: expected a header with columns x,y")
        rows = [{k.strip(): v for k, v in row.items()} for row in reader]
    return SplineDataset([float(r["x"]) for r in rows], [float(r["y"]) for r in rows])
