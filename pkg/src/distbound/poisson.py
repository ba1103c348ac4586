"""Screened Poisson solves and the chained lambda-derivative systems.

One operator A = -L_h + lambda^2 I (5-point Laplacian L_h, Dirichlet
neighbours eliminated into the right-hand side, unknowns exactly the inside
nodes) serves three solves that differ only in their right-hand sides:

* base solve: A v = (1/h^2) (number of Dirichlet neighbours), from v = 1 on
  the boundary nodes;
* first derivative: A v' = -2 lambda v, zero Dirichlet data;
* second derivative: A v'' = -2 v - 4 lambda v', zero Dirichlet data.

The derivative systems are the exact lambda-derivatives of the discrete base
system, so central finite differences of the base solve over lambda
reproduce v' and v'' to second order in the step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadConfig
from .grid import (
    BinaryMask,
    ScalarField,
    boundary_mask,
    field_from_inside,
    neighbor_count_inside,
    shifted,
    validate_mask,
)


@dataclass(frozen=True)
class SolverConfig:
    """Solve parameters: decay rate lambda (or t = 1/lambda^2) and CG controls."""

    lam: float
    rel_tol: float = 1e-10
    max_iters: int | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise BadConfig(f"lambda must be positive, got {self.lam}")
        if not 0 < self.rel_tol <= 1e-4:
            raise BadConfig(f"rel_tol must lie in (0, 1e-4], got {self.rel_tol}")

    @classmethod
    def from_t(cls, t: float, **kw) -> "SolverConfig":
        if not t > 0:
            raise BadConfig(f"t must be positive, got {t}")
        return cls(lam=1.0 / math.sqrt(t), **kw)

    @property
    def t(self) -> float:
        return 1.0 / (self.lam * self.lam)


class ScreenedOperator:
    """Matrix-free SPD operator (-L_h + lambda^2 I) on the inside nodes.

    lambda = 0 is allowed (plain Poisson operator for the gradient
    normalisation step); the matrix stays SPD because every connected
    component of the inside set touches a Dirichlet boundary node.
    """

    def __init__(self, mask: BinaryMask, lam: float):
        validate_mask(mask)
        if lam < 0:
            raise BadConfig(f"lambda must be nonnegative, got {lam}")
        self.mask = mask
        self.lam = lam
        self._ins = mask.inside
        self._h2 = mask.spacing * mask.spacing
        self.n_unknowns = int(self._ins.sum())

    @property
    def diagonal(self) -> float:
        return 4.0 / self._h2 + self.lam * self.lam

    def matvec(self, x: np.ndarray) -> np.ndarray:
        g = np.zeros(self._ins.shape)
        g[self._ins] = x
        nb = (
            shifted(g, 1, 0, 0.0)
            + shifted(g, -1, 0, 0.0)
            + shifted(g, 0, 1, 0.0)
            + shifted(g, 0, -1, 0.0)
        )
        y = (4.0 * g - nb) / self._h2 + (self.lam * self.lam) * g
        return y[self._ins]

    def dirichlet_rhs(self, boundary_value: float = 1.0) -> np.ndarray:
        """Right-hand side collecting eliminated Dirichlet neighbours."""
        cnt = 4 - neighbor_count_inside(self.mask)[self._ins]
        return cnt.astype(np.float64) * (boundary_value / self._h2)


@dataclass
class SolveResult:
    x: np.ndarray
    residual: float
    converged: bool
    iterations: int


def solve_spd(op: ScreenedOperator, rhs: np.ndarray, config: SolverConfig | None = None,
              rel_tol: float = 1e-10, max_iters: int | None = None) -> SolveResult:
    """Jacobi-preconditioned conjugate gradients down to a true-residual check.

    Returns the best iterate with ``converged=False`` when the iteration cap
    is reached; the caller decides whether that is fatal.
    """
    if config is not None:
        rel_tol, max_iters = config.rel_tol, config.max_iters
    n = rhs.size
    cap = max_iters if max_iters is not None else 10 * max(1, n)
    if not np.isfinite(rhs).all():
        raise BadConfig("right-hand side contains non-finite values")
    b_norm = float(np.linalg.norm(rhs))
    if b_norm == 0.0:
        return SolveResult(np.zeros(n), 0.0, True, 0)
    inv_diag = 1.0 / op.diagonal
    x = np.zeros(n)
    r = rhs.copy()
    z = r * inv_diag
    p = z.copy()
    rz = float(r @ z)
    it = 0
    while it < cap:
        ap = op.matvec(p)
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        it += 1
        if np.linalg.norm(r) <= rel_tol * b_norm:
            true_r = rhs - op.matvec(x)
            if np.linalg.norm(true_r) <= rel_tol * b_norm:
                break
            r = true_r  # recursive residual drifted; resync and continue
        z = r * inv_diag
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    residual = float(np.linalg.norm(rhs - op.matvec(x)) / b_norm)
    return SolveResult(x, residual, residual <= rel_tol, it)


@dataclass(frozen=True)
class PdeBundle:
    """The base solution plus its first and second lambda-derivatives."""

    v: ScalarField
    v_prime: ScalarField
    v_second: ScalarField
    lam: float
    residuals: tuple[float, float, float]
    converged: tuple[bool, bool, bool]

    @property
    def flags(self) -> list[str]:
        return [
            f"no_convergence:{name}"
            for name, ok in zip(("v", "v_prime", "v_second"), self.converged)
            if not ok
        ]


def solve_v(mask: BinaryMask, config: SolverConfig,
            op: ScreenedOperator | None = None) -> tuple[ScalarField, SolveResult]:
    """Base screened-Poisson solve with value 1 on the boundary nodes."""
    if op is None:
        op = ScreenedOperator(mask, config.lam)
    res = solve_spd(op, op.dirichlet_rhs(1.0), config)
    return field_from_inside(mask, res.x, boundary_value=1.0), res


def solve_vprime(mask: BinaryMask, config: SolverConfig, v: ScalarField,
                 op: ScreenedOperator | None = None) -> tuple[ScalarField, SolveResult]:
    """First lambda-derivative solve, zero Dirichlet data."""
    if op is None:
        op = ScreenedOperator(mask, config.lam)
    rhs = -2.0 * config.lam * v.values[mask.inside]
    res = solve_spd(op, rhs, config)
    return field_from_inside(mask, res.x, boundary_value=0.0), res


def solve_vsecond(mask: BinaryMask, config: SolverConfig, v: ScalarField,
                  v_prime: ScalarField, op: ScreenedOperator | None = None,
                  ) -> tuple[ScalarField, SolveResult]:
    """Second lambda-derivative solve, zero Dirichlet data."""
    if op is None:
        op = ScreenedOperator(mask, config.lam)
    ins = mask.inside
    rhs = -2.0 * v.values[ins] - 4.0 * config.lam * v_prime.values[ins]
    res = solve_spd(op, rhs, config)
    return field_from_inside(mask, res.x, boundary_value=0.0), res


def solve_bundle(mask: BinaryMask, config: SolverConfig) -> PdeBundle:
    """Run the three chained solves, reusing a single operator."""
    op = ScreenedOperator(mask, config.lam)
    v, r0 = solve_v(mask, config, op)
    vp, r1 = solve_vprime(mask, config, v, op)
    vs, r2 = solve_vsecond(mask, config, v, vp, op)
    return PdeBundle(
        v=v,
        v_prime=vp,
        v_second=vs,
        lam=config.lam,
        residuals=(r0.residual, r1.residual, r2.residual),
        converged=(r0.converged, r1.converged, r2.converged),
    )
