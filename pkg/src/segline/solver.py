"""Penalized solvers over the segmented cumulative design.

The weighted-L1 (adaptive LASSO) problem is solved by cyclic coordinate
descent on the precomputed Gram system. SCAD and MCP solves wrap the same
inner solver in a local linear approximation loop, so a stationary point
of the nonconvex objective is a fixed point of reweighted-L1 solves.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import _kernels
from .design import SegmentedDesign
from .penalties import mcp_derivative, mcp_penalty, scad_derivative, scad_penalty

__all__ = [
    "PenaltySpec",
    "SolveReport",
    "SolverError",
    "solve_weighted_l1",
    "solve_group_penalized",
    "select_lambda_bic",
    "default_lambda_grid",
    "refit_active",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_SWEEPS = 40_000


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty choice and tuning parameters for one solve.

    weights apply to the weighted-L1 kind only: one nonnegative value per
    group (group 0 first). A zero weight leaves the group unpenalized and
    an infinite weight pins it to zero.
    """

    kind: str
    lam: float
    gamma: float = 3.7
    nu: float = 1.0
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("weighted-l1", "scad", "mcp"):
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.kind == "scad" and self.gamma <= 2:
            raise ValueError("SCAD requires gamma > 2")
        if self.kind == "mcp" and self.gamma <= 1:
            raise ValueError("MCP requires gamma > 1")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.kind == "weighted-l1" and self.weights is not None:
            if any(w < 0 for w in self.weights):
                raise ValueError("weights must be nonnegative")


@dataclass(frozen=True)
class SolveReport:
    theta_hat: NDArray[np.float64]
    kkt_residual: float
    iterations: int
    objective: float
    rss: float
    active_groups: tuple[int, ...]
    converged: bool = True
    meta: dict = field(default_factory=dict)

    def group(self, design: SegmentedDesign, g: int) -> NDArray[np.float64]:
        return design.group_coef(self.theta_hat, g)


class SolverError(RuntimeError):
    """Solver failed to converge; carries the last iterate for diagnostics."""

    def __init__(self, message: str, report: SolveReport):
        super().__init__(message)
        self.report = report


def _scalar_lam(design: SegmentedDesign, lam: float, weights: np.ndarray) -> np.ndarray:
    """Expand per-group L1 weights to one entry per scalar coefficient.

    Infinite weights pin their group to zero at any lam, including lam=0.
    """
    out = np.repeat(np.where(np.isinf(weights), np.inf, lam * weights), design.q)
    return out


def _run_cd(
    design: SegmentedDesign,
    lam_scalar: np.ndarray,
    theta0: np.ndarray | None,
    tol: float,
    max_sweeps: int,
) -> tuple[np.ndarray, float, int, bool]:
    theta = (
        np.zeros(design.p_total) if theta0 is None else np.array(theta0, dtype=np.float64)
    )
    kkt, sweeps, ok = _kernels.cd_weighted_l1(
        design.gram,
        design.xty,
        np.ascontiguousarray(lam_scalar, dtype=np.float64),
        theta,
        max_sweeps,
        tol,
    )
    return theta, float(kkt), int(sweeps), bool(ok)


def _report(
    design: SegmentedDesign,
    theta: np.ndarray,
    penalty_value: float,
    kkt: float,
    sweeps: int,
    converged: bool,
    **meta,
) -> SolveReport:
    rss = design.rss(theta)
    groups = theta.reshape(design.n_groups, design.q)
    active = tuple(
        g for g in range(design.n_groups) if np.abs(groups[g]).sum() > 0.0
    )
    return SolveReport(
        theta_hat=theta,
        kkt_residual=kkt,
        iterations=sweeps,
        objective=rss + penalty_value,
        rss=rss,
        active_groups=active,
        converged=converged,
        meta=meta,
    )


def resolve_weights(design: SegmentedDesign, spec: PenaltySpec) -> np.ndarray:
    """Per-group weights for a weighted-L1 spec, defaulting group 0 to 1/q."""
    if spec.weights is not None:
        w = np.asarray(spec.weights, dtype=np.float64)
        if w.shape != (design.n_groups,):
            raise ValueError(
                f"need {design.n_groups} group weights, got {w.shape}"
            )
        return w
    w = np.ones(design.n_groups)
    w[0] = 1.0 / design.q
    return w


def solve_weighted_l1(
    design: SegmentedDesign,
    spec: PenaltySpec,
    *,
    theta0: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> SolveReport:
    """Minimize ||y - X theta||^2 + lam * sum_g w_g |theta_g|_1."""
    if spec.kind != "weighted-l1":
        raise ValueError("spec.kind must be 'weighted-l1'")
    weights = resolve_weights(design, spec)
    lam_scalar = _scalar_lam(design, spec.lam, weights)
    if not np.any(np.isfinite(lam_scalar) & (lam_scalar > 0)):
        # penalty vanishes: minimum-norm least squares on the free coordinates
        free = ~np.isinf(lam_scalar)
        theta = np.zeros(design.p_total)
        sub = design.gram[np.ix_(free, free)]
        theta[free] = np.linalg.pinv(sub) @ design.xty[free]
        return _report(design, theta, 0.0, 0.0, 0, True, lam=spec.lam)
    theta, kkt, sweeps, ok = _run_cd(design, lam_scalar, theta0, tol, max_sweeps)
    groups_l1 = np.abs(theta.reshape(design.n_groups, design.q)).sum(axis=1)
    finite = np.isfinite(weights)
    penalty = spec.lam * float(weights[finite] @ groups_l1[finite])
    rep = _report(design, theta, penalty, kkt, sweeps, ok, lam=spec.lam)
    if not ok:
        raise SolverError(
            f"weighted-L1 solve did not converge in {sweeps} sweeps "
            f"(kkt residual {kkt:.3e})",
            rep,
        )
    return rep


def solve_group_penalized(
    design: SegmentedDesign,
    spec: PenaltySpec,
    *,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    max_outer: int = 50,
) -> SolveReport:
    """Reach a stationary point of the SCAD/MCP group-penalized objective.

    The objective is ||y - X theta||^2 + n * sum_g p(|theta_g|_1); all
    groups including the base coefficients are penalized. Deterministic:
    fixed sweep order, zero start, reweighting until the weights fix.
    """
    if spec.kind not in ("scad", "mcp"):
        raise ValueError("spec.kind must be 'scad' or 'mcp'")
    pen = scad_penalty if spec.kind == "scad" else mcp_penalty
    dpen = scad_derivative if spec.kind == "scad" else mcp_derivative
    n = design.data.n

    theta = np.zeros(design.p_total)
    lam_scalar = np.full(design.p_total, n * dpen(0.0, spec.lam, spec.gamma))
    prev_lam = None
    kkt, sweeps_total, ok = np.inf, 0, False
    for _ in range(max_outer):
        theta, kkt, sweeps, ok = _run_cd(design, lam_scalar, theta, tol, max_sweeps)
        sweeps_total += sweeps
        if not ok:
            break
        groups_l1 = np.abs(theta.reshape(design.n_groups, design.q)).sum(axis=1)
        new_lam = np.repeat(
            np.array([n * dpen(v, spec.lam, spec.gamma) for v in groups_l1]),
            design.q,
        )
        if prev_lam is not None and np.array_equal(new_lam, lam_scalar):
            break
        prev_lam = lam_scalar
        if np.array_equal(new_lam, lam_scalar):
            break
        lam_scalar = new_lam
    groups_l1 = np.abs(theta.reshape(design.n_groups, design.q)).sum(axis=1)
    penalty = n * sum(pen(v, spec.lam, spec.gamma) for v in groups_l1)
    rep = _report(
        design, theta, penalty, kkt, sweeps_total, ok, lam=spec.lam, gamma=spec.gamma
    )
    if not ok:
        raise SolverError(
            f"{spec.kind} solve did not converge (kkt residual {kkt:.3e})", rep
        )
    return rep


def default_lambda_grid(
    design: SegmentedDesign,
    weights: np.ndarray,
    *,
    num: int = 50,
    span: float = 1e-4,
) -> np.ndarray:
    """Log-spaced grid over [span, 1] * lam_max, descending.

    lam_max = max_j 2|b_j| / w_j is the smallest penalty level at which the
    all-zero vector solves the weighted-L1 problem, so the path starts from
    a certifiably empty model and grows as lam decreases.
    """
    q = design.q
    grad = 2.0 * np.abs(design.xty)
    w_scalar = np.repeat(weights, q)
    mask = np.isfinite(w_scalar) & (w_scalar > 0)
    if not np.any(mask):
        return np.array([1.0])
    lam_max = float(np.max(grad[mask] / w_scalar[mask]))
    if lam_max <= 0:
        return np.array([1.0])
    return np.geomspace(lam_max, span * lam_max, num)


def refit_active(design: SegmentedDesign, theta: np.ndarray) -> np.ndarray:
    """Unpenalized least squares restricted to the nonzero coordinates.

    Removes shrinkage from a penalized solution while keeping its support;
    rank-deficient active subsystems use the minimum-norm fit.
    """
    active = theta != 0.0
    out = np.zeros(design.p_total)
    if active.any():
        sub = design.gram[np.ix_(active, active)]
        out[active] = np.linalg.pinv(sub) @ design.xty[active]
    return out


def select_lambda_bic(
    design: SegmentedDesign,
    lambda_grid: np.ndarray,
    *,
    nu: float = 1.0,
    weights: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    rss_mode: str = "refit",
) -> tuple[float, SolveReport]:
    """Pick lambda from the grid by BIC; ties break toward larger lambda.

    BIC(lam) = n log(RSS/n) + k log n with k the number of nonzero scalar
    coefficients. rss_mode picks the RSS entering the criterion: "refit"
    re-solves unpenalized least squares on the selected coordinates
    (shrinkage-free, so spurious coordinates must pay their way through
    k log n alone), "penalized" scores the shrunken fit directly. Failed
    grid points are skipped with a warning; an all-failed grid raises.
    """
    if rss_mode not in ("refit", "penalized"):
        raise ValueError("rss_mode must be 'refit' or 'penalized'")
    grid = np.sort(np.asarray(lambda_grid, dtype=np.float64))[::-1]
    if grid.size == 0 or np.any(grid <= 0):
        raise ValueError("lambda grid must be nonempty and positive")
    n = design.data.n
    if weights is None:
        weights = resolve_weights(
            design, PenaltySpec(kind="weighted-l1", lam=1.0, nu=nu)
        )
    best: tuple[float, float, SolveReport] | None = None
    theta_warm: np.ndarray | None = None
    for lam in grid:
        spec = PenaltySpec(kind="weighted-l1", lam=float(lam), nu=nu, weights=tuple(weights))
        try:
            rep = solve_weighted_l1(
                design, spec, theta0=theta_warm, tol=tol, max_sweeps=max_sweeps
            )
        except SolverError as exc:
            log.warning("skipping lambda=%g: %s", lam, exc)
            theta_warm = exc.report.theta_hat
            continue
        theta_warm = rep.theta_hat
        k = int(np.count_nonzero(rep.theta_hat))
        rss = rep.rss
        if rss_mode == "refit" and k:
            rss = design.rss(refit_active(design, rep.theta_hat))
        rss = max(rss, 1e-300)
        bic = n * np.log(rss / n) + k * np.log(n)
        if best is None or bic < best[0]:
            best = (bic, float(lam), rep)
    if best is None:
        raise SolverError("every lambda in the grid failed", rep=None)  # type: ignore[arg-type]
    return best[1], best[2]
