"""Regularization path driver.

Walks a decreasing lambda grid starting from lambda_max, where the model
is exactly zero and the dual point has a closed form.  Each step screens
features at the next lambda using the previous converged solution, solves
the reduced problem with a warm start, reassembles the full weight vector
and recomputes the dual point for the step after.  Optional verify mode
also solves the unreduced problem at every step and counts discarded
features that were actually active, which must be zero whenever the
screening inputs were trustworthy.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import screening
from . import solver
from .data import compute_feature_stats
from .solver import SolverOptions


class DegenerateProblemError(ValueError):
    """The dataset admits no regularization path (lambda_max is 0)."""


@dataclass(frozen=True)
class PathConfig:
    """Knobs for a path run.

    lambdas, when given, overrides the geometric grid; values must be
    strictly decreasing, positive and below lambda_max.  screen=False
    solves every step on all features, for A/B comparisons.
    """

    grid_size: int = 10
    ratio: float = 0.8
    lambdas: tuple = ()
    solver: SolverOptions = field(default_factory=SolverOptions)
    verify: bool = False
    screen: bool = True
    threads: object = None


@dataclass(frozen=True)
class PathStep:
    lam: float
    kept: int
    active: int
    violations: object
    screen_ms: float
    solve_ms: float
    objective: float
    converged: bool
    trusted: bool
    weights: np.ndarray
    bias: float
    kept_indices: np.ndarray
    max_weight_diff: object = None


@dataclass(frozen=True)
class PathReport:
    lambda_max: float
    bias_at_lambda_max: float
    steps: tuple
    verify: bool

    CSV_HEADER = "lambda,kept,active,violations,screen_ms,solve_ms,objective"

    def to_csv(self):
        lines = [self.CSV_HEADER]
        for s in self.steps:
            violations = "" if s.violations is None else str(s.violations)
            lines.append(
                f"{s.lam!r},{s.kept},{s.active},{violations},"
                f"{s.screen_ms:.3f},{s.solve_ms:.3f},{s.objective!r}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self):
        steps = [
            {
                "lambda": s.lam,
                "kept": s.kept,
                "active": s.active,
                "violations": s.violations,
                "screen_ms": s.screen_ms,
                "solve_ms": s.solve_ms,
                "objective": s.objective,
                "converged": s.converged,
                "trusted": s.trusted,
            }
            for s in self.steps
        ]
        payload = {
            "lambda_max": self.lambda_max,
            "bias_at_lambda_max": self.bias_at_lambda_max,
            "verify": self.verify,
            "steps": steps,
        }
        return json.dumps(payload, indent=2)

    @property
    def total_violations(self):
        return sum(s.violations for s in self.steps if s.violations is not None)


def lambda_grid(lam_max, k, ratio):
    """Geometric grid lam_max * ratio**i for i = 1..k (lam_max excluded)."""
    if k < 1:
        raise ValueError("grid size must be at least 1")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie strictly between 0 and 1")
    return float(lam_max) * float(ratio) ** np.arange(1, k + 1, dtype=np.float64)


def _validated_grid(lambdas, lam_max):
    grid = np.asarray(lambdas, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("path grid must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0.0):
        raise ValueError("path grid values must be positive and finite")
    if np.any(np.diff(grid) >= 0.0):
        raise ValueError("path grid must be strictly decreasing")
    if grid[0] >= lam_max:
        raise ValueError("path grid must start below lambda_max")
    return grid


def run_path(dataset, config=None):
    """Trace models along a decreasing lambda grid with screening between steps.

    Parameters
    ----------
    dataset : Dataset
    config : PathConfig, optional

    Returns
    -------
    PathReport with one PathStep per grid value.

    Raises
    ------
    DegenerateProblemError
        When lambda_max is 0, i.e. the zero model is optimal everywhere
        and there is no path to trace.
    """
    cfg = config if config is not None else PathConfig()
    lam_max, bias0, _ = solver.lambda_max(dataset)
    if lam_max <= 0.0:
        raise DegenerateProblemError(
            "lambda_max is zero for this dataset, so the zero-weight model is "
            "optimal at every positive lambda and the path is empty"
        )
    if len(cfg.lambdas) > 0:
        grid = _validated_grid(cfg.lambdas, lam_max)
    else:
        grid = lambda_grid(lam_max, cfg.grid_size, cfg.ratio)
        grid = _validated_grid(grid, lam_max)

    m = dataset.n_features
    stats = compute_feature_stats(dataset)
    theta_prev = screening.theta_at_lambda_max(dataset, lam_max, bias0)
    lam_prev = lam_max
    w_prev = np.zeros(m)
    b_prev = float(bias0)
    w_prev_full = w_prev
    b_prev_full = b_prev
    prev_converged = True

    steps = []
    for lam2 in grid:
        lam2 = float(lam2)
        kept_idx = np.arange(m, dtype=np.int64)
        screen_ms = 0.0
        trusted = prev_converged
        if cfg.screen:
            try:
                ctx = screening.build_context(theta_prev, lam_prev, lam2, dataset)
            except ValueError:
                # Unconverged previous step can leave theta slightly
                # infeasible; keep everything rather than abort the path.
                trusted = False
            else:
                report = screening.screen_all(ctx, dataset, stats, threads=cfg.threads)
                kept_idx = report.kept
                screen_ms = report.elapsed_seconds * 1000.0

        t0 = time.perf_counter()
        if kept_idx.size == m:
            reduced = dataset
            warm = (w_prev, b_prev)
        else:
            reduced = dataset.subset(kept_idx)
            warm = (w_prev[kept_idx], b_prev)
        if kept_idx.size == 0:
            # No features survive: optimal bias has the closed form used
            # at lambda_max, since the hinge stays active on both classes.
            w_full = np.zeros(m)
            b_full = float(bias0)
            objective = solver.objective_value(dataset, w_full, b_full, lam2)
            converged = True
        else:
            model = solver.solve_primal(reduced, lam2, options=cfg.solver, warm=warm)
            w_full = np.zeros(m)
            w_full[kept_idx] = model.weights
            b_full = model.bias
            objective = model.objective
            converged = model.converged
        solve_ms = (time.perf_counter() - t0) * 1000.0

        violations = None
        max_weight_diff = None
        if cfg.verify:
            full = solver.solve_primal(
                dataset, lam2, options=cfg.solver, warm=(w_prev_full, b_prev_full)
            )
            if converged and full.converged:
                discarded = np.setdiff1d(np.arange(m, dtype=np.int64), kept_idx)
                violations = int(np.sum(np.abs(full.weights[discarded]) > 1e-8))
                max_weight_diff = float(np.max(np.abs(w_full - full.weights), initial=0.0))
            w_prev_full = full.weights
            b_prev_full = full.bias

        steps.append(
            PathStep(
                lam=lam2,
                kept=int(kept_idx.size),
                active=int(np.count_nonzero(w_full)),
                violations=violations,
                screen_ms=screen_ms,
                solve_ms=solve_ms,
                objective=float(objective),
                converged=converged,
                trusted=trusted,
                weights=w_full,
                bias=float(b_full),
                kept_indices=kept_idx,
                max_weight_diff=max_weight_diff,
            )
        )

        theta_prev = solver.theta_from_primal(dataset, w_full, b_full, lam2)
        lam_prev = lam2
        w_prev = w_full
        b_prev = float(b_full)
        prev_converged = converged

    return PathReport(
        lambda_max=float(lam_max),
        bias_at_lambda_max=float(bias0),
        steps=tuple(steps),
        verify=cfg.verify,
    )
