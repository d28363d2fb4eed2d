"""Shared construction helpers for the test suite.

Everything is seed-driven; no test relies on unseeded randomness.
"""

import numpy as np

from svmscreen import Dataset, build_context


def random_labels(rng, n, p_positive=0.5):
    """Labels with both classes guaranteed present (requires n >= 2)."""
    y = np.where(rng.random(n) < p_positive, 1.0, -1.0)
    if np.all(y == y[0]):
        y[rng.integers(0, n)] = -y[0]
    return y


def random_dataset(rng, n, m, density=1.0, p_positive=0.5):
    """Dense-backed dataset with optional sparsification."""
    x = rng.normal(size=(n, m))
    if density < 1.0:
        x[rng.random(size=x.shape) >= density] = 0.0
    return Dataset.from_dense(x, random_labels(rng, n, p_positive))


def feasible_theta(rng, y, scale=1.0):
    """Nonnegative theta with theta' y == 0 to near round-off.

    The positive-label mass is rescaled to match the negative-label mass,
    which lands |theta' y| at a few ulps, far below the 1e-6 feasibility
    tolerance.
    """
    theta = scale * (0.1 + rng.random(y.shape[0]))
    pos = y > 0
    s_pos = theta[pos].sum()
    s_neg = theta[~pos].sum()
    theta[pos] *= s_neg / s_pos
    return theta


def anchored_dataset(rng, n, m, anchor=1e7):
    """Dataset whose lambda_max is huge, so any moderate lambda1 is legal.

    Contexts built from hand-made theta vectors need lambda_max >= lambda1;
    one enormous column guarantees that without touching the geometry,
    which depends only on (theta1, lambda1, lambda2, y).  Aligning the
    anchor with the labels makes its threshold contribution
    anchor * n * (1 - bias^2), which cannot cancel.  Under screening the
    column is simply kept with an enormous bound: its fhat is the
    constant vector anchor * 1, not a multiple of y.
    """
    y = random_labels(rng, n)
    x = rng.normal(size=(n, m))
    x[:, 0] = anchor * y
    return Dataset.from_dense(x, y)


def synthetic_context(rng, n, lam1=None, ratio=None, m=4):
    """Context with a hand-made feasible theta1 and generic halfspace."""
    if lam1 is None:
        lam1 = 0.5 + rng.random()
    if ratio is None:
        ratio = 0.3 + 0.6 * rng.random()
    ds = anchored_dataset(rng, n, m)
    theta1 = feasible_theta(rng, ds.labels)
    return build_context(theta1, lam1, ratio * lam1, ds)


def solved_context(rng, dataset, lam1_frac, lam2_frac, tol=1e-12):
    """Context seeded by an actual solve at lam1 = lam1_frac * lambda_max.

    Returns None when lambda_max is degenerate or the solve fails, so
    callers can skip the draw.
    """
    from svmscreen import (
        SolverOptions,
        lambda_max,
        solve_primal,
        theta_at_lambda_max,
        theta_from_primal,
    )

    lam_max, bias, _ = lambda_max(dataset)
    if lam_max <= 0.0:
        return None
    lam1 = lam1_frac * lam_max
    if lam1_frac >= 1.0:
        theta = theta_at_lambda_max(dataset, lam_max, bias)
    else:
        model = solve_primal(dataset, lam1, options=SolverOptions(tol=tol))
        if not model.converged:
            return None
        theta = theta_from_primal(dataset, model.weights, model.bias, lam1)
    return build_context(theta, lam1, lam2_frac * lam1, dataset)
