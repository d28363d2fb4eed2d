"""Primal solver for the L1-regularized squared-hinge objective.

Minimizes ``F(w, b) = 0.5 * sum_i max(1 - y_i (w'x_i + b), 0)^2
+ lam * ||w||_1`` by accelerated proximal gradient: soft-thresholding on w
(the bias is an unpenalized coordinate), backtracking line search on the
smooth part, and a function-value restart so accepted objectives never
increase.  Iterations stop when the largest KKT residual falls below the
tolerance, which makes "converged" mean the same thing the screening
safety guarantees assume.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-9  # on the max KKT residual
    max_iter: int = 100_000
    keep_trace: bool = False  # record accepted objective values


@dataclass(frozen=True)
class PrimalModel:
    weights: np.ndarray
    bias: float
    objective: float
    iterations: int
    converged: bool
    trace: tuple = ()  # accepted objective values when requested


@dataclass(frozen=True)
class ThetaVector:
    """Scaled dual point theta = alpha / lam; theta >= 0 and theta'y = 0 at optimum."""

    values: np.ndarray
    lam: float


@dataclass(frozen=True)
class KktReport:
    """Stationarity diagnostics of a primal-dual pair.

    correlations holds theta' fhat_j per feature; r1 is the excess of
    |theta' fhat_j| over 1, r2 the worst sign mismatch on active features,
    r3 = |theta' y| and min_theta the smallest dual coordinate.
    """

    correlations: np.ndarray
    r1: float
    r2: float
    r3: float
    min_theta: float

    @property
    def r4(self):
        return max(0.0, -self.min_theta)

    @property
    def max_residual(self):
        return max(self.r1, self.r2, self.r3, self.r4)


def _hinge(dataset, w, b):
    """xi_i = max(1 - y_i (w'x_i + b), 0) for all samples."""
    scores = kernels.csc_matvec(
        dataset.col_ptr, dataset.row_idx, dataset.values, w, dataset.n_samples
    )
    return np.maximum(1.0 - dataset.labels * (scores + b), 0.0)


def grad_h(dataset, w, b):
    """Gradient of the smooth part: (-X' (xi * y), -sum(xi * y))."""
    w = np.asarray(w, dtype=np.float64)
    xi = _hinge(dataset, w, b)
    g = xi * dataset.labels
    grad_w = -kernels.csc_rmatvec(dataset.col_ptr, dataset.row_idx, dataset.values, g)
    return grad_w, -float(g.sum())


def objective_value(dataset, w, b, lam):
    """F(w, b) recomputed from scratch."""
    xi = _hinge(dataset, np.asarray(w, dtype=np.float64), b)
    return 0.5 * float(xi @ xi) + lam * float(np.abs(w).sum())


def _soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _spectral_bound(dataset, iters=80, seed=0):
    """Largest eigenvalue of A'A for A = [X, 1], by power iteration."""
    rng = np.random.default_rng(seed)
    m = dataset.n_features
    v = rng.standard_normal(m + 1)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iters):
        av = kernels.csc_matvec(
            dataset.col_ptr, dataset.row_idx, dataset.values, v[:m], dataset.n_samples
        )
        av += v[m]
        atav = np.empty(m + 1)
        atav[:m] = kernels.csc_rmatvec(dataset.col_ptr, dataset.row_idx, dataset.values, av)
        atav[m] = av.sum()
        new_estimate = float(np.linalg.norm(atav))
        if new_estimate == 0.0:
            return float(dataset.n_samples)  # the all-ones column alone
        v = atav / new_estimate
        if abs(new_estimate - estimate) <= 1e-10 * new_estimate:
            estimate = new_estimate
            break
        estimate = new_estimate
    return max(estimate, 1e-12)


def _kkt_residuals(dataset, w, xi, lam):
    theta = xi / lam
    corr = kernels.csc_rmatvec(
        dataset.col_ptr, dataset.row_idx, dataset.values, theta * dataset.labels
    )
    r1 = max(0.0, float(np.max(np.abs(corr))) - 1.0) if corr.size else 0.0
    active = w != 0.0
    if np.any(active):
        r2 = float(np.max(np.abs(corr[active] - np.sign(w[active]))))
    else:
        r2 = 0.0
    r3 = abs(float(theta @ dataset.labels))
    return corr, r1, r2, r3, (float(theta.min()) if theta.size else 0.0)


def solve_primal(dataset, lam, options=None, warm=None):
    """Solve the primal problem at regularization weight lam.

    Parameters
    ----------
    dataset : Dataset
    lam : float
        Positive L1 weight; lam = 0 leaves the problem potentially
        unbounded and is rejected.
    options : SolverOptions, optional
    warm : (weights, bias), optional
        Starting point, e.g. the solution at a nearby lam.

    Returns
    -------
    PrimalModel; converged is True when every KKT residual is within
    options.tol.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    opts = options or SolverOptions()

    m = dataset.n_features
    if warm is not None:
        w = np.array(warm[0], dtype=np.float64)
        b = float(warm[1])
        if w.shape != (m,):
            raise ValueError("warm start has wrong number of weights")
    else:
        w = np.zeros(m)
        b = 0.0

    step = 1.0 / _spectral_bound(dataset)
    xi = _hinge(dataset, w, b)
    f_x = 0.5 * float(xi @ xi) + lam * float(np.abs(w).sum())
    trace = [f_x] if opts.keep_trace else None

    wz, bz = w.copy(), b
    t_momentum = 1.0
    converged = False
    iterations = 0

    def prox_step(w_from, b_from, grad_w, grad_b, h_from):
        nonlocal step
        while True:
            w_new = _soft_threshold(w_from - step * grad_w, lam * step)
            b_new = b_from - step * grad_b
            xi_new = _hinge(dataset, w_new, b_new)
            h_new = 0.5 * float(xi_new @ xi_new)
            dw = w_new - w_from
            db = b_new - b_from
            majorant = (
                h_from
                + float(grad_w @ dw)
                + grad_b * db
                + (float(dw @ dw) + db * db) / (2.0 * step)
            )
            if h_new <= majorant + 1e-12 * max(1.0, abs(h_from)) or step < 1e-18:
                return w_new, b_new, xi_new, h_new
            step *= 0.5

    for iterations in range(1, opts.max_iter + 1):
        xi_z = _hinge(dataset, wz, bz)
        h_z = 0.5 * float(xi_z @ xi_z)
        g = xi_z * dataset.labels
        grad_w = -kernels.csc_rmatvec(dataset.col_ptr, dataset.row_idx, dataset.values, g)
        grad_b = -float(g.sum())

        w_new, b_new, xi_new, h_new = prox_step(wz, bz, grad_w, grad_b, h_z)
        f_new = h_new + lam * float(np.abs(w_new).sum())

        if f_new > f_x:
            # Momentum overshot: redo a plain proximal step from the last
            # accepted point, which the majorant makes non-increasing, and
            # drop the accumulated momentum.
            g = xi * dataset.labels
            grad_w = -kernels.csc_rmatvec(dataset.col_ptr, dataset.row_idx, dataset.values, g)
            grad_b = -float(g.sum())
            h_x = 0.5 * float(xi @ xi)
            w_new, b_new, xi_new, h_new = prox_step(w, b, grad_w, grad_b, h_x)
            f_new = h_new + lam * float(np.abs(w_new).sum())
            t_momentum = 1.0

        w_prev, b_prev = w, b
        w, b, xi, f_x = w_new, b_new, xi_new, f_new
        if trace is not None:
            trace.append(f_x)

        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_momentum * t_momentum))
        beta = (t_momentum - 1.0) / t_next
        wz = w + beta * (w - w_prev)
        bz = b + beta * (b - b_prev)
        t_momentum = t_next

        _, r1, r2, r3, min_theta = _kkt_residuals(dataset, w, xi, lam)
        if max(r1, r2, r3, max(0.0, -min_theta)) <= opts.tol:
            converged = True
            break

    return PrimalModel(
        weights=w,
        bias=b,
        objective=f_x,
        iterations=iterations,
        converged=converged,
        trace=tuple(trace) if trace is not None else (),
    )


def theta_from_primal(dataset, w, b, lam):
    """Recover the scaled dual point: theta_i = max(1 - y_i (w'x_i + b), 0) / lam."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    xi = _hinge(dataset, np.asarray(w, dtype=np.float64), b)
    return ThetaVector(values=xi / lam, lam=lam)


def kkt_report(dataset, model, lam):
    """Stationarity diagnostics for a PrimalModel at weight lam."""
    theta = theta_from_primal(dataset, model.weights, model.bias, lam)
    corr, r1, r2, r3, min_theta = _kkt_residuals(
        dataset, np.asarray(model.weights, dtype=np.float64), theta.values * lam, lam
    )
    return KktReport(correlations=corr, r1=r1, r2=r2, r3=r3, min_theta=min_theta)


def lambda_max(dataset):
    """Smallest regularization weight with the all-zero weight vector optimal.

    Returns (lambda_max, bias, direction): the threshold, the bias of the
    trivial model, and the per-feature vector whose max-magnitude entry
    attains the threshold.
    """
    n = dataset.n_samples
    bias = (dataset.n_pos - dataset.n_neg) / n
    direction = kernels.csc_rmatvec(
        dataset.col_ptr, dataset.row_idx, dataset.values, dataset.labels - bias
    )
    return float(np.max(np.abs(direction))), float(bias), direction


def first_features(direction):
    """Indices attaining max |direction_j| within relative tie slack 1e-12.

    These are the features that enter the model as the weight drops just
    below lambda_max; a zero direction means no feature ever enters.
    """
    direction = np.asarray(direction, dtype=np.float64)
    magnitudes = np.abs(direction)
    top = float(magnitudes.max()) if magnitudes.size else 0.0
    if top == 0.0:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(magnitudes >= top * (1.0 - 1e-12)).astype(np.int64)


def model_to_json(model, lam):
    """Serialize a model; weight indices are 1-based to match the text format."""
    nz = np.flatnonzero(model.weights != 0.0)
    return json.dumps(
        {
            "lambda": lam,
            "bias": model.bias,
            "weights": [[int(j) + 1, float(model.weights[j])] for j in nz],
            "objective": model.objective,
            "iterations": model.iterations,
            "converged": bool(model.converged),
        },
        indent=2,
    )


def model_from_json(text, n_features):
    """Inverse of model_to_json; needs the feature count to size the array."""
    payload = json.loads(text)
    w = np.zeros(n_features)
    for index, value in payload["weights"]:
        w[index - 1] = value
    return (
        PrimalModel(
            weights=w,
            bias=float(payload["bias"]),
            objective=float(payload["objective"]),
            iterations=int(payload["iterations"]),
            converged=bool(payload["converged"]),
        ),
        float(payload["lambda"]),
    )
