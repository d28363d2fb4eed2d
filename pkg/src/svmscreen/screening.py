"""Safe feature screening between two regularization weights.

Given the dual point theta1 of a solved problem at lambda1, the next dual
point at lambda2 < lambda1 is confined to the intersection of a ball, a
halfspace anchored at theta1, and the hyperplane theta'y = 0.  A feature
can only be active at lambda2 if |theta2' fhat_j| reaches 1, so the
closed-form maximum of ±theta' fhat_j over that region discards features
safely: a discarded feature provably has zero weight at lambda2.

The halfspace normal is taken as ``a = (1/lambda1 - theta1) / ||.||`` and
the feasible side is ``a'(theta - theta1) <= 0``; the brute-force oracle
module certifies this orientation together with every closed form.
"""

import json
import time
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import geometry, kernels
from .solver import ThetaVector, lambda_max


#: Keep a feature when its bound reaches 1 - EPS_KEEP.  The slack must
#: dominate the optimality residual of theta1, which propagates into the
#: bound with an instance-dependent factor: a feature active at both
#: penalties has a true bound of exactly 1, computed from a tol-1e-9
#: solve as 1 minus a few 1e-9.  1e-7 keeps three orders of margin while
#: discarding anything meaningfully below 1.
EPS_KEEP = 1e-7


class Branch(IntEnum):
    DEGENERATE_F = kernels.DEGENERATE_F
    BETA_ZERO = kernels.BETA_ZERO
    ALPHA_ZERO = kernels.ALPHA_ZERO
    INTERIOR_CORNER = kernels.INTERIOR_CORNER


@dataclass(frozen=True)
class ScreeningContext:
    """Everything derived from (lambda1, theta1, lambda2) that features share.

    ``normal`` is None when the halfspace is uninformative (theta1 equals
    the ball-family anchor 1/lambda1 up to round-off, or its normal is
    collinear with the labels); screening then uses the ball and the
    equality constraint alone.
    """

    lambda1: float
    lambda2: float
    theta1: np.ndarray
    labels: np.ndarray
    n: int
    dataset: object
    normal: np.ndarray | None
    b_vec: np.ndarray
    c_vec: np.ndarray
    # scalars shared by all features
    norm_u: float  # ||1/lambda1 - theta1||
    a_dot_y: float
    a_dot_one: float
    a_dot_theta1: float
    pya_norm: float  # ||P_y(a)||
    pyb_norm: float  # ||P_y(b_vec)||
    b_dot_y: float
    y_dot_one: float
    py_a_dot_py_b: float
    pay_sq: float  # ||P_a(y)||^2
    pa1y: float  # P_a(1)' P_a(y)
    nested1_norm: float  # ||P_{P_a(y)}(P_a(1))||
    half_dl: float  # (1/lambda2 - 1/lambda1) / 2
    slice_degenerate: bool
    ball0: geometry.Ball
    t_star: float | None
    min_ball: geometry.Ball | None
    pa_one: np.ndarray | None
    nested_pa_one: np.ndarray | None

    @property
    def has_normal(self):
        return self.normal is not None


@dataclass(frozen=True)
class FeatureBound:
    """Bound on |theta2' fhat_j| with the branch taken for each sign."""

    index: int
    m1: float  # -min theta' fhat
    m2: float  # -min theta' (-fhat) == max theta' fhat
    branch1: Branch
    branch2: Branch
    keep: bool

    @property
    def bound(self):
        return max(self.m1, self.m2)


@dataclass(frozen=True)
class ScreenReport:
    lambda1: float
    lambda2: float
    kept: np.ndarray  # 0-based feature indices
    bounds: np.ndarray  # per-feature max(m1, m2)
    m1: np.ndarray
    m2: np.ndarray
    branch1: np.ndarray
    branch2: np.ndarray
    elapsed_seconds: float

    @property
    def rejection_rate(self):
        m = self.bounds.shape[0]
        return 1.0 - self.kept.shape[0] / m if m else 0.0

    def branch_counts(self):
        """Evaluations per branch, counting both signs of every feature."""
        counts = {}
        for branch in Branch:
            counts[branch.name.lower()] = int(
                (self.branch1 == branch).sum() + (self.branch2 == branch).sum()
            )
        return counts

    def to_json(self):
        """JSON with 1-based kept indices, matching the text data format."""
        return json.dumps(
            {
                "lambda1": self.lambda1,
                "lambda2": self.lambda2,
                "kept": [int(j) + 1 for j in self.kept],
                "bounds": [float(v) for v in self.bounds],
                "branches": self.branch_counts(),
                "elapsed_seconds": self.elapsed_seconds,
            },
            indent=2,
        )


def build_context(theta1, lambda1, lambda2, dataset):
    """Precompute the screening region for a lambda1 -> lambda2 step.

    Parameters
    ----------
    theta1 : array or ThetaVector
        Dual point at lambda1; must be (approximately) feasible:
        componentwise >= -1e-10 and |theta1' y| <= 1e-6.
    lambda1, lambda2 : float
        Must satisfy lambda_max >= lambda1 > lambda2 > 0.
    dataset : Dataset

    Returns
    -------
    ScreeningContext with all feature-independent quantities cached.
    """
    if isinstance(theta1, ThetaVector):
        if abs(theta1.lam - lambda1) > 1e-9 * max(lambda1, theta1.lam):
            raise ValueError("theta1 was computed at a different lambda1")
        theta1 = theta1.values
    theta1 = np.ascontiguousarray(theta1, dtype=np.float64)

    if lambda2 <= 0 or lambda1 <= lambda2:
        raise ValueError("lambda ordering violated: require lambda1 > lambda2 > 0")
    lam_cap, _, _ = lambda_max(dataset)
    if lambda1 > lam_cap * (1.0 + 1e-9) + 1e-12:
        raise ValueError("lambda ordering violated: lambda1 exceeds lambda_max")

    y = dataset.labels
    n = dataset.n_samples
    if theta1.shape != (n,):
        raise ValueError("theta1 length does not match n_samples")
    if float(theta1.min()) < -1e-10:
        raise ValueError("theta1 infeasible: negative coordinates")
    if abs(float(theta1 @ y)) > 1e-6:
        raise ValueError("theta1 infeasible: theta1' y is not 0")

    inv_l1 = 1.0 / lambda1
    inv_l2 = 1.0 / lambda2

    b_vec = 0.5 * (inv_l2 - theta1)
    c_vec = theta1 + b_vec  # exact c - theta1 == b by construction

    # Projection norms are taken from residual vectors, never from the
    # difference-of-squares identity: near-parallel inputs cancel there
    # and round-off can fabricate a nonzero normal, which would feed the
    # anti-parallel branch a garbage direction.
    a_unnormalized = inv_l1 - theta1
    norm_u = float(np.linalg.norm(a_unnormalized))
    normal = None
    if norm_u > 1e-12 * inv_l1 * np.sqrt(n):
        candidate = a_unnormalized / norm_u
        residual = candidate - (float(candidate @ y) / n) * y
        if float(np.linalg.norm(residual)) > 1e-12:
            normal = candidate

    b_dot_y = float(b_vec @ y)
    y_dot_one = float(y.sum())
    norm_b = float(np.linalg.norm(b_vec))
    pyb_norm = float(np.linalg.norm(b_vec - (b_dot_y / n) * y))
    slice_degenerate = pyb_norm <= 1e-12 * norm_b
    ball0 = geometry.Ball(c_vec, norm_b)

    if normal is not None:
        a_dot_y = float(normal @ y)
        a_dot_one = float(normal.sum())
        a_dot_theta1 = float(normal @ theta1)
        pya_norm = float(np.linalg.norm(normal - (a_dot_y / n) * y))
        py_a_dot_py_b = float(normal @ b_vec) - a_dot_y * b_dot_y / n
        pay_sq = n * pya_norm * pya_norm
        pa_one = geometry.project_null(normal, np.ones(n))
        pa_y = geometry.project_null(normal, y)
        pa1y = float(pa_one @ pa_y)
        nested_pa_one = geometry.project_null(pa_y, pa_one)
        nested1_norm = float(np.linalg.norm(nested_pa_one))
        t_star, min_ball = geometry.min_radius_ball(theta1, lambda1, lambda2, normal)
    else:
        a_dot_y = a_dot_one = a_dot_theta1 = 0.0
        pya_norm = 0.0
        py_a_dot_py_b = 0.0
        pay_sq = float(n)
        pa1y = 0.0
        nested1_norm = 0.0
        pa_one = None
        nested_pa_one = None
        t_star = None
        min_ball = None

    return ScreeningContext(
        lambda1=float(lambda1),
        lambda2=float(lambda2),
        theta1=theta1,
        labels=y,
        n=n,
        dataset=dataset,
        normal=normal,
        b_vec=b_vec,
        c_vec=c_vec,
        norm_u=norm_u,
        a_dot_y=a_dot_y,
        a_dot_one=a_dot_one,
        a_dot_theta1=a_dot_theta1,
        pya_norm=pya_norm,
        pyb_norm=pyb_norm,
        b_dot_y=b_dot_y,
        y_dot_one=y_dot_one,
        py_a_dot_py_b=py_a_dot_py_b,
        pay_sq=pay_sq,
        pa1y=pa1y,
        nested1_norm=nested1_norm,
        half_dl=0.5 * (inv_l2 - inv_l1),
        slice_degenerate=bool(slice_degenerate),
        ball0=ball0,
        t_star=t_star,
        min_ball=min_ball,
        pa_one=pa_one,
        nested_pa_one=nested_pa_one,
    )


def _scalar_args(ctx):
    return (
        1.0 / ctx.lambda1,
        1.0 / ctx.lambda2,
        float(ctx.n),
        ctx.has_normal,
        ctx.slice_degenerate,
        ctx.norm_u,
        ctx.a_dot_y,
        ctx.a_dot_one,
        ctx.a_dot_theta1,
        ctx.pya_norm,
        ctx.pyb_norm,
        ctx.b_dot_y,
        ctx.py_a_dot_py_b,
        ctx.pay_sq,
        ctx.pa1y,
        ctx.nested1_norm,
        ctx.half_dl,
    )


def neg_min(ctx, fhat):
    """-min over the screening region of theta' fhat, with the branch taken.

    ``fhat`` is a dense label-weighted feature vector.  This is the scalar
    reference entry point; screen_all evaluates the same arithmetic in
    bulk from cached statistics.
    """
    fhat = np.asarray(fhat, dtype=np.float64)
    syf = float(fhat @ ctx.labels)
    s1f = float(fhat.sum())
    sff = float(fhat @ fhat)
    pyf = float(np.sqrt(max(sff - syf * syf / ctx.n, 0.0)))
    sth = float(fhat @ ctx.theta1)
    value, branch = kernels.neg_min_scalar(syf, s1f, sff, pyf, sth, *_scalar_args(ctx))
    return value, Branch(branch)


def screen_feature(ctx, j, stats):
    """FeatureBound for feature j from cached statistics.

    The only per-feature vector work is the sparse dot product
    theta1' fhat_j; everything else combines cached scalars.
    """
    idx, vals = ctx.dataset.column(j)
    sth = float(np.dot(vals, (ctx.theta1 * ctx.labels)[idx]))
    args = _scalar_args(ctx)
    syf = float(stats.dot_y[j])
    s1f = float(stats.dot_one[j])
    sff = float(stats.sq_norm[j])
    pyf = float(stats.proj_y_norm[j])
    m1, br1 = kernels.neg_min_scalar(syf, s1f, sff, pyf, sth, *args)
    m2, br2 = kernels.neg_min_scalar(-syf, -s1f, sff, pyf, -sth, *args)
    bound = max(m1, m2)
    return FeatureBound(
        index=j,
        m1=m1,
        m2=m2,
        branch1=Branch(br1),
        branch2=Branch(br2),
        keep=bound >= 1.0 - EPS_KEEP,
    )


def screen_all(ctx, dataset, stats, threads=None):
    """Screen every feature, returning a ScreenReport.

    Total cost is one O(nnz) pass for theta1' fhat plus O(1) work per
    feature.  ``threads`` caps kernel parallelism for this call.
    """
    if dataset is not ctx.dataset:
        raise ValueError("context was built for a different dataset")
    kernels.set_threads(threads)
    start = time.perf_counter()
    s_theta = kernels.csc_rmatvec(
        dataset.col_ptr, dataset.row_idx, dataset.values, ctx.theta1 * ctx.labels
    )
    m1, m2, branch1, branch2 = kernels.screen_bulk(
        stats.dot_y, stats.dot_one, stats.sq_norm, stats.proj_y_norm, s_theta,
        *_scalar_args(ctx),
    )
    bounds = np.maximum(m1, m2)
    kept = np.flatnonzero(bounds >= 1.0 - EPS_KEEP).astype(np.int64)
    elapsed = time.perf_counter() - start
    report = ScreenReport(
        lambda1=ctx.lambda1,
        lambda2=ctx.lambda2,
        kept=kept,
        bounds=bounds,
        m1=m1,
        m2=m2,
        branch1=branch1,
        branch2=branch2,
        elapsed_seconds=elapsed,
    )
    return report


def theta_at_lambda_max(dataset, lam_max=None, bias=None):
    """Dual point of the trivial model (w = 0) at lambda1 = lambda_max."""
    if lam_max is None or bias is None:
        lam_max, bias, _ = lambda_max(dataset)
    if lam_max <= 0:
        raise ValueError("lambda_max is zero; the trivial dual point is undefined")
    values = (1.0 - dataset.labels * bias) / lam_max
    return ThetaVector(values=values, lam=lam_max)
