"""Incremental (epsilon-step) stagewise solvers and the loss-aware integrator.

Two step-for-step equivalent formulations of incremental forward
stagewise fitting are provided: one in the signed original coordinates
(bump the most-correlated coefficient by +/- epsilon) and one in the
mirrored coordinates (bump the most positively correlated of the 2p
columns by +epsilon, so every coordinate is non-decreasing). Both keep
their correlation state with identical arithmetic, so they choose
bitwise-identical step sequences.

For general convex losses the same bump rule uses the negative gradient,
and an explicit Euler integrator follows the loss-aware monotone move
direction in arc length.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .design import StandardizedDesign
from .errors import ConfigError, CurvatureError, InternalConsistencyError, StepSizeError
from .lars import MoveDirection, _as_expanded
from .linalg import solve_nnls
from .losses import LossModel
from .path import PiecewiseLinearPath, expand


@dataclass
class StagewiseConfig:
    epsilon: float = 1e-3
    max_iterations: int = 1_000_000
    stop_correlation_tolerance: float | None = None  # None: 1e-8 x ||response||_2
    record_stride: int = 100

    def validate(self):
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be at least 1")
        if self.max_iterations < 0:
            raise ConfigError("max_iterations must be non-negative")


class _PathRecorder:
    """Collects vertices at a stride, at direction changes, and at the end."""

    def __init__(self, epsilon: float, stride: int):
        self.eps = epsilon
        self.stride = stride
        self.counts: list[int] = [0]
        self.vertices: list[np.ndarray] = []

    def start(self, beta):
        self.vertices.append(np.asarray(beta, dtype=float).copy())

    def record(self, m: int, beta):
        if m > self.counts[-1]:
            self.counts.append(m)
            self.vertices.append(np.asarray(beta, dtype=float).copy())

    def build(self, feature_names, truncated: bool, to_expanded=None) -> PiecewiseLinearPath:
        verts = np.array(self.vertices)
        if to_expanded is not None:
            verts = to_expanded(verts)
        return PiecewiseLinearPath(
            breakpoints=np.array(self.counts, dtype=float) * self.eps,
            vertices=verts,
            segment_active_sets=[()] * (len(self.counts) - 1),
            parametrization="l1_arc_length",
            events=[],
            feature_names=feature_names,
            truncated=truncated,
        )


def _stop_tolerance(config: StagewiseConfig, y: np.ndarray) -> float:
    if config.stop_correlation_tolerance is not None:
        return config.stop_correlation_tolerance
    return 1e-8 * float(np.linalg.norm(y))


def fs_epsilon(
    design: StandardizedDesign, config: StagewiseConfig, return_steps: bool = False
):
    """Signed incremental forward stagewise fitting.

    Repeatedly bumps the coefficient of the predictor most correlated
    with the residual by epsilon times the sign of that correlation,
    until no correlation exceeds the stop tolerance or the iteration
    budget runs out (the path is then flagged truncated). Ties at the
    maximal absolute correlation prefer positively correlated columns,
    lowest index first, matching the mirrored formulation's ordering.

    The recorded path lives in the mirrored coordinates via the
    positive/negative split of the signed coefficients; its breakpoints
    are the cumulative stepped distance m * epsilon.
    """
    config.validate()
    X = design.Xs
    y = design.y_centered
    p = design.p
    gram = X.T @ X
    c = X.T @ y
    tol = _stop_tolerance(config, y)

    beta = np.zeros(p)
    rec = _PathRecorder(config.epsilon, config.record_stride)
    rec.start(np.zeros(p))
    steps: list[int] = []
    prev_choice = -1
    truncated = False
    m = 0
    while True:
        if m >= config.max_iterations:
            truncated = _max_abs(c) > tol
            break
        amax = _max_abs(c)
        if amax <= tol:
            break
        pos = np.flatnonzero(c == amax)
        if pos.size:
            j = int(pos[0])
            sign = 1.0
            choice = j
        else:
            j = int(np.flatnonzero(-c == amax)[0])
            sign = -1.0
            choice = p + j
        if choice != prev_choice and m > 0:
            rec.record(m, beta)
        prev_choice = choice
        delta = sign * config.epsilon
        beta[j] += delta
        c -= delta * gram[:, j]
        steps.append(choice)
        m += 1
        if m % config.record_stride == 0:
            rec.record(m, beta)
    rec.record(m, beta)
    path = rec.build(
        list(design.feature_names) if design.feature_names else None,
        truncated,
        to_expanded=expand,
    )
    if truncated:
        warnings.warn("stagewise iteration budget exhausted; path is partial")
    if return_steps:
        return path, np.asarray(steps, dtype=np.int64)
    return path


def _max_abs(c: np.ndarray) -> float:
    return float(np.max(np.abs(c)))


def monotone_incremental(
    design,
    config: StagewiseConfig,
    loss: LossModel | None = None,
    return_steps: bool = False,
):
    """Mirrored incremental forward stagewise fitting.

    Each step adds epsilon to the mirrored coordinate whose column is
    most positively correlated with the residual, so every coordinate is
    non-decreasing by construction. With a loss model the selection uses
    the largest negative loss gradient instead, and the predictor vector
    is updated incrementally; squared error reproduces the plain
    correlation rule.
    """
    config.validate()
    design = _as_expanded(design)
    p = design.p
    y = design.base.y_centered
    beta = np.zeros(design.p2)
    rec = _PathRecorder(config.epsilon, config.record_stride)
    rec.start(beta)
    steps: list[int] = []
    prev_choice = -1
    truncated = False
    m = 0

    if loss is None or loss.name == "squared":
        gram = design.base_gram()
        c0 = design.base.Xs.T @ y
        c = np.concatenate([c0, -c0])
        tol = _stop_tolerance(config, y)
        while True:
            if m >= config.max_iterations:
                truncated = float(c.max()) > tol
                break
            cmax = float(c.max())
            if cmax <= tol:
                break
            a = int(np.argmax(c))
            if a != prev_choice and m > 0:
                rec.record(m, beta)
            prev_choice = a
            j = a % p
            upd = config.epsilon * gram[:, j]
            if a < p:
                c[:p] -= upd
                c[p:] += upd
            else:
                c[:p] += upd
                c[p:] -= upd
            beta[a] += config.epsilon
            steps.append(a)
            m += 1
            if m % config.record_stride == 0:
                rec.record(m, beta)
    else:
        loss.validate_response(y)
        eta = np.zeros(design.n)
        tol = _stop_tolerance(config, y)
        while True:
            if m >= config.max_iterations:
                truncated = True
                break
            g = design.correlations(-loss.first(y, eta))
            cmax = float(g.max())
            if cmax <= tol:
                truncated = False
                break
            a = int(np.argmax(g))
            if a != prev_choice and m > 0:
                rec.record(m, beta)
            prev_choice = a
            eta = eta + config.epsilon * design.column(a)
            beta[a] += config.epsilon
            steps.append(a)
            m += 1
            if m % config.record_stride == 0:
                rec.record(m, beta)
    rec.record(m, beta)
    path = rec.build(
        list(design.base.feature_names) if design.base.feature_names else None, truncated
    )
    if truncated:
        warnings.warn("stagewise iteration budget exhausted; path is partial")
    if return_steps:
        return path, np.asarray(steps, dtype=np.int64)
    return path


def glm_move_direction(
    design,
    beta: np.ndarray,
    loss: LossModel,
    tie_tolerance: float = 1e-9,
    zero_tolerance: float = 1e-12,
) -> MoveDirection:
    """Loss-aware monotone move direction at a mirrored point.

    Steps: evaluate the per-observation first derivatives u and weights
    w at the current predictor; if every column's gradient vanishes the
    direction is zero. Otherwise the active set collects the columns
    with the largest negative gradient, a weighted non-negative least
    squares fit of those columns on -u/w (weights w) gives the raw
    direction, and the result is normalized to unit coefficient sum.

    Raises CurvatureError when some weight collapses below 1e-12 (e.g.
    saturated classification probabilities); a smaller step along the
    path avoids the saturation.
    """
    design = _as_expanded(design)
    beta = np.asarray(beta, dtype=float)
    y = design.base.y_centered
    eta = design.predict(beta)
    u = loss.first(y, eta)
    g = design.correlations(-u)  # negative gradient per mirrored column
    C = float(g.max())
    rho = np.zeros(design.p2)
    if C <= zero_tolerance:
        return MoveDirection(rho, ())
    w = loss.second(y, eta)
    if np.any(w <= 1e-12):
        raise CurvatureError(
            "second-derivative weights collapsed to zero; reduce the step size"
        )
    active = np.flatnonzero(g >= C - tie_tolerance * abs(C))
    sw = np.sqrt(w)
    target = -u / w
    delta = solve_nnls(sw[:, None] * design.columns(active), sw * target)
    total = delta.sum()
    if total <= 0.0:
        raise InternalConsistencyError(
            "positive negative-gradient but a zero weighted direction"
        )
    rho[active] = delta / total
    return MoveDirection(rho, tuple(int(a) for a in active if rho[a] > 0.0))


@dataclass
class StepControl:
    """Euler integration control for the loss-aware monotone path."""

    step: float = 1e-3
    arc_budget: float | None = None
    max_steps: int = 200_000
    gradient_tolerance: float | None = None  # None: 1e-8 x ||response||_2
    tie_tolerance: float = 1e-9
    loss_increase_slack: float = 1e-12
    min_step_factor: float = 2.0**-20
    record_stride: int = 100

    def validate(self):
        if self.step <= 0:
            raise ConfigError("step must be positive")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be at least 1")


def integrate_monotone_path(design, loss: LossModel, control: StepControl | None = None):
    """Explicit Euler integration of the loss-aware monotone path.

    Advances beta by h times the current move direction, recomputing the
    direction each step; the direction has unit coefficient sum, so each
    accepted step adds h of L1 arc length. A step that increases the
    loss beyond a tiny slack halves h (down to a floor, then the
    integration aborts with StepSizeError). Stops when the gradient
    falls under tolerance, the arc budget is reached, or the step budget
    runs out (flagged truncated).
    """
    control = control or StepControl()
    control.validate()
    design = _as_expanded(design)
    y = design.base.y_centered
    loss.validate_response(y)
    if control.gradient_tolerance is not None:
        tol = control.gradient_tolerance
    else:
        tol = 1e-8 * float(np.linalg.norm(y))

    h = control.step
    h_floor = control.step * control.min_step_factor
    beta = np.zeros(design.p2)
    eta = np.zeros(design.n)
    current = loss.total(y, eta)
    ells = [0.0]
    verts = [beta.copy()]
    ell = 0.0
    prev_support: tuple[int, ...] = ()
    truncated = False
    accepted = 0

    def record():
        if ell > ells[-1]:
            ells.append(ell)
            verts.append(beta.copy())

    while True:
        if accepted >= control.max_steps:
            truncated = True
            break
        direction = glm_move_direction(
            design, beta, loss,
            tie_tolerance=control.tie_tolerance, zero_tolerance=tol,
        )
        if direction.is_zero:
            break
        step_fit = design.predict(direction.rho)
        while True:
            eta_trial = eta + h * step_fit
            trial = loss.total(y, eta_trial)
            if trial <= current + control.loss_increase_slack * (1.0 + abs(current)):
                break
            h /= 2.0
            if h < h_floor:
                raise StepSizeError(
                    "loss increases even at the floor step size; integration aborted"
                )
        if direction.support != prev_support:
            record()
            prev_support = direction.support
        beta = beta + h * direction.rho
        eta = eta_trial
        current = trial
        ell += h
        accepted += 1
        if accepted % control.record_stride == 0:
            record()
        if control.arc_budget is not None and ell >= control.arc_budget:
            break
    record()
    path = PiecewiseLinearPath(
        breakpoints=np.array(ells),
        vertices=np.array(verts),
        segment_active_sets=[()] * (len(ells) - 1),
        parametrization="l1_arc_length",
        events=[],
        feature_names=(
            list(design.base.feature_names) if design.base.feature_names else None
        ),
        truncated=truncated,
    )
    if truncated:
        warnings.warn("integration step budget exhausted; path is partial")
    return path
