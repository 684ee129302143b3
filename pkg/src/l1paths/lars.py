"""Exact piecewise-linear path solvers.

Three modes share one event-driven engine, all run in the mirrored 2p
coordinate space where every candidate move has positive correlation
with the residual:

* ``lar``: move along the least-squares fit of the residual on the
  active columns; coordinates may pass through zero and keep going.
* ``lasso``: same direction, but a coordinate that reaches zero leaves
  the active set and the direction is recomputed.
* ``fs0``: the infinitesimal forward-stagewise limit, where the
  direction is the non-negative least-squares fit; every coordinate of
  the mirrored path is non-decreasing and the path has unit L1 speed.

A segment ends at the first of: an inactive column catching up to the
active correlation, an active coefficient hitting zero (lasso), or the
residual reaching the unrestricted least-squares fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import ExpandedDesign, StandardizedDesign
from .errors import (
    ConfigError,
    DegenerateDesignError,
    InternalConsistencyError,
    StepBudgetError,
)
from .linalg import CholeskyFactor, solve_nnls
from .path import (
    EVENT_DROP,
    EVENT_FULL_LS,
    EVENT_JOIN,
    EVENT_STOP_LAMBDA,
    EVENT_STOP_NORM,
    PathEvent,
    PiecewiseLinearPath,
)

MODES = ("lar", "lasso", "fs0")


@dataclass
class SolverConfig:
    mode: str = "lasso"
    tie_tolerance: float = 1e-9        # relative band for correlation ties
    max_steps: int | None = None       # None: 16 p + 64
    stop_l1_norm: float | None = None
    stop_lambda: float | None = None
    correlation_floor: float | None = None  # None: 1e-10 x initial max correlation
    residual_floor: float = 1e-10      # relative zero-residual stop (p >= n)

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.tie_tolerance <= 0 or self.residual_floor <= 0:
            raise ConfigError("tolerances must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError("max_steps must be at least 1")


@dataclass
class MoveDirection:
    """A unit-L1-mass direction in the mirrored coordinates."""

    rho: np.ndarray
    support: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return len(self.support) == 0


def _as_expanded(design) -> ExpandedDesign:
    if isinstance(design, StandardizedDesign):
        return design.expanded()
    return design


def _tied_set(c: np.ndarray, C: float, tie_tolerance: float) -> np.ndarray:
    return np.flatnonzero(c >= C - tie_tolerance * abs(C))


def lasso_move_direction(
    design, beta: np.ndarray, tie_tolerance: float = 1e-9, zero_tolerance: float = 1e-12
) -> MoveDirection:
    """Instantaneous lasso move from an arbitrary mirrored point.

    Zero when the residual is orthogonal to every column; otherwise the
    least-squares coefficients of the residual on the columns tied at
    the maximal correlation, scaled to unit coefficient sum.
    """
    design = _as_expanded(design)
    r = design.base.y_centered - design.predict(np.asarray(beta, dtype=float))
    c = design.correlations(r)
    C = float(c.max())
    rho = np.zeros(design.p2)
    if C <= zero_tolerance:
        return MoveDirection(rho, ())
    active = _tied_set(c, C, tie_tolerance)
    Xa = design.columns(active)
    try:
        theta = CholeskyFactor.from_gram(Xa.T @ Xa).solve_gram(c[active])
    except DegenerateDesignError:
        raise DegenerateDesignError(
            message="active set is collinear; cannot form a move direction"
        ) from None
    rho[active] = theta / theta.sum()
    return MoveDirection(rho, tuple(int(a) for a in active if rho[a] != 0.0))


def monotone_move_direction(
    design, beta: np.ndarray, tie_tolerance: float = 1e-9, zero_tolerance: float = 1e-12
) -> MoveDirection:
    """Instantaneous monotone move: non-negative least squares on the tied set.

    Components forced to zero by the sign constraint carry no mass and
    are excluded from the support.
    """
    design = _as_expanded(design)
    r = design.base.y_centered - design.predict(np.asarray(beta, dtype=float))
    c = design.correlations(r)
    C = float(c.max())
    rho = np.zeros(design.p2)
    if C <= zero_tolerance:
        return MoveDirection(rho, ())
    active = _tied_set(c, C, tie_tolerance)
    theta = solve_nnls(design.columns(active), r)
    total = theta.sum()
    if total <= 0.0:
        raise InternalConsistencyError(
            "positive correlation but a zero constrained direction"
        )
    rho[active] = theta / total
    return MoveDirection(rho, tuple(int(a) for a in active if rho[a] > 0.0))


def _scan_events(design, beta, c, C, rho, support, members, mode, stop_state, tie_tolerance):
    """First event along beta + gamma * rho.

    Correlations are linear in gamma: column j decays at rate
    d_j = x_j . (X rho). Every supported column decays proportionally,
    so the tied maximum decays at Delta = max over the support of d, and
    the catch-up step for an inactive column is (C - c_j) / (Delta - d_j).
    The mirror of a supported column would tie exactly at the
    least-squares point, so it is excluded from the catch-up scan.

    Returns (gamma, kind, indices, v, d, Delta).
    """
    v = design.predict(rho)
    d = design.correlations(v)
    Delta = float(np.max(d[list(support)]))
    if not Delta > 0.0:
        raise InternalConsistencyError("move does not decay the active correlation")
    gamma_c = C / Delta

    p = design.p
    gamma_eps = 1e-14 * gamma_c

    best_gamma, kind, indices = gamma_c, EVENT_FULL_LS, None

    support_mask = np.zeros(design.p2, dtype=bool)
    support_mask[list(support)] = True
    excluded = members.copy()
    pair = np.arange(design.p2)
    pair = np.where(pair < p, pair + p, pair - p)
    excluded |= support_mask[pair]

    cand = np.flatnonzero(~excluded)
    if cand.size:
        den = Delta - d[cand]
        num = C - c[cand]
        with np.errstate(divide="ignore", invalid="ignore"):
            gammas = np.where(den > 0.0, num / den, np.inf)
        gammas[gammas <= gamma_eps] = np.inf
        gmin = float(np.min(gammas))
        if gmin < best_gamma * (1.0 - 1e-12):
            tied = gammas <= gmin * (1.0 + tie_tolerance)
            best_gamma = gmin
            kind = EVENT_JOIN
            indices = [int(j) for j in cand[tied]]

    if mode == "lasso":
        movers = np.flatnonzero(rho < 0.0)
        if movers.size:
            gb = -beta[movers] / rho[movers]
            posb = int(np.argmin(gb))
            if gb[posb] < best_gamma * (1.0 - 1e-12):
                best_gamma, kind, indices = float(gb[posb]), EVENT_DROP, [int(movers[posb])]
    elif mode == "fs0":
        if np.any(rho < 0.0):
            raise InternalConsistencyError("monotone direction has a negative component")

    if stop_state is not None:
        ell, stop_norm, stop_lambda = stop_state
        if stop_norm is not None:
            g = stop_norm - ell
            if g < best_gamma:
                best_gamma, kind, indices = g, EVENT_STOP_NORM, None
        if stop_lambda is not None and stop_lambda < C:
            g = (C - stop_lambda) / Delta
            if g < best_gamma:
                best_gamma, kind, indices = g, EVENT_STOP_LAMBDA, None

    return best_gamma, kind, indices, v, d, Delta


def next_event(design, beta, direction: MoveDirection, mode: str = "lasso") -> PathEvent:
    """First event along a move direction from an arbitrary point."""
    design = _as_expanded(design)
    beta = np.asarray(beta, dtype=float)
    if direction.is_zero:
        raise ValueError("direction is zero; no event ahead")
    r = design.base.y_centered - design.predict(beta)
    c = design.correlations(r)
    C = float(c.max())
    members = np.zeros(design.p2, dtype=bool)
    members[_tied_set(c, C, 1e-9)] = True
    gamma, kind, indices, _, _, _ = _scan_events(
        design, beta, c, C, direction.rho, direction.support, members, mode, None, 1e-9
    )
    index = indices[0] if indices else None
    return PathEvent(kind=kind, index=index, gamma=gamma, ell=gamma)


def solve_path(design, config: SolverConfig | None = None) -> PiecewiseLinearPath:
    """Trace the full coefficient path for the configured mode.

    The path starts at zero and ends at the unrestricted least-squares
    fit (or the first zero-residual point when p >= n), unless an early
    stop bound cuts it short. Lasso and LAR paths are parametrized by
    the normalized step (the L1 coefficient norm for the lasso); the
    monotone path is parametrized by L1 arc length.

    Raises StepBudgetError with the partial path attached if the step
    budget is exhausted.
    """
    design = _as_expanded(design)
    cfg = config or SolverConfig()
    cfg.validate()
    mode = cfg.mode
    p2 = design.p2
    y = design.base.y_centered
    y_norm = float(np.linalg.norm(y))

    beta = np.zeros(p2)
    ell = 0.0
    r = y.copy()
    c = design.correlations(r)
    C = float(c.max())
    floor = cfg.correlation_floor if cfg.correlation_floor is not None else 1e-10 * max(C, 1e-300)

    names = design.base.feature_names
    parametrization = "l1_arc_length" if mode == "fs0" else "l1_norm"
    vertices = [beta.copy()]
    breakpoints = [0.0]
    seg_sets: list[tuple[int, ...]] = []
    events: list[PathEvent] = []

    def build(truncated=False):
        return PiecewiseLinearPath(
            breakpoints=np.array(breakpoints),
            vertices=np.array(vertices),
            segment_active_sets=seg_sets,
            parametrization=parametrization,
            events=events,
            feature_names=list(names) if names else None,
            truncated=truncated,
        )

    if C <= floor or np.linalg.norm(r) <= cfg.residual_floor * y_norm:
        return build()
    if cfg.stop_l1_norm is not None and cfg.stop_l1_norm <= 0:
        return build()

    members = np.zeros(p2, dtype=bool)
    barred = np.zeros(p2, dtype=bool)  # columns collinear with the active set
    active: list[int] = [int(a) for a in _tied_set(c, C, cfg.tie_tolerance)]
    members[active] = True
    factor = CholeskyFactor.empty()
    if mode != "fs0":
        for a in active:
            factor = _append_factor(design, factor, active[: factor.size], a)
    max_steps = cfg.max_steps if cfg.max_steps is not None else 16 * p2 + 64
    instant_drops = 0
    prev_support: tuple[int, ...] = ()

    for _ in range(max_steps):
        if cfg.stop_l1_norm is not None and ell >= cfg.stop_l1_norm:
            return build()
        if cfg.stop_lambda is not None and C <= cfg.stop_lambda:
            return build()
        # Direction on the current active set.
        if mode == "fs0":
            Xa = design.columns(active)
            warm = [active.index(a) for a in prev_support if a in active]
            theta = solve_nnls(Xa, r, initial_support=warm)
        else:
            theta = factor.solve_gram(c[active])
        total = float(theta.sum())
        if total <= 0.0:
            raise InternalConsistencyError(
                "active correlations positive but the move has no mass"
            )
        rho = np.zeros(p2)
        rho[active] = theta / total
        if mode == "fs0":
            support = tuple(a for a, t in zip(active, theta) if t > 0.0)
        else:
            support = tuple(a for a in active if rho[a] != 0.0)

        gamma, kind, indices, v, d, Delta = _scan_events(
            design, beta, c, C, rho, support, members | barred, mode,
            (ell, cfg.stop_l1_norm, cfg.stop_lambda), cfg.tie_tolerance,
        )
        index = indices[0] if indices else None

        # A coefficient already at zero with an inward direction: drop it
        # and recompute without emitting a zero-length segment.
        if kind == EVENT_DROP and gamma <= 1e-14 * (C / Delta):
            instant_drops += 1
            if instant_drops > p2:
                raise InternalConsistencyError("drop events are not making progress")
            pos = active.index(index)
            factor = factor.drop_column(pos)
            active.pop(pos)
            members[index] = False
            beta[index] = 0.0
            continue
        instant_drops = 0

        beta = beta + gamma * rho
        if kind == EVENT_DROP:
            beta[index] = 0.0
        ell += gamma
        r = y - design.predict(beta)
        c = design.correlations(r)
        C_new = float(c.max())
        expected = C - gamma * Delta
        if abs(C_new - expected) > 1e-6 * max(C, 1.0):
            raise InternalConsistencyError(
                f"correlation ties broke down: max {C_new:.3e}, expected {expected:.3e}"
            )
        C = C_new

        vertices.append(beta.copy())
        breakpoints.append(ell)
        seg_sets.append(support)
        events.append(PathEvent(kind=kind, index=index, gamma=gamma, ell=ell))
        prev_support = support

        if kind in (EVENT_FULL_LS, EVENT_STOP_NORM, EVENT_STOP_LAMBDA):
            return build()

        # Membership updates for the next segment. In monotone mode a
        # coordinate that carried no mass decays faster than the tied
        # maximum and falls out of contention.
        if mode == "fs0":
            keep = []
            for pos, a in enumerate(active):
                if theta[pos] == 0.0 and d[a] > Delta * (1.0 + 1e-12):
                    members[a] = False
                else:
                    keep.append(a)
            active = keep
        if kind == EVENT_DROP:
            pos = active.index(index)
            factor = factor.drop_column(pos)
            active.pop(pos)
            members[index] = False
        elif kind == EVENT_JOIN:
            for j in indices:
                if mode != "fs0":
                    try:
                        factor = _append_factor(design, factor, active, j)
                    except DegenerateDesignError:
                        # the catcher lies in the span of the active columns
                        # (typical once the active set saturates the sample
                        # size); it cannot carry an independent move, so it is
                        # barred and the active direction continues unchanged
                        barred[j] = True
                        barred[j + design.p if j < design.p else j - design.p] = True
                        continue
                active.append(j)
                members[j] = True

        if C <= floor or np.linalg.norm(r) <= cfg.residual_floor * y_norm:
            return build()

    raise StepBudgetError(
        f"path did not terminate within {max_steps} steps", path=build(truncated=True)
    )


def _append_factor(design, factor, current, new_index):
    row = np.empty(factor.size + 1)
    if factor.size:
        row[:-1] = design.gram_entries(new_index, current)
    row[-1] = design.gram_entries(new_index, [new_index])[0]
    try:
        return factor.append_column(row)
    except DegenerateDesignError:
        name = design.base.name_of(new_index % design.p)
        raise DegenerateDesignError(
            column=new_index,
            message=f"joining column for {name} is collinear with the active set",
        ) from None


@dataclass
class KKTReport:
    """Stationarity certificate for a mirrored coefficient vector.

    Per original coordinate: how far |x_j . r| exceeds lambda, how far
    the correlation of a supported coordinate sits from lambda, and the
    overlap of mirrored pairs. ``worst_violation`` is the largest of the
    three families; the report passes when it is at most tol scaled by
    max(1, lambda).
    """

    lam: float
    tolerance: float
    passed: bool
    worst_violation: float
    bound_excess: np.ndarray
    support_gap: np.ndarray
    pair_overlap: np.ndarray


def kkt_certify(design, beta: np.ndarray, lam: float, tol: float = 1e-8) -> KKTReport:
    """Check the stationarity conditions of the L1-constrained fit.

    Requires a mirrored coefficient vector with non-negative entries
    (lasso or monotone paths; a LAR path past a sign change is not a
    certifiable point).
    """
    design = _as_expanded(design)
    beta = np.asarray(beta, dtype=float)
    if beta.min() < -1e-12:
        raise ValueError("certificate needs non-negative mirrored coefficients")
    p = design.p
    r = design.base.y_centered - design.predict(beta)
    corr = design.base.correlations(r)
    bound_excess = np.abs(corr) - lam
    pos, neg = beta[:p], beta[p:]
    support_gap = np.zeros(p)
    sup_p = pos > 0
    sup_n = neg > 0
    support_gap[sup_p] = np.abs(corr[sup_p] - lam)
    support_gap[sup_n] = np.maximum(support_gap[sup_n], np.abs(-corr[sup_n] - lam))
    pair_overlap = np.minimum(pos, neg)
    worst = max(
        float(np.max(bound_excess, initial=0.0)),
        float(np.max(support_gap, initial=0.0)),
        float(np.max(pair_overlap, initial=0.0)),
        0.0,
    )
    scale = max(1.0, abs(lam))
    return KKTReport(
        lam=lam,
        tolerance=tol,
        passed=worst <= tol * scale,
        worst_violation=worst,
        bound_excess=bound_excess,
        support_gap=support_gap,
        pair_overlap=pair_overlap,
    )
