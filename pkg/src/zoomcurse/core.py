"""Selection-adjusted acceptance regions and winner confidence intervals.

The confidence interval for the empirically best candidate inverts a family
of acceptance tests indexed by the candidate mean vector.  For a candidate
value t of the winner's mean, only the least favorable configuration of the
other means matters (``worst_case_theta``); membership then reduces to
comparing the winner's displacement |X_win - t| against the configuration's
active radius.

Two inversion strategies are provided: a grid scan of the acceptance
predicate (works for any joint bound, including Monte-Carlo banks) and a
direct root solve of the endpoint equations (union bounds only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InfeasibleAlphaError, UnsupportedMethodError
from .sampling import m_statistic, mc_order_index, mc_quantile
from .tails import MonteCarloBound, UnionBound

RADIUS_TOL = 1e-10


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _check_scores(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("scores must form a non-empty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("scores must be finite")
    return x


@dataclass(frozen=True)
class Problem:
    """Observed scores plus the joint noise bound to invert against."""

    x: np.ndarray = field(repr=False)
    bound: UnionBound | MonteCarloBound
    alpha: float
    labels: tuple | None = None

    def __post_init__(self):
        x = _check_scores(self.x)
        if self.bound.m != x.size:
            raise ValueError(f"bound covers {self.bound.m} coordinates, scores have {x.size}")
        _check_alpha(self.alpha)
        if self.labels is not None and len(self.labels) != x.size:
            raise ValueError("labels must match the number of scores")
        object.__setattr__(self, "x", x)

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def winner(self) -> int:
        # ties resolve to the lowest index, matching argmax
        return int(np.argmax(self.x))


@dataclass(frozen=True)
class ActiveRadius:
    """Critical radius of an acceptance test plus its active coordinate set."""

    r: float
    active: tuple
    alpha_used: float


@dataclass(frozen=True)
class WinnerInterval:
    """Confidence interval [t_l, t_u] for the winner's mean."""

    t_l: float
    t_u: float
    x_winner: float
    winner: int
    alpha: float
    method: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.t_l <= self.x_winner <= self.t_u):
            raise ValueError("interval must contain the observed winner score")

    @property
    def r_l(self) -> float:
        return self.x_winner - self.t_l

    @property
    def r_u(self) -> float:
        return self.t_u - self.x_winner

    @property
    def width(self) -> float:
        return self.t_u - self.t_l


def _check_gaps(gaps, m: int) -> np.ndarray:
    gaps = np.asarray(gaps, dtype=float)
    if gaps.ndim != 1 or gaps.size != m:
        raise ValueError(f"gaps must be 1-d with {m} entries")
    if np.any(np.isnan(gaps)) or np.any(gaps < 0):
        raise ValueError("gaps must be non-negative")
    if gaps.min() != 0.0:
        raise ValueError("gap vectors are anchored: the leading coordinate has gap 0")
    return gaps


def _union_feasible_radius(bound: UnionBound, q: float) -> float:
    """A radius at which the union bound is certainly <= m * q."""
    try:
        return max(model.isf(q) for model in bound.models)
    except ValueError as exc:
        raise InfeasibleAlphaError(
            f"error budget too small for the marginal tail model: {exc}") from exc


def active_radius(bound, gaps, alpha: float, *, tol: float = RADIUS_TOL) -> ActiveRadius:
    """Smallest radius r whose widened test max(r, gaps/2) passes the joint bound.

    Union bounds are inverted by bisection; Monte-Carlo bounds come directly
    from the conservative order statistic of the per-row max statistic, with
    no iteration.
    """
    alpha = _check_alpha(alpha)
    gaps = _check_gaps(gaps, bound.m)
    if isinstance(bound, MonteCarloBound):
        r = mc_quantile(m_statistic(bound.samples, gaps), 1.0 - alpha)
    else:
        halfgaps = 0.5 * gaps
        hi = _union_feasible_radius(bound, alpha / bound.m)
        lo = 0.0
        # exceedance(max(r, gaps/2)) is non-increasing in r and equals 1 at
        # r = 0 (the anchored coordinate contributes S(0) = 1)
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if bound.exceedance(np.maximum(mid, halfgaps)) <= alpha:
                hi = mid
            else:
                lo = mid
        r = hi
    active = np.nonzero(gaps <= 2.0 * r)[0]
    return ActiveRadius(float(r), tuple(int(j) for j in active), alpha)


def worst_case_theta(x, winner: int, t: float) -> np.ndarray:
    """Least favorable mean vector with the winner's mean pinned at t.

    Every rival mean is pulled up to min((2*X_j + t) / 3, t): high enough to
    maximize the active radius, but never above the winner.
    """
    x = _check_scores(x)
    if not 0 <= winner < x.size:
        raise ValueError(f"winner index {winner} out of range")
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    theta = np.minimum((2.0 * x + t) / 3.0, t)
    theta[winner] = t
    return theta


def _worst_case_halfgaps(x, winner: int, t) -> np.ndarray:
    """Half-gaps of worst_case_theta for a column of candidate values t.

    Closed form: gap_j = max(0, 2*(t - X_j)/3) for rivals, 0 for the winner.
    ``t`` may be a scalar or a column vector (broadcast against x).
    """
    half = np.maximum(np.asarray(t) - x, 0.0) / 3.0
    half[..., winner] = 0.0
    return half


def contains(problem: Problem, t: float) -> bool:
    """Membership of t in the winner's confidence interval (closed at the boundary)."""
    i_hat = problem.winner
    theta = worst_case_theta(problem.x, i_hat, t)
    gaps = np.max(theta) - theta
    ar = active_radius(problem.bound, gaps, problem.alpha)
    # the empirical winner is active in its own worst case (gap 0) -- keep
    # the check as a tripwire for the construction above
    assert i_hat in ar.active
    return bool(abs(problem.x[i_hat] - t) <= ar.r)


def _mc_accept_threshold(n: int, alpha: float) -> int:
    """Count of strictly-exceeding rows above which a width is inside the radius.

    Matches the mc_quantile order statistic: w <= quantile iff at least
    n - ceil((1-alpha)*n) + 1 rows exceed w strictly.
    """
    return n - mc_order_index(1.0 - alpha, n) + 1


def _merged_interval_counts(L, U, grid) -> np.ndarray:
    """Per grid point, count rows whose union of open intervals (L, U) covers it.

    Intervals within one row are merged first so each row counts at most
    once; the merged pieces then feed a difference-array histogram.
    """
    n, m = L.shape
    empty = ~(U > L)
    l_key = np.where(empty, np.inf, L)
    u_val = np.where(empty, -np.inf, U)
    order = np.argsort(l_key, axis=1, kind="stable")
    ls = np.take_along_axis(l_key, order, axis=1)
    us = np.take_along_axis(u_val, order, axis=1)
    umax = np.maximum.accumulate(us, axis=1)
    valid = np.isfinite(ls)
    new = valid.copy()
    if m > 1:
        # touching open intervals stay separate: (a,b) and (b,c) omit b
        new[:, 1:] &= ls[:, 1:] >= umax[:, :-1]
    rows, cols = np.nonzero(new)
    counts = np.zeros(grid.size + 1, dtype=np.int64)
    if rows.size == 0:
        return counts[:-1]
    starts = ls[rows, cols]
    last = np.empty(rows.size, dtype=bool)
    last[:-1] = rows[1:] != rows[:-1]
    last[-1] = True
    next_col = np.concatenate([cols[1:], [1]])
    ends = umax[rows, np.where(last, m - 1, next_col - 1)]
    i0 = np.searchsorted(grid, starts, side="right")
    i1 = np.searchsorted(grid, ends, side="left")
    np.add.at(counts, i0, 1)
    np.add.at(counts, np.minimum(i1, grid.size), -1)
    return np.cumsum(counts)[:-1]


_MC_CHUNK_ELEMS = 4_000_000


def _winner_accept_union(bound, x, winner: int, grid, alpha: float) -> np.ndarray:
    w = np.abs(x[winner] - grid)
    half = _worst_case_halfgaps(x, winner, grid[:, None])
    vals = np.asarray(bound.exceedance(np.maximum(w[:, None], half)))
    # strict: a point exactly on the radius is dropped here and restored by
    # the outward rounding of the caller
    return vals > alpha


def _winner_accept_mc(bound, x, winner: int, grid, alpha: float) -> np.ndarray:
    a_all = bound._abs
    n, m = a_all.shape
    counts = np.zeros(grid.size, dtype=np.int64)
    chunk = max(1, _MC_CHUNK_ELEMS // m)
    for s in range(0, n, chunk):
        a = a_all[s:s + chunk]
        # row exceeds at t iff t falls in some (X_win - |xi_j|,
        # min(X_win + |xi_j|, X_j + 3 |xi_j|)): .. the membership condition
        # |xi_j| > max(|X_win - t|, halfgap_j(t)) rewritten as a t-interval
        low = x[winner] - a
        high = np.minimum(x[winner] + a, x[None, :] + 3.0 * a)
        counts += _merged_interval_counts(low, high, grid)
    return counts >= _mc_accept_threshold(n, alpha)


def _accept_scalar(problem: Problem, t: float) -> bool:
    x, bound = problem.x, problem.bound
    i_hat = problem.winner
    w = abs(x[i_hat] - t)
    half = _worst_case_halfgaps(x, i_hat, t)
    widths = np.maximum(w, half)
    if isinstance(bound, MonteCarloBound):
        exceed = int(np.count_nonzero(np.any(bound._abs > widths, axis=1)))
        return exceed >= _mc_accept_threshold(bound.n, problem.alpha)
    return bool(bound.exceedance(widths) > problem.alpha)


def _bisect_edge(pred, bad: float, good: float, iters: int = 50) -> float:
    """Shrink [bad, good] around the acceptance boundary; return the rejected end."""
    for _ in range(iters):
        mid = 0.5 * (bad + good)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return bad


def winner_interval_grid(problem: Problem, grid_points: int = 2001, *,
                         refine: bool = False) -> WinnerInterval:
    """Invert the acceptance test on a uniform grid over the widest possible interval.

    Endpoints round outward by one grid step (clamped to the zero-gap radius
    box), so grid resolution can only widen the interval.  With ``refine``
    the two boundary brackets are bisected down to ~1e-12 and the rejected
    ends returned, which stays conservative while removing the one-step
    slack.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")
    x, bound, alpha = problem.x, problem.bound, problem.alpha
    i_hat = problem.winner
    r0 = active_radius(bound, np.zeros(problem.m), alpha).r
    lo, hi = x[i_hat] - r0, x[i_hat] + r0
    grid = np.linspace(lo, hi, grid_points)
    step = (hi - lo) / (grid_points - 1)
    if isinstance(bound, MonteCarloBound):
        accept = _winner_accept_mc(bound, x, i_hat, grid, alpha)
    else:
        accept = _winner_accept_union(bound, x, i_hat, grid, alpha)
    if not accept.any():
        raise AssertionError("no grid point accepted; t = X_winner must be a member")
    first = int(np.argmax(accept))
    last = grid_points - 1 - int(np.argmax(accept[::-1]))
    bridged = not bool(accept[first:last + 1].all())
    if refine:
        t_l = lo if first == 0 else _bisect_edge(
            lambda t: _accept_scalar(problem, t), grid[first] - step, grid[first])
        t_u = hi if last == grid_points - 1 else _bisect_edge(
            lambda t: _accept_scalar(problem, t), grid[last] + step, grid[last])
    else:
        t_l = max(grid[first] - step, lo)
        t_u = min(grid[last] + step, hi)
    diagnostics = {
        "grid_points": grid_points,
        "grid_step": step,
        "zero_gap_radius": r0,
        "accepted_points": int(np.count_nonzero(accept)),
        "bridged": bridged,
        "refined": bool(refine),
    }
    return WinnerInterval(float(t_l), float(t_u), float(x[i_hat]), i_hat, alpha,
                          "grid", diagnostics)


def _endpoint_sum(bound: UnionBound, dhat, r, sign: float):
    """Union bound along the worst case at radius r: sum_j S_j(max(r, (dhat_j +- r)/3))."""
    r = np.asarray(r, dtype=float)
    widths = np.maximum(r[..., None], (dhat + sign * r[..., None]) / 3.0)
    return bound.exceedance(widths)


def winner_interval_root(problem: Problem, *, tol: float = RADIUS_TOL,
                         scan_steps: int = 1024) -> WinnerInterval:
    """Solve the endpoint equations of the winner interval directly (union bounds).

    The upper-radius equation is strictly decreasing and has a unique root.
    The lower-radius equation need not be monotone, so the largest root is
    located by scanning downward from the zero-gap radius in ``scan_steps``
    coarse steps before bracketing.
    """
    bound = problem.bound
    if not isinstance(bound, UnionBound):
        raise UnsupportedMethodError("root inversion requires a union bound")
    x, alpha = problem.x, problem.alpha
    i_hat = problem.winner
    dhat = x[i_hat] - x
    r0 = active_radius(bound, np.zeros(problem.m), alpha).r

    def f_upper(r):
        return float(_endpoint_sum(bound, dhat, np.asarray(r), +1.0)) - alpha

    def f_lower(r):
        return float(_endpoint_sum(bound, dhat, np.asarray(r), -1.0)) - alpha

    if f_upper(r0) >= 0.0:
        r_u = r0  # both reductions to the zero-gap radius land here exactly
    else:
        r_u = float(brentq(f_upper, 0.0, r0, xtol=tol))
    if f_lower(r0) >= -1e-12:
        r_l = r0
    else:
        rs = np.linspace(r0, 0.0, scan_steps + 1)
        vals = np.asarray(_endpoint_sum(bound, dhat, rs, -1.0)) - alpha
        k = int(np.argmax(vals >= 0.0))  # exists: the sum is >= 1 - alpha at r = 0
        r_l = float(brentq(f_lower, rs[k], rs[k - 1], xtol=tol))
    assert r_l >= r_u - 1e-9, "lower radius cannot undercut the upper radius"
    diagnostics = {
        "zero_gap_radius": r0,
        "scan_steps": scan_steps,
        "bonferroni_lower": bool(r_l == r0),
        "bonferroni_upper": bool(r_u == r0),
    }
    return WinnerInterval(float(x[i_hat] - r_l), float(x[i_hat] + r_u), float(x[i_hat]),
                          i_hat, alpha, "root", diagnostics)
