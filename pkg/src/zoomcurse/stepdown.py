"""Step-down radii: iterative budget reallocation over sorted score gaps.

Both routines walk the empirical gaps in decreasing order.  While the
current gap is large enough to rule its coordinate out of the acceptance
region, that coordinate's error contribution is subtracted from the budget
and the per-coordinate share of what remains is recomputed.  The radius at
the stopping step dominates the corresponding endpoint-equation root, so
these give closed-form-cheap but slightly wider intervals.

Requires identical marginal tails across coordinates (the budget shares
alpha_j / (m - j + 1) assume one shared quantile function).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Problem, WinnerInterval, _check_alpha
from .errors import InfeasibleAlphaError, UnsupportedMethodError
from .tails import UnionBound


@dataclass(frozen=True)
class StepdownStep:
    coordinate: int
    gap: float
    budget: float
    radius: float
    stopped: bool


@dataclass(frozen=True)
class StepdownTrace:
    radius: float
    side: str
    alpha: float
    steps: tuple = field(compare=False)

    @property
    def n_steps(self) -> int:
        return len(self.steps)


def marginal_model(bound):
    """Extract the shared marginal tail model, or refuse."""
    if not isinstance(bound, UnionBound) or not bound.identical_marginals:
        raise UnsupportedMethodError(
            "step-down methods need one shared marginal tail model")
    return bound.models[0]


def _sorted_gaps(gaps) -> tuple[np.ndarray, np.ndarray]:
    gaps = np.asarray(gaps, dtype=float)
    if gaps.ndim != 1 or gaps.size == 0:
        raise ValueError("gaps must form a non-empty 1-d vector")
    if np.any(np.isnan(gaps)) or np.any(gaps < 0):
        raise ValueError("gaps must be non-negative")
    if gaps.min() != 0.0:
        raise ValueError("gap vectors are anchored: some coordinate has gap 0")
    order = np.argsort(-gaps, kind="stable")
    return gaps[order], order


def _isf(model, q: float) -> float:
    if q <= 0.0:
        raise InfeasibleAlphaError("error budget exhausted before the step-down stopped")
    try:
        return float(model.isf(q))
    except ValueError as exc:
        raise InfeasibleAlphaError(str(exc)) from exc


def stepdown_lower(gaps, model, alpha: float) -> StepdownTrace:
    """Radius for the interval's lower end: stop once the gap is within 4 radii.

    While a sorted gap exceeds 4 * radius, its coordinate sits deep in the
    rejection region at the lower endpoint's worst case and gives back
    S((gap - radius) / 3) of budget.
    """
    alpha = _check_alpha(alpha)
    g, order = _sorted_gaps(gaps)
    m = g.size
    budget = alpha
    steps = []
    for j in range(m):
        r = _isf(model, budget / (m - j))
        stop = g[j] <= 4.0 * r
        steps.append(StepdownStep(int(order[j]), float(g[j]), budget, r, stop))
        if stop:
            return StepdownTrace(r, "lower", alpha, tuple(steps))
        budget -= float(model.sf((g[j] - r) / 3.0))
    raise AssertionError("step-down must stop at the zero gap")  # pragma: no cover


def stepdown_upper(gaps, model, alpha: float) -> StepdownTrace:
    """Radius for the interval's upper end: stop once the gap is within 2 radii.

    The budget refund here is S((gap + r_base) / 3) with r_base the single
    undivided quantile, computed once up front.
    """
    alpha = _check_alpha(alpha)
    g, order = _sorted_gaps(gaps)
    m = g.size
    r_base = _isf(model, alpha)
    budget = alpha
    steps = []
    for j in range(m):
        r = _isf(model, budget / (m - j))
        stop = g[j] <= 2.0 * r
        steps.append(StepdownStep(int(order[j]), float(g[j]), budget, r, stop))
        if stop:
            return StepdownTrace(r, "upper", alpha, tuple(steps))
        budget -= float(model.sf((g[j] + r_base) / 3.0))
    raise AssertionError("step-down must stop at the zero gap")  # pragma: no cover


def winner_interval_stepdown(problem: Problem) -> WinnerInterval:
    """Winner interval from the two step-down radii (wider than the root method)."""
    model = marginal_model(problem.bound)
    x = problem.x
    i_hat = problem.winner
    gaps = x[i_hat] - x
    lower = stepdown_lower(gaps, model, problem.alpha)
    upper = stepdown_upper(gaps, model, problem.alpha)
    diagnostics = {"lower_trace": lower, "upper_trace": upper}
    return WinnerInterval(float(x[i_hat] - lower.radius), float(x[i_hat] + upper.radius),
                          float(x[i_hat]), i_hat, problem.alpha, "stepdown", diagnostics)
