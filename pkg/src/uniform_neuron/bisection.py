"""Bisection on the uniform error level for a single unit ``sigma(w . T + w0)``.

For a fixed level ``L`` the condition ``max_j |sigma(w . T_j + w0) - y_j| <= L``
is equivalent to ``sigma^-1(y_j - L) <= w . T_j + w0 <= sigma^-1(y_j + L)``,
a linear system in ``(w0, w)``.  Bisection over ``L`` therefore reaches the
global minimum to within ``eps``.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .data import Dataset, WeightVector
from .errors import DimensionMismatch, RangeInfeasible
from .linprog import TwoSidedSystem, max_slack


def deviations(data, act, W):
    """Signed deviations ``sigma(w . T_j + w0) - f(T_j)``."""
    if W.d != data.d:
        raise DimensionMismatch(f"weights have dimension {W.d}, data has {data.d}")
    return act.evaluate(W.preactivation(data)) - data.targets


def objective(data, act, W):
    return float(np.max(np.abs(deviations(data, act, W))))


def initial_bounds(data, act):
    return 0.0, objective(data, act, WeightVector.zeros(data.d))


def feasibility_system(data, act, level):
    if level < 0:
        raise ValueError(f"level must be non-negative, got {level}")
    y = data.targets
    lower = act.inverse_extended(y - level)
    upper = act.inverse_extended(y + level)
    too_high = np.flatnonzero(lower == np.inf)
    if too_high.size:
        j = int(too_high[0])
        raise RangeInfeasible(j, f"target {y[j]} at point {j} is above the activation range by more than {level}")
    too_low = np.flatnonzero(upper == -np.inf)
    if too_low.size:
        j = int(too_low[0])
        raise RangeInfeasible(j, f"target {y[j]} at point {j} is below the activation range by more than {level}")
    return TwoSidedSystem(data.lifted(), lower, upper)


def feasibility(data, act, level, method="simplex"):
    """Weights achieving uniform error ``<= level``, or ``None`` when there are none.

    Raises :class:`RangeInfeasible` when a target lies outside the activation
    range by more than ``level``.
    """
    res = max_slack(feasibility_system(data, act, level), method=method)
    if not res.feasible:
        return None
    return WeightVector.from_array(res.witness)


@dataclass(frozen=True)
class BisectionStep:
    """One halving: the bracket after the step and the level that was tested.

    Bracket ends are exact rationals so the recorded widths halve exactly.
    """

    lower: Fraction
    upper: Fraction
    level: float
    feasible: bool

    @property
    def width(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class BisectionTrace:
    iterations: list
    final_weights: WeightVector
    final_objective: float
    epsilon: float
    l0: float
    u0: float
    notes: list = field(default_factory=list)

    @property
    def u_last(self):
        return float(self.iterations[-1].upper) if self.iterations else self.u0

    @property
    def l_last(self):
        return float(self.iterations[-1].lower) if self.iterations else self.l0


def bisect(data, act, eps, method="simplex"):
    """Halve ``[l, u]`` until ``u - l < eps``.

    The returned weights are the witness of the last feasible level, or the
    zero vector (whose error is exactly ``u0``) when no midpoint was feasible.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    l0, u0 = initial_bounds(data, act)
    best = WeightVector.zeros(data.d)
    steps = []
    notes = []
    lo, hi = Fraction(l0), Fraction(u0)
    while hi - lo >= eps:
        mid = (lo + hi) / 2
        level = float(mid)
        try:
            W = feasibility(data, act, level, method=method)
        except RangeInfeasible as exc:
            W = None
            notes.append(f"level {level!r}: {exc}")
        if W is not None:
            hi = mid
            best = W
        else:
            lo = mid
        steps.append(BisectionStep(lo, hi, level, W is not None))
    return BisectionTrace(steps, best, objective(data, act, best), eps, l0, u0, notes)
