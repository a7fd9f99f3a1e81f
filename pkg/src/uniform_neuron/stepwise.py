"""Greedy stacking of units: fit one unit, subtract it, fit the residual."""

from dataclasses import dataclass, field

import numpy as np

from .bisection import bisect
from .data import Dataset, WeightVector
from .errors import DimensionMismatch


@dataclass(frozen=True)
class Unit:
    activation: object
    weights: WeightVector
    coefficient: float = 1.0

    def __post_init__(self):
        if self.coefficient != 1.0:
            raise ValueError("only unit coefficients (a = 1) are supported")

    def __call__(self, X):
        return self.activation.evaluate(self.weights.preactivation(X))


@dataclass(frozen=True)
class StepRecord:
    index: int
    weights: WeightVector
    objective: float
    targets: np.ndarray  # residual targets this step was fitted to
    trace: object
    eps: float
    stalled: bool = False


@dataclass(frozen=True)
class StackedModel:
    units: list
    step_objectives: list
    n: int
    steps: list = field(default_factory=list)
    stop_reason: str = "max-units"

    @property
    def stalled_step(self):
        return next((s for s in self.steps if s.stalled), None)

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        for unit in self.units:
            out += unit(X)
        return out


def predict(model, T):
    """Sum of unit outputs at a single point ``T`` (0 for an empty model)."""
    T = np.atleast_1d(np.asarray(T, dtype=float))
    for unit in model.units:
        if unit.weights.d != T.size:
            raise DimensionMismatch(f"unit has dimension {unit.weights.d}, point has {T.size}")
    return float(model.predict(T[None, :])[0])


def fit_stepwise(data, act, n, eps, stall_tol=None, continue_past_tolerance=False, method="simplex"):
    """Fit up to ``n`` units one after another on the running residual.

    A step that improves the uniform error by less than ``stall_tol`` (default
    ``eps``) is recorded in ``steps`` with ``stalled=True`` but left out of
    ``units``, and fitting stops there.  The first step is always kept.

    Once the error is already below ``eps`` a further bisection with the same
    ``eps`` cannot move (its bracket starts closed).  With
    ``continue_past_tolerance`` such steps use ``eps`` scaled by the current
    error instead, so the refinement below tolerance can proceed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if stall_tol is None:
        stall_tol = eps
    if stall_tol < 0:
        raise ValueError("stall_tol must be non-negative")

    residual = data.targets.copy()
    current = float(np.max(np.abs(residual)))
    units, objectives, steps = [], [], []
    stop = "max-units"
    for k in range(n):
        step_eps = eps
        threshold = stall_tol
        if continue_past_tolerance and current < eps and current > 0:
            step_eps = eps * current
            threshold = min(stall_tol, step_eps)
        targets = residual.copy()
        trace = bisect(Dataset(data.features, targets), act, step_eps, method=method)
        W = trace.final_weights
        unit = Unit(act, W)
        new_residual = residual - unit(data.features)
        err = float(np.max(np.abs(new_residual)))
        stalled = k > 0 and current - err < threshold
        steps.append(StepRecord(k, W, err, targets, trace, step_eps, stalled))
        if stalled:
            stop = "stalled"
            break
        units.append(unit)
        objectives.append(err)
        residual = new_residual
        current = err
    return StackedModel(units, objectives, n, steps, stop)
