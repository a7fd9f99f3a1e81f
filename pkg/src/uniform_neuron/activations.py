"""Strictly increasing activation functions with extended-real inverses."""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from .errors import KindNotSmooth

KINDS = ("sigmoid", "identity", "leaky_relu")
SMOOTH_KINDS = ("sigmoid", "identity")

# inverse_extended treats values this close to a finite range end as outside
SATURATION = 1e-15


@dataclass(frozen=True)
class Activation:
    """An activation ``sigma`` together with its open range ``(range_low, range_high)``.

    ``alpha`` is only meaningful for ``leaky_relu``: ``sigma(x) = max(x, alpha * x)``.
    """

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown activation kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "leaky_relu":
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ValueError(f"leaky_relu needs 0 < alpha < 1, got {self.alpha!r}")
        elif self.alpha is not None:
            raise ValueError(f"alpha is only accepted for leaky_relu, not {self.kind}")

    @property
    def range_low(self):
        return 0.0 if self.kind == "sigmoid" else -np.inf

    @property
    def range_high(self):
        return 1.0 if self.kind == "sigmoid" else np.inf

    @property
    def is_smooth(self):
        return self.kind in SMOOTH_KINDS

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "sigmoid":
            out = expit(x)
        elif self.kind == "identity":
            out = x.copy()
        else:
            out = np.maximum(x, self.alpha * x)
        return out if out.ndim else float(out)

    def inverse_extended(self, y):
        """Inverse of ``evaluate`` extended to the whole real line.

        Values at or below ``range_low`` map to ``-inf`` and values at or above
        ``range_high`` map to ``+inf``.
        """
        y = np.asarray(y, dtype=float)
        if self.kind == "sigmoid":
            out = np.empty_like(y)
            low = y <= SATURATION
            high = y >= 1.0 - SATURATION
            mid = ~(low | high)
            out[low] = -np.inf
            out[high] = np.inf
            out[mid] = logit(y[mid])
        elif self.kind == "identity":
            out = y.copy()
        else:
            out = np.where(y < 0, y / self.alpha, y)
        return out if out.ndim else float(out)

    def derivative(self, x):
        if not self.is_smooth:
            raise KindNotSmooth(f"{self.kind} has no pointwise derivative here")
        x = np.asarray(x, dtype=float)
        if self.kind == "sigmoid":
            s = expit(x)
            out = s * (1.0 - s)
        else:
            out = np.ones_like(x)
        return out if out.ndim else float(out)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


def make_activation(name, alpha=None):
    """Build an activation from a CLI-style name (``leaky-relu`` and ``leaky_relu`` both work)."""
    kind = name.strip().lower().replace("-", "_")
    if kind == "leaky_relu" and alpha is None:
        alpha = 0.01
    return Activation(kind, alpha if kind == "leaky_relu" else None)


sigmoid = Activation("sigmoid")
identity = Activation("identity")


def leaky_relu(alpha=0.01):
    return Activation("leaky_relu", alpha)
