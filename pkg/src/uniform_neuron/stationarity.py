"""Inf-stationarity certificates for the single-unit uniform error.

The uniform error ``Delta(W) = max_j |sigma(W . E_j) - f_j|`` with ``E_j = (1, T_j)``
is a max of quasidifferentiable pieces.  A point is inf-stationary when the
negated superdifferential sits inside the subdifferential.  Only the
near-maximal points (within ``tau`` of ``Delta``) take part, split by the sign
of their deviation.

For smooth activations the test reduces to whether the hulls of the lifted
points ``E_j`` with positive and with negative deviation intersect.  For Leaky
ReLU the quasidifferential is assembled from segments ``co{alpha E_j, E_j}``
and the inclusion is checked vertex by vertex.
"""

from dataclasses import dataclass, field

import numpy as np

from .activations import leaky_relu
from .bisection import deviations
from .errors import EnumerationCapExceeded, KindNotSmooth, ZeroDeviation
from .linprog import hulls_intersect, point_in_hull

MAX_Q = 20
ENUMERATION_BUDGET = 2 ** 22


def default_tau(Delta):
    return 1e-6 * max(1.0, Delta)


@dataclass(frozen=True)
class DeviationProfile:
    deltas: np.ndarray
    Delta: float
    pos_idx: np.ndarray
    neg_idx: np.ndarray
    tau: float


def deviation_profile(data, act, W, tau=None):
    """Signed deviations and the near-maximal index sets.

    ``pos_idx`` holds points with ``delta >= 0`` (zero counts as positive) and
    ``neg_idx`` those with ``delta < 0``, each within ``tau`` of the maximum.
    """
    deltas = deviations(data, act, W)
    Delta = float(np.max(np.abs(deltas)))
    if tau is None:
        tau = default_tau(Delta)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    near = np.abs(deltas) >= Delta - tau
    pos = np.flatnonzero(near & (deltas >= 0))
    neg = np.flatnonzero(near & (deltas < 0))
    return DeviationProfile(deltas, Delta, pos, neg, float(tau))


@dataclass(frozen=True)
class StationarityCertificate:
    verdict: str  # "stationary" | "not-stationary" | "interpolating"
    method: str  # "smooth-hull" | "leaky-inclusion"
    tau: float
    Delta: float
    pos_idx: np.ndarray
    neg_idx: np.ndarray
    witness: dict = field(default_factory=dict)
    failure: dict = field(default_factory=dict)
    descent_direction: np.ndarray | None = None

    @property
    def stationary(self):
        return self.verdict == "stationary"

    def to_dict(self):
        def clean(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            return v

        out = {
            "verdict": self.verdict,
            "method": self.method,
            "tau": self.tau,
            "Delta": self.Delta,
            "pos_idx": self.pos_idx.tolist(),
            "neg_idx": self.neg_idx.tolist(),
            "witness": clean(self.witness),
            "failure": clean(self.failure),
        }
        if self.descent_direction is not None:
            out["descent_direction"] = self.descent_direction.tolist()
        return out


def _check_nonzero(profile):
    if profile.Delta <= profile.tau:
        raise ZeroDeviation(
            f"maximal deviation {profile.Delta} is within tau={profile.tau} of zero; the data is interpolated"
        )


def smooth_certificate(data, act, W, tau=None, normalized=True):
    """Hull-intersection test for smooth activations.

    The gradient points are ``A_j = sigma'(W . E_j) E_j`` (positive deviations)
    and ``B_j`` likewise (negative deviations).  A zero convex combination of
    ``A`` and ``-B`` exists iff the hulls of the *unscaled* ``E_j`` meet, since
    every ``E_j`` has first coordinate 1 and ``sigma' > 0``.  That is the default
    test.  ``normalized=False`` intersects the hulls of the scaled points
    directly, which agrees only when ``sigma'`` is constant on the active set.

    A stationary witness carries convex ``lam``/``mu`` over the positive and
    negative points and cone multipliers ``alpha``/``beta`` (summing to 1)
    with ``sum(alpha * A) == sum(beta * B)``.  A non-stationary certificate
    carries a direction along which ``Delta`` strictly decreases.
    """
    if not act.is_smooth:
        raise KindNotSmooth(f"smooth_certificate needs a smooth activation, got {act.kind}")
    prof = deviation_profile(data, act, W, tau)
    _check_nonzero(prof)
    E = data.lifted()
    slope = act.derivative(W.preactivation(data))
    P, N = prof.pos_idx, prof.neg_idx
    method = "smooth-hull"

    def cert(verdict, **kw):
        return StationarityCertificate(verdict, method, prof.tau, prof.Delta, P, N, **kw)

    e1 = np.zeros(data.d + 1)
    e1[0] = 1.0
    if N.size == 0:
        return cert("not-stationary", failure={"reason": "no negative maximal deviations"}, descent_direction=-e1)
    if P.size == 0:
        return cert("not-stationary", failure={"reason": "no positive maximal deviations"}, descent_direction=e1)

    A = slope[P, None] * E[P]
    B = slope[N, None] * E[N]
    test = hulls_intersect(E[P], E[N]) if normalized else hulls_intersect(A, B)
    if test.intersects:
        if normalized:
            alpha = test.lam / slope[P]
            beta = test.mu / slope[N]
        else:
            alpha, beta = test.lam, test.mu
        total = alpha.sum() + beta.sum()
        witness = {
            "lam": test.lam,
            "mu": test.mu,
            "point": test.point,
            "alpha": alpha / total,
            "beta": beta / total,
        }
        return cert("stationary", witness=witness)

    failure = {"reason": "disjoint hulls"}
    direction = None
    if test.separation is not None:
        sep = test.separation
        failure.update(direction=sep.direction, offset=sep.offset, margin=sep.margin)
        if normalized:
            # h . E_P >= b + s and h . E_N <= b - s; shifting by b along e1
            # (first coordinate of every E_j is 1) gives a descent direction
            direction = -(sep.direction - sep.offset * e1)
    return cert("not-stationary", failure=failure, descent_direction=direction)


def _zonotope_vertices(E, alpha, idx):
    """All ``2^|idx|`` sums choosing ``alpha E_j`` or ``E_j`` for each ``j`` in ``idx``."""
    idx = np.asarray(idx, dtype=int)
    k = idx.size
    if k == 0:
        return np.zeros((1, E.shape[1]))
    bits = (np.arange(2 ** k)[:, None] >> np.arange(k)[None, :]) & 1
    coef = np.where(bits == 1, 1.0, alpha)
    return coef @ E[idx]


def leaky_superdiff_vertices(data, alpha, W, Q):
    """Candidate vertices of ``-superdiff(phi)(W) = sum_{j in Q} co{alpha E_j, E_j}``.

    ``W`` does not enter: the segments are used whichever Leaky ReLU branch is
    active.  Empty ``Q`` gives the single point 0.
    """
    Q = np.asarray(Q, dtype=int)
    if Q.size > MAX_Q:
        raise EnumerationCapExceeded(f"|Q| = {Q.size} exceeds the cap of {MAX_Q}")
    return _zonotope_vertices(data.lifted(), alpha, Q)


def leaky_subdiff_vertices(data, alpha, R, Q, formula="corrected", exclude_self=False):
    """Candidate points whose convex hull is the subdifferential of ``phi``.

    ``formula="corrected"`` follows the max rule with the sign rule for
    ``-H_j`` applied (superdifferential of ``-H_j`` is ``-co{alpha E_j, E_j}``):
    ``co( U_{i in R} (S_i + Z_Q)  U  U_{k in Q} Z_{Q minus k} )``.
    ``formula="printed"`` is ``co U_{i in R} (S_i - Z_Q)``.
    ``exclude_self`` drops ``i`` from the sum over ``Q`` (vacuous, as R and Q
    are disjoint).
    """
    R = np.asarray(R, dtype=int)
    Q = np.asarray(Q, dtype=int)
    if Q.size > MAX_Q:
        raise EnumerationCapExceeded(f"|Q| = {Q.size} exceeds the cap of {MAX_Q}")
    count = R.size * 2 ** (Q.size + 1)
    if formula == "corrected":
        count += Q.size * 2 ** max(Q.size - 1, 0)
    if count > ENUMERATION_BUDGET:
        raise EnumerationCapExceeded(f"{count} subdifferential candidates exceed the budget of {ENUMERATION_BUDGET}")
    if formula not in ("corrected", "printed"):
        raise ValueError(f"unknown formula {formula!r}")

    E = data.lifted()
    sign = 1.0 if formula == "corrected" else -1.0
    parts = []
    Z = _zonotope_vertices(E, alpha, Q)
    for i in R:
        Zi = _zonotope_vertices(E, alpha, Q[Q != i]) if exclude_self else Z
        for c in (alpha, 1.0):
            parts.append(c * E[i] + sign * Zi)
    if formula == "corrected":
        for k in Q:
            parts.append(_zonotope_vertices(E, alpha, Q[Q != k]))
    if not parts:
        return np.zeros((0, E.shape[1]))
    return np.unique(np.vstack(parts), axis=0)


def leaky_certificate(data, alpha, W, tau=None, formula="corrected", exclude_self=False):
    """Check ``-superdiff(phi)(W)`` is contained in ``subdiff(phi)(W)`` for Leaky ReLU.

    ``R`` (positive) and ``Q`` (negative) are the near-maximal index sets.  Each
    vertex of the zonotope ``sum_{j in Q} co{alpha E_j, E_j}`` must lie in the
    hull of the subdifferential candidates.
    """
    act = leaky_relu(alpha)
    prof = deviation_profile(data, act, W, tau)
    _check_nonzero(prof)
    R, Q = prof.pos_idx, prof.neg_idx
    method = "leaky-inclusion"
    supers = leaky_superdiff_vertices(data, alpha, W, Q)
    subs = leaky_subdiff_vertices(data, alpha, R, Q, formula=formula, exclude_self=exclude_self)

    def cert(verdict, **kw):
        return StationarityCertificate(verdict, method, prof.tau, prof.Delta, R, Q, **kw)

    if subs.shape[0] == 0:
        return cert("not-stationary", failure={"reason": "empty subdifferential", "vertex": supers[0]})
    coefficients = []
    for v_idx, v in enumerate(supers):
        res = point_in_hull(v, subs)
        if not res.inside:
            return cert(
                "not-stationary",
                failure={"reason": "superdifferential vertex outside subdifferential", "vertex_index": v_idx, "vertex": v},
            )
        coefficients.append(res.coefficients)
    witness = {"n_vertices": len(supers), "n_candidates": len(subs)}
    if len(supers) <= 16:
        witness["vertices"] = supers
        witness["coefficients"] = coefficients
        witness["candidates"] = subs
    return cert("stationary", witness=witness)


def certify(data, act, W, tau=None, **kwargs):
    """Dispatch on the activation kind; exact interpolation yields verdict ``"interpolating"``."""
    prof = deviation_profile(data, act, W, tau)
    if prof.Delta <= prof.tau:
        method = "leaky-inclusion" if act.kind == "leaky_relu" else "smooth-hull"
        return StationarityCertificate("interpolating", method, prof.tau, prof.Delta, prof.pos_idx, prof.neg_idx)
    if act.kind == "leaky_relu":
        return leaky_certificate(data, act.alpha, W, prof.tau, **kwargs)
    return smooth_certificate(data, act, W, prof.tau, **kwargs)
