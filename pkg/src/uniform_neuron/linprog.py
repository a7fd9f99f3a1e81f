"""Linear feasibility and convex-hull oracles.

Everything funnels through :func:`max_slack`, which maximises the uniform
margin ``t`` of a two-sided system ``lower_i + t <= c_i . z <= upper_i - t``.
The default backend is a dense two-phase simplex; ``method="highs"`` hands the
same LP to scipy for large instances.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, MalformedSystem, NumericFailure

FEASIBILITY_TOL = 1e-9
HULL_TOL = 1e-7

_PIVOT_TOL = 1e-11
_COST_TOL = 1e-11
# consecutive degenerate pivots tolerated before switching to Bland's rule
_DEGENERATE_SWITCH = 20


@dataclass(frozen=True)
class TwoSidedSystem:
    """Rows ``lower_i <= coefficients_i . z <= upper_i`` over ``m`` variables.

    ``lower``/``upper`` may be infinite; a row with both sides infinite is inert.
    """

    coefficients: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if C.shape[0] != lo.size or lo.size != hi.size:
            raise MalformedSystem(
                f"row counts disagree: {C.shape[0]} coefficient rows, {lo.size} lower, {hi.size} upper"
            )
        if np.isnan(C).any() or np.isnan(lo).any() or np.isnan(hi).any():
            raise MalformedSystem("system contains NaN")
        if not np.isfinite(C).all():
            raise MalformedSystem("coefficients must be finite")
        if (lo == np.inf).any() or (hi == -np.inf).any():
            raise MalformedSystem("lower bound +inf or upper bound -inf makes a row unsatisfiable")
        bad = np.flatnonzero(lo > hi)
        if bad.size:
            raise MalformedSystem(f"row {bad[0]} has lower > upper")
        object.__setattr__(self, "coefficients", C)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_rows(cls, rows, m=None):
        """Build from an iterable of ``(coefficients, lower, upper)`` triples."""
        rows = list(rows)
        if not rows:
            if m is None:
                raise MalformedSystem("empty system needs an explicit variable count")
            return cls(np.zeros((0, m)), np.zeros(0), np.zeros(0))
        C = np.array([np.asarray(r[0], dtype=float) for r in rows])
        return cls(C, [r[1] for r in rows], [r[2] for r in rows])

    @property
    def m(self):
        return self.coefficients.shape[1]

    @property
    def n_rows(self):
        return self.coefficients.shape[0]

    def margins(self, z):
        """Per-side margins of ``z``; infinite sides give ``+inf``."""
        v = self.coefficients @ np.asarray(z, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.minimum(v - self.lower, self.upper - v)

    def scaled(self, factor):
        return TwoSidedSystem(self.coefficients * factor, self.lower * factor, self.upper * factor)


@dataclass(frozen=True)
class FeasibilityResult:
    slack: float
    witness: np.ndarray
    status: str  # "optimal" | "unbounded-slack"
    pivots: int = 0

    @property
    def feasible(self):
        return self.slack >= -FEASIBILITY_TOL


# ---------------------------------------------------------------------------
# dense two-phase simplex


def _pivot(M, basis, r, c):
    M[r] /= M[r, c]
    col = M[:, c].copy()
    col[r] = 0.0
    nz = np.flatnonzero(np.abs(col) > 0)
    if nz.size:
        M[nz] -= np.outer(col[nz], M[r])
    basis[r] = c


def _iterate(M, basis, allowed, budget):
    """Run primal simplex on tableau ``M`` (objective in the last row).

    Returns ``("optimal" | "unbounded", pivots)``.  Columns outside ``allowed``
    never enter.
    """
    m = M.shape[0] - 1
    pivots = 0
    degenerate = 0
    bland = False
    while True:
        cost = M[-1, :-1]
        candidates = np.flatnonzero((cost < -_COST_TOL) & allowed)
        if candidates.size == 0:
            return "optimal", pivots
        if pivots >= budget[0]:
            raise NumericFailure(f"simplex exceeded its iteration cap ({budget[1]} pivots)")
        if bland:
            c = candidates[0]
        else:
            c = candidates[np.argmin(cost[candidates])]
        colv = M[:m, c]
        pos = np.flatnonzero(colv > _PIVOT_TOL)
        if pos.size == 0:
            return "unbounded", pivots
        ratios = M[pos, -1] / colv[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        if bland or ties.size > 1:
            # Bland: leaving variable with the smallest basic index
            r = ties[np.argmin(basis[ties])]
        else:
            r = ties[0]
        if best <= 1e-12:
            degenerate += 1
            if degenerate >= _DEGENERATE_SWITCH:
                bland = True
        else:
            degenerate = 0
        _pivot(M, basis, r, c)
        pivots += 1
        budget[0] -= 1


def simplex_max(A, b, c, max_pivots):
    """Maximise ``c . x`` subject to ``A x <= b``, ``x >= 0``.

    Returns ``(x, status, pivots)`` with status ``"optimal"``, ``"unbounded"``
    or ``"infeasible"``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape

    # row equilibration keeps pivots O(1)
    scale = np.abs(A).max(axis=1)
    scale[scale == 0] = 1.0
    A = A / scale[:, None]
    b = b / scale

    neg = b < 0
    n_art = int(neg.sum())
    ncols = n + m + n_art
    M = np.zeros((m + 1, ncols + 1))
    M[:m, :n] = A
    M[:m, n:n + m] = np.eye(m)
    M[:m, -1] = b
    art_rows = np.flatnonzero(neg)
    M[art_rows] *= -1.0
    basis = np.arange(n, n + m)
    art_cols = n + m + np.arange(n_art)
    M[art_rows, art_cols] = 1.0
    basis[art_rows] = art_cols

    budget = [max_pivots, max_pivots]
    allowed = np.ones(ncols, dtype=bool)
    total = 0

    if n_art:
        # phase 1: maximise -sum(artificials)
        M[-1, art_cols] = 1.0
        M[-1] -= M[art_rows].sum(axis=0)
        _, p = _iterate(M, basis, allowed, budget)
        total += p
        if M[-1, -1] < -1e-9 * max(1.0, np.abs(b).max()):
            return None, "infeasible", total
        # drive zero-level artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= n + m:
                row = M[r, :n + m]
                nz = np.flatnonzero(np.abs(row) > 1e-9)
                if nz.size:
                    _pivot(M, basis, r, nz[0])
                    total += 1
                else:
                    keep[r] = False
        M = np.vstack([M[:m][keep], M[-1:]])
        basis = basis[keep]
        M = np.delete(M, art_cols, axis=1)
        m = M.shape[0] - 1
        allowed = np.ones(M.shape[1] - 1, dtype=bool)

    M[-1] = 0.0
    M[-1, :n] = -c
    cb = M[-1, basis].copy()
    nzb = np.flatnonzero(cb)
    if nzb.size:
        M[-1] -= cb[nzb] @ M[nzb]
    status, p = _iterate(M, basis, allowed, budget)
    total += p
    x = np.zeros(M.shape[1] - 1)
    x[basis] = M[:m, -1]
    return x[:n], status, total


# ---------------------------------------------------------------------------


def _slack_lp(system, t_cap=None):
    C, lo, hi = system.coefficients, system.lower, system.upper
    m = system.m
    has_lo = np.isfinite(lo)
    has_hi = np.isfinite(hi)
    blocks, rhs = [], []
    one = np.ones((0, 1))
    if has_lo.any():
        Cl = C[has_lo]
        one = np.ones((Cl.shape[0], 1))
        blocks.append(np.hstack([-Cl, Cl, one, -one]))
        rhs.append(-lo[has_lo])
    if has_hi.any():
        Cu = C[has_hi]
        one = np.ones((Cu.shape[0], 1))
        blocks.append(np.hstack([Cu, -Cu, one, -one]))
        rhs.append(hi[has_hi])
    if t_cap is not None:
        cap = np.zeros((1, 2 * m + 2))
        cap[0, -2], cap[0, -1] = 1.0, -1.0
        blocks.append(cap)
        rhs.append(np.array([t_cap]))
    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    c = np.zeros(2 * m + 2)
    c[-2], c[-1] = 1.0, -1.0
    return A, b, c


def _solve_slack(system, t_cap, method, cap):
    A, b, c = _slack_lp(system, t_cap)
    m = system.m
    if method == "simplex":
        x, status, pivots = simplex_max(A, b, c, cap)
        if status == "infeasible":
            # t is free, so this can only come from round-off in phase 1
            raise NumericFailure("phase 1 failed on an always-feasible slack problem")
        if status == "unbounded":
            return None, "unbounded", pivots
        return x[:m] - x[m:2 * m], "optimal", pivots
    if method == "highs":
        from scipy.optimize import linprog as sp_linprog

        # z and t are free: use the unsplit formulation
        A_free = np.hstack([A[:, :m], A[:, 2 * m:2 * m + 1]])
        res = sp_linprog(
            -np.eye(m + 1)[-1], A_ub=A_free, b_ub=b, bounds=[(None, None)] * (m + 1), method="highs"
        )
        if res.status == 3:
            return None, "unbounded", res.nit
        if res.status != 0:
            raise NumericFailure(f"HiGHS failed: {res.message}")
        return res.x[:m], "optimal", res.nit
    raise ValueError(f"unknown LP method {method!r}")


def max_slack(system, method="simplex"):
    """Maximise the common margin ``t`` over all finite sides of ``system``.

    The returned slack is the smallest margin actually achieved by the witness,
    so ``witness`` and ``slack`` are always mutually consistent.  When the
    margin can grow without bound the status is ``"unbounded-slack"``, the
    slack is ``+inf`` and the witness achieves a margin of at least 1.
    """
    if not isinstance(system, TwoSidedSystem):
        system = TwoSidedSystem.from_rows(system)
    m = system.m
    finite = np.isfinite(system.lower) | np.isfinite(system.upper)
    if not finite.any():
        return FeasibilityResult(np.inf, np.zeros(m), "unbounded-slack")
    cap = 50 * (system.n_rows + m)
    z, status, pivots = _solve_slack(system, None, method, cap)
    if status == "unbounded":
        z, status, more = _solve_slack(system, 1.0, method, cap)
        if status != "optimal":
            raise NumericFailure("capped slack problem still reported unbounded")
        return FeasibilityResult(np.inf, z, "unbounded-slack", pivots + more)
    slack = float(np.min(system.margins(z)))
    return FeasibilityResult(slack, z, "optimal", pivots)


# ---------------------------------------------------------------------------
# convex hull tests


@dataclass(frozen=True)
class Separation:
    """Hyperplane ``direction . x = offset`` with ``P`` on the ``>=`` side."""

    direction: np.ndarray
    offset: float
    margin: float


@dataclass(frozen=True)
class HullIntersection:
    intersects: bool
    lam: np.ndarray | None = None
    mu: np.ndarray | None = None
    point: np.ndarray | None = None
    separation: Separation | None = None
    slack: float = field(default=float("nan"))


@dataclass(frozen=True)
class HullMembership:
    inside: bool
    coefficients: np.ndarray | None = None
    residual: float = float("nan")


def _points(P, name):
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[None, :]
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty list of points")
    return P


def _convexify(coef):
    coef = np.clip(coef, 0.0, None)
    s = coef.sum()
    return coef / s if s > 0 else np.full_like(coef, 1.0 / coef.size)


def _simplex_rows(k, offset, total):
    """Rows encoding ``coef >= 0`` and ``sum(coef) == 1`` for a block of ``k`` variables."""
    C = np.zeros((k + 1, total))
    C[np.arange(k), offset + np.arange(k)] = 1.0
    C[k, offset:offset + k] = 1.0
    lo = np.r_[np.zeros(k), 1.0]
    hi = np.r_[np.full(k, np.inf), 1.0]
    return C, lo, hi


def separate(P, Q, method="simplex"):
    """Find a hyperplane strictly separating ``conv(P)`` from ``conv(Q)``, or ``None``."""
    P = _points(P, "P")
    Q = _points(Q, "Q")
    D = P.shape[1]
    # variables (h, b): h.p - b >= t, h.q - b <= -t, |h_k| <= 1
    C = np.vstack([
        np.hstack([P, -np.ones((len(P), 1))]),
        np.hstack([Q, -np.ones((len(Q), 1))]),
        np.hstack([np.eye(D), np.zeros((D, 1))]),
    ])
    lo = np.r_[np.zeros(len(P)), np.full(len(Q), -np.inf), -np.ones(D)]
    hi = np.r_[np.full(len(P), np.inf), np.zeros(len(Q)), np.ones(D)]
    res = max_slack(TwoSidedSystem(C, lo, hi), method=method)
    if res.slack <= FEASIBILITY_TOL:
        return None
    h, b = res.witness[:D], res.witness[D]
    margin = min(float(np.min(P @ h - b)), float(np.min(b - Q @ h)))
    return Separation(h, float(b), margin)


def hulls_intersect(P, Q, method="simplex"):
    """Decide whether ``conv(P)`` and ``conv(Q)`` share a point.

    On success ``lam``/``mu`` are convex coefficients with
    ``lam @ P == mu @ Q`` up to round-off; otherwise ``separation`` holds a
    strictly separating hyperplane.
    """
    P = _points(P, "P")
    Q = _points(Q, "Q")
    if P.shape[1] != Q.shape[1]:
        raise DimensionMismatch(f"P has dimension {P.shape[1]}, Q has {Q.shape[1]}")
    p, q, D = len(P), len(Q), P.shape[1]
    total = p + q
    Ceq = np.hstack([P.T, -Q.T])
    C1, lo1, hi1 = _simplex_rows(p, 0, total)
    C2, lo2, hi2 = _simplex_rows(q, p, total)
    system = TwoSidedSystem(
        np.vstack([Ceq, C1, C2]),
        np.r_[np.zeros(D), lo1, lo2],
        np.r_[np.zeros(D), hi1, hi2],
    )
    res = max_slack(system, method=method)
    if res.feasible:
        lam = _convexify(res.witness[:p])
        mu = _convexify(res.witness[p:])
        gap = float(np.max(np.abs(lam @ P - mu @ Q)))
        if gap <= HULL_TOL:
            return HullIntersection(True, lam, mu, 0.5 * (lam @ P + mu @ Q), slack=res.slack)
    return HullIntersection(False, separation=separate(P, Q, method=method), slack=res.slack)


def point_in_hull(x, V, method="simplex"):
    """Decide ``x in conv(V)``; on success returns convex coefficients reproducing ``x``."""
    V = _points(V, "V")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != V.shape[1]:
        raise DimensionMismatch(f"point has dimension {x.size}, hull vertices have {V.shape[1]}")
    k = len(V)
    C1, lo1, hi1 = _simplex_rows(k, 0, k)
    system = TwoSidedSystem(np.vstack([V.T, C1]), np.r_[x, lo1], np.r_[x, hi1])
    res = max_slack(system, method=method)
    if res.feasible:
        coef = _convexify(res.witness)
        residual = float(np.max(np.abs(coef @ V - x)))
        if residual <= HULL_TOL:
            return HullMembership(True, coef, residual)
    return HullMembership(False, residual=-res.slack)
