"""Exit criteria.  Run ``pytest tests/test_acceptance.py`` for one line per criterion."""

import math
import os
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from oracles import central_difference, grid_min, grid_min_fast, hull_distance_2d, hulls_intersect_exact
from uniform_neuron.activations import identity, leaky_relu, sigmoid
from uniform_neuron.bisection import bisect
from uniform_neuron.data import Dataset, WeightVector, load_ucr, tent
from uniform_neuron.linprog import hulls_intersect, point_in_hull
from uniform_neuron.stationarity import deviation_profile, leaky_certificate, smooth_certificate
from uniform_neuron.stepwise import fit_stepwise

EPS = 1e-6


def note(request, text):
    request.node.acceptance_note = text


@pytest.mark.acceptance(1, "bracket halves exactly; iteration count = ceil(log2((u0 - l0) / eps))")
def test_bracket_arithmetic(request):
    rng = np.random.default_rng(2024)
    acts = [identity, leaky_relu(0.01), sigmoid]
    slowest = 0.0
    for i in range(12):
        act = acts[i % 3]
        n, d = int(rng.integers(3, 30)), int(rng.integers(1, 5))
        data = Dataset(rng.normal(size=(n, d)), rng.uniform(0.05, 0.95, size=n))
        start = time.perf_counter()
        tr = bisect(data, act, EPS)
        slowest = max(slowest, time.perf_counter() - start)
        width0 = Fraction(tr.u0) - Fraction(tr.l0)
        for k, step in enumerate(tr.iterations, 1):
            assert step.upper - step.lower == width0 / 2 ** k
        assert len(tr.iterations) == math.ceil(math.log2((tr.u0 - tr.l0) / EPS))
    assert slowest < 1.0
    note(request, f"12 datasets, slowest run {slowest:.3f}s")


@pytest.mark.acceptance(2, "bisection matches dense grid minimum within eps + grid step (50 datasets x 2 activations)")
def test_global_minimum(request):
    step = 1e-3
    rng = np.random.default_rng(7)
    lattice = np.linspace(-1, 1, 9)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 9))
        x = rng.choice(lattice, size=n)
        for act, low in ((identity, -0.5), (leaky_relu(0.01), 0.0)):
            y = rng.uniform(low, 0.5, size=n)
            tr = bisect(Dataset(x[:, None], y), act, EPS)
            best, _ = grid_min_fast(x, y, act, -5, 5, step)
            assert abs(tr.final_objective - best) <= EPS + step
            worst = max(worst, abs(tr.final_objective - best))
    # the fast grid search is an exact grid minimum: spot-check against brute force
    for act, low in ((identity, -0.5), (leaky_relu(0.01), 0.0)):
        x = rng.choice(lattice, size=6)
        y = rng.uniform(low, 0.5, size=6)
        assert grid_min_fast(x, y, act, -5, 5, step)[0] == grid_min(x, y, act, -5, 5, step)[0]
    note(request, f"max |bisect - grid| = {worst:.2e}")


@pytest.mark.acceptance(3, "N <= d + 1 with targets inside the range: step-1 objective <= 1e-6")
def test_interpolation_regime(request):
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(30):
        act = [identity, leaky_relu(0.01), sigmoid][i % 3]
        d = int(rng.integers(1, 9))
        n = int(rng.integers(1, d + 2))
        lo, hi = (0.02, 0.98) if act is sigmoid else (-1.0, 1.0)
        data = Dataset(rng.normal(size=(n, d)), rng.uniform(lo, hi, size=n))
        obj = fit_stepwise(data, act, 1, EPS).step_objectives[0]
        assert obj <= EPS
        worst = max(worst, obj)
    note(request, f"30 datasets, worst objective {worst:.3e}")


@pytest.mark.acceptance(4, "tent: objective 0.5, stationary with convex witness, step 2 stalls")
def test_tent(request):
    t = tent()
    model = fit_stepwise(t, identity, 2, EPS)
    assert model.step_objectives[0] == pytest.approx(0.5, abs=1e-6)
    best, _ = grid_min_fast([0, 1, 2], [0, 1, 0], identity, -2, 2, 1e-3)
    assert best == pytest.approx(0.5, abs=1e-12)
    W = model.units[0].weights
    cert = smooth_certificate(t, identity, W)
    assert cert.verdict == "stationary"
    E = t.lifted()
    A, B = E[cert.pos_idx], E[cert.neg_idx]  # identity: sigma' = 1
    lam, mu = cert.witness["lam"], cert.witness["mu"]
    assert lam.min() >= 0 and mu.min() >= 0
    assert lam.sum() == pytest.approx(1.0, abs=1e-12) and mu.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(lam @ A - mu @ B)) <= 1e-7
    stalled = model.steps[1]
    assert stalled.stalled and model.step_objectives[0] - stalled.objective < EPS
    note(request, f"objective {model.step_objectives[0]:.9f}, step-2 objective {stalled.objective:.9f}")


def _membership_oracle(x, V):
    """Qhull facet test; returns (inside, signed distance to the hull boundary)."""
    if V.shape[1] == 1:
        lo, hi = V.min(), V.max()
        dist = max(lo - x[0], x[0] - hi)
        return dist <= 0, dist
    hull = ConvexHull(V)
    dist = float(np.max(hull.equations[:, :-1] @ x + hull.equations[:, -1]))
    return dist <= 0, dist


@pytest.mark.acceptance(5, "hull tests agree with exact 2-D oracle and Qhull membership oracle (200 + 200)")
def test_hull_oracles(request):
    rng = np.random.default_rng(55)
    banded = 0
    for _ in range(200):
        P = rng.uniform(-1, 1, size=(rng.integers(1, 7), 2))
        Q = rng.uniform(-1, 1, size=(rng.integers(1, 7), 2)) + rng.uniform(-1.5, 1.5, size=2)
        expected = hulls_intersect_exact(P, Q)
        if not expected and hull_distance_2d(P, Q) <= 1e-7:
            banded += 1
            continue
        assert hulls_intersect(P, Q).intersects == expected
    inside_count = 0
    for _ in range(200):
        D = int(rng.integers(1, 6))
        V = rng.normal(size=(int(rng.integers(D + 1, D + 7)), D))
        if rng.random() < 0.5:
            x = rng.dirichlet(np.ones(len(V))) @ V
        else:
            # uniform draw from the enlarged bounding box
            lo, hi = V.min(axis=0), V.max(axis=0)
            x = rng.uniform(lo - 0.25 * (hi - lo), hi + 0.25 * (hi - lo))
        expected, dist = _membership_oracle(x, V)
        if abs(dist) <= 1e-7:
            banded += 1
            continue
        inside_count += expected
        assert point_in_hull(x, V).inside == expected
    note(request, f"{inside_count} inside / {200 - inside_count} outside membership cases, {banded} in boundary band")


@pytest.mark.acceptance(6, "empty negative max-deviation set => leaky not-stationary (100 instances)")
def test_leaky_one_sided(request):
    rng = np.random.default_rng(66)
    for _ in range(100):
        d = int(rng.integers(1, 5))
        n = int(rng.integers(1, 12))
        X = rng.normal(size=(n, d))
        W = WeightVector(rng.normal(), rng.normal(size=d))
        alpha = float(rng.uniform(0.01, 0.03))
        act = leaky_relu(alpha)
        dev = rng.uniform(0.0, 1.0, size=n)
        dev[rng.integers(n)] = 1.0
        data = Dataset(X, act.evaluate(W.preactivation(X)) - dev)
        cert = leaky_certificate(data, alpha, W)
        assert cert.neg_idx.size == 0
        assert cert.verdict == "not-stationary"


@pytest.mark.acceptance(7, "perturbing non-maximal targets never flips the leaky verdict (50 pairs)")
def test_non_maximal_perturbation(request):
    rng = np.random.default_rng(77)
    stationary = 0
    pairs = 0
    while pairs < 50:
        d = int(rng.integers(1, 3))
        n = int(rng.integers(d + 3, 12))
        X = rng.uniform(-1, 1, size=(n, d))
        act = leaky_relu(0.01)
        data = Dataset(X, rng.uniform(0, 1, size=n))
        W = bisect(data, act, 1e-9).final_weights if pairs % 2 == 0 else WeightVector(rng.normal(), rng.normal(size=d))
        prof = deviation_profile(data, act, W)
        if prof.Delta <= prof.tau:
            continue
        c1 = leaky_certificate(data, 0.01, W, prof.tau)
        active = np.zeros(n, dtype=bool)
        active[c1.pos_idx] = active[c1.neg_idx] = True
        room = prof.Delta - prof.tau
        dev = prof.deltas.copy()
        dev[~active] = rng.uniform(-0.99 * room, 0.99 * room, size=(~active).sum())
        other = data.with_targets(act.evaluate(W.preactivation(X)) - dev)
        c2 = leaky_certificate(other, 0.01, W, prof.tau)
        assert c2.verdict == c1.verdict
        stationary += c1.stationary
        pairs += 1
    note(request, f"{stationary} stationary / {50 - stationary} not-stationary pairs, 0 flips")


@pytest.mark.acceptance(8, "smooth derivatives match central differences within 1e-6 on [-10, 10]")
def test_derivatives(request):
    x = np.linspace(-10, 10, 1000)
    worst = 0.0
    for act in (sigmoid, identity):
        err = np.max(np.abs(act.derivative(x) - central_difference(act.evaluate, x, 1e-5)))
        assert err <= 1e-6
        worst = max(worst, err)
    note(request, f"max error {worst:.2e}")


def _ucr_dir():
    env = os.environ.get("UCR_TWOLEAD_DIR")
    return Path(env) if env else Path(__file__).resolve().parent.parent / "data" / "TwoLeadECG"


def _find(split):
    base = _ucr_dir()
    for name in (f"TwoLeadECG_{split}.tsv", f"TwoLeadECG_{split}.txt", f"TwoLeadECG_{split}"):
        if (base / name).exists():
            return base / name
    return None


@pytest.mark.acceptance(9, "TwoLeadECG reproduction (reported, not gating)")
def test_twolead_ecg(request):
    test_file, train_file = _find("TEST"), _find("TRAIN")
    if test_file is None or train_file is None:
        pytest.skip(f"TwoLeadECG files not found under {_ucr_dir()} (set UCR_TWOLEAD_DIR)")
    act = leaky_relu(0.01)
    test_data, _ = load_ucr(test_file)
    train_data, _ = load_ucr(train_file)
    test_obj = bisect(test_data, act, EPS, method="highs").final_objective
    train_obj = bisect(train_data, act, EPS, method="highs").final_objective
    note(
        request,
        f"test N={test_data.n}: step-1 objective {test_obj:.4f} vs 0.3163 "
        f"({'within' if abs(test_obj - 0.3163) <= 1e-2 else 'outside'} 1e-2); "
        f"train N={train_data.n}: {train_obj:.4e} ({'below' if train_obj < EPS else 'above'} eps)",
    )
