"""How often bisection-terminal Leaky ReLU weights certify as inf-stationary.

Fits random datasets, certifies the step-1 weights at several tolerances and
prints the stationary fraction per tolerance plus the failing runs.

Usage: python3 scripts/stationarity_statistic.py [--runs 40] [--seed 0]
"""

import argparse

import numpy as np

from uniform_neuron.activations import leaky_relu
from uniform_neuron.bisection import bisect
from uniform_neuron.data import random_dataset
from uniform_neuron.stationarity import certify, default_tau

MULTIPLIERS = (1.0, 10.0, 100.0, 1000.0)


def run(runs, seed, eps=1e-6, alpha=0.01):
    rng = np.random.default_rng(seed)
    act = leaky_relu(alpha)
    rows = []
    while len(rows) < runs:
        d = int(rng.integers(1, 4))
        n = int(rng.integers(d + 3, 16))
        data = random_dataset(n, d, rng)
        trace = bisect(data, act, eps)
        if trace.final_objective <= default_tau(trace.final_objective):
            continue
        verdicts = [certify(data, act, trace.final_weights, m * eps).verdict for m in MULTIPLIERS]
        rows.append((n, d, trace.final_objective, verdicts))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--runs", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", type=float, default=1e-6)
    args = ap.parse_args()
    rows = run(args.runs, args.seed, args.eps)
    for k, m in enumerate(MULTIPLIERS):
        hits = sum(r[3][k] == "stationary" for r in rows)
        print(f"tau = {m:g} * eps: {hits}/{len(rows)} stationary")
    for n, d, obj, verdicts in rows:
        if verdicts[0] != "stationary":
            print(f"  N={n} d={d} objective={obj:.6f} verdicts={verdicts}")


if __name__ == "__main__":
    main()
