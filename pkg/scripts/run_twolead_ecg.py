"""Stepwise Leaky ReLU fits on the UCR TwoLeadECG splits.

Usage: python3 scripts/run_twolead_ecg.py DIR [--steps 3] [--out results/twolead]

DIR must hold TwoLeadECG_TRAIN.tsv and TwoLeadECG_TEST.tsv (or .txt) as
distributed by the UCR archive.  One JSON report per split is written.
"""

import argparse
from pathlib import Path

from uniform_neuron.experiment import ExperimentConfig, run_experiment, write_report


def find_split(base, split):
    for suffix in (".tsv", ".txt", ""):
        path = base / f"TwoLeadECG_{split}{suffix}"
        if path.exists():
            return path
    raise SystemExit(f"no TwoLeadECG_{split} file under {base}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("directory", type=Path)
    ap.add_argument("--steps", type=int, default=3)
    ap.add_argument("--eps", type=float, default=1e-6)
    ap.add_argument("--out", type=Path, default=Path("results/twolead"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for split in ("TRAIN", "TEST"):
        config = ExperimentConfig(
            input=str(find_split(args.directory, split)),
            format="ucr",
            activation="leaky_relu",
            alpha=0.01,
            eps=args.eps,
            steps=args.steps,
            lp_method="highs",  # the dense simplex is slow at this size
            continue_past_tolerance=True,
            report=str(args.out / f"{split.lower()}.json"),
        )
        report, code = run_experiment(config)
        write_report(report, config.report)
        if code:
            print(f"{split}: error {report['error']}")
            continue
        shape = report["dataset"]
        print(f"{split}: N={shape['n']} d={shape['d']}")
        for step in report["steps"]:
            flag = " (stalled)" if step["stalled"] else ""
            print(f"  step {step['index'] + 1}: {step['objective']:.6g}  {step['certificate']['verdict']}{flag}")


if __name__ == "__main__":
    main()
