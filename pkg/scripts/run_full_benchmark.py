#!/usr/bin/env python3
"""Run the whole pipeline on synthetic readout data.

Synthesizes IQ shots with the coupled-noise preset, benchmarks the classical
and quantum clusterers, runs the crosstalk analysis against the quantum
scores, and emits complexity curves.  Artifacts land in subdirectories of
--out.  The default settings mirror the headline experiment and take a few
minutes; --quick shrinks shots and folds to a seconds-long smoke run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from qkmeans.cli import main as qkmeans


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output root directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--quick", action="store_true", help="small shot/fold counts for a smoke run"
    )
    args = parser.parse_args(argv)

    out = Path(args.out)
    table_shots = 128 if args.quick else 1024
    circuit_shots = 256 if args.quick else 1024
    splits = 2 if args.quick else 10
    data = out / "data"
    steps = [
        [
            "synth", "--preset", "crosstalk", "--shots", str(table_shots),
            "--seed", str(args.seed), "--out", str(data),
        ],
        [
            "benchmark", "--data", str(data / "iq_shots.csv"), "--algo", "kmeans",
            "--splits", str(splits), "--seed", str(args.seed),
            "--out", str(out / "kmeans"),
        ],
        [
            "benchmark", "--data", str(data / "iq_shots.csv"), "--algo", "qkmeans",
            "--mode", "sampled", "--shots", str(circuit_shots),
            "--splits", str(splits), "--seed", str(args.seed),
            "--out", str(out / "qkmeans"),
        ],
        [
            "crosstalk", "--data", str(data / "iq_shots.csv"),
            "--scores", str(out / "qkmeans" / "scores.csv"),
            "--out", str(out / "crosstalk"),
        ],
        ["complexity", "--out", str(out / "complexity")],
    ]
    for step in steps:
        print("qkmeans", " ".join(step), flush=True)
        code = qkmeans(step)
        if code != 0:
            print(f"step failed with exit code {code}", file=sys.stderr)
            return code

    print()
    print((out / "qkmeans" / "scores.txt").read_text(), end="")
    print("crosstalk flags:")
    print((out / "crosstalk" / "flags.txt").read_text(), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
