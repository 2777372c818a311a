#!/usr/bin/env python3
"""Write breast_cancer.train / breast_cancer.test (400 / 169 rows, LIBSVM format).

Input is the 569 x 30 Wisconsin diagnostic CSV shipped with scikit-learn
(first row: counts and class names; last column: 0 malignant, 1 benign).
Features are scaled to [-1, 1] with ranges taken from the training rows.
"""
import argparse
import csv
import random
from pathlib import Path


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", type=Path, help="breast_cancer.csv")
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--train-size", type=int, default=400)
    args = parser.parse_args()

    with args.csv.open() as f:
        rows = list(csv.reader(f))[1:]
    features = [[float(v) for v in row[:-1]] for row in rows]
    labels = [1 if float(row[-1]) > 0 else -1 for row in rows]

    order = list(range(len(rows)))
    random.Random(args.seed).shuffle(order)
    train, test = order[: args.train_size], order[args.train_size :]

    dim = len(features[0])
    lo = [min(features[i][j] for i in train) for j in range(dim)]
    hi = [max(features[i][j] for i in train) for j in range(dim)]

    def line(i):
        parts = ["+1" if labels[i] > 0 else "-1"]
        for j, v in enumerate(features[i]):
            scaled = -1.0 + 2.0 * (v - lo[j]) / (hi[j] - lo[j]) if hi[j] > lo[j] else -1.0
            if scaled != 0.0:
                parts.append(f"{j + 1}:{scaled:.12g}")
        return " ".join(parts) + "\n"

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, part in (("breast_cancer.train", train), ("breast_cancer.test", test)):
        (args.out_dir / name).write_text("".join(line(i) for i in part))


if __name__ == "__main__":
    main()
