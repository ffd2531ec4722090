#!/usr/bin/env python3
"""Builds the small real-data benchmark corpus used by the acceptance suite.

Each task follows the usual outlier-detection benchmark construction: one or
more classes of a real dataset are kept as inliers and a small subset of
another class becomes the outliers. `wine` (129x13, 10 outliers) and `wdbc`
(367x30, 10 outliers) reproduce the shapes of the well-known ODDS versions of
those datasets, and close variants of one source are kept (two wine tasks,
two breast-cancer tasks) the way public outlier benchmarks repeat datasets
across libraries. The sources are deliberately varied (chemistry, medicine,
images) so the meta-train folds are not dominated by one domain.
"""

import argparse
import pathlib

import numpy as np
from sklearn import datasets


def write_csv(out_dir: pathlib.Path, name: str, X: np.ndarray, y: np.ndarray) -> None:
    header = ",".join(f"f{i}" for i in range(X.shape[1])) + ",outlier"
    rows = [header]
    for xi, yi in zip(X, y):
        rows.append(",".join(f"{v:.10g}" for v in xi) + f",{int(yi)}")
    (out_dir / f"{name}.csv").write_text("\n".join(rows) + "\n")
    rate = 100.0 * y.mean()
    print(f"{name}: n={len(y)} d={X.shape[1]} outliers={int(y.sum())} ({rate:.2f}%)")


def assemble(Xi, Xo, rng):
    Xc = np.vstack([Xi, Xo])
    yc = np.concatenate([np.zeros(len(Xi)), np.ones(len(Xo))])
    order = rng.permutation(len(yc))
    return Xc[order], yc[order]


def downsample_task(X, labels, inlier_classes, outlier_class, n_outliers, rng,
                    n_inliers=None):
    Xi = X[np.isin(labels, inlier_classes)]
    if n_inliers is not None:
        Xi = Xi[rng.choice(len(Xi), size=n_inliers, replace=False)]
    Xo_all = X[labels == outlier_class]
    Xo = Xo_all[rng.choice(len(Xo_all), size=n_outliers, replace=False)]
    return assemble(Xi, Xo, rng)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    wine = datasets.load_wine()
    X, y = downsample_task(wine.data, wine.target, [1, 2], 0, 10, rng)
    write_csv(args.out_dir, "wine", X, y)

    bc = datasets.load_breast_cancer()
    X, y = downsample_task(bc.data, bc.target, [1], 0, 10, rng)
    write_csv(args.out_dir, "wdbc", X, y)

    # 9-feature variant at the WBC scale (223x9)
    X, y = downsample_task(bc.data[:, :9], bc.target, [1], 0, 10, rng,
                           n_inliers=213)
    write_csv(args.out_dir, "wbc", X, y)

    iris = datasets.load_iris()
    X, y = downsample_task(iris.data, iris.target, [1, 2], 0, 10, rng)
    write_csv(args.out_dir, "iris", X, y)

    digits = datasets.load_digits()
    for name, inlier, outlier in [
        ("digits06", 0, 6),
        ("digits38", 3, 8),
        ("digits91", 9, 1),
        ("digits49", 4, 9),
        ("digits52", 5, 2),
    ]:
        X, y = downsample_task(digits.data, digits.target, [inlier], outlier, 12, rng)
        # drop constant pixels so every feature carries signal
        keep = X.std(axis=0) > 0
        write_csv(args.out_dir, name, X[:, keep], y)

    # second wine task with the class roles rotated
    X, y = downsample_task(wine.data, wine.target, [0, 1], 2, 10, rng)
    write_csv(args.out_dir, "wine2", X, y)


if __name__ == "__main__":
    main()
