#!/usr/bin/env python3
"""Regenerates the two-moons SVM fixture and its reference results.

Writes tests/data/two_moons_{train,test}.csv (x1,x2,label) and
tests/data/two_moons_reference.csv with scikit-learn's SVC on the
precomputed Gaussian Gram exp(-nu |a-b|^2).
"""
import argparse
import pathlib

import numpy as np
from sklearn.datasets import make_moons
from sklearn.svm import SVC

NU = 1.0
CS = [0.1, 1.0, 10.0, 100.0]


def gram(a, b):
    d = ((a[:, None, :] - b[None, :, :]) ** 2).sum(-1)
    return np.exp(-NU * d)


def save(path, x, y):
    with open(path, "w") as f:
        for (u, v), label in zip(x, y):
            f.write(f"{float(u)!r},{float(v)!r},{int(label)}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "tests" / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    xtr, ytr = make_moons(n_samples=20, noise=0.15, random_state=3)
    xte, yte = make_moons(n_samples=400, noise=0.15, random_state=4)
    save(out / "two_moons_train.csv", xtr, ytr)
    save(out / "two_moons_test.csv", xte, yte)

    ktr, kte = gram(xtr, xtr), gram(xte, xtr)
    with open(out / "two_moons_reference.csv", "w") as f:
        f.write("c,train_error,test_error,n_support,intercept\n")
        for c in CS:
            m = SVC(C=c, kernel="precomputed", tol=1e-6).fit(ktr, ytr)
            tr_err = float(np.mean(m.predict(ktr) != ytr))
            te_err = float(np.mean(m.predict(kte) != yte))
            f.write(f"{c!r},{tr_err!r},{te_err!r},{int(m.n_support_.sum())},{float(m.intercept_[0])!r}\n")


if __name__ == "__main__":
    main()
