"""Covariance eigenvalues of a fixed small sample via numpy (frozen into tests/test_reduce.cpp)."""

import numpy as np

X = np.array(
    [
        [2.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [0.0, 3.0, 1.0],
        [4.0, 1.0, 2.0],
        [3.0, 2.0, 5.0],
    ]
)

if __name__ == "__main__":
    w, v = np.linalg.eigh(np.cov(X, rowvar=False))
    order = np.argsort(w)[::-1]
    print("mean", ", ".join("%.17g" % m for m in X.mean(axis=0)))
    print("eigenvalues", ", ".join("%.17g" % e for e in w[order]))
    top = v[:, order[0]]
    top = top * np.sign(top[np.argmax(np.abs(top))])
    print("first component", ", ".join("%.17g" % c for c in top))
