#!/usr/bin/env python3
"""Regenerate tests/fixtures/lj_fixture.xyz.

Local minima of E = sum_{i<j} r^-12 - r^-6 for small clusters, plus the
13-particle centered icosahedron. Coordinates are centered and written with
full precision; the comment line carries energy=<E>.
"""
import argparse
import itertools

import numpy as np
from scipy.optimize import minimize


def energy(flat, n):
    x = flat.reshape(n, 3)
    diff = x[:, None, :] - x[None, :, :]
    z = (diff**2).sum(-1)[np.triu_indices(n, 1)]
    return float((z**-6 - z**-3).sum())


def gradient(flat, n):
    x = flat.reshape(n, 3)
    diff = x[:, None, :] - x[None, :, :]
    z = (diff**2).sum(-1)
    np.fill_diagonal(z, 1.0)
    dphi = -6 * z**-7 + 3 * z**-4
    np.fill_diagonal(dphi, 0.0)
    return (2 * dphi[:, :, None] * diff).sum(1).ravel()


def relax(x):
    n = len(x)
    res = minimize(energy, x.ravel(), args=(n,), jac=gradient, method="BFGS",
                   options={"gtol": 1e-12, "maxiter": 20000})
    y = res.x.reshape(n, 3)
    return y - y.mean(0)


def icosahedron():
    phi = (1 + 5**0.5) / 2
    verts = [(0, s1, s2 * phi) for s1, s2 in itertools.product((-1, 1), repeat=2)]
    verts += [(s1, s2 * phi, 0) for s1, s2 in itertools.product((-1, 1), repeat=2)]
    verts += [(s2 * phi, 0, s1) for s1, s2 in itertools.product((-1, 1), repeat=2)]
    v = np.array([(0.0, 0.0, 0.0)] + verts)
    return v / np.linalg.norm(v[1]) * 1.1


def packed_start(rng, n):
    radius = 0.75 * n ** (1 / 3)
    pts = []
    while len(pts) < n:
        p = rng.uniform(-radius, radius, size=3)
        if np.linalg.norm(p) <= radius and all(np.linalg.norm(p - q) >= 0.95 for q in pts):
            pts.append(p)
    return np.array(pts)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="tests/fixtures/lj_fixture.xyz")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    blocks = [("LJ13 icosahedron", relax(icosahedron()))]
    sizes = [2, 3, 4, 5, 6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13]
    for n in sizes:
        x = packed_start(rng, n)
        blocks.append((f"random start n={n}", relax(x)))

    with open(args.out, "w") as f:
        for label, x in blocks:
            f.write(f"{len(x)}\n")
            f.write(f"energy={energy(x.ravel(), len(x))!r} {label}\n")
            for row in x:
                f.write("X " + " ".join(repr(float(c)) for c in row) + "\n")


if __name__ == "__main__":
    main()
