#!/usr/bin/env python3
"""Regenerates di_values.inc: plug-in and exact directed information
computed with plain dictionaries and numpy, independently of the C++ code.
"""
import itertools
import math

import numpy as np


def lcg_path(n, m):
    """Deterministic test path; mirrored by lcg_path() in the C++ tests."""
    state = 12345
    bits = []
    for _ in range(n * m):
        state = (state * 1103515245 + 12345) % (1 << 31)
        bits.append((state >> 16) & 1)
    path = [[bits[t * m + i] for i in range(m)] for t in range(n)]
    # node 1 copies node 0's previous symbol unless the noise bit of node 2 at
    # time t and the raw bit agree.
    for t in range(1, n):
        if path[t][2] == 1 and bits[t * m + 1] == 1:
            path[t][1] = 1 - path[t - 1][0]
        else:
            path[t][1] = path[t - 1][0]
    return path


def entropy(counter):
    total = sum(counter.values())
    return -sum(c / total * math.log(c / total) for c in counter.values() if c)


def count(windows, key):
    out = {}
    for w in windows:
        kk = key(w)
        out[kk] = out.get(kk, 0) + 1
    return out


def plug_in(path, k, i, j):
    m = len(path[0])
    n = len(path)
    windows = [tuple(tuple(path[t + s][v] for s in range(k + 1)) for v in range(m))
               for t in range(n - k)]
    others = [v for v in range(m) if v not in (i, j)]

    def h(key):
        return entropy(count(windows, key))

    without_source = lambda w: (w[j], tuple(w[v] for v in others))
    conditioning = lambda w: (w[j][:k], tuple(w[v] for v in others))
    full = lambda w: w
    without_target_now = lambda w: (w[i], w[j][:k], tuple(w[v] for v in others))
    return (h(without_source) - h(conditioning)) - (h(full) - h(without_target_now))


# m = 2, k = 1, binary. Node 0 depends on its own past only; node 1 on
# (node 0 past, node 1 past).
P0 = {0: [0.7, 0.3], 1: [0.2, 0.8]}
P1 = {(0, 0): [0.9, 0.1], (0, 1): [0.6, 0.4], (1, 0): [0.25, 0.75], (1, 1): [0.05, 0.95]}


def exact_model_di():
    states = list(itertools.product([0, 1], repeat=2))
    T = np.zeros((4, 4))
    for a, (x, y) in enumerate(states):
        for b, (x2, y2) in enumerate(states):
            T[a, b] = P0[x][x2] * P1[(x, y)][y2]
    w, v = np.linalg.eig(T.T)
    pi = np.real(v[:, np.argmin(abs(w - 1))])
    pi = pi / pi.sum()
    joint = {}
    for a, (x, y) in enumerate(states):
        for x2 in (0, 1):
            for y2 in (0, 1):
                joint[(x, y, x2, y2)] = pi[a] * P0[x][x2] * P1[(x, y)][y2]

    def h(key):
        out = {}
        for cell, p in joint.items():
            kk = key(cell)
            out[kk] = out.get(kk, 0.0) + p
        return -sum(p * math.log(p) for p in out.values() if p > 0)

    # cell = (x past, y past, x now, y now)
    di01 = (h(lambda c: (c[1], c[3])) - h(lambda c: (c[1],))) - (
        h(lambda c: c) - h(lambda c: (c[0], c[2], c[1])))
    di10 = (h(lambda c: (c[0], c[2])) - h(lambda c: (c[0],))) - (
        h(lambda c: c) - h(lambda c: (c[1], c[3], c[0])))
    return pi, di01, di10


def main():
    path = lcg_path(400, 3)
    lines = ["// Generated by gen_di_values.py. Do not edit.", ""]
    lines.append("struct PlugInOracle { int k; int i; int j; double di; };")
    lines.append("inline constexpr PlugInOracle kPlugInOracle[] = {")
    for k in (1, 2):
        for i in range(3):
            for j in range(3):
                if i != j:
                    lines.append(f"    {{{k}, {i}, {j}, {plug_in(path, k, i, j)!r}}},")
    lines.append("};")
    lines.append("")
    pi, di01, di10 = exact_model_di()
    lines.append("inline constexpr double kTwoNodeStationary[] = {"
                 + ", ".join(repr(float(p)) for p in pi) + "};")
    lines.append(f"inline constexpr double kTwoNodeDi01 = {float(di01)!r};")
    lines.append(f"inline constexpr double kTwoNodeDi10 = {float(di10)!r};")
    with open("di_values.inc", "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
