#!/usr/bin/env python3
"""Measure per-symbol evaluation cost against layer count and dimension.

The streaming step should scale like L * (d^2 + |phi|); this prints measured
timings so regressions are visible, without asserting a model of the
constant factors.
"""

import time
from fractions import Fraction

from ssmverify.arithmetic import EXACT, FX6, ArithMode
from ssmverify.fnn import compose, gadget_eq, select_fnn
from ssmverify.ssm import (
    AffineMap,
    SsmLayer,
    SsmModel,
    TimeInvariantGate,
    as_matrix,
    as_vector,
    evaluate,
    projection_phi,
)


def dense_model(layers: int, dim: int) -> SsmModel:
    rows = [[Fraction(((i + j) % 3) - 1, 2) for j in range(dim)] for i in range(dim)]
    layer = SsmLayer(
        h0=as_vector([0] * dim),
        gate=TimeInvariantGate(as_matrix(rows)),
        inc=AffineMap(as_matrix(rows), as_vector([0] * dim)),
        phi=projection_phi(dim),
    )
    return SsmModel(
        alphabet=("a", "b"),
        emb=(as_vector([1] * dim), as_vector([0] * dim)),
        layers=(layer,) * layers,
        out=compose(gadget_eq(1), select_fnn([0], dim)),
    )


def time_steps(model: SsmModel, mode, word_len=200, repeats=3) -> float:
    word = ["a", "b"] * (word_len // 2)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        evaluate(model, word, mode)
        best = min(best, (time.perf_counter() - start) / word_len)
    return best


if __name__ == "__main__":
    fx_mode = ArithMode(FX6)
    print(f"{'L':>3} {'d':>3} {'exact us/step':>14} {'fx6 us/step':>12}")
    for layers in (1, 2, 4):
        for dim in (2, 4, 8, 16):
            model = dense_model(layers, dim)
            exact_us = time_steps(model, EXACT) * 1e6
            fx_us = time_steps(model, fx_mode) * 1e6
            print(f"{layers:>3} {dim:>3} {exact_us:>14.1f} {fx_us:>12.1f}")
    print("\ncost should grow linearly in L and roughly quadratically in d")
