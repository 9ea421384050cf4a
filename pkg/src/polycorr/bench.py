"""Timing and accuracy harness for correlator evaluation.

Each cell ``(m, n)`` evaluates ``E[Y(s_0)**n ... Y(s_m)**n]`` for an OU model
with the four exact methods (lifted formula and iterated moments, each with a
dense and a sparse representation) and with Monte Carlo.
"""

import csv
import io
import statistics
import time
from dataclasses import astuple, dataclass, fields

import numpy as np

from .correlator import CorrelatorSpec, TimeGrid, correlator, correlator_iterated
from .generator import PolyModel
from .mc import OUParams, mc_correlator

__all__ = ["BenchRow", "BENCH_HEADER", "REF_OU", "table_spec", "run_bench", "rows_to_csv"]

REF_OU = PolyModel(b0=0.75, b1=-5.0, sigma0=0.01)
REF_Y0 = 0.15


@dataclass(frozen=True)
class BenchRow:
    m: int
    n: int
    dense_s: float
    sparse_s: float
    iter_dense_s: float
    iter_sparse_s: float
    mc_avg_s: float
    formula_value: float
    mc_worst: float
    mc_fails: int


BENCH_HEADER = tuple(f.name for f in fields(BenchRow))


def table_spec(m, n, model=REF_OU, y=REF_Y0):
    """``E[Y(s_0)**n ... Y(s_m)**n]`` with ``t = 0`` and ``s_j = 1 + j/2``."""
    polys = np.zeros((m + 1, n + 1))
    polys[:, n] = 1.0
    grid = TimeGrid(0.0, [1.0 + 0.5 * j for j in range(m + 1)])
    return CorrelatorSpec(model, polys, grid, y)


def _median_time(fn, runs):
    times = []
    value = None
    for _ in range(runs):
        start = time.perf_counter()
        value = fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times), value


def run_bench(ms, ns, N=10_000, reps=100, runs=5, tol=1e-3, seed=0, expm="pade"):
    """One :class:`BenchRow` per ``(m, n)``; timings are medians over ``runs``.

    The exponential cache is warm after the first run, so the medians measure
    the evaluation itself rather than the one-off matrix exponentials.
    """
    if not ms or not ns:
        raise ValueError("need at least one m and one n")
    rows = []
    for m in ms:
        for n in ns:
            spec = table_spec(m, n)
            dense_s, value = _median_time(lambda: correlator(spec, False, expm), runs)
            sparse_s, value_sp = _median_time(lambda: correlator(spec, True, expm), runs)
            iter_dense_s, _ = _median_time(lambda: correlator_iterated(spec, False, expm), runs)
            iter_sparse_s, _ = _median_time(lambda: correlator_iterated(spec, True, expm), runs)
            if abs(value - value_sp) > 1e-12 * abs(value):
                raise ArithmeticError(f"dense/sparse mismatch at m={m}, n={n}")
            p = OUParams.from_model(spec.model, spec.y)
            start = time.perf_counter()
            res = mc_correlator(p, [n] * (m + 1), spec.grid, N, reps, value, tol, seed)
            mc_avg_s = (time.perf_counter() - start) / reps
            rows.append(BenchRow(m, n, dense_s, sparse_s, iter_dense_s, iter_sparse_s,
                                 mc_avg_s, value, res.worst_value, res.failures))
    return rows


def rows_to_csv(rows):
    """CSV text with a fixed header and LF line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    for row in rows:
        w.writerow(f"{v:.12e}" if isinstance(v, float) else v for v in astuple(row))
    return buf.getvalue()
