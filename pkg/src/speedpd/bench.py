"""Wall-clock timing of the solver on one large sparse subinstance per size."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import _backend
from .dp import solve
from .model import EnergyModel, Instance


def flow_instance(n: int, flow: float, rng: np.random.Generator, alpha: float = 3.0, L: float = 2.0, g: float = 2.0) -> Instance:
    """Jobs released about once per time unit with ``d_j = r_j + flow``."""
    r = np.cumsum(rng.uniform(0.5, 1.5, n))
    w = rng.uniform(0.2, 0.6, n)
    return Instance.from_triples(EnergyModel(alpha, L, g), zip(r.tolist(), (r + flow).tolist(), w.tolist()))


def bench_instance(n: int, seed: int = 0) -> Instance:
    # densities stay below s* = 1, so the whole instance is one sparse subinstance
    return flow_instance(n, 10.0, np.random.default_rng(seed))


@dataclass
class BenchRow:
    backend: str
    size: int
    times: list[float]

    @property
    def median_ms(self) -> float:
        return 1000.0 * statistics.median(self.times)

    @property
    def min_ms(self) -> float:
        return 1000.0 * min(self.times)

    @property
    def max_ms(self) -> float:
        return 1000.0 * max(self.times)


def time_solve(instance: Instance, kernel, repetitions: int) -> list[float]:
    out = []
    for _ in range(repetitions):
        t = time.perf_counter()
        solve(instance, kernel)
        out.append(time.perf_counter() - t)
    return out


def run_bench(sizes, repetitions: int = 5, backends=("cython", "python"), seed: int = 0) -> list[BenchRow]:
    rows = []
    for name in backends:
        kernel = _backend.get(name)
        for n in sizes:
            rows.append(BenchRow(name, n, time_solve(bench_instance(n, seed), kernel, repetitions)))
    return rows


def scaling_ratios(rows: list[BenchRow]) -> dict[tuple[str, int], float]:
    """``t(2n)/t(n)`` of medians wherever both sizes were measured."""
    med = {(r.backend, r.size): r.median_ms for r in rows}
    return {
        (b, n): med[(b, 2 * n)] / med[(b, n)] for (b, n) in med if (b, 2 * n) in med and med[(b, n)] > 0
    }


def to_csv(rows: list[BenchRow]) -> str:
    """One ``size,median_ms,min_ms,max_ms`` table per backend, each under a ``# backend`` line."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for name in dict.fromkeys(r.backend for r in rows):
        buf.write(f"# backend {name}\n")
        w.writerow(["size", "median_ms", "min_ms", "max_ms"])
        for r in rows:
            if r.backend == name:
                w.writerow([r.size, f"{r.median_ms:.3f}", f"{r.min_ms:.3f}", f"{r.max_ms:.3f}"])
    return buf.getvalue()
