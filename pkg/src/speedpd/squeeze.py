"""All never-power-down costs Y[i][j] of a subinstance in O(n^3).

Row j is obtained from the speed-optimal schedule of pair (1, j) by
squeezing the first block rightwards while jobs are dropped from the left.
The seeds for every row come from the same procedure run on the
time-mirrored subinstance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .model import Subinstance
from .yds import yds_blocks

INF = float("inf")


def split_speed(k: int, b: int, u: float, P, d) -> float:
    """Speed at which job ``k`` of a block ending at ``u`` with last job ``b``
    would finish exactly at its deadline."""
    if not k < b:
        raise ValueError("split candidates need k < b")
    if not u > d[k]:
        raise ValueError(f"job {k} has deadline {d[k]} at or after block end {u}")
    return (P[b] - P[k]) / (u - d[k])


class SplitSpeedIndex:
    """Split speeds for one (block end job ``b``, block end ``u``) pair.

    ``argmin(i)`` answers the cheapest split candidate among ``k in [i, b)``
    in O(1) after an O(b) build.
    """

    def __init__(self, P, d, b: int, u: float, lo: int = 1):
        self.b, self.u, self.lo = b, u, lo
        n = b - lo
        self.values = [INF] * (n + 1)
        self.best = [INF] * (n + 1)
        self.where = [-1] * (n + 1)
        for k in range(b - 1, lo - 1, -1):
            pos = k - lo
            if d[k] < u:
                self.values[pos] = (P[b] - P[k]) / (u - d[k])
            self.best[pos], self.where[pos] = self.best[pos + 1], self.where[pos + 1]
            if self.values[pos] <= self.best[pos]:
                self.best[pos], self.where[pos] = self.values[pos], k

    def s_hat(self, k: int) -> float:
        return self.values[k - self.lo]

    def argmin(self, i: int) -> tuple[int, float]:
        pos = i - self.lo
        return self.where[pos], self.best[pos]


@dataclass
class RowResult:
    j: int
    costs: list  # speed cost per i (index 0 unused)
    events: int
    counts: list = field(default_factory=lambda: [0, 0, 0, 0])


@dataclass
class Seed:
    """Blocks ``(t, u, last_job)`` of the speed-optimal schedule of pair (1, j)."""

    j: int
    t: list
    u: list
    b: list
    speed_cost: float

    def blocks(self):
        return list(zip(self.t, self.u, self.b))


def _seed_arrays(blocks):
    return (
        np.array([x[0] for x in blocks], dtype=float),
        np.array([x[1] for x in blocks], dtype=float),
        np.array([x[2] for x in blocks], dtype=np.int64),
    )


def reversed_arrays(r, d, P):
    m = len(P) - 1
    rr = -d[::-1].copy()
    dr = -r[::-1].copy()
    Pr = P[m] - P[::-1]
    return rr, dr, np.ascontiguousarray(Pr)


def compute_row_left_to_right(sub: Subinstance, j: int, seed: Seed, kernel=None) -> RowResult:
    """Speed costs of pairs (i, j), i = 1..j, starting from the (1, j) seed."""
    kernel = kernel or _backend.kernel
    r, d, P = sub.arrays()
    t, u, b = _seed_arrays(seed.blocks())
    counts = [0, 0, 0, 0]
    costs, events, _ = kernel.squeeze_row(r, d, P, sub.model.alpha, j, t, u, b, False, counts)
    return RowResult(j, list(costs), events, counts)


def compute_first_column_right_to_left(sub: Subinstance, kernel=None) -> dict[int, Seed]:
    """Speed-optimal schedules of every pair (1, j), keyed by j.

    Runs the left-to-right squeeze on the mirrored subinstance. Rows j whose
    pair (1, j) is infeasible are absent.
    """
    kernel = kernel or _backend.kernel
    m = sub.m
    if m == 0:
        return {}
    r, d, P = sub.arrays()
    blocks = yds_blocks(sub)
    # mirror the (1, m) schedule
    mt = [-blk.u for blk in reversed(blocks)]
    mu = [-blk.t for blk in reversed(blocks)]
    mb = [m + 1 - blk.first for blk in reversed(blocks)]
    rr, dr, Pr = reversed_arrays(r, d, P)
    costs, _, snaps = kernel.squeeze_row(
        rr, dr, Pr, sub.model.alpha, m,
        np.array(mt), np.array(mu), np.array(mb, dtype=np.int64), True, None,
    )
    seeds = {}
    for ip, rev_blocks in snaps:
        j = m + 1 - ip
        ts, us, bs = [], [], []
        a = ip
        firsts = []
        for tt, uu, bb in rev_blocks:
            firsts.append(a)
            a = bb + 1
        for (tt, uu, bb), a in zip(reversed(rev_blocks), reversed(firsts)):
            ts.append(-uu)
            us.append(-tt)
            bs.append(m + 1 - a)
        seeds[j] = Seed(j, ts, us, bs, costs[ip])
    return seeds


@dataclass
class YTable:
    """``Y[i][j]`` for 1 <= i <= j+1 <= m+1; inf marks infeasible pairs."""

    Y: np.ndarray
    events: dict
    counts: dict

    def __getitem__(self, ij):
        return self.Y[ij]

    @property
    def m(self) -> int:
        return self.Y.shape[0] - 2


def build_y_table(sub: Subinstance, kernel=None) -> YTable:
    kernel = kernel or _backend.kernel
    m = sub.m
    g = sub.model.dissipation
    r, d, P = sub.arrays()
    Y = np.full((m + 2, m + 2), INF)
    for i in range(1, m + 2):
        Y[i, i - 1] = g * max(0.0, r[i] - d[i - 1])
    events, counts = {}, {}
    if m == 0:
        return YTable(Y, events, counts)
    seeds = compute_first_column_right_to_left(sub, kernel)
    alpha = sub.model.alpha
    for j in range(1, m + 1):
        seed = seeds.get(j)
        if seed is None:
            continue
        t, u, b = _seed_arrays(seed.blocks())
        cnt = [0, 0, 0, 0]
        costs, ev, _ = kernel.squeeze_row(r, d, P, alpha, j, t, u, b, False, cnt)
        events[j] = ev
        counts[j] = cnt
        R = r[j + 1]
        for i in range(1, j + 1):
            c = costs[i]
            if c != INF:
                Y[i, j] = c + g * (R - d[i - 1])
    return YTable(Y, events, counts)
