"""Suffix/prefix scans, the four-case recursion, reconstruction, and the solver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend, _kernel_py
from .model import (
    OFF,
    ON,
    CostBreakdown,
    InfeasibleError,
    Instance,
    Schedule,
    Segment,
    Subinstance,
    critical_speed,
    evaluate_cost,
    g_star,
)
from .squeeze import YTable, build_y_table
from .yds import DenseSplit, block_segments, extract_dense_regions, yds_blocks

INF = math.inf

CASE_NAMES = {-1: "infeasible", 0: "empty", 1: "always-on", 2: "leading-off", 3: "trailing-off", 4: "inner-off"}


class InternalInconsistencyError(RuntimeError):
    pass


@dataclass
class FHTables:
    """Suffix map ``f`` (on chain starters only), its inverse, and prefix map ``h``.

    Keys and values are job ids.
    """

    f: dict[int, int]
    f_inv: dict[int, int]
    h: dict[int, int]


def compute_f(sub: Subinstance) -> tuple[dict[int, int], dict[int, int]]:
    """Last job of the critical-speed chain started by each chain starter."""
    if not sub.jobs:
        return {}, {}
    r, d, P = sub.arrays()
    cs, _, _ = _kernel_py.chain_scan(r, d, P, critical_speed(sub.model), 1, sub.m)
    off = sub.first - 1
    f: dict[int, int] = {}
    for k in range(1, sub.m + 1):
        f[cs[k] + off] = k + off
    return f, {b: a for a, b in f.items()}


def compute_h(sub: Subinstance) -> dict[int, int]:
    """Last job of the critical-speed prefix chain that contains each job."""
    if not sub.jobs:
        return {}
    r, d, P = sub.arrays()
    h = _kernel_py.prefix_scan(r, d, P, critical_speed(sub.model), sub.m)
    off = sub.first - 1
    return {k + off: h[k] + off for k in range(1, sub.m + 1)}


def compute_fh(sub: Subinstance) -> FHTables:
    f, f_inv = compute_f(sub)
    return FHTables(f, f_inv, compute_h(sub))


@dataclass
class OTable:
    O: np.ndarray
    case: np.ndarray
    arg: np.ndarray

    def __getitem__(self, ij):
        return self.O[ij]


def dp_solve(sub: Subinstance, ytable: YTable | None = None, kernel=None) -> OTable:
    """Optimal total cost of every local pair (i, j) of a dense-free subinstance."""
    kernel = kernel or _backend.kernel
    if ytable is None:
        ytable = build_y_table(sub, kernel)
    r, d, P = sub.arrays()
    model = sub.model
    O, case, arg = kernel.dp_fill(
        r, d, P, np.ascontiguousarray(ytable.Y), model.wake_cost, model.dissipation,
        critical_speed(model), g_star(model),
    )
    return OTable(np.asarray(O, dtype=float), np.asarray(case, dtype=np.int64), np.asarray(arg, dtype=np.int64))


def _critical_run(sub, k, c, start, end, s):
    """Jobs k..c back to back at speed ``s`` from ``start``; last one ends at ``end``."""
    segs = []
    cur = start
    acc = 0.0
    for q in range(k, c + 1):
        acc += sub.w(q)
        stop = end if q == c else start + acc / s
        segs.append(Segment(cur, stop, ON, s, sub.jobs[q - 1].id))
        cur = stop
    return segs


def _y_segments(sub, i, k):
    if k < i:
        return []
    pair = sub.pair(i, k)
    blocks = yds_blocks(pair)
    return block_segments(blocks, [j.workload for j in pair.jobs], [j.id for j in pair.jobs])


@dataclass
class Step:
    """One back-pointer hop of a reconstruction."""

    i: int
    j: int
    case: int
    a: int = 0
    b: int = 0
    c: int = 0
    t: float = 0.0  # shutdown start
    u: float = 0.0  # shutdown end


def reconstruct(
    sub: Subinstance, otable: OTable, i: int = 1, j: int | None = None, trace: list | None = None
) -> Schedule:
    """Concrete schedule of local pair (i, j) achieving ``otable.O[i, j]``."""
    if j is None:
        j = sub.m
    model = sub.model
    L, g = model.wake_cost, model.dissipation
    s = critical_speed(model)
    r, d, P = sub.arrays()
    R = r[j + 1]
    horizon = (d[i - 1], R)
    target = otable.O[i, j]
    if target == INF:
        raise InfeasibleError(f"pair ({i}, {j}) is infeasible")
    h = _kernel_py.prefix_scan(r, d, P, s, j) if j >= 1 else None
    segs: list[Segment] = []
    steps = [] if trace is None else trace
    while True:
        cs = int(otable.case[i, j])
        lo = d[i - 1]
        if cs == 0:
            if R > lo and L < g * (R - lo):
                segs.append(Segment(lo, R, OFF))
            steps.append(Step(i, j, 0))
            break
        if cs == 1:
            segs += _y_segments(sub, i, j)
            steps.append(Step(i, j, 1))
            break
        if cs == 2:
            c = int(otable.arg[i, j])
            end = min(d[c], R)
            u = end - (P[c] - P[i - 1]) / s
            segs.append(Segment(lo, u, OFF))
            segs += _critical_run(sub, i, c, u, end, s)
            steps.append(Step(i, j, 2, c=c, t=lo, u=u))
            i = c + 1
            continue
        cs_, ct, _ = _kernel_py.chain_scan(r, d, P, s, i, sub.m)
        if cs == 3:
            k = int(otable.arg[i, j])
            start = max(r[k], lo)
            t = ct[j]
            segs += _y_segments(sub, i, k - 1)
            segs += _critical_run(sub, k, j, start, t, s)
            segs.append(Segment(t, R, OFF))
            steps.append(Step(i, j, 3, a=k, b=j, t=t, u=R))
            break
        if cs == 4:
            a = int(otable.arg[i, j])
            b = max(k for k in range(a, j + 1) if cs_[k] == a)
            c = h[b + 1]
            start = max(r[a], lo)
            t = ct[b]
            end = min(d[c], R)
            u = end - (P[c] - P[b]) / s
            segs += _y_segments(sub, i, a - 1)
            segs += _critical_run(sub, a, b, start, t, s)
            segs.append(Segment(t, u, OFF))
            segs += _critical_run(sub, b + 1, c, u, end, s)
            steps.append(Step(i, j, 4, a=a, b=b, c=c, t=t, u=u))
            i = c + 1
            continue
        raise InternalInconsistencyError(f"unexpected case {cs} at ({i}, {j})")
    sched = Schedule.build(segs, horizon)
    got = evaluate_cost(model, sched).total
    if abs(got - target) > 1e-9 * max(1.0, abs(target)):
        raise InternalInconsistencyError(
            f"reconstructed cost {got!r} differs from table value {target!r}"
        )
    return sched


@dataclass
class SparsePart:
    sub: Subinstance
    ytable: YTable | None
    otable: OTable | None
    cost: float
    trace: list = field(default_factory=list)


@dataclass
class Solution:
    instance: Instance
    schedule: Schedule
    cost: CostBreakdown
    split: DenseSplit
    parts: list[SparsePart]

    @property
    def total(self) -> float:
        return self.cost.total


def solve_sparse(sub: Subinstance, kernel=None) -> tuple[list[Segment], SparsePart]:
    """Optimal segments of one dense-free subinstance (boundaries on)."""
    model = sub.model
    if not sub.jobs:
        gap = sub.length
        cost = min(model.wake_cost, model.dissipation * gap)
        segs = [Segment(sub.start, sub.end, OFF)] if model.wake_cost < model.dissipation * gap else []
        return segs, SparsePart(sub, None, None, cost)
    yt = build_y_table(sub, kernel)
    ot = dp_solve(sub, yt, kernel)
    trace: list = []
    sched = reconstruct(sub, ot, 1, sub.m, trace)
    return list(sched.segments), SparsePart(sub, yt, ot, float(ot.O[1, sub.m]), trace)


def solve(instance: Instance, kernel=None) -> Solution:
    """Minimum-energy schedule over ``[d_0, r_{n+1})`` and its cost."""
    split = extract_dense_regions(instance)
    segs = split.segments(instance)
    parts = []
    for sub in split.sparse:
        ss, part = solve_sparse(sub, kernel)
        segs += [x for x in ss if not (x.mode == ON and x.job is None)]
        parts.append(part)
    schedule = Schedule.build(segs, instance.horizon)
    cost = evaluate_cost(instance, schedule)
    model = instance.model
    expected = sum(p.cost for p in parts) + sum(
        (b.u - b.t) * (b.speed**model.alpha + model.dissipation) for b in split.blocks
    )
    if abs(cost.total - expected) > 1e-9 * max(1.0, expected):
        raise InternalInconsistencyError(f"schedule cost {cost.total!r} != tables {expected!r}")
    return Solution(instance, schedule, cost, split, parts)
