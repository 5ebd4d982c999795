"""Slow, independent reference computations used to check the fast solver.

Nothing here calls the squeezing kernels or the chain scans of ``dp``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import (
    OFF,
    ON,
    EnergyModel,
    InfeasibleError,
    Instance,
    Schedule,
    Segment,
    Subinstance,
    evaluate_cost,
    validate_schedule,
)
from .yds import extract_dense_regions, yds_schedule

INF = math.inf


def yds_from_scratch_Y(i: int, j: int, sub: Subinstance) -> float:
    """Never-power-down cost of local pair (i, j) by a fresh YDS run."""
    pair = sub.pair(i, j)
    g = sub.model.dissipation
    if not pair.jobs:
        return g * max(0.0, pair.end - pair.start)
    if pair.infeasible:
        return INF
    return yds_schedule(pair)[1] + g * (pair.end - pair.start)


def from_scratch_y_table(sub: Subinstance) -> np.ndarray:
    m = sub.m
    Y = np.full((m + 2, m + 2), INF)
    for i in range(1, m + 2):
        for j in range(i - 1, m + 1):
            Y[i, j] = yds_from_scratch_Y(i, j, sub)
    return Y


@dataclass
class YMismatch:
    i: int
    j: int
    got: float
    expected: float


def check_y_table(
    sub: Subinstance,
    Y,
    rel: float = 1e-9,
    corrupt: Callable[[np.ndarray], None] | None = None,
) -> list[YMismatch]:
    """Entries of ``Y`` that differ from the from-scratch values.

    ``corrupt`` is applied to a copy of ``Y`` before comparing (fault injection).
    """
    Y = np.array(Y, dtype=float, copy=True)
    if corrupt is not None:
        corrupt(Y)
    ref = from_scratch_y_table(sub)
    bad = []
    for i in range(1, sub.m + 2):
        for j in range(i - 1, sub.m + 1):
            a, b = Y[i, j], ref[i, j]
            if a == b:
                continue
            if math.isinf(a) or math.isinf(b) or abs(a - b) > rel * max(1.0, abs(b)):
                bad.append(YMismatch(i, j, float(a), float(b)))
    return bad


class _PairView:
    """Restricted windows of jobs i..j for one (i, j) pair, 1-based local indices."""

    def __init__(self, sub: Subinstance, i: int, j: int):
        self.i, self.j = i, j
        self.lo = sub.d(i - 1)
        self.hi = sub.r(j + 1)
        self.rel = {k: max(sub.r(k), self.lo) for k in range(i, j + 1)}
        self.dl = {k: min(sub.d(k), self.hi) for k in range(i, j + 1)}
        self.w = {k: sub.w(k) for k in range(i, j + 1)}

    def work(self, a: int, b: int) -> float:
        return sum(self.w[k] for k in range(a, b + 1))

    def suffix_end(self, a: int, b: int, s: float) -> float:
        return self.rel[a] + self.work(a, b) / s

    def f(self, a: int, s: float) -> int:
        """Largest b with rel_a + (w_a+..+w_k)/s >= rel_{k+1} for a <= k < b."""
        b = a
        while b < self.j and self.rel[a] + self.work(a, b) / s >= self.rel[b + 1]:
            b += 1
        return b

    def h(self, k: int, s: float) -> int:
        """Largest c with dl_c - (w_l+..+w_c)/s <= dl_{l-1} for k < l <= c."""
        best = k
        for c in range(k, self.j + 1):
            if all(self.dl[c] - self.work(l, c) / s <= self.dl[l - 1] for l in range(k + 1, c + 1)):
                best = c
        return best

    def forward_ok(self, a: int, b: int, s: float) -> bool:
        t = self.rel[a]
        for k in range(a, b + 1):
            if t < self.rel[k] - 1e-12 * max(1.0, abs(t)):
                return False
            t += self.w[k] / s
            if t > self.dl[k]:
                return False
        return True

    def backward_ok(self, b: int, c: int, s: float) -> bool:
        t = self.dl[c]
        for k in range(c, b - 1, -1):
            if t > self.dl[k]:
                return False
            t -= self.w[k] / s
            if t < self.rel[k]:
                return False
        return True


def naive_sparse(sub: Subinstance) -> float:
    """Optimal cost of a dense-free subinstance (both ends on) by direct recursion."""
    model = sub.model
    L, g = model.wake_cost, model.dissipation
    s = model.critical_speed
    gs = model.g_star
    m = sub.m
    O = {}
    for j in range(0, m + 1):
        hi = sub.r(j + 1)
        O[j + 1, j] = min(L, g * max(0.0, hi - sub.d(j)))
        for i in range(j, 0, -1):
            y = yds_from_scratch_Y(i, j, sub)
            if y == INF:
                O[i, j] = INF
                continue
            pv = _PairView(sub, i, j)
            best = y
            # leading shutdown, prefix i..c
            c = pv.h(i, s)
            if pv.backward_ok(i, c, s):
                u = pv.dl[c] - pv.work(i, c) / s
                if u > pv.lo:
                    best = min(best, L + gs * pv.work(i, c) + O[c + 1, j])
            # suffix k..j, trailing shutdown
            fs = {a: pv.f(a, s) for a in range(i, j + 1)}
            starters = [a for a in range(i, j + 1) if all(fs[x] != fs[a] for x in range(i, a))]
            for k in starters:
                if fs[k] != j:
                    continue
                if pv.forward_ok(k, j, s) and pv.suffix_end(k, j, s) < hi:
                    best = min(best, yds_from_scratch_Y(i, k - 1, sub) + gs * pv.work(k, j) + L)
            # inner shutdown between suffix a..b and prefix b+1..c
            for a in starters:
                b = fs[a]
                if b >= j or not pv.forward_ok(a, b, s):
                    continue
                c = pv.h(b + 1, s)
                if not pv.backward_ok(b + 1, c, s):
                    continue
                t = pv.suffix_end(a, b, s)
                u = pv.dl[c] - pv.work(b + 1, c) / s
                if t < u:
                    v = yds_from_scratch_Y(i, a - 1, sub) + gs * pv.work(a, c) + L + O[c + 1, j]
                    best = min(best, v)
            O[i, j] = best
    return O[1, m]


def naive_dp(instance: Instance) -> float:
    """Optimal total energy over ``[d_0, r_{n+1})``."""
    model = instance.model
    split = extract_dense_regions(instance)
    total = sum((b.u - b.t) * (b.speed**model.alpha + model.dissipation) for b in split.blocks)
    for sub in split.sparse:
        if not sub.jobs:
            total += min(model.wake_cost, model.dissipation * sub.length)
        else:
            total += naive_sparse(sub)
    return total


def random_instance(
    rng: np.random.Generator,
    n: int,
    alpha: float | None = None,
    strict: bool = False,
    integer: bool = False,
) -> Instance:
    """Random agreeable instance with mixed wake-up costs and densities near s*."""
    if alpha is None:
        alpha = float(rng.uniform(2.0, 3.0))
    g = float(rng.uniform(0.2, 3.0))
    s = (g / (alpha - 1.0)) ** (1.0 / alpha)
    w = rng.uniform(0.2, 2.0, n)
    span = float(w.sum() / s)
    # mean release gap relative to critical run length
    gap_scale = float(rng.choice([0.2, 0.6, 1.5, 4.0]))
    gaps = rng.exponential(gap_scale * span / max(n, 1), n)
    gaps[0] = 0.0
    r = np.cumsum(gaps)
    slack = (w / s) * rng.uniform(0.4, 4.0, n)
    if integer:
        r = np.floor(r)
        slack = np.ceil(slack)
        w = np.ceil(w * 4) / 4
    d = np.empty(n)
    prev = -INF
    for k in range(n):
        d[k] = max(prev, r[k] + slack[k])
        prev = d[k]
    L = float(np.exp(rng.uniform(np.log(0.02), np.log(30.0)))) * g * max(span / max(n, 1), 1e-3)
    model = EnergyModel(alpha, L, g, strict=strict)
    return Instance.from_triples(model, zip(r.tolist(), d.tolist(), w.tolist()))


class GridTooCoarseError(InfeasibleError):
    pass


def _grid_points(instance: Instance, delta: float) -> np.ndarray:
    r = [j.release for j in instance.jobs]
    d = [j.deadline for j in instance.jobs]
    lo, hi = min(r), max(d)
    steps = int(math.floor((hi - lo) / delta + 1e-9))
    pts = np.concatenate([np.array(r + d), lo + delta * np.arange(steps + 1)])
    pts = pts[pts <= hi]
    return np.unique(pts)


def grid_oracle(instance: Instance, delta: float | None = None) -> float:
    """Cheapest schedule whose job runs start and end on a time grid.

    Jobs run once each, in index order, at uniform speed. Every gap
    between runs (and to the horizon ends) costs ``min(L, g * gap)``.
    An upper bound on the optimum that tightens as ``delta`` shrinks.
    """
    model = instance.model
    alpha, L, g = model.alpha, model.wake_cost, model.dissipation
    if delta is None:
        delta = default_grid_delta(instance)
    pts = _grid_points(instance, delta)
    G = len(pts)
    x0, x1 = instance.horizon
    gap = pts[None, :] - pts[:, None]  # gap[e, s] = pts[s] - pts[e]
    with np.errstate(invalid="ignore", divide="ignore"):
        gap_cost = np.where(gap >= 0, np.minimum(L, g * np.maximum(gap, 0.0)), INF)
    # best[e]: cost of jobs so far with the last one ending at pts[e]
    best = None
    for job in instance.jobs:
        if best is None:
            start = np.minimum(L, g * (pts - x0))
        else:
            start = np.min(best[:, None] + gap_cost, axis=0)
        start = np.where(pts >= job.release, start, INF)
        dur = gap  # dur[s, e] = pts[e] - pts[s]
        with np.errstate(invalid="ignore", divide="ignore"):
            run = np.where(
                dur > 0, job.workload**alpha / np.where(dur > 0, dur, 1.0) ** (alpha - 1.0) + g * dur, INF
            )
        run[:, pts > job.deadline] = INF
        best = np.min(start[:, None] + run, axis=0)
        if not np.isfinite(best).any():
            raise GridTooCoarseError(f"no grid placement for job {job.id} at delta={delta!r}")
    total = best + np.minimum(L, g * (x1 - pts))
    return float(np.min(total))


def default_grid_delta(instance: Instance) -> float:
    r = min(j.release for j in instance.jobs)
    d = max(j.deadline for j in instance.jobs)
    return (d - r) / 64.0


def grid_refinement(instance: Instance, levels: int = 4) -> list[tuple[float, float]]:
    """``(delta, value)`` for the default delta halved ``levels - 1`` times.

    Coarse levels with no feasible placement are skipped.
    """
    delta = default_grid_delta(instance)
    out = []
    for _ in range(levels):
        try:
            out.append((delta, grid_oracle(instance, delta)))
        except GridTooCoarseError:
            pass
        delta /= 2.0
    if not out:
        raise GridTooCoarseError("grid too coarse at every refinement level")
    return out


@dataclass
class _Piece:
    job: int
    start: float
    end: float
    speed: float

    @property
    def work(self) -> float:
        return self.speed * (self.end - self.start)


def _schedule_cost(model: EnergyModel, pieces, gap_off, x0, x1) -> float:
    alpha, L, g = model.alpha, model.wake_cost, model.dissipation
    total = 0.0
    prev = x0
    for k, p in enumerate(pieces):
        total += p.work * p.speed ** (alpha - 1.0) + g * (p.end - p.start)
        gl = p.start - prev
        if gl > 0:
            total += L if gap_off[k] else g * gl
        prev = p.end
    gl = x1 - prev
    if gl > 0:
        total += L if gap_off[-1] else g * gl
    return total


def _to_schedule(pieces, gap_off, x0, x1) -> Schedule:
    segs = []
    prev = x0
    for k, p in enumerate(pieces):
        if p.start > prev and gap_off[k]:
            segs.append(Segment(prev, p.start, OFF))
        segs.append(Segment(p.start, p.end, ON, p.speed, p.job))
        prev = p.end
    if x1 > prev and gap_off[-1]:
        segs.append(Segment(prev, x1, OFF))
    return Schedule.build(segs, (x0, x1))


def perturbation_sampler(
    instance: Instance,
    schedule: Schedule,
    trials: int = 1000,
    rng: np.random.Generator | None = None,
    validate: bool = False,
) -> float:
    """Minimum over random local moves of (perturbed cost - original cost).

    Moves keep every job inside its window and runs disjoint: stretch or
    compress one run at constant work, shift one run within its slack, or
    flip one gap between off and idle-on.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    model = instance.model
    x0, x1 = instance.horizon
    base = evaluate_cost(instance, schedule).total
    pieces = [_Piece(job, a, b, s) for job, a, b, s in schedule.runs()]
    windows = {j.id: (j.release, j.deadline) for j in instance.jobs}
    off = schedule.off_intervals()
    gap_off = []
    prev = x0
    for p in pieces + [None]:
        nxt = x1 if p is None else p.start
        gap_off.append(any(a < nxt and b > prev for a, b in off))
        if p is not None:
            prev = p.end
    worst = INF
    n = len(pieces)
    for _ in range(trials):
        ps = list(pieces)
        go = list(gap_off)
        move = rng.integers(3) if n else 2
        if move < 2:
            k = int(rng.integers(n))
            p = ps[k]
            r, d = windows[p.job]
            lb = max(r, ps[k - 1].end if k else x0)
            rb = min(d, ps[k + 1].start if k + 1 < n else x1)
            dur = p.end - p.start
            scale = float(rng.choice([1e-6, 1e-3, 1e-2, 0.1, 0.5]))
            if move == 0:
                new = dur * math.exp(rng.normal(0.0, scale))
                anchor = rng.integers(3)
                if anchor == 0:
                    a = p.start
                elif anchor == 1:
                    a = p.end - new
                else:
                    a = 0.5 * (p.start + p.end) - 0.5 * new
                a = max(a, lb)
                b = min(a + new, rb)
            else:
                shift = rng.normal(0.0, scale) * max(dur, 1e-9)
                shift = min(max(shift, lb - p.start), rb - p.end)
                a, b = p.start + shift, p.end + shift
            if not b > a:
                continue
            ps[k] = _Piece(p.job, a, b, p.work / (b - a))
        else:
            q = int(rng.integers(n + 1))
            go[q] = not go[q]
        delta = _schedule_cost(model, ps, go, x0, x1) - base
        if validate:
            sched = _to_schedule(ps, go, x0, x1)
            viol = validate_schedule(instance, sched)
            if viol:
                raise AssertionError(f"perturbation broke feasibility: {viol[0]}")
            exact = evaluate_cost(instance, sched).total - base
            if abs(exact - delta) > 1e-9 * max(1.0, base):
                raise AssertionError("perturbation cost mismatch")
        worst = min(worst, delta)
    return worst
