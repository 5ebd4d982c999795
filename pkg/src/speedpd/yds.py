"""Max-density (YDS) scheduling with blackouts, and dense-region extraction."""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .model import (
    ON,
    InfeasibleError,
    Instance,
    Schedule,
    Segment,
    Subinstance,
    critical_speed,
)


class BlackoutTimeline:
    """Disjoint blacked-out intervals and the induced "available time" axis.

    Points inside a closed blackout ``[bs, be]`` all collapse to the same
    available coordinate.
    """

    def __init__(self):
        self.starts: list[float] = []
        self.ends: list[float] = []

    def __len__(self):
        return len(self.starts)

    def add(self, t0: float, t1: float) -> None:
        if not t0 < t1:
            return
        k = bisect.bisect_left(self.ends, t0)
        hi = k
        while hi < len(self.starts) and self.starts[hi] <= t1:
            t0 = min(t0, self.starts[hi])
            t1 = max(t1, self.ends[hi])
            hi += 1
        self.starts[k:hi] = [t0]
        self.ends[k:hi] = [t1]

    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.starts, self.ends))

    def compress(self, x):
        """Map real times to available-time coordinates (vectorised)."""
        x = np.asarray(x, dtype=float)
        if not self.starts:
            return x.copy()
        bs = np.asarray(self.starts)
        be = np.asarray(self.ends)
        pre = np.concatenate(([0.0], np.cumsum(be - bs)))
        k = np.searchsorted(bs, x, side="right") - 1
        inside = (k >= 0) & (x <= be[np.maximum(k, 0)])
        clamped = np.where(inside, bs[np.maximum(k, 0)], x)
        shift = np.where(inside, pre[np.maximum(k, 0)], pre[k + 1])
        return clamped - shift

    def measure(self, t0: float, t1: float) -> float:
        """Available measure of ``[t0, t1)``."""
        return float(max(0.0, self.compress(t1) - self.compress(t0)))

    def push_right(self, t: float) -> float:
        """Earliest available time not before ``t``."""
        k = bisect.bisect_right(self.starts, t) - 1
        if k >= 0 and t <= self.ends[k]:
            return self.ends[k]
        return t

    def push_left(self, t: float) -> float:
        """Latest available end point not after ``t``."""
        k = bisect.bisect_right(self.starts, t) - 1
        if k >= 0 and t <= self.ends[k]:
            return self.starts[k]
        return t

    def available(self, t0: float, t1: float) -> list[tuple[float, float]]:
        pieces = []
        cur = t0
        k = bisect.bisect_right(self.ends, t0)
        while cur < t1:
            if k < len(self.starts) and self.starts[k] < t1:
                if self.starts[k] > cur:
                    pieces.append((cur, self.starts[k]))
                cur = max(cur, self.ends[k])
                k += 1
            else:
                pieces.append((cur, t1))
                break
        return pieces


@dataclass(frozen=True)
class Block:
    """Jobs ``first..last`` run back to back at ``speed`` filling ``[t, u)``."""

    t: float
    u: float
    first: int
    last: int
    speed: float
    round: int = 0

    @property
    def work(self) -> float:
        return self.speed * (self.u - self.t)


def yds_rounds(r, d, w, threshold: float | None = None):
    """Run max-density rounds on 1-based local jobs given as 0-based arrays.

    Returns ``(blocks, timeline, scheduled_mask)``. With ``threshold`` set,
    stops as soon as the maximum density drops below it.
    """
    r = np.asarray(r, dtype=float)
    d = np.asarray(d, dtype=float)
    w = np.asarray(w, dtype=float)
    m = len(w)
    tl = BlackoutTimeline()
    alive = np.ones(m, dtype=bool)
    blocks: list[Block] = []
    rnd = 0
    while alive.any():
        idx = np.flatnonzero(alive)
        cr = tl.compress(r[idx])
        cd = tl.compress(d[idx])
        if np.any(cd <= cr):
            bad = int(idx[np.argmax(cd <= cr)]) + 1
            raise InfeasibleError(f"job {bad} has an empty available window")
        ww = w[idx]
        k = len(idx)
        Wp = np.concatenate(([0.0], np.cumsum(ww)))
        first = np.ones(k, dtype=bool)
        first[1:] = cr[1:] != cr[:-1]
        last = np.ones(k, dtype=bool)
        last[:-1] = cd[:-1] != cd[1:]
        num = Wp[None, 1:] - Wp[:-1, None]
        den = cd[None, :] - cr[:, None]
        valid = np.triu(np.ones((k, k), dtype=bool)) & first[:, None] & last[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.where(valid, num / np.where(valid, den, 1.0), -np.inf)
        flat = int(np.argmax(dens))
        a, b = divmod(flat, k)
        s = float(dens[a, b])
        if threshold is not None and s < threshold:
            break
        R = tl.push_right(float(r[idx[a]]))
        D = tl.push_left(float(d[idx[b]]))
        pieces = tl.available(R, D)
        sel = idx[a : b + 1]
        q_end = np.cumsum(w[sel])
        q_mid = q_end - w[sel] / 2.0
        lens = np.array([y - x for x, y in pieces])
        cap_end = np.cumsum(lens) * s
        where = np.minimum(np.searchsorted(cap_end, q_mid), len(pieces) - 1)
        for p, (x, y) in enumerate(pieces):
            members = sel[where == p]
            if len(members) == 0:
                continue
            wsum = float(w[members].sum())
            blocks.append(Block(x, y, int(members[0]) + 1, int(members[-1]) + 1, wsum / (y - x), rnd))
        tl.add(R, D)
        alive[sel] = False
        rnd += 1
    blocks.sort(key=lambda blk: blk.t)
    return blocks, tl, ~alive


def _compressed_to_real(pieces, c0, c):
    """Real time of available coordinate ``c`` given pieces starting at ``c0``."""
    acc = c0
    for x, y in pieces:
        if c <= acc + (y - x):
            return x + (c - acc)
        acc += y - x
    return pieces[-1][1]


def yds_general(r, d, w):
    """YDS for arbitrary (not necessarily agreeable) windows.

    Returns ``(segments, speed_by_job)`` where segments are
    ``(job, start, end, speed)`` tuples with 1-based local job indices; jobs
    may be preempted. Runs in O(m^4) and is meant for small inputs.
    """
    r = np.asarray(r, dtype=float)
    d = np.asarray(d, dtype=float)
    w = np.asarray(w, dtype=float)
    m = len(w)
    tl = BlackoutTimeline()
    alive = np.ones(m, dtype=bool)
    out = []
    speeds = np.zeros(m)
    while alive.any():
        idx = np.flatnonzero(alive)
        cr = tl.compress(r[idx])
        cd = tl.compress(d[idx])
        if np.any(cd <= cr):
            raise InfeasibleError("some job has an empty available window")
        xs = np.unique(cr)
        ys = np.unique(cd)
        inside_lo = cr[None, :] >= xs[:, None]
        inside_hi = cd[None, :] <= ys[:, None]
        W = (inside_lo * w[idx][None, :]) @ inside_hi.T.astype(float)
        den = ys[None, :] - xs[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.where((den > 0) & (W > 0), W / np.where(den > 0, den, 1.0), -np.inf)
        a, b = divmod(int(np.argmax(dens)), len(ys))
        s = float(dens[a, b])
        x, y = xs[a], ys[b]
        sel = idx[(cr >= x) & (cd <= y)]
        R = tl.push_right(float(r[sel].min()))
        D = tl.push_left(float(d[sel].max()))
        avail = tl.available(R, D)
        total = float(y - x)
        # preemptive EDF in available time at constant speed s
        jr = {int(k): float(tl.compress(r[k])) - x for k in sel}
        jd = {int(k): float(tl.compress(d[k])) - x for k in sel}
        rem = {int(k): float(w[k]) for k in sel}
        tau = 0.0
        end_tau = total
        while rem and tau < end_tau - 1e-15 * max(1.0, end_tau):
            ready = [k for k in rem if jr[k] <= tau + 1e-12 * max(1.0, abs(tau))]
            if not ready:
                tau = min(jr[k] for k in rem)
                continue
            k = min(ready, key=lambda q: (jd[q], q))
            nxt = min([jr[q] for q in rem if jr[q] > tau] + [float("inf")])
            run = min(rem[k] / s, nxt - tau)
            t_a = _compressed_to_real(avail, 0.0, tau)
            t_b = _compressed_to_real(avail, 0.0, tau + run)
            # split the run at blackout boundaries
            for px, py in avail:
                lo, hi = max(px, t_a), min(py, t_b)
                if lo < hi:
                    out.append((k + 1, lo, hi, s))
            rem[k] -= run * s
            if rem[k] <= 1e-12 * max(1.0, float(w[k])):
                del rem[k]
            tau += run
        speeds[sel] = s
        tl.add(avail[0][0], avail[-1][1])
        alive[sel] = False
    out.sort(key=lambda t: t[1])
    return out, speeds


def _is_agreeable(r, d) -> bool:
    return bool(np.all(np.diff(r) >= 0) and np.all(np.diff(d) >= 0))


def _local_arrays(sub: Subinstance):
    r = np.array([j.release for j in sub.jobs])
    d = np.array([j.deadline for j in sub.jobs])
    w = np.array([j.workload for j in sub.jobs])
    return r, d, w


def yds_blocks(sub: Subinstance) -> list[Block]:
    """Speed-optimal blocks of ``sub`` in time order (local job indices)."""
    if sub.infeasible:
        raise InfeasibleError(f"subinstance ({sub.i}, {sub.j}) is infeasible")
    if not sub.jobs:
        return []
    blocks, _, _ = yds_rounds(*_local_arrays(sub))
    return blocks


def block_segments(blocks, workloads, ids=None) -> list[Segment]:
    """Per-job segments for blocks; ``workloads`` is indexed by local job - 1."""
    segs = []
    for blk in blocks:
        cur = blk.t
        acc = 0.0
        for k in range(blk.first, blk.last + 1):
            acc += workloads[k - 1]
            end = blk.u if k == blk.last else blk.t + acc / blk.speed
            jid = k if ids is None else ids[k - 1]
            segs.append(Segment(cur, end, ON, blk.speed, jid))
            cur = end
    return segs


def speed_cost_of(blocks, alpha: float) -> float:
    return float(sum((blk.u - blk.t) * blk.speed**alpha for blk in blocks))


def yds_schedule(sub: Subinstance) -> tuple[Schedule, float]:
    """Always-on speed-optimal schedule of ``sub`` and its speed cost.

    Agreeable job sets use the block algorithm; anything else falls back to
    preemptive EDF inside each max-density interval.
    """
    if sub.jobs and not _is_agreeable(*_local_arrays(sub)[:2]):
        if sub.infeasible:
            raise InfeasibleError(f"subinstance ({sub.i}, {sub.j}) is infeasible")
        runs, _ = yds_general(*_local_arrays(sub))
        ids = [j.id for j in sub.jobs]
        segs = [Segment(a, b, ON, s, ids[k - 1]) for k, a, b, s in runs]
        cost = sum((b - a) * s**sub.model.alpha for _, a, b, s in runs)
        return Schedule.build(segs, sub.interval), float(cost)
    blocks = yds_blocks(sub)
    segs = block_segments(blocks, [j.workload for j in sub.jobs], [j.id for j in sub.jobs])
    sched = Schedule.build(segs, sub.interval)
    return sched, speed_cost_of(blocks, sub.model.alpha)


@dataclass(frozen=True)
class DenseSplit:
    """Result of peeling dense regions off an instance.

    ``blocks`` carry global job ids, ``regions`` are maximal blacked-out
    intervals, ``sparse`` are the subinstances between them (possibly empty).
    """

    blocks: tuple[Block, ...]
    regions: tuple[tuple[float, float], ...]
    sparse: tuple[Subinstance, ...]

    def dense_jobs(self) -> set[int]:
        return {k for blk in self.blocks for k in range(blk.first, blk.last + 1)}

    def segments(self, instance: Instance) -> list[Segment]:
        return block_segments(self.blocks, [j.workload for j in instance.jobs])


def extract_dense_regions(instance: Instance) -> DenseSplit:
    """Schedule every interval of density at least s* by YDS and split the rest.

    Sparse jobs between two regions (in index order) form one subinstance on
    the time gap between those regions; the sentinels d_0 and r_{n+1} bound the
    outermost gaps.
    """
    model = instance.model
    s_crit = critical_speed(model)
    sub = instance.as_subinstance()
    r, d, w = _local_arrays(sub)
    blocks, tl, done = yds_rounds(r, d, w, threshold=s_crit - 1e-12 * s_crit)
    regions = tl.intervals()
    ranges = []
    for t0, t1 in regions:
        inside = [b for b in blocks if t0 <= b.t and b.u <= t1]
        ranges.append((min(b.first for b in inside), max(b.last for b in inside)))
    bounds = [instance.d0] + [x for reg in regions for x in reg] + [instance.r_end]
    cuts = [0] + [k for lo, hi in ranges for k in (lo, hi)] + [instance.n + 1]
    sparse = []
    for g in range(len(regions) + 1):
        start, end = bounds[2 * g], bounds[2 * g + 1]
        lo, hi = cuts[2 * g] + 1, cuts[2 * g + 1] - 1
        jobs = instance.jobs[lo - 1 : hi] if lo <= hi else ()
        if any(done[k - 1] for k in range(lo, hi + 1)):
            raise AssertionError("dense job found inside a sparse gap")
        s = Subinstance(model, jobs, start, end, first=lo)
        if s.infeasible:
            raise InfeasibleError(f"jobs {lo}..{hi} cannot fit into [{start}, {end})")
        sparse.append(s)
    return DenseSplit(tuple(blocks), tuple(regions), tuple(sparse))
