"""Energy model, instances, schedules and exact cost evaluation.

A schedule is a gap-free sequence of half-open segments. Each segment has a
mode (on/off), a speed and an optional job. Outside the schedule horizon the
machine is considered off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

ON = "on"
OFF = "off"

Boundary = Literal["on-at-both-ends", "infinite-horizon"]


class InstanceError(ValueError):
    """Malformed instance data (bad parameters, r >= d, w <= 0)."""


class NonAgreeableError(InstanceError):
    """Jobs are not in agreeable (release and deadline non-decreasing) order."""


class InfeasibleError(ValueError):
    """Some job is restricted to an empty time window."""


class InvalidScheduleError(ValueError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:3])
        more = "" if len(self.violations) <= 3 else f" (+{len(self.violations) - 3} more)"
        super().__init__(f"invalid schedule: {head}{more}")


@dataclass(frozen=True)
class EnergyModel:
    """Power ``speed**alpha`` while running, ``dissipation`` while on,
    ``wake_cost`` per transition from off to on."""

    alpha: float
    wake_cost: float
    dissipation: float
    strict: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("alpha", "wake_cost", "dissipation"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InstanceError(f"{name} must be a finite number, got {v!r}")
        if self.alpha <= 1:
            raise InstanceError(f"alpha must exceed 1, got {self.alpha}")
        if self.strict and not 2 <= self.alpha <= 3:
            raise InstanceError(f"alpha must lie in [2, 3] in strict mode, got {self.alpha}")
        if self.wake_cost <= 0:
            raise InstanceError("wake_cost must be positive")
        if self.dissipation <= 0:
            raise InstanceError("dissipation must be positive")

    @property
    def critical_speed(self) -> float:
        return critical_speed(self)

    @property
    def g_star(self) -> float:
        return g_star(self)

    @property
    def margin(self) -> float:
        """Length of the sentinel margins around an instance (L / g)."""
        return self.wake_cost / self.dissipation

    def energy_per_work(self, speed: float) -> float:
        return (speed**self.alpha + self.dissipation) / speed


def critical_speed(model: EnergyModel) -> float:
    """Speed minimising energy per unit of work while the machine is on."""
    return (model.dissipation / (model.alpha - 1.0)) ** (1.0 / model.alpha)


def g_star(model: EnergyModel) -> float:
    s = critical_speed(model)
    return (model.dissipation + s**model.alpha) / s


@dataclass(frozen=True)
class Job:
    id: int
    release: float
    deadline: float
    workload: float

    def __post_init__(self):
        if not (math.isfinite(self.release) and math.isfinite(self.deadline)):
            raise InstanceError(f"job {self.id}: release/deadline must be finite")
        if not math.isfinite(self.workload) or self.workload <= 0:
            raise InstanceError(f"job {self.id}: workload must be positive, got {self.workload}")
        if self.release >= self.deadline:
            raise InstanceError(
                f"job {self.id}: release {self.release} not before deadline {self.deadline}"
            )


@dataclass(frozen=True)
class Instance:
    model: EnergyModel
    jobs: tuple[Job, ...]

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if not self.jobs:
            raise InstanceError("an instance needs at least one job")
        for k, job in enumerate(self.jobs, start=1):
            if job.id != k:
                raise InstanceError(f"job ids must be 1..n in order, got {job.id} at position {k}")
        for a, b in zip(self.jobs, self.jobs[1:]):
            if b.release < a.release or b.deadline < a.deadline:
                raise NonAgreeableError(
                    f"jobs {a.id} and {b.id} are not in agreeable order "
                    f"(r: {a.release} -> {b.release}, d: {a.deadline} -> {b.deadline})"
                )

    @classmethod
    def from_triples(cls, model: EnergyModel, triples: Iterable[Sequence[float]]) -> "Instance":
        jobs = tuple(
            Job(k, float(r), float(d), float(w)) for k, (r, d, w) in enumerate(triples, start=1)
        )
        return cls(model, jobs)

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def d0(self) -> float:
        """Left sentinel deadline r_1 - L/g."""
        return self.jobs[0].release - self.model.margin

    @property
    def r_end(self) -> float:
        """Right sentinel release d_n + L/g."""
        return self.jobs[-1].deadline + self.model.margin

    @property
    def horizon(self) -> tuple[float, float]:
        return (self.d0, self.r_end)

    def as_subinstance(self) -> "Subinstance":
        return Subinstance(self.model, self.jobs, self.d0, self.r_end, first=1)

    def subinstance(self, i: int, j: int) -> "Subinstance":
        """Pair (i, j): jobs i..j restricted to [d_{i-1}, r_{j+1})."""
        return self.as_subinstance().pair(i, j)

    def reversed(self) -> "Instance":
        """Time-mirrored instance: job k becomes n+1-k with [-d, -r)."""
        jobs = tuple(
            Job(k, -j.deadline, -j.release, j.workload)
            for k, j in enumerate(reversed(self.jobs), start=1)
        )
        return Instance(self.model, jobs)


@dataclass(frozen=True)
class Subinstance:
    """Jobs ``first..first+m-1`` of some instance, restricted to ``[start, end)``.

    Local indices run 1..m. ``d(0)`` is the left boundary and ``r(m+1)`` the
    right one. Windows of the stored jobs are already intersected with the
    interval; a job whose window becomes empty makes the subinstance infeasible.
    """

    model: EnergyModel
    jobs: tuple[Job, ...]
    start: float
    end: float
    first: int = 1

    def __post_init__(self):
        jobs = []
        for job in self.jobs:
            r = max(job.release, self.start)
            d = min(job.deadline, self.end)
            # bypass Job validation: restricted windows may be empty
            rj = object.__new__(Job)
            for name, v in (("id", job.id), ("release", r), ("deadline", d), ("workload", job.workload)):
                object.__setattr__(rj, name, v)
            jobs.append(rj)
        object.__setattr__(self, "jobs", tuple(jobs))

    @property
    def m(self) -> int:
        return len(self.jobs)

    @property
    def i(self) -> int:
        return self.first

    @property
    def j(self) -> int:
        return self.first + self.m - 1

    @property
    def interval(self) -> tuple[float, float]:
        return (self.start, self.end)

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def infeasible(self) -> bool:
        if not self.jobs:
            return False
        if self.start >= self.end:
            return True
        return any(job.release >= job.deadline for job in self.jobs)

    def r(self, k: int) -> float:
        return self.end if k == self.m + 1 else self.jobs[k - 1].release

    def d(self, k: int) -> float:
        return self.start if k == 0 else self.jobs[k - 1].deadline

    def w(self, k: int) -> float:
        return self.jobs[k - 1].workload

    def pair(self, i: int, j: int) -> "Subinstance":
        """Local pair (i, j) with interval [d(i-1), r(j+1))."""
        if not (1 <= i <= j + 1 <= self.m + 1):
            raise IndexError(f"pair ({i}, {j}) out of range for m={self.m}")
        start, end = self.d(i - 1), self.r(j + 1)
        return Subinstance(self.model, self.jobs[i - 1 : j], start, end, first=self.first + i - 1)

    def arrays(self):
        """1-based arrays ``r, d, P`` of length m+2 (``P`` is the workload prefix sum)."""
        import numpy as np

        m = self.m
        r = np.empty(m + 2)
        d = np.empty(m + 2)
        P = np.zeros(m + 1)
        r[0] = self.start
        d[0] = self.start
        r[m + 1] = self.end
        d[m + 1] = self.end
        for k, job in enumerate(self.jobs, start=1):
            r[k] = job.release
            d[k] = job.deadline
            P[k] = P[k - 1] + job.workload
        return r, d, P


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    mode: str = ON
    speed: float = 0.0
    job: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "end", float(self.end))
        object.__setattr__(self, "speed", float(self.speed))
        if self.job is not None:
            object.__setattr__(self, "job", int(self.job))

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def work(self) -> float:
        return self.speed * (self.end - self.start)


@dataclass(frozen=True)
class Schedule:
    segments: tuple[Segment, ...]
    horizon: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def build(cls, segments: Iterable[Segment], horizon: tuple[float, float]) -> "Schedule":
        """Fill holes with idle-on segments and drop zero-length pieces."""
        t0, t1 = horizon
        out: list[Segment] = []
        cur = t0
        for seg in sorted(segments, key=lambda s: s.start):
            if seg.end <= seg.start:
                continue
            if seg.start > cur:
                out.append(Segment(cur, seg.start, ON))
            elif seg.start < cur:
                seg = Segment(cur, seg.end, seg.mode, seg.speed, seg.job)
                if seg.end <= seg.start:
                    continue
            out.append(seg)
            cur = seg.end
        if cur < t1:
            out.append(Segment(cur, t1, ON))
        return cls(tuple(out), (t0, t1))

    def runs(self) -> list[tuple[int, float, float, float]]:
        """Maximal ``(job, start, end, speed)`` runs, merging abutting equal pieces."""
        out: list[list] = []
        for seg in self.segments:
            if seg.job is None:
                continue
            if out and out[-1][0] == seg.job and out[-1][2] == seg.start and out[-1][3] == seg.speed:
                out[-1][2] = seg.end
            else:
                out.append([seg.job, seg.start, seg.end, seg.speed])
        return [tuple(x) for x in out]

    def off_intervals(self) -> list[tuple[float, float]]:
        out: list[list[float]] = []
        for seg in self.segments:
            if seg.mode != OFF:
                continue
            if out and out[-1][1] == seg.start:
                out[-1][1] = seg.end
            else:
                out.append([seg.start, seg.end])
        return [tuple(x) for x in out]

    def restrict(self, t0: float, t1: float) -> "Schedule":
        segs = []
        for s in self.segments:
            a, b = max(s.start, t0), min(s.end, t1)
            if a < b:
                segs.append(Segment(a, b, s.mode, s.speed, s.job))
        return Schedule(tuple(segs), (t0, t1))


@dataclass(frozen=True)
class CostBreakdown:
    speed_cost: float
    mode_cost: float
    wakeups: int
    on_duration: float

    @property
    def total(self) -> float:
        return self.speed_cost + self.mode_cost


@dataclass(frozen=True)
class Violation:
    prop: str
    message: str
    segment: int | None = None

    def __str__(self):
        where = "" if self.segment is None else f" [segment {self.segment}]"
        return f"{self.prop}: {self.message}{where}"


def _time_tol(*ts: float) -> float:
    return 1e-9 * max(1.0, *(abs(t) for t in ts))


def validate_schedule(jobs: Instance | Subinstance | Sequence[Job], schedule: Schedule) -> list[Violation]:
    """Return every violated schedule property; an empty list means valid.

    Window checks allow 1e-9 relative slack on time coordinates and the
    workload integral is checked to 1e-9 * max(1, w_j).
    """
    if isinstance(jobs, (Instance, Subinstance)):
        jobs = jobs.jobs
    by_id = {job.id: job for job in jobs}
    out: list[Violation] = []
    segs = schedule.segments
    t0, t1 = schedule.horizon
    if not t0 < t1:
        out.append(Violation("horizon", f"empty horizon [{t0}, {t1})"))
    if segs:
        if segs[0].start != t0 or segs[-1].end != t1:
            out.append(Violation("cover", "segments do not cover the horizon exactly"))
    elif t0 < t1:
        out.append(Violation("cover", "no segments"))
    work: dict[int, float] = {k: 0.0 for k in by_id}
    for idx, seg in enumerate(segs):
        if not seg.start < seg.end:
            out.append(Violation("segment", f"non-positive length [{seg.start}, {seg.end})", idx))
        if idx and segs[idx - 1].end != seg.start:
            out.append(Violation("cover", f"gap or overlap at {seg.start}", idx))
        if seg.mode not in (ON, OFF):
            out.append(Violation("mode", f"unknown mode {seg.mode!r}", idx))
        if not (math.isfinite(seg.speed) and seg.speed >= 0):
            out.append(Violation("speed", f"bad speed {seg.speed}", idx))
        if seg.speed > 0 and seg.mode != ON:
            out.append(Violation("property 1", "positive speed while off", idx))
        if (seg.speed == 0) != (seg.job is None):
            out.append(Violation("property 2", "speed is zero iff no job runs", idx))
        if seg.job is not None:
            job = by_id.get(seg.job)
            if job is None:
                out.append(Violation("property 3", f"unknown job {seg.job}", idx))
                continue
            tol = _time_tol(job.release, job.deadline)
            if seg.start < job.release - tol or seg.end > job.deadline + tol:
                out.append(
                    Violation(
                        "property 3",
                        f"job {job.id} runs in [{seg.start}, {seg.end}) outside "
                        f"[{job.release}, {job.deadline})",
                        idx,
                    )
                )
            work[job.id] += seg.work
    for k, job in by_id.items():
        if abs(work[k] - job.workload) > 1e-9 * max(1.0, job.workload):
            out.append(Violation("property 4", f"job {k} receives {work[k]!r} of {job.workload!r}"))
    return out


def evaluate_cost(
    model: EnergyModel | Instance | Subinstance,
    schedule: Schedule,
    boundary: Boundary = "on-at-both-ends",
    jobs: Instance | Subinstance | Sequence[Job] | None = None,
) -> CostBreakdown:
    """Speed cost plus mode cost of ``schedule``.

    ``on-at-both-ends`` charges one wake-up per maximal off interval inside the
    horizon. ``infinite-horizon`` treats everything outside the horizon as off
    and charges ``|S| + 1`` wake-ups for ``|S|`` maximal on intervals.
    If ``jobs`` (or an instance) is given the schedule is validated first.
    """
    if isinstance(model, (Instance, Subinstance)):
        if jobs is None:
            jobs = model
        model = model.model
    if jobs is not None:
        bad = validate_schedule(jobs, schedule)
        if bad:
            raise InvalidScheduleError(bad)
    speed_cost = 0.0
    on = 0.0
    for seg in schedule.segments:
        if seg.mode == ON:
            on += seg.duration
            if seg.speed > 0:
                speed_cost += seg.speed**model.alpha * seg.duration
    if boundary == "on-at-both-ends":
        wakeups = len(schedule.off_intervals())
    elif boundary == "infinite-horizon":
        n_on = 0
        prev_on = False
        for seg in schedule.segments:
            cur = seg.mode == ON
            if cur and not prev_on:
                n_on += 1
            prev_on = cur
        wakeups = n_on + 1
    else:
        raise ValueError(f"unknown boundary convention {boundary!r}")
    mode_cost = model.wake_cost * wakeups + model.dissipation * on
    return CostBreakdown(float(speed_cost), float(mode_cost), wakeups, float(on))


def density(jobs: Instance | Subinstance | Sequence[Job], t0: float, t1: float) -> float:
    """Total workload of jobs whose window lies inside ``[t0, t1)``, per unit time."""
    if not t0 < t1:
        raise ValueError("density needs t0 < t1")
    if isinstance(jobs, (Instance, Subinstance)):
        jobs = jobs.jobs
    total = sum(j.workload for j in jobs if t0 <= j.release and j.deadline <= t1)
    return total / (t1 - t0)


def is_dense(model: EnergyModel, value: float) -> bool:
    s = critical_speed(model)
    return value >= s - 1e-12 * s
