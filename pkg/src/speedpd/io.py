"""Instance and schedule file formats.

Instance text format::

    # comment
    alpha L g
    r d w        (one line per job, agreeable order)

Instance JSON: ``{"alpha":..,"wake_cost":..,"dissipation":..,"jobs":[{"r":..,"d":..,"w":..}]}``.

Schedule text format: one ``start end mode speed job`` record per line,
``job`` is ``-`` for idle segments; a trailing ``#`` block holds costs.
Floats are written with ``repr`` so files round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import (
    OFF,
    ON,
    CostBreakdown,
    EnergyModel,
    Instance,
    InstanceError,
    Schedule,
    Segment,
)


class ParseError(InstanceError):
    pass


def _num(tok: str, where: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"{where}: not a number: {tok!r}") from None


def _fmt(x: float) -> str:
    return repr(float(x))


def parse_instance_text(text: str, strict: bool = False) -> Instance:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise ParseError("empty instance")
    lineno, head = rows[0]
    if len(head) != 3:
        raise ParseError(f"line {lineno}: expected 'alpha L g'")
    alpha, L, g = (_num(t, f"line {lineno}") for t in head)
    triples = []
    for lineno, toks in rows[1:]:
        if len(toks) != 3:
            raise ParseError(f"line {lineno}: expected 'r d w'")
        triples.append(tuple(_num(t, f"line {lineno}") for t in toks))
    if not triples:
        raise ParseError("instance has no jobs")
    return Instance.from_triples(EnergyModel(alpha, L, g, strict=strict), triples)


def parse_instance_json(text: str, strict: bool = False) -> Instance:
    try:
        doc = json.loads(text)
        model = EnergyModel(
            float(doc["alpha"]), float(doc["wake_cost"]), float(doc["dissipation"]), strict=strict
        )
        triples = [(float(j["r"]), float(j["d"]), float(j["w"])) for j in doc["jobs"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        if isinstance(e, InstanceError):
            raise
        raise ParseError(f"bad instance document: {e}") from None
    if not triples:
        raise ParseError("instance has no jobs")
    return Instance.from_triples(model, triples)


def parse_instance(text: str, strict: bool = False) -> Instance:
    if text.lstrip().startswith("{"):
        return parse_instance_json(text, strict)
    return parse_instance_text(text, strict)


def load_instance(path: str | Path, strict: bool = False) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(str(e)) from None
    return parse_instance(text, strict)


def emit_instance_text(instance: Instance) -> str:
    m = instance.model
    lines = [f"{_fmt(m.alpha)} {_fmt(m.wake_cost)} {_fmt(m.dissipation)}"]
    lines += [f"{_fmt(j.release)} {_fmt(j.deadline)} {_fmt(j.workload)}" for j in instance.jobs]
    return "\n".join(lines) + "\n"


def emit_instance_json(instance: Instance) -> str:
    m = instance.model
    doc = {
        "alpha": m.alpha,
        "wake_cost": m.wake_cost,
        "dissipation": m.dissipation,
        "jobs": [{"r": j.release, "d": j.deadline, "w": j.workload} for j in instance.jobs],
    }
    return json.dumps(doc, indent=1) + "\n"


def emit_schedule(schedule: Schedule, cost: CostBreakdown | None = None, comments=()) -> str:
    lines = []
    for s in schedule.segments:
        job = "-" if s.job is None else str(s.job)
        lines.append(f"{_fmt(s.start)} {_fmt(s.end)} {s.mode} {_fmt(s.speed)} {job}")
    if cost is not None:
        lines.append(f"# speed_cost {_fmt(cost.speed_cost)}")
        lines.append(f"# mode_cost {_fmt(cost.mode_cost)}")
        lines.append(f"# wakeups {cost.wakeups}")
        lines.append(f"# on_duration {_fmt(cost.on_duration)}")
        lines.append(f"# total {_fmt(cost.total)}")
    lines += [f"# {c}" for c in comments]
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> Schedule:
    segs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 5:
            raise ParseError(f"line {lineno}: expected 'start end mode speed job'")
        a, b, speed = (_num(toks[k], f"line {lineno}") for k in (0, 1, 3))
        mode = toks[2]
        if mode not in (ON, OFF):
            raise ParseError(f"line {lineno}: mode must be 'on' or 'off'")
        if toks[4] == "-":
            job = None
        else:
            try:
                job = int(toks[4])
            except ValueError:
                raise ParseError(f"line {lineno}: bad job id {toks[4]!r}") from None
        segs.append(Segment(a, b, mode, speed, job))
    if not segs:
        raise ParseError("empty schedule")
    return Schedule(segs, (segs[0].start, segs[-1].end))


def format_matrix(M, fmt: str = "{:.12g}") -> str:
    """Rows 1..m+1, columns 0..m of a 1-based table; ``.`` marks unused cells."""
    M = np.asarray(M)
    size = M.shape[0]
    out = []
    for i in range(1, size):
        cells = []
        for j in range(0, size - 1):
            cells.append("." if j < i - 1 else fmt.format(M[i, j]))
        out.append(" ".join(cells))
    return "\n".join(out) + "\n"
