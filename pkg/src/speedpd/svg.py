"""Static SVG Gantt chart of a schedule.

Each run is a box whose height is its speed and whose area is its work.
Boxes are colored by speed relative to the critical speed, a mode line
shows on/off state, and one bar per job marks its release-deadline window.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .model import OFF, Instance, Schedule

COLORS = {"slow": "#9ecae1", "critical": "#31a354", "fast": "#e6550d"}

WIDTH = 900
MARGIN = 50
SPEED_HEIGHT = 220
MODE_HEIGHT = 14
ROW = 12


def _speed_class(speed: float, s_star: float) -> str:
    if abs(speed - s_star) <= 1e-9 * max(1.0, s_star):
        return "critical"
    return "slow" if speed < s_star else "fast"


def _f(x: float) -> str:
    return f"{x:.3f}"


def render_svg(instance: Instance, schedule: Schedule, title: str | None = None) -> str:
    """SVG text for ``schedule``; output depends only on the inputs."""
    s_star = instance.model.critical_speed
    t0, t1 = schedule.horizon
    plot_w = WIDTH - 2 * MARGIN
    max_speed = max([s.speed for s in schedule.segments] + [s_star])

    # shared scale: box area proportional to work
    def x(t):
        return MARGIN + (t - t0) / (t1 - t0) * plot_w

    def y_h(speed):
        return speed / max_speed * SPEED_HEIGHT

    top = MARGIN
    base = top + SPEED_HEIGHT
    mode_y = base + 16
    win_y = mode_y + MODE_HEIGHT + 16
    height = int(win_y + ROW * instance.n + MARGIN)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="10">',
        "<style>"
        + "".join(f".{k}{{fill:{v}}}" for k, v in COLORS.items())
        + ".on{fill:#636363}.off{fill:#f0f0f0;stroke:#636363;stroke-width:0.5}"
        ".win{fill:#bdbdbd}.crit{stroke:#31a354;stroke-dasharray:4 3}"
        "</style>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 20}" font-size="13">{escape(title)}</text>')
    ys = base - y_h(s_star)
    out.append(f'<line class="crit" x1="{MARGIN}" y1="{_f(ys)}" x2="{MARGIN + plot_w}" y2="{_f(ys)}"/>')
    out.append(f'<text x="{MARGIN + plot_w + 4}" y="{_f(ys + 3)}">s*</text>')
    out.append(f'<line x1="{MARGIN}" y1="{base}" x2="{MARGIN + plot_w}" y2="{base}" stroke="black"/>')
    for job, a, b, speed in schedule.runs():
        h = y_h(speed)
        cls = _speed_class(speed, s_star)
        out.append(
            f'<rect class="{cls}" x="{_f(x(a))}" y="{_f(base - h)}" width="{_f(x(b) - x(a))}" '
            f'height="{_f(h)}" stroke="white" stroke-width="0.5"><title>job {job} speed {speed:.6g}</title></rect>'
        )
        if x(b) - x(a) >= 10:
            out.append(f'<text x="{_f((x(a) + x(b)) / 2)}" y="{_f(base - h - 3)}" text-anchor="middle">{job}</text>')
    for seg in schedule.segments:
        cls = "off" if seg.mode == OFF else "on"
        hh = MODE_HEIGHT if seg.mode == OFF else 4
        yy = mode_y + (MODE_HEIGHT - hh) / 2
        out.append(f'<rect class="{cls}" x="{_f(x(seg.start))}" y="{_f(yy)}" width="{_f(x(seg.end) - x(seg.start))}" height="{_f(hh)}"/>')
    out.append(f'<text x="{MARGIN - 4}" y="{mode_y + 10}" text-anchor="end">mode</text>')
    for k, job in enumerate(instance.jobs):
        yy = win_y + k * ROW
        a, b = max(job.release, t0), min(job.deadline, t1)
        out.append(f'<rect class="win" x="{_f(x(a))}" y="{_f(yy)}" width="{_f(x(b) - x(a))}" height="{ROW - 4}"/>')
        out.append(f'<text x="{MARGIN - 4}" y="{_f(yy + ROW - 5)}" text-anchor="end">{job.id}</text>')
    lx = MARGIN
    ly = height - MARGIN / 2
    for name, label in (("slow", "< s*"), ("critical", "= s*"), ("fast", "> s*")):
        out.append(f'<rect class="{name}" x="{lx}" y="{_f(ly - 9)}" width="10" height="10"/>')
        out.append(f'<text x="{lx + 14}" y="{_f(ly)}">{escape(label)}</text>')
        lx += 70
    out.append("</svg>")
    return "\n".join(out) + "\n"
