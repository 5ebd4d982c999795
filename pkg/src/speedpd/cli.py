"""``speedpd`` command line.

Exit codes: 0 ok, 1 check failed, 2 parse error, 3 non-agreeable input,
4 infeasible instance.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _backend
from .bench import run_bench, scaling_ratios, to_csv
from .dp import CASE_NAMES, InternalInconsistencyError, compute_fh, solve
from .io import (
    ParseError,
    emit_instance_json,
    emit_instance_text,
    emit_schedule,
    format_matrix,
    load_instance,
    parse_schedule,
)
from .model import (
    EnergyModel,
    InfeasibleError,
    Instance,
    InstanceError,
    NonAgreeableError,
    evaluate_cost,
    validate_schedule,
)
from .oracle import check_y_table, grid_refinement, naive_dp, perturbation_sampler, random_instance
from .svg import render_svg

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_NONAGREEABLE, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _trace_lines(solution) -> list[str]:
    lines = [f"backend {_backend.NAME}"]
    for k, part in enumerate(solution.parts, 1):
        sub = part.sub
        ids = f"{sub.jobs[0].id}..{sub.jobs[-1].id}" if sub.jobs else "none"
        lines.append(f"part {k} jobs {ids} interval [{sub.start!r}, {sub.end!r}) cost {part.cost!r}")
        off = sub.first - 1
        for st in part.trace:
            name = CASE_NAMES[st.case]
            extra = ""
            if st.case == 2:
                extra = f" c={st.c + off}"
            elif st.case == 3:
                extra = f" k={st.a + off}"
            elif st.case == 4:
                extra = f" a={st.a + off} b={st.b + off} c={st.c + off}"
            lines.append(f"  O[{st.i + off},{st.j + off}] case {st.case} ({name}){extra}")
    for b in solution.split.blocks:
        lines.append(f"dense block [{b.t!r}, {b.u!r}) speed {b.speed!r}")
    return lines


def _dump_tables(solution, what: str) -> str:
    out = []
    for k, part in enumerate(solution.parts, 1):
        sub = part.sub
        if not sub.jobs:
            continue
        out.append(f"# part {k}: local index 1 = job {sub.first}, {sub.m} jobs")
        if what == "y":
            out.append(format_matrix(part.ytable.Y).rstrip("\n"))
        elif what == "o":
            out.append(format_matrix(part.otable.O).rstrip("\n"))
        else:
            fh = compute_fh(sub)
            out.append("f " + " ".join(f"{a}:{b}" for a, b in sorted(fh.f.items())))
            out.append("h " + " ".join(f"{a}:{b}" for a, b in sorted(fh.h.items())))
    return "\n".join(out) + "\n"


def cmd_solve(args) -> int:
    inst = load_instance(args.instance, strict=args.strict_alpha)
    kernel = _backend.get(args.backend)
    solution = solve(inst, kernel)
    _write(args.output, emit_schedule(solution.schedule, solution.cost, _trace_lines(solution)))
    if args.svg:
        Path(args.svg).write_text(render_svg(inst, solution.schedule, Path(args.instance).name))
    for flag, what in ((args.dump_y, "y"), (args.dump_o, "o"), (args.dump_fh, "fh")):
        if flag:
            Path(flag).write_text(_dump_tables(solution, what))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.n < 1:
        raise ParseError("n must be at least 1")
    rng = np.random.default_rng(args.seed)
    if args.mode == "flow":
        if not args.flow > 0:
            raise ParseError("flow must be positive")
        # dyadic grid keeps r + F - r == F exact for dyadic F
        r = np.round(np.cumsum(rng.exponential(args.gap, args.n)) * 1024) / 1024
        w = np.maximum(np.round(rng.uniform(0.1, 1.0, args.n) * args.work * 1024), 1) / 1024
        model = EnergyModel(args.alpha, args.wake_cost, args.dissipation, strict=args.strict_alpha)
        inst = Instance.from_triples(model, zip(r.tolist(), (r + args.flow).tolist(), w.tolist()))
    else:
        inst = random_instance(rng, args.n, strict=args.strict_alpha)
    text = emit_instance_json(inst) if args.format == "json" else emit_instance_text(inst)
    _write(args.output, text)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = ["cython", "python"] if args.backend == "both" else [args.backend]
    rows = run_bench(sizes, args.repetitions, backends, args.seed)
    text = to_csv(rows)
    for (b, n), ratio in sorted(scaling_ratios(rows).items()):
        text += f"# {b} t({2 * n})/t({n}) = {ratio:.2f}\n"
    _write(args.output, text)
    return EXIT_OK


def check_instance(
    inst: Instance,
    naive_max: int = 12,
    grid_max: int = 5,
    perturb_trials: int = 200,
    rng=None,
    corrupt=None,
) -> list[str]:
    """Failure messages from every oracle applicable to ``inst``."""
    fails = []
    try:
        solution = solve(inst)
    except (InternalInconsistencyError, InfeasibleError, RuntimeError) as e:
        return [f"solve raised {type(e).__name__}: {e}"]
    total = solution.total
    for k, part in enumerate(solution.parts, 1):
        if part.ytable is None:
            continue
        for mm in check_y_table(part.sub, part.ytable.Y, corrupt=corrupt):
            off = part.sub.first - 1
            fails.append(
                f"Y mismatch part {k} at (i={mm.i + off}, j={mm.j + off}): got {mm.got!r}, expected {mm.expected!r}"
            )
    if inst.n <= naive_max:
        ref = naive_dp(inst)
        if abs(ref - total) > 1e-9 * max(1.0, abs(ref)):
            fails.append(f"naive_dp {ref!r} != solve {total!r}")
    if inst.n <= grid_max:
        for delta, value in grid_refinement(inst):
            if value < total - 1e-9:
                fails.append(f"grid value {value!r} at delta {delta!r} below solve {total!r}")
    if perturb_trials:
        worst = perturbation_sampler(inst, solution.schedule, perturb_trials, rng)
        if worst < -1e-9 * total:
            fails.append(f"perturbation improved cost by {-worst!r}")
    return fails


def minimize_failing(inst: Instance, still_fails) -> Instance:
    """Greedily drop jobs while ``still_fails`` holds."""
    jobs = [(j.release, j.deadline, j.workload) for j in inst.jobs]
    k = 0
    while k < len(jobs) and len(jobs) > 1:
        trial = jobs[:k] + jobs[k + 1 :]
        cand = Instance.from_triples(inst.model, trial)
        if still_fails(cand):
            jobs = trial
        else:
            k += 1
    return Instance.from_triples(inst.model, jobs)


def _parse_corrupt(arg: str | None):
    if not arg:
        return None
    i, j = (int(x) for x in arg.split(","))

    def corrupt(Y):
        Y[i, j] += 1.0

    return corrupt


def cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    corrupt = _parse_corrupt(args.corrupt_y)
    if args.instance:
        instances = [load_instance(args.instance, strict=args.strict_alpha)]
    else:
        instances = [random_instance(rng, int(rng.integers(1, args.max_n + 1))) for _ in range(args.campaign)]
    failed = 0
    worst_gap = 0.0
    for idx, inst in enumerate(instances):
        fails = check_instance(inst, args.naive_max, args.grid_max, args.perturb, rng, corrupt)
        if inst.n <= args.grid_max and not fails:
            total = solve(inst).total
            worst_gap = max(worst_gap, (grid_refinement(inst)[-1][1] - total) / total)
        if fails:
            failed += 1
            print(f"instance {idx} (n={inst.n}): FAIL")
            for f in fails:
                print(f"  {f}")
            if args.dump_failing and failed == 1:
                small = minimize_failing(
                    inst, lambda c: bool(check_instance(c, args.naive_max, args.grid_max, 0, None, None))
                ) if corrupt is None else inst
                Path(args.dump_failing).write_text(emit_instance_text(small))
                print(f"  minimized failing instance ({small.n} jobs) written to {args.dump_failing}")
    print(f"checked {len(instances)} instances, {failed} failed; max grid gap {100 * worst_gap:.4f}%")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_validate(args) -> int:
    inst = load_instance(args.instance, strict=args.strict_alpha)
    sched = parse_schedule(Path(args.schedule).read_text())
    bad = validate_schedule(inst, sched)
    for v in bad:
        print(v)
    if bad:
        return EXIT_CHECK
    cost = evaluate_cost(inst.model, sched, args.boundary)
    print(f"valid; total {cost.total!r} (speed {cost.speed_cost!r}, mode {cost.mode_cost!r}, wakeups {cost.wakeups})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="speedpd", description="Minimum-energy scheduling with speed scaling and power-down.")
    strict = argparse.ArgumentParser(add_help=False)
    strict.add_argument(
        "--strict-alpha", action=argparse.BooleanOptionalAction, default=True,
        help="require 2 <= alpha <= 3",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[strict], help="solve an instance")
    s.add_argument("instance")
    s.add_argument("-o", "--output", help="schedule file (default: stdout)")
    s.add_argument("--svg", help="write a Gantt chart")
    s.add_argument("--dump-y", help="write Y tables")
    s.add_argument("--dump-o", help="write O tables")
    s.add_argument("--dump-fh", help="write f and h maps")
    s.add_argument("--backend", choices=["cython", "python"], default=None)
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", parents=[strict], help="generate an instance")
    g.add_argument("n", type=int)
    g.add_argument("--mode", choices=["flow", "random"], default="flow")
    g.add_argument("--flow", type=float, default=5.0, help="d_j - r_j in flow mode")
    g.add_argument("--gap", type=float, default=1.0, help="mean release gap in flow mode")
    g.add_argument("--work", type=float, default=1.0, help="workload scale in flow mode")
    g.add_argument("--alpha", type=float, default=3.0)
    g.add_argument("--wake-cost", type=float, default=2.0)
    g.add_argument("--dissipation", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time the solver")
    b.add_argument("--sizes", default="100,200,300,400")
    b.add_argument("--repetitions", type=int, default=5)
    b.add_argument("--backend", choices=["cython", "python", "both"], default="cython")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle-check", parents=[strict], help="cross-check against reference oracles")
    o.add_argument("instance", nargs="?")
    o.add_argument("--campaign", type=int, default=200, help="random instances when no file is given")
    o.add_argument("--max-n", type=int, default=12)
    o.add_argument("--naive-max", type=int, default=12)
    o.add_argument("--grid-max", type=int, default=5)
    o.add_argument("--perturb", type=int, default=200, help="perturbation trials per instance")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--corrupt-y", metavar="I,J", help="add 1 to Y[I,J] before checking (fault injection)")
    o.add_argument("--dump-failing", metavar="PATH")
    o.set_defaults(func=cmd_oracle_check)

    v = sub.add_parser("validate", parents=[strict], help="check a schedule file against an instance")
    v.add_argument("instance")
    v.add_argument("schedule")
    v.add_argument("--boundary", choices=["on-at-both-ends", "infinite-horizon"], default="on-at-both-ends")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    try:
        return args.func(args)
    except NonAgreeableError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NONAGREEABLE
    except InfeasibleError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InstanceError, ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
