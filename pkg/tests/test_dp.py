import numpy as np
import pytest
from hypothesis import given, settings

from conftest import agreeable_instances
from speedpd.dp import compute_f, compute_fh, compute_h, dp_solve, reconstruct, solve
from speedpd.model import OFF, ON, EnergyModel, Instance, evaluate_cost, validate_schedule
from speedpd.oracle import _PairView, random_instance
from speedpd.squeeze import build_y_table


def test_worked_instance(worked):
    sub = worked.as_subinstance()
    yt = build_y_table(sub)
    ot = dp_solve(sub, yt)
    assert ot.O[1, 1] == pytest.approx(22.0, abs=1e-12)
    assert ot.O[2, 1] == pytest.approx(10.0)
    # case 2 ties with case 3 at 22; lowest case wins
    assert ot.case[1, 1] == 2
    sol = solve(worked)
    assert sol.total == pytest.approx(22.0, abs=1e-12)
    runs = sol.schedule.runs()
    assert runs == [(1, 1.0, 2.0, 1.0)]


def _inst(triples, alpha=2.0, L=10.0, g=1.0):
    return Instance.from_triples(EnergyModel(alpha, L, g), triples)


def test_f_examples():
    f, f_inv = compute_f(_inst([(0, 10, 2), (1, 11, 1), (5, 20, 1)]).as_subinstance())
    assert f == {1: 2, 3: 3}
    assert f_inv == {2: 1, 3: 3}
    f, _ = compute_f(_inst([(0, 4, 1)]).as_subinstance())
    assert f == {1: 1}
    f, _ = compute_f(_inst([(0, 4, 1), (0, 5, 1), (0, 6, 1)]).as_subinstance())
    assert f == {1: 3}


def test_h_examples():
    assert compute_h(_inst([(0, 4, 1)]).as_subinstance()) == {1: 1}
    assert compute_h(_inst([(0, 10, 1), (0, 10.5, 1)]).as_subinstance())[1] == 2
    assert compute_h(_inst([(0, 10, 1), (0, 12, 1)]).as_subinstance())[1] == 1
    h = compute_h(_inst([(0, 9, 1), (1, 9, 1), (2, 9, 1)]).as_subinstance())
    assert h == {1: 3, 2: 3, 3: 3}


def test_fh_on_restricted_subinstance():
    inst = _inst([(0, 3, 1), (1, 4, 1), (2, 9, 1), (6, 10, 1)])
    fh = compute_fh(inst.subinstance(2, 4))
    assert set(fh.h) == {2, 3, 4}
    assert all(2 <= v <= 4 for v in fh.f.values())


@settings(max_examples=60, deadline=None)
@given(agreeable_instances(max_n=10))
def test_table_invariants(inst):
    for sub in solve(inst).split.sparse:
        if not sub.jobs:
            continue
        yt = build_y_table(sub)
        ot = dp_solve(sub, yt)
        r, d, _ = sub.arrays()
        L, g = inst.model.wake_cost, inst.model.dissipation
        for i in range(1, sub.m + 2):
            assert ot.O[i, i - 1] == pytest.approx(min(L, g * max(0.0, r[i] - d[i - 1])))
            for j in range(i, sub.m + 1):
                assert ot.O[i, j] <= yt.Y[i, j]


def _check_structure(inst, sol):
    s = inst.model.critical_speed
    sched = sol.schedule
    assert validate_schedule(inst, sched) == []
    ids = [seg.job for seg in sched.segments if seg.job is not None]
    assert ids == sorted(ids)
    speeds = {}
    for seg in sched.segments:
        if seg.job is not None:
            speeds.setdefault(seg.job, set()).add(seg.speed)
    assert all(len(v) == 1 for v in speeds.values())
    dense = sol.split.dense_jobs()
    for job, v in speeds.items():
        if job not in dense:
            assert v.pop() <= s + 1e-9
    for part in sol.parts:
        sub = part.sub
        lo, hi = sub.interval
        segs = sched.restrict(lo, hi).segments
        for k, seg in enumerate(segs):
            if seg.mode != OFF or seg.start == lo or seg.end == hi:
                continue
            before, after = segs[k - 1], segs[k + 1]
            assert before.job is not None and before.speed == pytest.approx(s, rel=1e-12)
            assert after.job is not None and after.speed == pytest.approx(s, rel=1e-12)
        for st in part.trace:
            if st.case in (2, 3, 4):
                pv = _PairView(sub, st.i, st.j)
                if st.case == 2:
                    assert pv.h(st.i, s) == st.c
                    assert st.u == pytest.approx(pv.dl[st.c] - pv.work(st.i, st.c) / s, rel=1e-12, abs=1e-12)
                if st.case == 3:
                    assert pv.f(st.a, s) == st.j
                    assert st.t == pytest.approx(pv.suffix_end(st.a, st.j, s), rel=1e-12, abs=1e-12)
                if st.case == 4:
                    assert pv.f(st.a, s) == st.b
                    assert pv.h(st.b + 1, s) == st.c
                    assert st.t == pytest.approx(pv.suffix_end(st.a, st.b, s), rel=1e-12, abs=1e-12)
                    assert st.u == pytest.approx(pv.dl[st.c] - pv.work(st.b + 1, st.c) / s, rel=1e-12, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(agreeable_instances(max_n=12))
def test_structural_invariants(inst):
    _check_structure(inst, solve(inst))


def test_structural_invariants_random(rng):
    for _ in range(60):
        inst = random_instance(rng, int(rng.integers(1, 25)), integer=bool(rng.integers(2)))
        _check_structure(inst, solve(inst))


def test_monotone_in_wake_cost(rng):
    for _ in range(40):
        inst = random_instance(rng, int(rng.integers(1, 12)))
        m = inst.model
        bigger = Instance(EnergyModel(m.alpha, m.wake_cost * float(rng.uniform(1.01, 5.0)), m.dissipation), inst.jobs)
        assert solve(bigger).total >= solve(inst).total - 1e-9


def test_all_sparse_equals_single_dp():
    inst = _inst([(0, 4, 1), (1, 6, 1), (3, 9, 1)], L=2.0)
    sub = inst.as_subinstance()
    ot = dp_solve(sub)
    assert solve(inst).total == pytest.approx(ot.O[1, 3], rel=1e-12)


def test_all_dense_instance():
    inst = _inst([(0, 1, 3), (1, 2, 2)], L=4.0)
    sol = solve(inst)
    assert not any(sub.jobs for sub in sol.split.sparse)
    # YDS speeds 3 and 2, on for 2 units, powered down on both margins
    assert sol.total == pytest.approx(9 + 4 + 2 * 1.0 + 2 * 4.0)


def test_lookalike_structure():
    inst = _inst([(0, 3, 1), (3, 4, 2), (4.5, 6, 0.5), (20, 22, 1), (21, 25, 1)], L=3.0)
    sol = solve(inst)
    sched = sol.schedule
    s = inst.model.critical_speed
    x0, x1 = sched.horizon
    inner_off = [(a, b) for a, b in sched.off_intervals() if a > x0 and b < x1]
    assert len(inner_off) == 1
    t, u = inner_off[0]
    runs = sched.runs()
    before = [r for r in runs if r[2] <= t]
    after = [r for r in runs if r[1] >= u]
    assert before and after
    assert before[-1][3] == pytest.approx(s) and after[0][3] == pytest.approx(s)
    assert before[0][3] == pytest.approx(s) and after[-1][3] == pytest.approx(s)
    assert any(r[3] > s * 1.5 for r in runs)
    idle_inside = [
        seg for seg in sched.segments if seg.mode == ON and seg.job is None and before[0][1] < seg.start < t
    ]
    assert idle_inside
    assert sol.total == pytest.approx(evaluate_cost(inst, sched).total)


def test_reconstruct_every_pair(rng):
    for _ in range(15):
        inst = random_instance(rng, int(rng.integers(1, 10)))
        sub = inst.as_subinstance()
        ot = dp_solve(sub)
        for i in range(1, sub.m + 1):
            for j in range(i, sub.m + 1):
                if np.isfinite(ot.O[i, j]):
                    sched = reconstruct(sub, ot, i, j)
                    assert evaluate_cost(sub.model, sched).total == pytest.approx(ot.O[i, j], rel=1e-9)
