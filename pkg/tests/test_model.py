import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import agreeable_instances
from speedpd.dp import solve
from speedpd.model import (
    OFF,
    ON,
    EnergyModel,
    Instance,
    InstanceError,
    InvalidScheduleError,
    Job,
    NonAgreeableError,
    Schedule,
    Segment,
    critical_speed,
    density,
    evaluate_cost,
    g_star,
    is_dense,
    validate_schedule,
)
from speedpd.yds import yds_schedule


@pytest.mark.parametrize(
    "alpha,g,s,gs", [(2.0, 1.0, 1.0, 2.0), (3.0, 2.0, 1.0, 3.0), (2.0, 4.0, 2.0, 4.0)]
)
def test_critical_speed_and_g_star(alpha, g, s, gs):
    m = EnergyModel(alpha, 1.0, g)
    assert critical_speed(m) == pytest.approx(s, rel=1e-15)
    assert g_star(m) == pytest.approx(gs, rel=1e-15)
    assert m.energy_per_work(m.critical_speed) == pytest.approx(gs, rel=1e-15)


@given(
    st.floats(1.1, 4.0), st.floats(0.01, 10.0), st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=100)
)
def test_g_star_is_minimum_energy_per_work(alpha, g, speeds):
    m = EnergyModel(alpha, 1.0, g)
    for s in speeds:
        assert (s**alpha + g) / s >= m.g_star - 1e-12 * m.g_star


@pytest.mark.parametrize("alpha,L,g", [(1.0, 1.0, 1.0), (2.0, 0.0, 1.0), (2.0, 1.0, 0.0), (2.0, -1.0, 1.0)])
def test_model_rejects_bad_parameters(alpha, L, g):
    with pytest.raises(InstanceError):
        EnergyModel(alpha, L, g)


def test_strict_alpha_range():
    EnergyModel(1.5, 1.0, 1.0)
    with pytest.raises(InstanceError):
        EnergyModel(1.5, 1.0, 1.0, strict=True)
    EnergyModel(2.0, 1.0, 1.0, strict=True)
    EnergyModel(3.0, 1.0, 1.0, strict=True)


def test_job_validation():
    with pytest.raises(InstanceError):
        Job(1, 0.0, 1.0, 0.0)
    with pytest.raises(InstanceError):
        Job(1, 1.0, 1.0, 1.0)


def test_instance_agreeable_and_sentinels():
    m = EnergyModel(2.0, 3.0, 1.5)
    inst = Instance.from_triples(m, [(0, 2, 1), (0, 2, 1), (1, 5, 1)])
    assert [j.id for j in inst.jobs] == [1, 2, 3]
    assert inst.d0 == pytest.approx(-2.0)
    assert inst.r_end == pytest.approx(7.0)
    with pytest.raises(NonAgreeableError):
        Instance.from_triples(m, [(0, 5, 1), (1, 3, 1)])


def test_subinstance_restriction_and_infeasibility():
    m = EnergyModel(2.0, 1.0, 1.0)
    inst = Instance.from_triples(m, [(0, 2, 1), (1, 3, 1), (2, 4, 1), (5, 6, 1)])
    sub = inst.subinstance(2, 3)
    assert sub.interval == (2.0, 5.0)
    assert [(j.release, j.deadline) for j in sub.jobs] == [(2.0, 3.0), (2.0, 4.0)]
    assert not sub.infeasible
    # d_{i-1} >= d_i
    tie = Instance.from_triples(m, [(0, 2, 1), (1, 2, 1)])
    assert tie.subinstance(2, 2).infeasible
    # r_j >= r_{j+1}
    tie = Instance.from_triples(m, [(0, 2, 1), (0, 3, 1)])
    assert tie.subinstance(1, 1).infeasible
    assert inst.subinstance(2, 1).jobs == ()


def test_density_examples():
    jobs = [Job(1, 1.0, 3.0, 4.0), Job(2, 0.0, 4.0, 2.0)]
    assert density(jobs, 0.0, 4.0) == pytest.approx(1.5)
    assert density([Job(1, 0.0, 2.0, 2.0)], 0.0, 2.0) == pytest.approx(1.0)
    assert density(jobs, 5.0, 6.0) == 0.0
    assert is_dense(EnergyModel(2.0, 1.0, 1.0), 1.0)
    assert not is_dense(EnergyModel(2.0, 1.0, 1.0), 0.999)


def test_cost_of_empty_schedule_both_variants():
    m = EnergyModel(2.0, 5.0, 1.0)
    off = Schedule([Segment(0.0, 3.0, OFF)], (0.0, 3.0))
    idle = Schedule([Segment(0.0, 3.0, ON)], (0.0, 3.0))
    assert evaluate_cost(m, off).mode_cost == 5.0
    assert evaluate_cost(m, idle).mode_cost == 3.0


def test_cost_infinite_horizon_single_run():
    m = EnergyModel(2.0, 7.0, 1.0)
    s = Schedule([Segment(0.0, 2.0, ON, 1.0, 1)], (0.0, 2.0))
    c = evaluate_cost(m, s, "infinite-horizon", jobs=[Job(1, 0.0, 2.0, 2.0)])
    assert c.speed_cost == 2.0
    assert c.wakeups == 2
    assert c.mode_cost == 2 * 7.0 + 2 * 1.0
    assert c.total == c.speed_cost + c.mode_cost


def test_worked_schedule_cost(worked):
    sol = solve(worked)
    assert evaluate_cost(worked, sol.schedule).total == pytest.approx(22.0, abs=1e-12)


def test_validator_reports_window_and_work_violations():
    jobs = [Job(1, 1.0, 3.0, 2.0)]
    outside = Schedule.build([Segment(0.0, 2.0, ON, 1.0, 1)], (0.0, 3.0))
    props = {v.prop for v in validate_schedule(jobs, outside)}
    assert "property 3" in props
    short = Schedule.build([Segment(1.0, 2.5, ON, 1.0, 1)], (0.0, 3.0))
    props = {v.prop for v in validate_schedule(jobs, short)}
    assert props == {"property 4"}
    with pytest.raises(InvalidScheduleError):
        evaluate_cost(EnergyModel(2.0, 1.0, 1.0), short, jobs=jobs)


def test_validator_structural_checks():
    jobs = [Job(1, 0.0, 3.0, 1.0)]
    cases = [
        [Segment(0.0, 1.0, OFF, 1.0, 1), Segment(1.0, 3.0, ON)],  # running while off
        [Segment(0.0, 1.0, ON, 0.0, 1), Segment(1.0, 3.0, ON)],  # job at zero speed
        [Segment(0.0, 1.0, ON, 1.0, None), Segment(1.0, 3.0, ON)],  # speed without job
        [Segment(0.0, 1.0, ON, 1.0, 1), Segment(1.5, 3.0, ON)],  # hole
    ]
    for segs in cases:
        assert validate_schedule(jobs, Schedule(segs, (0.0, 3.0)))


def test_yds_output_validates():
    jobs = [Job(1, 0.0, 4.0, 2.0), Job(2, 1.0, 3.0, 4.0)]
    from speedpd.model import Subinstance

    sub = Subinstance(EnergyModel(2.0, 1.0, 1.0), tuple(jobs), 0.0, 4.0)
    sched, _ = yds_schedule(sub)
    assert validate_schedule(jobs, sched) == []


@settings(max_examples=60, deadline=None)
@given(agreeable_instances(max_n=10))
def test_sentinel_consistency(inst):
    """Both-ends-on cost over the padded horizon equals the infinite-horizon cost inside."""
    sol = solve(inst)
    padded = evaluate_cost(inst, sol.schedule).total
    runs = sol.schedule.runs()
    a, b = runs[0][1], max(r[2] for r in runs)
    inner = sol.schedule.restrict(a, b)
    inf = evaluate_cost(inst.model, inner, "infinite-horizon").total
    assert padded == pytest.approx(inf, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(agreeable_instances(max_n=8), st.floats(0.0, 1.0))
def test_cost_additive_at_on_boundary(inst, frac):
    sched = solve(inst).schedule
    cuts = [
        s.start for k, s in enumerate(sched.segments) if k and s.mode == ON and sched.segments[k - 1].mode == ON
    ]
    if not cuts:
        return
    t = cuts[int(frac * (len(cuts) - 1))]
    x0, x1 = sched.horizon
    whole = evaluate_cost(inst.model, sched).total
    parts = evaluate_cost(inst.model, sched.restrict(x0, t)).total + evaluate_cost(
        inst.model, sched.restrict(t, x1)
    ).total
    assert whole == pytest.approx(parts, rel=1e-12)


def test_instance_reversal_is_agreeable(rng):
    from speedpd.oracle import random_instance

    inst = random_instance(rng, 8)
    rev = inst.reversed()
    assert [j.workload for j in rev.jobs] == [j.workload for j in reversed(inst.jobs)]
    assert rev.d0 == pytest.approx(-inst.r_end)
