import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import agreeable_instances
from speedpd import _kernel_py
from speedpd.model import EnergyModel, Instance
from speedpd.oracle import from_scratch_y_table, random_instance, yds_from_scratch_Y
from speedpd.squeeze import (
    SplitSpeedIndex,
    build_y_table,
    compute_first_column_right_to_left,
    compute_row_left_to_right,
    split_speed,
)


def _close(a, b, rel=1e-9):
    if np.isinf(a) or np.isinf(b):
        return a == b
    return abs(a - b) <= rel * max(1.0, abs(b))


def test_split_speed_examples():
    P = [0, 1, 3]
    d = [0, 6]
    assert split_speed(1, 2, 10.0, P, d) == pytest.approx(0.5)
    P = [0, 1, 2, 3]
    d = [0, 2]
    assert split_speed(1, 3, 4.0, P, d) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        split_speed(1, 3, 2.0, P, d)
    with pytest.raises(ValueError):
        split_speed(2, 2, 5.0, P, [0, 1, 1])


@given(st.lists(st.floats(0.1, 5.0), min_size=2, max_size=12), st.data())
def test_split_index_matches_direct_formula(w, data):
    m = len(w)
    P = np.concatenate([[0.0], np.cumsum(w)])
    d = np.concatenate([[0.0], np.cumsum(data.draw(st.lists(st.floats(0.0, 2.0), min_size=m, max_size=m)))])
    b = data.draw(st.integers(2, m))
    u = data.draw(st.floats(0.0, float(d[-1]) + 3.0))
    idx = SplitSpeedIndex(P, d, b, u)
    for k in range(1, b):
        if d[k] < u:
            assert idx.s_hat(k) == split_speed(k, b, u, P, d)
        else:
            assert idx.s_hat(k) == np.inf
    for i in range(1, b):
        k, val = idx.argmin(i)
        cands = [idx.s_hat(q) for q in range(i, b)]
        assert val == min(cands)
        if k >= 0:
            assert idx.s_hat(k) == val


def test_empty_pair_and_lower_bound(rng):
    m = EnergyModel(2.0, 3.0, 1.0)
    inst = Instance.from_triples(m, [(0, 1, 0.5), (4, 6, 0.5)])
    Y = build_y_table(inst.as_subinstance()).Y
    assert Y[2, 1] == pytest.approx(3.0)
    for _ in range(10):
        inst = random_instance(rng, 8)
        sub = inst.as_subinstance()
        r, d, _ = sub.arrays()
        Y = build_y_table(sub).Y
        g = inst.model.dissipation
        for i in range(1, 9):
            for j in range(i, 9):
                assert Y[i, j] >= g * (r[j + 1] - d[i - 1]) - 1e-12


def test_worked_single_job(worked):
    sub = worked.as_subinstance()
    Y = build_y_table(sub).Y
    assert Y[1, 1] == pytest.approx(22.5)
    assert Y[1, 1] == pytest.approx(yds_from_scratch_Y(1, 1, sub))
    assert compute_first_column_right_to_left(sub)[1].speed_cost == pytest.approx(0.5)


def test_merge_fires_first_on_equal_speed_blocks():
    # two abutting unit-speed blocks squeezed from a left boundary at 0.5
    r = np.array([0.5, 0.5, 0.5, 10.0])
    d = np.array([0.5, 4.0, 4.0, 10.0])
    P = np.array([0.0, 1.0, 2.0])
    counts = [0, 0, 0, 0]
    costs, events, _ = _kernel_py.squeeze_row(
        r, d, P, 2.0, 2, np.array([0.0, 1.0]), np.array([1.0, 2.0]), np.array([1, 2]), False, counts
    )
    assert counts[_kernel_py.EV_MERGE] == 1
    assert counts[_kernel_py.EV_SPLIT] == 0
    assert costs[1] == pytest.approx(2.0 * (2.0 / 1.5))


@settings(max_examples=60, deadline=None)
@given(agreeable_instances(max_n=10))
def test_y_table_matches_oracle(inst):
    sub = inst.as_subinstance()
    Y = build_y_table(sub).Y
    ref = from_scratch_y_table(sub)
    for i in range(1, sub.m + 2):
        for j in range(i - 1, sub.m + 1):
            assert _close(Y[i, j], ref[i, j]), (i, j, Y[i, j], ref[i, j])


@settings(max_examples=60, deadline=None)
@given(agreeable_instances(max_n=10, integer=True))
def test_y_table_matches_oracle_with_ties(inst):
    sub = inst.as_subinstance()
    Y = build_y_table(sub).Y
    ref = from_scratch_y_table(sub)
    for i in range(1, sub.m + 2):
        for j in range(i - 1, sub.m + 1):
            assert _close(Y[i, j], ref[i, j]), (i, j, Y[i, j], ref[i, j])


def test_rows_match_oracle_from_seeds(rng):
    for _ in range(20):
        inst = random_instance(rng, int(rng.integers(2, 12)), integer=bool(rng.integers(2)))
        sub = inst.as_subinstance()
        seeds = compute_first_column_right_to_left(sub)
        g = inst.model.dissipation
        r, d, _ = sub.arrays()
        for j, seed in seeds.items():
            assert _close(seed.speed_cost + g * (r[j + 1] - d[0]), yds_from_scratch_Y(1, j, sub))
            row = compute_row_left_to_right(sub, j, seed)
            for i in range(1, j + 1):
                c = row.costs[i]
                y = c + g * (r[j + 1] - d[i - 1]) if np.isfinite(c) else np.inf
                assert _close(y, yds_from_scratch_Y(i, j, sub))


def test_event_count_bound(rng):
    for _ in range(40):
        inst = random_instance(rng, int(rng.integers(1, 40)), integer=bool(rng.integers(2)))
        yt = build_y_table(inst.as_subinstance())
        for j, ev in yt.events.items():
            assert ev <= 3 * j


@settings(max_examples=40, deadline=None)
@given(agreeable_instances(max_n=10))
def test_y_symmetric_under_time_reversal(inst):
    n = inst.n
    Y = build_y_table(inst.as_subinstance()).Y
    Yr = build_y_table(inst.reversed().as_subinstance()).Y
    for i in range(1, n + 2):
        for j in range(i - 1, n + 1):
            assert _close(Yr[n + 1 - j, n + 1 - i], Y[i, j]), (i, j)


def test_restricted_boundaries_match_oracle(rng):
    from speedpd.model import Subinstance

    for _ in range(40):
        inst = random_instance(rng, int(rng.integers(1, 10)), integer=bool(rng.integers(2)))
        r0, r1 = inst.jobs[0].release, inst.jobs[-1].deadline
        lo = float(rng.uniform(inst.d0, r0 + 0.5 * (r1 - r0)))
        hi = float(rng.uniform(max(lo, inst.jobs[-1].release) + 1e-3, inst.r_end))
        sub = Subinstance(inst.model, inst.jobs, lo, hi)
        if sub.infeasible:
            continue
        Y = build_y_table(sub).Y
        ref = from_scratch_y_table(sub)
        for i in range(1, sub.m + 2):
            for j in range(i - 1, sub.m + 1):
                assert _close(Y[i, j], ref[i, j])
