import io
import math
import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TSD, enrol
from vanet_ibgs.batchverify import precompute_item
from vanet_ibgs.harness.forgery import forge
from vanet_ibgs.ibgs import group_key, sign, to_modified
from vanet_ibgs.scheduler import (
    AffineCost, BatchSizeRecord, Job, TimedItem, batch_size_sweep, brute_force_oracle, choose_batch_size,
    dp_max_weight, load_jobs, schedule_metrics, time_points, write_sweep_csv,
)

TABLE_JOBS = [Job(1, 1, 3, 2), Job(2, 2, 6, 2), Job(3, 3, 4, 2), Job(4, 8, 11, 2)]


def test_worked_example_table():
    res = schedule_metrics(TABLE_JOBS, [1, 3, 2, 4])
    assert [res.C[j] for j in (1, 2, 3, 4)] == [3, 7, 5, 10]
    assert [res.L[j] for j in (1, 2, 3, 4)] == [0, 1, 1, -1]
    assert [res.U[j] for j in (1, 2, 3, 4)] == [0, 1, 1, 0]
    assert res.C_max == 10 and res.L_max == 1


def test_metrics_edge_cases():
    res = schedule_metrics([Job(1, 0, 5, 2)], [1])
    assert (res.C[1], res.L[1], res.U[1]) == (2, -3, 0)
    empty = schedule_metrics(TABLE_JOBS, [])
    assert empty.order == [] and empty.C_max == 0 and empty.L_max is None
    with pytest.raises(KeyError):
        schedule_metrics(TABLE_JOBS, [9])
    with pytest.raises(ValueError):
        schedule_metrics(TABLE_JOBS, [1, 1])


def test_time_points():
    T = time_points([Job(1, 0, 9, 2), Job(2, 3, 9, 2)])
    assert T == [0, 2, 3, 5]
    assert len(time_points(TABLE_JOBS)) <= len(TABLE_JOBS) ** 2


def test_dp_small_cases():
    w, res = dp_max_weight([Job(1, 0, 1, 1, 5)])
    assert w == {1} and res.start[1] == 0 and res.weight_on_time == 5
    jobs = [Job(1, 1, 3, 2), Job(2, 2, 6, 2), Job(3, 8, 11, 2)]
    chosen, res = dp_max_weight(jobs)
    assert chosen == {1, 2, 3} and res.weight_on_time == 3 == brute_force_oracle(jobs)
    assert dp_max_weight([])[0] == set()


def test_dp_window_reaches_past_last_time_point():
    jobs = [Job(1, 0, 2, 1), Job(2, 0, 2, 1)]
    chosen, res = dp_max_weight(jobs)
    assert res.weight_on_time == 2 == brute_force_oracle(jobs)


def test_dp_rejects_or_filters_infeasible_jobs():
    jobs = TABLE_JOBS
    with pytest.raises(ValueError, match="3"):
        dp_max_weight(jobs)
    chosen, _ = dp_max_weight(jobs, drop_infeasible=True)
    assert 3 not in chosen
    with pytest.raises(ValueError):
        dp_max_weight([Job(1, 0, 5, 1), Job(2, 0, 5, 2)])


def test_oracle_edges():
    assert brute_force_oracle([]) == 0
    assert brute_force_oracle([Job(1, 3, 4, 2)]) == 0
    with pytest.raises(ValueError):
        brute_force_oracle([Job(i, 0, 100, 1) for i in range(11)])


job_sets = st.integers(1, 4).flatmap(lambda p: st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 3 * p + 6), st.integers(0, 9)), min_size=0, max_size=8,
).map(lambda rows: [Job(i, r, r + p + slack, p, w) for i, (r, slack, w) in enumerate(rows)]))


@settings(max_examples=300, deadline=None)
@given(jobs=job_sets)
def test_dp_matches_oracle_and_is_feasible(jobs):
    chosen, res = dp_max_weight(jobs)
    assert res.weight_on_time == brute_force_oracle(jobs)
    T = set(time_points(jobs))
    by_id = {j.id: j for j in jobs}
    assert set(res.order) == chosen
    prev_end = None
    for jid in res.order:
        s, j = res.start[jid], by_id[jid]
        assert s in T and s >= j.r and res.U[jid] == 0
        assert prev_end is None or s >= prev_end
        prev_end = s + j.p
    assert sum(by_id[j].w for j in chosen) == res.weight_on_time


def test_dp_operation_count_is_polynomial():
    rng = random.Random(3)
    ratios = []
    for n in range(4, 13):
        jobs = []
        for i in range(n):
            r = rng.randrange(0, 3 * n)
            jobs.append(Job(i, r, r + 2 + rng.randrange(0, 4 * n), 2, rng.randrange(1, 10)))
        stats = {}
        dp_max_weight(jobs, stats=stats)
        ratios.append(stats["ops"] / n ** 7)
    assert max(ratios) <= 1.0
    assert ratios[-1] <= ratios[0]


def test_load_jobs(tmp_path):
    path = tmp_path / "jobs.txt"
    path.write_text("# id r d p w\n1 1 3 2 1\n2 2 6 2\n\n3 8 11 2 4  # heavy\n")
    assert load_jobs(str(path)) == [Job(1, 1, 3, 2, 1), Job(2, 2, 6, 2, 1), Job(3, 8, 11, 2, 4)]
    path.write_text("1 2 3\n")
    with pytest.raises(ValueError, match=":1"):
        load_jobs(str(path))
    path.write_text("1 2 x 4\n")
    with pytest.raises(ValueError, match="non-integer"):
        load_jobs(str(path))


# ---------------------------------------------------------------- sweep

FLEET = enrol(seed=51, vehicles=4)
GM = b"gm-0"
S = group_key(FLEET.params, FLEET.gm.C, GM)


def stream(n, forged_at=None):
    out = []
    for i in range(n):
        msg = b"sweep %d" % i
        if i == forged_at:
            sig, msg = forge(FLEET.params, FLEET.creds[0], TSD, GM, msg, random.Random(i), "bad_credential")
        else:
            sig = to_modified(sign(FLEET.params, FLEET.creds[i % 4], TSD, GM, msg, random.Random(i)))
        item = precompute_item(FLEET.params, sig, msg, 1000 + i, S, TSD)
        out.append(TimedItem(item, completion=2 * (i + 1), due=10 + 3 * i))
    return out


def test_sweep_honest():
    recs = batch_size_sweep(FLEET.params, S, stream(8), setup_time=1, timing=AffineCost(3, 0.5))
    assert [r.b for r in recs] == list(range(2, 9))
    assert all(r.status == "ok" for r in recs)
    assert all(a.b_t <= b.b_t for a, b in zip(recs, recs[1:]))
    r = recs[2]
    assert r.b_t == 3 + 0.5 * 4
    assert r.C_max_b == 1 + r.b_t + 8
    assert r.L_max_b == r.C_max_b - 10


def test_sweep_measured_clock_and_pairings():
    ctx = FLEET.ctx
    s = stream(5)
    ctx.reset_pairing_count()
    recs = batch_size_sweep(FLEET.params, S, s, setup_time=0)
    assert ctx.pairing_count() == 3 * len(recs)
    assert all(r.b_t >= 0 for r in recs)


def test_sweep_stops_at_forgery():
    recs = batch_size_sweep(FLEET.params, S, stream(8, forged_at=2), 1, AffineCost())
    assert [r.b for r in recs] == [2, 3]
    assert [r.status for r in recs] == ["ok", "batch_error"]


def test_sweep_small_inputs():
    assert [r.b for r in batch_size_sweep(FLEET.params, S, stream(2), 0, AffineCost())] == [2]
    assert batch_size_sweep(FLEET.params, S, stream(1), 0, AffineCost()) == []
    assert batch_size_sweep(FLEET.params, S, [], 0, AffineCost()) == []


def test_choose_batch_size():
    recs = [BatchSizeRecord(2, 1, 5, -1, 1), BatchSizeRecord(3, 1, 6, 0, 1), BatchSizeRecord(4, 1, 8, 2, 1)]
    assert choose_batch_size(recs) == 4
    assert choose_batch_size(recs, math.inf) == 4
    assert choose_batch_size(recs, 0) == 3
    with pytest.warns(RuntimeWarning):
        assert choose_batch_size(recs, -5) == 2
    with pytest.raises(ValueError):
        choose_batch_size([BatchSizeRecord(2, 1, 5, -1, 1, "batch_error")])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        choose_batch_size(recs, 10)


def test_sweep_csv():
    buf = io.StringIO()
    write_sweep_csv([BatchSizeRecord(2, 4.0, 16.0, -289.0, 1.0)], buf)
    assert buf.getvalue() == "b,b_t,C_max_b,L_max_b,status\n2,4,16,-289,ok\n"
