"""Scheduling of verification work on one machine.

* :func:`schedule_metrics` times a fixed order and reports lateness figures.
* :func:`dp_max_weight` solves 1 | r_i; p_j = p | sum w_i U_i exactly with the
  O(n^7) interval dynamic program over the time points r_i + l*p.
* :func:`brute_force_oracle` is an independent subset enumeration for small n.
* :func:`batch_size_sweep` grows the part-2 batch one signature at a time and
  records completion time and lateness for each batch size.
"""

import bisect
import csv
import time
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .batchverify import BatchItem, batch_sides


@dataclass(frozen=True)
class Job:
    id: int
    r: int
    d: int
    p: int
    w: int = 1


@dataclass
class ScheduleResult:
    order: List[int]
    start: Dict[int, int] = field(default_factory=dict)
    C: Dict[int, int] = field(default_factory=dict)
    L: Dict[int, int] = field(default_factory=dict)
    U: Dict[int, int] = field(default_factory=dict)
    C_max: int = 0
    L_max: Optional[int] = None
    weight_on_time: int = 0


def _by_id(jobs) -> Dict[int, Job]:
    table = {}
    for j in jobs:
        if j.id in table:
            raise ValueError(f"duplicate job id {j.id}")
        table[j.id] = j
    return table


def _timed(table, order, starts) -> ScheduleResult:
    res = ScheduleResult(list(order))
    for jid in order:
        job = table[jid]
        s = starts[jid]
        res.start[jid] = s
        res.C[jid] = s + job.p
        res.L[jid] = res.C[jid] - job.d
        res.U[jid] = 0 if res.C[jid] <= job.d else 1
        if not res.U[jid]:
            res.weight_on_time += job.w
    if order:
        res.C_max = max(res.C.values())
        res.L_max = max(res.L.values())
    return res


def schedule_metrics(jobs: Sequence[Job], order: Sequence[int]) -> ScheduleResult:
    """Run jobs in ``order``, each as early as its release and the machine allow."""
    table = _by_id(jobs)
    starts, clock = {}, None
    for jid in order:
        if jid not in table:
            raise KeyError(f"unknown job id {jid}")
        if jid in starts:
            raise ValueError(f"job {jid} appears twice in the order")
        job = table[jid]
        starts[jid] = job.r if clock is None else max(clock, job.r)
        clock = starts[jid] + job.p
    return _timed(table, order, starts)


def time_points(jobs: Sequence[Job]) -> List[int]:
    """Sorted T = {r_i + l*p : i = 1..n, l = 0..n-1}."""
    n = len(jobs)
    if not n:
        return []
    p = jobs[0].p
    return sorted({j.r + l * p for j in jobs for l in range(n)})


def _admit(jobs, drop_infeasible):
    jobs = list(jobs)
    if jobs and len({j.p for j in jobs}) != 1:
        raise ValueError("all jobs must share one processing time p")
    bad = [j for j in jobs if j.r + j.p > j.d]
    if bad and not drop_infeasible:
        ids = ", ".join(str(j.id) for j in bad)
        raise ValueError(f"jobs with r + p > d cannot be on time: {ids}")
    for j in jobs:
        if j.r < 0 or j.p < 1 or j.w < 0:
            raise ValueError(f"job {j.id}: need r >= 0, p >= 1, w >= 0")
    return [j for j in jobs if j.r + j.p <= j.d]


def dp_max_weight(jobs: Sequence[Job], drop_infeasible: bool = False, stats: Optional[dict] = None):
    """Maximum total weight of jobs completed by their due times.

    Jobs are indexed by non-decreasing due time; W(k, s, e) is the best weight
    using jobs 1..k released in [s, e) when the machine is busy only within
    [s + p, e).  The top-level window is [min T - p, max T + p).

    Returns ``(selected ids, ScheduleResult)``.  If ``stats`` is a dict, the
    number of inner-loop evaluations is stored under ``"ops"``.
    """
    jobs = sorted(_admit(jobs, drop_infeasible), key=lambda j: (j.d, j.id))
    if not jobs:
        return set(), ScheduleResult([])
    p = jobs[0].p
    T = time_points(jobs)
    memo = {}
    ops = 0

    def W(k, s, e):
        nonlocal ops
        if k == 0:
            return 0
        key = (k, s, e)
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        job = jobs[k - 1]
        best, choice = W(k - 1, s, e), None
        if s <= job.r < e:
            lo = bisect.bisect_left(T, max(job.r, s + p))
            hi = bisect.bisect_right(T, min(job.d, e) - p)
            for s2 in T[lo:hi]:
                ops += 1
                val = job.w + W(k - 1, s, s2) + W(k - 1, s2, e)
                if val > best:
                    best, choice = val, s2
        memo[key] = (best, choice)
        return best

    n = len(jobs)
    root = (T[0] - p, T[-1] + p)
    W(n, *root)

    starts = {}
    stack = [(n, *root)]
    while stack:
        k, s, e = stack.pop()
        if k == 0:
            continue
        _, choice = memo[(k, s, e)]
        if choice is None:
            stack.append((k - 1, s, e))
        else:
            starts[jobs[k - 1].id] = choice
            stack.append((k - 1, s, choice))
            stack.append((k - 1, choice, e))
    if stats is not None:
        stats["ops"] = ops
        stats["states"] = len(memo)
    order = sorted(starts, key=starts.get)
    return set(starts), _timed(_by_id(jobs), order, starts)


def brute_force_oracle(jobs: Sequence[Job]) -> int:
    """Max on-time weight by enumerating every subset (n <= 10).

    For each subset the earliest finishing on-time sequence is found by a
    dynamic program over subsets; jobs with r + p > d are dropped.
    """
    jobs = list(jobs)
    if len(jobs) > 10:
        raise ValueError("brute force oracle is limited to n <= 10")
    jobs = [j for j in jobs if j.r + j.p <= j.d]
    n = len(jobs)
    INF = float("inf")
    finish = [INF] * (1 << n)
    finish[0] = float("-inf")
    best = 0
    for mask in range(1, 1 << n):
        for i in range(n):
            bit = 1 << i
            if not mask & bit or finish[mask ^ bit] == INF:
                continue
            j = jobs[i]
            c = max(finish[mask ^ bit], j.r) + j.p
            if c <= j.d and c < finish[mask]:
                finish[mask] = c
        if finish[mask] < INF:
            best = max(best, sum(jobs[i].w for i in range(n) if mask >> i & 1))
    return best


def load_jobs(path) -> List[Job]:
    """Job file: one ``id r d p w`` line per job; ``#`` starts a comment."""
    jobs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (4, 5):
                raise ValueError(f"{path}:{lineno}: expected 'id r d p [w]'")
            try:
                jobs.append(Job(*(int(x) for x in parts)))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer field") from None
    return jobs


# ---------------------------------------------------------------- part 2 sweep


@dataclass(frozen=True)
class TimedItem:
    """A part-1 result with its completion time C_i and due time d_i."""

    item: BatchItem
    completion: float
    due: float


@dataclass(frozen=True)
class BatchSizeRecord:
    b: int
    b_t: float
    C_max_b: float
    L_max_b: float
    s_b: float
    status: str = "ok"


@dataclass(frozen=True)
class AffineCost:
    """Deterministic batch cost ``base + per_item * b`` (ticks)."""

    base: float = 3.0
    per_item: float = 0.5

    def __call__(self, b, elapsed):
        return self.base + self.per_item * b


def measured_cost(b, elapsed):
    return elapsed


def batch_size_sweep(params, S, stream: Sequence[TimedItem], setup_time: float, timing=measured_cost):
    """Try batch sizes b = 2..n over one group's part-1 results.

    The five part-1 queues (M, B, K, Q, nu) are filled from ``stream``; each
    step pops one more entry into the window, evaluates the three-pairing
    right-hand side ``eta`` and ``mu = prod M_i``, and on success pushes
    ``eta`` onto P and records ``C_max_b = s_b + b_t + C_max`` and
    ``L_max_b = C_max_b - d_1`` (d_1 the earliest due time in the window).
    A mismatch records a ``batch_error`` for that b and ends the sweep.

    ``timing(b, elapsed_seconds)`` gives b_t; the default reports wall time.
    """
    Mq, Bq, Kq, Qq, Vq, meta = deque(), deque(), deque(), deque(), deque(), deque()
    P = deque()
    for ti in stream:
        if not ti.item.hash_ok:
            raise ValueError("sweep input must have passed the part-1 hash check")
        Mq.append(ti.item.M)
        Bq.append(ti.item.B)
        Kq.append(ti.item.K)
        Qq.append(ti.item.Q)
        Vq.append(ti.item.nu)
        meta.append(ti)
    window = {"M": [], "B": [], "K": [], "Q": [], "V": [], "meta": []}

    def pop():
        window["M"].append(Mq.popleft())
        window["B"].append(Bq.popleft())
        window["K"].append(Kq.popleft())
        window["Q"].append(Qq.popleft())
        window["V"].append(Vq.popleft())
        window["meta"].append(meta.popleft())

    records = []
    if Mq:
        pop()
    while Mq:
        pop()
        b = len(window["M"])
        t0 = time.perf_counter()
        mu, eta = batch_sides(params, window["M"], window["B"], window["K"], window["Q"], window["V"], S)
        elapsed = time.perf_counter() - t0
        b_t = timing(b, elapsed)
        c_max = max(m.completion for m in window["meta"])
        d_1 = min(m.due for m in window["meta"])
        C_max_b = setup_time + b_t + c_max
        if mu != eta:
            records.append(BatchSizeRecord(b, b_t, C_max_b, C_max_b - d_1, setup_time, "batch_error"))
            break
        P.append(eta)
        records.append(BatchSizeRecord(b, b_t, C_max_b, C_max_b - d_1, setup_time))
    return records


def choose_batch_size(records: Sequence[BatchSizeRecord], max_lateness_budget: float = float("inf")) -> int:
    """Largest b whose L_max_b fits the budget (ties: smaller C_max_b)."""
    ok = [r for r in records if r.status == "ok"]
    if not ok:
        raise ValueError("no successful batch-size records")
    feasible = [r for r in ok if r.L_max_b <= max_lateness_budget]
    if not feasible:
        smallest = min(ok, key=lambda r: r.b)
        warnings.warn(
            f"no batch size meets lateness budget {max_lateness_budget}; using b={smallest.b}",
            RuntimeWarning,
            stacklevel=2,
        )
        return smallest.b
    return max(feasible, key=lambda r: (r.b, -r.C_max_b)).b


SWEEP_HEADER = ["b", "b_t", "C_max_b", "L_max_b", "status"]


def write_sweep_csv(records, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in records:
        w.writerow([r.b, f"{r.b_t:.6g}", f"{r.C_max_b:.6g}", f"{r.L_max_b:.6g}", r.status])
