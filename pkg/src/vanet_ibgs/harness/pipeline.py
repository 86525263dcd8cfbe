"""End-to-end run: enrol vehicles, sign traffic, verify it in two stages."""

import logging
import queue
import random
import threading
import time
from dataclasses import dataclass, field
from typing import List, Optional

from ..algebra import make_curve_context, make_transparent_context
from ..batchverify import (
    BATCH_FAIL, HASH_FAIL, BatchPolicy, Verdict, batch_finalize, draw_delta, isolate, precompute_item,
)
from ..ibgs import (
    accept_join, group_key, join_issue, keygen_gm, keygen_tsd, keygen_vehicle, pok_prove, setup, sign,
    to_modified, verify_individual_modified, verify_individual_original,
)
from ..opener import RegistrationTable
from ..scheduler import (
    AffineCost, Job, TimedItem, batch_size_sweep, choose_batch_size, dp_max_weight, schedule_metrics,
)
from .forgery import forge_full
from .scenario import Scenario, arrivals as make_arrivals, vehicle_roster

log = logging.getLogger(__name__)

TSD_ID = b"tsd-0"
SCHEDULE_WINDOW = 8
SWEEP_PREFIX = 16
FALLBACK_BATCH = 8
QUEUE_DEPTH = 64


@dataclass
class World:
    params: object
    tea: object
    gms: dict
    opener: object
    creds: dict
    table: RegistrationTable


@dataclass
class BenchRow:
    mode: str
    n: int
    pairings: int
    wall_s: float
    accepted: int
    rejected: int
    false_accepts: int
    batch_size: int


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)
    verdicts: List[Verdict] = field(default_factory=list)
    sweep: list = field(default_factory=list)
    batches: int = 0
    audit_mismatches: Optional[int] = None


def make_context(backend: str, seed: int):
    if backend == "transparent":
        return make_transparent_context(seed)
    if backend.startswith("curve"):
        _, _, curve_id = backend.partition(":")
        return make_curve_context(curve_id or "bn254")
    raise ValueError(f"unknown backend {backend!r}")


def build_world(sc: Scenario) -> World:
    ctx = make_context(sc.backend, sc.seed)
    rng = random.Random(f"world:{sc.seed}")
    params, tea = setup(ctx, rng)
    gms = {gid: keygen_gm(params, tea, gid, rng) for gid, _ in sc.groups}
    opener = keygen_tsd(params, tea, TSD_ID)
    table = RegistrationTable(ctx)
    creds = {}
    for vid, gid in vehicle_roster(sc):
        vk = keygen_vehicle(params, tea, vid)
        nonce = rng.randbytes(16)
        resp, _ = join_issue(gms[gid], params, vk.ID_V, pok_prove(params, vk, nonce, rng), rng, table)
        creds[vid] = accept_join(params, vk, resp, gid)
    return World(params, tea, gms, opener, creds, table)


def sign_traffic(world: World, sc: Scenario, arrivals):
    """Full signatures and the ``(trimmed signature, message)`` each verifier sees."""
    params = world.params
    full, wire = [], []
    for i, a in enumerate(arrivals):
        rng = random.Random(f"sign:{sc.seed}:{i}")
        cred = world.creds[a.vehicle]
        if a.forged:
            kind = rng.choice(["bad_credential", "tampered_message"])
            s, msg = forge_full(params, cred, TSD_ID, a.group, a.message, rng, kind)
        else:
            s, msg = sign(params, cred, TSD_ID, a.group, a.message, rng), a.message
        full.append(s)
        wire.append((to_modified(s), msg))
    return full, wire


def part1_order(sc: Scenario, arrivals):
    """Order of part-1 work and each signature's part-1 completion tick.

    Arrivals are taken in windows; inside a window the on-time set chosen by
    :func:`dp_max_weight` runs first, the rest follow by due time.
    """
    order = []
    for lo in range(0, len(arrivals), SCHEDULE_WINDOW):
        idx = range(lo, min(lo + SCHEDULE_WINDOW, len(arrivals)))
        jobs = [Job(i, arrivals[i].tick, arrivals[i].due, sc.p_ticks, arrivals[i].weight) for i in idx]
        chosen, res = dp_max_weight(jobs, drop_infeasible=True)
        rest = sorted((j for j in jobs if j.id not in chosen), key=lambda j: (j.d, j.id))
        order.extend(res.order + [j.id for j in rest])
    timing = schedule_metrics(
        [Job(i, a.tick, a.due, sc.p_ticks, a.weight) for i, a in enumerate(arrivals)], order
    )
    return order, timing.C


def _pick_batch_size(world, sc, arrivals, wire, order, completion, rng):
    if sc.batch_size != "auto":
        return sc.batch_size, []
    params = world.params
    first_group = arrivals[order[0]].group
    S = group_key(params, world.gms[first_group].C, first_group)
    stream = []
    for i in order:
        if arrivals[i].group != first_group:
            continue
        item = precompute_item(params, *wire[i], draw_delta(rng, sc.l), S, TSD_ID)
        if item.hash_ok:
            stream.append(TimedItem(item, completion[i], arrivals[i].due))
        if len(stream) == SWEEP_PREFIX:
            break
    records = batch_size_sweep(params, S, stream, sc.setup_ticks, AffineCost())
    try:
        return choose_batch_size(records, sc.lateness_budget), records
    except ValueError:
        log.warning("batch-size sweep produced no usable record; using b=%d", FALLBACK_BATCH)
        return FALLBACK_BATCH, records


def _run_batch(world, sc, arrivals, wire, order, b, rng):
    """Stage 1 (thread) precomputes in schedule order; stage 2 finalizes."""
    params = world.params
    S_of = {gid: group_key(params, gm.C, gid) for gid, gm in world.gms.items()}
    deltas = [draw_delta(rng, sc.l) for _ in order]
    q = queue.Queue(maxsize=QUEUE_DEPTH)
    failure = []

    def producer():
        try:
            for i, delta in zip(order, deltas):
                gid = arrivals[i].group
                q.put((i, precompute_item(params, *wire[i], delta, S_of[gid], TSD_ID)))
        except Exception as exc:  # surfaced by the consumer
            failure.append(exc)
        finally:
            q.put(None)

    verdicts = {}
    pending = {gid: [] for gid in S_of}
    batches = 0

    def flush(gid):
        nonlocal batches
        batch = pending[gid]
        if not batch:
            return
        pending[gid] = []
        batches += 1
        bad = set(isolate(params, [it for _, it in batch], S_of[gid]))
        for pos, (i, _) in enumerate(batch):
            verdicts[i] = Verdict(i, pos not in bad, BATCH_FAIL if pos in bad else None, gid, sc.l)

    worker = threading.Thread(target=producer, name="verify-part1", daemon=True)
    worker.start()
    while (got := q.get()) is not None:
        i, item = got
        gid = arrivals[i].group
        if not item.hash_ok:
            verdicts[i] = Verdict(i, False, HASH_FAIL, gid, sc.l)
            continue
        pending[gid].append((i, item))
        if len(pending[gid]) >= b:
            flush(gid)
    worker.join()
    if failure:
        raise RuntimeError(f"part-1 stage failed: {failure[0]!r}") from failure[0]
    for gid in pending:
        flush(gid)
    return [verdicts[i] for i in range(len(arrivals))], batches


def _row(mode, arrivals, ok, pairings, wall, b):
    accepted = sum(ok)
    false_acc = sum(1 for a, v in zip(arrivals, ok) if a.forged and v)
    return BenchRow(mode, len(arrivals), pairings, wall, accepted, len(ok) - accepted, false_acc, b)


def run_pipeline(sc: Scenario, arrivals=None, audit=False, modes=("batch",)) -> BenchReport:
    """Sign the scenario's traffic and verify it in each requested mode.

    Modes: ``individual-original``, ``individual-modified``, ``batch``.
    """
    if arrivals is None:
        arrivals = make_arrivals(sc)
    report = BenchReport()
    if not arrivals:
        return report
    world = build_world(sc)
    params, ctx = world.params, world.params.ctx
    full, wire = sign_traffic(world, sc, arrivals)
    rng = random.Random(f"delta:{sc.seed}")

    for mode in modes:
        if mode == "batch":
            order, completion = part1_order(sc, arrivals)
            b, report.sweep = _pick_batch_size(world, sc, arrivals, wire, order, completion, rng)
            ctx.reset_pairing_count()
            t0 = time.perf_counter()
            report.verdicts, report.batches = _run_batch(world, sc, arrivals, wire, order, b, rng)
            wall = time.perf_counter() - t0
            ok = [v.accepted for v in report.verdicts]
            report.rows.append(_row(mode, arrivals, ok, ctx.pairing_count(), wall, b))
        elif mode in ("individual-original", "individual-modified"):
            ctx.reset_pairing_count()
            t0 = time.perf_counter()
            ok = []
            for a, s, (sig, msg) in zip(arrivals, full, wire):
                if mode == "individual-modified":
                    ok.append(verify_individual_modified(params, sig, msg, TSD_ID, a.group))
                else:
                    ok.append(verify_individual_original(params, s, msg, TSD_ID, a.group))
            wall = time.perf_counter() - t0
            report.rows.append(_row(mode, arrivals, ok, ctx.pairing_count(), wall, 1))
        else:
            raise ValueError(f"unknown mode {mode!r}")

    if audit and report.verdicts:
        individual = [
            verify_individual_modified(params, sig, msg, TSD_ID, a.group)
            for a, (sig, msg) in zip(arrivals, wire)
        ]
        report.audit_mismatches = sum(
            1 for v, ind in zip(report.verdicts, individual) if v.accepted != ind
        )
    return report
