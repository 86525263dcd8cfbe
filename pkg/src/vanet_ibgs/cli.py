"""Command line front end.

Exit status: 0 success, 1 a signature or proof failed to verify, 2 bad input.
"""

import argparse
import dataclasses
import os
import random
import sys

from .algebra import make_curve_context, make_transparent_context
from .batchverify import BatchPolicy, draw_delta, precompute_item, verify_batch
from .harness.pipeline import SWEEP_PREFIX, TSD_ID, build_world, part1_order, run_pipeline, sign_traffic
from .harness.report import emit_report, emit_verdicts, report_text
from .harness.scenario import Scenario, ScenarioError, arrivals as make_arrivals, load_scenario
from .harness.store import Store, StoreError
from .ibgs import (
    JoinError, ModifiedSignature, Signature, accept_join, element_count, group_key, join_issue, keygen_gm,
    keygen_tsd, keygen_vehicle, pok_prove, serialize_signature, setup, sign, to_modified,
    verify_individual_modified, verify_individual_original,
)
from .opener import OpenError, judge, open_signature, revocation_filter
from .scheduler import (
    AffineCost, TimedItem, batch_size_sweep, dp_max_weight, load_jobs, measured_cost, schedule_metrics,
    write_sweep_csv,
)

OK, FAIL, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _rng(args, label):
    if args.seed is None:
        return random.SystemRandom()
    return random.Random(f"cli:{label}:{args.seed}")


def _out(args):
    if args.out in (None, "-"):
        return sys.stdout, False
    return open(args.out, "w", newline=""), True


def _batch_size(text):
    if text == "auto":
        return text
    try:
        b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'auto'") from None
    if b < 1:
        raise argparse.ArgumentTypeError("batch size must be positive")
    return b


def _scenario(args) -> Scenario:
    sc = load_scenario(args.scenario) if args.scenario else Scenario()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.backend is not None:
        overrides["backend"] = args.backend if args.backend != "curve" else f"curve:{args.curve}"
    if args.l is not None:
        overrides["l"] = args.l
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    return dataclasses.replace(sc, **overrides).validate()


# ---------------------------------------------------------------- lifecycle


def cmd_setup(args, store):
    if (args.backend or "transparent") == "transparent":
        ctx = make_transparent_context(args.seed or 0)
    else:
        ctx = make_curve_context(args.curve)
    params, tea = setup(ctx, _rng(args, "setup"))
    store.save_setup(params, tea)
    print(f"setup: {ctx.descriptor()} -> {store.root}")
    return OK


def cmd_keygen(args, store):
    params, tea = store.params(), store.tea()
    if args.role == "gm":
        store.save_gm(keygen_gm(params, tea, args.id, _rng(args, f"gm:{args.id}")))
    elif args.role == "tsd":
        store.save_tsd(keygen_tsd(params, tea, args.id))
    else:
        store.save_vehicle(keygen_vehicle(params, tea, args.id))
    print(f"keygen: {args.role} {args.id}")
    return OK


def cmd_join(args, store):
    params = store.params()
    vk, _, _ = store.vehicle(args.vehicle)
    gm = store.gm(args.gm)
    rng = _rng(args, f"join:{args.vehicle}")
    transcript = pok_prove(params, vk, rng.randbytes(16), rng)
    try:
        resp, record = join_issue(gm, params, vk.ID_V, transcript, rng)
        cred = accept_join(params, vk, resp, gm.ID_R)
    except JoinError as exc:
        print(f"join refused: {exc}", file=sys.stderr)
        return FAIL
    try:
        store.registry().add(record)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    store.save_vehicle(vk, cred, gm.ID_R)
    print(f"join: {args.vehicle} joined {args.gm}")
    return OK


def cmd_sign(args, store):
    params = store.params()
    _, cred, ID_R = store.vehicle(args.vehicle)
    if cred is None:
        raise InputError(f"vehicle {args.vehicle} has not joined a group")
    ID_O = store.tsd().ID_O
    msg = args.message.encode()
    sig = sign(params, cred, ID_O, ID_R, msg, _rng(args, f"sign:{args.vehicle}:{args.message}"))
    if args.modified:
        sig = to_modified(sig)
    if not args.out:
        raise InputError("sign needs --out PATH for the signature bundle")
    store.save_bundle(args.out, sig, msg, ID_R, ID_O)
    print(f"sign: {element_count(sig)} elements, {len(serialize_signature(params.ctx, sig))} bytes -> {args.out}")
    return OK


def cmd_verify(args, store):
    params = store.params()
    sig, msg, ID_R, ID_O = store.bundle(args.bundle)
    ctx = params.ctx
    ctx.reset_pairing_count()
    if args.form == "original":
        if not isinstance(sig, Signature):
            raise InputError("original-form verification needs a full signature")
        ok = verify_individual_original(params, sig, msg, ID_O, ID_R)
    else:
        ok = verify_individual_modified(params, to_modified(sig) if isinstance(sig, Signature) else sig,
                                        msg, ID_O, ID_R)
    print(f"{'accept' if ok else 'reject'} ({ctx.pairing_count()} pairings)")
    return OK if ok else FAIL


def cmd_batch(args, store):
    params = store.params()
    ctx = params.ctx
    entries = [store.bundle(p) for p in args.bundles]
    if not entries:
        raise InputError("no signature bundles given")
    ID_O = entries[0][3]
    if any(e[3] != ID_O for e in entries):
        raise InputError("bundles name different openers")
    id_map = {}
    for sig, _, ID_R, _ in entries:
        id_map[ctx.serialize(sig.C)] = ID_R
    policy = BatchPolicy(l=args.l or 20)
    is_revoked = None
    if os.path.exists(store.path("tsd.json")) and os.path.exists(store.path("revoked.txt")):
        is_revoked = revocation_filter(params, store.tsd(), store.registry(), store.revoked())
    ctx.reset_pairing_count()
    verdicts = verify_batch(params, [(s, m) for s, m, _, _ in entries], policy, _rng(args, "batch"),
                            ID_O=ID_O, ID_R=id_map, is_revoked=is_revoked)
    fh, close = _out(args)
    try:
        emit_verdicts(verdicts, fh)
    finally:
        if close:
            fh.close()
    bad = sum(not v.accepted for v in verdicts)
    print(f"batch: {len(verdicts) - bad} accepted, {bad} rejected, {ctx.pairing_count()} pairings",
          file=sys.stderr)
    return OK if not bad else FAIL


def cmd_open(args, store):
    params = store.params()
    sig, msg, ID_R, _ = store.bundle(args.bundle)
    try:
        found = open_signature(params, store.tsd(), sig, msg, store.registry(), ID_R, _rng(args, "open"))
    except OpenError as exc:
        print(f"open: {exc}", file=sys.stderr)
        return FAIL
    if found is None:
        print("open: no registered vehicle matches", file=sys.stderr)
        return FAIL
    ID_V, proof = found
    if args.out:
        store.save_proof(args.out, ID_V, proof)
    print(ID_V.decode())
    return OK


def cmd_judge(args, store):
    params = store.params()
    sig, msg, _, ID_O = store.bundle(args.bundle)
    claimed, proof = store.proof(args.proof)
    ID_V = args.id.encode() if args.id else claimed
    ok = judge(params, proof, sig, msg, ID_V, ID_O)
    print(f"{'accept' if ok else 'reject'}: {ID_V.decode()}")
    return OK if ok else FAIL


def cmd_revoke(args, store):
    store.revoked().revoke(args.id)
    print(f"revoke: {args.id}")
    return OK


# ---------------------------------------------------------------- scheduling and benches


def cmd_schedule(args, store):
    try:
        jobs = load_jobs(args.jobs)
    except OSError as exc:
        raise InputError(str(exc)) from None
    if args.order:
        res = schedule_metrics(jobs, [int(x) for x in args.order.split(",")])
    else:
        _, res = dp_max_weight(jobs, drop_infeasible=True)
    fh, close = _out(args)
    try:
        fh.write("id,start,C,L,U\n")
        for jid in res.order:
            fh.write(f"{jid},{res.start[jid]},{res.C[jid]},{res.L[jid]},{res.U[jid]}\n")
    finally:
        if close:
            fh.close()
    print(f"C_max={res.C_max} L_max={res.L_max} weight_on_time={res.weight_on_time}", file=sys.stderr)
    return OK


def cmd_sweep(args, store):
    sc = _scenario(args)
    arr = make_arrivals(sc)
    if not arr:
        raise InputError("scenario produced no traffic")
    world = build_world(sc)
    params = world.params
    _, wire = sign_traffic(world, sc, arr)
    order, completion = part1_order(sc, arr)
    gid = arr[order[0]].group
    S = group_key(params, world.gms[gid].C, gid)
    rng = random.Random(f"delta:{sc.seed}")
    stream = []
    for i in order:
        if arr[i].group != gid:
            continue
        item = precompute_item(params, *wire[i], draw_delta(rng, sc.l), S, TSD_ID)
        if item.hash_ok:
            stream.append(TimedItem(item, completion[i], arr[i].due))
        if len(stream) == (args.n or SWEEP_PREFIX):
            break
    timing = measured_cost if args.clock == "measured" else AffineCost()
    records = batch_size_sweep(params, S, stream, sc.setup_ticks, timing)
    fh, close = _out(args)
    try:
        write_sweep_csv(records, fh)
    finally:
        if close:
            fh.close()
    return FAIL if any(r.status != "ok" for r in records) else OK


def cmd_bench(args, store):
    sc = _scenario(args)
    modes = tuple(args.modes.split(","))
    report = run_pipeline(sc, audit=args.audit, modes=modes)
    if args.out:
        emit_report(report, args.out)
    else:
        sys.stdout.write(report_text(report))
    print(f"elements: full={len(Signature.LAYOUT)} modified={len(ModifiedSignature.LAYOUT)}", file=sys.stderr)
    if report.audit_mismatches:
        print(f"audit: {report.audit_mismatches} verdicts differ from individual verification",
              file=sys.stderr)
        return FAIL
    return OK


COMMANDS = {
    "setup": cmd_setup, "keygen": cmd_keygen, "join": cmd_join, "sign": cmd_sign, "verify": cmd_verify,
    "batch": cmd_batch, "open": cmd_open, "judge": cmd_judge, "revoke": cmd_revoke,
    "schedule": cmd_schedule, "sweep": cmd_sweep, "bench": cmd_bench,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", default="ibgs-state", help="key material directory")
    common.add_argument("--backend", choices=["transparent", "curve"])
    common.add_argument("--curve", default="bn254", choices=["bn254", "bls12_381"])
    common.add_argument("--seed", type=int)
    common.add_argument("--l", type=int)
    common.add_argument("--batch-size", type=_batch_size)
    common.add_argument("--audit", action="store_true")
    common.add_argument("--out")
    common.add_argument("--scenario")

    ap = argparse.ArgumentParser(prog="vanet-ibgs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("setup", parents=[common], help="create system parameters")
    p = sub.add_parser("keygen", parents=[common], help="issue a private key")
    p.add_argument("--role", required=True, choices=["gm", "tsd", "vehicle"])
    p.add_argument("--id", required=True)
    p = sub.add_parser("join", parents=[common], help="enrol a vehicle in a group")
    p.add_argument("--vehicle", required=True)
    p.add_argument("--gm", required=True)
    p = sub.add_parser("sign", parents=[common], help="sign a message")
    p.add_argument("--vehicle", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--modified", action="store_true", help="emit the trimmed form")
    p = sub.add_parser("verify", parents=[common], help="verify one signature")
    p.add_argument("bundle")
    p.add_argument("--form", choices=["original", "modified"], default="modified")
    p = sub.add_parser("batch", parents=[common], help="batch-verify signatures")
    p.add_argument("bundles", nargs="+")
    p = sub.add_parser("open", parents=[common], help="trace a signature to its signer")
    p.add_argument("bundle")
    p = sub.add_parser("judge", parents=[common], help="check an opening proof")
    p.add_argument("bundle")
    p.add_argument("proof")
    p.add_argument("--id", help="identity to test (default: the one in the proof)")
    p = sub.add_parser("revoke", parents=[common], help="revoke a vehicle")
    p.add_argument("--id", required=True)
    p = sub.add_parser("schedule", parents=[common], help="schedule jobs from a job file")
    p.add_argument("jobs")
    p.add_argument("--order", help="comma list of job ids to time instead of optimizing")
    p = sub.add_parser("sweep", parents=[common], help="batch-size sweep on scenario traffic")
    p.add_argument("--n", type=int, help="stream length")
    p.add_argument("--clock", choices=["synthetic", "measured"], default="synthetic")
    p = sub.add_parser("bench", parents=[common], help="run a scenario and report")
    p.add_argument("--modes", default="individual-original,individual-modified,batch")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return COMMANDS[args.command](args, Store(args.state))
    except (InputError, StoreError, ScenarioError, JoinError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
