"""Batch verification of trimmed signatures with the small-exponent test.

Verification is split in two parts.  Part 1 (:func:`precompute_item`) is the
per-signature non-pairing work: it rebuilds the hashed first-move values,
checks the challenge and folds the three pairing equations into
``M_i, B_i, K_i, Q_i, nu_i``.  Part 2 (:func:`batch_finalize`) checks

    prod M_i == e(prod B_i, B) * e(prod K_i, K_T) * e(prod Q_i, S) * prod nu_i

with exactly three pairings, whatever the batch size.
"""

import hashlib
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .algebra import G1, GT, as_rng
from .ibgs import (
    ModifiedSignature, Signature, SystemParams, challenge, group_key, ident,
    reconstruct_betas, to_modified, well_formed,
)

HASH_FAIL, BATCH_FAIL, REVOKED = "hash_fail", "batch_fail", "revoked"
MALFORMED, UNKNOWN_GROUP = "malformed", "unknown_group"


@dataclass(frozen=True)
class BatchPolicy:
    l: int = 20
    isolate_on_failure: bool = True
    max_batch: int = 1024
    # independent exponents for each of the three equations of a signature
    split_exponents: bool = False

    def __post_init__(self):
        if not 1 <= self.l <= 128:
            raise ValueError("small-exponent length l must be in [1, 128]")
        if self.max_batch < 1:
            raise ValueError("max_batch must be positive")


@dataclass(frozen=True)
class BatchItem:
    M: object
    B: object
    K: object
    Q: object
    nu: object
    delta: object
    hash_ok: bool
    group: bytes


@dataclass(frozen=True)
class Verdict:
    index: int
    accepted: bool
    reason: Optional[str]
    group: str
    l: int


def small_exponent_test(ctx, bases, g, l: int, rng=None, deltas=None) -> bool:
    """Probabilistic check that y_j == g^{a_j} for every pair ``(a_j, y_j)``.

    delta_j is drawn from {0,1}^l; a batch containing a bad pair is accepted
    with probability at most 2^-l.
    """
    bases = list(bases)
    if not bases:
        return True
    rng = as_rng(rng)
    if deltas is None:
        deltas = [rng.getrandbits(l) for _ in bases]
    a = sum(a_j * d for (a_j, _), d in zip(bases, deltas)) % ctx.order
    y = ctx.identity(g.group)
    for (_, y_j), d in zip(bases, deltas):
        y = y * y_j ** d
    return g ** a == y


def draw_delta(rng, l: int, split: bool = False):
    """Nonzero small exponent(s) in [1, 2^l)."""
    pick = lambda: rng.randrange(1, 1 << l)  # noqa: E731
    return (pick(), pick(), pick()) if split else pick()


def precompute_item(params: SystemParams, sig: ModifiedSignature, msg: bytes, delta, S, ID_O) -> BatchItem:
    """Verification part 1 for one signature; performs no pairings.

    ``delta`` is an int, or a triple giving separate exponents to the
    beta4 / beta6 / beta8 equations.
    """
    ctx = params.ctx
    group = ctx.serialize(sig.C)
    b0, b1, b2, b3, b5, b7 = reconstruct_betas(params, sig)
    betas = (b0, b1, b2, b3, sig.beta4, b5, sig.beta6, b7, sig.beta8)
    gammas = (sig.gamma0, sig.gamma1, sig.gamma2, sig.gamma3, sig.gamma5)
    if sig.f != challenge(ctx, gammas, sig.C, sig.v1, sig.V2, msg, betas):
        return BatchItem(None, None, None, None, None, delta, False, group)

    A1, A2, A3, A4, A5 = params.A1, params.A2, params.A3, params.A4, params.A5
    f, z0 = sig.f, sig.z0
    g1, g2, g3, g5 = sig.gamma1, sig.gamma2, sig.gamma3, sig.gamma5
    xi_b = A1 ** (-z0) * g1 ** (-f)
    xi_k = A2 ** z0 * g2 ** f
    zeta_b = A3 ** sig.z2 * A2 ** z0 * A4 ** z0 * A5 ** (-f) * g2 ** f * g5 ** f
    zeta_s = A3 ** z0 * g3 ** f
    chi_b = A2 ** (-z0) * g2 ** (-f)
    chi_k = ctx.hash_to_g1("opener", ident(ID_O)) ** sig.z3

    if isinstance(delta, int):
        M = (sig.beta4 * sig.beta6 * sig.beta8) ** delta
        Bi = (xi_b * zeta_b * chi_b) ** delta
        Ki = (xi_k * chi_k) ** delta
        Qi = zeta_s ** delta
        nu = sig.v1 ** (f * delta)
    else:
        d4, d6, d8 = delta
        M = sig.beta4 ** d4 * sig.beta6 ** d6 * sig.beta8 ** d8
        Bi = xi_b ** d4 * zeta_b ** d6 * chi_b ** d8
        Ki = xi_k ** d4 * chi_k ** d8
        Qi = zeta_s ** d6
        nu = sig.v1 ** (f * d8)
    return BatchItem(M, Bi, Ki, Qi, nu, delta, True, group)


def batch_sides(params: SystemParams, Ms, Bs, Ks, Qs, nus, S):
    """``(mu, eta)``: prod M_i and the three-pairing right-hand side."""
    ctx = params.ctx
    mu = nu = ctx.identity(GT)
    Bp = Kp = Qp = ctx.identity(G1)
    for M, Bi, Ki, Qi, v in zip(Ms, Bs, Ks, Qs, nus):
        mu = mu * M
        Bp, Kp, Qp = Bp * Bi, Kp * Ki, Qp * Qi
        nu = nu * v
    eta = ctx.pair(Bp, ctx.B) * ctx.pair(Kp, params.K_T) * ctx.pair(Qp, S) * nu
    return mu, eta


def batch_finalize(params: SystemParams, items: Sequence[BatchItem], S) -> bool:
    """Verification part 2: three pairings for any nonempty batch of one group."""
    if not items:
        return True
    if len({it.group for it in items}) != 1:
        raise ValueError("batch mixes groups; bucket by C first")
    if not all(it.hash_ok for it in items):
        raise ValueError("batch contains items that failed the hash check")
    mu, eta = batch_sides(
        params,
        [it.M for it in items], [it.B for it in items], [it.K for it in items],
        [it.Q for it in items], [it.nu for it in items], S,
    )
    return mu == eta


def bucket_by_group(ctx, sigs):
    """Partition ``(sig, msg)`` pairs by their C field, keeping input order.

    Returns ``{serialized C: [index, ...]}``.
    """
    buckets = {}
    for i, (sig, _) in enumerate(sigs):
        buckets.setdefault(ctx.serialize(sig.C), []).append(i)
    return buckets


def isolate(params, items: Sequence[BatchItem], S):
    """Recursive halving; returns the positions (into ``items``) that fail."""
    if batch_finalize(params, items, S):
        return []
    if len(items) == 1:
        return [0]
    mid = len(items) // 2
    left = isolate(params, items[:mid], S)
    right = isolate(params, items[mid:], S)
    return left + [mid + j for j in right]


def verify_batch(
    params: SystemParams,
    sigs,
    policy: BatchPolicy = BatchPolicy(),
    rng=None,
    *,
    ID_O,
    ID_R,
    is_revoked: Optional[Callable[[object], bool]] = None,
) -> list:
    """Verdict per ``(signature, message)`` pair.

    ``ID_R`` is either one GM identity used for every group, or a mapping from
    serialized C to the GM identity of that group.  ``is_revoked`` (see
    :func:`vanet_ibgs.opener.revocation_filter`) rejects signatures from revoked
    members before they reach the batch.
    """
    ctx = params.ctx
    rng = as_rng(rng)
    sigs = [(to_modified(s) if isinstance(s, Signature) else s, m) for s, m in sigs]
    verdicts: list = [None] * len(sigs)

    def digest(sig):
        try:
            return hashlib.sha256(ctx.serialize(sig.C)).hexdigest()[:16]
        except Exception:
            return ""

    def settle(i, ok, reason=None):
        verdicts[i] = Verdict(i, ok, reason, digest(sigs[i][0]), policy.l)

    admitted = []
    for i, (sig, _) in enumerate(sigs):
        if not isinstance(sig, ModifiedSignature) or not well_formed(ctx, sig):
            settle(i, False, MALFORMED)
        elif is_revoked is not None and is_revoked(sig):
            settle(i, False, REVOKED)
        else:
            admitted.append(i)

    buckets = bucket_by_group(ctx, [sigs[i] for i in admitted])
    for key, positions in buckets.items():
        idx = [admitted[j] for j in positions]
        gm_id = ID_R.get(key) if isinstance(ID_R, Mapping) else ID_R
        if gm_id is None:
            for i in idx:
                settle(i, False, UNKNOWN_GROUP)
            continue
        S = group_key(params, sigs[idx[0]][0].C, gm_id)
        for start in range(0, len(idx), policy.max_batch):
            chunk = idx[start:start + policy.max_batch]
            live, items = [], []
            for i in chunk:
                sig, msg = sigs[i]
                item = precompute_item(params, sig, msg, draw_delta(rng, policy.l, policy.split_exponents), S, ID_O)
                if item.hash_ok:
                    live.append(i)
                    items.append(item)
                else:
                    settle(i, False, HASH_FAIL)
            if not items:
                continue
            if policy.isolate_on_failure:
                bad = set(isolate(params, items, S))
            else:
                bad = set() if batch_finalize(params, items, S) else set(range(len(items)))
            for pos, i in enumerate(live):
                settle(i, pos not in bad, BATCH_FAIL if pos in bad else None)
    return verdicts
