"""Opening disputed signatures, judging the opener's proof, revocation.

Proof of correct opening, with upsilon = e(H_V(ID_V), B) and
upsilon' = v1 / upsilon (which equals e(x_O, V2) for the true signer):

    prover   s0, r0, r1 random
             G0 = x_O A^s0,  G1 = e(A, V2)^s0,  G2 = e(A, B)^s0
             b0 = H_O(ID_O)^r1 A^r0,  b1 = e(A, V2)^r0,  b2 = e(A, B)^r0
             f  = H(G0, G1, G2 || b0, b1, b2 || v1 || V2 || upsilon)
             z0 = r0 - f s0,  z1 = H_O(ID_O)^r1 x_O^-f
    judge    G1 = e(G0, V2) / upsilon',  G2 = e(G0, B) / e(H_O(ID_O), K_T)
             b0 = z1 G0^f A^z0,  b1 = e(A, V2)^z0 G1^f,  b2 = e(A, B)^z0 G2^f
             accept iff f matches
"""

import hashlib
import os
import time
from dataclasses import dataclass

from .algebra import as_rng, lp
from .ibgs import (
    ModifiedSignature, OpenerKey, RegistrationRecord, Signature, SystemParams,
    ident, verify_individual_modified, verify_individual_original,
)


class OpenError(Exception):
    """Refusal to open a signature that does not verify."""


def w_digest(ctx, W) -> str:
    return hashlib.sha256(ctx.serialize(W)).hexdigest()


def id_digest(ID_V) -> str:
    return hashlib.sha256(ident(ID_V)).hexdigest()


class RegistrationTable:
    """Join records keyed by W; optionally backed by an append-only file.

    File format, one record per line (tab separated, hex fields):
    ``W-digest  ID_V  D  t``.
    """

    def __init__(self, ctx, path=None):
        self.ctx = ctx
        self.path = path
        self._by_w = {}
        if path is not None and os.path.exists(path):
            self._load()

    def _load(self):
        ctx = self.ctx
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    wd, id_hex, d_hex, t_hex = line.split()
                    ID_V = bytes.fromhex(id_hex)
                    D = ctx.deserialize("G1", bytes.fromhex(d_hex))
                    t = ctx.scalar_from_bytes(bytes.fromhex(t_hex))
                except ValueError as exc:
                    raise ValueError(f"{self.path}:{lineno}: bad registration record ({exc})") from None
                W = ctx.pair(ctx.hash_to_g1("vehicle", ID_V), ctx.B)
                if w_digest(ctx, W) != wd:
                    raise ValueError(f"{self.path}:{lineno}: W digest does not match ID_V")
                self._by_w[wd] = RegistrationRecord(ID_V, D, t, W)

    def add(self, record: RegistrationRecord):
        wd = w_digest(self.ctx, record.W)
        if wd in self._by_w:
            raise ValueError(f"duplicate registration for W {wd[:16]}")
        self._by_w[wd] = record
        if self.path is not None:
            ctx = self.ctx
            with open(self.path, "a") as fh:
                fh.write("\t".join([
                    wd, record.ID_V.hex(), ctx.serialize(record.D).hex(), ctx.scalar_bytes(record.t).hex(),
                ]) + "\n")

    def lookup(self, W):
        return self._by_w.get(w_digest(self.ctx, W))

    def __len__(self):
        return len(self._by_w)

    def __iter__(self):
        return iter(self._by_w.values())


class RevocationList:
    """Revoked vehicle identities (SHA-256 digests) with revocation times.

    File format: ``digest unix-time`` per line, append-only.
    """

    def __init__(self, path=None):
        self.path = path
        self.entries = {}
        if path is not None and os.path.exists(path):
            with open(path) as fh:
                for line in fh:
                    if line.strip():
                        digest, ts = line.split()
                        self.entries.setdefault(digest, float(ts))

    def revoke(self, ID_V, when=None):
        digest = id_digest(ID_V)
        if digest in self.entries:
            return
        when = time.time() if when is None else when
        self.entries[digest] = when
        if self.path is not None:
            with open(self.path, "a") as fh:
                fh.write(f"{digest} {when}\n")

    def is_revoked(self, ID_V) -> bool:
        return id_digest(ID_V) in self.entries

    def __len__(self):
        return len(self.entries)


def revoke(rlist: RevocationList, ID_V, when=None):
    rlist.revoke(ID_V, when)


def is_revoked(rlist: RevocationList, ID_V) -> bool:
    return rlist.is_revoked(ID_V)


@dataclass(frozen=True)
class OpeningProof:
    gamma0: object
    f: int
    z0: int
    z1: object
    upsilon: object


def recover_w(params: SystemParams, opener: OpenerKey, sig):
    """upsilon = v1 / e(x_O, V2), equal to the signer's registered W."""
    return sig.v1 / params.ctx.pair(opener.x_O, sig.V2)


def _proof_hash(ctx, gammas, betas, v1, V2, upsilon) -> int:
    body = b"".join(lp(ctx.serialize(x)) for x in (*gammas, *betas, v1, V2, upsilon))
    return ctx.hash_to_zp("challenge", b"open" + body)


def open_signature(params: SystemParams, opener: OpenerKey, sig, M: bytes, table: RegistrationTable, ID_R, rng=None):
    """Trace ``sig`` to a registered vehicle.

    Returns ``(ID_V, OpeningProof)``, or ``None`` when no registration matches.
    Raises :class:`OpenError` if the signature itself does not verify.
    """
    if isinstance(sig, Signature):
        ok = verify_individual_original(params, sig, M, opener.ID_O, ID_R)
    elif isinstance(sig, ModifiedSignature):
        ok = verify_individual_modified(params, sig, M, opener.ID_O, ID_R)
    else:
        ok = False
    if not ok:
        raise OpenError("refusing to open a signature that does not verify")

    ctx = params.ctx
    upsilon = recover_w(params, opener, sig)
    record = table.lookup(upsilon)
    if record is None:
        return None

    rng = as_rng(rng)
    A, B, V2 = ctx.A, ctx.B, sig.V2
    ho = ctx.hash_to_g1("opener", opener.ID_O)
    s0, r0, r1 = (ctx.random_scalar(rng) for _ in range(3))
    e_av2, e_ab = ctx.pair(A, V2), ctx.pair(A, B)
    gammas = (opener.x_O * A ** s0, e_av2 ** s0, e_ab ** s0)
    betas = (ho ** r1 * A ** r0, e_av2 ** r0, e_ab ** r0)
    f = _proof_hash(ctx, gammas, betas, sig.v1, V2, upsilon)
    z0 = (r0 - f * s0) % ctx.order
    z1 = ho ** r1 * opener.x_O ** (-f)
    return record.ID_V, OpeningProof(gammas[0], f, z0, z1, upsilon)


def judge(params: SystemParams, proof: OpeningProof, sig, M: bytes, ID_V, ID_O) -> bool:
    """Check that ``proof`` shows ``ID_V`` produced ``sig``."""
    ctx = params.ctx
    A, B, V2 = ctx.A, ctx.B, sig.V2
    try:
        if not (ctx.is_member(proof.gamma0, "G1") and ctx.is_member(proof.z1, "G1")):
            return False
        if not 0 <= proof.z0 < ctx.order:
            return False
    except (AttributeError, TypeError):
        return False
    upsilon = ctx.pair(ctx.hash_to_g1("vehicle", ident(ID_V)), B)
    upsilon_p = sig.v1 / upsilon
    g0 = proof.gamma0
    g1 = ctx.pair(g0, V2) / upsilon_p
    g2 = ctx.pair(g0, B) / ctx.pair(ctx.hash_to_g1("opener", ident(ID_O)), params.K_T)
    f, z0 = proof.f, proof.z0
    betas = (
        proof.z1 * g0 ** f * A ** z0,
        ctx.pair(A, V2) ** z0 * g1 ** f,
        ctx.pair(A, B) ** z0 * g2 ** f,
    )
    return f == _proof_hash(ctx, (g0, g1, g2), betas, sig.v1, V2, upsilon)


def revocation_filter(params: SystemParams, opener: OpenerKey, table: RegistrationTable, rlist: RevocationList):
    """Predicate ``sig -> bool`` for :func:`verify_batch`; needs the opener key.

    Anonymous signatures can only be linked to an identity through x_O, so
    revocation is enforced at a verifier that holds (or is) the opener.
    Costs one pairing per signature.
    """
    def check(sig) -> bool:
        record = table.lookup(recover_w(params, opener, sig))
        return record is not None and rlist.is_revoked(record.ID_V)

    return check
