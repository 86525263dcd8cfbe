"""Identity-based group signatures: setup, key issue, group join, sign, verify.

Naming follows the usual presentation of the scheme: ``gamma*`` are the
commitments to the signing key, ``z*``/``Z*`` the responses, ``beta*`` the
first-move values of the embedded proof and ``f`` the challenge.

The verifier-side responses called z4, z5, z6 in the verification equations
are the signer's z1 (masks t), z2 (masks s2) and z3 (masks d).
"""

from dataclasses import dataclass, fields

from .algebra import G1, G2, GT, GroupContext, as_rng, lp

ZP = "Zp"
WIRE_VERSION = 1
FORM_FULL, FORM_MODIFIED = 0, 1


class JoinError(Exception):
    """The group manager refused a join, or the vehicle rejected the certificate."""


def ident(x) -> bytes:
    return x.encode("utf-8") if isinstance(x, str) else bytes(x)


# ---------------------------------------------------------------- key material


@dataclass(frozen=True)
class SystemParams:
    ctx: GroupContext
    A1: object
    A2: object
    A3: object
    A4: object
    A5: object
    K_T: object


@dataclass(frozen=True)
class TeaSecret:
    x_T: int


@dataclass(frozen=True)
class GmKey:
    ID_R: bytes
    C: object
    x_R: int


@dataclass(frozen=True)
class OpenerKey:
    ID_O: bytes
    x_O: object


@dataclass(frozen=True)
class VehicleKey:
    ID_V: bytes
    x_V: object


@dataclass(frozen=True)
class JoinResponse:
    D: object
    t: int
    C: object


@dataclass(frozen=True)
class VehicleCredential:
    key: VehicleKey
    D: object
    t: int
    C: object


@dataclass(frozen=True)
class RegistrationRecord:
    ID_V: bytes
    D: object
    t: int
    W: object


@dataclass(frozen=True)
class PoKTranscript:
    R: object
    c: int
    V: object
    nonce: bytes


def setup(ctx: GroupContext, rng=None):
    """TEA setup. Returns ``(SystemParams, TeaSecret)``."""
    rng = as_rng(rng)
    A1, A2, A3, A4, A5 = (ctx.random_g1(rng) for _ in range(5))
    x_T = ctx.random_scalar(rng)
    return SystemParams(ctx, A1, A2, A3, A4, A5, ctx.B ** x_T), TeaSecret(x_T)


def group_key(params: SystemParams, C, ID_R) -> object:
    """S = C * K_T^{H_R(C || ID_R)}; equals B^{x_R} for the matching GM."""
    ctx = params.ctx
    h = ctx.hash_to_zp("gm", ctx.serialize(C) + ident(ID_R))
    return C * params.K_T ** h


def keygen_gm(params: SystemParams, tea: TeaSecret, ID_R, rng=None) -> GmKey:
    ID_R = ident(ID_R)
    if not ID_R:
        raise ValueError("empty GM identity")
    ctx = params.ctx
    r = ctx.random_scalar(as_rng(rng))
    C = ctx.B ** r
    x_R = (r + ctx.hash_to_zp("gm", ctx.serialize(C) + ID_R) * tea.x_T) % ctx.order
    return GmKey(ID_R, C, x_R)


def keygen_tsd(params: SystemParams, tea: TeaSecret, ID_O) -> OpenerKey:
    ID_O = ident(ID_O)
    if not ID_O:
        raise ValueError("empty opener identity")
    return OpenerKey(ID_O, params.ctx.hash_to_g1("opener", ID_O) ** tea.x_T)


def keygen_vehicle(params: SystemParams, tea: TeaSecret, ID_V) -> VehicleKey:
    ID_V = ident(ID_V)
    if not ID_V:
        raise ValueError("empty vehicle identity")
    return VehicleKey(ID_V, params.ctx.hash_to_g1("vehicle", ID_V) ** tea.x_T)


# ---------------------------------------------------------------- group join


def _pok_challenge(ctx, R, ID_V, nonce) -> int:
    return ctx.hash_to_zp("challenge", b"pok" + lp(ctx.serialize(R)) + lp(ID_V) + lp(nonce))


def pok_prove(params: SystemParams, vk: VehicleKey, nonce: bytes, rng=None) -> PoKTranscript:
    """Fiat-Shamir proof of X with e(X, B) = e(H_V(ID_V), K_T), witness x_V."""
    ctx = params.ctx
    U = ctx.random_g1(as_rng(rng))
    R = ctx.pair(U, ctx.B)
    c = _pok_challenge(ctx, R, vk.ID_V, nonce)
    return PoKTranscript(R, c, U * vk.x_V ** c, bytes(nonce))


def pok_verify(params: SystemParams, ID_V, tr: PoKTranscript) -> bool:
    ctx = params.ctx
    ID_V = ident(ID_V)
    try:
        if not (ctx.is_member(tr.R, GT) and ctx.is_member(tr.V, G1)):
            return False
        if tr.c != _pok_challenge(ctx, tr.R, ID_V, tr.nonce):
            return False
    except (AttributeError, TypeError, ValueError):
        return False
    hv = ctx.hash_to_g1("vehicle", ID_V)
    return ctx.pair(tr.V, ctx.B) == tr.R * ctx.pair(hv, params.K_T) ** tr.c


def join_issue(gm: GmKey, params: SystemParams, ID_V, transcript: PoKTranscript, rng=None, table=None):
    """GM side of the join. Returns ``(JoinResponse, RegistrationRecord)``.

    If ``table`` is given the record is appended to it.
    """
    ID_V = ident(ID_V)
    if not pok_verify(params, ID_V, transcript):
        raise JoinError(f"proof of knowledge failed for {ID_V!r}")
    ctx = params.ctx
    p = ctx.order
    rng = as_rng(rng)
    t = ctx.random_scalar(rng)
    while (t + gm.x_R) % p == 0:
        t = ctx.random_scalar(rng)
    hv = ctx.hash_to_g1("vehicle", ID_V)
    D = (params.A5 / hv) ** pow(t + gm.x_R, -1, p)
    record = RegistrationRecord(ID_V, D, t, ctx.pair(hv, ctx.B))
    if table is not None:
        table.add(record)
    return JoinResponse(D, t, gm.C), record


def join_verify(params: SystemParams, ID_V, D, t, C, ID_R) -> bool:
    """e(A5, B) == e(D, B)^t e(D, S) e(H_V(ID_V), B)."""
    ctx = params.ctx
    if not (ctx.is_member(D, G1) and ctx.is_member(C, G2)):
        return False
    S = group_key(params, C, ID_R)
    hv = ctx.hash_to_g1("vehicle", ident(ID_V))
    B = ctx.B
    return ctx.pair(params.A5, B) == ctx.pair(D, B) ** t * ctx.pair(D, S) * ctx.pair(hv, B)


def accept_join(params: SystemParams, vk: VehicleKey, resp: JoinResponse, ID_R) -> VehicleCredential:
    """Vehicle side: check the certificate and assemble the signing credential."""
    if not join_verify(params, vk.ID_V, resp.D, resp.t, resp.C, ID_R):
        raise JoinError("membership certificate does not verify")
    return VehicleCredential(vk, resp.D, resp.t, resp.C)


# ---------------------------------------------------------------- signatures


@dataclass(frozen=True)
class Signature:
    """Full signature as produced by the signer (26 transmitted elements)."""

    gamma0: object
    gamma1: object
    gamma2: object
    gamma3: object
    gamma5: object
    z0: int
    z1: int
    z2: int
    z3: int
    Z1: object
    Z2: object
    Z3: object
    f: int
    C: object
    v1: object
    V2: object
    beta0: object
    beta1: object
    beta2: object
    beta3: object
    beta4: object
    beta5: object
    beta6: object
    beta7: object
    beta8: object
    S: object

    FORM = FORM_FULL
    LAYOUT = (
        [G1] * 5 + [ZP] * 4 + [G1] * 3 + [ZP, G2, GT, G2]
        + [G1, G1, G1, G1, GT, G1, GT, G2, GT, G2]
    )


@dataclass(frozen=True)
class ModifiedSignature:
    """Trimmed signature: 19 elements, only beta4, beta6, beta8 kept."""

    gamma0: object
    gamma1: object
    gamma2: object
    gamma3: object
    gamma5: object
    z0: int
    z1: int
    z2: int
    z3: int
    Z1: object
    Z2: object
    Z3: object
    beta4: object
    beta6: object
    beta8: object
    f: int
    C: object
    v1: object
    V2: object

    FORM = FORM_MODIFIED
    LAYOUT = [G1] * 5 + [ZP] * 4 + [G1] * 3 + [GT] * 3 + [ZP, G2, GT, G2]


def element_count(sig) -> int:
    return len(fields(sig))


def serialize_signature(ctx: GroupContext, sig) -> bytes:
    out = [bytes([WIRE_VERSION, sig.FORM])]
    for fld, kind in zip(fields(sig), sig.LAYOUT):
        val = getattr(sig, fld.name)
        raw = ctx.scalar_bytes(val) if kind == ZP else ctx.serialize(val)
        out.append(len(raw).to_bytes(2, "big") + raw)
    return b"".join(out)


def deserialize_signature(ctx: GroupContext, data: bytes):
    if len(data) < 2 or data[0] != WIRE_VERSION:
        raise ValueError("unsupported signature encoding")
    cls = {FORM_FULL: Signature, FORM_MODIFIED: ModifiedSignature}.get(data[1])
    if cls is None:
        raise ValueError(f"unknown signature form {data[1]}")
    pos, vals = 2, []
    for kind in cls.LAYOUT:
        if pos + 2 > len(data):
            raise ValueError("truncated signature")
        n = int.from_bytes(data[pos:pos + 2], "big")
        raw = data[pos + 2:pos + 2 + n]
        if len(raw) != n:
            raise ValueError("truncated signature")
        pos += 2 + n
        vals.append(ctx.scalar_from_bytes(raw) if kind == ZP else ctx.deserialize(kind, raw))
    if pos != len(data):
        raise ValueError("trailing bytes after signature")
    return cls(*vals)


def _encode(ctx, x) -> bytes:
    if isinstance(x, int):
        return lp(ctx.scalar_bytes(x))
    if isinstance(x, (bytes, bytearray)):
        return lp(bytes(x))
    return lp(ctx.serialize(x))


def challenge(ctx, gammas, C, v1, V2, M, betas) -> int:
    """f = H((gamma0..gamma5) || C || v1 || V2 || M || (beta0..beta8))."""
    parts = [*gammas, C, v1, V2, bytes(M), *betas]
    return ctx.hash_to_zp("challenge", b"sig" + b"".join(_encode(ctx, x) for x in parts))


def sign(params: SystemParams, cred: VehicleCredential, ID_O, ID_R, M: bytes, rng=None, trace=None) -> Signature:
    """Anonymous group signature on ``M``.

    ``trace``, if a dict, receives the ephemeral exponents (tests use them to
    check the algebra against the transparent backend).
    """
    ctx = params.ctx
    p = ctx.order
    rng = as_rng(rng)
    A, B, K_T = ctx.A, ctx.B, params.K_T
    A1, A2, A3, A4, A5 = params.A1, params.A2, params.A3, params.A4, params.A5
    e = ctx.pair
    hv = ctx.hash_to_g1("vehicle", cred.key.ID_V)
    ho = ctx.hash_to_g1("opener", ident(ID_O))
    S = group_key(params, cred.C, ID_R)
    t, D, x_V = cred.t, cred.D, cred.key.x_V

    s1 = ctx.random_scalar(rng)
    g0, g1, g2, g3 = A ** s1, x_V * A1 ** s1, hv * A2 ** s1, D * A3 ** s1
    g5 = g3 ** t * A4 ** s1
    s2 = t * s1 % p

    d = ctx.random_scalar(rng)
    e_ho_kt = e(ho, K_T)
    v1 = e(hv, B) * e_ho_kt ** d
    V2 = B ** d

    r1, r2, r3, r4 = (ctx.random_scalar(rng) for _ in range(4))
    R1, R2, R3 = (ctx.random_g1(rng) for _ in range(3))
    b0, b1, b2, b3 = A ** r1, R1 * A1 ** r1, R2 * A2 ** r1, R3 * A3 ** r1
    b5 = g3 ** r3 * A4 ** r1
    b7 = B ** r4
    b4 = (e(A1, B).inverse() * e(A2, K_T)) ** r1
    b6 = e(A3, B) ** r2 * (e(A3, S) * e(A2 * A4, B)) ** r1
    b8 = e_ho_kt ** r4 * e(A2, B) ** (-r1)
    betas = (b0, b1, b2, b3, b4, b5, b6, b7, b8)

    f = challenge(ctx, (g0, g1, g2, g3, g5), cred.C, v1, V2, M, betas)
    z0, z1, z2, z3 = (r1 - f * s1) % p, (r3 - f * t) % p, (r2 - f * s2) % p, (r4 - f * d) % p
    Z1, Z2, Z3 = R1 * x_V ** (-f), R2 * hv ** (-f), R3 * D ** (-f)

    if trace is not None:
        trace.update(s1=s1, s2=s2, d=d, r1=r1, r2=r2, r3=r3, r4=r4, R1=R1, R2=R2, R3=R3)
    return Signature(g0, g1, g2, g3, g5, z0, z1, z2, z3, Z1, Z2, Z3, f, cred.C, v1, V2, *betas, S)


def to_modified(sig: Signature) -> ModifiedSignature:
    return ModifiedSignature(
        sig.gamma0, sig.gamma1, sig.gamma2, sig.gamma3, sig.gamma5,
        sig.z0, sig.z1, sig.z2, sig.z3, sig.Z1, sig.Z2, sig.Z3,
        sig.beta4, sig.beta6, sig.beta8, sig.f, sig.C, sig.v1, sig.V2,
    )


def well_formed(ctx: GroupContext, sig) -> bool:
    """Membership of every transmitted element; public parameters are trusted."""
    for fld, kind in zip(fields(sig), sig.LAYOUT):
        val = getattr(sig, fld.name)
        if kind == ZP:
            if not isinstance(val, int) or not 0 <= val < ctx.order:
                return False
        elif not ctx.is_member(val, kind):
            return False
    return sig.f != 0


def reconstruct_betas(params: SystemParams, sig):
    """Non-pairing first-move values (beta0, beta1, beta2, beta3, beta5, beta7)."""
    ctx = params.ctx
    f, z0 = sig.f, sig.z0
    return (
        ctx.A ** z0 * sig.gamma0 ** f,
        sig.Z1 * params.A1 ** z0 * sig.gamma1 ** f,
        sig.Z2 * params.A2 ** z0 * sig.gamma2 ** f,
        sig.Z3 * params.A3 ** z0 * sig.gamma3 ** f,
        sig.gamma3 ** sig.z1 * params.A4 ** z0 * sig.gamma5 ** f,
        ctx.B ** sig.z3 * sig.V2 ** f,
    )


def _gammas(sig):
    return (sig.gamma0, sig.gamma1, sig.gamma2, sig.gamma3, sig.gamma5)


def verify_individual_original(params: SystemParams, sig: Signature, M: bytes, ID_O, ID_R) -> bool:
    """Verify a full signature by recomputing every pairing term (13 pairings)."""
    ctx = params.ctx
    if not isinstance(sig, Signature) or not well_formed(ctx, sig):
        return False
    e, B, K_T = ctx.pair, ctx.B, params.K_T
    A1, A2, A3, A4, A5 = params.A1, params.A2, params.A3, params.A4, params.A5
    f, z0 = sig.f, sig.z0
    S = group_key(params, sig.C, ID_R)
    ho = ctx.hash_to_g1("opener", ident(ID_O))

    G4 = e(sig.gamma1, B).inverse() * e(sig.gamma2, K_T)
    G6 = e(A5, B).inverse() * e(sig.gamma3, S) * e(sig.gamma2 * sig.gamma5, B)
    G8 = sig.v1 * e(sig.gamma2, B).inverse()

    b0, b1, b2, b3, b5, b7 = reconstruct_betas(params, sig)
    b4 = (e(A1, B).inverse() * e(A2, K_T)) ** z0 * G4 ** f
    b6 = e(A3, B) ** sig.z2 * (e(A3, S) * e(A2 * A4, B)) ** z0 * G6 ** f
    b8 = e(ho, K_T) ** sig.z3 * e(A2, B) ** (-z0) * G8 ** f
    betas = (b0, b1, b2, b3, b4, b5, b6, b7, b8)

    if f != challenge(ctx, _gammas(sig), sig.C, sig.v1, sig.V2, M, betas):
        return False
    # the redundant transmitted values must agree with what was recomputed
    sent = (sig.beta0, sig.beta1, sig.beta2, sig.beta3, sig.beta4,
            sig.beta5, sig.beta6, sig.beta7, sig.beta8)
    return sent == betas and sig.S == S


def verify_individual_modified(params: SystemParams, sig: ModifiedSignature, M: bytes, ID_O, ID_R) -> bool:
    """Hash check first (no pairings), then the three pairing-product equations."""
    ctx = params.ctx
    if not isinstance(sig, ModifiedSignature) or not well_formed(ctx, sig):
        return False
    f, z0 = sig.f, sig.z0
    S = group_key(params, sig.C, ID_R)
    b0, b1, b2, b3, b5, b7 = reconstruct_betas(params, sig)
    betas = (b0, b1, b2, b3, sig.beta4, b5, sig.beta6, b7, sig.beta8)
    if f != challenge(ctx, _gammas(sig), sig.C, sig.v1, sig.V2, M, betas):
        return False

    e, B, K_T = ctx.pair, ctx.B, params.K_T
    A1, A2, A3, A4, A5 = params.A1, params.A2, params.A3, params.A4, params.A5
    ho = ctx.hash_to_g1("opener", ident(ID_O))
    g1, g2, g3, g5 = sig.gamma1, sig.gamma2, sig.gamma3, sig.gamma5
    want4 = (e(A1, B).inverse() * e(A2, K_T)) ** z0 * (e(g1, B).inverse() * e(g2, K_T)) ** f
    if sig.beta4 != want4:
        return False
    want6 = (
        e(A3, B) ** sig.z2
        * (e(A3, S) * e(A2 * A4, B)) ** z0
        * (e(A5, B).inverse() * e(g3, S) * e(g2 * g5, B)) ** f
    )
    if sig.beta6 != want6:
        return False
    want8 = e(ho, K_T) ** sig.z3 * e(A2, B) ** (-z0) * (sig.v1 * e(g2, B).inverse()) ** f
    return sig.beta8 == want8
