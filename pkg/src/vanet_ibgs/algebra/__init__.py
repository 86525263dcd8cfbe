"""Bilinear group environments: a transparent oracle backend and real curves."""

from .base import G1, G2, GT, GroupContext, GroupElement, as_rng, lp
from .curve import CURVES, CurveContext, make_curve_context
from .transparent import DEFAULT_PRIME, TransparentContext, make_transparent_context


def hash_to_g1(ctx: GroupContext, tag: str, msg: bytes):
    """H_V (tag ``"vehicle"``) or H_O (tag ``"opener"``)."""
    return ctx.hash_to_g1(tag, msg)


def hash_to_zp(ctx: GroupContext, tag: str, msg: bytes) -> int:
    """H_R (tag ``"gm"``) or the challenge hash H (tag ``"challenge"``)."""
    return ctx.hash_to_zp(tag, msg)


def pairing_count(ctx: GroupContext) -> int:
    return ctx.pairing_count()


def reset_pairing_count(ctx: GroupContext):
    ctx.reset_pairing_count()


def context_from_descriptor(text: str) -> GroupContext:
    """Rebuild a context from ``backend=...;p=...;seed=...`` or ``backend=curve;curve=...``."""
    fields = dict(part.split("=", 1) for part in text.strip().split(";") if part)
    backend = fields.get("backend")
    if backend == "transparent":
        return make_transparent_context(int(fields.get("seed", 0)), int(fields.get("p", DEFAULT_PRIME)))
    if backend == "curve":
        return make_curve_context(fields.get("curve", "bn254"))
    raise ValueError(f"unknown backend in descriptor: {text!r}")


__all__ = [
    "G1", "G2", "GT", "GroupContext", "GroupElement", "CurveContext", "TransparentContext",
    "CURVES", "DEFAULT_PRIME", "make_curve_context", "make_transparent_context",
    "hash_to_g1", "hash_to_zp", "pairing_count", "reset_pairing_count",
    "context_from_descriptor", "as_rng", "lp",
]
