"""Desk-scale backend in which every element is stored by its discrete log.

G1, G2 and GT are all realised as the additive group Z_p, written
multiplicatively: the element with log ``a`` stands for ``g^a`` for a fixed
abstract generator ``g``.  The pairing maps logs ``(a, b)`` to ``a*b``, which is
bilinear and non-degenerate.  Nothing here is hard; it exists so that every
identity of the scheme can be checked exactly through :meth:`dlog`.
"""

import random

from sympy import isprime

from .base import G1, G2, GT, GroupContext, GroupElement, expand

DEFAULT_PRIME = 2**31 - 1


class TElem(GroupElement):
    __slots__ = ("group", "log", "p")

    def __init__(self, group, log, p):
        self.group = group
        self.log = log % p
        self.p = p

    def _op(self, other):
        return TElem(self.group, self.log + other.log, self.p)

    def _exp(self, k):
        return TElem(self.group, self.log * k, self.p)

    def _inv(self):
        return TElem(self.group, -self.log, self.p)

    def _key(self):
        return (self.p, self.log)

    def is_identity(self):
        return self.log == 0

    def __repr__(self):
        return f"TElem({self.group}, {self.log})"


class TransparentContext(GroupContext):
    backend = "transparent"

    def __init__(self, seed: int = 0, p: int = DEFAULT_PRIME):
        if not isinstance(p, int) or p < 3 or not isprime(p):
            raise ValueError(f"group order must be an odd prime, got {p!r}")
        super().__init__(p)
        self.seed = seed
        rng = random.Random(f"transparent-context:{seed}:{p}")
        self.A = TElem(G1, rng.randrange(1, p), p)
        self.B = TElem(G2, rng.randrange(1, p), p)

    def _pair(self, g, h):
        return TElem(GT, g.log * h.log, self.order)

    def _hash_to_g1(self, dst, msg):
        return TElem(G1, expand(b"G1/" + dst, msg) % (self.order - 1) + 1, self.order)

    def identity(self, group):
        return TElem(group, 0, self.order)

    def dlog(self, elem) -> int:
        """Log of ``elem`` relative to the backend's abstract generator."""
        return elem.log

    def element(self, group, log):
        return TElem(group, log, self.order)

    def is_member(self, elem, group):
        return (
            isinstance(elem, TElem)
            and elem.group == group
            and elem.p == self.order
        )

    def serialize(self, elem) -> bytes:
        return elem.log.to_bytes(self.scalar_len, "big")

    def deserialize(self, group, data):
        if len(data) != self.scalar_len:
            raise ValueError("bad element length")
        log = int.from_bytes(data, "big")
        if log >= self.order:
            raise ValueError("element out of range")
        return TElem(group, log, self.order)

    def descriptor(self):
        return f"backend=transparent;p={self.order};seed={self.seed}"


def make_transparent_context(seed: int = 0, p: int = DEFAULT_PRIME) -> TransparentContext:
    return TransparentContext(seed, p)
