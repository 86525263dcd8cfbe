"""Backend-independent pieces of the bilinear group environment."""

import hashlib
import random
import secrets
import threading

G1, G2, GT = "G1", "G2", "GT"

# domain tags: the two hash-to-G1 maps and the two hash-to-Zp* maps
G1_TAGS = {"vehicle": b"H_V", "opener": b"H_O"}
ZP_TAGS = {"gm": b"H_R", "challenge": b"H"}

DST_PREFIX = b"VANET-IBGS-v1:"


def expand(dst: bytes, msg: bytes, counter: int = 0) -> int:
    """512-bit integer from SHA-512(prefix || len(dst) || dst || len(msg) || msg || counter)."""
    h = hashlib.sha512()
    h.update(DST_PREFIX)
    h.update(len(dst).to_bytes(2, "big") + dst)
    h.update(len(msg).to_bytes(8, "big") + msg)
    h.update(counter.to_bytes(4, "big"))
    return int.from_bytes(h.digest(), "big")


def lp(data: bytes) -> bytes:
    """Length-prefix a byte string (4-byte big-endian length)."""
    return len(data).to_bytes(4, "big") + data


def as_rng(seed=None) -> random.Random:
    """Accept an int seed, an existing Random, or None (system entropy)."""
    if isinstance(seed, random.Random):
        return seed
    if seed is None:
        return secrets.SystemRandom()
    return random.Random(seed)


class PairingCounter:
    """Monotone, resettable count of pairing evaluations; safe under threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._n = 0

    def bump(self):
        with self._lock:
            self._n += 1

    @property
    def value(self) -> int:
        return self._n

    def reset(self):
        with self._lock:
            self._n = 0


class GroupElement:
    """Common operator surface. Subclasses implement _op, _exp, _inv, _key."""

    __slots__ = ()
    group: str

    def __mul__(self, other):
        if not isinstance(other, GroupElement) or other.group != self.group:
            raise TypeError(f"cannot multiply {self.group} by {other!r}")
        return self._op(other)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an int")
        return self._exp(k)

    def inverse(self):
        return self._inv()

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group == other.group and self._key() == other._key()

    def __hash__(self):
        return hash((self.group, self._key()))


class GroupContext:
    """Bilinear group environment e: G1 x G2 -> GT of prime order p.

    Backends provide generators ``A`` (G1) and ``B`` (G2), the pairing, hashing
    into G1, membership checks and element (de)serialization. The pairing
    counter increments on every call to :meth:`pair`.
    """

    backend = "abstract"
    # isomorphism G1 -> G2 of the original type-2 setting; never used by the scheme
    psi = None

    def __init__(self, order: int):
        self.order = order
        self.counter = PairingCounter()
        self.scalar_len = (order.bit_length() + 7) // 8

    # ---- pairing -------------------------------------------------------
    def pair(self, g, h):
        if getattr(g, "group", None) != G1 or getattr(h, "group", None) != G2:
            raise TypeError("pairing takes (G1, G2)")
        self.counter.bump()
        return self._pair(g, h)

    def pairing_count(self) -> int:
        return self.counter.value

    def reset_pairing_count(self):
        self.counter.reset()

    # ---- scalars -------------------------------------------------------
    def random_scalar(self, rng) -> int:
        """Uniform in Z_p^*."""
        return rng.randrange(1, self.order)

    def random_g1(self, rng):
        return self.A ** self.random_scalar(rng)

    def random_g2(self, rng):
        return self.B ** self.random_scalar(rng)

    def hash_to_zp(self, tag: str, msg: bytes) -> int:
        try:
            dst = ZP_TAGS[tag]
        except KeyError:
            raise ValueError(f"unknown Z_p hash tag {tag!r}") from None
        # 512-bit digest reduced mod p-1: bias below 2^-250 for p < 2^256
        return expand(dst, msg) % (self.order - 1) + 1

    def hash_to_g1(self, tag: str, msg: bytes):
        try:
            dst = G1_TAGS[tag]
        except KeyError:
            raise ValueError(f"unknown G1 hash tag {tag!r}") from None
        return self._hash_to_g1(dst, msg)

    def scalar_bytes(self, k: int) -> bytes:
        return (k % self.order).to_bytes(self.scalar_len, "big")

    def scalar_from_bytes(self, data: bytes) -> int:
        k = int.from_bytes(data, "big")
        if k >= self.order:
            raise ValueError("scalar out of range")
        return k

    def identity(self, group: str):
        raise NotImplementedError

    def descriptor(self) -> str:
        raise NotImplementedError

    def _pair(self, g, h):
        raise NotImplementedError

    def _hash_to_g1(self, dst: bytes, msg: bytes):
        raise NotImplementedError

    def serialize(self, elem) -> bytes:
        raise NotImplementedError

    def deserialize(self, group: str, data: bytes):
        raise NotImplementedError

    def is_member(self, elem, group: str) -> bool:
        raise NotImplementedError
