"""Pairing-friendly curve backend (type-3 optimal ate pairing via py_ecc)."""

from py_ecc import optimized_bls12_381, optimized_bn128

from .base import G1, G2, GT, GroupContext, GroupElement, expand

CURVES = {
    "bn254": (optimized_bn128, 1),
    "bls12_381": (optimized_bls12_381, 0x396C8C005555E1568C00AAAB0000AAAB),
}


class CPoint(GroupElement):
    __slots__ = ("group", "pt", "ctx")

    def __init__(self, group, pt, ctx):
        self.group = group
        self.pt = pt
        self.ctx = ctx

    def _op(self, other):
        return CPoint(self.group, self.ctx.mod.add(self.pt, other.pt), self.ctx)

    def _exp(self, k):
        return CPoint(self.group, self.ctx.mod.multiply(self.pt, k % self.ctx.order), self.ctx)

    def _inv(self):
        return CPoint(self.group, self.ctx.mod.neg(self.pt), self.ctx)

    def _key(self):
        if self.ctx.mod.is_inf(self.pt):
            return None
        x, y = self.ctx.mod.normalize(self.pt)
        return (x, y)

    def is_identity(self):
        return self.ctx.mod.is_inf(self.pt)

    def __repr__(self):
        return f"CPoint({self.group}, {self._key()})"


class CGT(GroupElement):
    __slots__ = ("group", "val", "ctx")

    def __init__(self, val, ctx):
        self.group = GT
        self.val = val
        self.ctx = ctx

    def _op(self, other):
        return CGT(self.val * other.val, self.ctx)

    def _exp(self, k):
        return CGT(self.val ** (k % self.ctx.order), self.ctx)

    def _inv(self):
        return CGT(self.val.inv(), self.ctx)

    def _key(self):
        return tuple(int(c) for c in self.val.coeffs)

    def is_identity(self):
        return self.val == self.val.one()

    def __repr__(self):
        return "CGT(...)"


class CurveContext(GroupContext):
    backend = "curve"

    def __init__(self, curve_id: str):
        try:
            self.mod, self.cofactor = CURVES[curve_id]
        except KeyError:
            raise ValueError(f"unknown curve {curve_id!r}; choose from {sorted(CURVES)}") from None
        super().__init__(self.mod.curve_order)
        self.curve_id = curve_id
        self.q = self.mod.field_modulus
        self.field_len = (self.q.bit_length() + 7) // 8
        self.A = CPoint(G1, self.mod.G1, self)
        self.B = CPoint(G2, self.mod.G2, self)

    def _pair(self, g, h):
        return CGT(self.mod.pairing(h.pt, g.pt), self)

    def _hash_to_g1(self, dst, msg):
        # try-and-increment on y^2 = x^3 + b; q = 3 mod 4 for both curves
        FQ = self.mod.FQ
        b = self.mod.b
        counter = 0
        while True:
            h = expand(b"G1/" + dst, msg, counter)
            x = FQ(h % self.q)
            rhs = x * x * x + b
            y = rhs ** ((self.q + 1) // 4)
            if y * y == rhs:
                if (h >> 511) & 1:
                    y = -y
                pt = self.mod.multiply((x, y, FQ.one()), self.cofactor)
                if not self.mod.is_inf(pt):
                    return CPoint(G1, pt, self)
            counter += 1

    def identity(self, group):
        if group == G1:
            return CPoint(G1, self.mod.Z1, self)
        if group == G2:
            return CPoint(G2, self.mod.Z2, self)
        return CGT(self.mod.FQ12.one(), self)

    def is_member(self, elem, group):
        if group == GT:
            if not isinstance(elem, CGT) or elem.ctx is not self:
                return False
            return elem.val != elem.val.zero() and (elem.val ** self.order) == elem.val.one()
        if not isinstance(elem, CPoint) or elem.group != group or elem.ctx is not self:
            return False
        b = self.mod.b if group == G1 else self.mod.b2
        if not self.mod.is_on_curve(elem.pt, b):
            return False
        if group == G1 and self.cofactor == 1:
            return True
        return self.mod.is_inf(self.mod.multiply(elem.pt, self.order))

    # ---- encoding ------------------------------------------------------
    def _fq(self, v) -> bytes:
        return int(v).to_bytes(self.field_len, "big")

    def serialize(self, elem) -> bytes:
        if elem.group == GT:
            return b"".join(self._fq(c) for c in elem.val.coeffs)
        if elem.is_identity():
            return b"\x00"
        x, y = self.mod.normalize(elem.pt)
        if elem.group == G1:
            return b"\x04" + self._fq(x.n) + self._fq(y.n)
        return b"\x04" + b"".join(self._fq(c) for c in (*x.coeffs, *y.coeffs))

    def deserialize(self, group, data):
        n = self.field_len
        if group == GT:
            if len(data) != 12 * n:
                raise ValueError("bad GT encoding length")
            coeffs = [int.from_bytes(data[i * n:(i + 1) * n], "big") for i in range(12)]
            elem = CGT(self.mod.FQ12(coeffs), self)
        elif data == b"\x00":
            return self.identity(group)
        else:
            width = 2 if group == G1 else 4
            if len(data) != 1 + width * n or data[0] != 4:
                raise ValueError(f"bad {group} encoding")
            vals = [int.from_bytes(data[1 + i * n:1 + (i + 1) * n], "big") for i in range(width)]
            if any(v >= self.q for v in vals):
                raise ValueError("coordinate out of range")
            if group == G1:
                FQ = self.mod.FQ
                pt = (FQ(vals[0]), FQ(vals[1]), FQ.one())
            else:
                FQ2 = self.mod.FQ2
                pt = (FQ2(vals[0:2]), FQ2(vals[2:4]), FQ2.one())
            elem = CPoint(group, pt, self)
        if not self.is_member(elem, group):
            raise ValueError(f"decoded element not in {group}")
        return elem

    def descriptor(self):
        return f"backend=curve;curve={self.curve_id}"


def make_curve_context(curve_id: str = "bn254") -> CurveContext:
    return CurveContext(curve_id)
