"""On-disk key material for the command line tool.

A state directory holds ``params.json``, ``tea.json``, ``tsd.json``,
``gm/<id>.json``, ``vehicles/<id>.json``, the registration table
``registry.tsv`` and the revocation list ``revoked.txt``.  Elements are hex
strings of their algebra encoding; file names use the hex of the identity.
"""

import json
import os

from ..algebra import G1, G2, GT, context_from_descriptor
from ..ibgs import (
    GmKey, OpenerKey, Signature, SystemParams, TeaSecret, VehicleCredential, VehicleKey,
    deserialize_signature, ident, serialize_signature,
)
from ..opener import OpeningProof, RegistrationTable, RevocationList


class StoreError(ValueError):
    """Missing or unreadable state."""


def _write(path, obj):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _read(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise StoreError(f"{path}: not found") from None
    except json.JSONDecodeError as exc:
        raise StoreError(f"{path}: invalid JSON ({exc})") from None


class Store:
    def __init__(self, root):
        self.root = root
        self._params = None

    def path(self, *parts):
        return os.path.join(self.root, *parts)

    # elements
    def _enc(self, ctx, x):
        return ctx.scalar_bytes(x).hex() if isinstance(x, int) else ctx.serialize(x).hex()

    def _el(self, ctx, group, text):
        return ctx.deserialize(group, bytes.fromhex(text))

    def _zp(self, ctx, text):
        return ctx.scalar_from_bytes(bytes.fromhex(text))

    # system
    def save_setup(self, params: SystemParams, tea: TeaSecret):
        ctx = params.ctx
        rec = {"descriptor": ctx.descriptor()}
        rec.update({k: self._enc(ctx, getattr(params, k)) for k in ("A1", "A2", "A3", "A4", "A5", "K_T")})
        _write(self.path("params.json"), rec)
        _write(self.path("tea.json"), {"x_T": self._enc(ctx, tea.x_T)})
        self._params = params

    def params(self) -> SystemParams:
        if self._params is None:
            rec = _read(self.path("params.json"))
            try:
                ctx = context_from_descriptor(rec["descriptor"])
                els = [self._el(ctx, G1, rec[k]) for k in ("A1", "A2", "A3", "A4", "A5")]
                self._params = SystemParams(ctx, *els, self._el(ctx, G2, rec["K_T"]))
            except (KeyError, ValueError) as exc:
                raise StoreError(f"{self.path('params.json')}: {exc}") from None
        return self._params

    def tea(self) -> TeaSecret:
        rec = _read(self.path("tea.json"))
        return TeaSecret(self._zp(self.params().ctx, rec["x_T"]))

    # keys
    def _key_path(self, kind, ID):
        return self.path(kind, ident(ID).hex() + ".json")

    def save_gm(self, gm: GmKey):
        ctx = self.params().ctx
        _write(self._key_path("gm", gm.ID_R),
               {"ID_R": gm.ID_R.decode(), "C": self._enc(ctx, gm.C), "x_R": self._enc(ctx, gm.x_R)})

    def gm(self, ID_R) -> GmKey:
        ctx = self.params().ctx
        rec = _read(self._key_path("gm", ID_R))
        return GmKey(ident(rec["ID_R"]), self._el(ctx, G2, rec["C"]), self._zp(ctx, rec["x_R"]))

    def save_tsd(self, ok: OpenerKey):
        ctx = self.params().ctx
        _write(self.path("tsd.json"), {"ID_O": ok.ID_O.decode(), "x_O": self._enc(ctx, ok.x_O)})

    def tsd(self) -> OpenerKey:
        rec = _read(self.path("tsd.json"))
        return OpenerKey(ident(rec["ID_O"]), self._el(self.params().ctx, G1, rec["x_O"]))

    def save_vehicle(self, vk: VehicleKey, cred: VehicleCredential = None, ID_R=None):
        ctx = self.params().ctx
        rec = {"ID_V": vk.ID_V.decode(), "x_V": self._enc(ctx, vk.x_V)}
        if cred is not None:
            rec.update(D=self._enc(ctx, cred.D), t=self._enc(ctx, cred.t), C=self._enc(ctx, cred.C),
                       ID_R=ident(ID_R).decode())
        _write(self._key_path("vehicles", vk.ID_V), rec)

    def vehicle(self, ID_V):
        """``(VehicleKey, VehicleCredential or None, ID_R or None)``."""
        ctx = self.params().ctx
        rec = _read(self._key_path("vehicles", ID_V))
        vk = VehicleKey(ident(rec["ID_V"]), self._el(ctx, G1, rec["x_V"]))
        if "D" not in rec:
            return vk, None, None
        cred = VehicleCredential(vk, self._el(ctx, G1, rec["D"]), self._zp(ctx, rec["t"]),
                                 self._el(ctx, G2, rec["C"]))
        return vk, cred, ident(rec["ID_R"])

    def registry(self) -> RegistrationTable:
        return RegistrationTable(self.params().ctx, self.path("registry.tsv"))

    def revoked(self) -> RevocationList:
        return RevocationList(self.path("revoked.txt"))

    # signed messages and proofs
    def save_bundle(self, path, sig, msg: bytes, ID_R, ID_O):
        ctx = self.params().ctx
        _write(path, {
            "form": "full" if isinstance(sig, Signature) else "modified",
            "message": msg.hex(), "signature": serialize_signature(ctx, sig).hex(),
            "ID_R": ident(ID_R).decode(), "ID_O": ident(ID_O).decode(),
        })

    def bundle(self, path):
        """``(signature, message, ID_R, ID_O)``."""
        rec = _read(path)
        try:
            sig = deserialize_signature(self.params().ctx, bytes.fromhex(rec["signature"]))
            return sig, bytes.fromhex(rec["message"]), ident(rec["ID_R"]), ident(rec["ID_O"])
        except (KeyError, ValueError) as exc:
            raise StoreError(f"{path}: bad signature bundle ({exc})") from None

    def save_proof(self, path, ID_V, proof: OpeningProof):
        ctx = self.params().ctx
        _write(path, {"ID_V": ident(ID_V).decode(), **{
            k: self._enc(ctx, getattr(proof, k)) for k in ("gamma0", "f", "z0", "z1", "upsilon")
        }})

    def proof(self, path):
        ctx = self.params().ctx
        rec = _read(path)
        try:
            return ident(rec["ID_V"]), OpeningProof(
                self._el(ctx, G1, rec["gamma0"]), self._zp(ctx, rec["f"]), self._zp(ctx, rec["z0"]),
                self._el(ctx, G1, rec["z1"]), self._el(ctx, GT, rec["upsilon"]),
            )
        except (KeyError, ValueError) as exc:
            raise StoreError(f"{path}: bad opening proof ({exc})") from None


__all__ = ["Store", "StoreError"]
