"""Ways to produce signatures that must not verify (for tests and scenarios)."""

import dataclasses

from ..algebra import as_rng
from ..ibgs import VehicleCredential, sign, to_modified

KINDS = ("bad_credential", "tampered_message", "resampled_field")


def forge_full(params, cred: VehicleCredential, ID_O, ID_R, msg: bytes, rng=None, kind="bad_credential"):
    """Full-form forgery: ``(Signature, message presented to the verifier)``."""
    rng = as_rng(rng)
    if kind == "bad_credential":
        fake = dataclasses.replace(cred, D=params.ctx.random_g1(rng))
        return sign(params, fake, ID_O, ID_R, msg, rng), msg
    if kind == "tampered_message":
        return sign(params, cred, ID_O, ID_R, msg, rng), msg + b"!"
    raise ValueError(f"no full-form forgery of kind {kind!r}")


def forge(params, cred: VehicleCredential, ID_O, ID_R, msg: bytes, rng=None, kind="bad_credential"):
    """Return ``(modified signature, message presented to the verifier)``.

    bad_credential    signed honestly with a random D: the challenge hash is
                      consistent, so only the pairing equations catch it.
    tampered_message  honest signature presented with a different message.
    resampled_field   one group element of an honest signature replaced.
    """
    rng = as_rng(rng)
    if kind == "resampled_field":
        sig = to_modified(sign(params, cred, ID_O, ID_R, msg, rng))
        name = rng.choice(["gamma0", "gamma1", "gamma2", "gamma3", "gamma5", "Z1", "Z2", "Z3"])
        return dataclasses.replace(sig, **{name: params.ctx.random_g1(rng)}), msg
    full, shown = forge_full(params, cred, ID_O, ID_R, msg, rng, kind)
    return to_modified(full), shown
