"""Identity-based group signatures for vehicular networks with batch verification."""

from .batchverify import BatchPolicy, Verdict, batch_finalize, precompute_item, small_exponent_test, verify_batch
from .ibgs import (
    ModifiedSignature, Signature, accept_join, group_key, join_issue, join_verify, keygen_gm, keygen_tsd,
    keygen_vehicle, pok_prove, pok_verify, setup, sign, to_modified, verify_individual_modified,
    verify_individual_original,
)
from .opener import RegistrationTable, RevocationList, judge, open_signature
from .scheduler import Job, batch_size_sweep, brute_force_oracle, choose_batch_size, dp_max_weight, schedule_metrics

__version__ = "0.1.0"

__all__ = [
    "BatchPolicy", "Verdict", "batch_finalize", "precompute_item", "small_exponent_test", "verify_batch",
    "ModifiedSignature", "Signature", "accept_join", "group_key", "join_issue", "join_verify", "keygen_gm",
    "keygen_tsd", "keygen_vehicle", "pok_prove", "pok_verify", "setup", "sign", "to_modified",
    "verify_individual_modified", "verify_individual_original", "RegistrationTable", "RevocationList",
    "judge", "open_signature", "Job", "batch_size_sweep", "brute_force_oracle", "choose_batch_size",
    "dp_max_weight", "schedule_metrics",
]
