"""Time-valid one-time signatures over a partitioned single-hash Bloom filter."""

from .errors import (
    CounterExhausted,
    InfeasiblePlan,
    InvalidPlan,
    OutsideTimeWindow,
    ParseError,
    TvpdError,
    UnknownAlgorithm,
    UnknownPreset,
    VersionMismatch,
)
from .hashes import Digest, digest, digest_to_uint
from .hors import (
    HorsKeyPair,
    Signature,
    derive_indices,
    find_counter,
    hors_keygen,
    hors_sign,
    hors_verify,
)
from .ohbf import OhbfFilter, PartitionPlan, ohbf_check, ohbf_init, ohbf_insert
from .params import (
    SchemeParams,
    SecurityReport,
    TimePolicy,
    fpp,
    plan_partitions,
    preset,
    security_report,
)
from .tvpd import TvpdKeyPair, tvpd_keygen, tvpd_sign, tvpd_verify

__version__ = "0.1.0"

__all__ = [
    "CounterExhausted",
    "Digest",
    "HorsKeyPair",
    "InfeasiblePlan",
    "InvalidPlan",
    "OhbfFilter",
    "OutsideTimeWindow",
    "ParseError",
    "PartitionPlan",
    "SchemeParams",
    "SecurityReport",
    "Signature",
    "TimePolicy",
    "TvpdError",
    "TvpdKeyPair",
    "UnknownAlgorithm",
    "UnknownPreset",
    "VersionMismatch",
    "derive_indices",
    "digest",
    "digest_to_uint",
    "find_counter",
    "fpp",
    "hors_keygen",
    "hors_sign",
    "hors_verify",
    "ohbf_check",
    "ohbf_init",
    "ohbf_insert",
    "plan_partitions",
    "preset",
    "security_report",
    "tvpd_keygen",
    "tvpd_sign",
    "tvpd_verify",
]
