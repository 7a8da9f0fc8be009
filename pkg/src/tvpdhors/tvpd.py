"""Filter-backed time-valid one-time signature.

Key generation inserts each secret, bound to its 1-based position, into
a partitioned single-hash Bloom filter that doubles as the public key.
Signing is identical to the baseline scheme; verification replaces the
k one-way-function calls with k filter membership checks.  Keys at the
time-valid levels carry a validity window enforced on both sign and
verify; the clock is injectable so the gate is testable.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

from .errors import InvalidPlan, KeyReuseWarning, OutsideTimeWindow
from .hors import (
    Signature,
    expand_secrets,
    sign_with_secrets,
    _sig_shape_ok,
    _verify_indices,
)
from .ohbf import OhbfFilter, ohbf_init
from .params import DEFAULT_TIME_DELTA, SchemeParams, TimePolicy


@dataclass
class TvpdKeyPair:
    sk: list[bytes]
    pk: OhbfFilter
    params: SchemeParams
    used: bool = field(default=False, compare=False)
    # (t0, end) when the key is time-valid, else None; kept unpacked so the
    # per-signature gate check stays off the dataclass attribute path
    window: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        pol = self.params.time_policy
        if self.params.time_valid and pol is not None:
            self.window = (pol.t0, pol.end)


def tvpd_keygen(params: SchemeParams, seed: bytes,
                clock=time.time) -> TvpdKeyPair:
    """Derive the secrets and build the filter public key.

    Secrets are expanded exactly as the baseline's key generation, so
    signatures from either scheme match on a shared seed.  Time-valid
    parameter sets get a validity window starting at the clock unless the
    params already carry one.
    """
    if params.plan is None:
        raise InvalidPlan("key generation needs a partition plan")
    sk = expand_secrets(params, seed)
    filt = ohbf_init(params.plan, params.filter_algo)
    filt.insert_batch(sk, positions=range(params.t))
    if params.time_valid and params.time_policy is None:
        params = params.with_time_policy(
            TimePolicy(t0=int(clock()), t_delta=DEFAULT_TIME_DELTA)
        )
    return TvpdKeyPair(sk, filt, params)


def _gate_open(params: SchemeParams, clock) -> bool:
    pol = params.time_policy
    if pol is None or not params.time_valid:
        return True
    return pol.t0 <= clock() <= pol.end


def tvpd_sign(kp: TvpdKeyPair, message: bytes, clock=time.time) -> Signature:
    """Sign within the validity window; identical output to the baseline."""
    w = kp.window
    if w is not None and not (w[0] <= clock() <= w[1]):
        raise OutsideTimeWindow("signing attempted outside the validity window")
    if kp.used:
        warnings.warn("one-time key reused for signing", KeyReuseWarning)
    sig = sign_with_secrets(kp.params, kp.sk, message)
    kp.used = True
    return sig


def tvpd_verify(pk: OhbfFilter, params: SchemeParams, message: bytes,
                sig: Signature, clock=time.time) -> bool:
    """Membership-check each revealed secret against the filter.

    Accepting path costs one message-hash call, k filter-hash calls, and
    k*p modular reductions.  Rejects outside the validity window, on
    duplicate indices, and on malformed sizes.
    """
    if not _gate_open(params, clock):
        return False
    if not _sig_shape_ok(params, sig):
        return False
    indices = _verify_indices(params, message, sig.ctr)
    if indices is None:
        return False
    return pk.check_all(sig.elements, positions=indices)
