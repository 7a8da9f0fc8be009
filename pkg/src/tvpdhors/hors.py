"""Baseline hash-revealed-subset one-time signature.

Serves as the differential oracle for index derivation and as the
benchmark comparator.  Index derivation, seed expansion, and the
weak-message counter loop are shared byte-for-byte with the
filter-backed scheme in tvpd.py.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

from . import hashes, instrument
from .errors import CounterExhausted, KeyReuseWarning
from .params import SchemeParams

try:
    from . import _kernel
except ImportError:  # pragma: no cover
    _kernel = None

MAX_COUNTER_ATTEMPTS = 1 << 20
SEED_BYTES = 32

# hashlib constructors for the message-hash role; lets the counter loop
# reuse the hashed message prefix instead of rehashing it every retry.
_HASHLIB_CTORS = {
    hashes.SHA2_256: hashlib.sha256,
    hashes.SHA2_512: hashlib.sha512,
}


def encode_index(value: int) -> bytes:
    """The 4-byte big-endian encoding used for counters and positions."""
    return value.to_bytes(4, "big")


# key generation touches every index 1..t; keep their encodings around
_BE32_CACHE: list[bytes] = []


def _be32_cached(value: int) -> bytes:
    if value >= len(_BE32_CACHE):
        if value > 1 << 16:
            return value.to_bytes(4, "big")
        _BE32_CACHE.extend(
            i.to_bytes(4, "big") for i in range(len(_BE32_CACHE), value + 1024)
        )
    return _BE32_CACHE[value]


def element_label(position: int) -> bytes:
    """Filter binding for a secret at 0-based `position`: 1-based index."""
    return _be32_cached(position + 1)


@dataclass
class Signature:
    """k revealed secret strings plus the weak-message retry counter."""

    elements: tuple[bytes, ...]
    ctr: int

    def __post_init__(self):
        self.elements = tuple(self.elements)
        if not 0 <= self.ctr < 1 << 32:
            raise ValueError("ctr must fit an unsigned 32-bit integer")


@dataclass
class HorsKeyPair:
    sk: list[bytes]
    pk: list[bytes]
    params: SchemeParams
    used: bool = field(default=False, compare=False)


def _split_indices_py(data: bytes, k: int, log2_t: int) -> tuple[int, ...]:
    """Leftmost k*log2_t bits of `data`, split into big-endian chunks."""
    total = len(data) * 8
    prefix = int.from_bytes(data, "big") >> (total - k * log2_t)
    mask = (1 << log2_t) - 1
    return tuple(
        (prefix >> ((k - 1 - j) * log2_t)) & mask for j in range(k)
    )


def split_digest_indices(data: bytes, k: int, log2_t: int) -> tuple[int, ...]:
    if _kernel is not None:
        return _kernel.split_indices(data, k, log2_t)
    return _split_indices_py(data, k, log2_t)


def _indices_all_distinct(data: bytes, k: int, log2_t: int) -> bool:
    if _kernel is not None:
        return _kernel.indices_distinct(data, k, log2_t)
    idx = _split_indices_py(data, k, log2_t)
    return len(set(idx)) == k


def derive_indices(params: SchemeParams, message: bytes, ctr: int) -> tuple[int, ...]:
    """Secret positions selected by the message at a given counter.

    Hashes message || encode32be(ctr), keeps the leftmost k*log2(t) bits,
    and reads k consecutive log2(t)-bit big-endian chunks.
    """
    d = hashes.digest(params.msg_algo, message + encode_index(ctr), role="msg")
    return split_digest_indices(d.data, params.k, params.log2_t)


def _counter_hasher(params: SchemeParams, message: bytes):
    """ctr -> digest bytes of message || encode32be(ctr).

    Uses a copied hashlib midstate where possible so the retry loop does
    not rehash the message body; byte-identical to derive_indices' input.
    """
    ctor = _HASHLIB_CTORS.get(params.msg_algo)
    if ctor is not None:
        base = ctor(message)
        algo = params.msg_algo

        def hash_ctr(ctr: int) -> bytes:
            if instrument.counting_active():
                instrument.record_hash(algo, role="msg")
            h = base.copy()
            h.update(ctr.to_bytes(4, "big"))
            return h.digest()

        return hash_ctr

    def hash_ctr(ctr: int) -> bytes:
        return hashes.digest(params.msg_algo, message + encode_index(ctr),
                             role="msg").data

    return hash_ctr


def find_counter(params: SchemeParams, message: bytes) -> int:
    """Smallest counter whose derived indices are pairwise distinct."""
    hash_ctr = _counter_hasher(params, message)
    k, log2_t = params.k, params.log2_t
    for ctr in range(MAX_COUNTER_ATTEMPTS):
        if _indices_all_distinct(hash_ctr(ctr), k, log2_t):
            return ctr
    raise CounterExhausted(
        f"no distinct index set within {MAX_COUNTER_ATTEMPTS} counters"
    )


def expand_secrets(params: SchemeParams, seed: bytes) -> list[bytes]:
    """The t secret strings: first l bits of H(seed || i), i = 1..t."""
    if len(seed) != SEED_BYTES:
        raise ValueError(f"seed must be {SEED_BYTES} bytes")
    nbytes = params.element_bytes
    ctor = _HASHLIB_CTORS.get(params.msg_algo)
    if ctor is not None:
        if instrument.counting_active():
            instrument.record_hash(params.msg_algo, params.t, role="msg")
        _be32_cached(params.t)  # warm the table
        cache = _BE32_CACHE
        copy = ctor(seed).copy
        out = []
        append = out.append
        for i in range(1, params.t + 1):
            h = copy()
            h.update(cache[i])
            append(h.digest()[:nbytes])
        return out
    return [
        hashes.digest(params.msg_algo, seed + encode_index(i), role="msg").data[:nbytes]
        for i in range(1, params.t + 1)
    ]


def sign_with_secrets(params: SchemeParams, sk: list[bytes], message: bytes) -> Signature:
    """Counter-hardened signing core, shared by both schemes."""
    ctr = find_counter(params, message)
    indices = derive_indices(params, message, ctr)
    return Signature(tuple(sk[i] for i in indices), ctr)


def _sig_shape_ok(params: SchemeParams, sig: Signature) -> bool:
    # total-length check; elements of compensating wrong sizes would still
    # fail the per-element hash comparison
    elements = sig.elements
    return (
        len(elements) == params.k
        and 0 <= sig.ctr < 1 << 32
        and sum(map(len, elements)) == params.k * params.element_bytes
    )


def _verify_indices(params: SchemeParams, message: bytes,
                    ctr: int) -> tuple[int, ...] | None:
    """Indices for verification, or None when any index repeats."""
    algo = params.msg_algo
    data = hashes._BACKENDS[algo](message + encode_index(ctr))
    if instrument._active:
        instrument.record_hash(algo, role="msg")
    if _kernel is not None:
        return _kernel.split_indices_checked(data, params.k, params.log2_t)
    idx = _split_indices_py(data, params.k, params.log2_t)
    return idx if len(set(idx)) == params.k else None


def hors_keygen(params: SchemeParams, seed: bytes) -> HorsKeyPair:
    """Secrets from the seed; public key is their one-way images."""
    sk = expand_secrets(params, seed)
    owf = hashes._BACKENDS[params.owf_algo]
    if instrument.counting_active():
        instrument.record_hash(params.owf_algo, params.t, role="owf")
    pk = [owf(s) for s in sk]
    return HorsKeyPair(sk, pk, params)


def hors_sign(kp: HorsKeyPair, message: bytes) -> Signature:
    """Reveal the k secrets selected by the message.

    One-time use is the caller's contract; a repeat signing works (and is
    deterministic) but raises KeyReuseWarning.
    """
    if kp.used:
        warnings.warn("one-time key reused for signing", KeyReuseWarning)
    sig = sign_with_secrets(kp.params, kp.sk, message)
    kp.used = True
    return sig


def hors_verify(pk: list[bytes], params: SchemeParams, message: bytes,
                sig: Signature) -> bool:
    """Recompute indices, reject duplicates, compare one-way images."""
    if len(pk) != params.t or not _sig_shape_ok(params, sig):
        return False
    indices = _verify_indices(params, message, sig.ctr)
    if indices is None:
        return False
    owf = hashes._BACKENDS[params.owf_algo]
    if instrument.counting_active():
        instrument.record_hash(params.owf_algo, params.k, role="owf")
    for element, i in zip(sig.elements, indices):
        if owf(element) != pk[i]:
            return False
    return True
