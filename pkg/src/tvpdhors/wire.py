"""Bit-exact serialization of parameters, keys, and signatures.

Every file starts with a fixed header carrying the scheme parameters;
the body depends on the kind byte.  All integers are big-endian.  Secret
keys are persisted as the 32-byte seed, never as the expanded secrets.
Decoding is strict: trailing bytes, short bodies, and unknown field
values are errors, and parsing followed by re-serializing is
byte-identical.
"""

from __future__ import annotations

import struct

from . import hashes
from .errors import InvalidPlan, ParseError, VersionMismatch
from .hors import HorsKeyPair, Signature
from .ohbf import OhbfFilter, PartitionPlan
from .params import SchemeParams, TimePolicy
from .tvpd import TvpdKeyPair

MAGIC = b"TVPD"
VERSION = 1

KIND_PUBLIC = 1
KIND_SECRET_SEED = 2
KIND_SIGNATURE = 3
# extension beyond the three core kinds: the baseline scheme's public key
# (t one-way images), so the CLI can round-trip either scheme
KIND_HORS_PUBLIC = 4

_KINDS = {KIND_PUBLIC, KIND_SECRET_SEED, KIND_SIGNATURE, KIND_HORS_PUBLIC}

SEED_LEN = 32

_FIXED = struct.Struct(">4sBBBIHHHBBBB")
_TIMEPOLICY = struct.Struct(">QQ")

EXTENSIONS = {
    KIND_PUBLIC: ".tvpd-pk",
    KIND_SECRET_SEED: ".tvpd-sk",
    KIND_SIGNATURE: ".tvpd-sig",
    KIND_HORS_PUBLIC: ".tvpd-pk",
}


def _encode_header(params: SchemeParams, kind: int) -> bytes:
    policy = params.time_policy
    head = _FIXED.pack(
        MAGIC,
        VERSION,
        kind,
        params.kappa & 0xFF,
        params.t,
        params.k,
        params.l_bits,
        params.p,
        hashes.WIRE_IDS[params.msg_algo],
        hashes.WIRE_IDS[params.owf_algo],
        hashes.WIRE_IDS[params.filter_algo],
        1 if policy is not None else 0,
    )
    if policy is not None:
        head += _TIMEPOLICY.pack(policy.t0, policy.t_delta)
    return head


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, fieldname: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ParseError(fieldname, self.pos, "input truncated")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self, fieldname: str) -> int:
        return self.take(1, fieldname)[0]

    def u16(self, fieldname: str) -> int:
        return int.from_bytes(self.take(2, fieldname), "big")

    def u32(self, fieldname: str) -> int:
        return int.from_bytes(self.take(4, fieldname), "big")

    def u64(self, fieldname: str) -> int:
        return int.from_bytes(self.take(8, fieldname), "big")

    def done(self) -> None:
        if self.pos != len(self.data):
            raise ParseError("trailing", self.pos, "unexpected trailing bytes")


def _algo_from_id(value: int, fieldname: str, offset: int) -> str:
    algo = hashes.ALGO_BY_WIRE_ID.get(value)
    if algo is None:
        raise ParseError(fieldname, offset, f"unknown algorithm id {value}")
    return algo


def _decode_header(r: _Reader, expected_kind: int | None,
                   plan: PartitionPlan | None = None) -> tuple[SchemeParams, int]:
    if r.take(4, "magic") != MAGIC:
        raise ParseError("magic", 0, "bad magic")
    version = r.u8("version")
    if version != VERSION:
        raise VersionMismatch(f"unsupported format version {version}")
    kind = r.u8("kind")
    if kind not in _KINDS:
        raise ParseError("kind", r.pos - 1, f"unknown kind {kind}")
    if expected_kind is not None and kind != expected_kind:
        raise ParseError("kind", r.pos - 1,
                         f"expected kind {expected_kind}, found {kind}")
    kappa = r.u8("kappa")
    t = r.u32("t")
    k = r.u16("k")
    l_bits = r.u16("l")
    p = r.u16("p")
    pos = r.pos
    msg_algo = _algo_from_id(r.u8("H_algo"), "H_algo", pos)
    owf_algo = _algo_from_id(r.u8("f_algo"), "f_algo", pos + 1)
    filter_algo = _algo_from_id(r.u8("h_algo"), "h_algo", pos + 2)
    flag = r.u8("time_policy_flag")
    if flag not in (0, 1):
        raise ParseError("time_policy_flag", r.pos - 1, f"bad flag {flag}")
    policy = None
    if flag:
        t0 = r.u64("t0")
        t_delta = r.u64("t_delta")
        try:
            policy = TimePolicy(t0, t_delta)
        except ValueError as e:
            raise ParseError("t_delta", r.pos - 8, str(e)) from None
    try:
        params = SchemeParams(
            t=t, k=k, l_bits=l_bits, p=p,
            msg_algo=msg_algo, owf_algo=owf_algo, filter_algo=filter_algo,
            plan=plan, kappa=kappa,
            time_valid=policy is not None, time_policy=policy,
        )
    except ValueError as e:
        raise ParseError("params", 7, str(e)) from None
    return params, kind


# ---- public key (filter) ------------------------------------------------

def encode_public(key, params: SchemeParams | None = None) -> bytes:
    """Serialize a filter public key.

    Accepts a TvpdKeyPair, or an OhbfFilter together with its params.
    Body: the p partition sizes as u32, then the bit vector packed
    MSB-first and padded to a byte boundary.
    """
    if isinstance(key, TvpdKeyPair):
        filt, params = key.pk, key.params
    else:
        filt = key
        if params is None:
            raise ValueError("params required when passing a bare filter")
    body = b"".join(n.to_bytes(4, "big") for n in filt.plan.sizes)
    return _encode_header(params, KIND_PUBLIC) + body + bytes(filt.bits)


def decode_public(data: bytes) -> tuple[OhbfFilter, SchemeParams]:
    r = _Reader(data)
    params, _ = _decode_header(r, KIND_PUBLIC)
    sizes_off = r.pos
    sizes = tuple(r.u32("plan_sizes") for _ in range(params.p))
    try:
        plan = PartitionPlan(sizes)
    except InvalidPlan as e:
        raise ParseError("plan_sizes", sizes_off, str(e)) from None
    nbytes = (plan.total_bits + 7) // 8
    bits = bytearray(r.take(nbytes, "bit_vector"))
    r.done()
    params = SchemeParams(
        t=params.t, k=params.k, l_bits=params.l_bits, p=params.p,
        msg_algo=params.msg_algo, owf_algo=params.owf_algo,
        filter_algo=params.filter_algo, plan=plan, kappa=params.kappa,
        time_valid=params.time_valid, time_policy=params.time_policy,
    )
    # keys always hold all t secrets; restore the diagnostic count
    filt = OhbfFilter(plan, params.filter_algo, bits=bits,
                      inserted_count=params.t)
    return filt, params


# ---- secret seed --------------------------------------------------------

def encode_secret(params: SchemeParams, seed: bytes) -> bytes:
    """Header plus the 32-byte seed the secrets expand from."""
    if len(seed) != SEED_LEN:
        raise ValueError(f"seed must be {SEED_LEN} bytes")
    return _encode_header(params, KIND_SECRET_SEED) + seed


def decode_secret(data: bytes) -> tuple[SchemeParams, bytes]:
    r = _Reader(data)
    params, _ = _decode_header(r, KIND_SECRET_SEED)
    seed = r.take(SEED_LEN, "seed")
    r.done()
    return params, seed


# ---- signature -----------------------------------------------------------

def encode_signature(params: SchemeParams, sig: Signature) -> bytes:
    """Header, the 4-byte counter, then the k revealed strings in order."""
    if len(sig.elements) != params.k:
        raise ValueError("signature has wrong element count")
    nbytes = params.element_bytes
    if any(len(e) != nbytes for e in sig.elements):
        raise ValueError("signature element has wrong length")
    return (
        _encode_header(params, KIND_SIGNATURE)
        + sig.ctr.to_bytes(4, "big")
        + b"".join(sig.elements)
    )


def decode_signature(data: bytes) -> tuple[SchemeParams, Signature]:
    r = _Reader(data)
    params, _ = _decode_header(r, KIND_SIGNATURE)
    ctr = r.u32("ctr")
    nbytes = params.element_bytes
    elements = tuple(r.take(nbytes, "elements") for _ in range(params.k))
    r.done()
    return params, Signature(elements, ctr)


# ---- baseline public key -------------------------------------------------

def encode_hors_public(kp: HorsKeyPair) -> bytes:
    """The t one-way images, concatenated."""
    return _encode_header(kp.params, KIND_HORS_PUBLIC) + b"".join(kp.pk)


def decode_hors_public(data: bytes) -> tuple[list[bytes], SchemeParams]:
    r = _Reader(data)
    params, _ = _decode_header(r, KIND_HORS_PUBLIC)
    nbytes = hashes.OUTPUT_BITS[params.owf_algo] // 8
    pk = [r.take(nbytes, "pk_digests") for _ in range(params.t)]
    r.done()
    return pk, params


def peek_kind(data: bytes) -> int:
    """Kind byte of a serialized blob, after checking magic and version."""
    r = _Reader(data)
    if r.take(4, "magic") != MAGIC:
        raise ParseError("magic", 0, "bad magic")
    version = r.u8("version")
    if version != VERSION:
        raise VersionMismatch(f"unsupported format version {version}")
    kind = r.u8("kind")
    if kind not in _KINDS:
        raise ParseError("kind", 5, f"unknown kind {kind}")
    return kind
