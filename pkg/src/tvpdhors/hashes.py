"""Hash registry for the three roles the schemes need.

One closed, enumerated set of algorithms covers the message hash, the
baseline one-way function, and the filter's non-cryptographic hash.
Identifiers appear verbatim in config files, CLI flags, and key files.
Digests are canonical byte strings; their integer value is always the
big-endian interpretation, so modular reductions are bit-exact across
implementations.
"""

from __future__ import annotations

import hashlib
from typing import Callable, NamedTuple

import cityhashcrc
import xxhash

from . import instrument
from .errors import UnknownAlgorithm

SHA2_256 = "SHA2-256"
SHA2_512 = "SHA2-512"
BLAKE2S_128 = "BLAKE2s-128"
BLAKE2S_160 = "BLAKE2s-160"
BLAKE2B_256 = "BLAKE2b-256"
XXH3_64 = "XXH3-64"
XXH3_128 = "XXH3-128"
CITY_256 = "CITY-256"

OUTPUT_BITS: dict[str, int] = {
    SHA2_256: 256,
    SHA2_512: 512,
    BLAKE2S_128: 128,
    BLAKE2S_160: 160,
    BLAKE2B_256: 256,
    XXH3_64: 64,
    XXH3_128: 128,
    CITY_256: 256,
}

# Single-octet codes used in key files and by the native kernel.
WIRE_IDS: dict[str, int] = {
    SHA2_256: 1,
    SHA2_512: 2,
    BLAKE2S_128: 3,
    BLAKE2S_160: 4,
    BLAKE2B_256: 5,
    XXH3_64: 6,
    XXH3_128: 7,
    CITY_256: 8,
}
ALGO_BY_WIRE_ID: dict[int, str] = {v: k for k, v in WIRE_IDS.items()}


class Digest(NamedTuple):
    data: bytes
    bit_len: int


def _blake2s_128(m: bytes) -> bytes:
    return hashlib.blake2s(m, digest_size=16).digest()


def _blake2s_160(m: bytes) -> bytes:
    return hashlib.blake2s(m, digest_size=20).digest()


def _blake2b_256(m: bytes) -> bytes:
    return hashlib.blake2b(m, digest_size=32).digest()


def _sha2_256(m: bytes) -> bytes:
    return hashlib.sha256(m).digest()


def _sha2_512(m: bytes) -> bytes:
    return hashlib.sha512(m).digest()


# xxh3 one-shots already emit canonical big-endian digests.  CityHash-256
# has no canonical serialization upstream; this package fixes it as the
# 32 bytes returned by the cityhash binding (unseeded variant).
_BACKENDS: dict[str, Callable[[bytes], bytes]] = {
    SHA2_256: _sha2_256,
    SHA2_512: _sha2_512,
    BLAKE2S_128: _blake2s_128,
    BLAKE2S_160: _blake2s_160,
    BLAKE2B_256: _blake2b_256,
    XXH3_64: xxhash.xxh3_64_digest,
    XXH3_128: xxhash.xxh3_128_digest,
    CITY_256: cityhashcrc.CityHashCrc256Bytes,
}


def digest(algo: str, message: bytes, role: str | None = None) -> Digest:
    """Hash `message` with the named algorithm.

    `role` tags the call for instrumentation ("msg", "owf", "filter").
    Raises UnknownAlgorithm for identifiers outside the registry.
    """
    try:
        fn = _BACKENDS[algo]
    except KeyError:
        raise UnknownAlgorithm(f"unknown hash algorithm {algo!r}") from None
    if instrument.counting_active():
        instrument.record_hash(algo, role=role)
    return Digest(fn(message), OUTPUT_BITS[algo])


def digest_to_uint(d: Digest) -> int:
    """Big-endian integer value of a digest."""
    return int.from_bytes(d.data, "big")
