import pytest
from hypothesis import given, strategies as st

from tvpdhors import hashes
from tvpdhors.errors import UnknownAlgorithm

ALL_ALGOS = list(hashes.OUTPUT_BITS)

EXPECTED_BITS = {
    "SHA2-256": 256,
    "SHA2-512": 512,
    "BLAKE2s-128": 128,
    "BLAKE2s-160": 160,
    "BLAKE2b-256": 256,
    "XXH3-64": 64,
    "XXH3-128": 128,
    "CITY-256": 256,
}


def test_registry_is_exactly_the_eight_algorithms():
    assert hashes.OUTPUT_BITS == EXPECTED_BITS


def test_sha256_empty_string_known_answer():
    # independently verifiable: sha256 of the empty string
    d = hashes.digest(hashes.SHA2_256, b"")
    assert d.data.hex() == (
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    )
    assert d.bit_len == 256


@pytest.mark.parametrize("algo", ALL_ALGOS)
def test_declared_length_and_determinism(algo, rng):
    for _ in range(1000):
        m = rng.randbytes(rng.randrange(0, 300))
        d1 = hashes.digest(algo, m)
        d2 = hashes.digest(algo, m)
        assert d1 == d2
        assert d1.bit_len == EXPECTED_BITS[algo]
        assert len(d1.data) * 8 == d1.bit_len


def test_unknown_algorithm_raises():
    with pytest.raises(UnknownAlgorithm):
        hashes.digest("MD5", b"x")


def test_digest_to_uint_small_values():
    assert hashes.digest_to_uint(hashes.Digest(b"\x00\x00\x01", 24)) == 1
    assert hashes.digest_to_uint(hashes.Digest(b"\x01\x00", 16)) == 256
    d = hashes.digest(hashes.XXH3_64, b"anything")
    assert hashes.digest_to_uint(d) < 1 << 64


@given(st.binary(min_size=1, max_size=32), st.binary(min_size=1, max_size=32))
def test_digest_to_uint_monotone_in_lexicographic_order(a, b):
    if len(a) != len(b):
        return
    ua = hashes.digest_to_uint(hashes.Digest(a, len(a) * 8))
    ub = hashes.digest_to_uint(hashes.Digest(b, len(b) * 8))
    assert (a < b) == (ua < ub)
    assert (a == b) == (ua == ub)


def test_wire_ids_are_one_octet_and_unique():
    ids = list(hashes.WIRE_IDS.values())
    assert len(set(ids)) == len(ids)
    assert all(1 <= v <= 255 for v in ids)
    assert hashes.ALGO_BY_WIRE_ID[hashes.WIRE_IDS["CITY-256"]] == "CITY-256"
