import pytest

from conftest import SEED_A, SEED_B
from tvpdhors import hashes, preset
from tvpdhors.errors import CounterExhausted, KeyReuseWarning
from tvpdhors.hors import (
    Signature,
    derive_indices,
    expand_secrets,
    find_counter,
    hors_keygen,
    hors_sign,
    hors_verify,
)
from tvpdhors import hors as hors_mod

P32 = preset(32)

# sha256(b"abc" || 00000000) and || 00000001, sliced into 6-bit chunks by an
# independent bit-string oracle (frozen)
GOLDEN_ABC_CTR0 = (51, 50, 54, 49, 43, 9, 33, 39, 55, 43, 55, 56, 51, 41, 7, 57)
GOLDEN_ABC_CTR1 = (17, 44, 14, 6, 58, 60, 51, 47, 32, 43, 40, 11, 44, 11, 2, 21)


def test_derive_indices_golden_vector():
    assert derive_indices(P32, b"abc", 0) == GOLDEN_ABC_CTR0
    assert derive_indices(P32, b"abc", 1) == GOLDEN_ABC_CTR1
    assert GOLDEN_ABC_CTR0 != GOLDEN_ABC_CTR1


def test_index_encoding_is_4_byte_big_endian():
    assert hors_mod.encode_index(0) == b"\x00\x00\x00\x00"
    assert hors_mod.encode_index(258) == b"\x00\x00\x01\x02"
    # labels bind the 1-based position
    assert hors_mod.element_label(0) == b"\x00\x00\x00\x01"
    assert hors_mod.element_label(499) == (500).to_bytes(4, "big")


def test_derive_indices_shape(rng, any_preset):
    p = any_preset
    idx = derive_indices(p, rng.randbytes(64), 0)
    assert len(idx) == p.k
    assert all(0 <= i < p.t for i in idx)


def test_derive_indices_deterministic(rng):
    m = rng.randbytes(100)
    assert derive_indices(P32, m, 7) == derive_indices(P32, m, 7)


def test_counter_hash_equals_one_shot(rng):
    """The midstate-copy retry loop hashes exactly message || be32(ctr)."""
    for p in (P32, preset(128)):
        m = rng.randbytes(256)
        hash_ctr = hors_mod._counter_hasher(p, m)
        for ctr in (0, 1, 77, 65536):
            one_shot = hashes.digest(p.msg_algo, m + ctr.to_bytes(4, "big"))
            assert hash_ctr(ctr) == one_shot.data


def test_find_counter_zero_for_non_weak_message(rng):
    # at t=256, k=16 most messages have distinct indices at ctr 0
    p = preset(64)
    found = False
    for _ in range(50):
        m = rng.randbytes(256)
        if find_counter(p, m) == 0:
            found = True
            break
    assert found


def test_find_counter_skips_weak_messages(rng):
    # "abc" collides at ctr=0 (see golden vector); any brute-forced weak
    # message must land on a counter with distinct indices
    assert len(set(GOLDEN_ABC_CTR0)) < 16
    ctr = find_counter(P32, b"abc")
    assert ctr >= 1
    assert len(set(derive_indices(P32, b"abc", ctr))) == 16


def test_find_counter_terminates_on_tiny_parameter_space():
    tiny = preset(32)
    # t=4, k=2: only a quarter of counters give distinct pairs
    from tvpdhors.params import SchemeParams

    p = SchemeParams(t=4, k=2, l_bits=32, p=8, msg_algo=hashes.SHA2_256,
                     owf_algo=hashes.SHA2_256, filter_algo=hashes.XXH3_64,
                     plan=tiny.plan, kappa=0)
    for m in (b"x", b"y", b"z"):
        ctr = find_counter(p, m)
        assert len(set(derive_indices(p, m, ctr))) == 2


def test_counter_exhaustion_guard(monkeypatch):
    monkeypatch.setattr(hors_mod, "MAX_COUNTER_ATTEMPTS", 16)
    monkeypatch.setattr(hors_mod, "_indices_all_distinct",
                        lambda data, k, logt: False)
    with pytest.raises(CounterExhausted):
        find_counter(P32, b"msg")


def test_keygen_deterministic_and_sized():
    kp1 = hors_keygen(P32, SEED_A)
    kp2 = hors_keygen(P32, SEED_A)
    assert kp1.sk == kp2.sk and kp1.pk == kp2.pk
    assert len(kp1.sk) == 64
    assert sum(len(s) for s in kp1.sk) == 256  # 0.25 KB of secrets
    assert all(len(v) == 32 for v in kp1.pk)


def test_keygen_distinct_seeds_differ(rng):
    for _ in range(100):
        s1, s2 = rng.randbytes(32), rng.randbytes(32)
        if s1 == s2:
            continue
        assert expand_secrets(P32, s1) != expand_secrets(P32, s2)


def test_expand_secrets_are_hash_prefixes():
    sk = expand_secrets(P32, SEED_A)
    for i, s in enumerate(sk, start=1):
        full = hashes.digest(P32.msg_algo, SEED_A + i.to_bytes(4, "big"))
        assert s == full.data[:4]


def test_sign_verify_round_trip(rng, any_preset):
    kp = hors_keygen(any_preset, SEED_A)
    for _ in range(20):
        m = rng.randbytes(256)
        kp.used = False
        sig = hors_sign(kp, m)
        assert hors_verify(kp.pk, any_preset, m, sig)


def test_sign_deterministic(rng):
    kp = hors_keygen(P32, SEED_A)
    m = rng.randbytes(256)
    s1 = hors_sign(kp, m)
    with pytest.warns(KeyReuseWarning):
        s2 = hors_sign(kp, m)
    assert s1 == s2


def test_signature_elements_in_derivation_order(rng):
    kp = hors_keygen(P32, SEED_A)
    m = rng.randbytes(256)
    sig = hors_sign(kp, m)
    idx = derive_indices(P32, m, sig.ctr)
    assert sig.elements == tuple(kp.sk[i] for i in idx)
    assert len(set(idx)) == P32.k


def test_every_single_bit_flip_in_one_element_rejected(rng):
    kp = hors_keygen(P32, SEED_A)
    m = rng.randbytes(256)
    sig = hors_sign(kp, m)
    target = 5
    for bit in range(P32.l_bits):
        mutated = bytearray(sig.elements[target])
        mutated[bit >> 3] ^= 0x80 >> (bit & 7)
        bad = Signature(
            sig.elements[:target] + (bytes(mutated),) + sig.elements[target + 1:],
            sig.ctr,
        )
        assert not hors_verify(kp.pk, P32, m, bad)


def test_counter_tamper_rejected(rng):
    kp = hors_keygen(P32, SEED_A)
    rejected = 0
    for _ in range(30):
        m = rng.randbytes(256)
        kp.used = False
        sig = hors_sign(kp, m)
        if not hors_verify(kp.pk, P32, m, Signature(sig.elements, sig.ctr + 1)):
            rejected += 1
    assert rejected == 30


def test_random_forgeries_rejected(rng):
    kp = hors_keygen(P32, SEED_A)
    m = rng.randbytes(256)
    ctr = find_counter(P32, m)
    for _ in range(100_000):
        fake = Signature(tuple(rng.randbytes(4) for _ in range(16)), ctr)
        assert not hors_verify(kp.pk, P32, m, fake)


def test_malformed_sizes_return_false(rng):
    kp = hors_keygen(P32, SEED_A)
    m = rng.randbytes(256)
    sig = hors_sign(kp, m)
    assert not hors_verify(kp.pk, P32, m, Signature(sig.elements[:-1], sig.ctr))
    short = (sig.elements[0][:3],) + sig.elements[1:]
    assert not hors_verify(kp.pk, P32, m, Signature(short, sig.ctr))
    assert not hors_verify(kp.pk[:-1], P32, m, sig)
