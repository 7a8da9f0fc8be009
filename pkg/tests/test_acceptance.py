"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`.  Timing-sensitive
criteria assert machine-relative ratios only; absolute microseconds are
hardware-dependent and never checked.
"""

import math
import random
import statistics
import time

import pytest

from tvpdhors import bench, hashes, preset, wire
from tvpdhors.hors import (
    Signature,
    derive_indices,
    find_counter,
    hors_keygen,
    hors_sign,
    hors_verify,
)
from tvpdhors.instrument import CallCounter
from tvpdhors.ohbf import PartitionPlan, ohbf_init
from tvpdhors.params import all_presets, fpp, plan_partitions, security_report
from tvpdhors.tvpd import tvpd_keygen, tvpd_sign, tvpd_verify

CLOCK = lambda: 1_700_000_000.0
PUBLISHED_PARTITIONS = (971, 977, 983, 991, 997, 1009, 1013, 1019)

# the eight sign/verify parameter sets the scheme publishes
SIGNING_PRESETS = [(32, 1), (48, 1), (64, 1), (64, 2), (72, 1), (96, 1),
                   (128, 1), (128, 2)]


def _ok(name: str, detail: str = "") -> None:
    print(f"[PASS] {name}" + (f" ({detail})" if detail else ""))


def test_criterion_01_partition_reproduction():
    t0 = time.perf_counter()
    plan = plan_partitions(7960, 8)
    elapsed = time.perf_counter() - t0
    assert plan.sizes == PUBLISHED_PARTITIONS
    assert elapsed < 1.0
    _ok("criterion 1: partition plan reproduces the published list",
        f"{elapsed * 1000:.1f} ms")


def test_criterion_02_fpp_formula_and_monte_carlo():
    bits = -math.log2(fpp(PartitionPlan(PUBLISHED_PARTITIONS), 64))
    assert abs(bits - 32.0) <= 0.3

    # Monte-Carlo cross-check on a shrunken plan, 10^5 probes over fresh
    # filter instances; 3 inserts keeps the exponential approximation
    # within the noise (see decisions log)
    rng = random.Random(1234)
    plan = PartitionPlan((13, 17, 19))
    inserted = 3
    hits = total = 0
    for _ in range(200):
        filt = ohbf_init(plan, hashes.XXH3_64)
        filt.insert_batch([rng.randbytes(8) for _ in range(inserted)])
        hits += filt.count_positives([rng.randbytes(8) for _ in range(500)])
        total += 500
    predicted = fpp(plan, inserted)
    se = math.sqrt(predicted * (1 - predicted) / total)
    assert abs(hits / total - predicted) <= 3 * se
    _ok("criterion 2: fpp formula",
        f"-log2(fpp)={bits:.3f}; MC {hits / total:.5f} vs {predicted:.5f}")


def test_criterion_03_security_calculator_all_rows():
    rows = all_presets()
    assert len(rows) == 9
    for params in rows:
        rep = security_report(params)
        assert rep.kappa == params.kappa, (params.kappa, params.variant, rep)
    rep32 = security_report(preset(32))
    assert (rep32.trunc_hash_bits, rep32.hors_subset_bits,
            rep32.ohbf_hash_bits) == (48, 32, 32)
    _ok("criterion 3: security calculator matches all 9 published rows")


def test_criterion_04_completeness_ten_thousand_messages_per_preset():
    rng = random.Random(42)
    t0 = time.perf_counter()
    for kappa, variant in SIGNING_PRESETS:
        params = preset(kappa, variant)
        kp = tvpd_keygen(params, rng.randbytes(32), clock=CLOCK)
        for _ in range(10_000):
            m = rng.randbytes(256)
            kp.used = False
            sig = tvpd_sign(kp, m, clock=CLOCK)
            assert tvpd_verify(kp.pk, kp.params, m, sig, clock=CLOCK)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    _ok("criterion 4: 10^4 sign/verify round trips per preset, 0 false rejects",
        f"{elapsed:.1f} s for {len(SIGNING_PRESETS)} presets")


def test_criterion_05_forgery_and_mutation_rejection():
    rng = random.Random(99)
    params = preset(32)
    kp = tvpd_keygen(params, rng.randbytes(32), clock=CLOCK)

    m = rng.randbytes(256)
    ctr = find_counter(params, m)
    accepted = 0
    for _ in range(100_000):
        forged = Signature(tuple(rng.randbytes(4) for _ in range(16)), ctr)
        if tvpd_verify(kp.pk, kp.params, m, forged, clock=CLOCK):
            accepted += 1
    assert accepted == 0

    rejected = 0
    trials = 10_000
    for i in range(trials):
        msg = rng.randbytes(256)
        kp.used = False
        sig = tvpd_sign(kp, msg, clock=CLOCK)
        kind = i % 3
        if kind == 0:  # flip one bit in one element
            els = list(sig.elements)
            j = rng.randrange(16)
            bit = rng.randrange(32)
            el = bytearray(els[j])
            el[bit >> 3] ^= 0x80 >> (bit & 7)
            els[j] = bytes(el)
            bad = Signature(tuple(els), sig.ctr)
        elif kind == 1:  # swap two distinct elements
            els = list(sig.elements)
            a, b = rng.sample(range(16), 2)
            if els[a] == els[b]:
                rejected += 1
                continue
            els[a], els[b] = els[b], els[a]
            bad = Signature(tuple(els), sig.ctr)
        else:  # tamper the counter
            bad = Signature(sig.elements, sig.ctr + 1 + rng.randrange(100))
        if not tvpd_verify(kp.pk, kp.params, msg, bad, clock=CLOCK):
            rejected += 1
    assert rejected == trials
    _ok("criterion 5: 10^5 forgeries and 10^4 mutations all rejected")


GOLDEN_ABC_CTR0 = (51, 50, 54, 49, 43, 9, 33, 39, 55, 43, 55, 56, 51, 41, 7, 57)


def test_criterion_06_differential_equivalence():
    assert derive_indices(preset(32), b"abc", 0) == GOLDEN_ABC_CTR0
    rng = random.Random(7)
    for kappa, variant in SIGNING_PRESETS:
        params = preset(kappa, variant)
        pairs = 0
        for _ in range(50):
            seed = rng.randbytes(32)
            tkp = tvpd_keygen(params, seed, clock=CLOCK)
            hkp = hors_keygen(params, seed)
            for _ in range(20):
                m = rng.randbytes(256)
                tkp.used = hkp.used = False
                tsig = tvpd_sign(tkp, m, clock=CLOCK)
                hsig = hors_sign(hkp, m)
                assert tsig.elements == hsig.elements and tsig.ctr == hsig.ctr
                blob_t = wire.encode_signature(tkp.params, tsig)
                blob_h = wire.encode_signature(tkp.params, hsig)
                assert blob_t == blob_h
                pairs += 1
        assert pairs == 1000
    _ok("criterion 6: signatures byte-identical across schemes, "
        "10^3 pairs per preset; golden index vector pinned")


def test_criterion_07_weak_message_handling():
    rng = random.Random(2024)
    params = preset(32)
    kp = tvpd_keygen(params, rng.randbytes(32), clock=CLOCK)

    # brute-force a weak message: duplicate indices at ctr=0
    while True:
        weak = rng.randbytes(256)
        if len(set(derive_indices(params, weak, 0))) < params.k:
            break
    kp.used = False
    sig = tvpd_sign(kp, weak, clock=CLOCK)
    assert sig.ctr >= 1
    assert tvpd_verify(kp.pk, kp.params, weak, sig, clock=CLOCK)

    # mean counter vs the closed-form duplicate probability
    n = 10_000
    total = sum(find_counter(params, rng.randbytes(256)) for _ in range(n))
    mean_ctr = total / n
    p_distinct = math.prod(1 - j / 64 for j in range(1, 16))
    q = 1 - p_distinct
    expected = q / (1 - q)  # geometric number of failures
    sigma = math.sqrt(q) / (1 - q) / math.sqrt(n)
    assert abs(mean_ctr - expected) <= 3 * sigma
    _ok("criterion 7: weak messages retried",
        f"mean ctr {mean_ctr:.3f} vs {expected:.3f} +- {3 * sigma:.3f}")


def test_criterion_08_serialized_sizes():
    kp32 = tvpd_keygen(preset(32), bytes(32), clock=CLOCK)
    pub = wire.encode_public(kp32)
    header = 21 + 16 + 4 * kp32.params.p  # fixed header, window, plan sizes
    assert len(pub) - header == 995

    m = b"\x05" * 256
    kp32.used = False
    sig32 = tvpd_sign(kp32, m, clock=CLOCK)
    assert len(wire.encode_signature(kp32.params, sig32)) - (21 + 16) == 68

    kp128 = tvpd_keygen(preset(128, 2), bytes(32), clock=CLOCK)
    sig128 = tvpd_sign(kp128, m, clock=CLOCK)
    assert len(wire.encode_signature(kp128.params, sig128)) - 21 == 1028
    _ok("criterion 8: pk payload 995 B; signature payloads 68 B and 1028 B")


def test_criterion_09_performance_ratios():
    t0 = time.perf_counter()
    pairs = {k: bench.bench_preset(k, trials=300, rng=random.Random(5))
             for k in (32, 48, 64, 128)}
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0

    for kappa in (32, 48, 64):
        assert pairs[kappa].verify_ratio >= 2.0, (kappa, pairs[kappa].verify_ratio)
    assert pairs[128].verify_ratio >= 1.5, pairs[128].verify_ratio
    assert pairs[32].kg_ratio >= 1.5, pairs[32].kg_ratio
    for kappa, pair in pairs.items():
        assert abs(pair.sign_ratio - 1.0) <= 0.10, (kappa, pair.sign_ratio)
    detail = ", ".join(
        f"k{k}: ver {p.verify_ratio:.2f}x kg {p.kg_ratio:.2f}x "
        f"sign {p.sign_ratio:.2f}" for k, p in pairs.items()
    )
    _ok("criterion 9: machine-relative speedups hold", detail)


def test_criterion_10_structural_cost_model():
    for kappa, variant in SIGNING_PRESETS:
        params = preset(kappa, variant)
        kp = tvpd_keygen(params, bytes(32), clock=CLOCK)
        m = b"\x11" * 256
        kp.used = False
        sig = tvpd_sign(kp, m, clock=CLOCK)

        with CallCounter() as c:
            assert tvpd_verify(kp.pk, kp.params, m, sig, clock=CLOCK)
        assert c.role("msg") == 1
        assert c.role("filter") == params.k
        assert c.calls(params.filter_algo) == params.k
        assert c.mod_reductions == params.k * params.p

        with CallCounter() as c:
            tvpd_keygen(params, bytes(32), clock=CLOCK)
        assert c.role("filter") == params.t
        assert c.role("owf") == 0

        with CallCounter() as c:
            hors_keygen(params, bytes(32))
        assert c.role("owf") == params.t
        assert c.role("filter") == 0
    _ok("criterion 10: verify = 1 H + k h + k*p mods; "
        "keygen = t h vs t f calls")
