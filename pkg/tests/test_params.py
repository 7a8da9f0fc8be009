import math

import pytest

from tvpdhors import hashes
from tvpdhors.errors import InfeasiblePlan, UnknownPreset
from tvpdhors.ohbf import PartitionPlan
from tvpdhors.params import (
    SchemeParams,
    TimePolicy,
    all_presets,
    fpp,
    plan_partitions,
    preset,
    security_report,
)

PUBLISHED_PARTITIONS = (971, 977, 983, 991, 997, 1009, 1013, 1019)

# one row per published configuration: (kappa, variant) -> (t, k, l, p)
TABLE_ROWS = {
    (32, 1): (64, 16, 32, 8),
    (32, 2): (64, 32, 32, 8),
    (48, 1): (128, 16, 48, 17),
    (64, 1): (256, 16, 64, 28),
    (64, 2): (128, 32, 64, 28),
    (72, 1): (512, 16, 72, 36),
    (96, 1): (256, 32, 96, 38),
    (128, 1): (512, 32, 128, 28),
    (128, 2): (256, 64, 128, 30),
}


def test_plan_partitions_reproduces_published_list():
    assert plan_partitions(7960, 8).sizes == PUBLISHED_PARTITIONS


def test_plan_partitions_small_example():
    assert plan_partitions(16, 2).sizes == (7, 11)


def test_plan_partitions_outputs_are_valid_plans(rng):
    for _ in range(25):
        p = rng.randrange(2, 12)
        target = rng.randrange(3 * p, 50000)
        plan = plan_partitions(target, p)
        plan.validate()
        assert len(plan.sizes) == p
        # consecutive primes around the center stay within a few gaps
        assert abs(plan.total_bits - target) <= p * 120


def test_plan_partitions_infeasible_target():
    with pytest.raises(InfeasiblePlan):
        plan_partitions(24, 8)  # would need four primes at or below 3
    with pytest.raises(InfeasiblePlan):
        plan_partitions(5, 2)


def naive_fpp(sizes, inserted):
    prod = math.prod(math.exp(-inserted / n) for n in sizes)
    return (1 - prod ** (1 / len(sizes))) ** len(sizes)


def test_fpp_matches_naive_evaluation():
    plan = PartitionPlan((13, 17, 19))
    for inserted in (1, 2, 5, 20):
        assert fpp(plan, inserted) == pytest.approx(
            naive_fpp(plan.sizes, inserted), rel=1e-12
        )


def test_fpp_empty_filter_limit():
    assert fpp(PartitionPlan((13, 17)), 0) == 0.0


def test_fpp_published_plan_hits_32_bits():
    rate = fpp(PartitionPlan(PUBLISHED_PARTITIONS), 64)
    assert -math.log2(rate) == pytest.approx(32.0, abs=0.3)


def test_fpp_monotone_in_inserted_and_partition_sizes(rng):
    import gmpy2

    for _ in range(20):
        plan = plan_partitions(rng.randrange(200, 5000), rng.randrange(2, 8))
        a, b = sorted(rng.sample(range(1, 200), 2))
        assert fpp(plan, a) < fpp(plan, b)
        # grow every partition to a strictly larger, still-distinct prime
        grown, cur = [], max(plan.sizes)
        for _ in plan.sizes:
            cur = int(gmpy2.next_prime(cur + 50))
            grown.append(cur)
        assert fpp(PartitionPlan(tuple(grown)), a) < fpp(plan, a)


@pytest.mark.parametrize("key", sorted(TABLE_ROWS))
def test_presets_match_published_rows(key):
    kappa, variant = key
    params = preset(kappa, variant)
    assert (params.t, params.k, params.l_bits, params.p) == TABLE_ROWS[key]
    assert params.kappa == kappa
    assert params.time_valid == (kappa in (32, 48, 64))
    assert params.owf_algo == hashes.SHA2_256
    assert params.msg_algo == (hashes.SHA2_512 if kappa == 128 else hashes.SHA2_256)


@pytest.mark.parametrize("key", sorted(TABLE_ROWS))
def test_security_report_kappa_equals_table(key):
    kappa, variant = key
    params = preset(kappa, variant)
    assert security_report(params).kappa == kappa


def test_security_report_worked_example_components():
    rep = security_report(preset(32))
    assert rep.trunc_hash_bits == 48
    assert rep.hors_subset_bits == 32
    assert rep.ohbf_hash_bits == 32
    assert rep.fpp_bits == pytest.approx(32.0, abs=0.3)
    assert rep.kappa == 32


def test_security_report_arithmetic_rows():
    rep72 = security_report(preset(72))
    assert rep72.hors_subset_bits == 16 * (9 - 4) == 80
    assert rep72.trunc_hash_bits == 16 * 9 / 2 == 72
    rep64 = security_report(preset(64))
    assert rep64.hors_subset_bits == 16 * (8 - 4) == 64


def test_preset_sizes():
    assert preset(32).pk_payload_bytes == 995
    assert preset(32).sig_payload_bytes == 68
    assert preset(128, 2).sig_payload_bytes == 1028
    assert preset(64, 2).pk_payload_bytes == pytest.approx(1.95 * 1024, rel=0.01)


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset(40)
    with pytest.raises(UnknownPreset):
        preset(32, variant=9)


def test_all_presets_lists_nine_rows():
    assert len(all_presets()) == 9


def test_scheme_params_validation():
    with pytest.raises(ValueError):
        SchemeParams(t=63, k=16, l_bits=32, p=8, msg_algo=hashes.SHA2_256,
                     owf_algo=hashes.SHA2_256, filter_algo=hashes.XXH3_64)
    with pytest.raises(ValueError):
        SchemeParams(t=64, k=64, l_bits=32, p=8, msg_algo=hashes.SHA2_256,
                     owf_algo=hashes.SHA2_256, filter_algo=hashes.XXH3_64)
    with pytest.raises(ValueError):
        # 64 * log2(1024) = 640 bits exceeds a 512-bit message hash
        SchemeParams(t=1024, k=64, l_bits=32, p=8, msg_algo=hashes.SHA2_512,
                     owf_algo=hashes.SHA2_256, filter_algo=hashes.XXH3_64)


def test_time_policy_window():
    pol = TimePolicy(t0=100, t_delta=50)
    assert pol.contains(100) and pol.contains(150)
    assert not pol.contains(99.999) and not pol.contains(150.001)
    with pytest.raises(ValueError):
        TimePolicy(t0=0, t_delta=0)
