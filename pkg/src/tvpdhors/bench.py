"""Benchmark harness comparing the baseline and filter-backed schemes.

Reports median microseconds per operation (warm-up discarded) for key
generation, signing, and verification, plus key and signature sizes,
as CSV and markdown.  Ratios are HORS over TVPD per operation; checks
against expected speedups are ratio-based only, never absolute times.
"""

from __future__ import annotations

import io
import random
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import hashes
from .hors import hors_keygen, hors_sign, hors_verify
from .params import BLAKE2_OWF_BY_KAPPA, SchemeParams, preset
from .tvpd import tvpd_keygen, tvpd_sign, tvpd_verify

DEFAULT_MESSAGE_SIZE = 256
DEFAULT_TRIALS = 200

CSV_COLUMNS = [
    "scheme", "kappa", "variant", "t", "k", "l", "p",
    "kg_us", "sign_us", "verify_us", "pk_bytes", "sig_bytes", "trials",
    "kg_ratio", "sign_ratio", "verify_ratio",
]


@dataclass
class BenchRecord:
    scheme: str
    kappa: int
    variant: int
    t: int
    k: int
    l_bits: int
    p: int
    kg_us: float
    sign_us: float
    verify_us: float
    pk_bytes: int
    sig_bytes: int
    trials: int


@dataclass
class BenchPair:
    hors: BenchRecord
    tvpd: BenchRecord

    @property
    def kg_ratio(self) -> float:
        return self.hors.kg_us / self.tvpd.kg_us

    @property
    def sign_ratio(self) -> float:
        return self.hors.sign_us / self.tvpd.sign_us

    @property
    def verify_ratio(self) -> float:
        return self.hors.verify_us / self.tvpd.verify_us


def _paired_medians(fn_a, fn_b, trials: int) -> tuple[float, float]:
    """Alternate the two workloads so clock drift hits both equally."""
    warmup = max(5, trials // 10)
    a_samples, b_samples = [], []
    for _ in range(trials + warmup):
        t0 = time.perf_counter_ns()
        fn_a()
        t1 = time.perf_counter_ns()
        fn_b()
        t2 = time.perf_counter_ns()
        a_samples.append((t1 - t0) / 1000.0)
        b_samples.append((t2 - t1) / 1000.0)
    return (statistics.median(a_samples[warmup:]),
            statistics.median(b_samples[warmup:]))


def bench_preset(kappa: int, variant: int = 1,
                 message_size: int = DEFAULT_MESSAGE_SIZE,
                 trials: int = DEFAULT_TRIALS,
                 rng: random.Random | None = None,
                 hors_owf: str | None = None) -> BenchPair:
    """Measure both schemes on one parameter set.

    `hors_owf` overrides the baseline's one-way function (e.g. a BLAKE2
    variant); the filter-backed scheme always uses the preset's hash.
    """
    if trials < 100:
        raise ValueError("benchmarks need at least 100 trials")
    if rng is None:
        rng = random.Random(0x7561)
    params = preset(kappa, variant)
    hparams = params
    if hors_owf is not None:
        hparams = SchemeParams(
            t=params.t, k=params.k, l_bits=params.l_bits, p=params.p,
            msg_algo=params.msg_algo, owf_algo=hors_owf,
            filter_algo=params.filter_algo, plan=params.plan,
            kappa=params.kappa, time_valid=params.time_valid,
            variant=params.variant,
        )
    seed = rng.randbytes(32)
    clock = time.time
    msgs = [rng.randbytes(message_size) for _ in range(trials)]

    tkp = tvpd_keygen(params, seed, clock=clock)
    hkp = hors_keygen(hparams, seed)

    def t_kg():
        tvpd_keygen(params, seed, clock=clock)

    def h_kg():
        hors_keygen(hparams, seed)

    it_t = iter(range(1 << 30))
    it_h = iter(range(1 << 30))

    def t_sign():
        tkp.used = False
        tvpd_sign(tkp, msgs[next(it_t) % len(msgs)], clock=clock)

    def h_sign():
        hkp.used = False
        hors_sign(hkp, msgs[next(it_h) % len(msgs)])

    kg_h, kg_t = _paired_medians(h_kg, t_kg, trials)
    sign_h, sign_t = _paired_medians(h_sign, t_sign, trials)

    pairs = [(m, tvpd_sign(_fresh(tkp), m, clock=clock)) for m in msgs[:64]]

    jt = iter(range(1 << 30))

    def t_ver():
        m, s = pairs[next(jt) % len(pairs)]
        tvpd_verify(tkp.pk, tkp.params, m, s, clock=clock)

    jh = iter(range(1 << 30))

    def h_ver():
        m, s = pairs[next(jh) % len(pairs)]
        hors_verify(hkp.pk, hparams, m, s)

    ver_h, ver_t = _paired_medians(h_ver, t_ver, trials)

    common = dict(kappa=kappa, variant=variant, t=params.t, k=params.k,
                  l_bits=params.l_bits, p=params.p,
                  sig_bytes=params.sig_payload_bytes, trials=trials)
    hors_rec = BenchRecord(
        scheme="HORS", kg_us=kg_h, sign_us=sign_h, verify_us=ver_h,
        pk_bytes=params.t * hashes.OUTPUT_BITS[hparams.owf_algo] // 8,
        **common,
    )
    tvpd_rec = BenchRecord(
        scheme="TVPD-HORS", kg_us=kg_t, sign_us=sign_t, verify_us=ver_t,
        pk_bytes=len(tkp.pk.bits),
        **common,
    )
    return BenchPair(hors_rec, tvpd_rec)


def _fresh(kp):
    kp.used = False
    return kp


def run(kappas=(32, 48, 64, 72, 96, 128), variant: int = 1,
        message_size: int = DEFAULT_MESSAGE_SIZE, trials: int = DEFAULT_TRIALS,
        seed: int = 0x7561, blake2_owf: bool = False,
        owf_override: str | None = None) -> list[BenchPair]:
    rng = random.Random(seed)
    out = []
    for kappa in kappas:
        owf = owf_override
        if owf is None and blake2_owf:
            owf = BLAKE2_OWF_BY_KAPPA[kappa]
        out.append(bench_preset(kappa, variant, message_size, trials, rng, owf))
    return out


def to_csv(pairs: list[BenchPair]) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for pair in pairs:
        for rec, is_tvpd in ((pair.hors, False), (pair.tvpd, True)):
            row = [
                rec.scheme, rec.kappa, rec.variant, rec.t, rec.k, rec.l_bits,
                rec.p, f"{rec.kg_us:.3f}", f"{rec.sign_us:.3f}",
                f"{rec.verify_us:.3f}", rec.pk_bytes, rec.sig_bytes, rec.trials,
            ]
            if is_tvpd:
                row += [f"{pair.kg_ratio:.3f}", f"{pair.sign_ratio:.3f}",
                        f"{pair.verify_ratio:.3f}"]
            else:
                row += ["", "", ""]
            buf.write(",".join(str(v) for v in row) + "\n")
    return buf.getvalue()


def to_markdown(pairs: list[BenchPair]) -> str:
    lines = [
        "| scheme | kappa | (t, k, l, p) | PK (KB) | Kg (us) | Sign (us) | Ver (us) | Kg ratio | Ver ratio |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for pair in pairs:
        for rec in (pair.hors, pair.tvpd):
            tup = f"({rec.t}, {rec.k}, {rec.l_bits}, {rec.p})"
            ratios = ("", "")
            if rec.scheme == "TVPD-HORS":
                ratios = (f"{pair.kg_ratio:.2f}", f"{pair.verify_ratio:.2f}")
            lines.append(
                f"| {rec.scheme} | {rec.kappa} | {tup} | "
                f"{rec.pk_bytes / 1024:.3f} | {rec.kg_us:.2f} | "
                f"{rec.sign_us:.2f} | {rec.verify_us:.2f} | "
                f"{ratios[0]} | {ratios[1]} |"
            )
    return "\n".join(lines) + "\n"


def parallel_verify_demo(kappa: int = 32, n_messages: int = 2000,
                         workers: int = 2) -> dict:
    """Concurrent read-only verification against one immutable key.

    Demonstrates thread-safety of shared filters; wall-clock gains are
    bounded by the interpreter lock since per-call hashing is short.
    """
    rng = random.Random(1)
    params = preset(kappa)
    kp = tvpd_keygen(params, rng.randbytes(32))
    jobs = []
    for _ in range(n_messages):
        m = rng.randbytes(DEFAULT_MESSAGE_SIZE)
        kp.used = False
        jobs.append((m, tvpd_sign(kp, m)))

    t0 = time.perf_counter()
    ok_serial = sum(tvpd_verify(kp.pk, kp.params, m, s) for m, s in jobs)
    serial_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        ok_parallel = sum(
            pool.map(lambda job: tvpd_verify(kp.pk, kp.params, *job), jobs)
        )
    parallel_s = time.perf_counter() - t0
    assert ok_serial == ok_parallel == n_messages
    return {
        "messages": n_messages,
        "workers": workers,
        "serial_s": serial_s,
        "parallel_s": parallel_s,
    }
