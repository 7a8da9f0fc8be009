"""Command-line front end: params, keygen, sign, verify, bench.

Verification exit codes: 0 accept, 1 reject, 2 rejected because the
key's validity window does not cover the supplied time.  Domain errors
(unknown preset, unparsable files) exit with 64 and a message on stderr.
The TVPD_SEED environment variable (64 hex chars) makes keygen and bench
deterministic for CI.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

from . import bench as bench_mod
from . import hashes, wire
from .errors import OutsideTimeWindow, TvpdError
from .hors import expand_secrets, hors_verify, sign_with_secrets
from .params import DEFAULT_TIME_DELTA, TimePolicy, preset, security_report
from .tvpd import tvpd_keygen, tvpd_verify

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_TIME_WINDOW = 2
EXIT_ERROR = 64


def _env_seed() -> bytes | None:
    raw = os.environ.get("TVPD_SEED")
    if raw is None:
        return None
    try:
        seed = bytes.fromhex(raw)
    except ValueError:
        raise TvpdError("TVPD_SEED must be hex") from None
    if len(seed) != 32:
        raise TvpdError("TVPD_SEED must encode exactly 32 bytes")
    return seed


def _resolve_seed(arg: str | None) -> bytes:
    if arg is not None:
        seed = bytes.fromhex(arg)
        if len(seed) != 32:
            raise TvpdError("--seed must encode exactly 32 bytes")
        return seed
    env = _env_seed()
    if env is not None:
        return env
    return os.urandom(32)


def _print_report(params, out=None) -> None:
    out = out if out is not None else sys.stdout
    rep = security_report(params)
    rows = [
        ("t", params.t), ("k", params.k), ("l", params.l_bits),
        ("p", params.p), ("kappa", params.kappa),
        ("H", params.msg_algo), ("f", params.owf_algo),
        ("h", params.filter_algo),
        ("time_valid", params.time_valid),
        ("pk_bytes", params.pk_payload_bytes),
        ("sig_bytes", params.sig_payload_bytes),
        ("subset_bits", f"{rep.hors_subset_bits:g}"),
        ("trunc_hash_bits", f"{rep.trunc_hash_bits:g}"),
        ("ohbf_hash_bits", f"{rep.ohbf_hash_bits:g}"),
        ("fpp_bits", f"{rep.fpp_bits:.3f}"),
        ("kappa_effective", f"{rep.kappa:g}"),
    ]
    width = max(len(name) for name, _ in rows)
    print("parameter".ljust(width), "value", file=out)
    print("-" * (width + 24), file=out)
    for name, value in rows:
        print(name.ljust(width), value, file=out)
    if params.time_policy is not None:
        print("t0".ljust(width), params.time_policy.t0, file=out)
        print("t_delta".ljust(width), params.time_policy.t_delta, file=out)
    print(file=out)
    print("partitions =", list(params.plan.sizes), file=out)
    print(file=out)
    for name, value in rows:
        print(f"{name}={value}", file=out)


def cmd_params(args) -> int:
    params = preset(args.kappa, args.variant)
    _print_report(params)
    return EXIT_OK


def cmd_keygen(args) -> int:
    params = preset(args.kappa, args.variant)
    seed = _resolve_seed(args.seed)
    clock = (lambda: args.t0) if args.t0 is not None else time.time

    time_valid = params.time_valid
    if args.no_time_valid or (args.scheme == "hors" and not args.time_valid):
        time_valid = False  # the baseline scheme carries no time gate
    elif args.time_valid:
        time_valid = True
    policy = None
    if time_valid:
        policy = TimePolicy(
            t0=int(clock()),
            t_delta=args.t_delta or DEFAULT_TIME_DELTA,
        )
    params = dataclasses.replace(params, time_valid=time_valid,
                                 time_policy=policy)

    sk_path = args.out + ".tvpd-sk"
    pk_path = args.out + ".tvpd-pk"
    if args.scheme == "tvpd":
        kp = tvpd_keygen(params, seed, clock=clock)
        params = kp.params
        with open(pk_path, "wb") as f:
            f.write(wire.encode_public(kp))
    else:
        from .hors import hors_keygen

        kp = hors_keygen(params, seed)
        with open(pk_path, "wb") as f:
            f.write(wire.encode_hors_public(kp))
    with open(sk_path, "wb") as f:
        f.write(wire.encode_secret(params, seed))
    print(f"wrote {sk_path} and {pk_path}")
    _print_report(params)
    return EXIT_OK


def _now_clock(args):
    return (lambda: args.now) if args.now is not None else time.time


def cmd_sign(args) -> int:
    with open(args.key, "rb") as f:
        params, seed = wire.decode_secret(f.read())
    with open(args.message, "rb") as f:
        message = f.read()
    clock = _now_clock(args)
    sk = expand_secrets(params, seed)
    from .tvpd import _gate_open

    if not _gate_open(params, clock):
        print("REJECT: signing time outside the key validity window",
              file=sys.stderr)
        return EXIT_TIME_WINDOW
    sig = sign_with_secrets(params, sk, message)
    out = args.out or (args.message + ".tvpd-sig")
    with open(out, "wb") as f:
        f.write(wire.encode_signature(params, sig))
    print(f"wrote {out} (ctr={sig.ctr})")
    return EXIT_OK


def cmd_verify(args) -> int:
    with open(args.key, "rb") as f:
        key_blob = f.read()
    with open(args.message, "rb") as f:
        message = f.read()
    with open(args.signature, "rb") as f:
        params_sig, sig = wire.decode_signature(f.read())
    clock = _now_clock(args)

    kind = wire.peek_kind(key_blob)
    if kind == wire.KIND_HORS_PUBLIC:
        pk, params = wire.decode_hors_public(key_blob)
        ok = hors_verify(pk, params, message, sig)
    else:
        filt, params = wire.decode_public(key_blob)
        if params.time_valid and params.time_policy is not None \
                and not params.time_policy.contains(clock()):
            print("REJECT: verification time outside the key validity window")
            return EXIT_TIME_WINDOW
        ok = tvpd_verify(filt, params, message, sig, clock=clock)
    if ok:
        print("ACCEPT")
        return EXIT_OK
    print("REJECT")
    return EXIT_REJECT


def cmd_bench(args) -> int:
    kappas = [int(x) for x in args.kappas.split(",")]
    seed = 0x7561
    env = _env_seed()
    if env is not None:
        seed = int.from_bytes(env[:8], "big")
    owf = None if args.hors_owf in ("sha2", "blake2") else args.hors_owf
    pairs = bench_mod.run(
        kappas=kappas,
        variant=args.variant,
        message_size=args.message_size,
        trials=args.trials,
        seed=seed,
        blake2_owf=args.hors_owf == "blake2",
        owf_override=owf,
    )
    csv_text = bench_mod.to_csv(pairs)
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(csv_text)
        print(f"wrote {args.csv}")
    else:
        print(csv_text, end="")
    print()
    print(bench_mod.to_markdown(pairs), end="")
    if args.parallel_verify:
        stats = bench_mod.parallel_verify_demo()
        print()
        print(
            f"parallel verify: {stats['messages']} messages, "
            f"{stats['workers']} workers: serial {stats['serial_s']:.3f}s, "
            f"threaded {stats['parallel_s']:.3f}s"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="tvpd",
        description="Time-valid one-time signatures with a Bloom-filter public key",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="show a preset and its security report")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--variant", type=int, default=1)
    p.set_defaults(fn=cmd_params)

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--variant", type=int, default=1)
    p.add_argument("--seed", help="32-byte hex seed (default TVPD_SEED or random)")
    p.add_argument("--scheme", choices=("tvpd", "hors"), default="tvpd")
    p.add_argument("--out", default="key", help="output path prefix")
    p.add_argument("--t0", type=int, help="validity window start (epoch seconds)")
    p.add_argument("--t-delta", type=int, help="validity window length (seconds)")
    p.add_argument("--time-valid", action="store_true",
                   help="force a validity window on a high-security preset")
    p.add_argument("--no-time-valid", action="store_true",
                   help="drop the validity window from a time-valid preset")
    p.set_defaults(fn=cmd_keygen)

    p = sub.add_parser("sign", help="sign a message file")
    p.add_argument("--key", required=True, help=".tvpd-sk file")
    p.add_argument("--message", required=True)
    p.add_argument("--out", help="signature path (default MESSAGE.tvpd-sig)")
    p.add_argument("--now", type=float, help="override the clock (epoch seconds)")
    p.set_defaults(fn=cmd_sign)

    p = sub.add_parser("verify", help="verify a signature file")
    p.add_argument("--key", required=True, help=".tvpd-pk file")
    p.add_argument("--message", required=True)
    p.add_argument("--signature", required=True)
    p.add_argument("--now", type=float, help="override the clock (epoch seconds)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="benchmark both schemes")
    p.add_argument("--kappas", default="32,48,64,72,96,128",
                   help="comma-separated security levels")
    p.add_argument("--variant", type=int, default=1)
    p.add_argument("--message-size", type=int, default=bench_mod.DEFAULT_MESSAGE_SIZE)
    p.add_argument("--trials", type=int, default=bench_mod.DEFAULT_TRIALS)
    p.add_argument("--csv", help="write CSV here instead of stdout")
    p.add_argument("--hors-owf", default="sha2",
                   choices=("sha2", "blake2") + tuple(hashes.OUTPUT_BITS),
                   help="baseline one-way function: a family keyword or an "
                        "exact algorithm identifier")
    p.add_argument("--parallel-verify", action="store_true",
                   help="also run the concurrent verification demo")
    p.set_defaults(fn=cmd_bench)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except OutsideTimeWindow as e:
        print(f"REJECT: {e}", file=sys.stderr)
        return EXIT_TIME_WINDOW
    except (TvpdError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
