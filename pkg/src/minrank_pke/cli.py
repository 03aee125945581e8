"""``minrank-pke`` command line.

Exit codes: 0 ok, 1 self-test failure / attack found nothing, 2 parameter
error, 3 I/O error, 4 malformed file, 5 key/ciphertext mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__, attacks, formats, selftest
from .errors import (BudgetExceededError, FormatError, InapplicableError, MismatchError, ParamError,
                     UnderdeterminedError)
from .estimators import DEFAULT_OMEGA, Dims, estimate_all, format_table, ranked
from .minrank import Params, sample_planted
from .pke import decrypt, encrypt, keygen
from .presets import regime_shape, resolve
from .rng import SEED_BYTES, Rng

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARAM = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_MISMATCH = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# -- helpers -------------------------------------------------------------------------


def _rng(args) -> Rng:
    if args.seed is None:
        rng = Rng()
        print(f"seed: {rng.seed.hex()}", file=sys.stderr)
        return rng
    try:
        return Rng(args.seed)
    except ValueError as exc:
        raise CliError(EXIT_PARAM, f"--seed must be {2 * SEED_BYTES} hex characters ({exc})") from exc


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from exc


def _params(args, need_t: bool = True) -> Params:
    if args.preset:
        if any(getattr(args, f, None) is not None for f in ("n", "k", "r", "t")):
            raise CliError(EXIT_PARAM, "--preset cannot be combined with --n/--k/--r/--t")
        return resolve(args.preset)
    missing = [f"--{f}" for f in ("n", "k", "r", "t") if getattr(args, f, None) is None]
    if missing:
        raise CliError(EXIT_PARAM, f"missing {', '.join(missing)} (or use --preset)")
    strict = not getattr(args, "no_strict", False)
    try:
        return Params(args.n, args.k, args.r, args.t, tau=getattr(args, "tau", None), strict=strict)
    except ParamError as exc:
        report = ""
        if args.n and args.t and args.n % args.t == 0 and args.k >= 1 and args.r >= 0:
            report = "\n" + Params(args.n, args.k, args.r, args.t).report()
        raise CliError(EXIT_PARAM, f"{exc}{report}") from exc


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)


def _add_param_flags(p: argparse.ArgumentParser, strict_flag: bool = True) -> None:
    p.add_argument("--preset", help="desk64, toy8 or regime<1|2|3>:<n>")
    for name in ("n", "k", "r", "t"):
        p.add_argument(f"--{name}", type=int)
    if strict_flag:
        p.add_argument("--no-strict", action="store_true",
                       help="skip the correctness/duality side conditions")


# -- commands --------------------------------------------------------------------------


def cmd_keygen(args) -> int:
    params = _params(args)
    rng = _rng(args)
    kp = keygen(params, rng)
    pk, sk = formats.dump_keypair(kp)
    _write(args.out_pk, pk)
    _write(args.out_sk, sk)
    _emit(args, {"params": asdict(params) | {"margins": params.margins()},
                 "pk": args.out_pk, "sk": args.out_sk, "pk_bytes": len(pk), "sk_bytes": len(sk)},
          f"{params.report()}\nwrote {args.out_pk} ({len(pk)} bytes) and {args.out_sk} ({len(sk)} bytes)")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    pk = formats.load_public_key(_read(args.pk))
    if args.bit not in (0, 1):
        raise CliError(EXIT_PARAM, "--bit must be 0 or 1")
    ct = encrypt(pk, args.bit, _rng(args))
    data = formats.dump_ciphertext(ct)
    _write(args.out, data)
    _emit(args, {"ciphertext": args.out, "bytes": len(data)}, f"wrote {args.out} ({len(data)} bytes)")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    sk = formats.load_secret_key(_read(args.sk))
    ct = formats.load_ciphertext(_read(args.input))
    bit = decrypt(sk, ct)
    _emit(args, {"bit": bit}, str(bit))
    return EXIT_OK


def cmd_attack(args) -> int:
    rng = _rng(args)
    if args.repeat is not None:
        if args.instance:
            raise CliError(EXIT_PARAM, "--repeat draws fresh instances; it cannot be combined with --instance")
        row = attacks.benchmark(_params(args), args.attack, args.repeat, rng, threads=args.threads,
                                trials=args.trials, budget=args.budget)
        _emit(args, row.as_dict(), ",".join(attacks.BENCHMARK_FIELDS) + "\n" + row.csv_row())
        return EXIT_OK if row.successes else EXIT_FAIL
    if args.instance:
        inst = formats.load_instance(_read(args.instance))
    else:
        inst = sample_planted(_params(args), rng)
    res = attacks.run_attack(args.attack, inst, rng, trials=args.trials, budget=args.budget)
    d = res.as_dict() | {"n": inst.params.n, "k": inst.k, "r": inst.params.r}
    text = ",".join(str(d[key]) for key in ("attack", "success", "found", "iterations",
                                            "trials_attempted", "wall_time"))
    _emit(args, d, "attack,success,found,iterations,trials_attempted,wall_time\n" + text)
    return EXIT_OK if res.success else EXIT_FAIL


def cmd_estimate(args) -> int:
    if args.sweep is not None:
        return _estimate_sweep(args)
    if args.preset:
        dims = resolve(args.preset)
    else:
        if args.n is None or args.k is None or args.r is None:
            raise CliError(EXIT_PARAM, "estimate needs --preset or --n, --k and --r")
        if args.n < 1 or args.k < 1 or not 0 <= args.r <= args.n:
            raise CliError(EXIT_PARAM, "need n >= 1, k >= 1 and 0 <= r <= n")
        dims = Dims(args.n, args.k, args.r)
    est = estimate_all(dims, args.omega)
    est.sort(key=lambda e: e.log2_cost)
    best = ranked(est)
    payload = {"n": dims.n, "k": dims.k, "r": dims.r, "omega": args.omega,
               "cheapest": best[0].attack if best else None, "estimates": [e.as_dict() for e in est]}
    _emit(args, payload, f"n={dims.n} k={dims.k} r={dims.r} omega={args.omega}\n{format_table(est)}\n"
                         f"cheapest classical: {payload['cheapest']}")
    return EXIT_OK


def _estimate_sweep(args) -> int:
    regime = args.sweep
    lo, hi = args.log_n
    rows = []
    for lg in range(lo, hi + 1):
        n = 1 << lg
        p = regime_shape(regime, n)
        best = ranked(estimate_all(p, args.omega))[0]
        scale = n**0.25 * lg**0.75 if regime == 2 else None
        rows.append({"log2n": lg, "n": n, "k": p.k, "r": p.r,
                     "cheapest": best.attack, "log2_cost": best.log2_cost,
                     "cost_over_n14_log34": None if scale is None else best.log2_cost / scale})
    slope = None
    if len(rows) >= 2:
        xs = [math.log2(r["log2_cost"]) for r in rows]
        if regime == 2:
            ref = [math.log2((1 << r["log2n"]) ** 0.25 * r["log2n"] ** 0.75) for r in rows]
        elif regime == 1:
            ref = [r["log2n"] / 4 for r in rows]
        else:
            ref = [math.log2(r["log2n"] ** 2 * math.log2(r["log2n"])) for r in rows]
        slope = (xs[-1] - xs[0]) / (ref[-1] - ref[0])
    lines = [f"regime {regime} shapes: log2n  k  r  cheapest  log2 cost"]
    lines += [f"  {r['log2n']:3d}  {r['k']}  {r['r']}  {r['cheapest']}  {r['log2_cost']:.1f}" for r in rows]
    if slope is not None:
        lines.append(f"log-log slope against the predicted exponent shape: {slope:.2f}")
    _emit(args, {"regime": regime, "rows": rows, "slope": slope}, "\n".join(lines))
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = selftest.run(args.level, _rng(args))
    ok = all(r.passed for r in results)
    if args.json:
        print(json.dumps([asdict(r) for r in results] + [{"all_passed": ok}], indent=2))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:32} {r.seconds:6.2f}s  {r.detail}")
        print("all checks passed" if ok else "SOME CHECKS FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_params(args) -> int:
    params = _params(args)
    _emit(args, asdict(params) | {"margins": params.margins()}, params.report())
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minrank-pke", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", help=f"{2 * SEED_BYTES}-hex-character seed (default: fresh, echoed to stderr)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1, help="worker threads where supported")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common], help="generate a key pair")
    _add_param_flags(p)
    p.add_argument("--tau", type=int, help="decryption threshold (default r^2)")
    p.add_argument("--out-pk", required=True)
    p.add_argument("--out-sk", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", parents=[common], help="encrypt one bit")
    p.add_argument("--pk", required=True)
    p.add_argument("--bit", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", parents=[common], help="decrypt a ciphertext")
    p.add_argument("--sk", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("attack", parents=[common], help="run an attack on a planted instance")
    p.add_argument("--attack", choices=list(attacks.ATTACK_NAMES), required=True)
    p.add_argument("--instance", help="MRNK instance file (default: generate from parameters)")
    _add_param_flags(p)
    p.add_argument("--trials", type=int, default=1 << 16, help="kernel trials / KS column permutations")
    p.add_argument("--budget", type=int, help="candidate budget for brute force")
    p.add_argument("--repeat", type=int, metavar="N",
                   help="benchmark mode: run on N fresh planted instances and print one aggregate CSV row "
                        "(parallel with --threads)")
    p.set_defaults(func=cmd_attack, no_strict=True)

    p = sub.add_parser("estimate", parents=[common], help="closed-form attack cost estimates")
    p.add_argument("--preset")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--t", type=int, help="ignored by the estimators; accepted for symmetry")
    p.add_argument("--omega", type=float, default=DEFAULT_OMEGA)
    p.add_argument("--sweep", type=int, choices=[1, 2, 3], help="sweep a regime preset over n = 2^log_n")
    p.add_argument("--log-n", type=int, nargs=2, default=[10, 14], metavar=("LO", "HI"))
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("params", parents=[common], help="validate a parameter set")
    _add_param_flags(p)
    p.add_argument("--tau", type=int)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in invariant suites")
    p.add_argument("--level", choices=list(selftest.LEVELS), default="fast")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors are parameter errors
        return EXIT_PARAM if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FormatError as exc:
        print(f"error: malformed file: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except MismatchError as exc:
        print(f"error: parameter mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (ParamError, InapplicableError, UnderdeterminedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except BudgetExceededError as exc:
        print(f"gave up: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
