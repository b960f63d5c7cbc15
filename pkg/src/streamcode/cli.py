"""Command-line front end.

Subcommands: construct, verify, encode, decode, distance, simulate, table2,
patterns.  Every command is deterministic given its flags and seed; wall-time
reporting is opt-in (--timing) so repeated invocations stay byte-identical.

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 construction attempts exhausted.  STREAMCODE_THREADS overrides --threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .construct import (
    CodeParams, GeneratorMatrix, PrimeField,
    construct_verified, find_achievability_witness,
)
from .conv import decode_trace, encode_stream, interleave
from .erasures import enumerate_maximal_patterns
from .errors import (
    ConfigError, ConstructionExhaustedError, DimensionError,
    ParameterError, SearchBudgetError, StreamCodeError,
)
from .metrics import (
    DistanceReport, check_optimal,
    column_distance_bruteforce, column_span_bruteforce,
)
from .sim import RunConfig, run_loss_sweep, success_rate_experiment, sweep_csv, table_csv

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_matrix(path: str, overrides: argparse.Namespace | None = None) -> GeneratorMatrix:
    data = json.loads(_read_source(path))
    if overrides is not None:
        for flag, key in (("window", "W"), ("delay", "T"), ("burst", "B"), ("arbitrary", "N")):
            value = getattr(overrides, flag, None)
            if value is not None:
                data[key] = value
    params = CodeParams(int(data["W"]), int(data["T"]), int(data["B"]), int(data["N"]))
    from .gf import FieldMatrix

    return GeneratorMatrix(params, FieldMatrix(PrimeField(int(data["p"])), data["rows"]))


def _threads(args: argparse.Namespace) -> int:
    env = os.environ.get("STREAMCODE_THREADS")
    if env is not None:
        return max(1, int(env))
    if getattr(args, "threads", None):
        return max(1, args.threads)
    return os.cpu_count() or 1


def _add_param_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--W", dest="window", type=int, required=required)
    parser.add_argument("--T", dest="delay", type=int, required=required)
    parser.add_argument("--B", dest="burst", type=int, required=required)
    parser.add_argument("--N", dest="arbitrary", type=int, required=required)


def cmd_construct(args: argparse.Namespace) -> int:
    params = CodeParams(args.window, args.delay, args.burst, args.arbitrary)
    field = PrimeField(args.field)
    result = construct_verified(params, field, args.seed,
                                max_attempts=args.attempts, mode=args.mode)
    print(result.generator.to_json(attempts=result.attempts))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = _load_matrix(args.matrix, overrides=args)
    witness = find_achievability_witness(g)
    if witness is None:
        print("PASS")
        return EXIT_OK
    i, pattern = witness
    print(f"FAIL i={i} pattern={pattern}")
    return EXIT_VERIFY_FAIL


def cmd_patterns(args: argparse.Namespace) -> int:
    for pattern in enumerate_maximal_patterns(args.window, args.burst, args.arbitrary):
        print(pattern)
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    g = _load_matrix(args.matrix)
    packets = json.loads(_read_source(args.input))
    if not isinstance(packets, list):
        raise ConfigError("encode input must be a JSON list of source packets")
    code = interleave(g)
    sources = np.asarray(packets, dtype=np.int64)
    if sources.ndim != 2 or sources.shape[1] != g.params.k:
        raise ConfigError(f"source packets must each have length k = {g.params.k}")
    transmitted = encode_stream(code, sources % g.field.p, pad=args.flush)
    for t in range(transmitted.shape[0]):
        symbols = ",".join(str(int(v)) for v in transmitted[t])
        print(f"{t},0,{symbols}")
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    g = _load_matrix(args.matrix)
    code = interleave(g)
    n = g.params.n
    erased: list[int] = []
    rows: list[list[int]] = []
    for line in _read_source(args.trace).splitlines():
        line = line.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) < 2:
            raise ConfigError(f"bad trace row: {line!r}")
        flag = int(fields[1])
        erased.append(flag)
        symbols = [int(v) for v in fields[2:]] if len(fields) > 2 else []
        if not flag and len(symbols) != n:
            raise ConfigError(f"received row needs {n} symbols: {line!r}")
        rows.append(symbols if len(symbols) == n else [0] * n)
    outcomes = decode_trace(code, erased, np.asarray(rows, dtype=np.int64))
    for t, (met, eventually) in enumerate(outcomes):
        print(f"{t},{int(eventually)},{int(met)}")
    return EXIT_OK


def cmd_distance(args: argparse.Namespace) -> int:
    g = _load_matrix(args.matrix)
    code = interleave(g)
    d = column_distance_bruteforce(code, budget=args.budget)
    c = column_span_bruteforce(code, budget=args.budget)
    report = DistanceReport(d, c, check_optimal(code, d, c), "brute-force")
    print(json.dumps({"d": report.distance, "c": report.span,
                      "optimal": report.optimal, "method": report.method}))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_json(_read_source(args.config))
    points = run_loss_sweep(cfg, threads=_threads(args))
    sys.stdout.write(sweep_csv(points, timing=args.timing))
    return EXIT_OK


def cmd_table2(args: argparse.Namespace) -> int:
    data = json.loads(_read_source(args.config))
    try:
        param_list = [tuple(int(v) for v in row) for row in data["params"]]
        field_list = [int(p) for p in data["fields"]]
        samples = int(data["samples"])
        seed = int(data.get("seed", 0))
        mode = str(data.get("mode", "random"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad table2 config: {exc}") from exc
    rows = success_rate_experiment(param_list, field_list, samples, seed,
                                   threads=_threads(args), mode=mode)
    sys.stdout.write(table_csv(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamcode",
        description="Construct, verify, and simulate low-delay streaming erasure codes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="rejection-sample a verified generator matrix")
    _add_param_flags(p, required=True)
    p.add_argument("--field", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attempts", type=int, default=5000)
    p.add_argument("--mode", choices=["random", "deterministic-mds"], default="random")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check a matrix against the achievability condition")
    p.add_argument("matrix", help="generator JSON file, or - for stdin")
    _add_param_flags(p, required=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("patterns", help="list the maximal erasure patterns")
    p.add_argument("--W", dest="window", type=int, required=True)
    p.add_argument("--B", dest="burst", type=int, required=True)
    p.add_argument("--N", dest="arbitrary", type=int, required=True)
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("encode", help="encode source packets into a channel trace")
    p.add_argument("--matrix", required=True)
    p.add_argument("--input", default="-", help="JSON list of length-k packets")
    p.add_argument("--flush", type=int, default=0,
                   help="extra zero-source steps appended so tail parity flows")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a channel trace")
    p.add_argument("--matrix", required=True)
    p.add_argument("--trace", default="-", help="CSV rows time,erased,symbols...")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("distance", help="brute-force distance/span report")
    p.add_argument("--matrix", required=True)
    p.add_argument("--budget", type=int, default=1 << 24)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("simulate", help="run a loss-rate sweep from a config file")
    p.add_argument("config", help="run config JSON, or - for stdin")
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--timing", action="store_true",
                   help="report measured wall time (output no longer byte-stable)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table2", help="construction success-rate experiment")
    p.add_argument("config", help="experiment config JSON, or - for stdin")
    p.add_argument("--threads", type=int, default=0)
    p.set_defaults(func=cmd_table2)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConstructionExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (ConfigError, ParameterError, DimensionError, SearchBudgetError,
            StreamCodeError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
