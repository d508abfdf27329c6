"""Command-line entry point: gen, solve, verify, experiment, probe-minors.

Exit codes: 0 success, 1 input error, 2 iteration budget exhausted,
3 a candidate m that does not solve the instance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from ..ff import FieldError, parse_field
from ..instances import GenerationError, InstanceError, gen_instance, load_instance, save_instance
from ..pipeline import STRATEGIES, Exhausted, LasVegasConfig, default_n_prime, solve
from .census import MAX_CENSUS_K, minor_census, pipeline_matrices, random_matrices
from .experiment import format_csv, log_linear_fit, run_experiment

EXIT_OK, EXIT_INPUT, EXIT_EXHAUSTED, EXIT_WRONG = 0, 1, 2, 3


def _env_seed() -> int:
    value = os.environ.get("ECDLP_SEED")
    if value is None:
        return 0
    try:
        return int(value)
    except ValueError:
        raise SystemExit(f"error: ECDLP_SEED must be an integer, got {value!r}")


def _strategies(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    for s in names:
        if s not in STRATEGIES:
            raise argparse.ArgumentTypeError(f"unknown strategy {s!r} (choose from {', '.join(STRATEGIES)})")
    return names


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zerominor",
                                     description="ECDLP by zero-minor search in kernel matrices")
    sub = parser.add_subparsers(dest="command", required=True)
    seed_help = "rng seed (default: $ECDLP_SEED, else 0)"

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--bits", type=int, required=True)
    g.add_argument("--kind", choices=("prime", "binary"), default="prime")
    g.add_argument("--out", required=True)
    g.add_argument("--with-solution", action="store_true")
    g.add_argument("--seed", type=int, help=seed_help)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--n-prime", type=_positive, help="curve degree n' (default max(2, ceil(log2 p)))")
    s.add_argument("--strategy", choices=STRATEGIES, default="schur")
    s.add_argument("--workers", type=_positive, default=os.cpu_count() or 1)
    s.add_argument("--seed", type=int, help=seed_help)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--split", type=int, metavar="S", help="number of P-side rows (default k+1)")
    s.add_argument("--full-depth", action="store_true", help="run the Schur cascade to depth k-2")
    s.add_argument("--dump-kernels", metavar="DIR")
    s.add_argument("--transcript", metavar="FILE", help="write one JSON line per round")

    v = sub.add_parser("verify", help="check a candidate discrete logarithm")
    v.add_argument("--instance", required=True)
    v.add_argument("--m", type=int, required=True)

    e = sub.add_parser("experiment", help="repeat solves and write CSV")
    e.add_argument("--instance", required=True, nargs="+")
    e.add_argument("--trials", type=_positive, default=40)
    e.add_argument("--strategies", type=_strategies, default=["all2minors", "schur"])
    e.add_argument("--csv", required=True)
    e.add_argument("--n-prime", type=_positive, required=True)
    e.add_argument("--seed", type=int, help=seed_help)
    e.add_argument("--max-iter", type=int, default=100_000)
    e.add_argument("--workers", type=_positive, default=os.cpu_count() or 1)
    e.add_argument("--no-timing", action="store_true",
                   help="write wall_ms as 0 so reruns are byte-identical")

    p = sub.add_parser("probe-minors", help="census of zero minors in small A matrices")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--field", required=True, help="e.g. 73, prime:1009, binary:8, 8:0x11b")
    p.add_argument("--samples", type=_positive, default=100)
    p.add_argument("--source", choices=("random", "pipeline"), default="random")
    p.add_argument("--seed", type=int, help=seed_help)
    return parser


def _seed(args) -> int:
    return args.seed if args.seed is not None else _env_seed()


def _load(path: str):
    try:
        return load_instance(path)
    except OSError as exc:
        raise InstanceError(f"{path}: {exc.strerror}") from exc


def cmd_gen(args) -> int:
    rng = np.random.default_rng(_seed(args))
    inst = gen_instance(args.bits, args.kind, rng, with_solution=args.with_solution)
    save_instance(inst, args.out)
    print(f"wrote {args.out}: {inst.field.kind} field {inst.field.describe()}, order {inst.order}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    seed = _seed(args)
    n_prime = args.n_prime or default_n_prime(inst.order)
    k = 3 * n_prime
    config = LasVegasConfig(n_prime=n_prime, s=args.split, t=None if args.split is None else 2 * k - args.split,
                            max_iterations=args.max_iter, seed=seed, strategy=args.strategy,
                            workers=args.workers, full_depth=args.full_depth)
    log = None
    handle = None
    if args.transcript:
        handle = open(args.transcript, "w")
        log = lambda rec: handle.write(json.dumps(rec, sort_keys=True) + "\n")
    try:
        out = solve(inst, config, transcript=log, dump_dir=args.dump_kernels)
    finally:
        if handle:
            handle.close()
    if isinstance(out, Exhausted):
        print(f"exhausted iterations={out.iterations} strategy={config.strategy} seed={seed}")
        return EXIT_EXHAUSTED
    print(f"m={out.m} iterations={out.iterations} strategy={config.strategy} seed={seed}")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    if not 1 <= args.m < inst.order:
        print(f"rejected: m must lie in [1, {inst.order})")
        return EXIT_WRONG
    if inst.check_solution(args.m):
        print("ok")
        return EXIT_OK
    print("mismatch: m*P != Q")
    return EXIT_WRONG


def cmd_experiment(args) -> int:
    instances = [_load(path) for path in args.instance]
    records, exhausted = run_experiment(instances, args.strategies, args.trials, args.n_prime,
                                        seed=_seed(args), max_iterations=args.max_iter,
                                        workers=args.workers, timing=not args.no_timing)
    Path(args.csv).write_text(format_csv(records))
    print(f"wrote {args.csv}: {len(records)} trials")
    if exhausted:
        print(f"{exhausted} trials exhausted their budget and were not recorded", file=sys.stderr)
    for strategy, (slope, intercept) in log_linear_fit(records).items():
        print(f"fit {strategy}: log2(mean iterations) = {slope:.4f} * log2(p) + {intercept:.4f}")
    return EXIT_OK


def cmd_probe(args) -> int:
    if args.k > MAX_CENSUS_K:
        raise InstanceError(f"--k {args.k} exceeds the exhaustive limit {MAX_CENSUS_K}")
    field = parse_field(args.field)
    rng = np.random.default_rng(_seed(args))
    if args.source == "random":
        mats = random_matrices(field, args.k, args.samples, rng)
    else:
        if args.k % 3:
            raise InstanceError("pipeline matrices have k = 3n', so --k must be a multiple of 3")
        inst = gen_instance(0, field.kind, rng, field=field)
        mats = pipeline_matrices(inst, args.k // 3, args.samples, rng)
    census = minor_census(mats, field, args.k)
    print(json.dumps(census.as_dict(), indent=2))
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "verify": cmd_verify,
            "experiment": cmd_experiment, "probe-minors": cmd_probe}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InstanceError, FieldError, GenerationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
