"""Command-line front end.

Subcommands: gen (benchmark model from a CNF), build (covering array),
verify (check a suite), convert (between model formats), stats (tuple
census).  Output is machine-greppable key=value lines.

Exit codes: 0 success (verify: valid); 1 bad input, parse error, or I/O
failure; 2 negative outcome (generator gave up, suite invalid); 3 requested
conversion cannot express the model.  All randomness comes from explicit
seed flags.  CTFORGE_LOG=error|info|debug controls diagnostics.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import pathlib
import sys

from ctforge.bot import BotConfig, build_bot, build_pbot
from ctforge.engine import SolveStatus
from ctforge.formats import (
    FormatError,
    parse_acts,
    parse_casa,
    parse_dimacs,
    parse_extended_acts,
    read_test_suite,
    write_acts,
    write_casa,
    write_extended_acts,
    write_test_suite,
)
from ctforge.ipog import build_ipog
from ctforge.model import ModelError, SutModel, compile_model
from ctforge.sutgen import GenConfig, generate, write_provenance
from ctforge.verifier import verify_mcac

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_INEXPRESSIBLE = 3

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO,
               "debug": logging.DEBUG}

MODEL_FORMATS = ("acts", "xacts", "casa")


class CliError(Exception):
    """Input, configuration, or I/O problem; becomes exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _setup_logging() -> None:
    name = os.environ.get("CTFORGE_LOG", "error").lower()
    if name not in _LOG_LEVELS:
        raise CliError("CTFORGE_LOG must be one of error, info, debug; "
                       f"got {name!r}")
    logging.basicConfig(level=_LOG_LEVELS[name],
                        format="%(levelname)s %(name)s: %(message)s")


def _read(path: str) -> str:
    try:
        return pathlib.Path(path).read_text()
    except OSError as e:
        raise CliError(str(e))


def _write(path: pathlib.Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise CliError(str(e))


def _casa_companion(path: pathlib.Path) -> pathlib.Path:
    # the .model file travels with a .constraints sibling
    if path.suffix:
        return path.with_suffix(".constraints")
    return path.with_name(path.name + ".constraints")


def load_model(path: str, fmt: str) -> SutModel:
    if fmt == "acts":
        return parse_acts(_read(path))
    if fmt == "xacts":
        return parse_extended_acts(_read(path))
    if fmt == "casa":
        p = pathlib.Path(path)
        return parse_casa(_read(path), _read(str(_casa_companion(p))))
    raise CliError(f"unknown model format {fmt!r}")


def _tuple_census(model: SutModel, t: int) -> tuple[int, int]:
    """(total, allowed) t-tuple counts via one incremental engine."""
    enc = compile_model(model)
    solver = enc.new_solver()
    n = model.n_params
    domains = model.domains
    total = 0
    allowed = 0
    for combo in itertools.combinations(range(n), t):
        for values in itertools.product(*(range(len(domains[p]))
                                          for p in combo)):
            total += 1
            lits = [enc.lit(p, v) for p, v in zip(combo, values)]
            if solver.solve(lits).status is SolveStatus.SAT:
                allowed += 1
    return total, allowed


def _emit(**pairs) -> None:
    for key, value in pairs.items():
        print(f"{key}={value}")


def cmd_gen(args) -> int:
    doc = parse_dimacs(_read(args.cnf))
    seeds = tuple(int(s) for s in args.seeds.split(",") if s)
    source = pathlib.Path(args.cnf).stem
    cfg = GenConfig(n=args.n, c_min=args.cmin, c_max=args.cmax,
                    delta_a=args.delta, nabla_a=args.nabla, seeds=seeds,
                    max_tries=args.max_tries, query_budget=args.budget,
                    gen_seed=args.gen_seed, wall_limit_s=args.wall_timeout)
    result = generate(doc.cnf, cfg, source=source)
    if result is None:
        print("generation failed", file=sys.stderr)
        _emit(status="failed")
        return EXIT_NEGATIVE
    outdir = pathlib.Path(args.out)
    model_path = outdir / f"{source}.xacts"
    sidecar_path = outdir / f"{source}.provenance"
    _write(model_path, write_extended_acts(result.model))
    _write(sidecar_path, write_provenance(result))
    _emit(status="ok", model=model_path, provenance=sidecar_path,
          params=result.provenance["n"],
          measured_c=result.provenance["measured_c"])
    return EXIT_OK


def cmd_build(args) -> int:
    model = load_model(args.model, args.format)
    if args.alg == "ipog":
        suite = build_ipog(model, args.t, seed=args.seed)
    elif args.alg == "bot":
        suite = build_bot(model, args.t, BotConfig(cb=args.cb, seed=args.seed))
    elif args.alg == "pbot":
        if args.pool_bytes is None:
            # unbounded pool degenerates to plain bot
            suite = build_bot(model, args.t,
                              BotConfig(cb=args.cb, seed=args.seed))
        else:
            suite = build_pbot(model, args.t,
                               BotConfig(cb=args.cb, seed=args.seed,
                                         pool_budget=args.pool_bytes))
    else:
        raise CliError(f"unknown algorithm {args.alg!r}")
    out = pathlib.Path(args.out)
    _write(out, write_test_suite(suite, model))
    if args.stats:
        total, allowed = _tuple_census(model, args.t)
        lines = [
            f"algorithm={suite.meta.algorithm}",
            f"strength={suite.meta.strength}",
            f"seed={suite.meta.seed}",
            f"size={len(suite.tests)}",
            f"wall_time_s={suite.meta.wall_time_s:.6f}",
            f"tuples_total={total}",
            f"tuples_allowed={allowed}",
            f"tuples_forbidden={total - allowed}",
        ]
        lines += [f"stat_{k}={v}" for k, v in sorted(suite.meta.stats.items())]
        _write(pathlib.Path(args.stats), "\n".join(lines) + "\n")
    _emit(out=out, size=len(suite.tests),
          wall_time_s=f"{suite.meta.wall_time_s:.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    model = load_model(args.model, args.format)
    suite = read_test_suite(_read(args.suite), model, strength=args.t)
    report = verify_mcac(model, args.t, suite)
    sys.stdout.write(report.summary())
    if args.failures and not report.valid:
        _write(pathlib.Path(args.failures), report.failures_csv(model))
    return EXIT_OK if report.valid else EXIT_NEGATIVE


def cmd_convert(args) -> int:
    model = load_model(getattr(args, "in"), getattr(args, "from"))
    out = pathlib.Path(args.out)
    try:
        if args.to == "acts":
            texts = [(out, write_acts(model))]
        elif args.to == "xacts":
            texts = [(out, write_extended_acts(model))]
        elif args.to == "casa":
            model_text, cons_text = write_casa(model)
            texts = [(out, model_text), (_casa_companion(out), cons_text)]
        else:
            raise CliError(f"unknown model format {args.to!r}")
    except FormatError as e:
        print(f"inexpressible: {e}", file=sys.stderr)
        return EXIT_INEXPRESSIBLE
    for path, text in texts:
        _write(path, text)
    _emit(**{"out": texts[0][0],
             **({"constraints": texts[1][0]} if len(texts) > 1 else {})})
    return EXIT_OK


def cmd_stats(args) -> int:
    model = load_model(args.model, args.format)
    total, allowed = _tuple_census(model, args.t)
    _emit(params=model.n_params,
          sum_g=sum(len(d) for d in model.domains),
          strength=args.t,
          total=total, allowed=allowed, forbidden=total - allowed)
    return EXIT_OK


def _build_parser() -> _Parser:
    top = _Parser(prog="ctforge", description=__doc__,
                  formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a benchmark model from a CNF")
    g.add_argument("--cnf", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--cmin", type=float, required=True)
    g.add_argument("--cmax", type=float, required=True)
    g.add_argument("--delta", type=int, default=10)
    g.add_argument("--nabla", type=int, default=5)
    g.add_argument("--seeds", default="1,2,3,4,5")
    g.add_argument("--max-tries", type=int, default=100)
    g.add_argument("--budget", type=int, default=10_000_000)
    g.add_argument("--gen-seed", type=int, default=0)
    g.add_argument("--wall-timeout", type=float, default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build a covering array")
    b.add_argument("--model", required=True)
    b.add_argument("--format", required=True, choices=MODEL_FORMATS)
    b.add_argument("--alg", required=True)
    b.add_argument("--t", type=int, required=True)
    b.add_argument("--cb", type=int, default=100)
    b.add_argument("--pool-bytes", type=int, default=None)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.add_argument("--stats", default=None)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="verify a suite is a valid MCAC")
    v.add_argument("--model", required=True)
    v.add_argument("--format", required=True, choices=MODEL_FORMATS)
    v.add_argument("--t", type=int, required=True)
    v.add_argument("--suite", required=True)
    v.add_argument("--failures", default=None)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("convert", help="convert between model formats")
    c.add_argument("--in", required=True)
    c.add_argument("--from", required=True, choices=MODEL_FORMATS)
    c.add_argument("--to", required=True, choices=MODEL_FORMATS)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_convert)

    s = sub.add_parser("stats", help="tuple census for a model")
    s.add_argument("--model", required=True)
    s.add_argument("--format", required=True, choices=MODEL_FORMATS)
    s.add_argument("--t", type=int, required=True)
    s.set_defaults(func=cmd_stats)
    return top


def main(argv=None) -> int:
    try:
        _setup_logging()
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ModelError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
