import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import BaseModel, ValidationError

from kegelbench.util.lib.request import (
    DEFAULT_FIX_ITERS,
    DEFAULT_OP_DEPTH,
    DEFAULT_SUPPORT_CAP,
    DEFAULT_TOL,
    RunConfig,
)
from kegelbench.util.workbench import WorkbenchEngine

logger = logging.getLogger("kegelbench")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def emit(cfg: RunConfig, payload, text: str):
    """Write one result to stdout; JSON output is byte-identical for identical inputs"""
    if cfg.output_format == "text":
        print(text)
    elif isinstance(payload, BaseModel):
        print(payload.model_dump_json(by_alias=True))
    else:
        print(json.dumps(payload, sort_keys=True))


def fail(message: str, code: int = EXIT_FAILURE) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_check(engine: WorkbenchEngine, cfg: RunConfig) -> int:
    if cfg.command == "fpc-check":
        success, response, error = engine.fpc_check(cfg.path)
    else:
        success, response, error = engine.check(cfg.path)
    emit(cfg, response, response.type if success else f"type error: {error}")
    return EXIT_OK if success else EXIT_FAILURE


def cmd_run(engine: WorkbenchEngine, cfg: RunConfig) -> int:
    if cfg.trace:
        success, terms, error = engine.trace(cfg.path, cfg.seed, cfg.max_steps)
        if not success:
            return fail(error)
        emit(cfg, terms, "\n".join(terms))
        return EXIT_OK
    if cfg.samples:
        success, histogram, error = engine.sample(cfg.path, cfg.seed, cfg.samples, cfg.max_steps)
        if not success:
            return fail(error)
        lines = [f"{n}: {count}" for n, count in histogram.numerals.items()]
        lines.append(f"timeouts: {histogram.timeouts}")
        emit(cfg, histogram, "\n".join(lines))
        return EXIT_OK
    success, sample, error = engine.run(cfg.path, cfg.seed, cfg.max_steps)
    if not success:
        return fail(error)
    suffix = " (timeout)" if sample.timeout else ""
    emit(cfg, sample, f"{sample.outcome} after {sample.steps} steps{suffix}")
    return EXIT_OK


def cmd_dist(engine: WorkbenchEngine, cfg: RunConfig) -> int:
    success, td, error = engine.dist(cfg.path, cfg.op_depth)
    if not success:
        return fail(error)
    lines = [f"{term}: {w}" for term, w in td.outcomes.items()]
    lines.append(f"residual: {td.residual}")
    emit(cfg, td, "\n".join(lines))
    return EXIT_OK


def cmd_denote(engine: WorkbenchEngine, cfg: RunConfig) -> int:
    success, response, error = engine.denote(cfg.path, cfg.denote_config())
    if not success:
        return fail(error)
    lines = [f"{n}: {w}" for n, w in response.weights.items()]
    lines.append(f"mass: {response.mass}  discarded: {response.discarded_mass}")
    emit(cfg, response, "\n".join(lines))
    return EXIT_OK


def cmd_adequacy(engine: WorkbenchEngine, cfg: RunConfig) -> int:
    success, report, error = engine.adequacy(cfg.path, cfg.numeral, cfg.op_depth, cfg.denote_config(), cfg.tolerance)
    if not success:
        return fail(error)
    verdict = "pass" if report.passed else "FAIL"
    emit(cfg, report, f"{verdict}: op {report.op_lower}, den {report.den_lower}, gap {report.gap}")
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_fpc_run(engine: WorkbenchEngine, cfg: RunConfig) -> int:
    success, response, error = engine.fpc_run(cfg.path, cfg.fuel)
    if not success:
        return fail(error)
    label = "normal form" if response.normal else f"out of fuel after {cfg.fuel} steps"
    emit(cfg, response, f"{label}: {response.term} : {response.type}")
    return EXIT_OK if response.normal else EXIT_FAILURE


def cmd_corpus(engine: WorkbenchEngine, cfg: RunConfig) -> int:
    success, reports, error = engine.corpus(cfg.op_depth, cfg.denote_config(), cfg.tolerance)
    if not success:
        return fail(error)
    if cfg.output_format == "text":
        for report in reports:
            verdict = "pass" if report.passed else "FAIL"
            print(f"{verdict} n={report.n} gap={report.gap}  {report.term}")
    else:
        print(json.dumps([report.model_dump(by_alias=True) for report in reports]))
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FAILURE


HANDLERS = {
    "check": cmd_check,
    "fpc-check": cmd_check,
    "run": cmd_run,
    "dist": cmd_dist,
    "denote": cmd_denote,
    "adequacy": cmd_adequacy,
    "fpc-run": cmd_fpc_run,
    "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--op-depth", "--depth", dest="op_depth", type=int, default=DEFAULT_OP_DEPTH, help="Reduction steps k for Prob^k")
    common.add_argument("--fix-iters", type=int, default=DEFAULT_FIX_ITERS, help="Kleene iteration depth D for fix")
    common.add_argument("--support-cap", type=int, default=DEFAULT_SUPPORT_CAP, help="Largest numeral kept in a ground denotation")
    common.add_argument("--seed", type=int, default=0, help="PCG64 seed for sampling")
    common.add_argument("--tol", default=DEFAULT_TOL, help="Adequacy tolerance p/q")
    common.add_argument("--format", dest="output_format", choices=("json", "text"), default="json")
    common.add_argument("--converge", action="store_true", help="Stop a fix at type nat once successive iterates agree")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    parser = argparse.ArgumentParser("kegelbench", description="pPCF and FPC workbench: sampling, exact distributions, denotations, adequacy")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("check", "fpc-check", "dist", "denote"):
        sub.add_parser(name, parents=[common]).add_argument("path")

    run = sub.add_parser("run", parents=[common], help="Sample one seeded run, or a histogram with --samples")
    run.add_argument("path")
    run.add_argument("--samples", type=int, default=0, help="Number of runs for a histogram")
    run.add_argument("--max-steps", type=int, default=10_000)
    run.add_argument("--trace", action="store_true", help="Print every term visited by one seeded run")

    adequacy = sub.add_parser("adequacy", parents=[common], help="Compare Prob^k and the denotation at one numeral")
    adequacy.add_argument("path")
    adequacy.add_argument("--numeral", type=int, default=0)

    fpc_run = sub.add_parser("fpc-run", parents=[common], help="Normalize an FPC program")
    fpc_run.add_argument("path")
    fpc_run.add_argument("--fuel", type=int, default=1000)

    sub.add_parser("corpus", parents=[common], help="Adequacy over the bundled corpus, numerals 0 to 5")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        cfg = RunConfig(**{k: v for k, v in vars(args).items() if v is not None})
    except ValidationError as e:
        return fail(str(e), EXIT_USAGE)
    logger.info("running %s", cfg.command)
    try:
        code = HANDLERS[cfg.command](WorkbenchEngine(), cfg)
    except (OSError, UnicodeDecodeError) as e:
        return fail(str(e), EXIT_USAGE)
    logger.info("%s finished with exit code %d", cfg.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
