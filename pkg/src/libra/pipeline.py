"""End-to-end anonymization pipeline and command-line interface.

The run proceeds exactly in this order: estimate the per-order Laplace
epsilon, count variants, derive the clipping threshold, clip rare variants,
then repeat (Poisson sample, anonymize, pick relevant traces) for eta
rounds and merge the rounds under round-qualified case IDs. The budget
report is computed alongside. Rounds own disjoint RNG streams, so serial
and concurrent execution produce identical output.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime

from . import figures
from .accountant import (
    PrivacyConfig,
    PrivacyReport,
    build_report,
    clipping_threshold,
    eps_laplace,
    subsample_rounds,
)
from .anonymizer import anonymize_subsample, clip_rare_variants
from .errors import LibraError, NotAnonymizable
from .evaluator import build_dfg, emd_frequency, emd_time
from .log_io import ISO_SECONDS, CsvSchema, parse_csv, parse_xes, serialize_csv
from .log_model import EventLog, Trace, extract_variants
from .postprocessor import pick_relevant
from .sampler import RngStream, poisson_sample

SEED_ENV_VAR = "LIBRA_SEED"


@dataclass
class RunResult:
    anonymized_log: EventLog
    report: PrivacyReport
    warnings: list[str] = field(default_factory=list)


def _run_round(
    clipped: EventLog, config: PrivacyConfig, round_index: int, epoch: datetime
) -> list[Trace]:
    """One subsample round; consumes only its own RNG stream."""
    gen = RngStream(config.seed, round_index).generator()
    sample = poisson_sample(clipped, config.gamma, gen, round_index=round_index)
    anonymized = anonymize_subsample(sample, config, gen, epoch=epoch)
    return pick_relevant(anonymized, config.omega, config.rho, gen, config.p_hat)


def run(log: EventLog, config: PrivacyConfig) -> RunResult:
    """Anonymize a log under the given configuration.

    Raises NotAnonymizable when every variant of the input is unique. When
    clipping empties the log, returns an empty log plus a warning rather
    than failing.
    """
    warnings: list[str] = []
    variants = extract_variants(log)
    k = len(variants)
    if k == 0:
        warnings.append("input log is empty")
        return RunResult(EventLog(), build_report(config, 0, 0, warnings=tuple(warnings)), warnings)

    if config.clip_override is not None:
        threshold = config.clip_override
    else:
        threshold = clipping_threshold(eps_laplace(config.alpha, config.b), config.delta, k)
    clipped = clip_rare_variants(log, threshold)
    z = clipped.case_count

    if z == 0:
        warnings.append(
            f"clipping at threshold {threshold:.3f} removed every trace; output log is empty"
        )
        report = build_report(
            config, 0, k, cases_before=log.case_count, variants_after=0,
            warnings=tuple(warnings),
        )
        return RunResult(EventLog(), report, warnings)

    eta = subsample_rounds(config, z)
    epoch = log.epoch
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rounds = list(
                pool.map(lambda r: _run_round(clipped, config, r, epoch), range(eta))
            )
    else:
        rounds = [_run_round(clipped, config, r, epoch) for r in range(eta)]

    merged = tuple(
        trace.with_case_id(f"r{r}_{trace.case_id}")
        for r, picked in enumerate(rounds)
        for trace in picked
    )
    if not merged:
        warnings.append("no traces survived subsampling and post-processing")
    report = build_report(
        config, z, k,
        cases_before=log.case_count,
        variants_after=len({t.activities for t in clipped.traces}),
        warnings=tuple(warnings),
    )
    return RunResult(EventLog(merged), report, warnings)


def _column(value: str) -> str | int:
    return int(value) if value.lstrip("-").isdigit() else value


def _schema_from_args(args: argparse.Namespace) -> CsvSchema:
    return CsvSchema(
        case_column=_column(args.case_col),
        activity_column=_column(args.activity_col),
        timestamp_column=_column(args.timestamp_col),
        timestamp_format=args.timestamp_format,
        delimiter=args.delimiter,
    )


def _add_format_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "xes"), default="csv")
    p.add_argument("--case-col", default="case_id")
    p.add_argument("--activity-col", default="activity")
    p.add_argument("--timestamp-col", default="timestamp")
    p.add_argument("--timestamp-format", default=ISO_SECONDS)
    p.add_argument("--delimiter", default=",")


def _load_log(path: str, fmt: str, schema: CsvSchema) -> EventLog:
    with open(path, "rb") as handle:
        data = handle.read()
    return parse_xes(data) if fmt == "xes" else parse_csv(data, schema)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="libra",
        description="Anonymize process mining event logs with a differential "
        "privacy guarantee amplified by Poisson subsampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    anon = sub.add_parser("anonymize", help="anonymize an event log")
    anon.add_argument("--input", required=True)
    _add_format_options(anon)
    anon.add_argument("--alpha", type=int, required=True, help="Renyi divergence order (integer >= 2)")
    anon.add_argument("--delta", type=float, default=1e-4)
    anon.add_argument("--gamma", type=float, default=0.05, help="Poisson sampling ratio")
    anon.add_argument("--scale", type=float, default=2.0, help="Laplace scale b")
    anon.add_argument("--omega", type=float, default=0.0, help="relevance distance threshold")
    anon.add_argument("--p-hat", type=float, default=0.05, dest="p_hat")
    anon.add_argument("--rho", type=float, default=0.95)
    anon.add_argument("--seed", type=int, default=0)
    anon.add_argument("--eta-literal", action="store_true",
                      help="use gamma*z subsample rounds instead of ceil(1/gamma)")
    anon.add_argument("--unsafe-zero-noise", action="store_true",
                      help="disable all noise (testing only; output is NOT private)")
    anon.add_argument("--clip-override", type=float, default=None,
                      help="use this clipping threshold instead of the derived one "
                      "(diagnostic; 0 disables clipping)")
    anon.add_argument("--output", required=True)
    anon.add_argument("--report", default=None)
    anon.add_argument("--figures", default=None, help="directory for rendered figures")
    anon.add_argument("--threads", type=int, default=1)
    anon.set_defaults(func=_cmd_anonymize)

    ev = sub.add_parser("evaluate", help="measure utility loss between two logs")
    ev.add_argument("--original", required=True)
    ev.add_argument("--anonymized", required=True)
    _add_format_options(ev)
    ev.add_argument("--figures", default=None, help="directory for rendered figures")
    ev.set_defaults(func=_cmd_evaluate)
    return parser


def _cmd_anonymize(args: argparse.Namespace) -> int:
    seed = int(os.environ[SEED_ENV_VAR]) if SEED_ENV_VAR in os.environ else args.seed
    config = PrivacyConfig(
        alpha=args.alpha, delta=args.delta, gamma=args.gamma, b=args.scale,
        omega=args.omega, rho=args.rho, p_hat=args.p_hat, seed=seed,
        eta_literal=args.eta_literal, zero_noise=args.unsafe_zero_noise,
        clip_override=args.clip_override, threads=args.threads,
    )
    schema = _schema_from_args(args)
    log = _load_log(args.input, args.format, schema)
    result = run(log, config)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    out_schema = schema if args.format == "csv" else CsvSchema()
    with open(args.output, "wb") as handle:
        handle.write(serialize_csv(result.anonymized_log, out_schema))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            handle.write(result.report.render())
    else:
        sys.stdout.write(result.report.render())
    if args.figures:
        figures.render_run_figures(
            log, result.anonymized_log, config,
            z=result.report.cases_after, k=result.report.variants_before,
            directory=args.figures,
        )
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    schema = _schema_from_args(args)
    original = build_dfg(_load_log(args.original, args.format, schema))
    anonymized = build_dfg(_load_log(args.anonymized, args.format, schema))
    print(f"emd_freq = {emd_frequency(original, anonymized)}")
    print(f"emd_time_hours = {emd_time(original, anonymized)}")
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        figures.save_dfg_frequency_figure(
            original, anonymized, os.path.join(args.figures, "dfg_frequencies.png")
        )
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    """Entry point returning an exit code: 0 success, 1 not anonymizable,
    2 usage, I/O or data errors."""
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if argv and argv[0] not in {"anonymize", "evaluate", "-h", "--help"}:
        argv.insert(0, "anonymize")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except NotAnonymizable as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (LibraError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
