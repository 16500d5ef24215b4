"""Command line front end.

Subcommands: ``prove`` one file, ``featurize`` a corpus, ``train`` a model
from example files, ``loop`` the full proving/learning pipeline, ``report``
a finished run as CSV or SVG.  Exit codes: 0 on success, 1 on usage errors,
2 on runtime failures (unreadable input, malformed data, aborted loops).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import tptp
from .features import (
    ConfigMismatchError,
    ExampleFormatError,
    ExampleRow,
    FeatureConfig,
    featurize,
    featurize_conjecture,
    read_examples,
    write_examples,
)
from .gbdt import (
    Dataset,
    DatasetRow,
    ModelFormatError,
    TrainParams,
    deserialize_model,
    serialize_model,
    train,
)
from .guidance import Guidance, GuidanceMode
from .harness import (
    LoopError,
    ReportFormatError,
    RunConfig,
    load_corpus,
    parse_report_csv,
    report_csv,
    report_svg,
    rows_to_series,
    run_loop,
)
from .saturation import Limits, Status, format_proof, saturate, verify_proof
from .schedules import SCHEDULE_NAMES, builtin_schedule
from .tptp import ParseError, format_clause

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract here reserves 2 for
    runtime failures, so usage problems exit 1 instead."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _limits_from(args: argparse.Namespace) -> Limits:
    return Limits(max_selections=args.max_selections, wall_seconds=args.wall_secs)


def _add_limit_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--max-selections", type=int, metavar="N",
                       help="stop each run after N given-clause selections (default 1000)")
    group.add_argument("--wall-secs", type=float, metavar="S",
                       help="stop each run after S seconds of wall time")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bareprover", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    prove = sub.add_parser("prove", help="run saturation on one TPTP CNF file")
    prove.add_argument("file")
    prove.add_argument("--strategy", choices=["e0"], default=None,
                       help="named baseline strategy (default when no model is given)")
    prove.add_argument("--model", metavar="M", help="model file for guided selection")
    mode = prove.add_mutually_exclusive_group()
    mode.add_argument("--solo", action="store_true", help="model-only queue")
    mode.add_argument("--coop", action="store_true", help="model mixed 50:50 with the baseline")
    _add_limit_flags(prove)
    prove.add_argument("--proof", action="store_true",
                       help="print the refutation, one clause per line")
    prove.add_argument("--check", action="store_true",
                       help="re-verify the refutation before reporting it")

    feat = sub.add_parser("featurize", help="dump feature vectors for a corpus")
    feat.add_argument("--corpus", required=True, metavar="DIR")
    feat.add_argument("--bits", type=int, required=True, metavar="B")
    feat.add_argument("--out", required=True, metavar="F")

    tr = sub.add_parser("train", help="train a model from example files")
    tr.add_argument("--data", required=True, nargs="+", metavar="F")
    tr.add_argument("--depth", type=int, required=True)
    tr.add_argument("--trees", type=int, required=True)
    tr.add_argument("--eta", type=float, default=0.2)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--out", required=True, metavar="M")

    loop = sub.add_parser("loop", help="run the proving/learning loop")
    loop.add_argument("--corpus", required=True, metavar="DIR")
    loop.add_argument("--schedule", required=True, choices=SCHEDULE_NAMES)
    loop.add_argument("--loops", type=int, required=True)
    loop.add_argument("--mode", choices=["solo", "coop"], default="solo")
    loop.add_argument("--boost", nargs="+", default=[], metavar="F")
    loop.add_argument("--boost-cutoff", type=int, default=4)
    loop.add_argument("--seed", type=int, default=0)
    loop.add_argument("--out-dir", required=True, metavar="DIR")
    _add_limit_flags(loop)

    rep = sub.add_parser("report", help="print a finished run's report")
    rep.add_argument("--in", dest="in_dir", required=True, metavar="DIR")
    fmt = rep.add_mutually_exclusive_group(required=True)
    fmt.add_argument("--csv", action="store_true")
    fmt.add_argument("--svg", action="store_true")
    return parser


def _cmd_prove(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.model is None:
        if args.solo or args.coop:
            parser.error("--solo/--coop require --model")
        guidance = Guidance(GuidanceMode.E0)
    else:
        if args.strategy is not None:
            parser.error("--strategy and --model are mutually exclusive")
        if not (args.solo or args.coop):
            parser.error("--model requires --solo or --coop")
        model = deserialize_model(Path(args.model).read_text(encoding="utf-8"))
        cfg = FeatureConfig(bits=model.feature_bits)
        guidance = Guidance(
            GuidanceMode.SOLO if args.solo else GuidanceMode.COOP, model, cfg
        )
    problem = tptp.load_problem(args.file)
    result = saturate(problem, guidance.strategy_for(problem), _limits_from(args))
    print(result.szs)
    if result.status is Status.UNSATISFIABLE:
        if args.check:
            check = verify_proof(result, problem)
            if not check:
                print(f"# proof check FAILED at {check.failed_id}: {check.reason}",
                      file=sys.stderr)
                return RUNTIME_ERROR
            print("# proof check passed")
        if args.proof:
            print(format_proof(result, format_clause))
    return 0


def _cmd_featurize(args: argparse.Namespace) -> int:
    cfg = FeatureConfig(bits=args.bits)
    entries = load_corpus(args.corpus)
    rows: list[ExampleRow] = []
    for entry in entries:
        if entry.problem is None:
            print(f"# skipping {entry.name}: {entry.error}", file=sys.stderr)
            continue
        conjecture = featurize_conjecture(entry.problem, cfg)
        for clause in entry.problem.clauses:
            rows.append(
                ExampleRow(
                    featurize(clause, conjecture, cfg),
                    label=0,
                    problem=entry.name,
                    source="input",
                )
            )
    with open(args.out, "w", encoding="utf-8") as handle:
        write_examples(handle, args.bits, rows)
    print(f"wrote {len(rows)} vectors from {len(entries)} problems to {args.out}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    bits: Optional[int] = None
    merged: dict = {}
    for path in args.data:
        with open(path, "r", encoding="utf-8") as handle:
            file_bits, rows = read_examples(handle)
        if bits is None:
            bits = file_bits
        elif file_bits != bits:
            raise ConfigMismatchError(
                f"{path} uses bits={file_bits}, earlier files use bits={bits}"
            )
        for row in rows:
            merged[row.vector] = max(merged.get(row.vector, 0), row.label)
    ordered = sorted(merged.items(), key=lambda kv: (kv[0].slots, kv[0].counts))
    dataset = Dataset(
        bits=bits, rows=tuple(DatasetRow(v, label) for v, label in ordered)
    )
    params = TrainParams(depth=args.depth, trees=args.trees, eta=args.eta)
    model = train(dataset, params, seed=args.seed)
    Path(args.out).write_text(serialize_model(model), encoding="utf-8")
    print(f"trained {args.trees} trees of depth <= {args.depth} "
          f"on {len(dataset.rows)} rows; wrote {args.out}")
    return 0


def _cmd_loop(args: argparse.Namespace) -> int:
    schedule = tuple(builtin_schedule(args.schedule, args.loops))
    config = RunConfig(
        corpus_dir=args.corpus,
        schedule=schedule,
        mode=GuidanceMode(args.mode),
        limits=_limits_from(args),
        boost_files=tuple(args.boost),
        boost_cutoff=args.boost_cutoff,
        seed=args.seed,
        out_dir=args.out_dir,
    )
    rows = run_loop(config)
    for row in rows:
        print(f"loop {row.loop} ({row.mode}): solved {row.solved}, cumulative {row.cumulative}")
    print(f"report written to {Path(args.out_dir) / 'report.csv'}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    path = Path(args.in_dir) / "report.csv"
    rows = parse_report_csv(path.read_text(encoding="utf-8"))
    if args.csv:
        sys.stdout.write(report_csv(rows))
    else:
        sys.stdout.write(report_svg([rows_to_series(rows, Path(args.in_dir).name)]))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "prove":
            return _cmd_prove(args, parser)
        if args.command == "featurize":
            return _cmd_featurize(args)
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "loop":
            return _cmd_loop(args)
        if args.command == "report":
            return _cmd_report(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (
        ParseError,
        ConfigMismatchError,
        ExampleFormatError,
        ModelFormatError,
        ReportFormatError,
        LoopError,
        FileNotFoundError,
        NotADirectoryError,
        IsADirectoryError,
        PermissionError,
        ValueError,
    ) as exc:
        print(f"bareprover: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
