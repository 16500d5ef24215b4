"""The proving/learning loop.

One run alternates corpus evaluation and model training: an unguided
baseline pass first (loop -1), then for each scheduled loop k a model is
trained on everything harvested so far (plus boost files while k is below
the cutoff), the corpus is re-evaluated under that model, and the new traces
are harvested.  Solved counts accumulate as a union across loops.

All aggregation is keyed by sorted problem names, and in selection-budget
mode every stage is deterministic, including the CSV report bytes: measured
wall times are only reported when a wall-clock limit is in force.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Optional, Sequence

from . import tptp
from .features import (
    ConfigMismatchError,
    ExampleRow,
    FeatureConfig,
    FeatureVector,
    featurize,
    featurize_conjecture,
    read_examples,
    write_examples,
)
from .gbdt import Dataset, DatasetRow, serialize_model, train
from .guidance import Guidance, GuidanceMode, baseline_guidance
from .saturation import Limits, Status, extract_proof, saturate
from .schedules import ScheduleEntry
from .terms import Clause, Problem

SELF_SOURCE = "self"


@dataclass(frozen=True)
class ProblemEntry:
    """One corpus file: its parsed problem, or the parse error."""

    name: str
    problem: Optional[Problem] = None
    error: Optional[str] = None


def load_corpus(path: str) -> list[ProblemEntry]:
    """All ``.p`` files under a directory, sorted by name.  Files that fail
    to parse become error entries rather than aborting the batch."""
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {path}")
    entries: list[ProblemEntry] = []
    for file in sorted(root.glob("*.p")):
        try:
            problem = tptp.load_problem(str(file))
        except (tptp.ParseError, OSError) as exc:
            entries.append(ProblemEntry(name=file.stem, error=str(exc)))
            continue
        entries.append(ProblemEntry(name=file.stem, problem=problem))
    return entries


@dataclass(frozen=True)
class EvalOutcome:
    """Per-problem result of one corpus pass, reduced to what the loop
    needs: status, cost, and the selected clauses split by proof membership."""

    name: str
    status: Optional[Status]
    error: Optional[str]
    selections: int
    seconds: float
    proof_clauses: tuple[Clause, ...] = ()
    other_selected: tuple[Clause, ...] = ()

    @property
    def solved(self) -> bool:
        return self.status is Status.UNSATISFIABLE

    @property
    def status_text(self) -> str:
        if self.status is None:
            return "ParseError"
        return self.status.value


def _run_one(entry: ProblemEntry, guidance: Guidance, limits: Limits) -> EvalOutcome:
    if entry.problem is None:
        return EvalOutcome(entry.name, None, entry.error, 0, 0.0)
    strategy = guidance.strategy_for(entry.problem)
    started = time.perf_counter()
    result = saturate(entry.problem, strategy, limits)
    # only report times under a wall-clock limit; budget mode stays exact
    seconds = 0.0 if limits.wall_seconds is None else time.perf_counter() - started
    proof: tuple[Clause, ...] = ()
    rest: tuple[Clause, ...] = ()
    if result.status is Status.UNSATISFIABLE:
        proof_ids = extract_proof(result.dag, result.contradiction_id)
        proof = tuple(result.dag[cid] for cid in result.trace if cid in proof_ids)
        rest = tuple(result.dag[cid] for cid in result.trace if cid not in proof_ids)
    return EvalOutcome(
        name=entry.name,
        status=result.status,
        error=None,
        selections=result.stats.selections,
        seconds=seconds,
        proof_clauses=proof,
        other_selected=rest,
    )


def evaluate_corpus(
    entries: Sequence[ProblemEntry],
    guidance: Guidance,
    limits: Limits,
    workers: int = 1,
) -> list[EvalOutcome]:
    """Run every corpus problem under one strategy.  Results keep the input
    (name-sorted) order regardless of worker count."""
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if workers == 1 or len(entries) <= 1:
        return [_run_one(e, guidance, limits) for e in entries]
    runner = partial(_run_one, guidance=guidance, limits=limits)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(runner, entries))


# ---------------------------------------------------------------------------
# training data accumulation


@dataclass
class _StoredRow:
    label: int
    first_loop: int


class TrainingStore:
    """Clause-level training rows accumulated across loops.

    Keys are (problem name, clause) so rows can be re-featurized when the
    hash size changes between loops.  A clause seen with both labels keeps
    the positive one.
    """

    def __init__(self) -> None:
        self.rows: dict[tuple[str, Clause], _StoredRow] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def add(self, problem_name: str, clause: Clause, label: int, loop_index: int) -> None:
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        key = (problem_name, clause)
        row = self.rows.get(key)
        if row is None:
            self.rows[key] = _StoredRow(label=label, first_loop=loop_index)
        else:
            row.label = max(row.label, label)
            row.first_loop = min(row.first_loop, loop_index)


def harvest(
    outcomes: Sequence[EvalOutcome],
    store: Optional[TrainingStore] = None,
    loop_index: int = 0,
) -> TrainingStore:
    """Fold one evaluation pass into the store: for each solved problem, the
    selected proof clauses are positives and the other selected clauses
    negatives.  Unsolved problems contribute nothing."""
    if store is None:
        store = TrainingStore()
    for outcome in outcomes:
        if not outcome.solved:
            continue
        for clause in outcome.proof_clauses:
            store.add(outcome.name, clause, 1, loop_index)
        for clause in outcome.other_selected:
            store.add(outcome.name, clause, 0, loop_index)
    return store


@dataclass(frozen=True)
class BoostFile:
    """Pre-featurized rows from another run, tagged by file stem."""

    tag: str
    bits: int
    rows: tuple[tuple[FeatureVector, int], ...]


def load_boost_file(path: str) -> BoostFile:
    with open(path, "r", encoding="utf-8") as handle:
        bits, rows = read_examples(handle)
    return BoostFile(
        tag=f"boost:{Path(path).stem}",
        bits=bits,
        rows=tuple((r.vector, r.label) for r in rows),
    )


@dataclass
class _Merged:
    label: int
    sources: set[str]
    problem: str
    loop: Optional[int]


def build_dataset(
    store: TrainingStore,
    problems: dict[str, Problem],
    cfg: FeatureConfig,
    boost: Sequence[BoostFile] = (),
    loop_index: int = 0,
    cutoff: int = 4,
) -> tuple[Dataset, list[ExampleRow]]:
    """Featurize the store under ``cfg`` and merge in boost rows while
    ``loop_index < cutoff``.  Vector-level duplicates collapse; a vector seen
    with both labels keeps the positive.  Rows come out in canonical
    (slots, counts) order, so the result is independent of harvest history.
    """
    acc: dict[FeatureVector, _Merged] = {}
    conjectures: dict[str, FeatureVector] = {}
    for (pname, clause), srow in store.rows.items():
        conj = conjectures.get(pname)
        if conj is None:
            conj = featurize_conjecture(problems[pname], cfg)
            conjectures[pname] = conj
        vector = featurize(clause, conj, cfg)
        merged = acc.get(vector)
        if merged is None:
            acc[vector] = _Merged(
                label=srow.label, sources={SELF_SOURCE}, problem=pname, loop=srow.first_loop
            )
        else:
            merged.label = max(merged.label, srow.label)
            merged.sources.add(SELF_SOURCE)
    if loop_index < cutoff:
        for bf in boost:
            if bf.bits != cfg.bits:
                raise ConfigMismatchError(
                    f"boost data {bf.tag!r} uses bits={bf.bits}, this loop uses bits={cfg.bits}"
                )
            for vector, label in bf.rows:
                merged = acc.get(vector)
                if merged is None:
                    acc[vector] = _Merged(label=label, sources={bf.tag}, problem="", loop=None)
                else:
                    merged.label = max(merged.label, label)
                    merged.sources.add(bf.tag)
    ordered = sorted(acc.items(), key=lambda kv: (kv[0].slots, kv[0].counts))
    dataset = Dataset(
        bits=cfg.bits,
        rows=tuple(
            DatasetRow(vector, m.label, frozenset(m.sources)) for vector, m in ordered
        ),
    )
    examples = [
        ExampleRow(
            vector,
            m.label,
            problem=m.problem,
            loop=m.loop,
            source="+".join(sorted(m.sources)),
        )
        for vector, m in ordered
    ]
    return dataset, examples


def dataset_counts(dataset: Dataset) -> tuple[int, int, int]:
    """(self positives, self negatives, boost-only rows)."""
    pos = neg = boost_only = 0
    for row in dataset.rows:
        if SELF_SOURCE in row.sources:
            if row.label == 1:
                pos += 1
            else:
                neg += 1
        else:
            boost_only += 1
    return pos, neg, boost_only


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class LoopRow:
    loop: int
    mode: str
    depth: int
    trees: int
    bits: int
    solved: int
    cumulative: int
    pos: int
    neg: int
    boost: int
    seconds: float
    newly_solved: tuple[str, ...] = ()


REPORT_HEADER = "loop,mode,D,T,bits,solved,cumulative,pos,neg,boost,seconds"


def report_csv(rows: Sequence[LoopRow]) -> str:
    lines = [REPORT_HEADER]
    for r in rows:
        lines.append(
            f"{r.loop},{r.mode},{r.depth},{r.trees},{r.bits},{r.solved},"
            f"{r.cumulative},{r.pos},{r.neg},{r.boost},{r.seconds!r}"
        )
    return "\n".join(lines) + "\n"


class ReportFormatError(ValueError):
    pass


def parse_report_csv(text: str) -> tuple[LoopRow, ...]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != REPORT_HEADER:
        raise ReportFormatError("missing or malformed report header")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 11:
            raise ReportFormatError(f"line {lineno}: expected 11 columns")
        try:
            rows.append(
                LoopRow(
                    loop=int(parts[0]),
                    mode=parts[1],
                    depth=int(parts[2]),
                    trees=int(parts[3]),
                    bits=int(parts[4]),
                    solved=int(parts[5]),
                    cumulative=int(parts[6]),
                    pos=int(parts[7]),
                    neg=int(parts[8]),
                    boost=int(parts[9]),
                    seconds=float(parts[10]),
                )
            )
        except ValueError as exc:
            raise ReportFormatError(f"line {lineno}: {exc}") from None
    return tuple(rows)


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def report_svg(series: Sequence[tuple[str, Sequence[tuple[int, int]]]]) -> str:
    """Cumulative-solved-per-loop chart: one polyline per series."""
    width, height = 560, 360
    left, right, top, bottom = 56, 140, 24, 48
    plot_w = width - left - right
    plot_h = height - top - bottom

    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    xmin = min(xs, default=0)
    xmax = max(xs, default=1)
    ymax = max(ys, default=1)
    if xmax == xmin:
        xmax = xmin + 1
    ymax = max(ymax, 1)

    def px(x: float) -> float:
        return left + (x - xmin) / (xmax - xmin) * plot_w

    def py(y: float) -> float:
        return top + plot_h - y / ymax * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 10}" text-anchor="middle" '
        'font-size="12">loop</text>',
        f'<text x="14" y="{top + plot_h / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {top + plot_h / 2:.1f})">solved</text>',
    ]
    for x in range(xmin, xmax + 1):
        out.append(
            f'<text x="{px(x):.1f}" y="{top + plot_h + 16}" text-anchor="middle" '
            f'font-size="10">{x}</text>'
        )
    ticks = max(1, ymax // 4)
    y = 0
    while y <= ymax:
        out.append(
            f'<text x="{left - 6}" y="{py(y) + 3:.1f}" text-anchor="end" font-size="10">{y}</text>'
        )
        y += ticks
    for index, (label, pts) in enumerate(series):
        color = _PALETTE[index % len(_PALETTE)]
        coords = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        for x, yv in pts:
            out.append(f'<circle cx="{px(x):.1f}" cy="{py(yv):.1f}" r="2.5" fill="{color}"/>')
        ly = top + 14 + index * 16
        out.append(
            f'<line x1="{left + plot_w + 8}" y1="{ly - 4}" x2="{left + plot_w + 28}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{left + plot_w + 32}" y="{ly}" font-size="11">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def rows_to_series(rows: Sequence[LoopRow], label: str) -> tuple[str, list[tuple[int, int]]]:
    return label, [(r.loop, r.cumulative) for r in rows]


# ---------------------------------------------------------------------------
# the loop itself


@dataclass(frozen=True)
class RunConfig:
    corpus_dir: str
    schedule: tuple[ScheduleEntry, ...]
    mode: GuidanceMode = GuidanceMode.SOLO
    limits: Limits = Limits()
    boost_files: tuple[str, ...] = ()
    boost_cutoff: int = 4
    seed: int = 0
    out_dir: Optional[str] = None
    workers: int = 1
    eta: float = 0.2
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.mode is GuidanceMode.E0:
            raise ValueError("the loop needs a guided mode: solo or coop")
        if self.boost_cutoff < 0:
            raise ValueError("boost cutoff must be non-negative")
        if not self.schedule:
            raise ValueError("schedule must cover at least one loop")


class LoopError(RuntimeError):
    def __init__(self, loop_index: int, message: str) -> None:
        super().__init__(f"loop {loop_index}: {message}")
        self.loop_index = loop_index


def _write_results(
    directory: Path, outcomes: Sequence[EvalOutcome], newly: frozenset[str]
) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    lines = ["problem,status,selections,seconds,new"]
    for o in outcomes:
        lines.append(
            f"{o.name},{o.status_text},{o.selections},{o.seconds!r},{int(o.name in newly)}"
        )
    (directory / "results.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_loop(config: RunConfig) -> tuple[LoopRow, ...]:
    """Execute baseline plus all scheduled loops; returns the report rows.

    With ``out_dir`` set, each loop leaves ``loop-<k>/model.txt``,
    ``loop-<k>/data.txt`` and ``loop-<k>/results.csv`` behind, plus a
    top-level ``report.csv`` (also flushed when a loop aborts).
    """
    entries = load_corpus(config.corpus_dir)
    problems = {e.name: e.problem for e in entries if e.problem is not None}
    boost = tuple(load_boost_file(p) for p in config.boost_files)
    store = TrainingStore()
    solved_ever: set[str] = set()
    rows: list[LoopRow] = []
    out = Path(config.out_dir) if config.out_dir is not None else None
    timing = config.limits.wall_seconds is not None

    def flush_report() -> None:
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.csv").write_text(report_csv(rows), encoding="utf-8")

    def record(
        loop_index: int,
        mode_name: str,
        depth: int,
        trees: int,
        bits: int,
        counts: tuple[int, int, int],
        outcomes: Sequence[EvalOutcome],
        seconds: float,
    ) -> frozenset[str]:
        solved_names = sorted(o.name for o in outcomes if o.solved)
        newly = frozenset(n for n in solved_names if n not in solved_ever)
        solved_ever.update(solved_names)
        rows.append(
            LoopRow(
                loop=loop_index,
                mode=mode_name,
                depth=depth,
                trees=trees,
                bits=bits,
                solved=len(solved_names),
                cumulative=len(solved_ever),
                pos=counts[0],
                neg=counts[1],
                boost=counts[2],
                seconds=seconds,
                newly_solved=tuple(sorted(newly)),
            )
        )
        if out is not None:
            _write_results(out / f"loop-{loop_index}", outcomes, newly)
        return newly

    started = time.perf_counter()
    outcomes = evaluate_corpus(entries, baseline_guidance(), config.limits, config.workers)
    harvest(outcomes, store, loop_index=-1)
    seconds = time.perf_counter() - started if timing else 0.0
    record(-1, GuidanceMode.E0.value, 0, 0, 0, (0, 0, 0), outcomes, seconds)

    for k, entry in enumerate(config.schedule):
        started = time.perf_counter()
        cfg = entry.feature_config()
        dataset, examples = build_dataset(
            store, problems, cfg, boost, loop_index=k, cutoff=config.boost_cutoff
        )
        counts = dataset_counts(dataset)
        try:
            model = train(dataset, entry.train_params(config.eta, config.lam), seed=config.seed)
        except Exception as exc:
            flush_report()
            raise LoopError(k, f"training failed: {exc}") from exc
        guidance = Guidance(config.mode, model, cfg)
        outcomes = evaluate_corpus(entries, guidance, config.limits, config.workers)
        harvest(outcomes, store, loop_index=k)
        seconds = time.perf_counter() - started if timing else 0.0
        record(k, config.mode.value, entry.depth, entry.trees, entry.feature_bits, counts, outcomes, seconds)
        if out is not None:
            loop_dir = out / f"loop-{k}"
            loop_dir.mkdir(parents=True, exist_ok=True)
            (loop_dir / "model.txt").write_text(serialize_model(model), encoding="utf-8")
            with open(loop_dir / "data.txt", "w", encoding="utf-8") as handle:
                write_examples(handle, cfg.bits, examples)

    flush_report()
    return tuple(rows)
