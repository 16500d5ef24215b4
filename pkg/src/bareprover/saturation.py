"""Given-clause saturation with round-robin multi-queue selection.

The proof state splits clauses into processed (P) and unprocessed (U).  Each
step pops a clause from one of the strategy's priority queues, discards it if
a processed clause subsumes it or it is a tautology, otherwise moves it to P
and inserts every inference between it and P into all queues.  The empty
clause ends the run the moment it is generated.
"""

from __future__ import annotations

import enum
import heapq
import time
from bisect import insort
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import calculus
from .terms import (
    Clause,
    INPUT_RULE,
    Literal,
    Problem,
    Provenance,
    Role,
    is_tautology,
    is_variant,
    subsumes,
)

Cef = Callable[[Clause], object]


@dataclass(frozen=True)
class EvalQueue:
    """One priority queue: a clause evaluation function plus its share of
    picks per round-robin round."""

    cef: Cef
    frequency: int

    def __post_init__(self) -> None:
        if self.frequency < 1:
            raise ValueError("queue frequency must be at least 1")


@dataclass(frozen=True)
class Strategy:
    """Queue lineup for clause selection.

    With ``prefer_initial`` set, input clauses outrank derived ones inside
    every queue regardless of their evaluation; ties always break by
    (weight, initial-priority, age) ascending.
    """

    queues: tuple[EvalQueue, ...]
    prefer_initial: bool = False

    def __post_init__(self) -> None:
        if not self.queues:
            raise ValueError("a strategy needs at least one queue")


@dataclass(frozen=True)
class Limits:
    """Run bounds.  With neither bound given, a default selection budget of
    1000 applies so every run terminates."""

    max_selections: Optional[int] = None
    wall_seconds: Optional[float] = None

    def __post_init__(self) -> None:
        if self.max_selections is None and self.wall_seconds is None:
            object.__setattr__(self, "max_selections", 1000)
        if self.max_selections is not None and self.max_selections < 0:
            raise ValueError("max_selections must be non-negative")
        if self.wall_seconds is not None and self.wall_seconds <= 0:
            raise ValueError("wall_seconds must be positive")


class Status(enum.Enum):
    UNSATISFIABLE = "Unsatisfiable"
    SATISFIABLE = "Satisfiable"
    RESOURCE_OUT = "ResourceOut"


TAUTOLOGY = "tautology"
SUBSUMED = "subsumed"


@dataclass
class Statistics:
    selections: int = 0
    generated: int = 0
    inserted: int = 0
    discarded: Counter = field(default_factory=Counter)
    queue_picks: list[int] = field(default_factory=list)


@dataclass
class SaturationResult:
    status: Status
    trace: tuple[int, ...]
    dag: dict[int, Clause]
    stats: Statistics
    contradiction_id: Optional[int] = None

    @property
    def szs(self) -> str:
        return f"# SZS status {self.status.value}"


class _Record:
    """Pool entry: the clause plus cached shape data for fast subsumption."""

    __slots__ = ("clause", "live", "processed", "keys", "symbols")

    def __init__(self, clause: Clause) -> None:
        self.clause = clause
        self.live = True
        self.processed = False
        self.keys = Counter((lit.positive, lit.head.name) for lit in clause.literals)
        self.symbols = _symbol_names(clause)


def _symbol_names(c: Clause) -> frozenset[str]:
    names = set()
    for lit in c.literals:
        names.add(lit.head.name)
        stack = list(lit.args)
        while stack:
            t = stack.pop()
            if hasattr(t, "head"):
                names.add(t.head.name)
                stack.extend(t.args)
    return frozenset(names)


class ProofState:
    """Mutable saturation state shared by ``saturate`` and ``select_next``."""

    def __init__(self, strategy: Strategy) -> None:
        self.strategy = strategy
        self.pool: dict[int, _Record] = {}
        self.live: set[int] = set()
        self.processed_cids: list[int] = []
        self.heaps: list[list[tuple]] = [[] for _ in strategy.queues]
        self.next_id = 0
        self.trace: list[int] = []
        self.stats = Statistics(queue_picks=[0] * len(strategy.queues))
        # subsumption candidates: one literal key per processed clause
        self.subsume_index: dict[tuple[bool, str], list[int]] = {}
        self.rr_queue = 0
        self.rr_left = strategy.queues[0].frequency

    # --- registration and queue insertion -----------------------------------

    def register(self, clause: Clause, role: Role, provenance: Optional[Provenance]) -> Clause:
        cid = self.next_id
        self.next_id += 1
        numbered = Clause(clause.literals, cid=cid, role=role, age=cid, provenance=provenance)
        self.pool[cid] = _Record(numbered)
        return numbered

    def enqueue(self, clause: Clause) -> None:
        self.live.add(clause.cid)
        prio = 0 if clause.is_initial else 1
        for qi, queue in enumerate(self.strategy.queues):
            weight = queue.cef(clause)
            if self.strategy.prefer_initial:
                key = (prio, weight, clause.age)
            else:
                key = (weight, prio, clause.age)
            heapq.heappush(self.heaps[qi], (key, clause.cid))

    def discard(self, cid: int, reason: str) -> None:
        self.live.discard(cid)
        self.pool[cid].live = False
        self.stats.discarded[reason] += 1

    def mark_processed(self, clause: Clause) -> None:
        rec = self.pool[clause.cid]
        rec.live = False
        rec.processed = True
        self.live.discard(clause.cid)
        insort(self.processed_cids, clause.cid)
        if clause.literals:
            key = (clause.literals[0].positive, clause.literals[0].head.name)
            self.subsume_index.setdefault(key, []).append(clause.cid)
        self.trace.append(clause.cid)
        self.stats.selections += 1

    def processed_clauses(self) -> list[Clause]:
        return [self.pool[cid].clause for cid in self.processed_cids]


def forward_simplify(clause: Clause, state: ProofState) -> Optional[str]:
    """Reason to drop the clause (tautology/subsumed by P), or None to keep."""
    if is_tautology(clause):
        return TAUTOLOGY
    rec = state.pool.get(clause.cid)
    keys = rec.keys if rec is not None else Counter(
        (lit.positive, lit.head.name) for lit in clause.literals
    )
    symbols = rec.symbols if rec is not None else _symbol_names(clause)
    nlits = len(clause.literals)
    seen: set[int] = set()
    for key in keys:
        for cid in state.subsume_index.get(key, ()):
            if cid in seen:
                continue
            seen.add(cid)
            cand = state.pool[cid]
            if len(cand.clause.literals) > nlits:
                continue
            if not all(keys[k] >= v for k, v in cand.keys.items()):
                continue
            if not cand.symbols <= symbols:
                continue
            if subsumes(cand.clause, clause):
                return SUBSUMED
    return None


def select_next(state: ProofState, strategy: Strategy) -> Optional[Clause]:
    """Pop the next given clause per the round-robin discipline.

    Stale heap entries (already selected or discarded) and clauses that a
    processed clause meanwhile subsumes are skipped without consuming the
    round slot.  Returns None once no live clause remains.
    """
    queues = strategy.queues
    empties = 0
    while empties < len(queues):
        heap = state.heaps[state.rr_queue]
        popped = None
        while heap:
            key, cid = heapq.heappop(heap)
            rec = state.pool[cid]
            if not rec.live:
                continue
            reason = forward_simplify(rec.clause, state)
            if reason is not None:
                state.discard(cid, reason)
                continue
            popped = rec.clause
            break
        if popped is not None:
            state.stats.queue_picks[state.rr_queue] += 1
            state.rr_left -= 1
            if state.rr_left == 0:
                state.rr_queue = (state.rr_queue + 1) % len(queues)
                state.rr_left = queues[state.rr_queue].frequency
            return popped
        # queue exhausted: hand the turn to the next queue
        empties += 1
        state.rr_queue = (state.rr_queue + 1) % len(queues)
        state.rr_left = queues[state.rr_queue].frequency
    return None


def saturate(problem: Problem, strategy: Strategy, limits: Limits) -> SaturationResult:
    """Run given-clause saturation on a CNF problem.

    Bit-reproducible for a fixed problem/strategy under selection budgets;
    wall-clock limits trade that for the paper-style timeout mode.
    """
    state = ProofState(strategy)
    start = time.monotonic()

    input_prov = Provenance(INPUT_RULE, (), ())
    for c in problem.clauses:
        role = c.role if c.role is not Role.DERIVED else Role.AXIOM
        registered = state.register(c, role, input_prov)
        if registered.is_empty:
            return _result(Status.UNSATISFIABLE, state, registered.cid)
        state.enqueue(registered)

    while True:
        if not state.live:
            return _result(Status.SATISFIABLE, state, None)
        if limits.max_selections is not None and state.stats.selections >= limits.max_selections:
            return _result(Status.RESOURCE_OUT, state, None)
        if limits.wall_seconds is not None and time.monotonic() - start > limits.wall_seconds:
            return _result(Status.RESOURCE_OUT, state, None)
        given = select_next(state, strategy)
        if given is None:
            return _result(Status.SATISFIABLE, state, None)
        partners = state.processed_clauses()
        state.mark_processed(given)
        outcomes = calculus.generate(given, partners)
        for outcome in outcomes:
            state.stats.generated += 1
            registered = state.register(
                outcome.conclusion, Role.DERIVED, outcome.conclusion.provenance
            )
            if registered.is_empty:
                return _result(Status.UNSATISFIABLE, state, registered.cid)
            reason = forward_simplify(registered, state)
            if reason is not None:
                state.discard(registered.cid, reason)
                continue
            state.enqueue(registered)
            state.stats.inserted += 1


def _result(status: Status, state: ProofState, contradiction_id: Optional[int]) -> SaturationResult:
    dag = {cid: rec.clause for cid, rec in state.pool.items()}
    return SaturationResult(
        status=status,
        trace=tuple(state.trace),
        dag=dag,
        stats=state.stats,
        contradiction_id=contradiction_id,
    )


# ---------------------------------------------------------------------------
# proof extraction and replay


class MalformedDagError(KeyError):
    pass


def extract_proof(dag: dict[int, Clause], root: int) -> frozenset[int]:
    """Ids of the root and all its ancestors.  Missing parents are an error."""
    if root not in dag:
        raise MalformedDagError(f"root {root} not in dag")
    seen: set[int] = set()
    stack = [root]
    while stack:
        cid = stack.pop()
        if cid in seen:
            continue
        seen.add(cid)
        clause = dag[cid]
        prov = clause.provenance
        if prov is None:
            raise MalformedDagError(f"clause {cid} has no provenance")
        for parent in prov.parents:
            if parent not in dag:
                raise MalformedDagError(f"clause {cid} references missing parent {parent}")
            stack.append(parent)
    return frozenset(seen)


@dataclass(frozen=True)
class ProofCheck:
    ok: bool
    failed_id: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _replay(clause: Clause, dag: dict[int, Clause]) -> Optional[Clause]:
    prov = clause.provenance
    parents = [dag[p] for p in prov.parents]
    if prov.rule == calculus.RESOLUTION:
        i, j = prov.positions
        out = calculus.resolve(parents[0], i, parents[1], j)
    elif prov.rule == calculus.FACTORING:
        i, j = prov.positions
        out = calculus.factor(parents[0], i, j)
    elif prov.rule == calculus.EQUALITY_RESOLUTION:
        (i,) = prov.positions
        out = calculus.equality_resolution(parents[0], i)
    elif prov.rule == calculus.PARAMODULATION:
        eq_index, orientation, lit_index, path = prov.positions
        out = calculus.paramodulate(
            parents[0], eq_index, orientation, parents[1], lit_index, tuple(path)
        )
    else:
        return None
    return None if out is None else out.conclusion


def verify_proof(result: SaturationResult, problem: Problem) -> ProofCheck:
    """Re-run every recorded inference in the proof of the empty clause.

    Checks that the root is the empty clause, every input node is a variant
    of some problem clause, and every derived node is reproduced (up to
    renaming) by its recorded rule, premises and positions.
    """
    root = result.contradiction_id
    if root is None:
        return ProofCheck(False, None, "no contradiction recorded")
    try:
        proof_ids = extract_proof(result.dag, root)
    except MalformedDagError as exc:
        return ProofCheck(False, root, str(exc))
    if result.dag[root].literals:
        return ProofCheck(False, root, "root is not the empty clause")
    for cid in sorted(proof_ids):
        clause = result.dag[cid]
        prov = clause.provenance
        if prov.rule == INPUT_RULE:
            if clause.role is Role.DERIVED:
                return ProofCheck(False, cid, "input node with derived role")
            if not any(is_variant(clause, c) for c in problem.clauses):
                return ProofCheck(False, cid, "input clause not in the problem")
            continue
        replayed = _replay(clause, result.dag)
        if replayed is None:
            return ProofCheck(False, cid, f"rule {prov.rule} did not fire on replay")
        if not is_variant(replayed, clause):
            return ProofCheck(False, cid, "replayed conclusion differs")
    return ProofCheck(True)


def format_proof(result: SaturationResult, format_clause: Callable[[Clause], str]) -> str:
    """One line per proof node: ``id. <clause> [rule, parents]``."""
    root = result.contradiction_id
    if root is None:
        return ""
    lines = []
    for cid in sorted(extract_proof(result.dag, root)):
        clause = result.dag[cid]
        prov = clause.provenance
        origin = prov.rule if not prov.parents else f"{prov.rule}, {', '.join(map(str, prov.parents))}"
        lines.append(f"{cid}. {format_clause(clause)} [{origin}]")
    return "\n".join(lines)
