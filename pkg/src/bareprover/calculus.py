"""Unordered superposition-style inference rules.

No term ordering and no literal selection: every rule fires on every literal
position that unifies.  Paramodulation rewrites in both orientations of the
equation and never into a variable position.  Conclusions are normalized
clauses carrying full provenance so a proof can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .terms import (
    App,
    Clause,
    Literal,
    Provenance,
    Term,
    Var,
    apply,
    is_tautology,
    max_var,
    normalize_literals,
    rename_apart,
    subsumes,
    unify_args,
)

RESOLUTION = "resolution"
FACTORING = "factoring"
EQUALITY_RESOLUTION = "equality_resolution"
PARAMODULATION = "paramodulation"

#: Orientation tags for paramodulation: rewrite lhs->rhs or rhs->lhs.
LR = "lr"
RL = "rl"


@dataclass(frozen=True, slots=True)
class InferenceOutcome:
    """A rule application: conclusion plus the data needed to replay it."""

    conclusion: Clause
    rule: str
    premises: tuple[int, ...]
    positions: tuple

    @staticmethod
    def build(literals, rule: str, premises: tuple[int, ...], positions: tuple) -> "InferenceOutcome":
        prov = Provenance(rule, premises, positions)
        clause = Clause(normalize_literals(tuple(literals)), provenance=prov)
        return InferenceOutcome(clause, rule, premises, positions)


def _without(literals: tuple[Literal, ...], index: int) -> tuple[Literal, ...]:
    return literals[:index] + literals[index + 1 :]


def resolve(c1: Clause, i: int, c2: Clause, j: int) -> Optional[InferenceOutcome]:
    """Binary resolution on predicate literals c1[i] and c2[j].

    The literals must have opposite polarity and the same predicate head;
    equations are left to paramodulation and equality resolution.  c2 is
    renamed apart internally, so recorded positions refer to the clauses as
    given.
    """
    l1 = c1.literals[i]
    l2 = c2.literals[j]
    if l1.positive == l2.positive or l1.is_equation or l1.head != l2.head:
        return None
    r2 = rename_apart(c1, c2)
    sigma = unify_args(l1.args, r2.literals[j].args)
    if sigma is None:
        return None
    rest = _without(c1.literals, i) + _without(r2.literals, j)
    literals = tuple(apply(sigma, lit) for lit in rest)
    return InferenceOutcome.build(literals, RESOLUTION, (c1.cid, c2.cid), (i, j))


def factor(c: Clause, i: int, j: int) -> Optional[InferenceOutcome]:
    """Factoring: unify same-polarity literals i and j, drop literal j.

    For equations the direct orientation is tried first, then the flipped
    one; the first unifier wins.
    """
    if i == j:
        return None
    l1 = c.literals[i]
    l2 = c.literals[j]
    if l1.positive != l2.positive or l1.head != l2.head:
        return None
    sigma = unify_args(l1.args, l2.args)
    if sigma is None and l1.is_equation:
        sigma = unify_args(l1.args, (l2.args[1], l2.args[0]))
    if sigma is None:
        return None
    literals = tuple(apply(sigma, lit) for lit in _without(c.literals, j))
    return InferenceOutcome.build(literals, FACTORING, (c.cid,), (i, j))


def equality_resolution(c: Clause, i: int) -> Optional[InferenceOutcome]:
    """Resolve a negative equation s != t against reflexivity by unifying
    its two sides."""
    lit = c.literals[i]
    if lit.positive or not lit.is_equation:
        return None
    sigma = unify_args((lit.args[0],), (lit.args[1],))
    if sigma is None:
        return None
    literals = tuple(apply(sigma, l) for l in _without(c.literals, i))
    return InferenceOutcome.build(literals, EQUALITY_RESOLUTION, (c.cid,), (i,))


def subterm_positions(lit: Literal) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Non-variable subterm positions of a literal in left-to-right preorder.

    A path is a tuple of argument indices from the atom; for equations path
    (0, ...) descends the left side and (1, ...) the right.
    """

    def walk(t: Term, path: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], Term]]:
        if isinstance(t, Var):
            return
        yield path, t
        for k, a in enumerate(t.args):
            yield from walk(a, path + (k,))

    for k, a in enumerate(lit.args):
        yield from walk(a, (k,))


def _term_at(lit: Literal, path: tuple[int, ...]) -> Term:
    t: Term = lit.args[path[0]]
    for k in path[1:]:
        if isinstance(t, Var):
            raise ValueError(f"path {path} descends through a variable")
        t = t.args[k]
    return t


def _replace_in_term(t: Term, path: tuple[int, ...], depth: int, new: Term) -> Term:
    if depth == len(path):
        return new
    if isinstance(t, Var):
        raise ValueError(f"path {path} descends through a variable")
    k = path[depth]
    args = tuple(
        _replace_in_term(a, path, depth + 1, new) if idx == k else a
        for idx, a in enumerate(t.args)
    )
    return App(t.head, args)


def _replace_in_literal(lit: Literal, path: tuple[int, ...], new: Term) -> Literal:
    k = path[0]
    args = tuple(
        _replace_in_term(a, path, 1, new) if idx == k else a
        for idx, a in enumerate(lit.args)
    )
    return Literal(lit.positive, lit.head, args)


def paramodulate(
    from_clause: Clause,
    eq_index: int,
    orientation: str,
    into_clause: Clause,
    lit_index: int,
    path: tuple[int, ...],
) -> Optional[InferenceOutcome]:
    """Paramodulation: rewrite with a positive equation of ``from_clause``.

    ``orientation`` picks which side of the equation replaces the subterm of
    ``into_clause`` at (lit_index, path).  The target position must exist and
    not be a variable; violating that raises ValueError rather than
    returning None, since it is a caller error, not a failed unification.
    """
    if orientation not in (LR, RL):
        raise ValueError(f"unknown orientation {orientation!r}")
    eq = from_clause.literals[eq_index]
    if not eq.positive or not eq.is_equation:
        return None
    into = rename_apart(from_clause, into_clause)
    target_lit = into.literals[lit_index]
    sub = _term_at(target_lit, path)
    if isinstance(sub, Var):
        raise ValueError("paramodulation into a variable position")
    lhs, rhs = eq.args
    if orientation == RL:
        lhs, rhs = rhs, lhs
    sigma = unify_args((lhs,), (sub,))
    if sigma is None:
        return None
    rewritten = _replace_in_literal(target_lit, path, rhs)
    literals = _without(from_clause.literals, eq_index) + tuple(
        rewritten if k == lit_index else lit for k, lit in enumerate(into.literals)
    )
    literals = tuple(apply(sigma, lit) for lit in literals)
    return InferenceOutcome.build(
        literals,
        PARAMODULATION,
        (from_clause.cid, into_clause.cid),
        (eq_index, orientation, lit_index, path),
    )


def _positive_equation_indices(c: Clause) -> tuple[int, ...]:
    return tuple(i for i, lit in enumerate(c.literals) if lit.positive and lit.is_equation)


def _paramod_pair(from_clause: Clause, into_clause: Clause, out: list[InferenceOutcome]) -> None:
    eqs = _positive_equation_indices(from_clause)
    if not eqs:
        return
    targets = [
        (lit_index, path)
        for lit_index, lit in enumerate(into_clause.literals)
        for path, _ in subterm_positions(lit)
    ]
    if not targets:
        return
    for eq_index in eqs:
        for orientation in (LR, RL):
            for lit_index, path in targets:
                outcome = paramodulate(
                    from_clause, eq_index, orientation, into_clause, lit_index, path
                )
                if outcome is not None:
                    out.append(outcome)


def generate(given: Clause, processed: Sequence[Clause]) -> list[InferenceOutcome]:
    """All conclusions drawn from ``given`` against ``processed`` plus itself.

    Order is deterministic: first the unary rules on the given clause
    (equality resolution, then factoring), then for each partner in
    ascending clause id order all resolution pairs, paramodulations from the
    given clause into the partner, and paramodulations from the partner into
    the given clause.
    """
    out: list[InferenceOutcome] = []
    for i in range(len(given.literals)):
        outcome = equality_resolution(given, i)
        if outcome is not None:
            out.append(outcome)
    for i in range(len(given.literals)):
        for j in range(i + 1, len(given.literals)):
            outcome = factor(given, i, j)
            if outcome is not None:
                out.append(outcome)

    partners = sorted(list(processed) + [given], key=lambda c: c.cid)
    for partner in partners:
        for i in range(len(given.literals)):
            for j in range(len(partner.literals)):
                outcome = resolve(given, i, partner, j)
                if outcome is not None:
                    out.append(outcome)
        _paramod_pair(given, partner, out)
        if partner.cid != given.cid:
            _paramod_pair(partner, given, out)
    return out


__all__ = [
    "RESOLUTION",
    "FACTORING",
    "EQUALITY_RESOLUTION",
    "PARAMODULATION",
    "LR",
    "RL",
    "InferenceOutcome",
    "resolve",
    "factor",
    "equality_resolution",
    "paramodulate",
    "subterm_positions",
    "generate",
    "is_tautology",
    "subsumes",
]
