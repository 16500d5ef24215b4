"""First-order terms, literals, clauses and substitutions.

The language is untyped CNF with built-in equality.  Variables are plain
integer indices; clauses keep their literals as a tuple but every operation
treats that tuple as a multiset.  Substitutions are dicts from variable index
to term and are kept idempotent by construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union


class SymbolKind(enum.Enum):
    FUNCTION = "function"
    PREDICATE = "predicate"
    EQUALITY = "equality"


class Symbol:
    """A function/predicate symbol with a fixed arity."""

    __slots__ = ("name", "arity", "kind", "_hash")

    def __init__(self, name: str, arity: int, kind: SymbolKind) -> None:
        self.name = name
        self.arity = arity
        self.kind = kind
        self._hash = hash((name, arity, kind))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Symbol):
            return NotImplemented
        return (
            self.name == other.name
            and self.arity == other.arity
            and self.kind == other.kind
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Symbol({self.name!r}, {self.arity}, {self.kind.value})"


#: The one built-in equality symbol; equations are literals with this head.
EQ = Symbol("=", 2, SymbolKind.EQUALITY)


class Var:
    """A variable, identified by a non-negative index."""

    __slots__ = ("index", "_hash")

    def __init__(self, index: int) -> None:
        self.index = index
        self._hash = hash(("var", index))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Var) and other.index == self.index

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"X{self.index}"


class App:
    """A function symbol applied to argument terms; constants have no args."""

    __slots__ = ("head", "args", "_hash")

    def __init__(self, head: Symbol, args: tuple["Term", ...] = ()) -> None:
        if head.arity != len(args):
            raise ValueError(f"symbol {head.name}/{head.arity} applied to {len(args)} arguments")
        self.head = head
        self.args = args
        self._hash = hash((head, args))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.head == other.head
            and self.args == other.args
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.args:
            return self.head.name
        return f"{self.head.name}({', '.join(map(repr, self.args))})"


Term = Union[Var, App]
Substitution = Mapping[int, Term]


class Literal:
    """A possibly negated atom.

    Predicate atoms are ``head(args)``; equations use the shared EQ head with
    args ``(lhs, rhs)``.  All multiset-level operations treat an equation and
    its flipped twin as the same atom.
    """

    __slots__ = ("positive", "head", "args", "_hash")

    def __init__(self, positive: bool, head: Symbol, args: tuple[Term, ...] = ()) -> None:
        if head.kind is SymbolKind.FUNCTION:
            raise ValueError(f"literal head {head.name} is a function symbol")
        if head.arity != len(args):
            raise ValueError(f"head {head.name}/{head.arity} applied to {len(args)} arguments")
        self.positive = positive
        self.head = head
        self.args = args
        self._hash = hash((positive, head, args))

    @property
    def is_equation(self) -> bool:
        return self.head.kind is SymbolKind.EQUALITY

    @property
    def lhs(self) -> Term:
        return self.args[0]

    @property
    def rhs(self) -> Term:
        return self.args[1]

    def negated(self) -> "Literal":
        return Literal(not self.positive, self.head, self.args)

    def flipped(self) -> "Literal":
        """The same equation written right-to-left; identity for predicates."""
        if not self.is_equation:
            return self
        return Literal(self.positive, self.head, (self.args[1], self.args[0]))

    def same_atom(self, other: "Literal") -> bool:
        """Atom equality, equations compared in either orientation."""
        if self.head != other.head:
            return False
        if self.args == other.args:
            return True
        return self.is_equation and self.args == (other.args[1], other.args[0])

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Literal)
            and self._hash == other._hash
            and self.positive == other.positive
            and self.head == other.head
            and self.args == other.args
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.is_equation:
            op = "=" if self.positive else "!="
            return f"{self.args[0]!r} {op} {self.args[1]!r}"
        sign = "" if self.positive else "~"
        if not self.args:
            return f"{sign}{self.head.name}"
        return f"{sign}{self.head.name}({', '.join(map(repr, self.args))})"


class Role(enum.Enum):
    AXIOM = "axiom"
    NEGATED_CONJECTURE = "negated_conjecture"
    DERIVED = "derived"


@dataclass(frozen=True, slots=True)
class Provenance:
    """How a clause came to be: rule name, parent clause ids, rule positions.

    ``positions`` is rule specific:
      input                ()
      resolution           (i, j)          literal index in each premise
      factoring            (i, j)          kept literal, removed literal
      equality_resolution  (i,)
      paramodulation       (eq_index, orientation, lit_index, path)
    """

    rule: str
    parents: tuple[int, ...] = ()
    positions: tuple = ()


INPUT_RULE = "input"


@dataclass(frozen=True, slots=True)
class Clause:
    """A disjunction of literals plus bookkeeping for saturation.

    ``cid`` and ``age`` are -1 until a proof state registers the clause.
    Variables of a normalized clause are numbered contiguously from 0 in
    order of first occurrence.
    """

    literals: tuple[Literal, ...]
    cid: int = -1
    role: Role = Role.DERIVED
    age: int = -1
    provenance: Optional[Provenance] = None

    @property
    def is_empty(self) -> bool:
        return not self.literals

    @property
    def is_initial(self) -> bool:
        return self.role is not Role.DERIVED

    def __len__(self) -> int:
        return len(self.literals)

    def __repr__(self) -> str:
        if not self.literals:
            return "<empty clause>"
        return " | ".join(map(repr, self.literals))


@dataclass(frozen=True, slots=True)
class Problem:
    """A parsed CNF problem: clause list plus the signature seen while parsing."""

    clauses: tuple[Clause, ...]
    signature: Mapping[str, Symbol]

    @property
    def conjecture_clauses(self) -> tuple[Clause, ...]:
        return tuple(c for c in self.clauses if c.role is Role.NEGATED_CONJECTURE)


# ---------------------------------------------------------------------------
# traversal helpers


def term_vars(t: Term) -> Iterator[int]:
    """Yield variable indices in left-to-right order, with repeats."""
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            yield x.index
        else:
            stack.extend(reversed(x.args))


def clause_vars(c: Clause) -> Iterator[int]:
    for lit in c.literals:
        for a in lit.args:
            yield from term_vars(a)


def max_var(c: Clause) -> int:
    """Largest variable index in the clause, -1 if ground."""
    best = -1
    for v in clause_vars(c):
        if v > best:
            best = v
    return best


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def clause_depth(c: Clause) -> int:
    """Maximum term depth over all argument terms; 0 for propositional/empty."""
    best = 0
    for lit in c.literals:
        for a in lit.args:
            d = term_depth(a)
            if d > best:
                best = d
    return best


def term_symbol_count(t: Term) -> tuple[int, int]:
    """(function symbol occurrences, variable occurrences) in the term."""
    syms = 0
    vs = 0
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            vs += 1
        else:
            syms += 1
            stack.extend(x.args)
    return syms, vs


def clause_weight(
    c: Clause,
    fweight: int = 1,
    vweight: int = 1,
    pos_mult: Union[int, Fraction] = 1,
) -> Union[int, Fraction]:
    """Symbol-counting clause weight.

    Every function, predicate and equality symbol occurrence costs
    ``fweight``, every variable occurrence ``vweight``; a positive literal's
    total is additionally multiplied by ``pos_mult``.
    """
    total: Union[int, Fraction] = 0
    for lit in c.literals:
        syms = 1  # the literal's own head (predicate or equality)
        vs = 0
        for a in lit.args:
            s, v = term_symbol_count(a)
            syms += s
            vs += v
        w = fweight * syms + vweight * vs
        if lit.positive:
            w = w * pos_mult
        total = total + w
    return total


# ---------------------------------------------------------------------------
# substitution application


def _apply_term(subst: Substitution, t: Term) -> Term:
    if isinstance(t, Var):
        bound = subst.get(t.index)
        return t if bound is None else bound
    if not t.args:
        return t
    new_args = tuple(_apply_term(subst, a) for a in t.args)
    if new_args == t.args:
        return t
    return App(t.head, new_args)


def _apply_literal(subst: Substitution, lit: Literal) -> Literal:
    if not lit.args:
        return lit
    new_args = tuple(_apply_term(subst, a) for a in lit.args)
    if new_args == lit.args:
        return lit
    return Literal(lit.positive, lit.head, new_args)


def normalize_literals(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Renumber variables contiguously from 0 by first occurrence."""
    mapping: dict[int, Term] = {}
    for lit in literals:
        for a in lit.args:
            for v in term_vars(a):
                if v not in mapping:
                    mapping[v] = Var(len(mapping))
    if all(isinstance(t, Var) and t.index == v for v, t in mapping.items()):
        return literals
    return tuple(_apply_literal(mapping, lit) for lit in literals)


def apply(subst: Substitution, target: Union[Term, Literal, Clause]):
    """Apply a substitution; Clause results get their variables renumbered."""
    if isinstance(target, (Var, App)):
        return _apply_term(subst, target)
    if isinstance(target, Literal):
        return _apply_literal(subst, target)
    lits = tuple(_apply_literal(subst, lit) for lit in target.literals)
    return Clause(normalize_literals(lits))


def make_clause(literals, role: Role = Role.DERIVED, provenance: Optional[Provenance] = None) -> Clause:
    """Build a normalized clause from an iterable of literals."""
    return Clause(normalize_literals(tuple(literals)), role=role, provenance=provenance)


def rename_apart(c1: Clause, c2: Clause) -> Clause:
    """Shift c2's variables above c1's so the two clauses share none."""
    offset = max_var(c1) + 1
    if offset == 0 or max_var(c2) < 0:
        return c2
    shift = {v: Var(v + offset) for v in set(clause_vars(c2))}
    lits = tuple(_apply_literal(shift, lit) for lit in c2.literals)
    return Clause(lits, c2.cid, c2.role, c2.age, c2.provenance)


# ---------------------------------------------------------------------------
# unification and matching


def _walk(t: Term, bind: dict[int, Term]) -> Term:
    while isinstance(t, Var):
        nxt = bind.get(t.index)
        if nxt is None:
            return t
        t = nxt
    return t


def _occurs(v: int, t: Term, bind: dict[int, Term]) -> bool:
    stack = [t]
    while stack:
        x = _walk(stack.pop(), bind)
        if isinstance(x, Var):
            if x.index == v:
                return True
        else:
            stack.extend(x.args)
    return False


def _unify_into(pairs: list[tuple[Term, Term]], bind: dict[int, Term]) -> bool:
    """Extend ``bind`` to unify all pairs; False leaves bind unusable."""
    stack = pairs
    while stack:
        s, t = stack.pop()
        s = _walk(s, bind)
        t = _walk(t, bind)
        if s is t:
            continue
        if isinstance(s, Var):
            if isinstance(t, Var) and t.index == s.index:
                continue
            if _occurs(s.index, t, bind):
                return False
            bind[s.index] = t
        elif isinstance(t, Var):
            if _occurs(t.index, s, bind):
                return False
            bind[t.index] = s
        else:
            if s.head != t.head:
                return False
            stack.extend(zip(s.args, t.args))
    return True


def _resolve_bindings(bind: dict[int, Term]) -> dict[int, Term]:
    """Flatten a triangular binding set into an idempotent substitution."""

    def deep(t: Term) -> Term:
        t = _walk(t, bind)
        if isinstance(t, Var):
            return t
        if not t.args:
            return t
        return App(t.head, tuple(deep(a) for a in t.args))

    out: dict[int, Term] = {}
    for v in bind:
        val = deep(Var(v))
        if not (isinstance(val, Var) and val.index == v):
            out[v] = val
    return out


def unify(a: Term, b: Term) -> Optional[dict[int, Term]]:
    """Most general unifier of two terms, or None.  Runs the occurs check."""
    bind: dict[int, Term] = {}
    if not _unify_into([(a, b)], bind):
        return None
    return _resolve_bindings(bind)


def unify_args(args1: tuple[Term, ...], args2: tuple[Term, ...]) -> Optional[dict[int, Term]]:
    """Simultaneously unify two equal-length argument tuples."""
    if len(args1) != len(args2):
        return None
    bind: dict[int, Term] = {}
    if not _unify_into(list(zip(args1, args2)), bind):
        return None
    return _resolve_bindings(bind)


def _match_into(pat: Term, tgt: Term, bind: dict[int, Term]) -> bool:
    stack = [(pat, tgt)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            seen = bind.get(p.index)
            if seen is None:
                bind[p.index] = t
            elif seen != t:
                return False
        elif isinstance(t, Var):
            return False
        else:
            if p.head != t.head:
                return False
            stack.extend(zip(p.args, t.args))
    return True


def match_args(
    pat_args: tuple[Term, ...],
    tgt_args: tuple[Term, ...],
    bind: dict[int, Term],
) -> Optional[dict[int, Term]]:
    """Extend ``bind`` so that the patterns map exactly onto the targets.

    One sided: only pattern variables are bound, target variables act as
    constants.  Returns the extended dict (a copy) or None.
    """
    if len(pat_args) != len(tgt_args):
        return None
    trial = dict(bind)
    for p, t in zip(pat_args, tgt_args):
        if not _match_into(p, t, trial):
            return None
    return trial


def match_onto(pattern: Term, target: Term) -> Optional[dict[int, Term]]:
    """One-sided match of a single term; pattern and target should not share
    variables unless the caller means them as the same names on both sides."""
    return match_args((pattern,), (target,), {})


# ---------------------------------------------------------------------------
# subsumption and variants


def _literal_match_candidates(lit: Literal, other: Literal):
    """Argument tuples of ``other`` that ``lit`` may map onto (orientation)."""
    if lit.positive != other.positive or lit.head != other.head:
        return
    yield other.args
    if lit.is_equation and other.args[0] != other.args[1]:
        yield (other.args[1], other.args[0])


def _clause_symbols(c: Clause) -> frozenset[str]:
    names = set()
    for lit in c.literals:
        names.add(lit.head.name)
        for a in lit.args:
            stack = [a]
            while stack:
                x = stack.pop()
                if isinstance(x, App):
                    names.add(x.head.name)
                    stack.extend(x.args)
    return frozenset(names)


def subsumes(general: Clause, specific: Clause) -> bool:
    """Multiset subsumption: one substitution maps every literal of
    ``general`` onto a distinct literal of ``specific``."""
    n = len(general.literals)
    if n > len(specific.literals):
        return False
    if n == 0:
        return True

    spec = specific.literals

    def extend(i: int, used: int, bind: dict[int, Term]) -> bool:
        if i == n:
            return True
        lit = general.literals[i]
        for j, slit in enumerate(spec):
            if used & (1 << j):
                continue
            for tgt_args in _literal_match_candidates(lit, slit):
                nb = match_args(lit.args, tgt_args, bind)
                if nb is not None and extend(i + 1, used | (1 << j), nb):
                    return True
        return False

    return extend(0, 0, {})


def is_variant(c1: Clause, c2: Clause) -> bool:
    """True when some variable renaming makes the literal multisets equal."""
    if len(c1.literals) != len(c2.literals):
        return False
    return subsumes(c1, c2) and subsumes(c2, c1)


def is_tautology(c: Clause) -> bool:
    """A clause with a trivially true literal set.

    Either some positive equation t = t, or a complementary literal pair over
    the same atom (equations compared in both orientations).
    """
    lits = c.literals
    for i, lit in enumerate(lits):
        if lit.positive and lit.is_equation and lit.args[0] == lit.args[1]:
            return True
        for j in range(i + 1, len(lits)):
            other = lits[j]
            if lit.positive != other.positive and lit.same_atom(other):
                return True
    return False
