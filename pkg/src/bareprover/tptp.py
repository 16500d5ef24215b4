"""Reader and writer for a small TPTP CNF subset.

Supported statements::

    cnf(name, role, formula).
    include('relative/path').

Formulas are disjunctions of literals joined by ``|``; atoms are predicate
applications or infix (in)equations ``s = t`` / ``s != t``; ``~`` negates;
``$false`` stands for the empty clause.  ``%`` starts a line comment.
Identifiers starting with an uppercase letter are variables.  Roles are
``axiom``, ``hypothesis`` (kept as axiom) and ``negated_conjecture``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from .terms import (
    EQ,
    App,
    Clause,
    Literal,
    Problem,
    Role,
    Symbol,
    SymbolKind,
    Term,
    Var,
)


class ParseError(ValueError):
    """Syntax or signature error, with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_PUNCT = {"(", ")", ",", ".", "|", "~", "=", "!="}


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind: str, text: str, line: int, column: int) -> None:
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    col = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch == "!":
            if i + 1 < n and text[i + 1] == "=":
                tokens.append(_Token("punct", "!=", line, start_col))
                i += 2
                col += 2
                continue
            raise ParseError("stray '!'", line, start_col)
        if ch in "(),.|~=":
            tokens.append(_Token("punct", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch == "'":
            j = i + 1
            while j < n and text[j] != "'":
                if text[j] == "\n":
                    raise ParseError("unterminated quoted name", line, start_col)
                j += 1
            if j >= n:
                raise ParseError("unterminated quoted name", line, start_col)
            tokens.append(_Token("quoted", text[i + 1 : j], line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        if ch == "$":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("defined", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "upper" if word[0].isupper() or word[0] == "_" else "word"
            tokens.append(_Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


_ROLES = {
    "axiom": Role.AXIOM,
    "hypothesis": Role.AXIOM,
    "negated_conjecture": Role.NEGATED_CONJECTURE,
}


class _Parser:
    def __init__(self, text: str, include_dir: Optional[Path], signature: dict[str, Symbol]) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.include_dir = include_dir
        self.signature = signature

    # --- token plumbing ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return tok

    # --- signature ---------------------------------------------------------

    def _symbol(self, name: str, arity: int, kind: SymbolKind, tok: _Token) -> Symbol:
        seen = self.signature.get(name)
        if seen is None:
            sym = Symbol(name, arity, kind)
            self.signature[name] = sym
            return sym
        if seen.arity != arity or seen.kind != kind:
            raise ParseError(
                f"symbol {name!r} used as {kind.value}/{arity} but "
                f"declared as {seen.kind.value}/{seen.arity}",
                tok.line,
                tok.column,
            )
        return seen

    # --- grammar -----------------------------------------------------------

    def parse_file(self, clauses: list[Clause], seen_files: frozenset[Path]) -> None:
        while self.peek().kind != "eof":
            tok = self.next()
            if tok.text == "cnf":
                clauses.append(self._cnf_statement())
            elif tok.text == "include":
                self._include(clauses, seen_files)
            else:
                raise ParseError(f"expected 'cnf' or 'include', found {tok.text!r}", tok.line, tok.column)

    def _include(self, clauses: list[Clause], seen_files: frozenset[Path]) -> None:
        self.expect("(")
        tok = self.next()
        if tok.kind not in ("quoted", "word"):
            raise ParseError("expected a file name", tok.line, tok.column)
        self.expect(")")
        self.expect(".")
        if self.include_dir is None:
            raise ParseError("include directive without a base directory", tok.line, tok.column)
        path = (self.include_dir / tok.text).resolve()
        if path in seen_files:
            raise ParseError(f"circular include of {tok.text!r}", tok.line, tok.column)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read include {tok.text!r}: {exc}", tok.line, tok.column) from None
        sub = _Parser(text, path.parent, self.signature)
        sub.parse_file(clauses, seen_files | {path})

    def _cnf_statement(self) -> Clause:
        self.expect("(")
        name_tok = self.next()
        if name_tok.kind not in ("word", "upper", "quoted"):
            raise ParseError("expected a clause name", name_tok.line, name_tok.column)
        self.expect(",")
        role_tok = self.next()
        role = _ROLES.get(role_tok.text)
        if role is None:
            raise ParseError(f"unsupported role {role_tok.text!r}", role_tok.line, role_tok.column)
        self.expect(",")
        self.var_names: dict[str, Var] = {}
        literals = self._formula()
        self.expect(")")
        self.expect(".")
        return Clause(tuple(literals), role=role)

    def _formula(self) -> list[Literal]:
        if self.peek().text == "$false":
            self.next()
            return []
        parenthesized = False
        if self.peek().text == "(":
            # allow one pair of parens around the whole disjunction
            self.next()
            parenthesized = True
        literals = [self._literal()]
        while self.peek().text == "|":
            self.next()
            literals.append(self._literal())
        if parenthesized:
            self.expect(")")
        return literals

    def _literal(self) -> Literal:
        positive = True
        while self.peek().text == "~":
            self.next()
            positive = not positive
        tok = self.peek()
        if tok.kind == "upper":
            # must be an equation: a bare variable is not an atom
            left = self._term()
            return self._equation_tail(left, positive, tok)
        if tok.kind != "word":
            raise ParseError(f"expected an atom, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        head_tok = self.next()
        args: tuple[Term, ...] = ()
        if self.peek().text == "(":
            self.next()
            arg_list = [self._term()]
            while self.peek().text == ",":
                self.next()
                arg_list.append(self._term())
            self.expect(")")
            args = tuple(arg_list)
        if self.peek().text in ("=", "!="):
            head = self._symbol(head_tok.text, len(args), SymbolKind.FUNCTION, head_tok)
            return self._equation_tail(App(head, args), positive, head_tok)
        head = self._symbol(head_tok.text, len(args), SymbolKind.PREDICATE, head_tok)
        return Literal(positive, head, args)

    def _equation_tail(self, left: Term, positive: bool, tok: _Token) -> Literal:
        op = self.next()
        if op.text == "=":
            pass
        elif op.text == "!=":
            positive = not positive
        else:
            raise ParseError(f"expected '=' or '!=', found {op.text!r}", op.line, op.column)
        right = self._term()
        return Literal(positive, EQ, (left, right))

    def _term(self) -> Term:
        tok = self.next()
        if tok.kind == "upper":
            var = self.var_names.get(tok.text)
            if var is None:
                var = Var(len(self.var_names))
                self.var_names[tok.text] = var
            return var
        if tok.kind != "word":
            raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        args: tuple[Term, ...] = ()
        if self.peek().text == "(":
            self.next()
            arg_list = [self._term()]
            while self.peek().text == ",":
                self.next()
                arg_list.append(self._term())
            self.expect(")")
            args = tuple(arg_list)
        head = self._symbol(tok.text, len(args), SymbolKind.FUNCTION, tok)
        return App(head, args)


def parse_problem(text: str, include_dir: Optional[Path] = None) -> Problem:
    """Parse CNF statements from a string into a Problem.

    Clauses get ids and ages in file order.  ``include_dir`` is the base for
    resolving include directives; without it includes are an error.
    """
    signature: dict[str, Symbol] = {}
    clauses: list[Clause] = []
    parser = _Parser(text, include_dir, signature)
    parser.parse_file(clauses, frozenset())
    numbered = tuple(
        Clause(c.literals, cid=i, role=c.role, age=i, provenance=None)
        for i, c in enumerate(clauses)
    )
    return Problem(numbered, signature)


def load_problem(path) -> Problem:
    path = Path(path)
    return parse_problem(path.read_text(), include_dir=path.parent)


# ---------------------------------------------------------------------------
# writing


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return f"X{t.index}"
    if not t.args:
        return t.head.name
    return f"{t.head.name}({','.join(format_term(a) for a in t.args)})"


def format_literal(lit: Literal) -> str:
    if lit.is_equation:
        op = "=" if lit.positive else "!="
        return f"{format_term(lit.args[0])} {op} {format_term(lit.args[1])}"
    sign = "" if lit.positive else "~"
    if not lit.args:
        return f"{sign}{lit.head.name}"
    return f"{sign}{lit.head.name}({','.join(format_term(a) for a in lit.args)})"


def format_clause(c: Clause) -> str:
    if c.is_empty:
        return "$false"
    return " | ".join(format_literal(lit) for lit in c.literals)


def format_problem(problem: Problem) -> str:
    lines = []
    for i, c in enumerate(problem.clauses):
        role = "negated_conjecture" if c.role is Role.NEGATED_CONJECTURE else "axiom"
        lines.append(f"cnf(c{i}, {role}, {format_clause(c)}).")
    return "\n".join(lines) + "\n"
