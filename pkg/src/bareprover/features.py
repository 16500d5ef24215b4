"""Hashed clause features for learned clause selection.

A clause turns into a sparse count vector: every root-to-descendant symbol
walk of length one to three in each literal's term tree is serialized and
FNV-1a-hashed into 2**bits buckets.  A second block of the same size holds
the walk features of the problem's negated conjecture, and three trailing
slots carry literal count, symbol-count weight and maximum term depth.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, TextIO

from .terms import Clause, Literal, Problem, Term, Var, clause_depth, clause_weight

WALK_SEPARATOR = "▷"  # ▷
VAR_TOKEN = "*VAR"
SKOLEM_TOKEN = "*SKO"
_SKOLEM_PREFIXES = ("esk", "sk")

MIN_BITS = 5
MAX_BITS = 16


class ConfigMismatchError(ValueError):
    """Feature data and model/config disagree about vector dimensions."""


@dataclass(frozen=True)
class FeatureConfig:
    """Bucket-count configuration; total vector dimension is derived."""

    bits: int = 15

    def __post_init__(self) -> None:
        if not MIN_BITS <= self.bits <= MAX_BITS:
            raise ValueError(f"bits must be in [{MIN_BITS}, {MAX_BITS}], got {self.bits}")

    @property
    def buckets(self) -> int:
        return 1 << self.bits

    @property
    def conjecture_offset(self) -> int:
        return 1 << self.bits

    @property
    def stats_offset(self) -> int:
        return 1 << (self.bits + 1)

    @property
    def dim(self) -> int:
        return self.stats_offset + 3


class FeatureVector:
    """Immutable sparse count vector with a fixed dimensionality."""

    __slots__ = ("dim", "slots", "counts", "_hash")

    def __init__(self, dim: int, slots: tuple[int, ...], counts: tuple[int, ...]) -> None:
        if len(slots) != len(counts):
            raise ValueError("slots and counts differ in length")
        prev = -1
        for s in slots:
            if s <= prev:
                raise ValueError("slots must be strictly ascending")
            prev = s
        if slots and slots[-1] >= dim:
            raise ValueError(f"slot {slots[-1]} out of range for dimension {dim}")
        if any(c < 1 for c in counts):
            raise ValueError("counts must be positive; omit empty slots")
        self.dim = dim
        self.slots = slots
        self.counts = counts
        self._hash = hash((dim, slots, counts))

    @classmethod
    def from_counts(cls, dim: int, mapping: dict[int, int]) -> "FeatureVector":
        items = sorted((s, c) for s, c in mapping.items() if c)
        slots = tuple(s for s, _ in items)
        counts = tuple(c for _, c in items)
        return cls(dim, slots, counts)

    def get(self, slot: int) -> int:
        i = bisect_left(self.slots, slot)
        if i < len(self.slots) and self.slots[i] == slot:
            return self.counts[i]
        return 0

    def items(self) -> Iterator[tuple[int, int]]:
        return zip(self.slots, self.counts)

    def __len__(self) -> int:
        return len(self.slots)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FeatureVector)
            and self.dim == other.dim
            and self.slots == other.slots
            and self.counts == other.counts
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = " ".join(f"{s}:{c}" for s, c in self.items())
        return f"<FeatureVector dim={self.dim} {body}>"


# ---------------------------------------------------------------------------
# symbol abstraction and walks

TokenTree = tuple[str, tuple]


def _term_tree(t: Term) -> TokenTree:
    if isinstance(t, Var):
        return (VAR_TOKEN, ())
    name = t.head.name
    if name.startswith(_SKOLEM_PREFIXES):
        name = SKOLEM_TOKEN
    return (name, tuple(_term_tree(a) for a in t.args))


def _literal_tree(lit: Literal) -> TokenTree:
    sign = "+" if lit.positive else "-"
    if lit.is_equation:
        head = f"{sign}eq"
    else:
        name = lit.head.name
        if name.startswith(_SKOLEM_PREFIXES):
            name = SKOLEM_TOKEN
        head = f"{sign}{name}"
    return (head, tuple(_term_tree(a) for a in lit.args))


def normalize_symbols(c: Clause) -> tuple[TokenTree, ...]:
    """Token trees per literal: variables collapse to *VAR, Skolem-style
    names (prefix esk/sk) to *SKO, the polarity rides on the head token and
    equations get the reserved head ``eq``."""
    return tuple(_literal_tree(lit) for lit in c.literals)


def vertical_walks(c: Clause) -> Counter:
    """Multiset of root-anchored symbol walks of length 1..3 per literal.

    The literal head is the depth-1 node; each walk is the token path joined
    by the separator character.
    """
    walks: Counter = Counter()
    for head, children in normalize_symbols(c):
        walks[head] += 1
        for tok2, grandchildren in children:
            walks[f"{head}{WALK_SEPARATOR}{tok2}"] += 1
            for tok3, _ in grandchildren:
                walks[f"{head}{WALK_SEPARATOR}{tok2}{WALK_SEPARATOR}{tok3}"] += 1
    return walks


# ---------------------------------------------------------------------------
# hashing

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


@lru_cache(maxsize=1 << 18)
def _fnv1a64(s: str) -> int:
    h = _FNV_OFFSET
    for b in s.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & _U64
    return h


def hash_bucket(walk: str, bits: int) -> int:
    """FNV-1a-64 of the walk string, masked to the low ``bits`` bits."""
    return _fnv1a64(walk) & ((1 << bits) - 1)


# ---------------------------------------------------------------------------
# featurization


def featurize_conjecture(problem: Problem, cfg: FeatureConfig) -> FeatureVector:
    """Combined walk features of every negated-conjecture clause, in the
    first block.  Empty when the problem has no conjecture clauses."""
    combined: Counter = Counter()
    for c in problem.conjecture_clauses:
        for walk, n in vertical_walks(c).items():
            combined[hash_bucket(walk, cfg.bits)] += n
    return FeatureVector.from_counts(cfg.buckets, dict(combined))


def featurize(c: Clause, conjecture: FeatureVector, cfg: FeatureConfig) -> FeatureVector:
    """Full clause vector: clause walk block, shifted conjecture block, then
    literal count, symbol-count weight and maximum term depth."""
    if conjecture.dim != cfg.buckets:
        raise ConfigMismatchError(
            f"conjecture block has dimension {conjecture.dim}, expected {cfg.buckets}"
        )
    counts: dict[int, int] = {}
    for walk, n in vertical_walks(c).items():
        slot = hash_bucket(walk, cfg.bits)
        counts[slot] = counts.get(slot, 0) + n
    offset = cfg.conjecture_offset
    for slot, n in conjecture.items():
        counts[offset + slot] = n
    stats = (len(c.literals), clause_weight(c, 1, 1, 1), clause_depth(c))
    for k, value in enumerate(stats):
        if value:
            counts[cfg.stats_offset + k] = int(value)
    return FeatureVector.from_counts(cfg.dim, counts)


def dim_for_bits(bits: int) -> int:
    return FeatureConfig(bits).dim


# ---------------------------------------------------------------------------
# training-example text format


@dataclass(frozen=True)
class ExampleRow:
    vector: FeatureVector
    label: int
    problem: str = ""
    loop: Optional[int] = None
    source: str = ""


_PROVENANCE_RE = re.compile(r"(\w+)=(\S+)")


def _format_provenance(row: ExampleRow) -> str:
    parts = []
    if row.problem:
        parts.append(f"problem={row.problem}")
    if row.loop is not None:
        parts.append(f"loop={row.loop}")
    if row.source:
        parts.append(f"source={row.source}")
    return " ".join(parts)


def write_examples(out: TextIO, bits: int, rows: Iterable[ExampleRow]) -> None:
    """Write rows as ``<label> <slot>:<count> ...`` lines under a bits header;
    provenance rides in ``#`` comment lines ahead of each group."""
    out.write(f"# bits {bits}\n")
    last_prov = None
    for row in rows:
        prov = _format_provenance(row)
        if prov and prov != last_prov:
            out.write(f"# {prov}\n")
            last_prov = prov
        body = " ".join(f"{s}:{c}" for s, c in row.vector.items())
        out.write(f"{row.label} {body}".rstrip() + "\n")


class ExampleFormatError(ValueError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


def read_examples(inp: TextIO) -> tuple[int, list[ExampleRow]]:
    """Parse a training-example file; returns (bits, rows)."""
    bits: Optional[int] = None
    rows: list[ExampleRow] = []
    problem = ""
    loop: Optional[int] = None
    source = ""
    for lineno, raw in enumerate(inp, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("bits "):
                try:
                    bits = int(body.split()[1])
                except (IndexError, ValueError):
                    raise ExampleFormatError("malformed bits header", lineno) from None
                continue
            fields = dict(_PROVENANCE_RE.findall(body))
            problem = fields.get("problem", problem)
            source = fields.get("source", source)
            if "loop" in fields:
                try:
                    loop = int(fields["loop"])
                except ValueError:
                    raise ExampleFormatError("malformed loop tag", lineno) from None
            continue
        if bits is None:
            raise ExampleFormatError("data before '# bits' header", lineno)
        parts = line.split()
        if parts[0] not in ("0", "1"):
            raise ExampleFormatError(f"label must be 0 or 1, got {parts[0]!r}", lineno)
        label = int(parts[0])
        slots: list[int] = []
        counts: list[int] = []
        for chunk in parts[1:]:
            try:
                slot_text, count_text = chunk.split(":", 1)
                slot = int(slot_text)
                count = int(count_text)
            except ValueError:
                raise ExampleFormatError(f"malformed entry {chunk!r}", lineno) from None
            if slots and slot <= slots[-1]:
                raise ExampleFormatError("slots must be strictly ascending", lineno)
            slots.append(slot)
            counts.append(count)
        try:
            vec = FeatureVector(dim_for_bits(bits), tuple(slots), tuple(counts))
        except ValueError as exc:
            raise ExampleFormatError(str(exc), lineno) from None
        rows.append(ExampleRow(vec, label, problem=problem, loop=loop, source=source))
    if bits is None:
        raise ExampleFormatError("missing '# bits' header", 1)
    return bits, rows
