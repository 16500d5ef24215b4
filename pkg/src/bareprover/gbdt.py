"""Gradient-boosted decision trees on sparse count vectors.

Second-order boosting on logistic loss: per round, each example contributes
gradient ``p - y`` and hessian ``p (1 - p)``; trees grow by exact greedy
search over occupied slots (absent entries count as zero) and leaves take the
regularized Newton value ``-G / (H + lambda)``, stored pre-scaled by eta so a
model's margin is just base margin plus the sum of leaf values.

Ties in split gain break toward the lowest slot index, then the lowest
threshold, so training is deterministic for a fixed dataset, params and seed.
The seed only permutes the internal row order, which can flip float-level
summation ties; everything else is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .features import ConfigMismatchError, FeatureVector, dim_for_bits

MODEL_MAGIC = "gbdt"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainParams:
    """Boosting knobs: tree count, depth bound, shrinkage, L2 on leaves."""

    depth: int
    trees: int
    eta: float = 0.2
    lam: float = 1.0
    min_child_examples: int = 1

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.trees < 1:
            raise ValueError("trees must be at least 1")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0, 1]")
        if self.lam < 0.0:
            raise ValueError("lambda must be non-negative")
        if self.min_child_examples < 1:
            raise ValueError("min_child_examples must be at least 1")


@dataclass(frozen=True)
class DatasetRow:
    vector: FeatureVector
    label: int
    sources: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Dataset:
    """Training rows under one feature configuration."""

    bits: int
    rows: tuple[DatasetRow, ...]

    def __post_init__(self) -> None:
        dim = dim_for_bits(self.bits)
        for row in self.rows:
            if row.label not in (0, 1):
                raise ValueError(f"label must be 0 or 1, got {row.label!r}")
            if row.vector.dim != dim:
                raise ConfigMismatchError(
                    f"vector dimension {row.vector.dim} does not match bits={self.bits}"
                )


class Tree:
    """One regression tree as parallel preorder arrays.

    ``feature[i] == -1`` marks a leaf with payoff ``value[i]``; internal
    nodes send ``slot value <= threshold`` to ``left[i]``.
    """

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature, threshold, left, right, value) -> None:
        self.feature = tuple(feature)
        self.threshold = tuple(threshold)
        self.left = tuple(left)
        self.right = tuple(right)
        self.value = tuple(value)

    def predict(self, fv: FeatureVector) -> float:
        i = 0
        while self.feature[i] >= 0:
            if fv.get(self.feature[i]) <= self.threshold[i]:
                i = self.left[i]
            else:
                i = self.right[i]
        return self.value[i]

    def depth(self) -> int:
        best = 0
        stack = [(0, 0)]
        while stack:
            i, d = stack.pop()
            if self.feature[i] < 0:
                best = max(best, d)
            else:
                stack.append((self.left[i], d + 1))
                stack.append((self.right[i], d + 1))
        return best

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Tree)
            and self.feature == other.feature
            and self.threshold == other.threshold
            and self.left == other.left
            and self.right == other.right
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.feature, self.threshold, self.left, self.right, self.value))


@dataclass(frozen=True)
class GbdtModel:
    trees: tuple[Tree, ...]
    eta: float
    base_margin: float
    feature_bits: int

    @property
    def expected_dim(self) -> int:
        return dim_for_bits(self.feature_bits)

    def predict_margin(self, fv: FeatureVector) -> float:
        if fv.dim != self.expected_dim:
            raise ConfigMismatchError(
                f"vector dimension {fv.dim} does not match a model trained "
                f"with bits={self.feature_bits}"
            )
        margin = self.base_margin
        for tree in self.trees:
            margin += tree.predict(fv)
        return margin

    def predict_prob(self, fv: FeatureVector) -> float:
        return 1.0 / (1.0 + math.exp(-self.predict_margin(fv)))


def log_loss(labels: np.ndarray, margins: np.ndarray) -> float:
    probs = 1.0 / (1.0 + np.exp(-margins))
    eps = 1e-15
    probs = np.clip(probs, eps, 1.0 - eps)
    return float(-np.mean(labels * np.log(probs) + (1.0 - labels) * np.log(1.0 - probs)))


# ---------------------------------------------------------------------------
# training


class _Matrix:
    """Entry-level sparse layout: one (row, slot, value) triple per nonzero,
    sorted by slot.  Nodes carry index arrays into these."""

    def __init__(self, rows: Sequence[DatasetRow], order: np.ndarray) -> None:
        slot_list: list[int] = []
        row_list: list[int] = []
        val_list: list[int] = []
        for new_index, original in enumerate(order):
            for slot, count in rows[original].vector.items():
                row_list.append(new_index)
                slot_list.append(slot)
                val_list.append(count)
        slot_arr = np.asarray(slot_list, dtype=np.int64)
        pos = np.argsort(slot_arr, kind="stable")
        self.slot = slot_arr[pos]
        self.row = np.asarray(row_list, dtype=np.int64)[pos]
        self.val = np.asarray(val_list, dtype=np.int64)[pos]
        self.labels = np.asarray([rows[i].label for i in order], dtype=np.float64)
        self.n = len(rows)


def _find_split(
    entries: np.ndarray,
    node_rows: np.ndarray,
    mat: _Matrix,
    g: np.ndarray,
    h: np.ndarray,
    total_g: float,
    total_h: float,
    lam: float,
    mce: int,
) -> Optional[tuple[int, int, float]]:
    """Best (slot, threshold, gain) for a node, or None.

    ``entries`` must be sorted by slot.  Candidates are scanned in (slot,
    threshold) ascending order and a strictly greater gain is required to
    displace the current best, which realizes the documented tie-break.
    """
    if entries.size == 0:
        return None
    slots = mat.slot[entries]
    vals = mat.val[entries]
    rows = mat.row[entries]
    order = np.lexsort((vals, slots))
    slots = slots[order]
    vals = vals[order]
    ge = g[rows[order]]
    he = h[rows[order]]

    # group identical (slot, value) pairs
    change = np.empty(len(slots), dtype=bool)
    change[0] = True
    np.logical_or(slots[1:] != slots[:-1], vals[1:] != vals[:-1], out=change[1:])
    starts = np.flatnonzero(change)
    group_slot = slots[starts]
    group_val = vals[starts]
    group_g = np.add.reduceat(ge, starts)
    group_h = np.add.reduceat(he, starts)
    group_c = np.diff(np.append(starts, len(slots)))

    # segment = run of groups sharing a slot
    seg_change = np.empty(len(group_slot), dtype=bool)
    seg_change[0] = True
    np.not_equal(group_slot[1:], group_slot[:-1], out=seg_change[1:])
    seg_starts = np.flatnonzero(seg_change)
    seg_id = np.cumsum(seg_change) - 1
    seg_g = np.add.reduceat(group_g, seg_starts)
    seg_h = np.add.reduceat(group_h, seg_starts)
    seg_c = np.add.reduceat(group_c, seg_starts)

    node_size = len(node_rows)
    zero_g = total_g - seg_g
    zero_h = total_h - seg_h
    zero_c = node_size - seg_c

    # prefix sums within each segment, at each group boundary
    cum_g = np.cumsum(group_g)
    cum_h = np.cumsum(group_h)
    cum_c = np.cumsum(group_c)
    base = np.zeros(len(seg_starts))
    base_h = np.zeros(len(seg_starts))
    base_c = np.zeros(len(seg_starts), dtype=np.int64)
    base[1:] = cum_g[seg_starts[1:] - 1]
    base_h[1:] = cum_h[seg_starts[1:] - 1]
    base_c[1:] = cum_c[seg_starts[1:] - 1]

    sid = seg_id
    left_g = zero_g[sid] + (cum_g - base[sid])
    left_h = zero_h[sid] + (cum_h - base_h[sid])
    left_c = zero_c[sid] + (cum_c - base_c[sid])

    # candidate A: threshold = group value, excluded for the last group of a
    # segment (its right side would be empty)
    last_in_seg = np.empty(len(group_slot), dtype=bool)
    last_in_seg[:-1] = seg_change[1:]
    last_in_seg[-1] = True
    cand_mask = ~last_in_seg
    cand_slot = group_slot[cand_mask]
    cand_thr = group_val[cand_mask]
    cand_lg = left_g[cand_mask]
    cand_lh = left_h[cand_mask]
    cand_lc = left_c[cand_mask]

    # candidate B: threshold 0 separates the implicit zero rows
    zmask = zero_c > 0
    cand_slot = np.concatenate([cand_slot, group_slot[seg_starts][zmask]])
    cand_thr = np.concatenate([cand_thr, np.zeros(int(zmask.sum()), dtype=np.int64)])
    cand_lg = np.concatenate([cand_lg, zero_g[zmask]])
    cand_lh = np.concatenate([cand_lh, zero_h[zmask]])
    cand_lc = np.concatenate([cand_lc, zero_c[zmask]])

    if cand_slot.size == 0:
        return None
    keep = (cand_lc >= mce) & (node_size - cand_lc >= mce)
    if not keep.any():
        return None
    cand_slot = cand_slot[keep]
    cand_thr = cand_thr[keep]
    cand_lg = cand_lg[keep]
    cand_lh = cand_lh[keep]

    right_g = total_g - cand_lg
    right_h = total_h - cand_lh
    gains = 0.5 * (
        cand_lg * cand_lg / (cand_lh + lam)
        + right_g * right_g / (right_h + lam)
        - total_g * total_g / (total_h + lam)
    )

    scan = np.lexsort((cand_thr, cand_slot))
    best_at = scan[int(np.argmax(gains[scan]))]
    best_gain = float(gains[best_at])
    if best_gain <= 0.0:
        return None
    return int(cand_slot[best_at]), int(cand_thr[best_at]), best_gain


def _build_tree(
    mat: _Matrix,
    g: np.ndarray,
    h: np.ndarray,
    params: TrainParams,
    margins: np.ndarray,
) -> Tree:
    feature: list[int] = []
    threshold: list[int] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    all_rows = np.arange(mat.n, dtype=np.int64)
    all_entries = np.arange(len(mat.slot), dtype=np.int64)
    scale = params.eta

    # (rows, entries, depth, parent index, is_left) in preorder via a stack
    stack = [(all_rows, all_entries, 0, -1, False)]
    while stack:
        rows, entries, depth, parent, is_left = stack.pop()
        index = len(feature)
        if parent >= 0:
            if is_left:
                left[parent] = index
            else:
                right[parent] = index
        total_g = float(g[rows].sum())
        total_h = float(h[rows].sum())
        split = None
        if depth < params.depth and len(rows) >= 2 * params.min_child_examples:
            split = _find_split(
                entries, rows, mat, g, h, total_g, total_h, params.lam, params.min_child_examples
            )
        if split is None:
            leaf = -total_g / (total_h + params.lam) * scale
            feature.append(-1)
            threshold.append(0)
            left.append(-1)
            right.append(-1)
            value.append(leaf)
            margins[rows] += leaf
            continue
        slot, thr, _gain = split
        feature.append(slot)
        threshold.append(thr)
        left.append(-1)
        right.append(-1)
        value.append(0.0)

        goes_right = np.zeros(mat.n, dtype=bool)
        seg = entries[mat.slot[entries] == slot]
        goes_right[mat.row[seg[mat.val[seg] > thr]]] = True
        row_right = goes_right[rows]
        rows_left = rows[~row_right]
        rows_right = rows[row_right]
        entry_right = goes_right[mat.row[entries]]
        entries_left = entries[~entry_right]
        entries_right = entries[entry_right]
        # push right first so the left subtree lands next in preorder
        stack.append((rows_right, entries_right, depth + 1, index, False))
        stack.append((rows_left, entries_left, depth + 1, index, True))
    return Tree(feature, threshold, left, right, value)


def train_with_history(
    dataset: Dataset, params: TrainParams, seed: int = 0
) -> tuple[GbdtModel, tuple[float, ...]]:
    """Train and report training log-loss before boosting and after each
    round."""
    if not dataset.rows:
        raise ValueError("cannot train on an empty dataset")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(dataset.rows))
    mat = _Matrix(dataset.rows, order)
    base_margin = 0.0
    margins = np.full(mat.n, base_margin, dtype=np.float64)
    losses = [log_loss(mat.labels, margins)]
    trees: list[Tree] = []
    for _ in range(params.trees):
        probs = 1.0 / (1.0 + np.exp(-margins))
        g = probs - mat.labels
        h = probs * (1.0 - probs)
        tree = _build_tree(mat, g, h, params, margins)
        trees.append(tree)
        losses.append(log_loss(mat.labels, margins))
    model = GbdtModel(
        trees=tuple(trees),
        eta=params.eta,
        base_margin=base_margin,
        feature_bits=dataset.bits,
    )
    return model, tuple(losses)


def train(dataset: Dataset, params: TrainParams, seed: int = 0) -> GbdtModel:
    model, _ = train_with_history(dataset, params, seed)
    return model


# ---------------------------------------------------------------------------
# model file format


class ModelFormatError(ValueError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class VersionMismatchError(ModelFormatError):
    pass


def serialize_model(model: GbdtModel) -> str:
    """Versioned text dump; floats use repr so the round trip is exact."""
    lines = [
        f"{MODEL_MAGIC} v{MODEL_VERSION}",
        f"bits {model.feature_bits}",
        f"eta {model.eta!r}",
        f"base_margin {model.base_margin!r}",
        f"trees {len(model.trees)}",
    ]
    for tree in model.trees:
        lines.append("tree")
        for i in range(len(tree.feature)):
            if tree.feature[i] < 0:
                lines.append(f"l {tree.value[i]!r}")
            else:
                lines.append(f"n {tree.feature[i]} {tree.threshold[i]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def deserialize_model(text: str) -> GbdtModel:
    lines = text.splitlines()
    cursor = 0

    def take(expect_prefix: str) -> tuple[int, list[str]]:
        nonlocal cursor
        if cursor >= len(lines):
            raise ModelFormatError(f"unexpected end of file, wanted {expect_prefix!r}", len(lines))
        lineno = cursor + 1
        parts = lines[cursor].split()
        cursor += 1
        if not parts or parts[0] != expect_prefix:
            raise ModelFormatError(f"expected {expect_prefix!r}", lineno)
        return lineno, parts

    if not lines:
        raise ModelFormatError("empty model file", 1)
    header = lines[0].split()
    cursor = 1
    if len(header) != 2 or header[0] != MODEL_MAGIC:
        raise ModelFormatError("not a model file", 1)
    if header[1] != f"v{MODEL_VERSION}":
        raise VersionMismatchError(f"unsupported version {header[1]!r}", 1)

    def int_field(name: str) -> int:
        lineno, parts = take(name)
        try:
            return int(parts[1])
        except (IndexError, ValueError):
            raise ModelFormatError(f"malformed {name}", lineno) from None

    def float_field(name: str) -> float:
        lineno, parts = take(name)
        try:
            return float(parts[1])
        except (IndexError, ValueError):
            raise ModelFormatError(f"malformed {name}", lineno) from None

    bits = int_field("bits")
    eta = float_field("eta")
    base_margin = float_field("base_margin")
    tree_count = int_field("trees")
    if tree_count < 0:
        raise ModelFormatError("negative tree count", cursor)

    trees = []
    for _ in range(tree_count):
        take("tree")
        feature: list[int] = []
        threshold: list[int] = []
        left: list[int] = []
        right: list[int] = []
        value: list[float] = []

        # preorder stream: each internal node is followed by its left then
        # right subtree, so a pending-slot stack replaces recursion
        pending: list[tuple[int, bool]] = [(-1, False)]
        while pending:
            parent, is_left = pending.pop()
            if cursor >= len(lines):
                raise ModelFormatError("unexpected end of file inside a tree", len(lines))
            lineno = cursor + 1
            parts = lines[cursor].split()
            cursor += 1
            index = len(feature)
            if parent >= 0:
                if is_left:
                    left[parent] = index
                else:
                    right[parent] = index
            if parts and parts[0] == "l" and len(parts) == 2:
                try:
                    leaf = float(parts[1])
                except ValueError:
                    raise ModelFormatError("malformed leaf value", lineno) from None
                feature.append(-1)
                threshold.append(0)
                left.append(-1)
                right.append(-1)
                value.append(leaf)
                continue
            if parts and parts[0] == "n" and len(parts) == 3:
                try:
                    slot = int(parts[1])
                    thr = int(parts[2])
                except ValueError:
                    raise ModelFormatError("malformed internal node", lineno) from None
                if slot < 0:
                    raise ModelFormatError("negative slot index", lineno)
                feature.append(slot)
                threshold.append(thr)
                left.append(-1)
                right.append(-1)
                value.append(0.0)
                pending.append((index, False))
                pending.append((index, True))
                continue
            raise ModelFormatError("expected a tree node", lineno)
        trees.append(Tree(feature, threshold, left, right, value))
    take("end")
    if cursor != len(lines) and any(line.strip() for line in lines[cursor:]):
        raise ModelFormatError("trailing content after 'end'", cursor + 1)
    return GbdtModel(
        trees=tuple(trees), eta=eta, base_margin=base_margin, feature_bits=bits
    )
