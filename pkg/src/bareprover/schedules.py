"""Named per-loop meta-parameter schedules.

A schedule assigns each loop index a tree depth D, a tree count T and a
feature hash size.  Fixed schedules repeat one (D, T) pair, ramp schedules
move D and/or T linearly across 16 loops and hold the last value beyond, and
the table schedules are exact lookups that refuse to extrapolate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .features import FeatureConfig
from .gbdt import TrainParams

DEFAULT_BITS = 15


@dataclass(frozen=True)
class ScheduleEntry:
    loop_index: int
    depth: int
    trees: int
    feature_bits: int = DEFAULT_BITS

    @property
    def feature_size(self) -> int:
        return 1 << self.feature_bits

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(bits=self.feature_bits)

    def train_params(self, eta: float = 0.2, lam: float = 1.0) -> TrainParams:
        return TrainParams(depth=self.depth, trees=self.trees, eta=eta, lam=lam)


_FIXED = {
    "fives": (5, 100),
    "nines": (9, 100),
    "thirteens": (13, 200),
    "sixteens": (16, 100),
}

_INC2_D = (3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31, 33)
_INC2_T = (150, 150, 150, 100, 100, 100, 75, 50, 75, 100, 150, 75, 100, 150, 75, 100)

_EXP2_D = (4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 16, 32, 9, 16, 32, 64, 24, 25, 32)
_EXP2_T = (
    50, 150, 160, 170, 180, 190, 200, 200, 200, 200, 210,
    220, 225, 225, 225, 300, 300, 225, 150, 250, 250, 250,
)

_EXP5_D = (512, 512, 32, 1000, 32, 1000, 32, 1000, 32, 1000, 1000, 100)
_EXP5_T = (2, 2, 100, 100, 200, 100, 200, 32, 300, 32, 32, 32)
# hash sizes as powers of two; sizes below the 2^5 floor clamp up to it
_EXP5_BITS = (14, 13, 12, 5, 12, 5, 12, 5, 11, 6, 5, 7)

SCHEDULE_NAMES = (
    "fives", "nines", "thirteens", "sixteens",
    "inc", "32_inc", "inc2", "inc3", "dec3", "exp2", "exp5",
)


def _ramp_depth(k: int) -> int:
    return min(3 + 2 * k, 33)


def _ramp_trees_up(k: int) -> int:
    # 50 at loop 0 to 250 at loop 15, rounded to the nearest 10
    return ((825 + 200 * min(k, 15)) // 150) * 10


def _ramp_trees_down(k: int) -> int:
    return _ramp_trees_up(15 - min(k, 15))


def _table_entry(name: str, depths, trees, bits, k: int) -> ScheduleEntry:
    if k >= len(depths):
        raise ValueError(
            f"schedule {name!r} defines only {len(depths)} loops, wanted loop {k}"
        )
    b = bits[k] if bits is not None else DEFAULT_BITS
    return ScheduleEntry(loop_index=k, depth=depths[k], trees=trees[k], feature_bits=b)


def schedule_entry(name: str, k: int) -> ScheduleEntry:
    """The (D, T, bits) assignment of schedule ``name`` at loop ``k``."""
    if k < 0:
        raise ValueError("loop index must be non-negative")
    if name in _FIXED:
        depth, trees = _FIXED[name]
        return ScheduleEntry(loop_index=k, depth=depth, trees=trees)
    if name == "inc":
        return ScheduleEntry(loop_index=k, depth=_ramp_depth(k), trees=100)
    if name == "32_inc":
        return ScheduleEntry(loop_index=k, depth=32, trees=_ramp_trees_up(k))
    if name == "inc3":
        return ScheduleEntry(loop_index=k, depth=_ramp_depth(k), trees=_ramp_trees_up(k))
    if name == "dec3":
        return ScheduleEntry(loop_index=k, depth=_ramp_depth(k), trees=_ramp_trees_down(k))
    if name == "inc2":
        return _table_entry("inc2", _INC2_D, _INC2_T, None, k)
    if name == "exp2":
        return _table_entry("exp2", _EXP2_D, _EXP2_T, None, k)
    if name == "exp5":
        return _table_entry("exp5", _EXP5_D, _EXP5_T, _EXP5_BITS, k)
    raise ValueError(f"unknown schedule {name!r} (one of {', '.join(SCHEDULE_NAMES)})")


def builtin_schedule(name: str, loops: int) -> list[ScheduleEntry]:
    """Entries for loops 0..loops-1.  Table schedules raise rather than
    extrapolate past their last column."""
    if loops < 0:
        raise ValueError("loop count must be non-negative")
    return [schedule_entry(name, k) for k in range(loops)]
