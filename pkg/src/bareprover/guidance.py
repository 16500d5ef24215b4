"""Clause evaluation functions and the three selection strategies.

``e0`` is the unguided two-queue baseline (symbol-count weight at frequency
5, age at frequency 1).  ``solo`` replaces it with a single model queue and
``coop`` mixes both at 6:5:1, which gives the model half of every 12-pick
round and the baseline pair the other half in their native 5:1 ratio.  All
three keep initial clauses ahead of derived ones.

The model queue maps a classifier verdict to coarse weights: 1 for clauses
judged useful (probability at least 0.5, i.e. margin at least 0), 10
otherwise, so the queue's age tie-break orders clauses within a class.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .features import ConfigMismatchError, FeatureConfig, FeatureVector, featurize, featurize_conjecture
from .gbdt import GbdtModel
from .saturation import EvalQueue, Strategy
from .terms import Clause, Problem, clause_weight

POSITIVE_WEIGHT = 1
NEGATIVE_WEIGHT = 10


@dataclass(frozen=True)
class ClauseWeightCef:
    """Symbol-count weight, the classic refinement-free heuristic."""

    fweight: int = 1
    vweight: int = 1
    pos_mult: int = 1

    def __call__(self, clause: Clause) -> int:
        return clause_weight(clause, self.fweight, self.vweight, self.pos_mult)


@dataclass(frozen=True)
class AgeCef:
    """FIFO: a clause's weight is its age, so older clauses pop first."""

    def __call__(self, clause: Clause) -> int:
        return clause.age


@dataclass(frozen=True)
class ModelCef:
    """Binary good/bad weights from a trained model.

    The conjecture vector is fixed per problem; each evaluated clause is
    featurized against it.  Weights are deliberately coarse so that within a
    class the queue falls back to age order.
    """

    model: GbdtModel
    conjecture: FeatureVector
    cfg: FeatureConfig
    positive_weight: int = POSITIVE_WEIGHT
    negative_weight: int = NEGATIVE_WEIGHT

    def __post_init__(self) -> None:
        if self.model.feature_bits != self.cfg.bits:
            raise ConfigMismatchError(
                f"model trained with bits={self.model.feature_bits} cannot "
                f"serve a feature config with bits={self.cfg.bits}"
            )
        if self.conjecture.dim != self.cfg.buckets:
            raise ConfigMismatchError(
                f"conjecture vector dimension {self.conjecture.dim} does not "
                f"match bits={self.cfg.bits}"
            )

    def __call__(self, clause: Clause) -> int:
        fv = featurize(clause, self.conjecture, self.cfg)
        # margin >= 0 is exactly prob >= 0.5, without the exp
        if self.model.predict_margin(fv) >= 0.0:
            return self.positive_weight
        return self.negative_weight


def e0_strategy() -> Strategy:
    return Strategy(
        queues=(
            EvalQueue(ClauseWeightCef(1, 1, 1), 5),
            EvalQueue(AgeCef(), 1),
        ),
        prefer_initial=True,
    )


def model_cef(model: GbdtModel, conjecture: FeatureVector, cfg: FeatureConfig) -> ModelCef:
    return ModelCef(model, conjecture, cfg)


def solo_strategy(model: GbdtModel, conjecture: FeatureVector, cfg: FeatureConfig) -> Strategy:
    return Strategy(
        queues=(EvalQueue(model_cef(model, conjecture, cfg), 1),),
        prefer_initial=True,
    )


def coop_strategy(model: GbdtModel, conjecture: FeatureVector, cfg: FeatureConfig) -> Strategy:
    return Strategy(
        queues=(
            EvalQueue(model_cef(model, conjecture, cfg), 6),
            EvalQueue(ClauseWeightCef(1, 1, 1), 5),
            EvalQueue(AgeCef(), 1),
        ),
        prefer_initial=True,
    )


class GuidanceMode(enum.Enum):
    E0 = "e0"
    SOLO = "solo"
    COOP = "coop"


@dataclass(frozen=True)
class Guidance:
    """A mode plus (for the guided modes) the model it runs with.

    ``strategy_for`` builds the per-problem strategy; guided modes featurize
    the problem's conjecture once here.
    """

    mode: GuidanceMode
    model: Optional[GbdtModel] = None
    cfg: Optional[FeatureConfig] = None

    def __post_init__(self) -> None:
        if self.mode is GuidanceMode.E0:
            return
        if self.model is None or self.cfg is None:
            raise ValueError(f"mode {self.mode.value} needs a model and a feature config")

    def strategy_for(self, problem: Problem) -> Strategy:
        if self.mode is GuidanceMode.E0:
            return e0_strategy()
        conjecture = featurize_conjecture(problem, self.cfg)
        if self.mode is GuidanceMode.SOLO:
            return solo_strategy(self.model, conjecture, self.cfg)
        return coop_strategy(self.model, conjecture, self.cfg)


def baseline_guidance() -> Guidance:
    return Guidance(GuidanceMode.E0)
