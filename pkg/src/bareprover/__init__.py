"""A bare-bones saturation prover with learned clause selection.

The prover runs given-clause saturation over an unordered superposition
calculus (no term ordering, no literal selection) on TPTP CNF problems.  On
top of it sits a proving/learning loop: selected clauses from successful
runs become labeled training data for gradient-boosted decision trees, and
the trained model steers clause selection in the next round.
"""

from .features import FeatureConfig, FeatureVector, featurize, featurize_conjecture
from .gbdt import Dataset, DatasetRow, GbdtModel, TrainParams, deserialize_model, serialize_model, train
from .guidance import Guidance, GuidanceMode, coop_strategy, e0_strategy, solo_strategy
from .harness import RunConfig, evaluate_corpus, harvest, load_corpus, run_loop
from .saturation import Limits, SaturationResult, Status, Strategy, saturate, verify_proof
from .schedules import ScheduleEntry, builtin_schedule
from .terms import Clause, Literal, Problem, Role
from .tptp import ParseError, format_clause, format_problem, load_problem, parse_problem

__version__ = "0.1.0"

__all__ = [
    "Clause",
    "Dataset",
    "DatasetRow",
    "FeatureConfig",
    "FeatureVector",
    "GbdtModel",
    "Guidance",
    "GuidanceMode",
    "Limits",
    "Literal",
    "ParseError",
    "Problem",
    "Role",
    "RunConfig",
    "SaturationResult",
    "ScheduleEntry",
    "Status",
    "Strategy",
    "TrainParams",
    "builtin_schedule",
    "coop_strategy",
    "deserialize_model",
    "e0_strategy",
    "evaluate_corpus",
    "featurize",
    "featurize_conjecture",
    "format_clause",
    "format_problem",
    "harvest",
    "load_corpus",
    "load_problem",
    "parse_problem",
    "run_loop",
    "saturate",
    "serialize_model",
    "solo_strategy",
    "train",
    "verify_proof",
]
