"""Distortion of voting rules in metric spaces.

Exact worst-case distortion by linear programming, the usual deterministic
and randomized rules, and executable lower-bound constructions against
communication-bounded rules.
"""

from .core import CandidateDistribution, Instance, Metric, VoteProfile, WeightedBallot
from .errors import MvdError
from .lp import distortion_of, point_mass_distortion, rule_distortion
from .metric import INF, is_consistent, ratio_of, validate_metric
from .rules import parse_rule, run_rule

__version__ = "0.1.0"

__all__ = [
    "INF",
    "CandidateDistribution",
    "Instance",
    "Metric",
    "MvdError",
    "VoteProfile",
    "WeightedBallot",
    "distortion_of",
    "is_consistent",
    "parse_rule",
    "point_mass_distortion",
    "ratio_of",
    "rule_distortion",
    "run_rule",
    "validate_metric",
]
