"""Continuous ontology-completeness evaluation: weighted semantic checks, recommendations, phase gating."""

from .advisor import (
    DEFAULT_THRESHOLD,
    GateDecision,
    ImprovementAction,
    gate_phase,
    place_phase,
    project_gain,
    recommend_improvements,
)
from .checks import CHECKS, Finding, LeafResult
from .model import Axiom, AxiomKind, Individual, Literal, Ontology, UnknownIriError
from .octree import (
    ConditionNode,
    EvaluationResult,
    Phase,
    WeightProfile,
    builtin_profiles,
    default_tree,
    evaluate,
    relative_weights,
)
from .parser import ParseDiagnostic, parse_ontology, parse_weight_profile, serialize_ontology
from .replay import ReplayRecord, replay

__all__ = [
    "Axiom",
    "AxiomKind",
    "CHECKS",
    "ConditionNode",
    "DEFAULT_THRESHOLD",
    "EvaluationResult",
    "Finding",
    "GateDecision",
    "ImprovementAction",
    "Individual",
    "LeafResult",
    "Literal",
    "Ontology",
    "ParseDiagnostic",
    "Phase",
    "ReplayRecord",
    "UnknownIriError",
    "WeightProfile",
    "builtin_profiles",
    "default_tree",
    "evaluate",
    "gate_phase",
    "parse_ontology",
    "parse_weight_profile",
    "place_phase",
    "project_gain",
    "recommend_improvements",
    "relative_weights",
    "replay",
    "serialize_ontology",
]
