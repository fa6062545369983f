"""Improvement actions, projected gains, and phase gating."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .checks import CHECK_TITLES, Finding
from .model import Ontology
from .octree import ConditionNode, EvaluationResult, Phase, WeightProfile, default_tree, evaluate, rescore

DEFAULT_THRESHOLD = 0.80


@dataclass(frozen=True)
class ImprovementAction:
    check_id: str
    description: str
    # projected OC increase, percentage points
    gain: float
    findings: tuple[Finding, ...]


@dataclass(frozen=True)
class GateDecision:
    current_phase: Phase
    oc: float
    threshold: float
    advance: bool
    next_phase: Phase | None

    def message(self) -> str:
        if self.advance:
            return f"advance to {self.next_phase.value}"  # type: ignore[union-attr]
        if self.next_phase is None and self.oc >= self.threshold:
            return "threshold reached; already in the last phase"
        return f"stay in {self.current_phase.value}: OC {self.oc * 100:.1f}% below {self.threshold * 100:.1f}%"


def action_gain(evaluation: EvaluationResult, check_id: str) -> float:
    score = evaluation.leaf_score(check_id)
    if score is None:
        return 0.0
    return evaluation.relative_weight_of(check_id) * (1.0 - score) * 100.0


def recommend_improvements(evaluation: EvaluationResult) -> list[ImprovementAction]:
    """One action per imperfect, non-zero-weight leaf, highest gain first."""
    actions = []
    for check_id in sorted(evaluation.leaf_results):
        result = evaluation.leaf_results[check_id]
        if result.score >= 1.0 or evaluation.relative_weight_of(check_id) <= 0:
            continue
        actions.append(
            ImprovementAction(
                check_id=check_id,
                description=CHECK_TITLES.get(check_id, check_id),
                gain=action_gain(evaluation, check_id),
                findings=result.findings,
            )
        )
    actions.sort(key=lambda a: (-a.gain, a.check_id))
    return actions


def project_gain(evaluation: EvaluationResult, check_id: str) -> float:
    """OC if ``check_id`` were fully satisfied, recomputed through the tree."""
    if check_id not in evaluation.leaf_paths:
        raise KeyError(f"unknown check id: {check_id}")
    if check_id not in evaluation.leaf_results:
        return evaluation.oc
    return max(evaluation.oc, rescore(evaluation, {check_id: 1.0}))


def gate_phase(evaluation: EvaluationResult | float, phase: Phase | None = None, threshold: float = DEFAULT_THRESHOLD) -> GateDecision:
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if isinstance(evaluation, EvaluationResult):
        oc = evaluation.oc
        phase = phase or evaluation.phase
    else:
        oc = float(evaluation)
    if phase is None:
        raise ValueError("phase is required")
    nxt = phase.next()
    return GateDecision(phase, oc, threshold, oc >= threshold and nxt is not None, nxt)


def place_phase(
    ontology: Ontology,
    profiles: Mapping[Phase, WeightProfile],
    threshold: float = DEFAULT_THRESHOLD,
    tree: ConditionNode | None = None,
) -> Phase:
    """First phase (in order) whose profile scores below the threshold."""
    tree = tree or default_tree()
    for phase in Phase:
        if evaluate(tree, profiles[phase], ontology).oc < threshold:
            return phase
    return Phase.POST_DEVELOPMENT
