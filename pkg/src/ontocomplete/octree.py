"""The completeness condition tree, per-phase weight profiles, and its evaluation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import total_ordering
from typing import Callable, Iterator, Mapping

from .checks import CHECKS, LeafResult
from .model import ElementCounts, Ontology

ROOT = "oc"
COMPONENTS = ("tbox", "rbox", "abox")
SUBLEVELS = ("description", "partition", "redundancy", "consistency", "anomaly")


class ProfileError(ValueError):
    """A weight profile that does not fit the tree or cannot be normalized."""


@total_ordering
class Phase(Enum):
    BUSINESS_VOCABULARY = "2.1"
    EXAMPLE_ENUMERATION = "2.2"
    TAXONOMY = "2.3"
    BINARY_RELATIONS = "2.4"
    DETAIL_DESCRIPTION = "2.5"
    RESTRICTIONS_AND_RULES = "2.6"
    POST_DEVELOPMENT = "post-development"

    @property
    def index(self) -> int:
        return list(Phase).index(self)

    def __lt__(self, other: "Phase") -> bool:
        if not isinstance(other, Phase):
            return NotImplemented
        return self.index < other.index

    def next(self) -> "Phase | None":
        phases = list(Phase)
        return phases[self.index + 1] if self.index + 1 < len(phases) else None

    @property
    def title(self) -> str:
        return _PHASE_TITLES[self]

    @classmethod
    def parse(cls, text: str) -> "Phase":
        key = text.strip().lower().replace("_", "-")
        for phase in cls:
            if key in (phase.value, phase.name.lower().replace("_", "-")):
                return phase
        if key in ("post", "postdevelopment"):
            return cls.POST_DEVELOPMENT
        raise ValueError(f"unknown phase {text!r}; expected one of {', '.join(p.value for p in cls)}")


_PHASE_TITLES = {
    Phase.BUSINESS_VOCABULARY: "business vocabulary acquisition",
    Phase.EXAMPLE_ENUMERATION: "example enumeration",
    Phase.TAXONOMY: "taxonomy definition",
    Phase.BINARY_RELATIONS: "ad hoc binary relations",
    Phase.DETAIL_DESCRIPTION: "detail description",
    Phase.RESTRICTIONS_AND_RULES: "restrictions and rules",
    Phase.POST_DEVELOPMENT: "post-development",
}


@dataclass(frozen=True)
class ConditionNode:
    """Aggregate node (``children``) or leaf bound to a check (``check_id``)."""

    path: str
    children: tuple[tuple["ConditionNode", float], ...] = ()
    check_id: str | None = None

    def __post_init__(self):
        if (self.check_id is None) == (not self.children):
            raise ValueError(f"{self.path}: a node is either a leaf with a check or an aggregate with children")

    @property
    def is_leaf(self) -> bool:
        return self.check_id is not None

    @property
    def name(self) -> str:
        return self.path.rsplit("/", 1)[-1]

    def walk(self) -> Iterator["ConditionNode"]:
        yield self
        for child, _ in self.children:
            yield from child.walk()

    def leaves(self) -> list["ConditionNode"]:
        return [n for n in self.walk() if n.is_leaf]

    def paths(self) -> set[str]:
        return {n.path for n in self.walk()}

    def default_weights(self) -> dict[str, float]:
        return {child.path: w for n in self.walk() for child, w in n.children}


def leaf(parent: str, check_id: str) -> ConditionNode:
    return ConditionNode(f"{parent}/{check_id.split('.', 1)[1]}", check_id=check_id)


def aggregate(path: str, children: list[ConditionNode], weights: list[float] | None = None) -> ConditionNode:
    weights = weights or [1.0] * len(children)
    return ConditionNode(path, tuple(zip(children, weights)))


# component -> sublevel -> check ids; every check appears exactly once
DEFAULT_LAYOUT: dict[str, dict[str, list[str]]] = {
    "tbox": {
        "description": ["description.entity_existence", "description.nl"],
        "partition": ["partition.common_classes", "partition.path_existence", "partition.disjoint_recommendation"],
        "redundancy": ["redundancy.identical_definition"],
        "consistency": ["consistency.circulatory"],
        "anomaly": ["anomaly.chain_of_inheritance", "anomaly.property_clumps"],
    },
    "rbox": {
        "description": ["description.formal_tbox"],
        "partition": ["partition.inverse_properties"],
        "anomaly": ["anomaly.lazy_entities"],
    },
    "abox": {
        "description": ["description.instance_existence", "description.formal_abox"],
        "partition": ["partition.common_instances", "partition.external_instances"],
        "redundancy": ["redundancy.hierarchy"],
    },
}


def default_tree() -> ConditionNode:
    """Root -> {tbox, rbox, abox} -> sublevels -> leaf checks, uniform weights."""
    components = []
    for comp, sublevels in DEFAULT_LAYOUT.items():
        cpath = f"{ROOT}/{comp}"
        subs = [
            aggregate(f"{cpath}/{sub}", [leaf(f"{cpath}/{sub}", cid) for cid in ids])
            for sub, ids in sublevels.items()
        ]
        components.append(aggregate(cpath, subs))
    return aggregate(ROOT, components)


@dataclass(frozen=True)
class WeightProfile:
    """Edge weights keyed by child node path; unlisted paths keep the tree's default weight."""

    phase: Phase | None
    weights: Mapping[str, float] = field(default_factory=dict)

    def weight(self, tree_default: Mapping[str, float], path: str) -> float:
        return self.weights.get(path, tree_default[path])

    def sublevel_weight(self, sublevel: str) -> float:
        """Weight given to ``sublevel``; built-in profiles use one value across components."""
        values = {w for p, w in self.weights.items() if p.count("/") == 2 and p.endswith("/" + sublevel)}
        if not values:
            return 1.0
        if len(values) > 1:
            raise ProfileError(f"sublevel {sublevel} weighted differently across components")
        return values.pop()

    def validate(self, tree: ConditionNode) -> None:
        known = tree.paths() - {tree.path}
        for path, w in self.weights.items():
            if path not in known:
                raise ProfileError(f"unknown node path {path!r}")
            if not w >= 0:
                raise ProfileError(f"{path}: weight must be non-negative, got {w}")
        normalized_weights(tree, self)

    def with_overrides(self, overrides: Mapping[str, float], phase: Phase | None = None) -> "WeightProfile":
        return WeightProfile(phase if phase is not None else self.phase, {**self.weights, **overrides})


def normalized_weights(tree: ConditionNode, profile: WeightProfile) -> dict[str, float]:
    """Per-edge weight divided by its sibling-group sum, keyed by child path."""
    defaults = tree.default_weights()
    out = {tree.path: 1.0}
    for node in tree.walk():
        if not node.children:
            continue
        raw = [profile.weight(defaults, child.path) for child, _ in node.children]
        total = sum(raw)
        if total <= 0:
            raise ProfileError(f"{node.path}: all child weights are zero")
        for (child, _), w in zip(node.children, raw):
            out[child.path] = w / total
    return out


def relative_weights(tree: ConditionNode, profile: WeightProfile) -> dict[str, float]:
    """Global weight of every leaf: product of normalized weights from the root."""
    local = normalized_weights(tree, profile)
    out: dict[str, float] = {}

    def descend(node: ConditionNode, acc: float) -> None:
        if node.is_leaf:
            out[node.path] = acc
            return
        for child, _ in node.children:
            descend(child, acc * local[child.path])

    descend(tree, 1.0)
    return out


@dataclass(frozen=True)
class EvaluationResult:
    tree: ConditionNode
    profile: WeightProfile
    oc: float
    # aggregate/leaf score before its own edge weight; None when skipped (weight 0)
    node_prices: dict[str, float | None]
    local_weights: dict[str, float]
    relative_weights: dict[str, float]
    leaf_results: dict[str, LeafResult]
    leaf_paths: dict[str, str]
    element_counts: ElementCounts

    @property
    def phase(self) -> Phase | None:
        return self.profile.phase

    def relative_weight_of(self, check_id: str) -> float:
        return self.relative_weights[self.leaf_paths[check_id]]

    def leaf_score(self, check_id: str) -> float | None:
        res = self.leaf_results.get(check_id)
        return None if res is None else res.score


def _evaluate_node(
    node: ConditionNode,
    w: float,
    local: Mapping[str, float],
    execute: Callable[[str], float],
    prices: dict[str, float | None],
    visited: set[str],
) -> float:
    # Recursive weighted aggregation; zero-weight children are never executed.
    visited.add(node.path)
    if node.is_leaf:
        score = execute(node.check_id)  # type: ignore[arg-type]
        prices[node.path] = score
        return w * score
    price = 0.0
    for child, _ in node.children:
        if child.path in visited:
            continue
        cw = local[child.path]
        if cw != 0:
            price += _evaluate_node(child, cw, local, execute, prices, visited)
        else:
            _mark_skipped(child, prices)
    price = min(1.0, max(0.0, price))  # float drift from normalized weights
    prices[node.path] = price
    return w * price


def _mark_skipped(node: ConditionNode, prices: dict[str, float | None]) -> None:
    for n in node.walk():
        prices[n.path] = None


def _active_checks(tree: ConditionNode, local: Mapping[str, float]) -> list[str]:
    out = []

    def descend(node: ConditionNode) -> None:
        if node.is_leaf:
            out.append(node.check_id)
            return
        for child, _ in node.children:
            if local[child.path] != 0:
                descend(child)

    descend(tree)
    return out


def evaluate(
    tree: ConditionNode,
    profile: WeightProfile,
    ontology: Ontology,
    checks: Mapping[str, Callable[[Ontology], LeafResult]] | None = None,
    max_workers: int | None = None,
) -> EvaluationResult:
    """Score ``ontology``; leaf checks may run on a thread pool, aggregation is sequential."""
    checks = CHECKS if checks is None else checks
    profile.validate(tree)
    local = normalized_weights(tree, profile)
    leaf_paths = {n.check_id: n.path for n in tree.leaves()}
    missing = [cid for cid in leaf_paths if cid not in checks]
    if missing:
        raise ProfileError(f"tree references unknown checks: {', '.join(sorted(missing))}")

    active = _active_checks(tree, local)
    if max_workers and max_workers > 1 and len(active) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = {cid: pool.submit(checks[cid], ontology) for cid in active}
            results = {cid: futures[cid].result() for cid in active}
    else:
        results = {cid: checks[cid](ontology) for cid in active}

    prices: dict[str, float | None] = {}
    oc = _evaluate_node(tree, 1.0, local, lambda cid: results[cid].score, prices, set())
    return EvaluationResult(
        tree=tree,
        profile=profile,
        oc=min(1.0, max(0.0, oc)),
        node_prices=prices,
        local_weights=local,
        relative_weights=relative_weights(tree, profile),
        leaf_results=results,
        leaf_paths=leaf_paths,
        element_counts=ontology.element_counts(),
    )


def rescore(result: EvaluationResult, overrides: Mapping[str, float]) -> float:
    """Re-run the tree recursion with some leaf scores replaced (no checks re-executed)."""
    scores = {cid: r.score for cid, r in result.leaf_results.items()}
    scores.update(overrides)
    return _evaluate_node(result.tree, 1.0, result.local_weights, scores.__getitem__, {}, set())


def flat_sum(result: EvaluationResult) -> float:
    """Sum of relative weight times leaf score over executed leaves."""
    return sum(
        result.relative_weights[result.leaf_paths[cid]] * r.score for cid, r in result.leaf_results.items()
    )


# ---------------------------------------------------------------------------
# built-in phase profiles
#
# The numbers are this tool's defaults; only their ordering is prescribed:
# early phases weigh description then partition and ignore the rest,
# taxonomy onwards weighs every sublevel with description/partition above
# average, redundancy rises late, post-development favours redundancy,
# description and anomaly.

SUBLEVEL_WEIGHTS: dict[Phase, dict[str, float]] = {
    Phase.BUSINESS_VOCABULARY: dict(description=0.60, partition=0.40, redundancy=0.0, consistency=0.0, anomaly=0.0),
    Phase.EXAMPLE_ENUMERATION: dict(description=0.55, partition=0.45, redundancy=0.0, consistency=0.0, anomaly=0.0),
    Phase.TAXONOMY: dict(description=0.30, partition=0.25, redundancy=0.15, consistency=0.15, anomaly=0.15),
    Phase.BINARY_RELATIONS: dict(description=0.28, partition=0.24, redundancy=0.16, consistency=0.16, anomaly=0.16),
    Phase.DETAIL_DESCRIPTION: dict(description=0.25, partition=0.22, redundancy=0.22, consistency=0.15, anomaly=0.16),
    Phase.RESTRICTIONS_AND_RULES: dict(description=0.25, partition=0.22, redundancy=0.22, consistency=0.15, anomaly=0.16),
    Phase.POST_DEVELOPMENT: dict(description=0.23, partition=0.205, redundancy=0.26, consistency=0.095, anomaly=0.21),
}

COMPONENT_WEIGHTS: dict[Phase, dict[str, float]] = {
    Phase.BUSINESS_VOCABULARY: dict(tbox=0.50, rbox=0.40, abox=0.10),
    Phase.EXAMPLE_ENUMERATION: dict(tbox=0.40, rbox=0.30, abox=0.30),
    Phase.TAXONOMY: dict(tbox=0.50, rbox=0.25, abox=0.25),
    Phase.BINARY_RELATIONS: dict(tbox=0.35, rbox=0.40, abox=0.25),
    Phase.DETAIL_DESCRIPTION: dict(tbox=0.35, rbox=0.30, abox=0.35),
    Phase.RESTRICTIONS_AND_RULES: dict(tbox=0.35, rbox=0.30, abox=0.35),
    Phase.POST_DEVELOPMENT: dict(tbox=0.34, rbox=0.33, abox=0.33),
}

# Vocabulary acquisition is about entities existing at all, so an empty
# ontology must not pass the first gate on vacuous scores alone.
LEAF_WEIGHTS: dict[Phase, dict[str, float]] = {
    Phase.BUSINESS_VOCABULARY: {"oc/tbox/description/entity_existence": 3.0},
}


def builtin_profile(phase: Phase, tree: ConditionNode | None = None) -> WeightProfile:
    tree = tree or default_tree()
    weights: dict[str, float] = {}
    for path in tree.paths():
        parts = path.split("/")
        if len(parts) == 2 and parts[1] in COMPONENTS:
            weights[path] = COMPONENT_WEIGHTS[phase][parts[1]]
        elif len(parts) == 3 and parts[1] in COMPONENTS and parts[2] in SUBLEVELS:
            weights[path] = SUBLEVEL_WEIGHTS[phase][parts[2]]
        elif path in LEAF_WEIGHTS.get(phase, {}):
            weights[path] = LEAF_WEIGHTS[phase][path]
    return WeightProfile(phase, weights)


def builtin_profiles(tree: ConditionNode | None = None) -> dict[Phase, WeightProfile]:
    tree = tree or default_tree()
    return {phase: builtin_profile(phase, tree) for phase in Phase}
