"""Leaf semantic checks of the completeness tree.

Every check is a pure function ``Ontology -> LeafResult``. A score of 1.0
means nothing to fix; empty categories (no classes, no siblings, ...) score
1.0 because an absent category cannot be faulted.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from . import graph
from .model import (
    ANNOTATION_KINDS,
    HIERARCHY_KINDS,
    SYMMETRIC_KINDS,
    Axiom,
    AxiomKind,
    Iri,
    Literal,
    Ontology,
)

PLACEHOLDER = "\x00self"

# Chains shorter than this many pass-through classes are ordinary taxonomy depth.
DEFAULT_MIN_CHAIN = 3


@dataclass(frozen=True)
class Finding:
    kind: str
    subjects: tuple[Iri, ...]
    suggestion: str
    # informational findings never affect the score
    penalized: bool = True

    def as_dict(self) -> dict:
        return {"kind": self.kind, "subjects": list(self.subjects), "suggestion": self.suggestion}


@dataclass(frozen=True)
class LeafResult:
    check_id: str
    score: float
    findings: tuple[Finding, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"{self.check_id}: score {self.score} outside [0, 1]")


def _ratio_ok(bad: int, total: int) -> float:
    return 1.0 if total == 0 else 1.0 - bad / total


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def _short(iri: Iri) -> str:
    for sep in ("#", "/", ":"):
        if sep in iri.rstrip(sep):
            return iri.rstrip(sep).rsplit(sep, 1)[1]
    return iri


# ---------------------------------------------------------------------------
# description


def check_entity_existence(onto: Ontology) -> LeafResult:
    findings = []
    if not onto.classes:
        findings.append(Finding("no_classes", (), "Declare the classes of the domain vocabulary."))
    if not onto.properties:
        findings.append(Finding("no_properties", (), "Declare object or datatype properties."))
    score = (bool(onto.classes) + bool(onto.properties)) / 2
    return LeafResult("description.entity_existence", score, tuple(findings))


def check_instance_existence(onto: Ontology) -> LeafResult:
    empty = sorted(c for c in onto.classes if not onto.instances_of(c, "inherited"))
    findings = tuple(
        Finding("class_without_instances", (c,), f"Add a few example individuals of {_short(c)}.")
        for c in empty
    )
    return LeafResult("description.instance_existence", _ratio_ok(len(empty), len(onto.classes)), findings)


def _has_english(onto: Ontology, iri: Iri, kind: AxiomKind) -> bool:
    return any(
        a.kind is kind and a.objects[0].is_english()  # type: ignore[union-attr]
        for a in onto.asserted_axioms(iri)
    )


def check_natural_language(onto: Ontology) -> LeafResult:
    entities = sorted(onto.classes | onto.properties)
    findings = []
    credit = 0.0
    for e in entities:
        if _has_english(onto, e, AxiomKind.LABEL):
            credit += 0.5
        else:
            findings.append(Finding("missing_label", (e,), f"Add an English rdfs:label to {_short(e)}."))
        if _has_english(onto, e, AxiomKind.COMMENT):
            credit += 0.5
        else:
            findings.append(Finding("missing_comment", (e,), f"Add an English rdfs:comment describing {_short(e)}."))
    score = 1.0 if not entities else credit / len(entities)
    return LeafResult("description.nl", score, tuple(findings))


def check_formal_description_tbox(onto: Ontology) -> LeafResult:
    props = sorted(onto.properties)
    findings = []
    total = 0.0
    for p in props:
        has_domain = bool(onto.domains(p))
        has_range = bool(onto.ranges(p))
        total += (has_domain + has_range) / 2
        if not has_domain:
            findings.append(Finding("missing_domain", (p,), f"Define rdfs:domain of {_short(p)}."))
        if not has_range:
            findings.append(Finding("missing_range", (p,), f"Define rdfs:range of {_short(p)}."))
    score = 1.0 if not props else total / len(props)
    return LeafResult("description.formal_tbox", score, tuple(findings))


def check_formal_description_abox(onto: Ontology) -> LeafResult:
    """Closed-world check of domain, range and cardinality constraints per individual."""
    bad: dict[Iri, list[Finding]] = defaultdict(list)
    for a in onto.property_assertions():
        x, (p, y) = a.subject, a.objects
        types = onto.types_of(x, inherited=True)
        for d in sorted(onto.domains(p) - types):
            bad[x].append(
                Finding("domain_violation", (x, p, d), f"Type {_short(x)} as {_short(d)} or fix its use of {_short(p)}.")
            )
        if not isinstance(y, Literal) and p in onto.object_properties:
            ytypes = onto.types_of(y, inherited=True)
            for r in sorted(onto.ranges(p) - ytypes):
                bad[x].append(
                    Finding("range_violation", (x, p, y, r), f"Type {_short(y)} as {_short(r)} or fix {_short(x)} {_short(p)} {_short(y)}.")
                )

    counts: dict[tuple[Iri, Iri], int] = defaultdict(int)
    for a in onto.property_assertions():
        counts[(a.subject, a.objects[0])] += 1  # type: ignore[index]
    for kind in (AxiomKind.MIN_CARDINALITY, AxiomKind.MAX_CARDINALITY):
        for r in onto.axioms_of_kind(kind):
            cls, p, n = r.subject, r.objects[0], r.cardinality
            for x in sorted(onto.instances_of(cls, "inherited")):
                have = counts.get((x, p), 0)  # type: ignore[arg-type]
                if kind is AxiomKind.MIN_CARDINALITY and have < n:  # type: ignore[operator]
                    bad[x].append(
                        Finding("min_cardinality", (x, p, cls), f"{_short(x)} needs at least {n} {_short(p)} values (has {have}).")
                    )
                elif kind is AxiomKind.MAX_CARDINALITY and have > n:  # type: ignore[operator]
                    bad[x].append(
                        Finding("max_cardinality", (x, p, cls), f"{_short(x)} allows at most {n} {_short(p)} values (has {have}).")
                    )
    findings = tuple(f for x in sorted(bad) for f in bad[x])
    return LeafResult("description.formal_abox", _ratio_ok(len(bad), len(onto.individuals)), findings)


# ---------------------------------------------------------------------------
# partition


def check_common_classes(onto: Ontology) -> LeafResult:
    disjoint = onto.disjoint_pairs()
    findings = []
    if disjoint:
        for c in sorted(onto.classes):
            ancestors = sorted(onto.superclasses_closure(c))
            clash = [(a, b) for a, b in combinations(ancestors, 2) if frozenset((a, b)) in disjoint]
            if clash:
                a, b = clash[0]
                findings.append(
                    Finding("common_class", (c, a, b), f"{_short(c)} inherits from disjoint classes {_short(a)} and {_short(b)}; move it under one of them.")
                )
    return LeafResult("partition.common_classes", _ratio_ok(len(findings), len(onto.classes)), tuple(findings))


def check_common_instances(onto: Ontology) -> LeafResult:
    disjoint = onto.disjoint_pairs()
    findings = []
    if disjoint:
        for ind in sorted(onto.individual_iris):
            types = sorted(onto.types_of(ind, inherited=True))
            clash = [(a, b) for a, b in combinations(types, 2) if frozenset((a, b)) in disjoint]
            if clash:
                a, b = clash[0]
                findings.append(
                    Finding("common_instance", (ind, a, b), f"{_short(ind)} is a member of disjoint classes {_short(a)} and {_short(b)}.")
                )
    return LeafResult("partition.common_instances", _ratio_ok(len(findings), len(onto.individuals)), tuple(findings))


def check_external_instances(onto: Ontology) -> LeafResult:
    external: dict[Iri, Iri] = {}
    for c in sorted(onto.classes):
        subs = onto.direct_subclasses(c)
        if not subs:
            continue
        covered = set()
        for s in subs:
            covered |= onto.instances_of(s, "inherited")
        for x in sorted(onto.instances_of(c, "direct") - covered):
            external.setdefault(x, c)
    findings = tuple(
        Finding("external_instance", (x, c), f"Assign {_short(x)} to a subclass of {_short(c)}, or add a subclass for it.")
        for x, c in sorted(external.items())
    )
    return LeafResult("partition.external_instances", _ratio_ok(len(external), len(onto.individuals)), findings)


def check_inverse_properties(onto: Ontology) -> LeafResult:
    with_inverse = set()
    for a in onto.axioms_of_kind(AxiomKind.INVERSE_OF):
        with_inverse.add(a.subject)
        with_inverse.add(a.objects[0])
    missing = sorted(onto.object_properties - with_inverse)
    findings = tuple(
        Finding("missing_inverse", (p,), f"Define an owl:inverseOf for {_short(p)}.") for p in missing
    )
    n = len(onto.object_properties)
    score = 1.0 if n == 0 else (n - len(missing)) / n
    return LeafResult("partition.inverse_properties", score, findings)


def check_path_existence(onto: Ontology) -> LeafResult:
    if len(onto.classes) <= 1:
        return LeafResult("partition.path_existence", 1.0)
    comps = graph.connected_components(graph.concept_graph(onto))
    findings = tuple(
        Finding("disconnected_component", tuple(sorted(comp)), "Connect these classes to the rest of the ontology (subclass or object property).")
        for comp in comps[1:]
    )
    return LeafResult("partition.path_existence", len(comps[0]) / len(onto.classes), findings)


def sibling_pairs(onto: Ontology) -> set[tuple[Iri, Iri]]:
    """Unordered pairs of distinct direct subclasses sharing a parent."""
    pairs = set()
    for c in onto.classes:
        for a, b in combinations(sorted(onto.direct_subclasses(c)), 2):
            pairs.add((a, b))
    return pairs


def recommend_disjoint_axioms(onto: Ontology) -> LeafResult:
    pairs = sibling_pairs(onto)
    disjoint = onto.disjoint_pairs()
    findings = []
    for a, b in sorted(pairs):
        ia, ib = onto.instances_of(a, "inherited"), onto.instances_of(b, "inherited")
        if ia and ib and not (ia & ib) and frozenset((a, b)) not in disjoint:
            findings.append(
                Finding("recommend_disjoint", (a, b), f"Instances never overlap: consider {_short(a)} owl:disjointWith {_short(b)}.")
            )
    score = _ratio_ok(len(findings), len(pairs))
    return LeafResult("partition.disjoint_recommendation", score, tuple(findings) + _hierarchy_hints(onto))


def _hierarchy_hints(onto: Ontology) -> tuple[Finding, ...]:
    """Data-driven suggestions for the other hierarchy axioms; informational only."""
    hints = []
    extents = {c: onto.instances_of(c, "inherited") for c in sorted(onto.classes)}
    equivalent = {frozenset((a.subject, a.objects[0])) for a in onto.axioms_of_kind(AxiomKind.EQUIVALENT_CLASSES)}
    for a, b in combinations(sorted(c for c, ext in extents.items() if ext), 2):
        ea, eb = extents[a], extents[b]
        if ea == eb:
            if frozenset((a, b)) not in equivalent:
                hints.append(Finding("recommend_equivalent_class", (a, b), f"{_short(a)} and {_short(b)} have the same instances: consider owl:equivalentClass.", False))
        elif ea < eb and b not in onto.superclasses_closure(a):
            hints.append(Finding("recommend_subclass", (a, b), f"Every {_short(a)} is a {_short(b)}: consider {_short(a)} rdfs:subClassOf {_short(b)}.", False))
        elif eb < ea and a not in onto.superclasses_closure(b):
            hints.append(Finding("recommend_subclass", (b, a), f"Every {_short(b)} is a {_short(a)}: consider {_short(b)} rdfs:subClassOf {_short(a)}.", False))

    uses: dict[Iri, set] = defaultdict(set)
    for pa in onto.property_assertions():
        uses[pa.objects[0]].add((pa.subject, pa.objects[1]))  # type: ignore[index]
    declared_sub = {(a.subject, a.objects[0]) for a in onto.axioms_of_kind(AxiomKind.SUBPROPERTY_OF)}
    declared_eq = {frozenset((a.subject, a.objects[0])) for a in onto.axioms_of_kind(AxiomKind.EQUIVALENT_PROPERTIES)}
    for p, q in combinations(sorted(uses), 2):
        up, uq = uses[p], uses[q]
        if up == uq and frozenset((p, q)) not in declared_eq:
            hints.append(Finding("recommend_equivalent_property", (p, q), f"{_short(p)} and {_short(q)} relate the same pairs: consider owl:equivalentProperty.", False))
        elif up < uq and (p, q) not in declared_sub:
            hints.append(Finding("recommend_subproperty", (p, q), f"Consider {_short(p)} rdfs:subPropertyOf {_short(q)}.", False))
        elif uq < up and (q, p) not in declared_sub:
            hints.append(Finding("recommend_subproperty", (q, p), f"Consider {_short(q)} rdfs:subPropertyOf {_short(p)}.", False))
    return tuple(hints)


# ---------------------------------------------------------------------------
# redundancy


def formal_signature(onto: Ontology, iri: Iri) -> frozenset[tuple]:
    """Axioms about ``iri`` with ``iri`` itself replaced by a placeholder, annotations excluded."""

    def sub(t):
        return PLACEHOLDER if t == iri else t

    sig = set()
    for a in onto.asserted_axioms(iri):
        if a.kind in ANNOTATION_KINDS:
            continue
        if a.kind in SYMMETRIC_KINDS:
            other = a.objects[0] if a.subject == iri else a.subject
            sig.add((a.kind.value, PLACEHOLDER, sub(other), None))
        else:
            sig.add((a.kind.value, sub(a.subject), tuple(sub(t) for t in a.objects), a.cardinality))
    return frozenset(sig)


def check_identical_definition(onto: Ontology) -> LeafResult:
    groups: dict[tuple, list[Iri]] = defaultdict(list)
    for kind, members in (
        ("class", onto.classes),
        ("object_property", onto.object_properties),
        ("data_property", onto.data_properties),
        ("individual", onto.individual_iris),
    ):
        for iri in sorted(members):
            sig = formal_signature(onto, iri)
            if sig:
                groups[(kind, sig)].append(iri)
    flagged: set[Iri] = set()
    findings = []
    for members in groups.values():
        if len(members) < 2:
            continue
        flagged.update(members)
        for a, b in combinations(members, 2):
            findings.append(
                Finding("synonym_candidates", (a, b), f"{_short(a)} and {_short(b)} have identical formal definitions; merge them or tell them apart.")
            )
    findings.sort(key=lambda f: f.subjects)
    total = len(onto.classes) + len(onto.properties) + len(onto.individuals)
    return LeafResult("redundancy.identical_definition", _ratio_ok(len(flagged), total), tuple(findings))


def _implied_edges(g: graph.Digraph) -> set[tuple[Iri, Iri]]:
    """Edges (a, c) for which c stays reachable from a once the edge itself is removed."""
    order, reach = graph.closure_matrix(g)
    pos = {n: i for i, n in enumerate(order)}
    succ = g.successors()
    implied = set()
    for a, c in g.edges:
        if a == c:
            continue
        ia, ic = pos[a], pos[c]
        ambiguous = False
        for b in succ[a]:
            if b == c or b == a:
                continue
            ib = pos[b]
            if reach[ib, ic]:
                if not reach[ib, ia]:
                    implied.add((a, c))
                    break
                ambiguous = True
        else:
            if ambiguous and _reachable_without(succ, a, c):
                implied.add((a, c))
    return implied


def _reachable_without(succ: dict[Iri, set[Iri]], a: Iri, c: Iri) -> bool:
    seen = set()
    stack = [b for b in succ[a] if b != c]
    while stack:
        u = stack.pop()
        if u == c:
            return True
        if u in seen:
            continue
        seen.add(u)
        stack.extend(succ[u])
    return False


def redundant_hierarchy_axioms(onto: Ontology) -> list[tuple[Axiom, str]]:
    """(axiom, reason) for each redundant occurrence; reason is 'duplicate' or 'implied'."""
    out: list[tuple[Axiom, str]] = []
    for axiom, extra in sorted(onto.duplicates.items(), key=lambda kv: kv[0].sort_key()):
        if axiom.kind in HIERARCHY_KINDS:
            out.extend([(axiom, "duplicate")] * extra)

    class_implied = _implied_edges(graph.class_hierarchy_graph(onto))
    prop_implied = _implied_edges(graph.property_hierarchy_graph(onto))
    for a in onto.axioms_of_kind(AxiomKind.SUBCLASS_OF):
        if (a.subject, a.objects[0]) in class_implied:
            out.append((a, "implied"))
    for a in onto.axioms_of_kind(AxiomKind.SUBPROPERTY_OF):
        if (a.subject, a.objects[0]) in prop_implied:
            out.append((a, "implied"))
    for a in onto.axioms_of_kind(AxiomKind.TYPE_ASSERTION):
        t = a.objects[0]
        if any(t in onto.superclasses_closure(other) for other in onto.types_of(a.subject) if other != t):
            out.append((a, "implied"))
    return out


def check_hierarchy_redundancy(onto: Ontology) -> LeafResult:
    total = sum(
        1 + onto.duplicates.get(a, 0) for a in onto.axioms if a.kind in HIERARCHY_KINDS
    )
    redundant = redundant_hierarchy_axioms(onto)
    findings = tuple(
        Finding(
            f"{reason}_{axiom.kind.value}",
            (axiom.subject, axiom.objects[0]),  # type: ignore[arg-type]
            f"Remove {'duplicated' if reason == 'duplicate' else 'indirectly implied'} axiom {_short(axiom.subject)} {axiom.kind.value} {_short(axiom.objects[0])}.",  # type: ignore[arg-type]
        )
        for axiom, reason in redundant
    )
    return LeafResult("redundancy.hierarchy", _ratio_ok(len(redundant), total), findings)


# ---------------------------------------------------------------------------
# consistency


def check_circulatory_errors(onto: Ontology) -> LeafResult:
    found = sorted(
        (sorted(c) for g in (graph.class_hierarchy_graph(onto), graph.property_hierarchy_graph(onto)) for c in graph.cycles(g)),
    )
    members = {m for c in found for m in c}
    findings = tuple(
        Finding("cycle", tuple(c), "Break the cycle: " + " / ".join(_short(m) for m in c) + " subsume each other.")
        for c in found
    )
    total = len(onto.classes) + len(onto.properties)
    return LeafResult("consistency.circulatory", _ratio_ok(len(members), total), findings)


# ---------------------------------------------------------------------------
# anomaly


def find_chains(onto: Ontology, min_length: int = DEFAULT_MIN_CHAIN) -> list[tuple[Iri, Iri, tuple[Iri, ...]]]:
    """Chains (top, bottom, pass-through classes) found greedily from the top of the hierarchy.

    A pass-through class has one superclass and no axioms besides its
    SubClassOf; both endpoints carry at least one other axiom. A class
    already counted in one chain is never counted again.
    """
    described = {c for c in onto.classes if onto.asserted_axioms(c, without_subclass=True)}

    def passes(c: Iri) -> bool:
        return c not in described and len(onto.direct_superclasses(c)) == 1

    used: set[Iri] = set()
    chains = []

    def walk(top: Iri, node: Iri, path: list[Iri]) -> None:
        if node in described:
            fresh = tuple(p for p in path if p not in used)
            if path and len(path) >= min_length and fresh:
                used.update(fresh)
                chains.append((top, node, fresh))
            return
        if not passes(node) or node in path:
            return
        path.append(node)
        for child in sorted(onto.direct_subclasses(node)):
            walk(top, child, path)
        path.pop()

    for top in sorted(described):
        for child in sorted(onto.direct_subclasses(top)):
            walk(top, child, [])
    return chains


def find_chain_of_inheritance(onto: Ontology, min_length: int = DEFAULT_MIN_CHAIN) -> LeafResult:
    n_direct = len(onto.axioms_of_kind(AxiomKind.SUBCLASS_OF))
    chains = find_chains(onto, min_length)
    price = 1.0
    findings = []
    for top, bottom, mids in chains:
        price -= len(mids) / n_direct
        findings.append(
            Finding(
                "chain_of_inheritance",
                (top, bottom, *mids),
                f"Classes {', '.join(_short(m) for m in mids)} between {_short(top)} and {_short(bottom)} add nothing; describe or collapse them.",
            )
        )
    return LeafResult("anomaly.chain_of_inheritance", _clamp(price), tuple(findings))


def _clump_key(b: graph.Biclique) -> tuple:
    ratio = b.m * b.n / (b.m + b.n)
    return (-ratio, -(b.m * b.n), b.classes, b.properties)


def find_clumps(onto: Ontology, cap: int | None = graph.DEFAULT_BICLIQUE_CAP) -> list[graph.Biclique]:
    g = graph.property_attachment_graph(onto)
    clumps = []
    while True:
        candidates = [
            b for b in graph.enumerate_maximal_bicliques(g, 2, 2, cap) if b.m * b.n > b.m + b.n
        ]
        if not candidates:
            return clumps
        best = min(candidates, key=_clump_key)
        clumps.append(best)
        g = g.without(best.edges())


def find_property_clumps(onto: Ontology, cap: int | None = graph.DEFAULT_BICLIQUE_CAP) -> LeafResult:
    n_props = len(onto.properties)
    price = 1.0
    findings = []
    for b in find_clumps(onto, cap):
        price -= (b.m * b.n - (b.m + b.n)) / n_props
        findings.append(
            Finding(
                "property_clump",
                (*b.classes, *b.properties),
                f"Properties {', '.join(_short(p) for p in b.properties)} repeat on {', '.join(_short(c) for c in b.classes)}; "
                "factor them into a common superclass.",
            )
        )
    return LeafResult("anomaly.property_clumps", _clamp(price), tuple(findings))


def check_lazy_entities(onto: Ontology) -> LeafResult:
    leaf_classes = sorted(c for c in onto.classes if not onto.direct_subclasses(c))
    leaf_props = sorted(p for p in onto.properties if not onto.direct_subproperties(p))
    used = {a.objects[0] for a in onto.property_assertions()}
    lazy = [c for c in leaf_classes if not onto.instances_of(c, "direct")]
    lazy += [p for p in leaf_props if p not in used]
    findings = tuple(
        Finding("lazy_entity", (e,), f"{_short(e)} is never used: add instances/assertions, generalize, or remove it.")
        for e in lazy
    )
    return LeafResult("anomaly.lazy_entities", _ratio_ok(len(lazy), len(leaf_classes) + len(leaf_props)), findings)


Check = Callable[[Ontology], LeafResult]

CHECKS: dict[str, Check] = {
    "description.entity_existence": check_entity_existence,
    "description.instance_existence": check_instance_existence,
    "description.nl": check_natural_language,
    "description.formal_tbox": check_formal_description_tbox,
    "description.formal_abox": check_formal_description_abox,
    "partition.common_classes": check_common_classes,
    "partition.common_instances": check_common_instances,
    "partition.external_instances": check_external_instances,
    "partition.inverse_properties": check_inverse_properties,
    "partition.path_existence": check_path_existence,
    "partition.disjoint_recommendation": recommend_disjoint_axioms,
    "redundancy.identical_definition": check_identical_definition,
    "redundancy.hierarchy": check_hierarchy_redundancy,
    "consistency.circulatory": check_circulatory_errors,
    "anomaly.chain_of_inheritance": find_chain_of_inheritance,
    "anomaly.property_clumps": find_property_clumps,
    "anomaly.lazy_entities": check_lazy_entities,
}

CHECK_TITLES: dict[str, str] = {
    "description.entity_existence": "Declare classes and properties",
    "description.instance_existence": "Add instances to classes",
    "description.nl": "Describe entities in natural language",
    "description.formal_tbox": "Define property domains and ranges",
    "description.formal_abox": "Complete instance descriptions",
    "partition.common_classes": "Resolve classes under disjoint superclasses",
    "partition.common_instances": "Resolve instances of disjoint classes",
    "partition.external_instances": "Classify external instances",
    "partition.inverse_properties": "Define inverse properties",
    "partition.path_existence": "Connect concepts",
    "partition.disjoint_recommendation": "Declare disjoint sibling classes",
    "redundancy.identical_definition": "Merge synonymous entities",
    "redundancy.hierarchy": "Remove redundant hierarchy axioms",
    "consistency.circulatory": "Remove circulatory errors",
    "anomaly.chain_of_inheritance": "Collapse chains of inheritance",
    "anomaly.property_clumps": "Factor out property clumps",
    "anomaly.lazy_entities": "Use or remove lazy entities",
}


def run_all(onto: Ontology) -> dict[str, LeafResult]:
    return {cid: fn(onto) for cid, fn in CHECKS.items()}
