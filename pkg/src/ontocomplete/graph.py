"""Graphs derived from an ontology and the algorithms the checks share."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .model import AxiomKind, Iri, Ontology

log = logging.getLogger(__name__)

DEFAULT_BICLIQUE_CAP = 16


@dataclass(frozen=True)
class Digraph:
    nodes: frozenset[Iri]
    edges: frozenset[tuple[Iri, Iri]]

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge ({a}, {b}) has an endpoint outside the node set")

    @classmethod
    def of(cls, nodes: Iterable[Iri], edges: Iterable[tuple[Iri, Iri]]) -> "Digraph":
        return cls(frozenset(nodes), frozenset(edges))

    def order(self) -> list[Iri]:
        return sorted(self.nodes)

    def matrix(self) -> tuple[list[Iri], np.ndarray]:
        order = self.order()
        pos = {n: i for i, n in enumerate(order)}
        adj = np.zeros((len(order), len(order)), dtype=bool)
        for a, b in self.edges:
            adj[pos[a], pos[b]] = True
        return order, adj

    def successors(self) -> dict[Iri, set[Iri]]:
        out: dict[Iri, set[Iri]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            out[a].add(b)
        return out


@dataclass(frozen=True)
class UndirectedGraph:
    nodes: frozenset[Iri]
    edges: frozenset[frozenset[Iri]]

    def neighbours(self) -> dict[Iri, set[Iri]]:
        out: dict[Iri, set[Iri]] = {n: set() for n in self.nodes}
        for edge in self.edges:
            a, b = tuple(edge) if len(edge) == 2 else (next(iter(edge)),) * 2
            out[a].add(b)
            out[b].add(a)
        return out


@dataclass(frozen=True)
class BipartiteGraph:
    left: frozenset[Iri]
    right: frozenset[Iri]
    edges: frozenset[tuple[Iri, Iri]]

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.left or b not in self.right:
                raise ValueError(f"edge ({a}, {b}) does not connect left to right")

    def without(self, edges: Iterable[tuple[Iri, Iri]]) -> "BipartiteGraph":
        return BipartiteGraph(self.left, self.right, self.edges - frozenset(edges))


@dataclass(frozen=True, order=True)
class Biclique:
    classes: tuple[Iri, ...]
    properties: tuple[Iri, ...]

    @property
    def m(self) -> int:
        return len(self.classes)

    @property
    def n(self) -> int:
        return len(self.properties)

    def edges(self) -> set[tuple[Iri, Iri]]:
        return {(c, p) for c in self.classes for p in self.properties}


def _memo(ontology: Ontology, key: str, build):
    return ontology._cached(f"graph:{key}", build)


def class_hierarchy_graph(ontology: Ontology) -> Digraph:
    """Edge (C, D) for every asserted SubClassOf(C, D)."""
    return _memo(
        ontology,
        "classes",
        lambda: Digraph.of(
            ontology.classes,
            ((a.subject, a.objects[0]) for a in ontology.axioms_of_kind(AxiomKind.SUBCLASS_OF)),
        ),
    )


def property_hierarchy_graph(ontology: Ontology) -> Digraph:
    return _memo(
        ontology,
        "properties",
        lambda: Digraph.of(
            ontology.properties,
            ((a.subject, a.objects[0]) for a in ontology.axioms_of_kind(AxiomKind.SUBPROPERTY_OF)),
        ),
    )


def concept_graph(ontology: Ontology) -> UndirectedGraph:
    """Classes linked by subclass, equivalence/disjointness, and object-property domain-range pairs."""

    def build() -> UndirectedGraph:
        edges: set[frozenset[Iri]] = set()
        for kind in (AxiomKind.SUBCLASS_OF, AxiomKind.EQUIVALENT_CLASSES, AxiomKind.DISJOINT_CLASSES):
            for a in ontology.axioms_of_kind(kind):
                edges.add(frozenset((a.subject, a.objects[0])))
        for prop in ontology.object_properties:
            for d in ontology.domains(prop):
                for r in ontology.ranges(prop):
                    edges.add(frozenset((d, r)))
        return UndirectedGraph(ontology.classes, frozenset(edges))

    return _memo(ontology, "concepts", build)


def connected_components(graph: UndirectedGraph) -> list[frozenset[Iri]]:
    """Components, largest first; ties broken by smallest member."""
    nbrs = graph.neighbours()
    seen: set[Iri] = set()
    comps = []
    for start in sorted(graph.nodes):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            for v in nbrs[stack.pop()]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        comps.append(frozenset(comp))
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps


def cycles(graph: Digraph) -> set[frozenset[Iri]]:
    """Strongly connected components of size >= 2, plus self-loop nodes as singletons."""
    order, adj = graph.matrix()
    if not order:
        return set()
    labels = _kernels.scc_labels(adj)
    groups: dict[int, set[Iri]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), set()).add(order[i])
    found = {frozenset(g) for g in groups.values() if len(g) >= 2}
    found |= {frozenset((order[i],)) for i in range(len(order)) if adj[i, i]}
    return found


def reachability(graph: Digraph) -> frozenset[tuple[Iri, Iri]]:
    """Pairs (a, b) joined by a path of one or more edges."""
    order, adj = graph.matrix()
    if not order:
        return frozenset()
    reach = _kernels.transitive_closure(adj)
    rows, cols = np.nonzero(reach)
    return frozenset((order[i], order[j]) for i, j in zip(rows.tolist(), cols.tolist()))


def closure_matrix(graph: Digraph) -> tuple[list[Iri], np.ndarray]:
    order, adj = graph.matrix()
    return order, _kernels.transitive_closure(adj)


def property_attachment_graph(ontology: Ontology) -> BipartiteGraph:
    """Class-property links taken from asserted rdfs:domain axioms."""
    edges = frozenset(
        (a.objects[0], a.subject) for a in ontology.axioms_of_kind(AxiomKind.DOMAIN)
    )
    return BipartiteGraph(ontology.classes, ontology.properties, edges)  # type: ignore[arg-type]


def enumerate_maximal_bicliques(
    graph: BipartiteGraph,
    min_left: int = 2,
    min_right: int = 2,
    cap: int | None = DEFAULT_BICLIQUE_CAP,
) -> list[Biclique]:
    """Maximal complete bipartite subgraphs meeting the size thresholds.

    Property sides of maximal bicliques are exactly the non-empty
    intersections of class neighbourhoods; each is paired with every class
    containing it. ``cap`` limits how many properties of any one class are
    considered, which bounds the otherwise exponential family size.
    """
    if min_left < 1 or min_right < 1:
        raise ValueError("size thresholds must be positive")
    classes = sorted({c for c, _ in graph.edges})
    props = sorted({p for _, p in graph.edges})
    if not classes:
        return []
    cpos = {c: i for i, c in enumerate(classes)}
    ppos = {p: i for i, p in enumerate(props)}
    incidence = np.zeros((len(classes), len(props)), dtype=bool)
    for c, p in graph.edges:
        incidence[cpos[c], ppos[p]] = True

    seeds = incidence
    if cap is not None and (incidence.sum(axis=1) > cap).any():
        seeds = incidence.copy()
        for i in np.nonzero(incidence.sum(axis=1) > cap)[0]:
            keep = np.nonzero(incidence[i])[0][:cap]
            log.warning("class %s has %d attached properties; only the first %d seed bicliques", classes[i], incidence[i].sum(), cap)
            seeds[i] = False
            seeds[i, keep] = True

    family = _kernels.intersection_closure(_kernels.pack_rows(seeds))
    out = []
    for row in family:
        bits = _kernels.unpack_row(row, len(props))
        if bits.sum() < min_right:
            continue
        members = np.all(incidence[:, bits], axis=1)
        if members.sum() < min_left:
            continue
        out.append(
            Biclique(
                tuple(classes[i] for i in np.nonzero(members)[0]),
                tuple(props[j] for j in np.nonzero(bits)[0]),
            )
        )
    out.sort()
    return out


def is_complete(graph: BipartiteGraph, biclique: Biclique) -> bool:
    return biclique.edges() <= graph.edges
