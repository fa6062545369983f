"""In-memory ontology snapshot: TBox, RBox and ABox plus the query helpers checks rely on."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Literal as TLiteral, Mapping, Union

Iri = str

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"

# Datatype IRIs are the only undeclared terms allowed in an axiom (data property ranges).
DATATYPE_NAMESPACES = (XSD,)
BUILTIN_DATATYPES = frozenset({RDFS + "Literal", RDF + "langString", RDF + "PlainLiteral"})


def is_datatype(iri: Iri) -> bool:
    return iri in BUILTIN_DATATYPES or iri.startswith(DATATYPE_NAMESPACES)


class OntologyError(ValueError):
    """Raised when a snapshot would violate a model invariant."""


class UnknownIriError(LookupError):
    def __init__(self, iri: Iri):
        super().__init__(f"unknown IRI: {iri}")
        self.iri = iri


class EntityKind(str, Enum):
    CLASS = "Class"
    OBJECT_PROPERTY = "ObjectProperty"
    DATA_PROPERTY = "DataProperty"


class AxiomKind(str, Enum):
    SUBCLASS_OF = "SubClassOf"
    EQUIVALENT_CLASSES = "EquivalentClasses"
    DISJOINT_CLASSES = "DisjointClasses"
    SUBPROPERTY_OF = "SubPropertyOf"
    EQUIVALENT_PROPERTIES = "EquivalentProperties"
    INVERSE_OF = "InverseOf"
    DOMAIN = "Domain"
    RANGE = "Range"
    TYPE_ASSERTION = "TypeAssertion"
    PROPERTY_ASSERTION = "PropertyAssertion"
    MIN_CARDINALITY = "MinCardinality"
    MAX_CARDINALITY = "MaxCardinality"
    LABEL = "Label"
    COMMENT = "Comment"


AXIOM_ORDER = {kind: i for i, kind in enumerate(AxiomKind)}

# Stored as a normalized (lexicographically ordered) pair, queried from either side.
SYMMETRIC_KINDS = frozenset(
    {
        AxiomKind.EQUIVALENT_CLASSES,
        AxiomKind.DISJOINT_CLASSES,
        AxiomKind.EQUIVALENT_PROPERTIES,
        AxiomKind.INVERSE_OF,
    }
)
ANNOTATION_KINDS = frozenset({AxiomKind.LABEL, AxiomKind.COMMENT})
HIERARCHY_KINDS = frozenset(
    {AxiomKind.SUBCLASS_OF, AxiomKind.SUBPROPERTY_OF, AxiomKind.TYPE_ASSERTION}
)


@dataclass(frozen=True, order=True)
class Literal:
    """Opaque literal; only the language tag is interpreted."""

    value: str
    lang: str | None = None

    def is_english(self) -> bool:
        return self.lang is None or self.lang.lower().split("-")[0] == "en"


Term = Union[Iri, Literal]


def _term_key(term: Term) -> tuple:
    if isinstance(term, Literal):
        return (1, term.value, term.lang or "")
    return (0, term, "")


@dataclass(frozen=True)
class Entity:
    iri: Iri
    kind: EntityKind


@dataclass(frozen=True)
class Individual:
    iri: Iri
    types: frozenset[Iri] = frozenset()


@dataclass(frozen=True)
class Axiom:
    """One asserted axiom.

    ``objects`` holds one Iri (most kinds), the property Iri for cardinality
    restrictions, a single :class:`Literal` for annotations, or
    ``(property, target)`` for property assertions.
    """

    kind: AxiomKind
    subject: Iri
    objects: tuple[Term, ...]
    cardinality: int | None = None

    @classmethod
    def make(
        cls, kind: AxiomKind, subject: Iri, *objects: Term, cardinality: int | None = None
    ) -> "Axiom":
        kind = AxiomKind(kind)
        if kind in SYMMETRIC_KINDS:
            (other,) = objects
            subject, other = sorted((subject, other))
            objects = (other,)
        return cls(kind, subject, tuple(objects), cardinality)

    @property
    def lang(self) -> str | None:
        if self.kind in ANNOTATION_KINDS:
            return self.objects[0].lang  # type: ignore[union-attr]
        return None

    @property
    def object(self) -> Term:
        return self.objects[-1]

    def mentions(self, iri: Iri) -> bool:
        """True when the axiom is asserted *about* ``iri`` (its subject, or either side of a symmetric pair)."""
        if self.subject == iri:
            return True
        return self.kind in SYMMETRIC_KINDS and self.objects[0] == iri

    def iris(self) -> Iterable[Iri]:
        yield self.subject
        for term in self.objects:
            if not isinstance(term, Literal):
                yield term

    def sort_key(self) -> tuple:
        return (
            AXIOM_ORDER[self.kind],
            self.subject,
            tuple(_term_key(t) for t in self.objects),
            -1 if self.cardinality is None else self.cardinality,
        )

    def __str__(self) -> str:
        args = ", ".join([self.subject, *(repr(t.value) if isinstance(t, Literal) else t for t in self.objects)])
        if self.cardinality is not None:
            args += f", {self.cardinality}"
        return f"{self.kind.value}({args})"


@dataclass(frozen=True)
class ElementCounts:
    classes: int
    properties: int
    axioms: int
    individuals: int

    def as_dict(self) -> dict[str, int]:
        return {
            "classes": self.classes,
            "properties": self.properties,
            "axioms": self.axioms,
            "individuals": self.individuals,
        }


@dataclass(frozen=True, eq=False)
class Ontology:
    """Immutable snapshot. Build through :meth:`build`, which validates every invariant."""

    classes: frozenset[Iri]
    object_properties: frozenset[Iri]
    data_properties: frozenset[Iri]
    individuals: frozenset[Individual]
    axioms: frozenset[Axiom]
    # extra occurrences of axioms asserted more than once
    duplicates: Mapping[Axiom, int] = field(default_factory=dict)
    _index: dict = field(default_factory=dict, repr=False)

    # --- construction -------------------------------------------------

    @classmethod
    def build(
        cls,
        classes: Iterable[Iri] = (),
        object_properties: Iterable[Iri] = (),
        data_properties: Iterable[Iri] = (),
        individuals: Iterable[Iri] = (),
        axioms: Iterable[Axiom] = (),
    ) -> "Ontology":
        classes = frozenset(classes)
        object_properties = frozenset(object_properties)
        data_properties = frozenset(data_properties)
        individual_iris = frozenset(individuals)

        kinds: dict[Iri, str] = {}
        for label, group in (
            ("Class", classes),
            ("ObjectProperty", object_properties),
            ("DataProperty", data_properties),
            ("Individual", individual_iris),
        ):
            for iri in group:
                if not iri:
                    raise OntologyError("empty IRI")
                if iri in kinds:
                    raise OntologyError(f"{iri} declared as both {kinds[iri]} and {label}")
                kinds[iri] = label

        counts = Counter(Axiom.make(a.kind, a.subject, *a.objects, cardinality=a.cardinality) for a in axioms)
        for axiom in counts:
            _validate_axiom(axiom, kinds)

        types: dict[Iri, set[Iri]] = defaultdict(set)
        for axiom in counts:
            if axiom.kind is AxiomKind.TYPE_ASSERTION:
                types[axiom.subject].add(axiom.objects[0])  # type: ignore[arg-type]
        return cls(
            classes=classes,
            object_properties=object_properties,
            data_properties=data_properties,
            individuals=frozenset(Individual(i, frozenset(types.get(i, ()))) for i in individual_iris),
            axioms=frozenset(counts),
            duplicates={a: n - 1 for a, n in counts.items() if n > 1},
        )

    def with_axioms(self, *axioms: Axiom, individuals: Iterable[Iri] = ()) -> "Ontology":
        """A new snapshot with extra axioms (and optionally extra individuals)."""
        return Ontology.build(
            self.classes,
            self.object_properties,
            self.data_properties,
            self.individual_iris | frozenset(individuals),
            [*self.axiom_occurrences(), *axioms],
        )

    def without_axioms(self, *axioms: Axiom) -> "Ontology":
        drop = {Axiom.make(a.kind, a.subject, *a.objects, cardinality=a.cardinality) for a in axioms}
        return Ontology.build(
            self.classes,
            self.object_properties,
            self.data_properties,
            self.individual_iris,
            [a for a in self.axiom_occurrences() if a not in drop],
        )

    # --- equality -----------------------------------------------------

    def _key(self) -> tuple:
        return (
            self.classes,
            self.object_properties,
            self.data_properties,
            self.individuals,
            self.axioms,
            frozenset(self.duplicates.items()),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    # --- basic views --------------------------------------------------

    @property
    def properties(self) -> frozenset[Iri]:
        return self.object_properties | self.data_properties

    @property
    def individual_iris(self) -> frozenset[Iri]:
        return self._cached("individual_iris", lambda: frozenset(i.iri for i in self.individuals))

    def axiom_occurrences(self) -> list[Axiom]:
        """Every asserted axiom, repeated once per occurrence."""
        out = []
        for axiom in self.axioms:
            out.extend([axiom] * (1 + self.duplicates.get(axiom, 0)))
        return out

    def element_counts(self) -> ElementCounts:
        return ElementCounts(
            classes=len(self.classes),
            properties=len(self.properties),
            axioms=len(self.axioms),
            individuals=len(self.individuals),
        )

    def kind_of(self, iri: Iri) -> str:
        if iri in self.classes:
            return EntityKind.CLASS.value
        if iri in self.object_properties:
            return EntityKind.OBJECT_PROPERTY.value
        if iri in self.data_properties:
            return EntityKind.DATA_PROPERTY.value
        if iri in self.individual_iris:
            return "Individual"
        raise UnknownIriError(iri)

    def is_declared(self, iri: Iri) -> bool:
        return (
            iri in self.classes
            or iri in self.object_properties
            or iri in self.data_properties
            or iri in self.individual_iris
        )

    def _require(self, iri: Iri, group: frozenset[Iri] | None = None) -> None:
        if not (self.is_declared(iri) if group is None else iri in group):
            raise UnknownIriError(iri)

    def _cached(self, key: str, build):
        try:
            return self._index[key]
        except KeyError:
            value = self._index[key] = build()
            return value

    # --- indexes ------------------------------------------------------

    def axioms_of_kind(self, kind: AxiomKind) -> list[Axiom]:
        by_kind = self._cached("by_kind", self._group_by_kind)
        return by_kind.get(AxiomKind(kind), [])

    def _group_by_kind(self) -> dict[AxiomKind, list[Axiom]]:
        out: dict[AxiomKind, list[Axiom]] = defaultdict(list)
        for axiom in sorted(self.axioms, key=Axiom.sort_key):
            out[axiom.kind].append(axiom)
        return dict(out)

    def _about_index(self) -> dict[Iri, frozenset[Axiom]]:
        out: dict[Iri, set[Axiom]] = defaultdict(set)
        for axiom in self.axioms:
            out[axiom.subject].add(axiom)
            if axiom.kind in SYMMETRIC_KINDS:
                out[axiom.objects[0]].add(axiom)  # type: ignore[index]
        return {k: frozenset(v) for k, v in out.items()}

    def _edges(self, kind: AxiomKind) -> tuple[dict[Iri, set[Iri]], dict[Iri, set[Iri]]]:
        down: dict[Iri, set[Iri]] = defaultdict(set)
        up: dict[Iri, set[Iri]] = defaultdict(set)
        for axiom in self.axioms_of_kind(kind):
            sup = axiom.objects[0]
            up[axiom.subject].add(sup)  # type: ignore[arg-type]
            down[sup].add(axiom.subject)  # type: ignore[index]
        return down, up

    # --- queries --------------------------------------------------------

    def asserted_axioms(self, iri: Iri, *, without_subclass: bool = False) -> frozenset[Axiom]:
        """Axioms asserted about ``iri``; ``without_subclass`` drops its SubClassOf axioms."""
        self._require(iri)
        found = self._cached("about", self._about_index).get(iri, frozenset())
        if without_subclass:
            return frozenset(a for a in found if not (a.kind is AxiomKind.SUBCLASS_OF and a.subject == iri))
        return found

    def direct_subclasses(self, cls: Iri) -> frozenset[Iri]:
        self._require(cls, self.classes)
        down, _ = self._cached("subclass_edges", lambda: self._edges(AxiomKind.SUBCLASS_OF))
        return frozenset(down.get(cls, ()))

    def direct_superclasses(self, cls: Iri) -> frozenset[Iri]:
        self._require(cls, self.classes)
        _, up = self._cached("subclass_edges", lambda: self._edges(AxiomKind.SUBCLASS_OF))
        return frozenset(up.get(cls, ()))

    def direct_subproperties(self, prop: Iri) -> frozenset[Iri]:
        self._require(prop, self.properties)
        down, _ = self._cached("subproperty_edges", lambda: self._edges(AxiomKind.SUBPROPERTY_OF))
        return frozenset(down.get(prop, ()))

    def direct_superproperties(self, prop: Iri) -> frozenset[Iri]:
        self._require(prop, self.properties)
        _, up = self._cached("subproperty_edges", lambda: self._edges(AxiomKind.SUBPROPERTY_OF))
        return frozenset(up.get(prop, ()))

    def subclasses_closure(self, cls: Iri) -> frozenset[Iri]:
        """All classes reachable downwards from ``cls`` (excluding ``cls`` unless it sits on a cycle)."""
        self._require(cls, self.classes)
        memo = self._cached("subclass_closure", dict)
        if cls not in memo:
            seen: set[Iri] = set()
            stack = list(self.direct_subclasses(cls))
            while stack:
                c = stack.pop()
                if c not in seen:
                    seen.add(c)
                    stack.extend(self.direct_subclasses(c))
            memo[cls] = frozenset(seen)
        return memo[cls]

    def superclasses_closure(self, cls: Iri) -> frozenset[Iri]:
        self._require(cls, self.classes)
        memo = self._cached("superclass_closure", dict)
        if cls not in memo:
            seen: set[Iri] = set()
            stack = list(self.direct_superclasses(cls))
            while stack:
                c = stack.pop()
                if c not in seen:
                    seen.add(c)
                    stack.extend(self.direct_superclasses(c))
            memo[cls] = frozenset(seen)
        return memo[cls]

    def types_of(self, individual: Iri, *, inherited: bool = False) -> frozenset[Iri]:
        self._require(individual, self.individual_iris)
        direct = self._cached("types", lambda: {i.iri: i.types for i in self.individuals})[individual]
        if not inherited:
            return direct
        out = set(direct)
        for t in direct:
            out |= self.superclasses_closure(t)
        return frozenset(out)

    def instances_of(self, cls: Iri, mode: TLiteral["direct", "inherited"] = "direct") -> frozenset[Iri]:
        self._require(cls, self.classes)
        direct = self._cached("direct_instances", self._direct_instances)
        if mode == "direct":
            return direct.get(cls, frozenset())
        if mode != "inherited":
            raise ValueError(f"mode must be 'direct' or 'inherited', got {mode!r}")
        out = set(direct.get(cls, ()))
        for sub in self.subclasses_closure(cls):
            out |= direct.get(sub, frozenset())
        return frozenset(out)

    def _direct_instances(self) -> dict[Iri, frozenset[Iri]]:
        out: dict[Iri, set[Iri]] = defaultdict(set)
        for axiom in self.axioms_of_kind(AxiomKind.TYPE_ASSERTION):
            out[axiom.objects[0]].add(axiom.subject)  # type: ignore[index]
        return {k: frozenset(v) for k, v in out.items()}

    def property_assertions(self, prop: Iri | None = None) -> list[Axiom]:
        found = self.axioms_of_kind(AxiomKind.PROPERTY_ASSERTION)
        if prop is None:
            return found
        return [a for a in found if a.objects[0] == prop]

    def disjoint_pairs(self) -> frozenset[frozenset[Iri]]:
        return self._cached(
            "disjoint_pairs",
            lambda: frozenset(
                frozenset((a.subject, a.objects[0]))  # type: ignore[arg-type]
                for a in self.axioms_of_kind(AxiomKind.DISJOINT_CLASSES)
            ),
        )

    def domains(self, prop: Iri) -> frozenset[Iri]:
        return frozenset(a.objects[0] for a in self.asserted_axioms(prop) if a.kind is AxiomKind.DOMAIN)  # type: ignore[misc]

    def ranges(self, prop: Iri) -> frozenset[Iri]:
        return frozenset(a.objects[0] for a in self.asserted_axioms(prop) if a.kind is AxiomKind.RANGE)  # type: ignore[misc]


def asserted_axioms(ontology: Ontology, iri: Iri, *, without_subclass: bool = False) -> frozenset[Axiom]:
    return ontology.asserted_axioms(iri, without_subclass=without_subclass)


def direct_subclasses(ontology: Ontology, cls: Iri) -> frozenset[Iri]:
    return ontology.direct_subclasses(cls)


def instances_of(ontology: Ontology, cls: Iri, mode: str = "direct") -> frozenset[Iri]:
    return ontology.instances_of(cls, mode)  # type: ignore[arg-type]


_CLASS = "Class"
_PROPS = ("ObjectProperty", "DataProperty")
_ANY = ("Class", "ObjectProperty", "DataProperty", "Individual")

# kind -> (subject kinds, object kinds)
_SIGNATURES: dict[AxiomKind, tuple[tuple[str, ...], tuple[str, ...]]] = {
    AxiomKind.SUBCLASS_OF: ((_CLASS,), (_CLASS,)),
    AxiomKind.EQUIVALENT_CLASSES: ((_CLASS,), (_CLASS,)),
    AxiomKind.DISJOINT_CLASSES: ((_CLASS,), (_CLASS,)),
    AxiomKind.INVERSE_OF: (("ObjectProperty",), ("ObjectProperty",)),
    AxiomKind.DOMAIN: (_PROPS, (_CLASS,)),
    AxiomKind.TYPE_ASSERTION: (("Individual",), (_CLASS,)),
    AxiomKind.MIN_CARDINALITY: ((_CLASS,), _PROPS),
    AxiomKind.MAX_CARDINALITY: ((_CLASS,), _PROPS),
}


def _validate_axiom(axiom: Axiom, kinds: Mapping[Iri, str]) -> None:
    def kind(iri: Term) -> str:
        if isinstance(iri, Literal):
            return "Literal"
        if iri not in kinds:
            raise OntologyError(f"{axiom}: {iri} is not declared")
        return kinds[iri]

    k = axiom.kind
    subj = kind(axiom.subject)
    if k in ANNOTATION_KINDS:
        if len(axiom.objects) != 1 or not isinstance(axiom.objects[0], Literal):
            raise OntologyError(f"{axiom}: annotation value must be a literal")
        return
    if (k in (AxiomKind.MIN_CARDINALITY, AxiomKind.MAX_CARDINALITY)) != (axiom.cardinality is not None):
        raise OntologyError(f"{axiom}: cardinality value only on cardinality axioms")
    if axiom.cardinality is not None and axiom.cardinality < 0:
        raise OntologyError(f"{axiom}: negative cardinality")
    if k is AxiomKind.PROPERTY_ASSERTION:
        if len(axiom.objects) != 2 or subj != "Individual":
            raise OntologyError(f"{axiom}: property assertion needs individual, property, value")
        prop, target = axiom.objects
        pk = kind(prop)
        if pk == "ObjectProperty":
            if kind(target) != "Individual":
                raise OntologyError(f"{axiom}: object property value must be an individual")
        elif pk == "DataProperty":
            if not isinstance(target, Literal):
                raise OntologyError(f"{axiom}: data property value must be a literal")
        else:
            raise OntologyError(f"{axiom}: {prop} is not a property")
        return
    if len(axiom.objects) != 1:
        raise OntologyError(f"{axiom}: expected exactly one object")
    obj = axiom.objects[0]
    if k in (AxiomKind.SUBPROPERTY_OF, AxiomKind.EQUIVALENT_PROPERTIES):
        if subj not in _PROPS or kind(obj) != subj:
            raise OntologyError(f"{axiom}: both sides must be properties of the same kind")
        return
    if k is AxiomKind.RANGE:
        if subj == "ObjectProperty" and kind(obj) == _CLASS:
            return
        if subj == "DataProperty" and isinstance(obj, str) and is_datatype(obj):
            return
        raise OntologyError(f"{axiom}: range must be a class (object property) or datatype (data property)")
    subjects, objects = _SIGNATURES[k]
    if subj not in subjects or kind(obj) not in objects:
        raise OntologyError(f"{axiom}: expected {'/'.join(subjects)} -> {'/'.join(objects)}")
