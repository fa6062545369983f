"""Small builders shared by the test modules."""

from __future__ import annotations

from pathlib import Path

from ontocomplete.model import Ontology
from ontocomplete.parser import parse_ontology

NS = "http://x.org/#"
FIXTURES = Path(__file__).parent / "fixtures"


def iri(name: str) -> str:
    return NS + name


def ttl(body: str) -> str:
    return f"@prefix : <{NS}> .\n{body}"


def load(body: str) -> Ontology:
    """Parse a Turtle-subset body (``:`` bound to the test namespace); fail on errors."""
    result = parse_ontology(ttl(body))
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.ontology


def classes(*names: str) -> str:
    return "\n".join(f":{n} a owl:Class ." for n in names) + "\n"


def annotated(*names: str) -> str:
    return "\n".join(f':{n} rdfs:label "{n}"@en ; rdfs:comment "About {n}." .' for n in names) + "\n"


def random_ontology(rng, max_entities: int = 50) -> Ontology:
    """A random valid ontology with at most ``max_entities`` classes+properties+individuals."""
    from ontocomplete.model import Axiom, AxiomKind as K, Literal

    total = int(rng.integers(0, max_entities + 1))
    n_cls = int(rng.integers(0, total + 1))
    n_obj = int(rng.integers(0, total - n_cls + 1))
    n_dat = int(rng.integers(0, total - n_cls - n_obj + 1))
    n_ind = total - n_cls - n_obj - n_dat
    cls = [iri(f"C{i}") for i in range(n_cls)]
    obj = [iri(f"p{i}") for i in range(n_obj)]
    dat = [iri(f"d{i}") for i in range(n_dat)]
    ind = [iri(f"x{i}") for i in range(n_ind)]
    props = obj + dat

    def pick(seq):
        return seq[int(rng.integers(len(seq)))]

    axioms = []
    n_ax = int(rng.integers(0, 3 * max(total, 1) + 1))
    for _ in range(n_ax):
        r = rng.random()
        if cls and r < 0.25:
            axioms.append(Axiom.make(K.SUBCLASS_OF, pick(cls), pick(cls)))
        elif cls and r < 0.30:
            axioms.append(Axiom.make(K.DISJOINT_CLASSES, pick(cls), pick(cls)))
        elif cls and r < 0.33:
            axioms.append(Axiom.make(K.EQUIVALENT_CLASSES, pick(cls), pick(cls)))
        elif cls and ind and r < 0.50:
            axioms.append(Axiom.make(K.TYPE_ASSERTION, pick(ind), pick(cls)))
        elif props and cls and r < 0.58:
            axioms.append(Axiom.make(K.DOMAIN, pick(props), pick(cls)))
        elif obj and cls and r < 0.63:
            axioms.append(Axiom.make(K.RANGE, pick(obj), pick(cls)))
        elif dat and r < 0.65:
            axioms.append(Axiom.make(K.RANGE, pick(dat), "http://www.w3.org/2001/XMLSchema#string"))
        elif obj and r < 0.68:
            axioms.append(Axiom.make(K.INVERSE_OF, pick(obj), pick(obj)))
        elif len(obj) > 1 and r < 0.71:
            axioms.append(Axiom.make(K.SUBPROPERTY_OF, pick(obj), pick(obj)))
        elif obj and ind and r < 0.80:
            axioms.append(Axiom.make(K.PROPERTY_ASSERTION, pick(ind), pick(obj), pick(ind)))
        elif dat and ind and r < 0.84:
            axioms.append(Axiom.make(K.PROPERTY_ASSERTION, pick(ind), pick(dat), Literal(f"v{int(rng.integers(3))}")))
        elif cls and props and r < 0.88:
            kind = K.MIN_CARDINALITY if rng.random() < 0.5 else K.MAX_CARDINALITY
            axioms.append(Axiom.make(kind, pick(cls), pick(props), cardinality=int(rng.integers(0, 3))))
        else:
            names = cls + props + ind
            if names:
                kind = K.LABEL if rng.random() < 0.5 else K.COMMENT
                lang = [None, "en", "de"][int(rng.integers(3))]
                axioms.append(Axiom.make(kind, pick(names), Literal("text", lang)))
    return Ontology.build(cls, obj, dat, ind, axioms)


def random_tree(rng, max_depth: int = 4, max_leaves: int = 30):
    """A random condition tree over synthetic check ids ``t.l<k>``; returns (tree, check_ids)."""
    from ontocomplete.octree import ConditionNode

    counter = [0]

    def build(path: str, depth: int, budget: int) -> ConditionNode:
        if depth >= max_depth or budget <= 1 or rng.random() < 0.3:
            cid = f"t.l{counter[0]}"
            counter[0] += 1
            return ConditionNode(f"{path}/l{counter[0] - 1}", check_id=cid)
        k = int(rng.integers(1, min(4, budget) + 1))
        shares = [budget // k] * k
        children = []
        for i, share in enumerate(shares):
            children.append((build(f"{path}/n{i}", depth + 1, max(1, share)), float(rng.uniform(0.1, 3.0))))
        return ConditionNode(path, tuple(children))

    tree = build("oc", 0, int(rng.integers(1, max_leaves + 1)))
    if tree.is_leaf:
        tree = ConditionNode("oc", ((tree, 1.0),))
    return tree, [n.check_id for n in tree.leaves()]


def constant_checks(scores: dict):
    """Mock checks returning fixed scores."""
    from ontocomplete.checks import LeafResult

    return {cid: (lambda s, c: (lambda _o: LeafResult(c, s)))(s, cid) for cid, s in scores.items()}
