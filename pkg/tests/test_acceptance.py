"""The twelve acceptance criteria, each at full scale and stated tolerance.

Run alone with ``pytest tests/test_acceptance.py``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np
import pytest

from helpers import FIXTURES, iri, random_ontology, random_tree, ttl
from ontocomplete import _kernels, checks, graph
from ontocomplete.advisor import gate_phase, project_gain, recommend_improvements
from ontocomplete.checks import CHECKS
from ontocomplete.graph import BipartiteGraph, Digraph
from ontocomplete.model import Axiom, AxiomKind as K, Ontology
from ontocomplete.octree import Phase, WeightProfile, builtin_profiles, default_tree, evaluate
from ontocomplete.parser import parse_ontology, serialize_ontology
from ontocomplete.replay import load_snapshots, replay
from ontocomplete.report import report_schema, to_json
from test_checks import brute_sibling_pairs, transitive_oracle
from test_graph import cycle_oracle, powerset_bicliques
from test_octree import path_product

EMPTY = Ontology.build()


def parse_file(path):
    result = parse_ontology(path.read_text(encoding="utf-8"))
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.ontology


def depth(node):
    return 0 if node.is_leaf else 1 + max(depth(c) for c, _ in node.children)


def fixed_scores(scores):
    return {cid: (lambda s, c: (lambda _o: checks.LeafResult(c, s)))(s, cid) for cid, s in scores.items()}


# 1 ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "recursive evaluation equals flat weighted sum (1,000 trees, < 5 s)")
def test_c01_recursion_equals_flat_sum():
    rng = np.random.default_rng(2024)
    cases = []
    for _ in range(1000):
        tree, ids = random_tree(rng, max_depth=4, max_leaves=30)
        assert depth(tree) <= 4 and len(ids) <= 30
        weights = {n.path: float(rng.uniform(0.05, 5.0)) for n in tree.walk() if n.path != "oc"}
        scores = {cid: float(rng.random()) for cid in ids}
        cases.append((tree, WeightProfile(None, weights), scores))

    start = time.perf_counter()
    results = [evaluate(tree, prof, EMPTY, fixed_scores(scores)) for tree, prof, scores in cases]
    elapsed = time.perf_counter() - start

    for (tree, prof, scores), res in zip(cases, results):
        flat = sum(path_product(tree, prof, n.path) * scores[n.check_id] for n in tree.leaves())
        assert abs(res.oc - flat) < 1e-9
    assert elapsed < 5.0


# 2 ---------------------------------------------------------------------------

CHAIN_MIDS = ["Security", "Debt", "FixedIncome"]


@pytest.mark.criterion(2, "chain of inheritance fixture scores 0.25; broken chains score 1.0")
def test_c02_chain_trace():
    text = (FIXTURES / "chain.ttl").read_text()
    chain = CHECKS["anomaly.chain_of_inheritance"]
    onto = parse_ontology(text).ontology
    subclass_axioms = [a for a in onto.axioms if a.kind is K.SUBCLASS_OF]
    assert len(subclass_axioms) == 4
    res = chain(onto)
    assert res.score == 1 - 3 / 4 == 0.25
    (finding,) = res.findings
    assert finding.subjects == tuple(iri(n) for n in ["Instrument", "Bond", *CHAIN_MIDS])

    for mid in CHAIN_MIDS:
        extra_super = text + f":Other a owl:Class .\n:{mid} rdfs:subClassOf :Other .\n"
        annotated = text + f':{mid} rdfs:label "{mid}"@en .\n'
        assert chain(parse_ontology(extra_super).ontology).score == 1.0, mid
        assert chain(parse_ontology(annotated).ontology).score == 1.0, mid


# 3 ---------------------------------------------------------------------------


def random_bipartite(rng):
    left = [f"C{i}" for i in range(int(rng.integers(1, 9)))]
    right = [f"p{j}" for j in range(int(rng.integers(1, 9)))]
    dens = rng.uniform(0.2, 0.9)
    return left, right, frozenset((c, p) for c in left for p in right if rng.random() < dens)


@pytest.mark.criterion(3, "property clumps: 3x3 scores 0.0, K22 scores 1.0, bicliques match subset search")
def test_c03_clump_trace():
    clumps = CHECKS["anomaly.property_clumps"]
    res = clumps(parse_file(FIXTURES / "clump_3x3.ttl"))
    assert res.score == 0.0
    (finding,) = res.findings
    names = {s.rsplit("#", 1)[1] for s in finding.subjects}
    assert names == {"Stock", "Bond", "Fund", "isin", "currency", "issuer"}
    assert clumps(parse_file(FIXTURES / "clump_k22.ttl")).score == 1.0

    rng = np.random.default_rng(3)
    for _ in range(100):
        left, right, edges = random_bipartite(rng)
        b = BipartiteGraph(frozenset(left), frozenset(right), edges)
        got = graph.enumerate_maximal_bicliques(b, 2, 2, cap=None)
        assert {(frozenset(x.classes), frozenset(x.properties)) for x in got} == powerset_bicliques(left, right, edges)


# 4 ---------------------------------------------------------------------------


@pytest.mark.criterion(4, "disjoint recommendation identity on 100 random class trees")
def test_c04_disjoint_identity():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(2, 16))
        cls = [iri(f"C{i:02d}") for i in range(n)]
        parent_of = {cls[i]: {cls[int(rng.integers(0, i))]} for i in range(1, n)}
        inds = [iri(f"x{j}") for j in range(int(rng.integers(0, 25)))]
        types = {x: {cls[int(t)] for t in rng.choice(n, size=int(rng.integers(1, 3)))} for x in inds}
        axioms = [Axiom.make(K.SUBCLASS_OF, c, p) for c, ps in parent_of.items() for p in ps]
        axioms += [Axiom.make(K.TYPE_ASSERTION, x, t) for x, ts in types.items() for t in ts]
        declared = set()
        for _ in range(int(rng.integers(0, 4))):
            a, b = rng.choice(n, size=2, replace=False)
            axioms.append(Axiom.make(K.DISJOINT_CLASSES, cls[a], cls[b]))
            declared.add(frozenset((cls[a], cls[b])))
        onto = Ontology.build(cls, [], [], inds, axioms)

        below = {c: {c} for c in cls}
        for c in reversed(cls):  # parents always have smaller indices
            for p in parent_of.get(c, ()):
                below[p] |= below[c]
        extent = {c: {x for x, ts in types.items() if ts & below[c]} for c in cls}

        tau = brute_sibling_pairs(parent_of)
        rec = {
            (a, b)
            for a, b in tau
            if extent[a] and extent[b] and not extent[a] & extent[b] and frozenset((a, b)) not in declared
        }
        res = checks.recommend_disjoint_axioms(onto)
        assert {f.subjects for f in res.findings if f.penalized} == rec
        assert res.score == (1 - len(rec) / len(tau) if tau else 1.0)


# 5 ---------------------------------------------------------------------------


@pytest.mark.criterion(5, "cycle detection matches all-cycles DFS on 500 random digraphs")
def test_c05_cycles():
    assert graph.cycles(Digraph.of(["A"], [("A", "A")])) == {frozenset("A")}
    assert graph.cycles(Digraph.of("AB", [("A", "B"), ("B", "A")])) == {frozenset("AB")}
    ring = [f"C{i}" for i in range(7)]
    assert graph.cycles(Digraph.of(ring, [(ring[i], ring[(i + 1) % 7]) for i in range(7)])) == {frozenset(ring)}

    rng = np.random.default_rng(5)
    for _ in range(500):
        n = int(rng.integers(1, 13))
        adj = rng.random((n, n)) < rng.uniform(0.03, 0.3)
        nodes = [f"n{i:02d}" for i in range(n)]
        g = Digraph.of(nodes, [(nodes[i], nodes[j]) for i, j in zip(*np.nonzero(adj))])
        assert graph.cycles(g) == {frozenset(nodes[i] for i in grp) for grp in cycle_oracle(n, adj)}


# 6 ---------------------------------------------------------------------------


@pytest.mark.criterion(6, "hierarchy redundancy flags exactly injected and duplicate edges (200 DAGs)")
def test_c06_hierarchy_redundancy():
    rng = np.random.default_rng(6)
    redundancy = CHECKS["redundancy.hierarchy"]
    for _ in range(200):
        n = int(rng.integers(3, 20))
        cls = [iri(f"C{i:02d}") for i in range(n)]
        base = {(i, int(rng.integers(0, i))) for i in range(1, n) if rng.random() < 0.85}
        reach = transitive_oracle(n, base)
        candidates = [(a, b) for a in range(n) for b in range(n) if reach[a, b] and (a, b) not in base]
        k = min(int(rng.integers(0, 5)), len(candidates))
        injected = {candidates[int(i)] for i in rng.choice(len(candidates), size=k, replace=False)} if k else set()
        dups = [e for e in sorted(base) if rng.random() < 0.1]
        axioms = [Axiom.make(K.SUBCLASS_OF, cls[a], cls[b]) for a, b in [*base, *injected, *dups]]
        res = redundancy(Ontology.build(cls, [], [], [], axioms))
        implied = {f.subjects for f in res.findings if f.kind.startswith("implied")}
        duplicate = sorted(f.subjects for f in res.findings if f.kind.startswith("duplicate"))
        assert implied == {(cls[a], cls[b]) for a, b in injected}
        assert duplicate == sorted((cls[a], cls[b]) for a, b in dups)


# 7 ---------------------------------------------------------------------------

# Leaf scores counted by hand from each fixture; every other leaf scores 1.
HAND_SCORES = {
    "oc_0913.ttl": {
        "description.nl": 6 / 7,  # Asset and Stock lack comments
        "partition.disjoint_recommendation": 0.0,  # one sibling pair, not declared disjoint
        "redundancy.identical_definition": 1 - 2 / 10,  # Stock and Bond now identical
        "description.formal_tbox": 2 / 3,  # ticker lacks domain and range
    },
    "oc_0765.ttl": {
        "description.nl": 2.5 / 7,
        "partition.disjoint_recommendation": 0.0,
        "redundancy.identical_definition": 1 - 2 / 10,
        "description.formal_tbox": 2 / 3,  # issues lacks domain and range
        "partition.inverse_properties": 0.0,
        "description.formal_abox": 2 / 3,  # acme carries ticker outside its domain
    },
}


@pytest.mark.criterion(7, "gate advances at oc 0.913 and holds at oc 0.765 in phase 2.5")
@pytest.mark.parametrize("name,target,advance", [("oc_0913.ttl", 0.913, True), ("oc_0765.ttl", 0.765, False)])
def test_c07_gate(name, target, advance):
    tree = default_tree()
    profile = builtin_profiles(tree)[Phase.DETAIL_DESCRIPTION]
    onto = parse_file(FIXTURES / "gate" / name)
    res = evaluate(tree, profile, onto)

    hand = HAND_SCORES[name]
    for n in tree.leaves():
        assert res.leaf_score(n.check_id) == pytest.approx(hand.get(n.check_id, 1.0), abs=1e-12), n.check_id
    expected = sum(path_product(tree, profile, n.path) * hand.get(n.check_id, 1.0) for n in tree.leaves())

    assert abs(expected - target) <= 0.0005
    assert abs(res.oc - target) <= 0.0005
    assert res.oc == pytest.approx(expected, abs=1e-12)
    decision = gate_phase(res, Phase.DETAIL_DESCRIPTION, 0.80)
    assert decision.advance is advance
    if advance:
        assert decision.next_phase is Phase.RESTRICTIONS_AND_RULES


# 8 ---------------------------------------------------------------------------


@pytest.mark.criterion(8, "replay: counts never shrink and oc drops after every phase transition")
def test_c08_replay_fluctuation():
    docs, _ = load_snapshots(FIXTURES / "replay12")
    assert len(docs) == 12
    records = replay(docs)
    transitions = [r.iteration for r in records[:-1] if r.gate_fired]
    assert len(transitions) >= 2
    for prev, cur in zip(records, records[1:]):
        for field in ("classes", "properties", "axioms", "individuals"):
            assert getattr(cur.counts, field) >= getattr(prev.counts, field)
        if prev.gate_fired:
            assert cur.phase is not prev.phase
            assert cur.oc < prev.oc


# 9 ---------------------------------------------------------------------------


@pytest.mark.criterion(9, "1,000 random ontologies: scores in [0,1], deterministic, concurrency-safe")
def test_c09_score_fuzz():
    tree = default_tree()
    profile = builtin_profiles(tree)[Phase.POST_DEVELOPMENT]
    rng = np.random.default_rng(9)
    ontos = [random_ontology(rng, 50) for _ in range(1000)]
    for onto in ontos:
        assert len(onto.classes | onto.properties | onto.individual_iris) <= 50
        first = checks.run_all(onto)
        assert first == checks.run_all(onto)
        assert all(0.0 <= r.score <= 1.0 for r in first.values())
        seq = evaluate(tree, profile, onto)
        par = evaluate(tree, profile, onto, max_workers=8)
        assert seq.oc == par.oc and seq.leaf_results == par.leaf_results
        assert 0.0 <= seq.oc <= 1.0
    # whole ontologies evaluated from several threads at once
    with ThreadPoolExecutor(max_workers=8) as pool:
        concurrent = list(pool.map(lambda o: evaluate(tree, profile, o).oc, ontos[:200]))
    assert concurrent == [evaluate(tree, profile, o).oc for o in ontos[:200]]


# 10 --------------------------------------------------------------------------


@pytest.mark.criterion(10, "advisor gains sum to the oc deficit; projections are linear (200 evaluations)")
def test_c10_advisor_algebra():
    rng = np.random.default_rng(10)
    for _ in range(200):
        tree, ids = random_tree(rng)
        weights = {n.path: float(rng.choice([0.0, rng.uniform(0.1, 3)], p=[0.1, 0.9])) for n in tree.walk() if n.path != "oc"}
        for node in tree.walk():
            if node.children and all(weights[c.path] == 0 for c, _ in node.children):
                weights[node.children[0][0].path] = 1.0
        scores = {cid: float(rng.choice([1.0, rng.random()], p=[0.2, 0.8])) for cid in ids}
        prof = WeightProfile(None, weights)
        res = evaluate(tree, prof, EMPTY, fixed_scores(scores))
        actions = recommend_improvements(res)
        assert abs(sum(a.gain for a in actions) - (1 - res.oc) * 100) < 1e-6
        for a in actions:
            leaf = res.leaf_paths[a.check_id]
            w = path_product(tree, prof, leaf)
            assert project_gain(res, a.check_id) - res.oc == pytest.approx(w * (1 - scores[a.check_id]), abs=1e-12)


# 11 --------------------------------------------------------------------------


def mutate(doc, rng, alphabet):
    chars = list(doc)
    for _ in range(rng.randint(1, 6)):
        pos = rng.randrange(len(chars) + 1)
        op = rng.random()
        if op < 0.4 and chars:
            del chars[min(pos, len(chars) - 1)]
        elif op < 0.8:
            chars.insert(pos, rng.choice(alphabet))
        else:
            chars.insert(pos, chr(rng.randrange(0, 0x3000)))
    return "".join(chars)


@pytest.mark.criterion(11, "parser round trip on 100 fixtures; 10,000 mutations never crash")
def test_c11_parser_round_trip_and_fuzz():
    rng = np.random.default_rng(11)
    seeds = []
    for _ in range(100):
        text = serialize_ontology(random_ontology(rng, 50))
        first = parse_ontology(text)
        assert first.ok
        again = parse_ontology(serialize_ontology(first.ontology))
        assert again.ok and again.ontology == first.ontology
        seeds.append(text)

    seeds += [(FIXTURES / "gate" / "oc_0765.ttl").read_text(), (FIXTURES / "chain.ttl").read_text()]
    alphabet = list(':;.,[]()"\'<>@^_#a \n\\') + ["owl:", "rdfs:", "xsd:", '"""', "^^"]
    prng = random.Random(11)
    for i in range(10_000):
        result = parse_ontology(mutate(seeds[i % len(seeds)], prng, alphabet))
        assert result.ok or result.errors
        assert all(d.line >= 1 and d.column >= 1 for d in result.diagnostics)


# 12 --------------------------------------------------------------------------


@pytest.mark.criterion(12, "desk-scale ontology (~300 axioms) evaluates in < 1 s; report validates")
def test_c12_desk_scale():
    _kernels.warmup()  # JIT compilation is a one-off process cost, not evaluation time
    text = (FIXTURES / "desk.ttl").read_text()
    tree = default_tree()
    profiles = builtin_profiles(tree)

    start = time.perf_counter()
    onto = parse_ontology(text).ontology
    res = evaluate(tree, profiles[Phase.DETAIL_DESCRIPTION], onto)
    doc = to_json(res, recommend_improvements(res))
    elapsed = time.perf_counter() - start

    assert 250 <= onto.element_counts().axioms <= 350
    assert elapsed < 1.0
    jsonschema.validate(json.loads(json.dumps(doc)), report_schema())
