"""Turtle-subset reader/writer for ontologies, and the JSON weight-profile reader.

The accepted Turtle is deliberately small: prefix/base directives, IRIs and
prefixed names, ``a``, string/number/boolean literals, ``;`` and ``,``
lists, and anonymous ``[ ... ]`` nodes only as the owl:Restriction object of
rdfs:subClassOf. Collections and blank-node labels are rejected.
"""

from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union
from urllib.parse import urljoin

from .model import (
    OWL,
    RDF,
    RDFS,
    XSD,
    Axiom,
    AxiomKind,
    Iri,
    Literal,
    Ontology,
    OntologyError,
    is_datatype,
)
from .octree import (
    ConditionNode,
    Phase,
    ProfileError,
    WeightProfile,
    aggregate,
    builtin_profiles,
    default_tree,
    leaf,
)

STANDARD_PREFIXES = {"rdf": RDF, "rdfs": RDFS, "owl": OWL, "xsd": XSD}

RDF_TYPE = RDF + "type"
DECLARATION_TYPES = {
    OWL + "Class": "Class",
    OWL + "ObjectProperty": "ObjectProperty",
    OWL + "DatatypeProperty": "DataProperty",
    OWL + "NamedIndividual": "Individual",
}
VOCAB_NAMESPACES = (RDF, RDFS, OWL, XSD)

P_SUBCLASS = RDFS + "subClassOf"
P_SUBPROPERTY = RDFS + "subPropertyOf"
P_DOMAIN = RDFS + "domain"
P_RANGE = RDFS + "range"
P_LABEL = RDFS + "label"
P_COMMENT = RDFS + "comment"
P_DISJOINT = OWL + "disjointWith"
P_EQ_CLASS = OWL + "equivalentClass"
P_EQ_PROP = OWL + "equivalentProperty"
P_INVERSE = OWL + "inverseOf"
P_IMPORTS = OWL + "imports"
RESTRICTION = OWL + "Restriction"
ON_PROPERTY = OWL + "onProperty"
MIN_CARD = OWL + "minCardinality"
MAX_CARD = OWL + "maxCardinality"
EXACT_CARD = OWL + "cardinality"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class _Abort(Exception):
    def __init__(self, diag: ParseDiagnostic):
        self.diag = diag


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\x00-\x20]*(?:\\[uU][0-9A-Fa-f]{4,8}[^<>"{}|^`\\\x00-\x20]*)*>)
  | (?P<long_string>\"\"\"(?:[^"\\]|\\.|"(?!""))*\"\"\"|'''(?:[^'\\]|\\.|'(?!''))*''')
  | (?P<string>"(?:[^"\\\n\r]|\\.)*"|'(?:[^'\\\n\r]|\\.)*')
  | (?P<langtag>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<dtype>\^\^)
  | (?P<number>[+-]?(?:\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?))
  | (?P<bnode>_:[A-Za-z0-9_][\w.-]*)
  | (?P<pname>(?:[A-Za-z][\w-]*(?:\.[\w-]+)*)?:(?:[\w%-]|\\[-_~.!$&'()*+,;=/?\#@%]|:)*(?:\.(?:[\w%:-]|\\.)+)*)
  | (?P<keyword>[A-Za-z][A-Za-z0-9]*)
  | (?P<punct>[.;,\[\]()])
    """,
    re.VERBOSE,
)

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def _unescape(body: str, allow_echar: bool = True) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1 : i + 2]
        if nxt in ("u", "U"):
            width = 4 if nxt == "u" else 8
            hexits = body[i + 2 : i + 2 + width]
            if len(hexits) != width or not all(c in "0123456789abcdefABCDEF" for c in hexits):
                raise ValueError(f"bad \\{nxt} escape")
            code = int(hexits, 16)
            if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
                raise ValueError(f"escape \\{nxt}{hexits} is not a valid character")
            out.append(chr(code))
            i += 2 + width
        elif allow_echar and nxt in _ECHAR:
            out.append(_ECHAR[nxt])
            i += 2
        else:
            raise ValueError(f"bad escape \\{nxt}")
    return "".join(out)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None or m.end() == pos:
            raise _Abort(ParseDiagnostic("error", line, col, f"unexpected character {text[pos]!r}"))
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))  # type: ignore[arg-type]
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return tokens


# ---------------------------------------------------------------------------
# grammar -> raw statements


@dataclass(frozen=True)
class Node:
    """A resolved term with the position of its token."""

    value: Union[Iri, Literal]
    line: int
    col: int

    @property
    def is_literal(self) -> bool:
        return isinstance(self.value, Literal)


@dataclass
class BlankNode:
    pairs: list[tuple[Node, "Node | BlankNode"]]
    line: int
    col: int


@dataclass(frozen=True)
class Statement:
    subject: "Node | BlankNode"
    predicate: Node
    obj: "Node | BlankNode"


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[ParseDiagnostic]):
        self.tokens = tokens
        self.i = 0
        self.diags = diagnostics
        self.prefixes: dict[str, str] = dict(STANDARD_PREFIXES)
        self.declared_prefixes: dict[str, str] = {}
        self.base: str | None = None
        self.statements: list[Statement] = []

    # token helpers
    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("eof", "", 1, 1)
            raise _Abort(ParseDiagnostic("error", last.line, last.col + len(last.text), "unexpected end of document"))
        self.i += 1
        return tok

    def error(self, tok: Token, message: str) -> _Abort:
        return _Abort(ParseDiagnostic("error", tok.line, tok.col, message))

    def expect_punct(self, char: str) -> Token:
        tok = self.next()
        if tok.kind != "punct" or tok.text != char:
            raise self.error(tok, f"expected '{char}', found {tok.text!r}")
        return tok

    def is_punct(self, char: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.text == char

    def resync(self) -> None:
        depth = 0
        while (tok := self.peek()) is not None:
            self.i += 1
            if tok.kind == "punct":
                if tok.text == "[":
                    depth += 1
                elif tok.text == "]":
                    depth = max(0, depth - 1)
                elif tok.text == "." and depth == 0:
                    return

    # grammar
    def parse(self) -> None:
        while self.peek() is not None:
            start = self.i
            try:
                self.statement()
            except _Abort as exc:
                self.diags.append(exc.diag)
                last = self.tokens[self.i - 1] if self.i > start else None
                if last is not None and last.kind == "punct" and last.text == ".":
                    continue
                self.resync()

    def statement(self) -> None:
        tok = self.peek()
        assert tok is not None
        if tok.kind == "langtag" and tok.text in ("@prefix", "@base"):
            self.next()
            self.directive(tok, tok.text[1:], dotted=True)
        elif tok.kind == "keyword" and tok.text.upper() in ("PREFIX", "BASE"):
            self.next()
            self.directive(tok, tok.text.lower(), dotted=False)
        else:
            subject = self.subject()
            self.predicate_object_list(subject)
            self.expect_punct(".")

    def directive(self, tok: Token, kind: str, dotted: bool) -> None:
        if kind == "prefix":
            name = self.next()
            if name.kind != "pname" or not name.text.endswith(":") or name.text.count(":") != 1:
                raise self.error(name, "expected a prefix name like 'ex:'")
            iri = self.next()
            if iri.kind != "iri":
                raise self.error(iri, "expected <IRI> in prefix directive")
            value = self.iri_value(iri)
            self.prefixes[name.text[:-1]] = value
            self.declared_prefixes[name.text[:-1]] = value
        else:
            iri = self.next()
            if iri.kind != "iri":
                raise self.error(iri, "expected <IRI> in base directive")
            self.base = self.iri_value(iri)
        if dotted:
            self.expect_punct(".")

    def iri_value(self, tok: Token) -> str:
        try:
            value = _unescape(tok.text[1:-1], allow_echar=False)
        except ValueError as exc:
            raise self.error(tok, str(exc)) from None
        if self.base and not re.match(r"[A-Za-z][A-Za-z0-9+.-]*:", value):
            value = urljoin(self.base, value)
        if not value:
            raise self.error(tok, "empty IRI")
        return value

    def term(self, tok: Token) -> Node:
        if tok.kind == "iri":
            return Node(self.iri_value(tok), tok.line, tok.col)
        if tok.kind == "pname":
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.prefixes:
                raise self.error(tok, f"undeclared prefix '{prefix}:'")
            local = re.sub(r"\\(.)", r"\1", local)
            return Node(self.prefixes[prefix] + local, tok.line, tok.col)
        if tok.kind == "keyword" and tok.text == "a":
            return Node(RDF_TYPE, tok.line, tok.col)
        if tok.kind == "bnode":
            raise self.error(tok, "blank node labels are not supported; use named IRIs")
        if tok.kind == "punct" and tok.text == "(":
            raise self.error(tok, "RDF collections are not supported")
        raise self.error(tok, f"expected an IRI, found {tok.text!r}")

    def subject(self) -> Node:
        tok = self.next()
        if tok.kind == "punct" and tok.text == "[":
            raise self.error(tok, "blank-node subjects are not supported; anonymous nodes may only be restriction objects of rdfs:subClassOf")
        if tok.kind == "keyword" and tok.text == "a":
            raise self.error(tok, "'a' cannot be a subject")
        return self.term(tok)

    def predicate_object_list(self, subject: Node | BlankNode, pairs: list | None = None) -> None:
        while True:
            ptok = self.next()
            predicate = self.term(ptok)
            while True:
                obj = self.object()
                if pairs is not None:
                    pairs.append((predicate, obj))
                else:
                    self.statements.append(Statement(subject, predicate, obj))
                if not self.is_punct(","):
                    break
                self.next()
            if not self.is_punct(";"):
                return
            while self.is_punct(";"):
                self.next()
            nxt = self.peek()
            if nxt is None or (nxt.kind == "punct" and nxt.text in ".]"):
                return

    def object(self) -> Node | BlankNode:
        tok = self.next()
        if tok.kind in ("string", "long_string"):
            quote = 3 if tok.kind == "long_string" else 1
            try:
                value = _unescape(tok.text[quote:-quote])
            except ValueError as exc:
                raise self.error(tok, str(exc)) from None
            lang = None
            nxt = self.peek()
            if nxt is not None and nxt.kind == "langtag" and nxt.text not in ("@prefix", "@base"):
                lang = self.next().text[1:]
            elif nxt is not None and nxt.kind == "dtype":
                self.next()
                dt = self.next()
                if dt.kind not in ("iri", "pname"):
                    raise self.error(dt, "expected datatype IRI after '^^'")
                self.term(dt)
            return Node(Literal(value, lang), tok.line, tok.col)
        if tok.kind == "number":
            return Node(Literal(tok.text), tok.line, tok.col)
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            return Node(Literal(tok.text), tok.line, tok.col)
        if tok.kind == "punct" and tok.text == "[":
            node = BlankNode([], tok.line, tok.col)
            if not self.is_punct("]"):
                self.predicate_object_list(node, node.pairs)
            self.expect_punct("]")
            return node
        return self.term(tok)


# ---------------------------------------------------------------------------
# statements -> ontology


@dataclass
class ParseResult:
    ontology: Ontology | None
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)
    prefixes: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.ontology is not None

    @property
    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


def _node_pos(node: Node | BlankNode) -> tuple[int, int]:
    return node.line, node.col


class _Builder:
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diags = diagnostics
        self.kinds: dict[Iri, str] = {}
        self.axioms: list[Axiom] = []

    def err(self, node: Node | BlankNode, msg: str) -> None:
        self.diags.append(ParseDiagnostic("error", *_node_pos(node), msg))

    def warn(self, node: Node | BlankNode, msg: str) -> None:
        self.diags.append(ParseDiagnostic("warning", *_node_pos(node), msg))

    def declare(self, node: Node, kind: str) -> None:
        iri = node.value
        previous = self.kinds.get(iri)  # type: ignore[arg-type]
        if previous is not None and previous != kind:
            self.err(node, f"kind conflict: {iri} declared as {previous} and {kind}")
            return
        self.kinds[iri] = kind  # type: ignore[index]

    def expect(self, node: Node | BlankNode, kinds: tuple[str, ...], role: str) -> bool:
        if isinstance(node, BlankNode):
            self.err(node, f"anonymous node not allowed as {role}")
            return False
        if node.is_literal:
            self.err(node, f"literal not allowed as {role}")
            return False
        kind = self.kinds.get(node.value)  # type: ignore[arg-type]
        if kind is None:
            self.err(node, f"undeclared {'/'.join(kinds)} {node.value} used as {role}")
            return False
        if kind not in kinds:
            self.err(node, f"{node.value} is a {kind}, expected {'/'.join(kinds)} as {role}")
            return False
        return True

    def build(self, statements: list[Statement]) -> None:
        typed: list[Statement] = []
        for st in statements:
            if isinstance(st.subject, BlankNode):
                self.err(st.subject, "blank-node subjects are not supported")
                continue
            if st.predicate.value == RDF_TYPE and isinstance(st.obj, Node) and st.obj.value in DECLARATION_TYPES:
                self.declare(st.subject, DECLARATION_TYPES[st.obj.value])  # type: ignore[index]
            elif st.predicate.value == RDF_TYPE:
                typed.append(st)

        # rdf:type with a declared class as object makes the subject an individual
        for st in typed:
            obj = st.obj
            if isinstance(obj, Node) and self.kinds.get(obj.value) == "Class":  # type: ignore[arg-type]
                if st.subject.value not in self.kinds:  # type: ignore[union-attr]
                    self.kinds[st.subject.value] = "Individual"  # type: ignore[union-attr,index]

        for st in statements:
            if isinstance(st.subject, BlankNode):
                continue
            self.statement(st)

    def statement(self, st: Statement) -> None:
        s, p, o = st.subject, st.predicate, st.obj
        pv = p.value
        assert isinstance(s, Node)
        if pv == RDF_TYPE:
            if isinstance(o, Node) and o.value in DECLARATION_TYPES:
                return
            if isinstance(o, Node) and not o.is_literal and str(o.value).startswith(VOCAB_NAMESPACES) and o.value not in self.kinds:
                self.warn(o, f"unsupported type {o.value}; statement skipped")
                return
            if self.expect(o, ("Class",), "rdf:type object") and self.expect(s, ("Individual",), "typed subject"):
                self.add(s, AxiomKind.TYPE_ASSERTION, s.value, o.value)  # type: ignore[union-attr]
            return
        if pv == P_SUBCLASS:
            if not self.expect(s, ("Class",), "rdfs:subClassOf subject"):
                return
            if isinstance(o, BlankNode):
                self.restriction(s, o)
            elif self.expect(o, ("Class",), "rdfs:subClassOf object"):
                self.add(s, AxiomKind.SUBCLASS_OF, s.value, o.value)
            return
        simple = {
            P_DISJOINT: (AxiomKind.DISJOINT_CLASSES, ("Class",), ("Class",)),
            P_EQ_CLASS: (AxiomKind.EQUIVALENT_CLASSES, ("Class",), ("Class",)),
            P_INVERSE: (AxiomKind.INVERSE_OF, ("ObjectProperty",), ("ObjectProperty",)),
            P_DOMAIN: (AxiomKind.DOMAIN, ("ObjectProperty", "DataProperty"), ("Class",)),
        }
        if pv in simple:
            kind, sk, ok = simple[pv]
            if self.expect(s, sk, f"{kind.value} subject") and self.expect(o, ok, f"{kind.value} object"):
                self.add(s, kind, s.value, o.value)  # type: ignore[union-attr]
            return
        if pv in (P_SUBPROPERTY, P_EQ_PROP):
            kind = AxiomKind.SUBPROPERTY_OF if pv == P_SUBPROPERTY else AxiomKind.EQUIVALENT_PROPERTIES
            props = ("ObjectProperty", "DataProperty")
            if self.expect(s, props, f"{kind.value} subject") and self.expect(o, props, f"{kind.value} object"):
                if self.kinds[s.value] != self.kinds[o.value]:  # type: ignore[index,union-attr]
                    self.err(o, f"{kind.value} relates properties of different kinds")
                else:
                    self.add(s, kind, s.value, o.value)  # type: ignore[union-attr]
            return
        if pv == P_RANGE:
            if not self.expect(s, ("ObjectProperty", "DataProperty"), "rdfs:range subject"):
                return
            if self.kinds[s.value] == "ObjectProperty":  # type: ignore[index]
                if self.expect(o, ("Class",), "object property range"):
                    self.add(s, AxiomKind.RANGE, s.value, o.value)  # type: ignore[union-attr]
            elif isinstance(o, Node) and not o.is_literal and is_datatype(o.value):  # type: ignore[arg-type]
                self.add(s, AxiomKind.RANGE, s.value, o.value)
            else:
                self.err(o, "datatype property range must be a datatype IRI (xsd:... or rdfs:Literal)")
            return
        if pv in (P_LABEL, P_COMMENT):
            kind = AxiomKind.LABEL if pv == P_LABEL else AxiomKind.COMMENT
            if s.value not in self.kinds:
                self.err(s, f"undeclared term {s.value} annotated")
            elif not (isinstance(o, Node) and o.is_literal):
                self.err(o, f"{kind.value.lower()} value must be a literal")
            else:
                self.add(s, kind, s.value, o.value)
            return
        if pv == P_IMPORTS:
            self.warn(p, "owl:imports is not resolved; statement skipped")
            return
        pkind = self.kinds.get(pv)  # type: ignore[arg-type]
        if pkind in ("ObjectProperty", "DataProperty"):
            if not self.expect(s, ("Individual",), "property assertion subject"):
                return
            if pkind == "ObjectProperty":
                if self.expect(o, ("Individual",), "object property value"):
                    self.add(s, AxiomKind.PROPERTY_ASSERTION, s.value, pv, o.value)  # type: ignore[union-attr]
            elif isinstance(o, Node) and o.is_literal:
                self.add(s, AxiomKind.PROPERTY_ASSERTION, s.value, pv, o.value)
            else:
                self.err(o, "datatype property value must be a literal")
            return
        if pkind is not None:
            self.err(p, f"{pv} is a {pkind}, not a property")
            return
        self.warn(p, f"unsupported predicate {pv}; statement skipped")

    def restriction(self, s: Node, node: BlankNode) -> None:
        by_pred: dict[str, list] = defaultdict(list)
        for pred, obj in node.pairs:
            by_pred[pred.value].append((pred, obj))  # type: ignore[index]
        types = by_pred.pop(RDF_TYPE, [])
        if not any(isinstance(o, Node) and o.value == RESTRICTION for _, o in types):
            self.err(node, "anonymous class must be 'a owl:Restriction'")
            return
        on = by_pred.pop(ON_PROPERTY, [])
        if len(on) != 1:
            self.err(node, "restriction needs exactly one owl:onProperty")
            return
        prop = on[0][1]
        if not self.expect(prop, ("ObjectProperty", "DataProperty"), "owl:onProperty"):
            return
        counts = []
        for key, kinds in ((MIN_CARD, (AxiomKind.MIN_CARDINALITY,)), (MAX_CARD, (AxiomKind.MAX_CARDINALITY,)),
                           (EXACT_CARD, (AxiomKind.MIN_CARDINALITY, AxiomKind.MAX_CARDINALITY))):
            for pred, value in by_pred.pop(key, []):
                n = self.cardinality(value)
                if n is not None:
                    counts.extend((k, n) for k in kinds)
        for pred, _ in (pair for pairs in by_pred.values() for pair in pairs):
            self.err(pred, f"unsupported restriction predicate {pred.value}")
            return
        if not counts:
            self.err(node, "restriction needs owl:minCardinality, owl:maxCardinality or owl:cardinality")
            return
        for kind, n in counts:
            self.add(s, kind, s.value, prop.value, cardinality=n)  # type: ignore[union-attr]

    def cardinality(self, value: Node | BlankNode) -> int | None:
        if isinstance(value, Node) and value.is_literal and re.fullmatch(r"\+?\d+", value.value.value):  # type: ignore[union-attr]
            return int(value.value.value)  # type: ignore[union-attr]
        self.err(value, "cardinality must be a non-negative integer")
        return None

    def add(self, at: Node, kind: AxiomKind, subject, *objects, cardinality: int | None = None) -> None:
        self.axioms.append(Axiom.make(kind, subject, *objects, cardinality=cardinality))


def parse_ontology(document: str) -> ParseResult:
    """Parse a Turtle-subset document. Any error diagnostic means no ontology."""
    diagnostics: list[ParseDiagnostic] = []
    try:
        tokens = tokenize(document)
    except _Abort as exc:
        return ParseResult(None, [exc.diag])
    parser = _Parser(tokens, diagnostics)
    parser.parse()
    builder = _Builder(diagnostics)
    builder.build(parser.statements)
    diagnostics.sort(key=lambda d: (d.line, d.column, d.severity != "error"))
    if any(d.severity == "error" for d in diagnostics):
        return ParseResult(None, diagnostics, parser.declared_prefixes)
    groups: dict[str, set[Iri]] = defaultdict(set)
    for iri, kind in builder.kinds.items():
        groups[kind].add(iri)
    try:
        onto = Ontology.build(
            groups["Class"], groups["ObjectProperty"], groups["DataProperty"], groups["Individual"], builder.axioms
        )
    except OntologyError as exc:  # defensive: the builder checks the same invariants
        diagnostics.append(ParseDiagnostic("error", 1, 1, str(exc)))
        return ParseResult(None, diagnostics, parser.declared_prefixes)
    return ParseResult(onto, diagnostics, parser.declared_prefixes)


# ---------------------------------------------------------------------------
# serializer

_PN_LOCAL = re.compile(r"[A-Za-z_][\w-]*\Z")
_IRI_UNSAFE = re.compile(r'[<>"{}|^`\\\x00-\x20]')


def _escape_literal(value: str) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or 0xD800 <= ord(ch) <= 0xDFFF:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


class _Writer:
    def __init__(self, prefixes: Mapping[str, str]):
        # longest namespace first so nested namespaces pick the specific prefix
        self.prefixes = sorted(prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))

    def iri(self, iri: Iri) -> str:
        for name, ns in self.prefixes:
            if iri.startswith(ns) and _PN_LOCAL.match(iri[len(ns):]):
                return f"{name}:{iri[len(ns):]}"
        escaped = _IRI_UNSAFE.sub(lambda m: f"\\u{ord(m.group()):04X}", iri)
        return f"<{escaped}>"

    def term(self, term) -> str:
        if isinstance(term, Literal):
            text = f'"{_escape_literal(term.value)}"'
            return f"{text}@{term.lang}" if term.lang else text
        return self.iri(term)

    def axiom(self, a: Axiom) -> str:
        s = self.iri(a.subject)
        k = a.kind
        if k in (AxiomKind.MIN_CARDINALITY, AxiomKind.MAX_CARDINALITY):
            pred = "owl:minCardinality" if k is AxiomKind.MIN_CARDINALITY else "owl:maxCardinality"
            return (
                f"{s} rdfs:subClassOf [ a owl:Restriction ; owl:onProperty {self.iri(a.objects[0])} ; "  # type: ignore[arg-type]
                f"{pred} {a.cardinality} ] ."
            )
        if k is AxiomKind.PROPERTY_ASSERTION:
            return f"{s} {self.iri(a.objects[0])} {self.term(a.objects[1])} ."  # type: ignore[arg-type]
        pred = {
            AxiomKind.SUBCLASS_OF: "rdfs:subClassOf",
            AxiomKind.EQUIVALENT_CLASSES: "owl:equivalentClass",
            AxiomKind.DISJOINT_CLASSES: "owl:disjointWith",
            AxiomKind.SUBPROPERTY_OF: "rdfs:subPropertyOf",
            AxiomKind.EQUIVALENT_PROPERTIES: "owl:equivalentProperty",
            AxiomKind.INVERSE_OF: "owl:inverseOf",
            AxiomKind.DOMAIN: "rdfs:domain",
            AxiomKind.RANGE: "rdfs:range",
            AxiomKind.TYPE_ASSERTION: "a",
            AxiomKind.LABEL: "rdfs:label",
            AxiomKind.COMMENT: "rdfs:comment",
        }[k]
        return f"{s} {pred} {self.term(a.objects[0])} ."


def serialize_ontology(ontology: Ontology, prefixes: Mapping[str, str] | None = None) -> str:
    """Deterministic Turtle-subset text; parsing it yields an equal ontology."""
    all_prefixes = {**STANDARD_PREFIXES, **(prefixes or {})}
    w = _Writer(all_prefixes)
    lines = [f"@prefix {name}: <{ns}> ." for name, ns in sorted(all_prefixes.items())]

    decls = [
        ("owl:Class", ontology.classes),
        ("owl:ObjectProperty", ontology.object_properties),
        ("owl:DatatypeProperty", ontology.data_properties),
        ("owl:NamedIndividual", ontology.individual_iris),
    ]
    body = []
    for keyword, members in decls:
        body.extend(f"{w.iri(iri)} a {keyword} ." for iri in sorted(members))
    if body:
        lines.append("")
        lines.extend(body)
    axioms = sorted(ontology.axioms, key=Axiom.sort_key)
    if axioms:
        lines.append("")
        for a in axioms:
            line = w.axiom(a)
            lines.extend([line] * (1 + ontology.duplicates.get(a, 0)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# weight profiles

PROFILE_ENV = "ONTOCOMPLETE_PROFILE"


@dataclass
class ProfileParseResult:
    tree: ConditionNode | None
    profiles: dict[Phase, WeightProfile] | None
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.profiles is not None


def _locate(document: str, needle: str) -> tuple[int, int]:
    idx = document.find(json.dumps(needle))
    if idx < 0:
        return 1, 1
    line = document.count("\n", 0, idx) + 1
    col = idx - (document.rfind("\n", 0, idx) + 1) + 2
    return line, col


def _tree_from_doc(doc: Mapping, path: str, seen: set[str]) -> ConditionNode:
    from .checks import CHECKS

    children = []
    for name, value in doc.items():
        if name.startswith("_"):
            continue
        child_path = f"{path}/{name}"
        if isinstance(value, str):
            if value not in CHECKS:
                raise ProfileError(f"{child_path}: unknown check id {value!r}")
            if value in seen:
                raise ProfileError(f"check {value!r} bound twice")
            seen.add(value)
            children.append(ConditionNode(child_path, check_id=value))
        elif isinstance(value, list):
            leaves = []
            for cid in value:
                if not isinstance(cid, str) or cid not in CHECKS:
                    raise ProfileError(f"{child_path}: unknown check id {cid!r}")
                if cid in seen:
                    raise ProfileError(f"check {cid!r} bound twice")
                seen.add(cid)
                leaves.append(leaf(child_path, cid))
            if not leaves:
                raise ProfileError(f"{child_path}: empty group")
            children.append(aggregate(child_path, leaves))
        elif isinstance(value, dict):
            children.append(_tree_from_doc(value, child_path, seen))
        else:
            raise ProfileError(f"{child_path}: expected a check id, a list of check ids, or an object")
    if not children:
        raise ProfileError(f"{path}: empty group")
    return aggregate(path, children)


def _weights(obj, where: str) -> dict[str, float]:
    if not isinstance(obj, dict):
        raise ProfileError(f"{where}: expected an object mapping node paths to weights")
    out = {}
    for path, w in obj.items():
        if path.startswith("_"):
            continue
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise ProfileError(f"{path}: weight must be a number")
        if w < 0:
            raise ProfileError(f"{path}: negative weight {w}")
        out[path] = float(w)
    return out


def parse_weight_profile(document: str) -> ProfileParseResult:
    """Read a JSON weight-profile document into one profile per phase.

    Schema::

        {
          "tree":    {...optional custom tree: name -> check id | [check ids] | {...}},
          "weights": {"oc/tbox/description": 2.0, ...},   # every phase
          "phases":  {"2.3": {"oc/tbox/anomaly": 0.5}, ...}
        }

    Keys starting with ``_`` are comments. Unlisted paths keep the built-in
    profile weight for that phase.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        return ProfileParseResult(None, None, [ParseDiagnostic("error", exc.lineno, exc.colno, exc.msg)])
    try:
        if not isinstance(doc, dict):
            raise ProfileError("profile document must be a JSON object")
        unknown = [k for k in doc if not k.startswith("_") and k not in ("tree", "weights", "phases")]
        if unknown:
            raise ProfileError(f"unknown top-level key {unknown[0]!r}")
        tree = default_tree()
        if "tree" in doc:
            if not isinstance(doc["tree"], dict):
                raise ProfileError("tree must be an object")
            tree = _tree_from_doc(doc["tree"], "oc", set())
        common = _weights(doc.get("weights", {}), "weights")
        per_phase: dict[Phase, dict[str, float]] = {}
        phases_doc = doc.get("phases", {})
        if not isinstance(phases_doc, dict):
            raise ProfileError("phases must be an object")
        for key, value in phases_doc.items():
            if key.startswith("_"):
                continue
            try:
                phase = Phase.parse(key)
            except ValueError as exc:
                raise ProfileError(str(exc)) from None
            per_phase[phase] = _weights(value, f"phases.{key}")
        profiles = {}
        for phase, base in builtin_profiles(tree).items():
            profile = base.with_overrides({**common, **per_phase.get(phase, {})})
            try:
                profile.validate(tree)
            except ProfileError as exc:
                raise ProfileError(f"phase {phase.value}: {exc}") from None
            profiles[phase] = profile
    except ProfileError as exc:
        msg = str(exc)
        m = re.search(r"'([^']+)'", msg) or re.search(r"(oc(?:/[\w.-]+)+)", msg)
        line, col = _locate(document, m.group(1)) if m else (1, 1)
        return ProfileParseResult(None, None, [ParseDiagnostic("error", line, col, msg)])
    return ProfileParseResult(tree, profiles)


def load_profile_file(path: str) -> ProfileParseResult:
    with open(path, encoding="utf-8") as fh:
        return parse_weight_profile(fh.read())


def first_error(diagnostics: Iterable[ParseDiagnostic]) -> ParseDiagnostic | None:
    return next((d for d in diagnostics if d.severity == "error"), None)
