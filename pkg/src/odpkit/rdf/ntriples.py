"""N-Triples reading and canonical N-Triples writing.

The canonical form is what golden-file tests pin down: one triple per
line, lines sorted lexicographically by their UTF-8 bytes, blank nodes
relabeled ``_:b0, _:b1, ...`` in first-appearance order of the sorted
output. Relabeling can itself perturb the sort, so the serializer
iterates sort+relabel until the labeling is self-consistent; a canonical
document therefore reserializes byte-identically after a parse.
"""
from __future__ import annotations

import re

from .errors import EncodingError, InvalidIriError, ParseError
from .model import BlankNode, Iri, Literal, OntologyGraph, RdfTerm, SubjectTerm, Triple

_ECHAR_DECODE = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_BLANK_LABEL_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.\-]*")
_LANGTAG_RE = re.compile(r"[a-zA-Z]+(-[a-zA-Z0-9]+)*")


def decode_bytes(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8: {exc}") from exc


class _LineScanner:
    """Cursor over one N-Triples line with position-aware errors."""

    def __init__(self, text: str, line_no: int) -> None:
        self.text = text
        self.pos = 0
        self.line_no = line_no

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line_no, self.pos + 1)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while not self.at_end() and self.text[self.pos] in " \t":
            self.pos += 1

    def expect(self, char: str) -> None:
        if self.peek() != char:
            raise self.error(f"expected {char!r}")
        self.pos += 1

    def read_uchar(self) -> str:
        # positioned after the backslash
        kind = self.peek()
        length = 4 if kind == "u" else 8
        self.pos += 1
        hexdigits = self.text[self.pos : self.pos + length]
        if len(hexdigits) != length or not all(c in "0123456789abcdefABCDEF" for c in hexdigits):
            raise self.error(f"malformed \\{kind} escape")
        self.pos += length
        code = int(hexdigits, 16)
        if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
            raise self.error(f"\\{kind} escape is not a Unicode scalar value")
        return chr(code)

    def read_iriref(self) -> Iri:
        start = self.pos
        self.expect("<")
        out: list[str] = []
        while True:
            if self.at_end():
                self.pos = start
                raise self.error("unterminated IRI")
            c = self.text[self.pos]
            if c == ">":
                self.pos += 1
                break
            if c == "\\":
                self.pos += 1
                if self.peek() in ("u", "U"):
                    out.append(self.read_uchar())
                else:
                    raise self.error("only \\u/\\U escapes are allowed inside an IRI")
                continue
            self.pos += 1
            out.append(c)
        value = "".join(out)
        try:
            return Iri(value)
        except InvalidIriError as exc:
            self.pos = start
            raise self.error(str(exc)) from exc

    def read_blank(self) -> BlankNode:
        self.expect("_")
        self.expect(":")
        m = _BLANK_LABEL_RE.match(self.text, self.pos)
        if not m or m.group(0).endswith("."):
            # a trailing dot belongs to the statement terminator
            label = m.group(0).rstrip(".") if m else ""
            if not label:
                raise self.error("malformed blank node label")
            self.pos += len(label)
            return BlankNode(label)
        self.pos = m.end()
        return BlankNode(m.group(0))

    def read_string(self) -> str:
        self.expect('"')
        out: list[str] = []
        while True:
            if self.at_end():
                raise self.error("unterminated string literal")
            c = self.text[self.pos]
            if c == '"':
                self.pos += 1
                return "".join(out)
            if c == "\\":
                self.pos += 1
                esc = self.peek()
                if esc in ("u", "U"):
                    out.append(self.read_uchar())
                elif esc in _ECHAR_DECODE:
                    out.append(_ECHAR_DECODE[esc])
                    self.pos += 1
                else:
                    raise self.error(f"unknown escape \\{esc}")
                continue
            self.pos += 1
            out.append(c)

    def read_literal(self) -> Literal:
        lexical = self.read_string()
        if self.peek() == "@":
            self.pos += 1
            m = _LANGTAG_RE.match(self.text, self.pos)
            if not m:
                raise self.error("malformed language tag")
            self.pos = m.end()
            return Literal(lexical, language=m.group(0))
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            return Literal(lexical, datatype=self.read_iriref())
        return Literal(lexical)

    def read_subject(self) -> SubjectTerm:
        c = self.peek()
        if c == "<":
            return self.read_iriref()
        if c == "_":
            return self.read_blank()
        raise self.error("expected IRI or blank node in subject position")

    def read_object(self) -> RdfTerm:
        c = self.peek()
        if c == "<":
            return self.read_iriref()
        if c == "_":
            return self.read_blank()
        if c == '"':
            return self.read_literal()
        raise self.error("expected IRI, blank node, or literal in object position")


def parse_ntriples(data: bytes) -> OntologyGraph:
    """Parse an N-Triples document into a graph."""
    text = decode_bytes(data)
    triples: list[Triple] = []
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        sc = _LineScanner(line, line_no)
        sc.skip_ws()
        if sc.at_end() or sc.peek() == "#":
            continue
        subject = sc.read_subject()
        sc.skip_ws()
        if sc.peek() != "<":
            raise sc.error("expected IRI in predicate position")
        predicate = sc.read_iriref()
        sc.skip_ws()
        obj = sc.read_object()
        sc.skip_ws()
        sc.expect(".")
        sc.skip_ws()
        if not sc.at_end() and sc.peek() != "#":
            raise sc.error("unexpected content after statement terminator")
        triples.append(Triple(subject, predicate, obj))
    return OntologyGraph.from_triples(triples)


def _escape_literal(lexical: str) -> str:
    out: list[str] = []
    for c in lexical:
        if c == "\\":
            out.append("\\\\")
        elif c == '"':
            out.append('\\"')
        elif c == "\n":
            out.append("\\n")
        elif c == "\r":
            out.append("\\r")
        elif c == "\t":
            out.append("\\t")
        elif ord(c) < 0x20:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


def format_term(term: RdfTerm, labels: dict[str, str] | None = None) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        label = labels[term.label] if labels else term.label
        return f"_:{label}"
    body = f'"{_escape_literal(term.lexical)}"'
    if term.language:
        return f"{body}@{term.language}"
    if term.datatype:
        return f"{body}^^<{term.datatype.value}>"
    return body


def _format_line(triple: Triple, labels: dict[str, str]) -> str:
    return (
        f"{format_term(triple.subject, labels)} "
        f"{format_term(triple.predicate, labels)} "
        f"{format_term(triple.object, labels)} ."
    )


def _sorted_lines(triples: list[Triple], labels: dict[str, str]) -> list[str]:
    return sorted((_format_line(t, labels) for t in triples), key=lambda s: s.encode("utf-8"))


def _relabel_from_order(triples: list[Triple], labels: dict[str, str]) -> dict[str, str]:
    """Assign _:b0, _:b1, ... in first-appearance order of the sorted lines."""
    order = sorted(triples, key=lambda t: _format_line(t, labels).encode("utf-8"))
    fresh: dict[str, str] = {}
    for t in order:
        for term in (t.subject, t.object):
            if isinstance(term, BlankNode) and term.label not in fresh:
                fresh[term.label] = f"b{len(fresh)}"
    return fresh


def serialize_ntriples(graph: OntologyGraph) -> bytes:
    """Canonical N-Triples bytes for a graph (empty graph gives empty output)."""
    triples = list(graph.triples)
    if not triples:
        return b""
    labels = {
        term.label: term.label
        for t in triples
        for term in (t.subject, t.object)
        if isinstance(term, BlankNode)
    }
    if not labels:
        return ("\n".join(_sorted_lines(triples, labels)) + "\n").encode("utf-8")

    seen: list[dict[str, str]] = []
    while True:
        relabeled = _relabel_from_order(triples, labels)
        if relabeled == labels:
            break
        if relabeled in seen:
            # Oscillating labelings: settle on the lexicographically
            # smallest output among the cycle members.
            cycle = seen[seen.index(relabeled) :] + [relabeled]
            relabeled = min(cycle, key=lambda lb: _sorted_lines(triples, lb))
            break
        seen.append(relabeled)
        labels = relabeled
    return ("\n".join(_sorted_lines(triples, relabeled)) + "\n").encode("utf-8")
