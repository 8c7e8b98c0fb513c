"""RDF model, Turtle/N-Triples parsing, and canonical serialization."""
from __future__ import annotations

from pathlib import Path

from .axioms import (
    AnnotationAssertion,
    AxiomScan,
    AxiomView,
    Domain,
    LOGICAL_VARIANTS,
    LogicalAxiom,
    Range,
    SubClassOf,
    SubClassOfExistential,
    SubPropertyOf,
    axiom_views,
    axioms_to_triples,
    scan_axioms,
)
from .compare import isomorphic
from .errors import EncodingError, InvalidIriError, ParseError, RdfError, UndefinedPrefixError
from .model import (
    BlankNode,
    Iri,
    Literal,
    OntologyGraph,
    RdfTerm,
    SubjectTerm,
    Triple,
    term_sort_key,
)
from .ntriples import parse_ntriples, serialize_ntriples
from .turtle import parse_turtle

SYNTAXES = ("turtle", "ntriples")

_SUFFIX_SYNTAX = {".ttl": "turtle", ".turtle": "turtle", ".nt": "ntriples", ".ntriples": "ntriples"}


def parse_document(data: bytes, syntax: str, base: Iri | None = None) -> OntologyGraph:
    """Parse Turtle or N-Triples bytes into an immutable graph."""
    if syntax == "turtle":
        return parse_turtle(data, base=base)
    if syntax == "ntriples":
        return parse_ntriples(data)
    raise ValueError(f"unsupported syntax {syntax!r}; expected one of {SYNTAXES}")


def syntax_for_path(path: str | Path) -> str:
    """Guess the serialization from a file suffix (Turtle by default)."""
    return _SUFFIX_SYNTAX.get(Path(path).suffix.lower(), "turtle")


def load_graph(path: str | Path, syntax: str | None = None) -> OntologyGraph:
    p = Path(path)
    return parse_document(p.read_bytes(), syntax or syntax_for_path(p))


def merge_graphs(graphs: list[OntologyGraph]) -> OntologyGraph:
    """Union of several graphs; blank labels are prefixed per source so
    documents cannot capture each other's nodes."""
    if len(graphs) == 1:
        return graphs[0]
    triples: list[Triple] = []
    for index, graph in enumerate(graphs):
        def localize(term):
            if isinstance(term, BlankNode):
                return BlankNode(f"g{index}.{term.label}")
            return term

        for t in graph.triples:
            triples.append(Triple(localize(t.subject), t.predicate, localize(t.object)))
    return OntologyGraph.from_triples(triples)


def load_graphs(paths: list[str | Path], syntax: str | None = None) -> OntologyGraph:
    """Parse one ontology spread over several files into a single graph."""
    if not paths:
        return OntologyGraph.from_triples([])
    return merge_graphs([load_graph(p, syntax) for p in paths])


__all__ = [
    "AnnotationAssertion",
    "AxiomScan",
    "AxiomView",
    "BlankNode",
    "Domain",
    "EncodingError",
    "InvalidIriError",
    "Iri",
    "Literal",
    "LOGICAL_VARIANTS",
    "LogicalAxiom",
    "OntologyGraph",
    "ParseError",
    "Range",
    "RdfError",
    "RdfTerm",
    "SubClassOf",
    "SubClassOfExistential",
    "SubPropertyOf",
    "SubjectTerm",
    "Triple",
    "UndefinedPrefixError",
    "axiom_views",
    "axioms_to_triples",
    "isomorphic",
    "load_graph",
    "load_graphs",
    "merge_graphs",
    "parse_document",
    "parse_ntriples",
    "parse_turtle",
    "scan_axioms",
    "serialize_ntriples",
    "syntax_for_path",
    "term_sort_key",
]
