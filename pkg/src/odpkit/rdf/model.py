"""RDF terms, triples, and the immutable indexed ontology graph."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InvalidIriError

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

VOCABULARY_NAMESPACES = (RDF_NS, RDFS_NS, OWL_NS)

# Scheme per RFC 3986; the remainder must avoid the characters an IRIREF
# cannot carry unescaped.
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_FORBIDDEN_IRI_CHARS = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)}


@dataclass(frozen=True, order=True)
class Iri:
    """An absolute IRI. Equality is exact string equality; ordering is
    lexicographic (UTF-8 byte order, which str comparison preserves)."""

    value: str

    def __post_init__(self) -> None:
        if not _SCHEME_RE.match(self.value):
            raise InvalidIriError(f"not an absolute IRI (missing scheme): {self.value!r}")
        bad = _FORBIDDEN_IRI_CHARS.intersection(self.value)
        if bad:
            raise InvalidIriError(
                f"IRI contains forbidden character(s) {sorted(bad)!r}: {self.value!r}"
            )

    def __str__(self) -> str:
        return self.value

    @property
    def local_name(self) -> str:
        """The fragment after the last '#', '/', or ':' separator."""
        for sep in ("#", "/", ":"):
            if sep in self.value:
                tail = self.value.rsplit(sep, 1)[1]
                if tail:
                    return tail
        return self.value

    def in_namespace(self, namespace: str) -> bool:
        return self.value.startswith(namespace)


@dataclass(frozen=True, order=True)
class BlankNode:
    """A blank node; labels are unique within one parsed document."""

    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True)
class Literal:
    """An RDF literal: lexical form plus optional datatype or language tag."""

    lexical: str
    datatype: Iri | None = None
    language: str | None = None

    def __post_init__(self) -> None:
        if self.datatype is not None and self.language is not None:
            raise ValueError("a literal cannot carry both a datatype and a language tag")

    def __str__(self) -> str:
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        if self.datatype:
            return f'"{self.lexical}"^^<{self.datatype.value}>'
        return f'"{self.lexical}"'


RdfTerm = Iri | BlankNode | Literal
SubjectTerm = Iri | BlankNode


def term_sort_key(term: RdfTerm) -> tuple:
    """Total order over mixed term kinds: IRIs, then blanks, then literals."""
    if isinstance(term, Iri):
        return (0, term.value)
    if isinstance(term, BlankNode):
        return (1, term.label)
    return (2, term.lexical, term.datatype.value if term.datatype else "", term.language or "")


@dataclass(frozen=True)
class Triple:
    subject: SubjectTerm
    predicate: Iri
    object: RdfTerm

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("a literal never appears in subject position")
        if not isinstance(self.predicate, Iri):
            raise ValueError("the predicate of a triple must be an IRI")

    def sort_key(self) -> tuple:
        return (term_sort_key(self.subject), self.predicate.value, term_sort_key(self.object))


RDF_TYPE = Iri(RDF_NS + "type")
RDFS_SUBCLASSOF = Iri(RDFS_NS + "subClassOf")
RDFS_SUBPROPERTYOF = Iri(RDFS_NS + "subPropertyOf")
RDFS_DOMAIN = Iri(RDFS_NS + "domain")
RDFS_RANGE = Iri(RDFS_NS + "range")
RDFS_LABEL = Iri(RDFS_NS + "label")
RDFS_COMMENT = Iri(RDFS_NS + "comment")
OWL_CLASS = Iri(OWL_NS + "Class")
OWL_OBJECT_PROPERTY = Iri(OWL_NS + "ObjectProperty")
OWL_ANNOTATION_PROPERTY = Iri(OWL_NS + "AnnotationProperty")
OWL_RESTRICTION = Iri(OWL_NS + "Restriction")
OWL_ON_PROPERTY = Iri(OWL_NS + "onProperty")
OWL_SOME_VALUES_FROM = Iri(OWL_NS + "someValuesFrom")
OWL_ONTOLOGY = Iri(OWL_NS + "Ontology")
XSD_STRING = Iri(XSD_NS + "string")


def is_absolute_iri(value: str) -> bool:
    return bool(_SCHEME_RE.match(value))


def _is_vocabulary_iri(iri: Iri) -> bool:
    return any(iri.in_namespace(ns) for ns in VOCABULARY_NAMESPACES)


@dataclass(frozen=True)
class OntologyGraph:
    """An immutable set of triples with subject/predicate/object indexes.

    Construct through :meth:`from_triples`; instances are safe to share
    across threads.
    """

    triples: frozenset[Triple]
    declared_classes: frozenset[Iri]
    declared_object_properties: frozenset[Iri]
    declared_annotation_properties: frozenset[Iri]
    _by_subject: dict = field(repr=False, compare=False, hash=False)
    _by_predicate: dict = field(repr=False, compare=False, hash=False)
    _by_object: dict = field(repr=False, compare=False, hash=False)

    @classmethod
    def from_triples(cls, triples: Iterable[Triple]) -> OntologyGraph:
        tset = frozenset(triples)
        by_s: dict[SubjectTerm, list[Triple]] = {}
        by_p: dict[Iri, list[Triple]] = {}
        by_o: dict[RdfTerm, list[Triple]] = {}
        for t in tset:
            by_s.setdefault(t.subject, []).append(t)
            by_p.setdefault(t.predicate, []).append(t)
            by_o.setdefault(t.object, []).append(t)
        classes = set()
        obj_props = set()
        ann_props = set()
        for t in by_p.get(RDF_TYPE, ()):
            if isinstance(t.subject, Iri):
                if t.object == OWL_CLASS:
                    classes.add(t.subject)
                elif t.object == OWL_OBJECT_PROPERTY:
                    obj_props.add(t.subject)
                elif t.object == OWL_ANNOTATION_PROPERTY:
                    ann_props.add(t.subject)
        return cls(
            triples=tset,
            declared_classes=frozenset(classes),
            declared_object_properties=frozenset(obj_props),
            declared_annotation_properties=frozenset(ann_props),
            _by_subject=by_s,
            _by_predicate=by_p,
            _by_object=by_o,
        )

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self.triples

    def matching(
        self,
        subject: SubjectTerm | None = None,
        predicate: Iri | None = None,
        object: RdfTerm | None = None,
    ) -> list[Triple]:
        """All triples matching the given pattern; None matches anything."""
        if subject is not None:
            candidates = self._by_subject.get(subject, [])
        elif predicate is not None:
            candidates = self._by_predicate.get(predicate, [])
        elif object is not None:
            candidates = self._by_object.get(object, [])
        else:
            candidates = list(self.triples)
        return [
            t
            for t in candidates
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
            and (object is None or t.object == object)
        ]

    def objects(self, subject: SubjectTerm, predicate: Iri) -> list[RdfTerm]:
        return [t.object for t in self.matching(subject=subject, predicate=predicate)]

    def signature(self) -> frozenset[Iri]:
        """All IRIs in subject/predicate/object position, minus the
        RDF/RDFS/OWL vocabulary namespaces."""
        found: set[Iri] = set()
        for t in self.triples:
            for term in (t.subject, t.predicate, t.object):
                if isinstance(term, Iri) and not _is_vocabulary_iri(term):
                    found.add(term)
        return frozenset(found)
