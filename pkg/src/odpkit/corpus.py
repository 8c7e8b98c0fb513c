"""Aggregate per-IRI annotation text into the concept documents the
matcher embeds.

For every IRI in the graph signature, the configured annotation
properties are harvested in order. Literals for one property are picked
by language preference (filter tag, else untagged, else everything) and
sorted lexicographically; the surviving texts are bucketed into labels,
definitions, and comments, and joined into one whitespace-normalized
string. IRIs with no harvested text yield no document unless the
local-name fallback is on.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TextIO

from .rdf import Iri, Literal, OntologyGraph

SKOS_NS = "http://www.w3.org/2004/02/skos/core#"
SKOS_PREF_LABEL = Iri(SKOS_NS + "prefLabel")
SKOS_ALT_LABEL = Iri(SKOS_NS + "altLabel")
SKOS_DEFINITION = Iri(SKOS_NS + "definition")
RDFS_LABEL = Iri("http://www.w3.org/2000/01/rdf-schema#label")
RDFS_COMMENT = Iri("http://www.w3.org/2000/01/rdf-schema#comment")
IAO_DEFINITION = Iri("http://purl.obolibrary.org/obo/IAO_0000115")
DCTERMS_DESCRIPTION = Iri("http://purl.org/dc/terms/description")

DEFAULT_ANNOTATION_PROPERTIES: tuple[Iri, ...] = (
    SKOS_PREF_LABEL,
    RDFS_LABEL,
    SKOS_ALT_LABEL,
    SKOS_DEFINITION,
    IAO_DEFINITION,
    DCTERMS_DESCRIPTION,
    RDFS_COMMENT,
)

_LABEL_PROPERTIES = {SKOS_PREF_LABEL, RDFS_LABEL, SKOS_ALT_LABEL}
_DEFINITION_PROPERTIES = {SKOS_DEFINITION, IAO_DEFINITION, DCTERMS_DESCRIPTION}

_WS_RUN = re.compile(r"\s+")
_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


@dataclass(frozen=True)
class CorpusConfig:
    annotation_properties: tuple[Iri, ...] = DEFAULT_ANNOTATION_PROPERTIES
    language_filter: str | None = "en"
    include_local_name_fallback: bool = False

    def __post_init__(self) -> None:
        if not self.annotation_properties:
            raise ValueError("annotation_properties must be non-empty")


@dataclass(frozen=True)
class ConceptDocument:
    iri: Iri
    label_texts: tuple[str, ...] = ()
    definition_texts: tuple[str, ...] = ()
    comment_texts: tuple[str, ...] = ()
    combined_text: str = field(default="", compare=True)

    @staticmethod
    def assemble(
        iri: Iri,
        labels: tuple[str, ...],
        definitions: tuple[str, ...],
        comments: tuple[str, ...],
    ) -> ConceptDocument:
        combined = _WS_RUN.sub(" ", " ".join((*labels, *definitions, *comments))).strip()
        return ConceptDocument(iri, labels, definitions, comments, combined)


def _matches_language(literal: Literal, tag: str) -> bool:
    if literal.language is None:
        return False
    lang = literal.language.lower()
    want = tag.lower()
    return lang == want or lang.startswith(want + "-")


def _select_values(literals: list[Literal], language_filter: str | None) -> list[str]:
    """Language preference: filter-tagged first, else untagged, else all."""
    if language_filter:
        tagged = [l for l in literals if _matches_language(l, language_filter)]
        if tagged:
            return sorted(l.lexical for l in tagged)
    untagged = [l for l in literals if l.language is None]
    if untagged:
        return sorted(l.lexical for l in untagged)
    return sorted(l.lexical for l in literals)


def split_local_name(local: str) -> str:
    """Split a local name on CamelCase, underscores, and hyphens."""
    parts = [p for p in re.split(r"[_\-]+", local) if p]
    words: list[str] = []
    for part in parts:
        words.extend(w for w in _CAMEL_BOUNDARY.split(part) if w)
    return " ".join(words)


def build_corpus(graph: OntologyGraph, config: CorpusConfig | None = None) -> list[ConceptDocument]:
    """One document per annotated signature IRI, sorted by IRI. Classes
    and object properties are equally eligible; so is any other
    signature IRI that carries harvested text."""
    config = config or CorpusConfig()
    documents: list[ConceptDocument] = []
    for iri in sorted(graph.signature()):
        labels: list[str] = []
        definitions: list[str] = []
        comments: list[str] = []
        for prop in config.annotation_properties:
            literals = [
                o for o in graph.objects(iri, prop) if isinstance(o, Literal) and o.lexical.strip()
            ]
            if not literals:
                continue
            values = _select_values(literals, config.language_filter)
            if prop in _LABEL_PROPERTIES:
                labels.extend(values)
            elif prop in _DEFINITION_PROPERTIES:
                definitions.extend(values)
            else:
                comments.extend(values)
        if not (labels or definitions or comments):
            if not config.include_local_name_fallback:
                continue
            synthesized = split_local_name(iri.local_name)
            if not synthesized:
                continue
            labels = [synthesized]
        doc = ConceptDocument.assemble(iri, tuple(labels), tuple(definitions), tuple(comments))
        if doc.combined_text:
            documents.append(doc)
    return documents


def write_corpus_tsv(documents: list[ConceptDocument], stream: TextIO) -> None:
    """One record per line: IRI, tab, combined text; sorted by IRI."""
    for doc in sorted(documents, key=lambda d: d.iri):
        stream.write(f"{doc.iri.value}\t{doc.combined_text}\n")


def read_corpus_tsv(stream: TextIO) -> list[ConceptDocument]:
    documents = []
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        try:
            iri_value, text = line.split("\t", 1)
        except ValueError as exc:
            raise ValueError(f"corpus line {line_no} is not IRI<TAB>text") from exc
        documents.append(ConceptDocument.assemble(Iri(iri_value), (text,), (), ()))
    return documents
