"""Structured axiom views recovered from raw triples.

Six variants are recognized: named subclass/subproperty edges, existential
restrictions (the blank-node ``owl:Restriction`` pattern), property domain
and range, and literal-valued annotation assertions. Triples matching no
pattern stay in the graph but are invisible here.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import (
    BlankNode,
    Iri,
    Literal,
    OntologyGraph,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    RDF_TYPE,
    OWL_ON_PROPERTY,
    OWL_RESTRICTION,
    OWL_SOME_VALUES_FROM,
    Triple,
    term_sort_key,
)


@dataclass(frozen=True)
class SubClassOf:
    sub: Iri
    sup: Iri

    def iris(self) -> tuple[Iri, ...]:
        return (self.sub, self.sup)

    def sort_key(self) -> tuple:
        return ("SubClassOf", self.sub.value, self.sup.value)


@dataclass(frozen=True)
class SubClassOfExistential:
    """A named class restricted to relate via a property to some filler:
    ``sub ⊑ ∃property.filler``."""

    sub: Iri
    property: Iri
    filler: Iri

    def iris(self) -> tuple[Iri, ...]:
        return (self.sub, self.property, self.filler)

    def sort_key(self) -> tuple:
        return ("SubClassOfExistential", self.sub.value, self.property.value, self.filler.value)


@dataclass(frozen=True)
class SubPropertyOf:
    sub: Iri
    sup: Iri

    def iris(self) -> tuple[Iri, ...]:
        return (self.sub, self.sup)

    def sort_key(self) -> tuple:
        return ("SubPropertyOf", self.sub.value, self.sup.value)


@dataclass(frozen=True)
class Domain:
    property: Iri
    cls: Iri

    def iris(self) -> tuple[Iri, ...]:
        return (self.property, self.cls)

    def sort_key(self) -> tuple:
        return ("Domain", self.property.value, self.cls.value)


@dataclass(frozen=True)
class Range:
    property: Iri
    cls: Iri

    def iris(self) -> tuple[Iri, ...]:
        return (self.property, self.cls)

    def sort_key(self) -> tuple:
        return ("Range", self.property.value, self.cls.value)


@dataclass(frozen=True)
class AnnotationAssertion:
    subject: Iri
    property: Iri
    value: Literal

    def iris(self) -> tuple[Iri, ...]:
        return (self.subject, self.property)

    def sort_key(self) -> tuple:
        return ("AnnotationAssertion", self.subject.value, self.property.value) + term_sort_key(
            self.value
        )


AxiomView = SubClassOf | SubClassOfExistential | SubPropertyOf | Domain | Range | AnnotationAssertion
LogicalAxiom = SubClassOf | SubClassOfExistential | SubPropertyOf | Domain | Range
LOGICAL_VARIANTS = (SubClassOf, SubClassOfExistential, SubPropertyOf, Domain, Range)


@dataclass(frozen=True)
class AxiomScan:
    views: tuple[AxiomView, ...]
    warnings: tuple[str, ...]


def scan_axioms(graph: OntologyGraph) -> AxiomScan:
    """Recover all axiom views plus warnings for malformed restriction
    patterns. The view list is deterministic: sorted by variant tag, then
    lexicographically on fields."""
    views: set[AxiomView] = set()
    warnings: list[str] = []

    restrictions = {
        t.subject
        for t in graph.matching(predicate=RDF_TYPE, object=OWL_RESTRICTION)
        if isinstance(t.subject, BlankNode)
    }
    restriction_of: dict[BlankNode, tuple[Iri, Iri] | None] = {}
    for node in restrictions:
        props = [o for o in graph.objects(node, OWL_ON_PROPERTY) if isinstance(o, Iri)]
        fillers = [o for o in graph.objects(node, OWL_SOME_VALUES_FROM) if isinstance(o, Iri)]
        if len(props) == 1 and len(fillers) == 1:
            restriction_of[node] = (props[0], fillers[0])
        else:
            restriction_of[node] = None
            if not props:
                warnings.append(f"restriction _:{node.label} lacks an owl:onProperty IRI")
            elif len(props) > 1:
                warnings.append(f"restriction _:{node.label} has multiple owl:onProperty values")
            if not fillers:
                warnings.append(f"restriction _:{node.label} lacks an owl:someValuesFrom IRI")
            elif len(fillers) > 1:
                warnings.append(
                    f"restriction _:{node.label} has multiple owl:someValuesFrom values"
                )

    used_restrictions: set[BlankNode] = set()
    for t in graph.matching(predicate=RDFS_SUBCLASSOF):
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
            views.add(SubClassOf(t.subject, t.object))
        elif isinstance(t.object, BlankNode) and t.object in restrictions:
            used_restrictions.add(t.object)
            pattern = restriction_of[t.object]
            if pattern is None:
                continue
            if isinstance(t.subject, Iri):
                views.add(SubClassOfExistential(t.subject, pattern[0], pattern[1]))
            else:
                # restriction chains deeper than one level are not recovered
                warnings.append(
                    f"restriction _:{t.object.label} hangs off blank node "
                    f"_:{t.subject.label} and is not recovered"
                )

    for node in restrictions - used_restrictions:
        warnings.append(f"restriction _:{node.label} is not the superclass of any named class")

    for t in graph.matching(predicate=RDFS_SUBPROPERTYOF):
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
            views.add(SubPropertyOf(t.subject, t.object))
    for t in graph.matching(predicate=RDFS_DOMAIN):
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
            views.add(Domain(t.subject, t.object))
    for t in graph.matching(predicate=RDFS_RANGE):
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
            views.add(Range(t.subject, t.object))
    for t in graph.triples:
        if isinstance(t.subject, Iri) and isinstance(t.object, Literal):
            views.add(AnnotationAssertion(t.subject, t.predicate, t.object))

    return AxiomScan(
        views=tuple(sorted(views, key=lambda v: v.sort_key())),
        warnings=tuple(sorted(warnings)),
    )


def axiom_views(graph: OntologyGraph) -> tuple[AxiomView, ...]:
    """The deterministic ordered axiom view list for a graph."""
    return scan_axioms(graph).views


def axioms_to_triples(axioms: list[LogicalAxiom] | tuple[LogicalAxiom, ...]) -> list[Triple]:
    """Re-express logical axiom views as triples (existentials expand to
    the four-triple restriction pattern with fresh blank nodes)."""
    triples: list[Triple] = []
    counter = 0
    for ax in sorted(axioms, key=lambda a: a.sort_key()):
        if isinstance(ax, SubClassOf):
            triples.append(Triple(ax.sub, RDFS_SUBCLASSOF, ax.sup))
        elif isinstance(ax, SubClassOfExistential):
            node = BlankNode(f"r{counter}")
            counter += 1
            triples.append(Triple(ax.sub, RDFS_SUBCLASSOF, node))
            triples.append(Triple(node, RDF_TYPE, OWL_RESTRICTION))
            triples.append(Triple(node, OWL_ON_PROPERTY, ax.property))
            triples.append(Triple(node, OWL_SOME_VALUES_FROM, ax.filler))
        elif isinstance(ax, SubPropertyOf):
            triples.append(Triple(ax.sub, RDFS_SUBPROPERTYOF, ax.sup))
        elif isinstance(ax, Domain):
            triples.append(Triple(ax.property, RDFS_DOMAIN, ax.cls))
        elif isinstance(ax, Range):
            triples.append(Triple(ax.property, RDFS_RANGE, ax.cls))
        else:
            raise TypeError(f"not a logical axiom: {ax!r}")
    return triples
