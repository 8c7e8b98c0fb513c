"""Random ontology instances shared by the extraction test harnesses.

Instances come in two synchronized forms: plain axiom tuples for the
brute-force oracles and an OntologyGraph built from the equivalent axiom
views for the implementation under test.
"""
from __future__ import annotations

import random

from odpkit.rdf import (
    Domain,
    Iri,
    OntologyGraph,
    Range,
    SubClassOf,
    SubClassOfExistential,
    SubPropertyOf,
    axioms_to_triples,
)

NS = "http://gen.example/"


def view_of(ax: tuple):
    kind = ax[0]
    if kind == "sub":
        return SubClassOf(Iri(ax[1]), Iri(ax[2]))
    if kind == "ex":
        return SubClassOfExistential(Iri(ax[1]), Iri(ax[2]), Iri(ax[3]))
    if kind == "subp":
        return SubPropertyOf(Iri(ax[1]), Iri(ax[2]))
    if kind == "dom":
        return Domain(Iri(ax[1]), Iri(ax[2]))
    if kind == "rng":
        return Range(Iri(ax[1]), Iri(ax[2]))
    raise ValueError(ax)


def tuple_of(view) -> tuple:
    if isinstance(view, SubClassOf):
        return ("sub", view.sub.value, view.sup.value)
    if isinstance(view, SubClassOfExistential):
        return ("ex", view.sub.value, view.property.value, view.filler.value)
    if isinstance(view, SubPropertyOf):
        return ("subp", view.sub.value, view.sup.value)
    if isinstance(view, Domain):
        return ("dom", view.property.value, view.cls.value)
    if isinstance(view, Range):
        return ("rng", view.property.value, view.cls.value)
    raise ValueError(view)


def random_ontology(
    rng: random.Random,
    max_axioms: int = 100,
    max_classes: int = 40,
    max_properties: int = 8,
) -> tuple[set[tuple], OntologyGraph]:
    n_classes = rng.randint(2, max_classes)
    n_props = rng.randint(1, max_properties)
    classes = [f"{NS}C{i}" for i in range(n_classes)]
    props = [f"{NS}p{i}" for i in range(n_props)]
    axioms: set[tuple] = set()
    for _ in range(rng.randint(0, max_axioms)):
        roll = rng.random()
        if roll < 0.55:
            axioms.add(("sub", rng.choice(classes), rng.choice(classes)))
        elif roll < 0.75:
            axioms.add(("ex", rng.choice(classes), rng.choice(props), rng.choice(classes)))
        elif roll < 0.85:
            axioms.add(("subp", rng.choice(props), rng.choice(props)))
        elif roll < 0.93:
            axioms.add(("dom", rng.choice(props), rng.choice(classes)))
        else:
            axioms.add(("rng", rng.choice(props), rng.choice(classes)))
    graph = OntologyGraph.from_triples(axioms_to_triples([view_of(ax) for ax in axioms]))
    return axioms, graph


def random_seeds(rng: random.Random, axioms: set[tuple], size: int) -> set[str]:
    pool = sorted({iri for ax in axioms for iri in ax[1:]})
    if not pool:
        return set()
    return set(rng.sample(pool, min(size, len(pool))))
