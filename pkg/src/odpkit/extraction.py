"""Seed-based ontology module extraction.

Four methods over the recognized axiom views:

* ``bot`` — upward fixpoint: starting from the seed signature, pull in
  every axiom anchored on it from below (subclass/subproperty edges whose
  subject is in the signature, existentials on their subject, domain and
  range on their property), growing the signature with each axiom's IRIs.
* ``top`` — the downward mirror: subclass/subproperty edges whose
  superclass side is already in the signature, existentials whose filler
  or property is.
* ``star`` — alternating upward and downward passes over a shrinking
  axiom set until stable. The signature accumulated by one pass seeds the
  next, so on the chain A ⊑ B ⊑ C with seed {B} the upward pass keeps
  B ⊑ C and the downward pass retains it because C is already in the
  accumulated signature; the final module is exactly {B ⊑ C}.
* ``subset`` — materializes inherited existential edges between seeds and
  the transitive-reduction subclass pairs among seeds; nothing else.

Intermediates handling then prunes hierarchy-only classes (``none``), or
keeps branching points with two or more retained direct subclasses
(``minimal``), reconnecting each collapsed chain with a single edge.
Property hierarchies are pruned by the same rules.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from . import __version__
from .rdf import (
    Iri,
    Literal,
    LogicalAxiom,
    OntologyGraph,
    SubClassOf,
    SubClassOfExistential,
    SubPropertyOf,
    Triple,
    axiom_views,
    AnnotationAssertion,
)

METHODS = ("star", "bot", "top", "subset")
INTERMEDIATES_MODES = ("all", "minimal", "none")


class ExtractionError(ValueError):
    """Invalid extraction request."""


class UnknownSeedsError(ExtractionError):
    """None of the requested seed IRIs occur in the ontology."""

    def __init__(self, seeds: list[Iri]) -> None:
        super().__init__(
            "no seed IRI occurs in the ontology signature: "
            + ", ".join(s.value for s in sorted(seeds))
        )
        self.seeds = tuple(sorted(seeds))


@dataclass(frozen=True)
class ModuleRequest:
    seeds: frozenset[Iri]
    method: str = "star"
    intermediates: str = "none"
    include_annotations: bool = True

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ExtractionError("seeds must be non-empty")
        if self.method not in METHODS:
            raise ExtractionError(f"method must be one of {METHODS}")
        if self.intermediates not in INTERMEDIATES_MODES:
            raise ExtractionError(f"intermediates must be one of {INTERMEDIATES_MODES}")


@dataclass(frozen=True)
class OntologyModule:
    axioms: frozenset  # of LogicalAxiom
    signature: frozenset  # of Iri
    extra_triples: frozenset = frozenset()  # annotation triples for retained IRIs
    request: ModuleRequest | None = None
    source: str = ""
    source_iri: Iri | None = None
    unknown_seeds: tuple[Iri, ...] = ()


def _logical_axioms(graph: OntologyGraph) -> frozenset:
    return frozenset(v for v in axiom_views(graph) if not isinstance(v, AnnotationAssertion))


def _upward_anchor(axiom: LogicalAxiom) -> Iri:
    if isinstance(axiom, (SubClassOf, SubClassOfExistential, SubPropertyOf)):
        return axiom.sub
    return axiom.property  # Domain / Range


def _downward_anchors(axiom: LogicalAxiom, mirror_domain_range: bool) -> tuple[Iri, ...]:
    if isinstance(axiom, (SubClassOf, SubPropertyOf)):
        return (axiom.sup,)
    if isinstance(axiom, SubClassOfExistential):
        return (axiom.filler, axiom.property)
    if mirror_domain_range:
        return (axiom.cls,)  # Domain / Range anchored on the class side
    return ()


def _closure(
    axioms: frozenset, seeds: set[Iri], anchors
) -> tuple[frozenset, frozenset]:
    """Generic worklist fixpoint: add axioms whose anchor IRIs intersect
    the growing signature; return (module axioms, final signature)."""
    by_anchor: dict[Iri, list] = {}
    for axiom in axioms:
        for anchor in anchors(axiom):
            by_anchor.setdefault(anchor, []).append(axiom)
    sigma = set(seeds)
    module: set = set()
    queue = list(sigma)
    while queue:
        iri = queue.pop()
        for axiom in by_anchor.get(iri, ()):
            if axiom in module:
                continue
            module.add(axiom)
            for member in axiom.iris():
                if member not in sigma:
                    sigma.add(member)
                    queue.append(member)
    return frozenset(module), frozenset(sigma)


def _bot_pass(axioms: frozenset, seeds: set[Iri]) -> tuple[frozenset, frozenset]:
    return _closure(axioms, seeds, lambda ax: (_upward_anchor(ax),))


def _top_pass(
    axioms: frozenset, seeds: set[Iri], mirror_domain_range: bool
) -> tuple[frozenset, frozenset]:
    return _closure(axioms, seeds, lambda ax: _downward_anchors(ax, mirror_domain_range))


def extract_bot(graph: OntologyGraph, seeds: set[Iri]) -> OntologyModule:
    """Seeds plus everything reachable upward (superclasses, super-
    properties, existential targets, domains and ranges of seed
    properties)."""
    module, sigma = _bot_pass(_logical_axioms(graph), set(seeds))
    return OntologyModule(axioms=module, signature=sigma)


def extract_top(graph: OntologyGraph, seeds: set[Iri]) -> OntologyModule:
    """Seeds plus everything reachable downward (subclasses and
    subproperties, and existentials pointing at the signature)."""
    module, sigma = _top_pass(_logical_axioms(graph), set(seeds), mirror_domain_range=False)
    return OntologyModule(axioms=module, signature=sigma)


def extract_star(graph: OntologyGraph, seeds: set[Iri]) -> OntologyModule:
    """Alternating upward/downward fixpoint over a shrinking axiom set,
    each pass reusing the signature the previous pass accumulated."""
    module = _logical_axioms(graph)
    sigma = frozenset(seeds)
    while True:
        up, sigma = _bot_pass(module, set(sigma))
        down, sigma = _top_pass(up, set(sigma), mirror_domain_range=True)
        if down == module:
            break
        module = down
    signature = set(seeds)
    for axiom in module:
        signature.update(axiom.iris())
    return OntologyModule(axioms=module, signature=frozenset(signature))


def _subclass_edges(axioms) -> dict[Iri, set[Iri]]:
    edges: dict[Iri, set[Iri]] = {}
    for axiom in axioms:
        if isinstance(axiom, SubClassOf):
            edges.setdefault(axiom.sub, set()).add(axiom.sup)
    return edges


def _reachable(edges: dict[Iri, set[Iri]], start: Iri, skip: Iri | None = None) -> set[Iri]:
    """Reflexive-transitive closure from start, optionally avoiding one
    intermediate vertex."""
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nxt in edges.get(node, ()):
            if nxt == skip or nxt in seen:
                continue
            seen.add(nxt)
            stack.append(nxt)
    return seen


def extract_subset(graph: OntologyGraph, seeds: set[Iri]) -> OntologyModule:
    """Materialized existential edges between seeds (inherited along the
    subclass hierarchy) plus entailed subclass pairs among seeds that no
    unavoidable intermediate seed decomposes."""
    axioms = _logical_axioms(graph)
    edges = _subclass_edges(axioms)
    seed_list = sorted(seeds)
    reach = {seed: _reachable(edges, seed) for seed in seed_list}

    module: set = set()
    properties: set[Iri] = set()
    existentials = [ax for ax in axioms if isinstance(ax, SubClassOfExistential)]
    for seed in seed_list:
        for ex in existentials:
            if ex.filler in seeds and ex.sub in reach[seed]:
                module.add(SubClassOfExistential(seed, ex.property, ex.filler))
                properties.add(ex.property)

    for a in seed_list:
        for b in seed_list:
            if a == b or b not in reach[a]:
                continue
            intermediates = [
                s for s in seed_list if s not in (a, b) and s in reach[a] and b in reach[s]
            ]
            # drop the pair when some seed sits on every witnessing chain
            if any(b not in _reachable(edges, a, skip=s) for s in intermediates):
                continue
            module.add(SubClassOf(a, b))

    return OntologyModule(axioms=frozenset(module), signature=frozenset(seeds) | properties)


_EXTRACTORS = {
    "bot": extract_bot,
    "top": extract_top,
    "star": extract_star,
    "subset": extract_subset,
}


def _occurrence_kinds(axioms) -> dict[Iri, set[str]]:
    kinds: dict[Iri, set[str]] = {}
    for axiom in axioms:
        name = type(axiom).__name__
        for iri in axiom.iris():
            kinds.setdefault(iri, set()).add(name)
    return kinds


def _collapse_hierarchy(
    axioms: set, removed: set[Iri], axiom_type
) -> set:
    """Replace each maximal chain through removed nodes with one direct
    edge between its retained endpoints."""
    edges: dict[Iri, set[Iri]] = {}
    for axiom in axioms:
        if isinstance(axiom, axiom_type):
            edges.setdefault(axiom.sub, set()).add(axiom.sup)
    kept = {ax for ax in axioms if not isinstance(ax, axiom_type)}
    for axiom in axioms:
        if isinstance(axiom, axiom_type) and axiom.sub not in removed and axiom.sup not in removed:
            kept.add(axiom)
    # chains: retained X -> removed+ -> retained Y
    retained_subs = {ax.sub for ax in axioms if isinstance(ax, axiom_type)} - removed
    for start in retained_subs:
        stack = [n for n in edges.get(start, ()) if n in removed]
        visited: set[Iri] = set()
        while stack:
            node = stack.pop()
            if node in visited:
                continue
            visited.add(node)
            for nxt in edges.get(node, ()):
                if nxt in removed:
                    stack.append(nxt)
                elif nxt != start:
                    kept.add(axiom_type(start, nxt))
    return kept


def apply_intermediates(
    module: OntologyModule, graph: OntologyGraph, seeds: set[Iri], mode: str
) -> OntologyModule:
    """Prune intermediate hierarchy-only IRIs per the requested mode and
    reconnect collapsed chains."""
    if mode not in INTERMEDIATES_MODES:
        raise ExtractionError(f"intermediates must be one of {INTERMEDIATES_MODES}")
    if mode == "all":
        return module

    axioms = set(module.axioms)
    kinds = _occurrence_kinds(axioms)
    removable = {
        iri
        for iri, kind_set in kinds.items()
        if iri not in seeds and (kind_set == {"SubClassOf"} or kind_set == {"SubPropertyOf"})
    }

    if mode == "minimal":
        # rescue branching points: >= 2 distinct retained direct children
        children: dict[Iri, set[Iri]] = {}
        for axiom in axioms:
            if isinstance(axiom, (SubClassOf, SubPropertyOf)):
                children.setdefault(axiom.sup, set()).add(axiom.sub)
        changed = True
        while changed:
            changed = False
            for iri in sorted(removable):
                retained_children = {c for c in children.get(iri, ()) if c not in removable}
                if len(retained_children) >= 2:
                    removable.discard(iri)
                    changed = True

    pruned = _collapse_hierarchy(axioms, removable, SubClassOf)
    pruned = _collapse_hierarchy(pruned, removable, SubPropertyOf)
    signature = frozenset(iri for iri in module.signature if iri not in removable)
    extra = frozenset(
        t for t in module.extra_triples if not (isinstance(t.subject, Iri) and t.subject in removable)
    )
    return replace(module, axioms=frozenset(pruned), signature=signature, extra_triples=extra)


def _annotation_triples(graph: OntologyGraph, signature: frozenset) -> frozenset:
    return frozenset(
        t
        for t in graph.triples
        if isinstance(t.subject, Iri)
        and t.subject in signature
        and isinstance(t.object, Literal)
    )


def _ontology_iri(graph: OntologyGraph) -> Iri | None:
    from .rdf.model import OWL_ONTOLOGY, RDF_TYPE

    candidates = sorted(
        t.subject
        for t in graph.matching(predicate=RDF_TYPE, object=OWL_ONTOLOGY)
        if isinstance(t.subject, Iri)
    )
    return candidates[0] if candidates else None


def extract_module(
    graph: OntologyGraph, request: ModuleRequest, source: str = ""
) -> OntologyModule:
    """Validate seeds, run the requested method, prune intermediates, and
    attach annotation triples for the retained signature."""
    signature = graph.signature()
    known = {s for s in request.seeds if s in signature}
    unknown = tuple(sorted(s for s in request.seeds if s not in signature))
    if not known:
        raise UnknownSeedsError(list(request.seeds))

    module = _EXTRACTORS[request.method](graph, known)
    module = apply_intermediates(module, graph, known, request.intermediates)
    extra = (
        _annotation_triples(graph, module.signature)
        if request.include_annotations
        else frozenset()
    )
    return replace(
        module,
        extra_triples=extra,
        request=request,
        source=source,
        source_iri=_ontology_iri(graph),
        unknown_seeds=unknown,
    )


# -- seeds files and Turtle emission ----------------------------------------


def _strip_seed_comment(line: str) -> str:
    # '#' opens a comment only at line start or after whitespace, so IRI
    # fragments survive
    for idx, ch in enumerate(line):
        if ch == "#" and (idx == 0 or line[idx - 1] in " \t"):
            return line[:idx]
    return line


def load_seeds(text: str) -> list[Iri]:
    """One IRI per line; '#' starts a comment."""
    seeds: list[Iri] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_seed_comment(raw).strip()
        if not line:
            continue
        try:
            seeds.append(Iri(line))
        except Exception as exc:
            raise ExtractionError(f"seeds line {line_no}: {exc}") from exc
    return seeds


TOOL_NS = "urn:odpkit:vocab:"
MODULE_NS = "urn:odpkit:module:"

_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "ok": TOOL_NS,
}


def _turtle_term(term, prefixes: dict[str, str]) -> str:
    from .rdf.ntriples import format_term

    if isinstance(term, Iri):
        for prefix, ns in prefixes.items():
            if term.value.startswith(ns):
                local = term.value[len(ns):]
                if local and all(c.isalnum() or c in "_-" for c in local):
                    return f"{prefix}:{local}"
    return format_term(term)


def emit_module(module: OntologyModule) -> bytes:
    """Turtle for a module: provenance-annotated ontology header, the
    logical axioms as triples, then annotation assertions."""
    from .rdf import axioms_to_triples
    from .rdf.model import OWL_ONTOLOGY, RDF_TYPE

    request = module.request or ModuleRequest(
        seeds=frozenset(module.signature) or frozenset({Iri("urn:odpkit:empty")}),
        method="star",
    )
    source_tag = module.source or "ontology"
    module_iri = Iri(f"{MODULE_NS}{source_tag}:{request.method}:{request.intermediates}")

    triples: list[Triple] = [Triple(module_iri, RDF_TYPE, OWL_ONTOLOGY)]
    if module.source_iri is not None:
        triples.append(Triple(module_iri, Iri(TOOL_NS + "sourceOntology"), module.source_iri))
    if module.source:
        triples.append(Triple(module_iri, Iri(TOOL_NS + "sourceName"), Literal(module.source)))
    triples.append(Triple(module_iri, Iri(TOOL_NS + "method"), Literal(request.method)))
    triples.append(Triple(module_iri, Iri(TOOL_NS + "intermediates"), Literal(request.intermediates)))
    triples.append(Triple(module_iri, Iri(TOOL_NS + "toolVersion"), Literal(__version__)))
    for seed in sorted(request.seeds):
        triples.append(Triple(module_iri, Iri(TOOL_NS + "seed"), seed))

    triples.extend(axioms_to_triples(sorted(module.axioms, key=lambda a: a.sort_key())))
    triples.extend(sorted(module.extra_triples, key=lambda t: t.sort_key()))

    lines = [f"@prefix {p}: <{ns}> ." for p, ns in _PREFIXES.items()]
    lines.append("")
    by_subject: dict = {}
    subject_order: list = []
    for t in triples:
        key = t.subject
        if key not in by_subject:
            by_subject[key] = []
            subject_order.append(key)
        by_subject[key].append(t)

    def subject_sort(term) -> tuple:
        # header first, then IRIs, then blanks in emission order
        if term == module_iri:
            return (0, "")
        if isinstance(term, Iri):
            return (1, term.value)
        return (2, term.label)

    for subject in sorted(subject_order, key=subject_sort):
        group = by_subject[subject]
        group.sort(key=lambda t: t.sort_key())
        subject_text = _turtle_term(subject, _PREFIXES)
        parts = [
            f"{_turtle_term(t.predicate, _PREFIXES)} {_turtle_term(t.object, _PREFIXES)}"
            for t in group
        ]
        if len(parts) == 1:
            lines.append(f"{subject_text} {parts[0]} .")
        else:
            lines.append(f"{subject_text} {parts[0]} ;")
            lines.extend(f"    {part} ;" for part in parts[1:-1])
            lines.append(f"    {parts[-1]} .")
    return ("\n".join(lines) + "\n").encode("utf-8")
