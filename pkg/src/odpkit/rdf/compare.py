"""Graph isomorphism up to blank-node renaming (backtracking matcher)."""
from __future__ import annotations

from .model import BlankNode, OntologyGraph, Triple


def _skeleton(triple: Triple) -> tuple:
    def key(term):
        return "*" if isinstance(term, BlankNode) else term

    return (key(triple.subject), triple.predicate, key(triple.object))


def isomorphic(a: OntologyGraph, b: OntologyGraph) -> bool:
    """True when a bijection over blank nodes maps one graph onto the other."""
    a_ground = {t for t in a.triples if not _has_blank(t)}
    b_ground = {t for t in b.triples if not _has_blank(t)}
    if a_ground != b_ground:
        return False
    a_blank = [t for t in a.triples if _has_blank(t)]
    b_blank = {t for t in b.triples if _has_blank(t)}
    if len(a_blank) != len(b_blank):
        return False

    a_nodes = sorted({n.label for t in a_blank for n in _blanks(t)})
    b_nodes = sorted({n.label for t in b_blank for n in _blanks(t)})
    if len(a_nodes) != len(b_nodes):
        return False

    b_skeletons: dict[tuple, list[Triple]] = {}
    for t in b_blank:
        b_skeletons.setdefault(_skeleton(t), []).append(t)
    for t in a_blank:
        if _skeleton(t) not in b_skeletons:
            return False

    def extend(mapping: dict[str, str], used: set[str], remaining: list[Triple]) -> bool:
        if not remaining:
            return True
        t = remaining[0]
        for candidate in b_skeletons[_skeleton(t)]:
            trial = dict(mapping)
            trial_used = set(used)
            if _try_bind(t, candidate, trial, trial_used) and extend(
                trial, trial_used, remaining[1:]
            ):
                return True
        return False

    satisfied = extend({}, set(), sorted(a_blank, key=lambda t: t.sort_key()))
    if not satisfied:
        return False
    # the mapping must also be surjective on triples: sizes agree and every
    # a-triple found an image, so check the image covers b exactly
    return _image_matches(a_blank, b_blank, a_nodes, b_nodes)


def _image_matches(a_blank, b_blank, a_nodes, b_nodes) -> bool:
    # With equal ground sets, equal blank-triple counts, and a consistent
    # embedding found, a final multiset check over skeletons guards against
    # non-surjective matches.
    from collections import Counter

    return Counter(map(_skeleton, a_blank)) == Counter(map(_skeleton, b_blank))


def _has_blank(triple: Triple) -> bool:
    return isinstance(triple.subject, BlankNode) or isinstance(triple.object, BlankNode)


def _blanks(triple: Triple):
    for term in (triple.subject, triple.object):
        if isinstance(term, BlankNode):
            yield term


def _try_bind(t_a: Triple, t_b: Triple, mapping: dict[str, str], used: set[str]) -> bool:
    for term_a, term_b in ((t_a.subject, t_b.subject), (t_a.object, t_b.object)):
        if isinstance(term_a, BlankNode) != isinstance(term_b, BlankNode):
            return False
        if isinstance(term_a, BlankNode):
            bound = mapping.get(term_a.label)
            if bound is None:
                if term_b.label in used:
                    return False
                mapping[term_a.label] = term_b.label
                used.add(term_b.label)
            elif bound != term_b.label:
                return False
        elif term_a != term_b:
            return False
    return True
