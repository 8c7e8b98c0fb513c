"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line (visible even under pytest capture). Run with ``pytest
tests/test_acceptance.py -v`` for the per-criterion breakdown.
"""
from __future__ import annotations

import functools
import random
import time
from pathlib import Path

import numpy as np

import oracles
from conftest import DATA_DIR, random_graph
from ontogen import random_ontology, random_seeds, tuple_of

from odpkit.evaluation import score
from odpkit.extraction import (
    ModuleRequest,
    apply_intermediates,
    emit_module,
    extract_bot,
    extract_module,
    extract_star,
    extract_top,
)
from odpkit.matching import MatcherConfig, RetrievedSet, SimilarityMatrix, cosine, retrieve
from odpkit.pipeline import load_config, run_pipeline
from odpkit.rdf import Iri, isomorphic, parse_document, serialize_ntriples

GOLDEN = Path(__file__).parent / "golden"


def criterion(number: int, title: str):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            import conftest

            try:
                fn(*args, **kwargs)
            except BaseException:
                conftest.ACCEPTANCE_LINES.append(f"ACCEPTANCE {number}: FAIL - {title}")
                raise
            conftest.ACCEPTANCE_LINES.append(f"ACCEPTANCE {number}: PASS - {title}")

        return wrapper

    return decorate


# (ontology, requirement) -> (P, R, F1, GT, Ext) published in the evaluation
# table; requirements 1..3 are the Process/Resource/Project categories.
PUBLISHED_CELLS = {
    ("GPO", "req1"): (0.10, 0.17, 0.12, 12, 20),
    ("GPO", "req2"): (0.05, 0.11, 0.07, 9, 20),
    ("P-Plan", "req1"): (0.56, 0.62, 0.59, 8, 9),
    ("P-Plan", "req2"): (0.44, 0.67, 0.53, 6, 9),
    ("WILD", "req1"): (0.00, 0.00, 0.00, 11, 0),
    ("WILD", "req2"): (0.00, 0.00, 0.00, 9, 0),
    ("M4I", "req1"): (0.05, 0.12, 0.07, 8, 20),
    ("M4I", "req2"): (0.25, 0.28, 0.26, 18, 20),
    ("M4I", "req3"): (0.15, 0.25, 0.19, 12, 20),
    ("OPMW", "req1"): (0.45, 0.69, 0.55, 13, 20),
    ("OPMW", "req2"): (0.15, 0.60, 0.24, 5, 20),
    ("PMDcore", "req1"): (0.25, 0.62, 0.36, 8, 20),
    ("PMDcore", "req2"): (0.15, 0.33, 0.21, 9, 20),
    ("PMDcore", "req3"): (0.15, 0.75, 0.25, 4, 20),
}


def row_for(hits: int, ext: int, gt: int):
    retrieved = [f"http://e.org/hit{i}" for i in range(hits)]
    retrieved += [f"http://e.org/miss{i}" for i in range(ext - hits)]
    truth = {Iri(f"http://e.org/hit{i}") for i in range(hits)}
    truth |= {Iri(f"http://e.org/only{i}") for i in range(gt - hits)}
    rset = RetrievedSet("req", tuple((Iri(v), 1.0) for v in retrieved))
    return score(rset, truth)


def rounds_to(value: float, published: float) -> bool:
    return abs(float(f"{value:.2f}") - published) <= 0.005 + 1e-12


@criterion(1, "published-table arithmetic reproduced on every applicable cell")
def test_criterion_1_table_arithmetic():
    started = time.perf_counter()
    for (ontology, req), (p, r, f1, gt, ext) in PUBLISHED_CELLS.items():
        consistent_hits = [
            hits
            for hits in range(0, min(gt, ext) + 1)
            if rounds_to((row := row_for(hits, ext, gt)).precision, p)
            and rounds_to(row.recall, r)
            and rounds_to(row.f1, f1)
        ]
        assert len(consistent_hits) == 1, (
            f"{ontology}/{req}: hit count not unique: {consistent_hits}"
        )
        hits = consistent_hits[0]
        row = row_for(hits, ext, gt)
        assert rounds_to(row.precision, p), (ontology, req)
        assert rounds_to(row.recall, r), (ontology, req)
        assert rounds_to(row.f1, f1), (ontology, req)
    # the worked example pins hits=5 for the nine-retrieved row
    assert [
        h
        for h in range(10)
        if rounds_to(row_for(h, 9, 8).precision, 0.56)
        and rounds_to(row_for(h, 9, 8).recall, 0.62)
        and rounds_to(row_for(h, 9, 8).f1, 0.59)
    ] == [5]
    assert time.perf_counter() - started < 1.0


@criterion(2, "zero-retrieval rows score exactly 0.00/0.00/0.00")
def test_criterion_2_division_conventions():
    for gt in (9, 11, 1):
        row = row_for(0, 0, gt)
        assert (row.precision, row.recall, row.f1) == (0.0, 0.0, 0.0)
        assert f"{row.precision:.2f}" == "0.00"


@criterion(3, "module extraction equals the brute-force oracle on 200 random ontologies")
def test_criterion_3_extraction_oracle_equivalence():
    started = time.perf_counter()
    rng = random.Random(20250809)
    checked = 0
    while checked < 200:
        axioms, graph = random_ontology(rng, max_axioms=100, max_classes=40, max_properties=8)
        seeds = random_seeds(rng, axioms, rng.randint(1, 5))
        if not seeds:
            continue
        checked += 1
        seed_iris = {Iri(s) for s in seeds}

        bot_expected, _ = oracles.bot_closure(axioms, seeds)
        bot_module = extract_bot(graph, seed_iris)
        assert {tuple_of(v) for v in bot_module.axioms} == bot_expected

        top_expected, _ = oracles.top_closure(axioms, seeds)
        assert {tuple_of(v) for v in extract_top(graph, seed_iris).axioms} == top_expected

        star_module = extract_star(graph, seed_iris)
        assert {tuple_of(v) for v in star_module.axioms} == oracles.star_closure(axioms, seeds)
        assert star_module.axioms <= bot_module.axioms
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"oracle harness took {elapsed:.1f}s"


@criterion(4, "intermediates pruning preserves hierarchy reachability (zero violations)")
def test_criterion_4_entailment_preservation():
    rng = random.Random(20250809)
    checked = 0
    violations = 0
    while checked < 200:
        axioms, graph = random_ontology(rng, max_axioms=100, max_classes=40, max_properties=8)
        seeds = random_seeds(rng, axioms, rng.randint(1, 5))
        if not seeds:
            continue
        checked += 1
        seed_iris = {Iri(s) for s in seeds}
        module = extract_bot(graph, seed_iris)
        before = {tuple_of(v) for v in module.axioms}
        for mode in ("none", "minimal"):
            pruned = apply_intermediates(module, graph, seed_iris, mode)
            after = {tuple_of(v) for v in pruned.axioms}
            retained = {s.value for s in pruned.signature}
            for kind in ("sub", "subp"):
                for x in retained:
                    reach_before = oracles.hierarchy_reachable(before, kind, x) & retained
                    reach_after = oracles.hierarchy_reachable(after, kind, x) & retained
                    if reach_before != reach_after:
                        violations += 1
    assert violations == 0


@criterion(5, "toy pipeline is byte-deterministic across three runs")
def test_criterion_5_pipeline_determinism(tmp_path):
    import json

    started = time.perf_counter()
    file_hashes = []
    byte_trees = []
    for i in range(3):
        run_dir = tmp_path / f"run{i}"
        run_dir.mkdir()
        config_path = run_dir / "config.yaml"
        config_path.write_text(
            "\n".join(
                [
                    "ontologies:",
                    "  - name: toy",
                    f"    path: {DATA_DIR / 'toy_process.ttl'}",
                    f"requirements: {DATA_DIR / 'requirements.yaml'}",
                    f"ground_truth: {DATA_DIR / 'toy_ground_truth.csv'}",
                    "provider: {kind: local-hash, dimension: 512}",
                    "matcher: {theta: 0.0, k: 20}",
                    "extraction: {method: star, intermediates: none}",
                    "output: out",
                ]
            ),
            encoding="utf-8",
        )
        assert run_pipeline(load_config(config_path)) == 0
        out = run_dir / "out"
        manifest = json.loads((out / "manifest.json").read_text())
        file_hashes.append(manifest["files"])
        byte_trees.append(
            {
                str(p.relative_to(out)): p.read_bytes()
                for p in sorted(out.rglob("*"))
                if p.is_file() and p.name != "manifest.json"
            }
        )
    assert file_hashes[0] == file_hashes[1] == file_hashes[2]
    assert byte_trees[0] == byte_trees[1] == byte_trees[2]
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"three toy runs took {elapsed:.1f}s"


@criterion(6, "parse -> canonical serialize -> parse is isomorphic and a fixpoint")
def test_criterion_6_parser_round_trip():
    rng = random.Random(60321)
    for _ in range(100):
        graph = random_graph(rng, max_triples=25, max_blanks=6)
        data = serialize_ntriples(graph)
        reparsed = parse_document(data, "ntriples")
        assert isomorphic(graph, reparsed)
        assert serialize_ntriples(reparsed) == data
    for fixture, syntax in [
        (DATA_DIR / "toy_process.nt", "ntriples"),
        (DATA_DIR / "toy_process.ttl", "turtle"),
        *[(p, "turtle") for p in sorted(GOLDEN.glob("*.ttl"))],
    ]:
        graph = parse_document(fixture.read_bytes(), syntax)
        data = serialize_ntriples(graph)
        reparsed = parse_document(data, "ntriples")
        assert isomorphic(graph, reparsed), fixture
        assert serialize_ntriples(reparsed) == data, fixture


@criterion(7, "matcher properties hold on 1000 random matrices; cosine matches the oracle")
def test_criterion_7_matcher_properties():
    rng = np.random.default_rng(7777)
    config = MatcherConfig(theta=0.1, k=20)
    for round_no in range(1000):
        n = int(rng.integers(0, 40))
        dim = int(rng.integers(2, 8))
        sentence = rng.normal(size=dim)
        sentence /= np.linalg.norm(sentence)
        concepts = rng.normal(size=(n, dim))
        # a few duplicated concept vectors force score ties
        if n >= 4:
            concepts[1] = concepts[0]
            concepts[3] = concepts[2]

        def matrix_from(raw: np.ndarray) -> SimilarityMatrix:
            scores = np.zeros((1, len(raw)))
            for col, vec in enumerate(raw):
                scores[0, col] = cosine(sentence, vec)
            iris = tuple(Iri(f"http://e.org/c{i:03d}") for i in range(len(raw)))
            return SimilarityMatrix(("r1",), iris, scores)

        (first,) = retrieve(matrix_from(concepts), config)
        (second,) = retrieve(matrix_from(concepts), config)
        assert first == second  # tie-break determinism
        assert first.ext_count <= config.k
        assert all(s >= config.theta for _, s in first.ranked)
        pairs = list(first.ranked)
        assert pairs == sorted(pairs, key=lambda e: (-e[1], e[0]))
        # positive scaling of every concept vector changes nothing
        scale = float(rng.uniform(0.01, 50.0))
        (scaled,) = retrieve(matrix_from(concepts * scale), config)
        assert scaled.iris == first.iris

    py_rng = random.Random(4242)
    fixed_pairs = []
    for _ in range(20):
        a = [py_rng.randint(-9, 9) for _ in range(py_rng.randint(2, 6))]
        b = [py_rng.randint(-9, 9) for _ in range(len(a))]
        fixed_pairs.append((a, b))
    for a, b in fixed_pairs:
        assert abs(cosine(a, b) - oracles.cosine_exact(a, b)) <= 1e-9
    # scale invariance at the vector level
    for a, b in fixed_pairs:
        if any(a) and any(b):
            assert abs(cosine(a, [3 * x for x in b]) - cosine(a, b)) <= 1e-12


@criterion(8, "documented chain/tree extraction examples match their golden files")
def test_criterion_8_worked_examples(toy_graph):
    from odpkit.rdf import OntologyGraph, SubClassOf, axioms_to_triples

    ns = "http://gen.example/"
    a, b, c, a2 = Iri(ns + "A"), Iri(ns + "B"), Iri(ns + "C"), Iri(ns + "Aprime")
    chain = OntologyGraph.from_triples(
        axioms_to_triples([SubClassOf(a, b), SubClassOf(b, c)])
    )
    tree = OntologyGraph.from_triples(
        axioms_to_triples([SubClassOf(a, b), SubClassOf(a2, b), SubClassOf(b, c)])
    )

    star_chain = extract_module(
        chain, ModuleRequest(seeds=frozenset({b}), method="star", intermediates="all"),
        source="chain",
    )
    assert set(star_chain.axioms) == {SubClassOf(b, c)}
    assert emit_module(star_chain) == (GOLDEN / "star_chain.ttl").read_bytes()

    collapse = extract_module(
        chain, ModuleRequest(seeds=frozenset({a, c}), method="star", intermediates="none"),
        source="chain",
    )
    assert set(collapse.axioms) == {SubClassOf(a, c)}
    assert emit_module(collapse) == (GOLDEN / "chain_none.ttl").read_bytes()

    minimal = extract_module(
        tree, ModuleRequest(seeds=frozenset({a, a2, c}), method="bot", intermediates="minimal"),
        source="tree",
    )
    assert set(minimal.axioms) == {SubClassOf(a, b), SubClassOf(a2, b), SubClassOf(b, c)}
    assert emit_module(minimal) == (GOLDEN / "tree_minimal.ttl").read_bytes()

    none_mode = extract_module(
        tree, ModuleRequest(seeds=frozenset({a, a2, c}), method="bot", intermediates="none"),
        source="tree",
    )
    assert set(none_mode.axioms) == {SubClassOf(a, c), SubClassOf(a2, c)}
    assert emit_module(none_mode) == (GOLDEN / "tree_none.ttl").read_bytes()
