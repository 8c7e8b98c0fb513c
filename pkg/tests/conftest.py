from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from odpkit.rdf import BlankNode, Iri, Literal, OntologyGraph, Triple, load_graph

DATA_DIR = Path(__file__).parent.parent / "src" / "odpkit" / "data"

# one "ACCEPTANCE n: PASS/FAIL" line per criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def toy_nt_path() -> Path:
    return DATA_DIR / "toy_process.nt"


@pytest.fixture(scope="session")
def toy_ttl_path() -> Path:
    return DATA_DIR / "toy_process.ttl"


@pytest.fixture(scope="session")
def toy_graph(toy_ttl_path) -> OntologyGraph:
    return load_graph(toy_ttl_path)


def random_graph(rng: random.Random, max_triples: int = 30, max_blanks: int = 5) -> OntologyGraph:
    """A random graph mixing IRIs, blanks, and escape-heavy literals."""
    iris = [Iri(f"http://t.example/{tag}") for tag in "abcdefgh"]
    preds = [Iri(f"http://t.example/p{i}") for i in range(4)]
    blanks = [BlankNode(f"n{i}") for i in range(max_blanks)]
    lexicals = ["plain", 'quo"te', "new\nline", "tab\tchar", "bæck\\slash", "", "händel π"]
    datatypes = [None, Iri("http://www.w3.org/2001/XMLSchema#string")]

    def subject():
        return rng.choice(iris) if rng.random() < 0.7 else rng.choice(blanks)

    def obj():
        roll = rng.random()
        if roll < 0.45:
            return rng.choice(iris)
        if roll < 0.7:
            return rng.choice(blanks)
        lex = rng.choice(lexicals)
        if rng.random() < 0.3:
            return Literal(lex, language=rng.choice(["en", "de", "en-US"]))
        return Literal(lex, datatype=rng.choice(datatypes))

    n = rng.randint(0, max_triples)
    return OntologyGraph.from_triples(
        Triple(subject(), rng.choice(preds), obj()) for _ in range(n)
    )
