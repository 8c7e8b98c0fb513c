"""Requirement-to-concept similarity scoring and thresholded retrieval.

Every requirement sentence and every concept text is embedded through
one provider; the matrix entry for (requirement, concept) aggregates the
per-sentence cosines (max by default). Retrieval keeps concepts scoring
at least theta, sorted by descending score with ascending-IRI tie-break,
cut off at k.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np
import yaml

from .corpus import ConceptDocument
from .embeddings import EmbeddingProvider, EmbeddingVector
from .rdf import Iri

DEFAULT_K = 20
DEFAULT_THETA = 0.0


@dataclass(frozen=True)
class Requirement:
    id: str
    title: str
    sentences: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sentences:
            raise ValueError(f"requirement {self.id!r} has no sentences")
        if any(not s.strip() for s in self.sentences):
            raise ValueError(f"requirement {self.id!r} has an empty sentence")


@dataclass(frozen=True)
class MatcherConfig:
    theta: float = DEFAULT_THETA
    k: int = DEFAULT_K
    sentence_aggregation: str = "max"  # max | mean

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [-1, 1]")
        if self.sentence_aggregation not in ("max", "mean"):
            raise ValueError("sentence_aggregation must be 'max' or 'mean'")


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    requirement_ids: tuple[str, ...]
    concept_iris: tuple[Iri, ...]
    scores: np.ndarray  # shape (len(requirement_ids), len(concept_iris))

    def __post_init__(self) -> None:
        if self.scores.shape != (len(self.requirement_ids), len(self.concept_iris)):
            raise ValueError("score matrix shape does not match its labels")
        if self.scores.size and not np.all(np.isfinite(self.scores)):
            raise ValueError("score matrix contains non-finite entries")

    def row(self, requirement_id: str) -> np.ndarray:
        return self.scores[self.requirement_ids.index(requirement_id)]


@dataclass(frozen=True)
class RetrievedSet:
    requirement_id: str
    ranked: tuple[tuple[Iri, float], ...]  # descending score, ascending-IRI ties

    @property
    def iris(self) -> tuple[Iri, ...]:
        return tuple(iri for iri, _ in self.ranked)

    @property
    def ext_count(self) -> int:
        return len(self.ranked)


def cosine(a: EmbeddingVector | Sequence[float], b: EmbeddingVector | Sequence[float]) -> float:
    """a·b / (|a||b|), taken as 0 when either vector is all zero."""
    va = a.as_array() if isinstance(a, EmbeddingVector) else np.asarray(a, dtype=np.float64)
    vb = b.as_array() if isinstance(b, EmbeddingVector) else np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape[0]} vs {vb.shape[0]}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(va, vb) / (na * nb))


def similarity_matrix(
    requirements: Sequence[Requirement],
    corpus: Sequence[ConceptDocument],
    provider: EmbeddingProvider | "ProviderConfig",
    aggregation: str = "max",
) -> SimilarityMatrix:
    """Dense requirement×concept cosine matrix (zero columns for an
    empty corpus). Accepts either a provider instance or its config."""
    from .embeddings import ProviderConfig, make_provider

    if isinstance(provider, ProviderConfig):
        provider = make_provider(provider)
    if aggregation not in ("max", "mean"):
        raise ValueError("aggregation must be 'max' or 'mean'")
    req_ids = tuple(r.id for r in requirements)
    iris = tuple(doc.iri for doc in corpus)
    if not requirements or not corpus:
        return SimilarityMatrix(req_ids, iris, np.zeros((len(req_ids), len(iris))))

    sentences: list[str] = []
    spans: list[tuple[int, int]] = []
    for req in requirements:
        spans.append((len(sentences), len(sentences) + len(req.sentences)))
        sentences.extend(req.sentences)
    texts = sentences + [doc.combined_text for doc in corpus]
    vectors = provider.embed_batch(texts)
    sentence_matrix = np.stack([v.as_array() for v in vectors[: len(sentences)]])
    concept_matrix = np.stack([v.as_array() for v in vectors[len(sentences) :]])

    # provider vectors are unit or zero, so cosine reduces to a dot product
    all_scores = sentence_matrix @ concept_matrix.T
    rows = []
    for start, end in spans:
        block = all_scores[start:end]
        rows.append(block.max(axis=0) if aggregation == "max" else block.mean(axis=0))
    return SimilarityMatrix(req_ids, iris, np.stack(rows))


def retrieve(matrix: SimilarityMatrix, config: MatcherConfig | None = None) -> list[RetrievedSet]:
    """Per requirement: concepts scoring >= theta, best first, at most k.
    The retrieved count may fall short of k when few concepts pass."""
    config = config or MatcherConfig()
    results: list[RetrievedSet] = []
    for row_index, requirement_id in enumerate(matrix.requirement_ids):
        scored = [
            (iri, float(matrix.scores[row_index, col]))
            for col, iri in enumerate(matrix.concept_iris)
            if float(matrix.scores[row_index, col]) >= config.theta
        ]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        results.append(RetrievedSet(requirement_id, tuple(scored[: config.k])))
    return results


# -- artifact formats -------------------------------------------------------


def write_matches_csv(retrieved: Sequence[RetrievedSet], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["requirement_id", "rank", "iri", "score"])
    for rset in retrieved:
        for rank, (iri, score) in enumerate(rset.ranked, start=1):
            writer.writerow([rset.requirement_id, rank, iri.value, f"{score:.6f}"])


def read_matches_csv(stream: TextIO) -> list[RetrievedSet]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["requirement_id", "rank", "iri", "score"]:
        raise ValueError("matches CSV header must be requirement_id,rank,iri,score")
    by_req: dict[str, list[tuple[int, Iri, float]]] = {}
    for row in reader:
        if not row:
            continue
        if len(row) != 4:
            raise ValueError(f"malformed matches row: {row!r}")
        req_id, rank_text, iri_value, score_text = row
        by_req.setdefault(req_id, []).append(
            (int(rank_text), Iri(iri_value), float(score_text))
        )
    out = []
    for req_id, entries in by_req.items():
        entries.sort(key=lambda e: e[0])
        out.append(RetrievedSet(req_id, tuple((iri, score) for _, iri, score in entries)))
    return out


def load_requirements(path: str | Path) -> list[Requirement]:
    """Requirements YAML: a top-level ``requirements`` list of entries
    with ``id``, ``title``, and ``sentences``."""
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or not isinstance(raw.get("requirements"), list):
        raise ValueError("requirements file must hold a top-level 'requirements' list")
    requirements: list[Requirement] = []
    seen: set[str] = set()
    for entry in raw["requirements"]:
        req = Requirement(
            id=str(entry["id"]),
            title=str(entry.get("title", entry["id"])),
            sentences=tuple(str(s) for s in entry["sentences"]),
        )
        if req.id in seen:
            raise ValueError(f"duplicate requirement id {req.id!r}")
        seen.add(req.id)
        requirements.append(req)
    return requirements
