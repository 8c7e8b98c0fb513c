"""The end-to-end batch workflow, driven by one YAML config.

Per ontology: parse, write the canonical N-Triples, build and write the
corpus, embed it, match every requirement, score against ground truth
where applicable, and emit one extracted module per applicable
requirement. A manifest records the config hash, tool version, per-stage
timings, failures, and a content hash for every output file. Failures
abort only the ontology they occur in.
"""
from __future__ import annotations

import base64
import hashlib
import io
import json
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .corpus import CorpusConfig, build_corpus, write_corpus_tsv
from .embeddings import EmbeddingProvider, ProviderConfig, make_provider
from .evaluation import (
    EvalRow,
    GroundTruth,
    load_ground_truth,
    not_applicable_row,
    render_report,
    score,
)
from .extraction import ModuleRequest, emit_module, extract_module, load_seeds
from .matching import (
    MatcherConfig,
    Requirement,
    RetrievedSet,
    SimilarityMatrix,
    load_requirements,
    retrieve,
    write_matches_csv,
)
from .rdf import Iri, load_graphs, serialize_ntriples

EXIT_OK = 0
EXIT_PARTIAL_FAILURE = 1
EXIT_CONFIG_ERROR = 2

MANIFEST_NAME = "manifest.json"


class ConfigError(ValueError):
    """The pipeline configuration is unusable."""


@dataclass(frozen=True)
class OntologySpec:
    name: str
    paths: tuple[Path, ...]  # one ontology may span several files
    format: str | None = None
    seed_files: dict = field(default_factory=dict)  # requirement_id -> Path


@dataclass(frozen=True)
class PipelineConfig:
    ontologies: tuple[OntologySpec, ...]
    requirements_path: Path
    ground_truth_path: Path | None
    corpus: CorpusConfig
    provider: ProviderConfig
    matcher: MatcherConfig
    method: str
    intermediates: str
    include_annotations: bool
    output_dir: Path
    workers: int
    config_bytes: bytes


def _data_path(name: str) -> Path:
    return Path(str(resources.files("odpkit") / "data" / name))


def _resolve(value: str, base: Path) -> Path:
    if value.startswith("data:"):
        return _data_path(value[len("data:"):])
    path = Path(value)
    return path if path.is_absolute() else (base / path)


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate the pipeline YAML."""
    config_path = Path(path)
    try:
        raw_bytes = config_path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
    try:
        raw = yaml.safe_load(raw_bytes)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a YAML mapping")
    base = config_path.parent

    onto_section = raw.get("ontologies", [])
    if not isinstance(onto_section, list):
        raise ConfigError("'ontologies' must be a list")
    extraction_raw = raw.get("extraction") or {}
    seeds_raw = extraction_raw.get("seeds") or {}
    specs: list[OntologySpec] = []
    names: set[str] = set()
    for entry in onto_section:
        if not isinstance(entry, dict) or "name" not in entry or "path" not in entry:
            raise ConfigError(f"each ontology needs 'name' and 'path': {entry!r}")
        name = str(entry["name"])
        if name in names:
            raise ConfigError(f"duplicate ontology name {name!r}")
        names.add(name)
        fmt = entry.get("format")
        if fmt is not None and fmt not in ("turtle", "ntriples"):
            raise ConfigError(f"ontology {name!r}: unsupported format {fmt!r}")
        seed_files = {
            str(req): _resolve(str(p), base)
            for req, p in (seeds_raw.get(name) or {}).items()
        }
        raw_paths = entry["path"] if isinstance(entry["path"], list) else [entry["path"]]
        if not raw_paths:
            raise ConfigError(f"ontology {name!r}: 'path' is empty")
        specs.append(
            OntologySpec(
                name=name,
                paths=tuple(_resolve(str(p), base) for p in raw_paths),
                format=fmt,
                seed_files=seed_files,
            )
        )

    requirements_path = _resolve(str(raw.get("requirements", "data:requirements.yaml")), base)
    gt_value = raw.get("ground_truth")
    ground_truth_path = _resolve(str(gt_value), base) if gt_value else None

    corpus_raw = raw.get("corpus") or {}
    try:
        corpus_config = CorpusConfig(
            annotation_properties=tuple(
                Iri(str(p)) for p in corpus_raw["annotation_properties"]
            )
            if corpus_raw.get("annotation_properties")
            else CorpusConfig().annotation_properties,
            language_filter=corpus_raw.get("language", "en"),
            include_local_name_fallback=bool(corpus_raw.get("local_name_fallback", False)),
        )
    except Exception as exc:
        raise ConfigError(f"corpus section: {exc}") from exc

    provider_raw = raw.get("provider") or {}
    cache_value = provider_raw.get("cache")
    try:
        provider_config = ProviderConfig(
            kind=provider_raw.get("kind", "local-hash"),
            dimension=int(provider_raw.get("dimension", 512)),
            endpoint=provider_raw.get("endpoint"),
            model=provider_raw.get("model", ProviderConfig().model),
            auth_token_env=provider_raw.get("auth_token_env"),
            timeout=float(provider_raw.get("timeout", 30.0)),
            max_batch_size=int(provider_raw.get("max_batch_size", 64)),
            cache_path=str(_resolve(str(cache_value), base)) if cache_value else None,
        )
    except Exception as exc:
        raise ConfigError(f"provider section: {exc}") from exc

    matcher_raw = raw.get("matcher") or {}
    try:
        matcher_config = MatcherConfig(
            theta=float(matcher_raw.get("theta", 0.0)),
            k=int(matcher_raw.get("k", 20)),
            sentence_aggregation=matcher_raw.get("sentence_aggregation", "max"),
        )
    except Exception as exc:
        raise ConfigError(f"matcher section: {exc}") from exc

    method = extraction_raw.get("method", "star")
    intermediates = extraction_raw.get("intermediates", "none")
    if method not in ("star", "bot", "top", "subset"):
        raise ConfigError(f"extraction method {method!r} unknown")
    if intermediates not in ("all", "minimal", "none"):
        raise ConfigError(f"intermediates mode {intermediates!r} unknown")

    output_dir = _resolve(str(raw.get("output", "out")), base)
    workers = int(raw.get("workers", 1))
    if workers < 1:
        raise ConfigError("workers must be at least 1")

    resolved_output = output_dir.resolve()
    for label, referenced in [
        ("requirements", requirements_path),
        ("ground_truth", ground_truth_path),
        *[(f"ontology {s.name} [{i}]", path) for s in specs for i, path in enumerate(s.paths)],
    ]:
        if referenced is None:
            continue
        resolved = referenced.resolve()
        if resolved == resolved_output or resolved_output in resolved.parents:
            raise ConfigError(f"{label} path {referenced} lies in the output directory")

    return PipelineConfig(
        ontologies=tuple(specs),
        requirements_path=requirements_path,
        ground_truth_path=ground_truth_path,
        corpus=corpus_config,
        provider=provider_config,
        matcher=matcher_config,
        method=method,
        intermediates=intermediates,
        include_annotations=bool(extraction_raw.get("include_annotations", True)),
        output_dir=output_dir,
        workers=workers,
        config_bytes=raw_bytes,
    )


def validate_inputs(config: PipelineConfig) -> list[str]:
    """Dry-run checks; returns problems instead of raising."""
    problems = []
    for label, path in [
        ("requirements", config.requirements_path),
        ("ground truth", config.ground_truth_path),
        *[(f"ontology {s.name} [{i}]", path)
           for s in config.ontologies for i, path in enumerate(s.paths)],
        *[
            (f"seeds {s.name}/{req}", p)
            for s in config.ontologies
            for req, p in sorted(s.seed_files.items())
        ],
    ]:
        if path is not None and not path.is_file():
            problems.append(f"{label}: not a readable file: {path}")
    try:
        load_requirements(config.requirements_path)
    except Exception as exc:
        problems.append(f"requirements: {exc}")
    return problems


# -- embedding artifacts ------------------------------------------------------


def write_embeddings_tsv(iris: list[Iri], matrix: np.ndarray, stream) -> None:
    """One line per concept: IRI, dimension, base64 little-endian float64."""
    for iri, row in zip(iris, matrix):
        payload = base64.b64encode(struct.pack(f"<{len(row)}d", *row)).decode("ascii")
        stream.write(f"{iri.value}\t{len(row)}\t{payload}\n")


def read_embeddings_tsv(stream) -> tuple[list[Iri], np.ndarray]:
    iris: list[Iri] = []
    rows: list[tuple[float, ...]] = []
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        try:
            iri_value, dim_text, payload = line.split("\t")
            dimension = int(dim_text)
            values = struct.unpack(f"<{dimension}d", base64.b64decode(payload))
        except Exception as exc:
            raise ValueError(f"embeddings line {line_no} malformed: {exc}") from exc
        iris.append(Iri(iri_value))
        rows.append(values)
    if not rows:
        return [], np.zeros((0, 0))
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"embeddings mix dimensions {sorted(widths)}")
    return iris, np.asarray(rows, dtype=np.float64)


def match_against_embeddings(
    requirements: list[Requirement],
    concept_iris: list[Iri],
    concept_matrix: np.ndarray,
    provider: EmbeddingProvider,
    matcher: MatcherConfig,
) -> tuple[SimilarityMatrix, list[RetrievedSet]]:
    """Similarity matrix + retrieval from precomputed concept vectors."""
    req_ids = tuple(r.id for r in requirements)
    if not concept_iris or not requirements:
        matrix = SimilarityMatrix(req_ids, tuple(concept_iris), np.zeros((len(req_ids), len(concept_iris))))
        return matrix, retrieve(matrix, matcher)
    sentences: list[str] = []
    spans: list[tuple[int, int]] = []
    for req in requirements:
        spans.append((len(sentences), len(sentences) + len(req.sentences)))
        sentences.extend(req.sentences)
    vectors = provider.embed_batch(sentences)
    sentence_matrix = np.stack([v.as_array() for v in vectors])
    scores = sentence_matrix @ concept_matrix.T
    rows = []
    for start, end in spans:
        block = scores[start:end]
        rows.append(
            block.max(axis=0) if matcher.sentence_aggregation == "max" else block.mean(axis=0)
        )
    matrix = SimilarityMatrix(req_ids, tuple(concept_iris), np.stack(rows))
    return matrix, retrieve(matrix, matcher)


# -- the run -------------------------------------------------------------------


@dataclass
class OntologyResult:
    name: str
    timings: dict = field(default_factory=dict)
    error: str | None = None
    eval_rows: list = field(default_factory=list)
    skipped_modules: list = field(default_factory=list)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _process_ontology(
    spec: OntologySpec,
    config: PipelineConfig,
    requirements: list[Requirement],
    ground_truth: GroundTruth | None,
    provider: EmbeddingProvider,
) -> OntologyResult:
    result = OntologyResult(spec.name)
    out = config.output_dir / spec.name
    clock = time.perf_counter
    active: list[str] = []

    def stage(name: str) -> None:
        active.append(name)
        result.timings[name] = clock()

    def done(name: str) -> None:
        active.remove(name)
        result.timings[name] = clock() - result.timings[name]

    try:
        stage("parse")
        graph = load_graphs(list(spec.paths), spec.format)
        done("parse")

        stage("ingest")
        _write(out / "canonical.nt", serialize_ntriples(graph))
        done("ingest")

        stage("corpus")
        documents = build_corpus(graph, config.corpus)
        buf = io.StringIO()
        write_corpus_tsv(documents, buf)
        _write(out / "corpus.tsv", buf.getvalue().encode("utf-8"))
        done("corpus")

        stage("embed")
        iris = [d.iri for d in documents]
        if documents:
            vectors = provider.embed_batch([d.combined_text for d in documents])
            concept_matrix = np.stack([v.as_array() for v in vectors])
        else:
            concept_matrix = np.zeros((0, config.provider.dimension))
        buf = io.StringIO()
        write_embeddings_tsv(iris, concept_matrix, buf)
        _write(out / "embeddings.tsv", buf.getvalue().encode("utf-8"))
        done("embed")

        stage("match")
        with (out / "embeddings.tsv").open(encoding="utf-8") as handle:
            loaded_iris, loaded_matrix = read_embeddings_tsv(handle)
        _, retrieved = match_against_embeddings(
            requirements, loaded_iris, loaded_matrix, provider, config.matcher
        )
        buf = io.StringIO()
        write_matches_csv(retrieved, buf)
        _write(out / "matches.csv", buf.getvalue().encode("utf-8"))
        by_req = {r.requirement_id: r for r in retrieved}
        done("match")

        stage("evaluate")
        for req in requirements:
            if ground_truth is None:
                continue
            truth = ground_truth.truth_for(spec.name, req.id)
            if truth is None:
                result.eval_rows.append(not_applicable_row(spec.name, req.id))
            else:
                result.eval_rows.append(score(by_req[req.id], truth, ontology=spec.name))
        done("evaluate")

        stage("extract")
        for req in requirements:
            applicable = ground_truth is None or ground_truth.is_applicable(spec.name, req.id)
            if not applicable:
                continue
            seed_file = spec.seed_files.get(req.id)
            if seed_file is not None:
                seeds = frozenset(load_seeds(seed_file.read_text(encoding="utf-8")))
            else:
                seeds = frozenset(by_req[req.id].iris)
            if not seeds:
                result.skipped_modules.append(
                    {"requirement": req.id, "reason": "no seeds (empty retrieval)"}
                )
                continue
            request = ModuleRequest(
                seeds=seeds,
                method=config.method,
                intermediates=config.intermediates,
                include_annotations=config.include_annotations,
            )
            module = extract_module(graph, request, source=spec.name)
            _write(out / "modules" / f"{req.id}.ttl", emit_module(module))
        done("extract")
    except Exception as exc:
        where = active[-1] if active else "setup"
        result.timings.pop(where, None)
        result.error = f"{where}: {type(exc).__name__}: {exc}"
    return result


def run_pipeline(config: PipelineConfig) -> int:
    """Execute the workflow; returns the process exit status."""
    started = time.perf_counter()
    requirements = load_requirements(config.requirements_path)
    ground_truth = None
    if config.ground_truth_path is not None:
        ground_truth = load_ground_truth(
            config.ground_truth_path.read_bytes(),
            known_requirement_ids=[r.id for r in requirements],
        )

    provider = make_provider(config.provider)
    config.output_dir.mkdir(parents=True, exist_ok=True)

    if config.workers > 1 and len(config.ontologies) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(
                pool.map(
                    lambda spec: _process_ontology(
                        spec, config, requirements, ground_truth, provider
                    ),
                    config.ontologies,
                )
            )
    else:
        results = [
            _process_ontology(spec, config, requirements, ground_truth, provider)
            for spec in config.ontologies
        ]

    rows: list[EvalRow] = []
    for result in results:
        if result.error is None:
            rows.extend(result.eval_rows)
    requirement_order = [r.id for r in requirements]
    titles = {r.id: r.title for r in requirements}
    _write(
        config.output_dir / "report.md",
        render_report(rows, "markdown", requirement_order, titles),
    )
    _write(config.output_dir / "report.csv", render_report(rows, "csv", requirement_order))

    failures = {r.name: r.error for r in results if r.error is not None}
    manifest = {
        "tool": "odpkit",
        "version": __version__,
        "config_hash": hashlib.sha256(config.config_bytes).hexdigest(),
        "stage_timings": {r.name: r.timings for r in results},
        "skipped_modules": {r.name: r.skipped_modules for r in results if r.skipped_modules},
        "failures": failures,
        "total_seconds": time.perf_counter() - started,
        "files": {},
    }
    files = {}
    for path in sorted(config.output_dir.rglob("*")):
        if path.is_file() and path.name != MANIFEST_NAME:
            files[str(path.relative_to(config.output_dir))] = _sha256(path)
    manifest["files"] = files
    status = EXIT_PARTIAL_FAILURE if failures else EXIT_OK
    manifest["exit_status"] = status
    _write(
        config.output_dir / MANIFEST_NAME,
        json.dumps(manifest, indent=2, sort_keys=True).encode("utf-8") + b"\n",
    )
    return status
