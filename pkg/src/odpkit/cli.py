"""Command-line entry points: each pipeline stage standalone plus the
full workflow. Exit codes: 0 success, 1 partial pipeline failure,
2 configuration/usage errors."""
from __future__ import annotations

import io
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .corpus import CorpusConfig, build_corpus, read_corpus_tsv, write_corpus_tsv
from .embeddings import ProviderConfig, make_provider
from .evaluation import load_ground_truth, not_applicable_row, render_report, score
from .extraction import (
    ModuleRequest,
    emit_module,
    extract_module,
    load_seeds,
)
from .matching import (
    MatcherConfig,
    load_requirements,
    read_matches_csv,
    write_matches_csv,
)
from .pipeline import (
    EXIT_CONFIG_ERROR,
    ConfigError,
    load_config,
    match_against_embeddings,
    read_embeddings_tsv,
    run_pipeline,
    validate_inputs,
    write_embeddings_tsv,
)
from .rdf import RdfError, load_graph, serialize_ntriples


def _fail(message: str, code: int = EXIT_CONFIG_ERROR) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def provider_options(fn):
    fn = click.option("--provider", "kind", type=click.Choice(["local-hash", "remote-http"]),
                      default="local-hash", show_default=True)(fn)
    fn = click.option("--dimension", type=int, default=512, show_default=True,
                      help="Local provider vector width.")(fn)
    fn = click.option("--endpoint", default=None, help="Remote embeddings URL.")(fn)
    fn = click.option("--model", default="hkunlp/instructor-large", show_default=True)(fn)
    fn = click.option("--auth-token-env", default=None,
                      help="Environment variable holding the bearer token.")(fn)
    fn = click.option("--timeout", type=float, default=30.0, show_default=True)(fn)
    fn = click.option("--max-batch-size", type=int, default=64, show_default=True)(fn)
    fn = click.option("--cache", "cache_path", default=None,
                      help="Vector cache file persisted between runs.")(fn)
    return fn


def _provider_config(kind, dimension, endpoint, model, auth_token_env, timeout,
                     max_batch_size, cache_path) -> ProviderConfig:
    try:
        return ProviderConfig(
            kind=kind, dimension=dimension, endpoint=endpoint, model=model,
            auth_token_env=auth_token_env, timeout=timeout,
            max_batch_size=max_batch_size, cache_path=cache_path,
        )
    except ValueError as exc:
        _fail(str(exc))


@click.group()
@click.version_option(version=__version__, prog_name="odpkit")
def main() -> None:
    """Extract ontology design patterns from OWL ontologies."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--format", "syntax", type=click.Choice(["turtle", "ntriples"]), default=None,
              help="Input serialization (guessed from the suffix by default).")
@click.option("--output", "output_path", required=True, type=click.Path(path_type=Path))
def ingest(input_path: Path, syntax: str | None, output_path: Path) -> None:
    """Parse an ontology and write canonical N-Triples."""
    if not input_path.is_file():
        _fail(f"input not readable: {input_path}")
    try:
        graph = load_graph(input_path, syntax)
    except RdfError as exc:
        _fail(f"parse failure in {input_path}: {exc}")
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_bytes(serialize_ntriples(graph))
    click.echo(f"wrote {len(graph)} triples to {output_path}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--format", "syntax", type=click.Choice(["turtle", "ntriples"]), default=None)
@click.option("--language", default="en", show_default=True,
              help="Preferred annotation language tag.")
@click.option("--fallback/--no-fallback", default=False, show_default=True,
              help="Synthesize text from IRI local names when no annotations exist.")
@click.option("--output", "output_path", required=True, type=click.Path(path_type=Path))
def corpus(input_path: Path, syntax: str | None, language: str, fallback: bool,
           output_path: Path) -> None:
    """Aggregate annotation text per IRI into a corpus TSV."""
    if not input_path.is_file():
        _fail(f"input not readable: {input_path}")
    try:
        graph = load_graph(input_path, syntax)
    except RdfError as exc:
        _fail(f"parse failure in {input_path}: {exc}")
    config = CorpusConfig(language_filter=language or None,
                          include_local_name_fallback=fallback)
    documents = build_corpus(graph, config)
    buf = io.StringIO()
    write_corpus_tsv(documents, buf)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(buf.getvalue(), encoding="utf-8")
    click.echo(f"wrote {len(documents)} concept documents to {output_path}")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--output", "output_path", required=True, type=click.Path(path_type=Path))
@provider_options
def embed(corpus_path: Path, output_path: Path, **provider_kwargs) -> None:
    """Embed a corpus TSV into a vectors file."""
    if not corpus_path.is_file():
        _fail(f"corpus not readable: {corpus_path}")
    config = _provider_config(**provider_kwargs)
    provider = make_provider(config)
    with corpus_path.open(encoding="utf-8") as handle:
        documents = read_corpus_tsv(handle)
    if documents:
        vectors = provider.embed_batch([d.combined_text for d in documents])
        matrix = np.stack([v.as_array() for v in vectors])
    else:
        matrix = np.zeros((0, config.dimension))
    buf = io.StringIO()
    write_embeddings_tsv([d.iri for d in documents], matrix, buf)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(buf.getvalue(), encoding="utf-8")
    click.echo(f"wrote {len(documents)} vectors to {output_path}")


@main.command()
@click.option("--embeddings", "embeddings_path", required=True, type=click.Path(path_type=Path))
@click.option("--requirements", "requirements_path", required=True,
              type=click.Path(path_type=Path))
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--k", type=int, default=20, show_default=True)
@click.option("--aggregation", type=click.Choice(["max", "mean"]), default="max",
              show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path(path_type=Path))
@provider_options
def match(embeddings_path: Path, requirements_path: Path, theta: float, k: int,
          aggregation: str, output_path: Path, **provider_kwargs) -> None:
    """Score requirements against embedded concepts and retrieve top-k."""
    for label, p in [("embeddings", embeddings_path), ("requirements", requirements_path)]:
        if not p.is_file():
            _fail(f"{label} not readable: {p}")
    config = _provider_config(**provider_kwargs)
    try:
        matcher = MatcherConfig(theta=theta, k=k, sentence_aggregation=aggregation)
        requirements = load_requirements(requirements_path)
        with embeddings_path.open(encoding="utf-8") as handle:
            iris, matrix = read_embeddings_tsv(handle)
    except ValueError as exc:
        _fail(str(exc))
    _, retrieved = match_against_embeddings(
        requirements, iris, matrix, make_provider(config), matcher
    )
    buf = io.StringIO()
    write_matches_csv(retrieved, buf)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(buf.getvalue(), encoding="utf-8")
    click.echo(f"wrote matches for {len(requirements)} requirements to {output_path}")


@main.command()
@click.option("--ground-truth", "gt_path", required=True, type=click.Path(path_type=Path))
@click.option("--requirements", "requirements_path", required=True,
              type=click.Path(path_type=Path))
@click.option("--matches", "matches_specs", multiple=True, required=True,
              help="Repeatable NAME=MATCHES.CSV pair, one per ontology.")
@click.option("--format", "fmt", type=click.Choice(["markdown", "csv"]), default="markdown",
              show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path(path_type=Path))
def evaluate(gt_path: Path, requirements_path: Path, matches_specs: tuple[str, ...],
             fmt: str, output_path: Path) -> None:
    """Score retrieved IRIs against ground truth into a report."""
    for label, p in [("ground truth", gt_path), ("requirements", requirements_path)]:
        if not p.is_file():
            _fail(f"{label} not readable: {p}")
    try:
        requirements = load_requirements(requirements_path)
        ground_truth = load_ground_truth(gt_path.read_bytes(),
                                         known_requirement_ids=[r.id for r in requirements])
    except ValueError as exc:
        _fail(str(exc))
    rows = []
    for spec in matches_specs:
        if "=" not in spec:
            _fail(f"--matches expects NAME=PATH, got {spec!r}")
        name, _, path_text = spec.partition("=")
        path = Path(path_text)
        if not path.is_file():
            _fail(f"matches file not readable: {path}")
        with path.open(encoding="utf-8") as handle:
            retrieved = {r.requirement_id: r for r in read_matches_csv(handle)}
        for req in requirements:
            truth = ground_truth.truth_for(name, req.id)
            if truth is None:
                rows.append(not_applicable_row(name, req.id))
            else:
                from .matching import RetrievedSet

                rset = retrieved.get(req.id, RetrievedSet(req.id, ()))
                rows.append(score(rset, truth, ontology=name))
    report = render_report(rows, fmt, [r.id for r in requirements],
                           {r.id: r.title for r in requirements})
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_bytes(report)
    click.echo(f"wrote report to {output_path}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--format", "syntax", type=click.Choice(["turtle", "ntriples"]), default=None)
@click.option("--method", type=click.Choice(["star", "bot", "top", "subset"]), default="star",
              show_default=True)
@click.option("--intermediates", type=click.Choice(["all", "minimal", "none"]), default="none",
              show_default=True)
@click.option("--seeds", "seeds_path", type=click.Path(path_type=Path), default=None,
              help="Seed file: one IRI per line, '#' comments.")
@click.option("--from-matches", "matches_path", type=click.Path(path_type=Path), default=None,
              help="Take seeds from a matches CSV instead.")
@click.option("--requirement", "requirement_id", default=None,
              help="Requirement id to select from --from-matches.")
@click.option("--annotations/--no-annotations", default=True, show_default=True)
@click.option("--source-name", default="", help="Source ontology label for provenance.")
@click.option("--output", "output_path", required=True, type=click.Path(path_type=Path))
def extract(input_path: Path, syntax: str | None, method: str, intermediates: str,
            seeds_path: Path | None, matches_path: Path | None, requirement_id: str | None,
            annotations: bool, source_name: str, output_path: Path) -> None:
    """Extract an ontology module from seed IRIs."""
    if not input_path.is_file():
        _fail(f"input not readable: {input_path}")
    if (seeds_path is None) == (matches_path is None):
        _fail("provide exactly one of --seeds or --from-matches")
    if matches_path is not None and requirement_id is None:
        _fail("--from-matches requires --requirement")
    try:
        graph = load_graph(input_path, syntax)
    except RdfError as exc:
        _fail(f"parse failure in {input_path}: {exc}")
    if seeds_path is not None:
        if not seeds_path.is_file():
            _fail(f"seeds not readable: {seeds_path}")
        try:
            seeds = frozenset(load_seeds(seeds_path.read_text(encoding="utf-8")))
        except ValueError as exc:
            _fail(str(exc))
    else:
        if not matches_path.is_file():
            _fail(f"matches not readable: {matches_path}")
        with matches_path.open(encoding="utf-8") as handle:
            by_req = {r.requirement_id: r for r in read_matches_csv(handle)}
        if requirement_id not in by_req:
            _fail(f"requirement {requirement_id!r} not present in {matches_path}")
        seeds = frozenset(by_req[requirement_id].iris)
    if not seeds:
        _fail("seed set is empty")
    try:
        request = ModuleRequest(seeds=seeds, method=method, intermediates=intermediates,
                                include_annotations=annotations)
        module = extract_module(graph, request, source=source_name or input_path.stem)
    except ValueError as exc:
        _fail(str(exc))
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_bytes(emit_module(module))
    if module.unknown_seeds:
        click.echo(
            "warning: seeds not in the ontology signature: "
            + ", ".join(s.value for s in module.unknown_seeds),
            err=True,
        )
    click.echo(f"wrote module with {len(module.axioms)} axioms to {output_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
@click.option("--dry-run", is_flag=True, help="Validate the config and inputs, touch nothing.")
def pipeline(config_path: Path, dry_run: bool) -> None:
    """Run the whole workflow from a YAML config."""
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        _fail(str(exc))
    if dry_run:
        problems = validate_inputs(config)
        if problems:
            for problem in problems:
                click.echo(f"error: {problem}", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
        click.echo("config ok")
        return
    # A broken ontology path is a per-ontology failure recorded in the
    # manifest (exit 1), so only the shared inputs gate the run here.
    try:
        status = run_pipeline(config)
    except (OSError, ValueError) as exc:
        _fail(str(exc))
    if status != 0:
        click.echo("pipeline finished with failures; see manifest.json", err=True)
    sys.exit(status)


if __name__ == "__main__":
    main()
