"""odpkit: extract reusable ontology design patterns from OWL ontologies.

The pipeline parses Turtle/N-Triples ontologies, aggregates annotation
text per IRI, matches natural-language requirements against those texts
through a pluggable embedding provider, scores retrieval against ground
truth, and carves seed-based ontology modules (STAR/BOT/TOP/subset with
all/minimal/none intermediates handling).
"""

__version__ = "0.1.0"

from .corpus import ConceptDocument, CorpusConfig, build_corpus  # noqa: E402
from .embeddings import (  # noqa: E402
    EmbeddingVector,
    ProviderConfig,
    embed_batch,
    local_hash_embed,
    make_provider,
)
from .evaluation import (  # noqa: E402
    EvalRow,
    GroundTruth,
    load_ground_truth,
    render_report,
    score,
)
from .extraction import (  # noqa: E402
    ModuleRequest,
    OntologyModule,
    apply_intermediates,
    emit_module,
    extract_bot,
    extract_module,
    extract_star,
    extract_subset,
    extract_top,
)
from .matching import (  # noqa: E402
    MatcherConfig,
    Requirement,
    RetrievedSet,
    SimilarityMatrix,
    cosine,
    load_requirements,
    retrieve,
    similarity_matrix,
)
from .pipeline import PipelineConfig, load_config, run_pipeline  # noqa: E402
from .rdf import (  # noqa: E402
    Iri,
    OntologyGraph,
    axiom_views,
    load_graph,
    parse_document,
    serialize_ntriples,
)

__all__ = [
    "ConceptDocument",
    "CorpusConfig",
    "EmbeddingVector",
    "EvalRow",
    "GroundTruth",
    "Iri",
    "MatcherConfig",
    "ModuleRequest",
    "OntologyGraph",
    "OntologyModule",
    "PipelineConfig",
    "ProviderConfig",
    "Requirement",
    "RetrievedSet",
    "SimilarityMatrix",
    "apply_intermediates",
    "axiom_views",
    "build_corpus",
    "cosine",
    "embed_batch",
    "emit_module",
    "extract_bot",
    "extract_module",
    "extract_star",
    "extract_subset",
    "extract_top",
    "load_config",
    "load_graph",
    "load_ground_truth",
    "load_requirements",
    "local_hash_embed",
    "make_provider",
    "parse_document",
    "render_report",
    "retrieve",
    "run_pipeline",
    "score",
    "serialize_ntriples",
    "similarity_matrix",
]
