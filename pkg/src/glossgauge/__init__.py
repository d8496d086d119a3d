"""glossgauge: score machine-generated glossary definitions.

Measures how closely generated definitions track the official ones
(adherence), how consistent generations are across prompt phrasings and
samples (robustness), and how readable both corpora are (Flesch-Kincaid
grade and Gunning-Fog index with bootstrap estimation).
"""

from .config import RunConfig, load_config
from .embedding import (
    EmbeddingProviderConfig,
    EmbeddingVector,
    cosine_similarity,
    embed_batch,
    hashed_stub_embed,
)
from .errors import (
    BackendError,
    ConfigError,
    CrossReferenceCycleError,
    DataError,
    DuplicateTermError,
    EmptyTextError,
    GenerationError,
    GlossGaugeError,
    UnresolvedReferenceError,
)
from .generation import (
    CompletionCache,
    CompletionSet,
    GenerationConfig,
    generate_for_term,
    stub_complete,
)
from .glossary import (
    Glossary,
    GlossaryEntry,
    normalize_definitions,
    parse_glossary,
    resolve_cross_references,
    select_subset,
)
from .metrics import (
    AggregateStats,
    TermScore,
    adherence,
    aggregate,
    per_template_robustness,
    rank_terms,
    robustness,
)
from .pipeline import RunStats, run_pipeline
from .prompting import PromptTemplate, builtin_templates, render
from .readability import (
    ReadabilityEstimate,
    TextStats,
    bootstrap_readability,
    count_syllables,
    flesch_kincaid,
    gunning_fog,
    text_stats,
)
from .report import ReportBundle, compare_ablations, emit_histogram
from .sentences import first_sentence, split_sentences, tokenize_words

__version__ = "0.1.0"

__all__ = [
    "AggregateStats",
    "BackendError",
    "CompletionCache",
    "CompletionSet",
    "ConfigError",
    "CrossReferenceCycleError",
    "DataError",
    "DuplicateTermError",
    "EmbeddingProviderConfig",
    "EmbeddingVector",
    "EmptyTextError",
    "GenerationConfig",
    "GenerationError",
    "Glossary",
    "GlossaryEntry",
    "GlossGaugeError",
    "PromptTemplate",
    "ReadabilityEstimate",
    "ReportBundle",
    "RunConfig",
    "RunStats",
    "TermScore",
    "TextStats",
    "UnresolvedReferenceError",
    "adherence",
    "aggregate",
    "bootstrap_readability",
    "builtin_templates",
    "compare_ablations",
    "cosine_similarity",
    "count_syllables",
    "embed_batch",
    "emit_histogram",
    "first_sentence",
    "flesch_kincaid",
    "generate_for_term",
    "gunning_fog",
    "hashed_stub_embed",
    "load_config",
    "normalize_definitions",
    "parse_glossary",
    "per_template_robustness",
    "rank_terms",
    "render",
    "resolve_cross_references",
    "robustness",
    "run_pipeline",
    "select_subset",
    "split_sentences",
    "stub_complete",
    "text_stats",
    "tokenize_words",
]
