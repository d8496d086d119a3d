"""End-to-end orchestration and run artifacts.

A run walks glossary -> prompting -> generation -> embedding -> metrics ->
readability -> report, persisting every intermediate under the output
directory::

    out_dir/
      manifest.json               run identity + full config snapshot
      glossary_normalized.jsonl   ingested, normalized, cross-refs resolved
      cache/completions.jsonl     completion cache (shared across reruns)
      cache/embeddings.jsonl      embedding cache
      scores/per_term.jsonl       per-term scores with similarity lists
      reports/                    bundle.json, summary.{txt,csv}, ...
      stats.json                  backend call counters for this invocation

Reports contain no wall-clock data, so a rerun with the same manifest and
warm caches rewrites them byte-identically and makes zero backend calls.
If a stage fails, ``partial_index.json`` records which artifacts exist so
the run can resume from caches.

Randomness derivation: the manifest seed feeds the stub generation backend
and the readability bootstrap directly; the embedding stub's seed is part
of the embedding provider config (it namespaces the provider id).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .config import RunConfig
from .embedding import EmbeddingCache, embed_batch
from .errors import DataError, GlossGaugeError
from .generation import CompletionCache, CompletionSet, generate_for_term, make_backend
from .glossary import (
    Glossary,
    normalize_definitions,
    parse_glossary,
    read_keep_list,
    resolve_cross_references,
    select_subset,
    write_glossary,
)
from .metrics import AggregateStats, TermScore, score_term
from .prompting import PromptTemplate, select_templates
from .readability import bootstrap_readability
from .report import (
    OFFICIAL_LABEL,
    ReportBundle,
    SummaryRow,
    build_rankings,
    bundle_to_json,
    emit_histogram,
    histogram_csv,
    per_term_csv,
    summary_csv,
    summary_text,
)

log = logging.getLogger(__name__)


@dataclass
class RunStats:
    """Backend activity for one invocation (volatile; not part of reports)."""

    generation_calls: int = 0
    fresh_embeddings: int = 0
    empty_completions: int = 0


def run_id_for(cfg: RunConfig) -> str:
    """Stable run identifier derived from the config snapshot."""
    canonical = json.dumps(cfg.snapshot(), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def write_manifest(cfg: RunConfig, out_dir: Path, glossary: Glossary,
                   template_ids: list[str]) -> dict:
    manifest = {
        "run_id": run_id_for(cfg),
        "config": cfg.snapshot(),
        "glossary_source": glossary.source_id,
        "template_ids": template_ids,
        "model_name": cfg.generation.model_name,
        "provider_id": cfg.embedding.provider_id(),
        "seed": cfg.seed,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


def ingest_glossary(cfg: RunConfig) -> tuple[Glossary, list[str]]:
    """Parse, normalize, resolve cross-references, and apply the keep list."""
    if not cfg.glossary.snapshot:
        raise DataError("no glossary snapshot configured")
    glossary = parse_glossary(cfg.glossary.snapshot)
    glossary = normalize_definitions(glossary)
    glossary = resolve_cross_references(glossary, mode=cfg.glossary.crossref_mode)
    warnings: list[str] = []
    if cfg.glossary.keep_list:
        keep = read_keep_list(cfg.glossary.keep_list)
        if not keep:
            raise DataError(f"keep-list {cfg.glossary.keep_list} contains no terms")
        result = select_subset(glossary, keep)
        glossary = result.glossary
        warnings.extend(f"keep-list term not in glossary: {name}"
                        for name in result.missing)
    if not glossary.entries:
        raise DataError("glossary is empty after ingestion")
    return glossary, warnings


def _templates(cfg: RunConfig) -> list[PromptTemplate]:
    return select_templates(cfg.prompting.templates, cfg.prompting.template_file)


def collect_completions(
    cfg: RunConfig, glossary: Glossary, cache: CompletionCache
) -> tuple[list[CompletionSet], RunStats]:
    """Fill the completion cache for every term, in glossary order."""
    templates = _templates(cfg)
    backend = make_backend(cfg.generation)
    sets = []
    for entry in glossary.entries:
        sets.append(
            generate_for_term(entry.term, templates, cfg.generation, cache, backend)
        )
    stats = RunStats(generation_calls=backend.calls)
    stats.empty_completions = sum(
        1 for cs in sets for c in cs.completions.values() if c.flagged_empty
    )
    return sets, stats


def score_glossary(
    cfg: RunConfig,
    glossary: Glossary,
    completion_sets: list[CompletionSet],
    embedding_cache: EmbeddingCache,
) -> tuple[list[TermScore], list[str]]:
    """Embed official definitions and completions, then score every term."""
    template_ids = list(cfg.prompting.templates)
    k = cfg.generation.samples_per_template
    texts: list[str] = [e.normalized_definition for e in glossary.entries]
    ordered: list[list[tuple[str, str]]] = []
    for completion_set in completion_sets:
        per_term = [
            (template_id, text)
            for template_id, _, text in completion_set.texts_ordered(template_ids, k)
        ]
        ordered.append(per_term)
        texts.extend(text for _, text in per_term)
    vectors = embed_batch(texts, cfg.embedding, cache=embedding_cache)
    officials = vectors[: len(glossary.entries)]
    scores: list[TermScore] = []
    cursor = len(glossary.entries)
    for entry, official, per_term in zip(glossary.entries, officials, ordered):
        completion_vectors = vectors[cursor : cursor + len(per_term)]
        cursor += len(per_term)
        pairs = [
            (template_id, vector)
            for (template_id, _), vector in zip(per_term, completion_vectors)
        ]
        scores.append(score_term(entry.term, official, pairs))
    warnings = []
    for score in scores:
        missing = [t for t in template_ids if t not in score.per_template_robustness]
        for template_id in missing:
            warnings.append(
                f"term {score.term!r}: template {template_id!r} omitted from"
                f" per-template robustness (fewer than 2 samples)"
            )
    return scores, warnings


def write_scores(scores: list[TermScore], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for score in scores:
        lines.append(
            json.dumps(
                {
                    "term": score.term,
                    "adherence": score.adherence,
                    "robustness": score.robustness,
                    "n": score.n,
                    "per_completion_sims": list(score.per_completion_sims),
                    "per_pair_sims": list(score.per_pair_sims),
                    "per_template_robustness": dict(
                        sorted(score.per_template_robustness.items())
                    ),
                },
                sort_keys=True,
                ensure_ascii=False,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_bundle(
    cfg: RunConfig,
    glossary: Glossary,
    completion_sets: list[CompletionSet],
    scores: list[TermScore],
    warnings: list[str],
) -> ReportBundle:
    template_ids = list(cfg.prompting.templates)
    k = cfg.generation.samples_per_template
    completion_texts = [
        text
        for completion_set in completion_sets
        for _, _, text in completion_set.texts_ordered(template_ids, k)
    ]
    official_texts = [e.normalized_definition for e in glossary.entries]

    model_reads = bootstrap_readability(
        completion_texts,
        iterations=cfg.readability.iterations,
        sample_size=cfg.readability.sample_size,
        seed=cfg.seed,
    )
    official_reads = bootstrap_readability(
        official_texts,
        iterations=cfg.readability.iterations,
        sample_size=cfg.readability.sample_size,
        seed=cfg.seed,
    )
    by_metric_model = {e.metric: e for e in model_reads}
    by_metric_official = {e.metric: e for e in official_reads}

    within_template_means = [
        AggregateStats.from_values(list(s.per_template_robustness.values())).mean
        for s in scores
        if s.per_template_robustness
    ]
    summary = (
        SummaryRow(
            label=cfg.generation.model_name,
            kind="model",
            adherence=AggregateStats.from_values([s.adherence for s in scores]),
            robustness_all_pairs=AggregateStats.from_values(
                [s.robustness for s in scores]
            ),
            robustness_within_template=(
                AggregateStats.from_values(within_template_means)
                if within_template_means
                else None
            ),
            word_count=by_metric_model["word_count"],
            gunning_fog=by_metric_model["gunning_fog"],
            flesch_kincaid=by_metric_model["flesch_kincaid"],
        ),
        SummaryRow(
            label=OFFICIAL_LABEL,
            kind="official",
            adherence=None,
            robustness_all_pairs=None,
            robustness_within_template=None,
            word_count=by_metric_official["word_count"],
            gunning_fog=by_metric_official["gunning_fog"],
            flesch_kincaid=by_metric_official["flesch_kincaid"],
        ),
    )
    per_term_sorted = tuple(sorted(scores, key=lambda s: s.term))
    return ReportBundle(
        run_id=run_id_for(cfg),
        glossary_source=glossary.source_id,
        provider_id=cfg.embedding.provider_id(),
        model_name=cfg.generation.model_name,
        summary=summary,
        rankings=build_rankings(scores, min(cfg.report.top_k, len(scores))),
        histogram=emit_histogram(
            [s.adherence for s in scores], cfg.report.histogram_bin_width
        ),
        per_term=per_term_sorted,
        warnings=tuple(warnings),
    )


def write_reports(bundle: ReportBundle, out_dir: Path) -> list[str]:
    reports = out_dir / "reports"
    reports.mkdir(parents=True, exist_ok=True)
    files = {
        "bundle.json": bundle_to_json(bundle),
        "summary.txt": summary_text(bundle),
        "summary.csv": summary_csv(bundle),
        "per_term_scores.csv": per_term_csv(bundle.per_term),
        "histogram.csv": histogram_csv(bundle.histogram),
    }
    for name, content in files.items():
        (reports / name).write_text(content, encoding="utf-8")
    return [f"reports/{name}" for name in files]


def _write_stats(stats: RunStats, out_dir: Path) -> None:
    (out_dir / "stats.json").write_text(
        json.dumps(dataclasses.asdict(stats), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _write_partial_index(out_dir: Path, artifacts: list[str], error: str) -> None:
    payload = {"completed_artifacts": artifacts, "error": error}
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "partial_index.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def run_pipeline(cfg: RunConfig, out_dir: str | Path) -> tuple[ReportBundle, RunStats]:
    """Execute the full pipeline, persisting artifacts under ``out_dir``."""
    out_dir = Path(out_dir)
    artifacts: list[str] = []
    try:
        glossary, warnings = ingest_glossary(cfg)
        template_ids = list(cfg.prompting.templates)
        write_manifest(cfg, out_dir, glossary, template_ids)
        artifacts.append("manifest.json")
        write_glossary(glossary, out_dir / "glossary_normalized.jsonl")
        artifacts.append("glossary_normalized.jsonl")

        completion_cache = CompletionCache(out_dir / "cache" / "completions.jsonl")
        embedding_cache = EmbeddingCache(out_dir / "cache" / "embeddings.jsonl")

        completion_sets, stats = collect_completions(cfg, glossary, completion_cache)
        artifacts.append("cache/completions.jsonl")
        if stats.empty_completions:
            warnings.append(
                f"{stats.empty_completions} empty completion(s) recorded;"
                " embedded as the basis vector"
            )

        cached_before = len(embedding_cache)
        scores, score_warnings = score_glossary(
            cfg, glossary, completion_sets, embedding_cache
        )
        stats.fresh_embeddings = len(embedding_cache) - cached_before
        warnings.extend(score_warnings)
        artifacts.append("cache/embeddings.jsonl")
        write_scores(scores, out_dir / "scores" / "per_term.jsonl")
        artifacts.append("scores/per_term.jsonl")

        bundle = build_bundle(cfg, glossary, completion_sets, scores, warnings)
        artifacts.extend(write_reports(bundle, out_dir))
        _write_stats(stats, out_dir)
        partial = out_dir / "partial_index.json"
        if partial.exists():
            partial.unlink()
        return bundle, stats
    except GlossGaugeError as exc:
        _write_partial_index(out_dir, artifacts, str(exc))
        raise
