"""Command-line interface.

Subcommands mirror the pipeline stages: ``ingest`` normalizes a glossary
snapshot, ``generate`` fills the completion cache, ``score`` computes
adherence/robustness, ``readability`` bootstraps the readability estimates,
``report`` assembles the report bundle (optionally comparing ablation runs),
and ``run`` does everything end to end.

Exit codes: 0 success, 1 usage/config error, 2 backend failure, 3 data error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import RunConfig, load_config
from .embedding import EmbeddingCache
from .errors import BackendError, ConfigError, DataError, GlossGaugeError
from .generation import CompletionCache
from .glossary import write_glossary
from .pipeline import (
    build_bundle,
    collect_completions,
    ingest_glossary,
    run_pipeline,
    score_glossary,
    write_manifest,
    write_reports,
    write_scores,
)
from .readability import bootstrap_readability
from .report import (
    bundle_to_json,
    compare_ablations,
    comparison_csv,
    comparison_json,
)

EXIT_USAGE = 1
EXIT_BACKEND = 2
EXIT_DATA = 3


def _build_config(ctx_params: dict) -> RunConfig:
    cfg = load_config(ctx_params.get("config"))
    if ctx_params.get("seed") is not None:
        cfg.seed = ctx_params["seed"]
        cfg.generation.stub_seed = ctx_params["seed"]
    else:
        cfg.generation.stub_seed = cfg.seed
    if ctx_params.get("glossary"):
        cfg.glossary.snapshot = ctx_params["glossary"]
    if ctx_params.get("keep_list"):
        cfg.glossary.keep_list = ctx_params["keep_list"]
    if ctx_params.get("backend"):
        cfg.generation.backend = ctx_params["backend"]
    if ctx_params.get("embedder"):
        cfg.embedding.kind = ctx_params["embedder"]
    if ctx_params.get("top_k") is not None:
        cfg.report.top_k = ctx_params["top_k"]
    return cfg


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              help="YAML config file.")
@click.option("--seed", type=int, default=None, help="Manifest seed.")
@click.option("--glossary", type=click.Path(exists=True, dir_okay=False),
              help="Glossary snapshot (JSONL or CSV).")
@click.option("--keep-list", type=click.Path(exists=True, dir_okay=False),
              help="Term subset file, one term per line.")
@click.option("--backend", type=click.Choice(["stub", "http_chat"]),
              help="Generation backend.")
@click.option("--embedder", type=click.Choice(["hashed_stub", "http"]),
              help="Embedding provider.")
@click.option("--out-dir", type=click.Path(file_okay=False), default="run_out",
              show_default=True, help="Directory for run artifacts.")
@click.option("--top-k", type=int, default=None, help="Ranking depth.")
@click.pass_context
def cli(ctx, **params):
    """Score generated glossary definitions for adherence, robustness, readability."""
    ctx.ensure_object(dict)
    ctx.obj["cfg"] = _build_config(params)
    ctx.obj["out_dir"] = Path(params["out_dir"])


@cli.command()
@click.pass_context
def ingest(ctx):
    """Normalize a glossary snapshot into <out-dir>/glossary_normalized.jsonl."""
    cfg: RunConfig = ctx.obj["cfg"]
    out_dir: Path = ctx.obj["out_dir"]
    glossary, warnings = ingest_glossary(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_glossary(glossary, out_dir / "glossary_normalized.jsonl")
    click.echo(f"ingested {len(glossary)} terms from {glossary.source_id}")
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)


@cli.command()
@click.pass_context
def generate(ctx):
    """Fill the completion cache for every glossary term."""
    cfg: RunConfig = ctx.obj["cfg"]
    out_dir: Path = ctx.obj["out_dir"]
    glossary, _ = ingest_glossary(cfg)
    cache = CompletionCache(out_dir / "cache" / "completions.jsonl")
    sets, stats = collect_completions(cfg, glossary, cache)
    total = sum(len(s.completions) for s in sets)
    click.echo(
        f"collected {total} completions for {len(sets)} terms"
        f" ({stats.generation_calls} backend calls)"
    )


@cli.command()
@click.pass_context
def score(ctx):
    """Compute per-term adherence and robustness scores."""
    cfg: RunConfig = ctx.obj["cfg"]
    out_dir: Path = ctx.obj["out_dir"]
    glossary, _ = ingest_glossary(cfg)
    completion_cache = CompletionCache(out_dir / "cache" / "completions.jsonl")
    embedding_cache = EmbeddingCache(out_dir / "cache" / "embeddings.jsonl")
    sets, _ = collect_completions(cfg, glossary, completion_cache)
    scores, _ = score_glossary(cfg, glossary, sets, embedding_cache)
    write_scores(scores, out_dir / "scores" / "per_term.jsonl")
    click.echo(f"scored {len(scores)} terms -> scores/per_term.jsonl")


@cli.command()
@click.pass_context
def readability(ctx):
    """Bootstrap readability estimates for the official definitions."""
    cfg: RunConfig = ctx.obj["cfg"]
    out_dir: Path = ctx.obj["out_dir"]
    glossary, _ = ingest_glossary(cfg)
    estimates = bootstrap_readability(
        [e.normalized_definition for e in glossary.entries],
        iterations=cfg.readability.iterations,
        sample_size=cfg.readability.sample_size,
        seed=cfg.seed,
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = [
        {
            "metric": e.metric, "mean": e.mean, "std": e.std,
            "iterations": e.iterations, "sample_size": e.sample_size, "seed": e.seed,
        }
        for e in estimates
    ]
    (out_dir / "readability.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for estimate in estimates:
        click.echo(f"{estimate.metric}: {estimate.mean:.2f} ± {estimate.std:.2f}")


def _assemble_bundle(cfg: RunConfig, out_dir: Path):
    glossary, warnings = ingest_glossary(cfg)
    completion_cache = CompletionCache(out_dir / "cache" / "completions.jsonl")
    embedding_cache = EmbeddingCache(out_dir / "cache" / "embeddings.jsonl")
    sets, stats = collect_completions(cfg, glossary, completion_cache)
    if stats.empty_completions:
        warnings.append(
            f"{stats.empty_completions} empty completion(s) recorded;"
            " embedded as the basis vector"
        )
    scores, score_warnings = score_glossary(cfg, glossary, sets, embedding_cache)
    warnings.extend(score_warnings)
    return build_bundle(cfg, glossary, sets, scores, warnings)


@cli.command()
@click.option("--ablation", "ablations", multiple=True, metavar="ID=RUN_DIR",
              help="Additional run directories to compare against this one.")
@click.pass_context
def report(ctx, ablations):
    """Assemble the report bundle; optionally compare ablation runs."""
    cfg: RunConfig = ctx.obj["cfg"]
    out_dir: Path = ctx.obj["out_dir"]
    glossary, _ = ingest_glossary(cfg)
    write_manifest(cfg, out_dir, glossary, list(cfg.prompting.templates))
    bundle = _assemble_bundle(cfg, out_dir)
    write_reports(bundle, out_dir)
    click.echo(f"wrote reports under {out_dir / 'reports'}")
    if ablations:
        bundles = {"this_run": bundle}
        for spec in ablations:
            if "=" not in spec:
                raise ConfigError(f"--ablation expects ID=RUN_DIR, got {spec!r}")
            ablation_id, run_dir = spec.split("=", 1)
            bundle_path = Path(run_dir) / "reports" / "bundle.json"
            if not bundle_path.exists():
                raise DataError(f"no report bundle at {bundle_path}")
            bundles[ablation_id] = _bundle_from_json(bundle_path)
        rows = compare_ablations(bundles)
        reports_dir = out_dir / "reports"
        (reports_dir / "ablation_comparison.csv").write_text(
            comparison_csv(rows), encoding="utf-8"
        )
        (reports_dir / "ablation_comparison.json").write_text(
            comparison_json(rows), encoding="utf-8"
        )
        click.echo("wrote ablation comparison")


def _bundle_from_json(path: Path):
    """Rehydrate just enough of a stored bundle for ablation comparison."""
    from .metrics import AggregateStats
    from .readability import ReadabilityEstimate
    from .report import Histogram, ReportBundle, SummaryRow

    payload = json.loads(path.read_text(encoding="utf-8"))

    def stats(record):
        return None if record is None else AggregateStats(**record)

    def estimate(record):
        return ReadabilityEstimate(**record)

    summary = tuple(
        SummaryRow(
            label=row["label"],
            kind=row["kind"],
            adherence=stats(row["adherence"]),
            robustness_all_pairs=stats(row["robustness_all_pairs"]),
            robustness_within_template=stats(row["robustness_within_template"]),
            word_count=estimate(row["word_count"]),
            gunning_fog=estimate(row["gunning_fog"]),
            flesch_kincaid=estimate(row["flesch_kincaid"]),
        )
        for row in payload["summary"]
    )
    histogram = Histogram(
        bin_width=payload["histogram"]["bin_width"],
        edges=tuple(payload["histogram"]["edges"]),
        counts=tuple(payload["histogram"]["counts"]),
        below_range=payload["histogram"]["below_range"],
        above_range=payload["histogram"]["above_range"],
    )
    return ReportBundle(
        run_id=payload["run_id"],
        glossary_source=payload["glossary_source"],
        provider_id=payload["provider_id"],
        model_name=payload["model_name"],
        summary=summary,
        rankings={},
        histogram=histogram,
        per_term=(),
        warnings=tuple(payload["warnings"]),
    )


@cli.command()
@click.pass_context
def run(ctx):
    """Run the full pipeline end to end."""
    cfg: RunConfig = ctx.obj["cfg"]
    out_dir: Path = ctx.obj["out_dir"]
    bundle, stats = run_pipeline(cfg, out_dir)
    click.echo(bundle_to_json(bundle), nl=False)
    click.echo(
        f"run {bundle.run_id}: {len(bundle.per_term)} terms,"
        f" {stats.generation_calls} generation calls,"
        f" {stats.fresh_embeddings} fresh embeddings",
        err=True,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except BackendError as exc:
        click.echo(f"backend error: {exc}", err=True)
        return EXIT_BACKEND
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except GlossGaugeError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
