"""Report assembly: summary rows, rankings, histogram, ablation comparison.

A ReportBundle mirrors the result shapes the harness exists to produce: one
summary row per evaluated model plus a readability-only row for the official
definitions, top/bottom-k term rankings, the per-term adherence histogram,
and the full per-term score table. Bundles serialize to three formats
(aligned text, CSV, JSON); all formatting is deterministic so a warm-cache
rerun writes byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import DataError
from .metrics import AggregateStats, TermScore, rank_terms
from .readability import ReadabilityEstimate

OFFICIAL_LABEL = "definitions"

# Snap scores sitting within this distance of a bin edge into the upper bin,
# compensating for float division noise at exact edges like 0.15/0.05.
_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class Histogram:
    bin_width: float
    edges: tuple[float, ...]  # len(counts) + 1, spanning [0, 1]
    counts: tuple[int, ...]
    below_range: int = 0
    above_range: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts) + self.below_range + self.above_range


@dataclass(frozen=True)
class SummaryRow:
    """One line of the headline table; official definitions carry no scores."""

    label: str
    kind: str  # "model" | "official"
    adherence: AggregateStats | None
    robustness_all_pairs: AggregateStats | None
    robustness_within_template: AggregateStats | None
    word_count: ReadabilityEstimate
    gunning_fog: ReadabilityEstimate
    flesch_kincaid: ReadabilityEstimate


@dataclass(frozen=True)
class RankingEntry:
    term: str
    value: float


@dataclass(frozen=True)
class ReportBundle:
    run_id: str
    glossary_source: str
    provider_id: str
    model_name: str
    summary: tuple[SummaryRow, ...]
    rankings: dict[str, dict[str, tuple[RankingEntry, ...]]]
    histogram: Histogram
    per_term: tuple[TermScore, ...]
    warnings: tuple[str, ...] = field(default=())


def emit_histogram(
    scores: list[float], bin_width: float = 0.05
) -> Histogram:
    """Fixed-width histogram of scores over [0, 1].

    Scores below 0 or above 1 are tracked in separate clamp counters rather
    than silently binned; the last bin is closed so a score of exactly 1.0
    lands in it. Total mass always equals len(scores).
    """
    if bin_width <= 0:
        raise DataError(f"bin_width must be positive, got {bin_width}")
    n_bins = max(1, math.ceil(round(1.0 / bin_width, 9)))
    edges = tuple(min(1.0, i * bin_width) for i in range(n_bins + 1))
    counts = [0] * n_bins
    below = 0
    above = 0
    for score in scores:
        if score < 0.0:
            below += 1
        elif score > 1.0:
            above += 1
        else:
            index = min(n_bins - 1, int((score + _EDGE_EPS) / bin_width))
            counts[index] += 1
    return Histogram(
        bin_width=bin_width,
        edges=edges,
        counts=tuple(counts),
        below_range=below,
        above_range=above,
    )


def build_rankings(
    scores: list[TermScore], k: int
) -> dict[str, dict[str, tuple[RankingEntry, ...]]]:
    rankings: dict[str, dict[str, tuple[RankingEntry, ...]]] = {}
    for key in ("adherence", "robustness"):
        top, bottom = rank_terms(scores, key, k)
        rankings[key] = {
            "top": tuple(RankingEntry(s.term, getattr(s, key)) for s in top),
            "bottom": tuple(RankingEntry(s.term, getattr(s, key)) for s in bottom),
        }
    return rankings


def _stats_json(stats: AggregateStats | None) -> dict | None:
    if stats is None:
        return None
    return {
        "mean": stats.mean,
        "std": stats.std,
        "min": stats.min,
        "max": stats.max,
        "count": stats.count,
    }


def _estimate_json(estimate: ReadabilityEstimate) -> dict:
    return {
        "metric": estimate.metric,
        "mean": estimate.mean,
        "std": estimate.std,
        "iterations": estimate.iterations,
        "sample_size": estimate.sample_size,
        "seed": estimate.seed,
    }


def bundle_to_json(bundle: ReportBundle) -> str:
    payload = {
        "run_id": bundle.run_id,
        "glossary_source": bundle.glossary_source,
        "provider_id": bundle.provider_id,
        "model_name": bundle.model_name,
        "summary": [
            {
                "label": row.label,
                "kind": row.kind,
                "adherence": _stats_json(row.adherence),
                "robustness_all_pairs": _stats_json(row.robustness_all_pairs),
                "robustness_within_template": _stats_json(
                    row.robustness_within_template
                ),
                "word_count": _estimate_json(row.word_count),
                "gunning_fog": _estimate_json(row.gunning_fog),
                "flesch_kincaid": _estimate_json(row.flesch_kincaid),
            }
            for row in bundle.summary
        ],
        "rankings": {
            key: {
                side: [{"term": e.term, "value": e.value} for e in entries]
                for side, entries in sides.items()
            }
            for key, sides in bundle.rankings.items()
        },
        "histogram": {
            "bin_width": bundle.histogram.bin_width,
            "edges": list(bundle.histogram.edges),
            "counts": list(bundle.histogram.counts),
            "below_range": bundle.histogram.below_range,
            "above_range": bundle.histogram.above_range,
        },
        "per_term": [
            {
                "term": s.term,
                "adherence": s.adherence,
                "robustness": s.robustness,
                "n": s.n,
                "per_template_robustness": dict(
                    sorted(s.per_template_robustness.items())
                ),
            }
            for s in bundle.per_term
        ],
        "warnings": list(bundle.warnings),
    }
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _mean_std(stats) -> str:
    if stats is None:
        return "-"
    return f"{stats.mean:.4f} ± {stats.std:.4f}"


def summary_text(bundle: ReportBundle) -> str:
    """Aligned, human-readable rendering of the whole bundle."""
    out = io.StringIO()
    out.write(f"run: {bundle.run_id}\n")
    out.write(f"glossary: {bundle.glossary_source}\n")
    out.write(f"embedding provider: {bundle.provider_id}\n\n")

    headers = (
        "label", "adherence", "robustness(all)", "robustness(tmpl)",
        "words", "gunning_fog", "flesch_kincaid",
    )
    rows = [headers]
    for row in bundle.summary:
        rows.append(
            (
                row.label,
                _mean_std(row.adherence),
                _mean_std(row.robustness_all_pairs),
                _mean_std(row.robustness_within_template),
                f"{row.word_count.mean:.1f} ± {row.word_count.std:.1f}",
                f"{row.gunning_fog.mean:.1f} ± {row.gunning_fog.std:.1f}",
                f"{row.flesch_kincaid.mean:.1f} ± {row.flesch_kincaid.std:.1f}",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    for row in rows:
        out.write("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        out.write("\n")

    for key, sides in bundle.rankings.items():
        out.write(f"\n{key} rankings\n")
        for side in ("top", "bottom"):
            for rank, entry in enumerate(sides[side], start=1):
                out.write(f"  {side}{rank}: {entry.term} ({entry.value:.4f})\n")

    hist = bundle.histogram
    out.write("\nadherence histogram\n")
    if hist.below_range:
        out.write(f"  below 0: {hist.below_range}\n")
    for i, count in enumerate(hist.counts):
        lo, hi = hist.edges[i], hist.edges[i + 1]
        out.write(f"  [{lo:.2f}, {hi:.2f}): {count}\n")
    if hist.above_range:
        out.write(f"  above 1: {hist.above_range}\n")

    if bundle.warnings:
        out.write("\nwarnings\n")
        for warning in bundle.warnings:
            out.write(f"  - {warning}\n")
    return out.getvalue()


def summary_csv(bundle: ReportBundle) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "label", "kind",
            "adherence_mean", "adherence_std",
            "robustness_all_mean", "robustness_all_std",
            "robustness_tmpl_mean", "robustness_tmpl_std",
            "word_count_mean", "word_count_std",
            "gunning_fog_mean", "gunning_fog_std",
            "flesch_kincaid_mean", "flesch_kincaid_std",
        ]
    )
    for row in bundle.summary:
        writer.writerow(
            [
                row.label,
                row.kind,
                _csv_num(row.adherence and row.adherence.mean),
                _csv_num(row.adherence and row.adherence.std),
                _csv_num(row.robustness_all_pairs and row.robustness_all_pairs.mean),
                _csv_num(row.robustness_all_pairs and row.robustness_all_pairs.std),
                _csv_num(
                    row.robustness_within_template
                    and row.robustness_within_template.mean
                ),
                _csv_num(
                    row.robustness_within_template
                    and row.robustness_within_template.std
                ),
                _csv_num(row.word_count.mean),
                _csv_num(row.word_count.std),
                _csv_num(row.gunning_fog.mean),
                _csv_num(row.gunning_fog.std),
                _csv_num(row.flesch_kincaid.mean),
                _csv_num(row.flesch_kincaid.std),
            ]
        )
    return buffer.getvalue()


def _csv_num(value: float | None) -> str:
    return "" if value is None else f"{value:.9g}"


def per_term_csv(scores: tuple[TermScore, ...]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["term", "adherence", "robustness", "n"])
    for score in scores:
        writer.writerow(
            [score.term, f"{score.adherence:.9g}", f"{score.robustness:.9g}", score.n]
        )
    return buffer.getvalue()


def histogram_csv(hist: Histogram) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["edge_lo", "edge_hi", "count"])
    if hist.below_range:
        writer.writerow(["-inf", "0", hist.below_range])
    for i, count in enumerate(hist.counts):
        writer.writerow([f"{hist.edges[i]:.9g}", f"{hist.edges[i + 1]:.9g}", count])
    if hist.above_range:
        writer.writerow(["1", "+inf", hist.above_range])
    return buffer.getvalue()


@dataclass(frozen=True)
class ComparisonRow:
    ablation: str
    adherence: AggregateStats | None
    word_count: ReadabilityEstimate
    gunning_fog: ReadabilityEstimate
    flesch_kincaid: ReadabilityEstimate


def compare_ablations(bundles: dict[str, ReportBundle]) -> list[ComparisonRow]:
    """Side-by-side adherence and readability rows, one per ablation.

    All bundles must share the same glossary snapshot and embedding
    provider; otherwise the numbers are not comparable and this raises.
    """
    if not bundles:
        raise DataError("compare_ablations requires at least one bundle")
    items = list(bundles.items())
    base_source = items[0][1].glossary_source
    base_provider = items[0][1].provider_id
    for ablation_id, bundle in items[1:]:
        if bundle.glossary_source != base_source:
            raise DataError(
                f"ablation {ablation_id!r} used glossary"
                f" {bundle.glossary_source!r}, expected {base_source!r}"
            )
        if bundle.provider_id != base_provider:
            raise DataError(
                f"ablation {ablation_id!r} used provider"
                f" {bundle.provider_id!r}, expected {base_provider!r}"
            )
    rows = []
    for ablation_id, bundle in items:
        model_row = next(r for r in bundle.summary if r.kind == "model")
        rows.append(
            ComparisonRow(
                ablation=ablation_id,
                adherence=model_row.adherence,
                word_count=model_row.word_count,
                gunning_fog=model_row.gunning_fog,
                flesch_kincaid=model_row.flesch_kincaid,
            )
        )
    return rows


def comparison_csv(rows: list[ComparisonRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "ablation",
            "adherence_mean", "adherence_std",
            "word_count_mean", "word_count_std",
            "gunning_fog_mean", "gunning_fog_std",
            "flesch_kincaid_mean", "flesch_kincaid_std",
        ]
    )
    for row in rows:
        writer.writerow(
            [
                row.ablation,
                _csv_num(row.adherence and row.adherence.mean),
                _csv_num(row.adherence and row.adherence.std),
                _csv_num(row.word_count.mean),
                _csv_num(row.word_count.std),
                _csv_num(row.gunning_fog.mean),
                _csv_num(row.gunning_fog.std),
                _csv_num(row.flesch_kincaid.mean),
                _csv_num(row.flesch_kincaid.std),
            ]
        )
    return buffer.getvalue()


def comparison_json(rows: list[ComparisonRow]) -> str:
    payload = [
        {
            "ablation": row.ablation,
            "adherence": _stats_json(row.adherence),
            "word_count": _estimate_json(row.word_count),
            "gunning_fog": _estimate_json(row.gunning_fog),
            "flesch_kincaid": _estimate_json(row.flesch_kincaid),
        }
        for row in rows
    ]
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
