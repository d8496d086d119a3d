from __future__ import annotations

import random

import pytest

from glossgauge.errors import DataError
from glossgauge.metrics import AggregateStats, TermScore
from glossgauge.readability import ReadabilityEstimate
from glossgauge.report import (
    Histogram,
    ReportBundle,
    SummaryRow,
    build_rankings,
    bundle_to_json,
    compare_ablations,
    comparison_csv,
    emit_histogram,
    histogram_csv,
    per_term_csv,
    summary_csv,
    summary_text,
)

# --- histogram -----------------------------------------------------------------


def test_histogram_places_paper_range_extremes() -> None:
    hist = emit_histogram([0.06, 0.94], bin_width=0.05)
    assert len(hist.counts) == 20
    # 0.06 lands in [0.05, 0.10) and 0.94 in [0.90, 0.95).
    assert hist.counts[1] == 1
    assert hist.counts[18] == 1
    assert sum(hist.counts) == 2


def test_histogram_identical_scores_fill_single_bin() -> None:
    hist = emit_histogram([0.42] * 7, bin_width=0.05)
    nonzero = [(i, c) for i, c in enumerate(hist.counts) if c]
    assert nonzero == [(8, 7)]


def test_histogram_matches_brute_force_binning_oracle() -> None:
    rng = random.Random(61)
    # Sample strictly inside bins so the oracle needs no edge convention.
    scores = [
        (rng.randrange(0, 20) + rng.uniform(0.1, 0.9)) * 0.05 for _ in range(500)
    ]
    hist = emit_histogram(scores, bin_width=0.05)
    oracle = [0] * 20
    for score in scores:
        for index in range(20):
            if index * 0.05 <= score < (index + 1) * 0.05 + (index == 19):
                oracle[index] += 1
                break
    assert list(hist.counts) == oracle


def test_histogram_edge_values_snap_into_upper_bin() -> None:
    hist = emit_histogram([0.0, 0.05, 0.15, 1.0], bin_width=0.05)
    assert hist.counts[0] == 1  # 0.0
    assert hist.counts[1] == 1  # 0.05 -> [0.05, 0.10)
    assert hist.counts[3] == 1  # 0.15 -> [0.15, 0.20)
    assert hist.counts[19] == 1  # 1.0 lands in the closed last bin


def test_histogram_clamps_out_of_range_scores_without_losing_mass() -> None:
    scores = [-0.2, -0.01, 0.5, 1.0]
    hist = emit_histogram(scores, bin_width=0.05)
    assert hist.below_range == 2
    assert hist.above_range == 0
    assert hist.total == len(scores)


def test_histogram_mass_conservation_on_random_scores() -> None:
    rng = random.Random(67)
    scores = [rng.uniform(-0.3, 1.1) for _ in range(300)]
    hist = emit_histogram(scores, bin_width=0.05)
    assert hist.total == 300


def test_histogram_rejects_nonpositive_bin_width() -> None:
    with pytest.raises(DataError):
        emit_histogram([0.5], bin_width=0.0)
    with pytest.raises(DataError):
        emit_histogram([0.5], bin_width=-0.1)


# --- bundle shapes ---------------------------------------------------------


def _estimate(metric: str, mean: float = 10.0, std: float = 1.0) -> ReadabilityEstimate:
    return ReadabilityEstimate(metric, mean, std, iterations=10, sample_size=5, seed=0)


def _stats(mean: float) -> AggregateStats:
    return AggregateStats(mean=mean, std=0.1, min=mean - 0.2, max=mean + 0.2, count=5)


def _model_row(label: str = "model-x", adher: float = 0.6) -> SummaryRow:
    return SummaryRow(
        label=label,
        kind="model",
        adherence=_stats(adher),
        robustness_all_pairs=_stats(0.9),
        robustness_within_template=_stats(0.95),
        word_count=_estimate("word_count", 30.0),
        gunning_fog=_estimate("gunning_fog", 20.0),
        flesch_kincaid=_estimate("flesch_kincaid", 17.0),
    )


def _official_row() -> SummaryRow:
    return SummaryRow(
        label="definitions",
        kind="official",
        adherence=None,
        robustness_all_pairs=None,
        robustness_within_template=None,
        word_count=_estimate("word_count", 25.0),
        gunning_fog=_estimate("gunning_fog", 18.0),
        flesch_kincaid=_estimate("flesch_kincaid", 15.0),
    )


def _term_score(term: str, value: float) -> TermScore:
    return TermScore(
        term=term,
        adherence=value,
        robustness=value,
        n=2,
        per_completion_sims=(value, value),
        per_pair_sims=(value,),
        per_template_robustness={"base1": value},
    )


def _bundle(glossary: str = "snap.jsonl", provider: str = "hashed_stub:d256:s0",
            label: str = "model-x") -> ReportBundle:
    scores = [_term_score("A", 0.9), _term_score("B", 0.5), _term_score("C", 0.1)]
    return ReportBundle(
        run_id="test-run",
        glossary_source=glossary,
        provider_id=provider,
        model_name=label,
        summary=(_model_row(label), _official_row()),
        rankings=build_rankings(scores, 1),
        histogram=emit_histogram([s.adherence for s in scores]),
        per_term=tuple(scores),
        warnings=("example warning",),
    )


def test_official_row_has_readability_but_no_scores() -> None:
    bundle = _bundle()
    official = next(r for r in bundle.summary if r.kind == "official")
    assert official.adherence is None
    assert official.robustness_all_pairs is None
    assert official.word_count.mean == 25.0
    assert len(bundle.summary) == 2  # one model + the official definitions row


def test_bundle_histogram_counts_match_per_term_scores() -> None:
    bundle = _bundle()
    assert bundle.histogram.total == len(bundle.per_term)


def test_bundle_json_is_deterministic_and_complete() -> None:
    first = bundle_to_json(_bundle())
    second = bundle_to_json(_bundle())
    assert first == second
    assert '"run_id": "test-run"' in first
    assert '"adherence": null' in first  # official definitions row
    assert '"warnings"' in first


def test_summary_text_renders_all_rows_and_sections() -> None:
    text = summary_text(_bundle())
    assert "model-x" in text
    assert "definitions" in text
    assert "adherence rankings" in text
    assert "robustness rankings" in text
    assert "adherence histogram" in text
    assert "example warning" in text


def test_summary_csv_official_row_has_blank_scores() -> None:
    lines = summary_csv(_bundle()).splitlines()
    assert lines[0].startswith("label,kind,adherence_mean")
    official = next(line for line in lines if line.startswith("definitions,"))
    fields = official.split(",")
    assert fields[2] == "" and fields[3] == ""  # adherence mean/std blank


def test_per_term_csv_lists_every_term() -> None:
    bundle = _bundle()
    lines = per_term_csv(bundle.per_term).splitlines()
    assert lines[0] == "term,adherence,robustness,n"
    assert len(lines) == 1 + len(bundle.per_term)


def test_histogram_csv_has_one_row_per_bin() -> None:
    hist = Histogram(
        bin_width=0.5, edges=(0.0, 0.5, 1.0), counts=(2, 3), below_range=1,
        above_range=0,
    )
    lines = histogram_csv(hist).splitlines()
    assert lines[0] == "edge_lo,edge_hi,count"
    assert lines[1] == "-inf,0,1"
    assert lines[2] == "0,0.5,2"
    assert lines[3] == "0.5,1,3"


# --- ablation comparison ------------------------------------------------------


def test_compare_ablations_single_bundle() -> None:
    rows = compare_ablations({"base": _bundle()})
    assert len(rows) == 1
    assert rows[0].ablation == "base"
    assert rows[0].adherence.mean == 0.6


def test_compare_ablations_side_by_side() -> None:
    bundles = {
        "base": _bundle(label="llama-base"),
        "readable": _bundle(label="llama-readable"),
    }
    rows = compare_ablations(bundles)
    assert [r.ablation for r in rows] == ["base", "readable"]
    csv_text = comparison_csv(rows)
    assert csv_text.splitlines()[0].startswith("ablation,adherence_mean")
    assert len(csv_text.splitlines()) == 3


def test_compare_ablations_rejects_mismatched_glossary() -> None:
    bundles = {
        "base": _bundle(glossary="snap_a.jsonl"),
        "other": _bundle(glossary="snap_b.jsonl"),
    }
    with pytest.raises(DataError):
        compare_ablations(bundles)


def test_compare_ablations_rejects_mismatched_provider() -> None:
    bundles = {
        "base": _bundle(provider="hashed_stub:d256:s0"),
        "other": _bundle(provider="hashed_stub:d128:s0"),
    }
    with pytest.raises(DataError):
        compare_ablations(bundles)


def test_compare_ablations_rejects_empty_input() -> None:
    with pytest.raises(DataError):
        compare_ablations({})
