from __future__ import annotations

import math
import random

import pytest

from glossgauge.embedding import EmbeddingVector, cosine_similarity, hashed_stub_embed
from glossgauge.errors import DataError
from glossgauge.metrics import (
    AggregateStats,
    adherence,
    aggregate,
    pair_similarities,
    per_template_robustness,
    rank_terms,
    robustness,
    score_term,
)

DIM = 32


def _random_texts(rng: random.Random, n: int) -> list[str]:
    words = ["flux", "sink", "storm", "model", "ocean", "land", "cloud", "heat"]
    return [" ".join(rng.choices(words, k=rng.randint(1, 6))) for _ in range(n)]


def _vectors(rng: random.Random, n: int) -> list[EmbeddingVector]:
    return [hashed_stub_embed(t, DIM) for t in _random_texts(rng, n)]


def _naive_adherence(d: EmbeddingVector, vs: list[EmbeddingVector]) -> float:
    total = 0.0
    for v in vs:
        dot = 0.0
        for x, y in zip(d.values, v.values):
            dot += x * y
        total += min(1.0, max(-1.0, dot))
    return total / len(vs)


def _naive_robustness(vs: list[EmbeddingVector]) -> float:
    total = 0.0
    pairs = 0
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            dot = 0.0
            for x, y in zip(vs[i].values, vs[j].values):
                dot += x * y
            total += min(1.0, max(-1.0, dot))
            pairs += 1
    return total / pairs


# --- brute-force oracle equivalence ------------------------------------------


def test_adherence_matches_naive_loop_for_n25() -> None:
    rng = random.Random(7)
    d = _vectors(rng, 1)[0]
    completions = _vectors(rng, 25)
    assert adherence(d, completions) == pytest.approx(
        _naive_adherence(d, completions), abs=1e-9
    )


def test_robustness_matches_naive_double_loop_for_n5() -> None:
    rng = random.Random(11)
    completions = _vectors(rng, 5)
    assert len(pair_similarities(completions)) == 10
    assert robustness(completions) == pytest.approx(
        _naive_robustness(completions), abs=1e-9
    )


def test_metrics_match_oracles_across_small_n() -> None:
    rng = random.Random(1234)
    for _ in range(40):
        n = rng.randint(2, 6)
        d = _vectors(rng, 1)[0]
        completions = _vectors(rng, n)
        assert abs(adherence(d, completions) - _naive_adherence(d, completions)) <= 1e-12
        assert abs(robustness(completions) - _naive_robustness(completions)) <= 1e-12


# --- degenerate cases ---------------------------------------------------------


def test_adherence_of_identical_vectors_is_one() -> None:
    d = hashed_stub_embed("carbon dioxide", DIM)
    assert adherence(d, [d, d, d]) == pytest.approx(1.0, abs=1e-6)


def test_adherence_with_single_completion_equals_cosine() -> None:
    rng = random.Random(3)
    d, m = _vectors(rng, 2)
    assert adherence(d, [m]) == cosine_similarity(d, m)


def test_adherence_requires_completions() -> None:
    d = hashed_stub_embed("x", DIM)
    with pytest.raises(DataError):
        adherence(d, [])


def test_robustness_of_identical_vectors_is_one() -> None:
    v = hashed_stub_embed("leakage", DIM)
    assert robustness([v] * 5) == pytest.approx(1.0, abs=1e-6)


def test_robustness_of_two_vectors_is_their_similarity() -> None:
    rng = random.Random(5)
    a, b = _vectors(rng, 2)
    assert robustness([a, b]) == cosine_similarity(a, b)


def test_robustness_requires_at_least_two() -> None:
    with pytest.raises(DataError):
        robustness([hashed_stub_embed("x", DIM)])


def test_scores_are_bounded() -> None:
    rng = random.Random(17)
    for _ in range(20):
        d = _vectors(rng, 1)[0]
        completions = _vectors(rng, rng.randint(2, 8))
        a = adherence(d, completions)
        r = robustness(completions)
        # Stub vectors are non-negative, so scores live in [0, 1].
        assert 0.0 <= a <= 1.0
        assert 0.0 <= r <= 1.0


# --- permutation invariance -----------------------------------------------


def test_permutation_invariance_is_exact() -> None:
    rng = random.Random(23)
    completions = _vectors(rng, 6)
    d = _vectors(rng, 1)[0]
    base_pairs = sorted(pair_similarities(completions))
    base_adherence = adherence(d, completions)
    base_robustness = robustness(completions)
    for _ in range(10):
        shuffled = completions[:]
        rng.shuffle(shuffled)
        assert sorted(pair_similarities(shuffled)) == base_pairs
        assert abs(adherence(d, shuffled) - base_adherence) <= 1e-12
        assert abs(robustness(shuffled) - base_robustness) <= 1e-12


# --- per-template robustness -------------------------------------------------


def test_per_template_identical_groups_score_one() -> None:
    v = hashed_stub_embed("heat wave", DIM)
    groups = {"base1": [v, v, v], "base2": [v, v]}
    values = per_template_robustness(groups)
    assert values["base1"] == pytest.approx(1.0, abs=1e-6)
    assert values["base2"] == pytest.approx(1.0, abs=1e-6)


def test_per_template_tight_group_beats_dispersed_group() -> None:
    tight = [hashed_stub_embed("sea ice extent", DIM) for _ in range(3)]
    dispersed = [
        hashed_stub_embed("sea ice extent", DIM),
        hashed_stub_embed("completely different words", DIM),
        hashed_stub_embed("another unrelated phrase", DIM),
    ]
    values = per_template_robustness({"tight": tight, "loose": dispersed})
    assert values["tight"] > values["loose"]


def test_per_template_small_groups_are_omitted() -> None:
    v = hashed_stub_embed("single", DIM)
    values = per_template_robustness({"solo": [v], "pair": [v, v]})
    assert "solo" not in values
    assert set(values) == {"pair"}


def test_per_template_five_groups_of_five() -> None:
    rng = random.Random(29)
    groups = {f"base{i}": _vectors(rng, 5) for i in range(1, 6)}
    values = per_template_robustness(groups)
    assert len(values) == 5
    for template_id, vectors in groups.items():
        assert values[template_id] == pytest.approx(
            _naive_robustness(vectors), abs=1e-12
        )


def test_score_term_assembles_all_fields() -> None:
    rng = random.Random(31)
    d = _vectors(rng, 1)[0]
    completions = [("base1", v) for v in _vectors(rng, 2)]
    completions += [("base2", v) for v in _vectors(rng, 2)]
    score = score_term("Leakage", d, completions)
    assert score.term == "Leakage"
    assert score.n == 4
    assert len(score.per_completion_sims) == 4
    assert len(score.per_pair_sims) == 6  # 4*3/2
    assert set(score.per_template_robustness) == {"base1", "base2"}
    assert score.adherence == pytest.approx(
        sum(score.per_completion_sims) / 4, abs=1e-12
    )
    assert score.robustness == pytest.approx(sum(score.per_pair_sims) / 6, abs=1e-12)


# --- aggregation ----------------------------------------------------------


def test_aggregate_constant_values() -> None:
    stats = aggregate([0.5, 0.5])
    assert stats.mean == 0.5
    assert stats.std == 0.0
    assert stats.min == 0.5
    assert stats.max == 0.5
    assert stats.count == 2


def test_aggregate_matches_hand_computed_mean_and_population_std() -> None:
    # Hand-computed: mean of [0.2, 0.4, 0.9] = 0.5;
    # population variance = ((0.3)^2 + (0.1)^2 + (0.4)^2)/3 = 0.26/3.
    stats = aggregate([0.2, 0.4, 0.9])
    assert stats.mean == pytest.approx(0.5, abs=1e-9)
    assert stats.std == pytest.approx(math.sqrt(0.26 / 3.0), abs=1e-9)
    assert stats.min == 0.2 and stats.max == 0.9 and stats.count == 3


def test_aggregate_rejects_empty_input() -> None:
    with pytest.raises(DataError):
        aggregate([])


def test_aggregate_invariants_on_random_values() -> None:
    rng = random.Random(37)
    values = [rng.uniform(-1, 1) for _ in range(100)]
    stats = AggregateStats.from_values(values)
    assert stats.min <= stats.mean <= stats.max
    assert stats.std >= 0.0


# --- ranking ----------------------------------------------------------------


def test_rank_terms_full_depth_is_a_permutation() -> None:
    scores = [_mini_score("A", 0.9), _mini_score("B", 0.5), _mini_score("C", 0.1)]
    top, bottom = rank_terms(scores, "adherence", 3)
    assert {s.term for s in top} == {"A", "B", "C"}
    assert {s.term for s in bottom} == {"A", "B", "C"}
    assert [s.term for s in top] == ["A", "B", "C"]
    assert [s.term for s in bottom] == ["C", "B", "A"]


def _mini_score(term: str, value: float):
    from glossgauge.metrics import TermScore

    return TermScore(
        term=term,
        adherence=value,
        robustness=value,
        n=2,
        per_completion_sims=(value, value),
        per_pair_sims=(value,),
        per_template_robustness={},
    )


def test_rank_terms_top_and_bottom() -> None:
    scores = [_mini_score("Mid", 0.5), _mini_score("High", 0.9), _mini_score("Low", 0.1)]
    top, bottom = rank_terms(scores, "adherence", 1)
    assert top[0].term == "High"
    assert bottom[0].term == "Low"


def test_rank_terms_breaks_ties_lexicographically() -> None:
    scores = [_mini_score("B", 0.5), _mini_score("A", 0.5)]
    top, bottom = rank_terms(scores, "adherence", 1)
    assert top[0].term == "A"
    assert bottom[0].term == "A"


def test_rank_terms_rejects_oversized_k() -> None:
    scores = [_mini_score("A", 0.5)]
    with pytest.raises(DataError):
        rank_terms(scores, "adherence", 2)
    with pytest.raises(DataError):
        rank_terms(scores, "nonsense", 1)
