"""Per-term adherence and robustness scores, aggregation, and ranking.

Adherence is the mean cosine similarity between the official definition's
embedding and each generated completion's embedding. Robustness is the mean
cosine similarity over all unique unordered pairs of a term's completions
(n(n-1)/2 pairs), so 1.0 means the model says the same thing every time.

All means use exact summation (``math.fsum``), which makes both scores
invariant under any reordering of the completion list.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .embedding import EmbeddingVector, cosine_similarity
from .errors import DataError

log = logging.getLogger(__name__)

RANK_KEYS = ("adherence", "robustness")


@dataclass(frozen=True)
class TermScore:
    term: str
    adherence: float
    robustness: float
    n: int
    per_completion_sims: tuple[float, ...]
    per_pair_sims: tuple[float, ...]
    per_template_robustness: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class AggregateStats:
    """Mean, population std, min, max and count of a list of reals."""

    mean: float
    std: float
    min: float
    max: float
    count: int

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "AggregateStats":
        if not values:
            raise DataError("cannot aggregate an empty list of values")
        n = len(values)
        mean = math.fsum(values) / n
        variance = math.fsum((v - mean) ** 2 for v in values) / n
        return cls(
            mean=mean,
            std=math.sqrt(variance),
            min=min(values),
            max=max(values),
            count=n,
        )


def adherence(
    official: EmbeddingVector, completions: Sequence[EmbeddingVector]
) -> float:
    """Mean cosine similarity between the official vector and each completion."""
    if not completions:
        raise DataError("adherence requires at least one completion")
    return math.fsum(cosine_similarity(official, m) for m in completions) / len(
        completions
    )


def pair_similarities(vectors: Sequence[EmbeddingVector]) -> list[float]:
    """Cosine similarity for every unordered pair, in (i, j) index order."""
    return [
        cosine_similarity(vectors[i], vectors[j])
        for i in range(len(vectors))
        for j in range(i + 1, len(vectors))
    ]


def robustness(completions: Sequence[EmbeddingVector]) -> float:
    """Mean cosine similarity over all n(n-1)/2 unordered completion pairs."""
    n = len(completions)
    if n < 2:
        raise DataError(f"robustness requires at least 2 completions, got {n}")
    pairs = pair_similarities(completions)
    return math.fsum(pairs) / len(pairs)


def per_template_robustness(
    groups: Mapping[str, Sequence[EmbeddingVector]]
) -> dict[str, float]:
    """Robustness within each template group; groups of size < 2 are omitted."""
    results: dict[str, float] = {}
    for template_id, vectors in groups.items():
        if len(vectors) < 2:
            log.warning(
                "template %r has %d completion(s); omitting from per-template"
                " robustness",
                template_id,
                len(vectors),
            )
            continue
        results[template_id] = robustness(vectors)
    return results


def score_term(
    term: str,
    official: EmbeddingVector,
    completions: Sequence[tuple[str, EmbeddingVector]],
) -> TermScore:
    """Build the full score record for one term.

    ``completions`` pairs each vector with its template id, ordered by
    (template, sample index); that order defines the stored similarity lists.
    """
    vectors = [v for _, v in completions]
    sims = tuple(cosine_similarity(official, v) for v in vectors)
    pairs = tuple(pair_similarities(vectors))
    groups: dict[str, list[EmbeddingVector]] = {}
    for template_id, vector in completions:
        groups.setdefault(template_id, []).append(vector)
    return TermScore(
        term=term,
        adherence=adherence(official, vectors),
        robustness=robustness(vectors),
        n=len(vectors),
        per_completion_sims=sims,
        per_pair_sims=pairs,
        per_template_robustness=per_template_robustness(groups),
    )


def aggregate(values: Sequence[float]) -> AggregateStats:
    return AggregateStats.from_values(values)


def rank_terms(
    scores: Sequence[TermScore], key: str, k: int
) -> tuple[list[TermScore], list[TermScore]]:
    """Top-k and bottom-k terms by ``key``; ties break on ascending term text."""
    if key not in RANK_KEYS:
        raise DataError(f"unknown ranking key {key!r}")
    if k > len(scores):
        raise DataError(f"k={k} exceeds the {len(scores)} available scores")
    value = lambda s: getattr(s, key)
    top = sorted(scores, key=lambda s: (-value(s), s.term))[:k]
    bottom = sorted(scores, key=lambda s: (value(s), s.term))[:k]
    return top, bottom
