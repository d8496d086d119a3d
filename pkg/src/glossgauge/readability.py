"""Readability scoring: Flesch-Kincaid grade, Gunning-Fog index, bootstrap.

Both formulas need at least ~100 words to be meaningful, and glossary
definitions are single sentences, so corpus-level estimates come from a
bootstrap: each iteration samples definitions with replacement, concatenates
them into one excerpt, and scores the excerpt; the estimate is the mean and
population std across iterations.

The component counts are fixed bit-exactly so goldens hold everywhere:

* Words: alphanumeric runs with internal apostrophes (shared tokenizer);
  hyphenated compounds split into separate tokens.
* Syllables: maximal vowel groups over a/e/i/o/u/y, minus one for a terminal
  silent "e" unless the word ends in "le" after a consonant; minimum 1.
* Complex words: 3 or more syllables on the raw token.
* Sentences: shared splitter; only sentences containing at least one word
  count.

Bootstrap randomness comes from numpy's PCG64 stream, seeded per iteration
from (seed, iteration index), so iterations are reproducible and could be
computed in any order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError
from .sentences import split_sentences, tokenize_words

log = logging.getLogger(__name__)

_VOWELS = frozenset("aeiouy")

MIN_BOOTSTRAP_WORDS = 100
MAX_REDRAWS = 10

METRIC_NAMES = ("flesch_kincaid", "gunning_fog", "word_count")


@dataclass(frozen=True)
class TextStats:
    sentences: int
    words: int
    syllables: int
    complex_words: int


@dataclass(frozen=True)
class ReadabilityEstimate:
    metric: str
    mean: float
    std: float
    iterations: int
    sample_size: int
    seed: int


def count_syllables(word: str) -> int:
    """Heuristic syllable count; always at least 1."""
    w = word.lower()
    groups = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if w.endswith("e"):
        ends_consonant_le = (
            len(w) >= 3
            and w.endswith("le")
            and w[-3].isalpha()
            and w[-3] not in _VOWELS
        )
        if not ends_consonant_le:
            groups -= 1
    return max(1, groups)


def text_stats(text: str) -> TextStats:
    """Component counts for the readability formulas."""
    sentence_count = sum(
        1 for sentence in split_sentences(text) if tokenize_words(sentence)
    )
    words = tokenize_words(text)
    syllables = 0
    complex_words = 0
    for word in words:
        count = count_syllables(word)
        syllables += count
        if count >= 3:
            complex_words += 1
    return TextStats(
        sentences=sentence_count,
        words=len(words),
        syllables=syllables,
        complex_words=complex_words,
    )


def _require_counts(stats: TextStats) -> None:
    if stats.sentences < 1 or stats.words < 1:
        raise DataError(
            f"readability needs at least one sentence and one word, got"
            f" sentences={stats.sentences} words={stats.words}"
        )


def flesch_kincaid(stats: TextStats) -> float:
    """Grade level: 0.39*(words/sentences) + 11.8*(syllables/words) - 15.59."""
    _require_counts(stats)
    return (
        0.39 * (stats.words / stats.sentences)
        + 11.8 * (stats.syllables / stats.words)
        - 15.59
    )


def gunning_fog(stats: TextStats) -> float:
    """Fog index: 0.4*((words/sentences) + 100*(complex_words/words))."""
    _require_counts(stats)
    return 0.4 * (
        stats.words / stats.sentences
        + 100.0 * (stats.complex_words / stats.words)
    )


def _iteration_rng(seed: int, iteration: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, iteration])))


def _mean_pstd(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    variance = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(variance)


def bootstrap_readability(
    corpus: Sequence[str],
    iterations: int = 1000,
    sample_size: int = 50,
    seed: int = 0,
) -> list[ReadabilityEstimate]:
    """Bootstrap both readability metrics plus plain word-count stats.

    Each iteration draws ``sample_size`` texts uniformly with replacement,
    joins them with single spaces, and scores the excerpt. Excerpts under
    100 words are redrawn (at most 10 times, then accepted with a warning).
    The word-count estimate is not bootstrapped: it is the mean and
    population std of per-definition word counts, recorded with
    iterations=1 and sample_size=len(corpus).
    """
    if not corpus:
        raise DataError("bootstrap requires a nonempty corpus")
    if iterations < 1:
        raise DataError(f"iterations must be >= 1, got {iterations}")
    if sample_size < 1:
        raise DataError(f"sample_size must be >= 1, got {sample_size}")
    texts = list(corpus)
    fk_values: list[float] = []
    gf_values: list[float] = []
    short_accepts = 0
    for iteration in range(iterations):
        rng = _iteration_rng(seed, iteration)
        stats = None
        for _ in range(1 + MAX_REDRAWS):
            indices = rng.integers(0, len(texts), size=sample_size)
            excerpt = " ".join(texts[int(i)] for i in indices)
            stats = text_stats(excerpt)
            if stats.words >= MIN_BOOTSTRAP_WORDS:
                break
        else:
            short_accepts += 1
        fk_values.append(flesch_kincaid(stats))
        gf_values.append(gunning_fog(stats))
    if short_accepts:
        log.warning(
            "%d bootstrap iteration(s) stayed under %d words after %d redraws;"
            " accepted as drawn",
            short_accepts,
            MIN_BOOTSTRAP_WORDS,
            MAX_REDRAWS,
        )
    word_counts = [float(len(tokenize_words(t))) for t in texts]
    fk_mean, fk_std = _mean_pstd(fk_values)
    gf_mean, gf_std = _mean_pstd(gf_values)
    wc_mean, wc_std = _mean_pstd(word_counts)
    return [
        ReadabilityEstimate("flesch_kincaid", fk_mean, fk_std, iterations, sample_size, seed),
        ReadabilityEstimate("gunning_fog", gf_mean, gf_std, iterations, sample_size, seed),
        ReadabilityEstimate("word_count", wc_mean, wc_std, 1, len(texts), seed),
    ]
