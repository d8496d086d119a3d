"""Sentence splitting and word tokenization rules shared across the package.

The glossary normalizer and the readability analyzer must agree on what a
sentence is, so the rule set lives here and is fixed deterministically:

* A sentence ends at ``.``, ``!`` or ``?`` followed by whitespace or
  end-of-text.
* A period belonging to a known abbreviation (``e.g.``, ``i.e.``, ``etc.``,
  ``cf.``, ``vs.``) never ends a sentence.
* A period after a single capital letter is treated as an initial
  ("John J. Smith") and does not end a sentence, unless that letter is the
  first word of the current sentence (so "A. B? C!" splits into three).
* Text without any terminator is a single sentence.

Words are maximal runs of alphanumeric characters, optionally joined by
internal apostrophes; hyphenated compounds therefore split into their parts
and standalone numbers count as words.
"""

from __future__ import annotations

import re

from .errors import EmptyTextError

ABBREVIATIONS = frozenset({"e.g.", "i.e.", "etc.", "cf.", "vs."})

_TERMINATORS = frozenset(".!?")

# Alphanumeric runs with internal straight or curly apostrophes.
_WORD_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*", re.UNICODE)


def _token_ending_at(text: str, i: int) -> str:
    """Return the run of word characters and periods ending at index ``i``."""
    j = i
    while j > 0 and (text[j - 1].isalnum() or text[j - 1] == "."):
        j -= 1
    return text[j : i + 1]


def _period_terminates(text: str, i: int, sent_start: int) -> bool:
    if _token_ending_at(text, i).lower() in ABBREVIATIONS:
        return False
    prev = text[i - 1] if i > 0 else ""
    if prev.isalpha() and prev.isupper():
        before = text[i - 2] if i >= 2 else ""
        if not before.isalnum() and text[sent_start : i - 1].strip():
            # Single capital letter mid-sentence: an initial.
            return False
    return True


def split_sentences(text: str) -> list[str]:
    """Split ``text`` into sentences per the module rules.

    Each returned sentence is stripped of surrounding whitespace. Empty or
    whitespace-only input yields an empty list.
    """
    sentences: list[str] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS and (i + 1 == n or text[i + 1].isspace()):
            if ch != "." or _period_terminates(text, i, start):
                piece = text[start : i + 1].strip()
                if piece:
                    sentences.append(piece)
                start = i + 1
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def first_sentence(text: str) -> str:
    """Return the first sentence of ``text``, or all of it if unterminated.

    Raises EmptyTextError for empty or whitespace-only input.
    """
    if not text or not text.strip():
        raise EmptyTextError("cannot take the first sentence of empty text")
    return split_sentences(text)[0]


def is_single_sentence(text: str) -> bool:
    return len(split_sentences(text)) == 1


def tokenize_words(text: str) -> list[str]:
    """Return word tokens: alphanumeric runs with internal apostrophes."""
    return _WORD_RE.findall(text)
