"""Glossary ingestion: parsing, normalization, cross-references, subsetting.

A glossary snapshot is a UTF-8 file of records with ``term`` and
``definition`` fields, either line-delimited JSON (one object per line) or
CSV with a header row. Files ending in ``.csv`` are read as CSV, everything
else as JSON lines.

Normalization reduces every definition to its first sentence and then
replaces definitions that are pure cross-references ("See Pathways" /
"See also Pathways", optional trailing period) with the cited term's
normalized definition, following chains transitively. All transformations
return new Glossary values; nothing is mutated in place.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import (
    CrossReferenceCycleError,
    DataError,
    DuplicateTermError,
    UnresolvedReferenceError,
)
from .sentences import first_sentence

# A definition that is nothing but a cross-reference to another term. The
# cited term may not contain sentence terminators, so "See section 2. More."
# is not treated as a reference.
_CROSS_REF_RE = re.compile(r"^\s*see(?:\s+also)?\s+([^.!?]+?)\.?\s*$", re.IGNORECASE)

# Trailing parenthesized acronym: no internal whitespace, at least one
# uppercase letter ("(EAsiaM)", "(REDD+)" strip; "(climate)" does not).
_ACRONYM_RE = re.compile(r"\s*\(([^()\s]*[A-Z][^()\s]*)\)\s*$")

CROSSREF_MODES = ("definition", "term_name")


@dataclass(frozen=True)
class GlossaryEntry:
    """A term with its official definition and preprocessing provenance.

    ``raw_definition`` is preserved verbatim from the snapshot;
    ``normalized_definition`` starts equal to it and is rewritten by
    ``normalize_definitions`` and ``resolve_cross_references``.
    ``cross_refs_resolved`` lists every cited term substituted, in chain
    order.
    """

    term: str
    raw_definition: str
    normalized_definition: str
    cross_refs_resolved: tuple[str, ...] = ()


@dataclass(frozen=True)
class Glossary:
    entries: tuple[GlossaryEntry, ...]
    source_id: str = ""

    def __len__(self) -> int:
        return len(self.entries)

    def terms(self) -> list[str]:
        return [e.term for e in self.entries]

    def get(self, term: str) -> GlossaryEntry | None:
        return {term_key(e.term): e for e in self.entries}.get(term_key(term))


def term_key(term: str) -> str:
    """Uniqueness/lookup key: acronym stripped, case-folded, spaces collapsed."""
    stripped = _ACRONYM_RE.sub("", term)
    return " ".join(stripped.casefold().split())


def parse_glossary(path: str | Path) -> Glossary:
    """Read a snapshot file into a Glossary.

    Definitions are kept verbatim; ``normalized_definition`` is set equal to
    the raw text until ``normalize_definitions`` runs, so the two-phase
    provenance stays observable.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        records = _read_csv_records(path)
    else:
        records = _read_jsonl_records(path)
    return glossary_from_records(records, source_id=path.name)


def glossary_from_records(
    records: list[dict], source_id: str = ""
) -> Glossary:
    entries: list[GlossaryEntry] = []
    seen: set[str] = set()
    for index, record in enumerate(records):
        for fieldname in ("term", "definition"):
            if fieldname not in record or record[fieldname] is None:
                raise DataError(
                    f"record {index}: missing field {fieldname!r}"
                )
        term = str(record["term"]).strip()
        definition = str(record["definition"])
        if not term:
            raise DataError(f"record {index}: missing field 'term'")
        key = term_key(term)
        if key in seen:
            raise DuplicateTermError(term)
        seen.add(key)
        entries.append(
            GlossaryEntry(
                term=term,
                raw_definition=definition,
                normalized_definition=definition,
            )
        )
    return Glossary(entries=tuple(entries), source_id=source_id)


def _read_jsonl_records(path: Path) -> list[dict]:
    records = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"record {lineno}: invalid JSON ({exc})") from exc
            if not isinstance(record, dict):
                raise DataError(f"record {lineno}: expected an object")
            records.append(record)
    return records


def _read_csv_records(path: Path) -> list[dict]:
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return []
        return [dict(row) for row in reader]


def normalize_definitions(glossary: Glossary) -> Glossary:
    """Reduce every definition to its first sentence."""
    entries = []
    for index, entry in enumerate(glossary.entries):
        if not entry.raw_definition.strip():
            raise DataError(
                f"record {index} ({entry.term!r}): missing field 'definition'"
            )
        entries.append(
            replace(entry, normalized_definition=first_sentence(entry.raw_definition))
        )
    return replace(glossary, entries=tuple(entries))


def cross_reference_target(definition: str) -> str | None:
    """Return the cited term if ``definition`` is a pure cross-reference."""
    match = _CROSS_REF_RE.match(definition)
    return match.group(1).strip() if match else None


def resolve_cross_references(
    glossary: Glossary, mode: str = "definition"
) -> Glossary:
    """Replace cross-reference definitions with the cited term's content.

    ``mode="definition"`` substitutes the cited term's normalized definition,
    following chains transitively; ``mode="term_name"`` substitutes the cited
    term's canonical surface form. Missing targets and reference cycles
    raise; both checks run in either mode.
    """
    if mode not in CROSSREF_MODES:
        raise DataError(f"unknown crossref_mode {mode!r}")
    by_key = {term_key(e.term): e for e in glossary.entries}
    resolved: dict[str, tuple[str, tuple[str, ...]]] = {}

    def resolve(entry: GlossaryEntry, chain: list[str]) -> tuple[str, tuple[str, ...]]:
        key = term_key(entry.term)
        if key in resolved:
            return resolved[key]
        target_name = cross_reference_target(entry.normalized_definition)
        if target_name is None:
            result = (entry.normalized_definition, ())
            resolved[key] = result
            return result
        target_key = term_key(target_name)
        target = by_key.get(target_key)
        if target is None:
            raise UnresolvedReferenceError(entry.term, target_name)
        if target_key == key:
            raise CrossReferenceCycleError([entry.term])
        if target_key in (term_key(t) for t in chain):
            cycle_start = next(
                i for i, t in enumerate(chain) if term_key(t) == target_key
            )
            raise CrossReferenceCycleError(chain[cycle_start:] + [entry.term])
        if mode == "term_name":
            result = (target.term, (target.term,))
            resolved[key] = result
            return result
        text, tail = resolve(target, chain + [entry.term])
        result = (text, (target.term,) + tail)
        resolved[key] = result
        return result

    entries = []
    for entry in glossary.entries:
        text, refs = resolve(entry, [])
        entries.append(
            replace(
                entry,
                normalized_definition=text,
                # Accumulate provenance so a second pass is a no-op.
                cross_refs_resolved=entry.cross_refs_resolved + refs,
            )
        )
    return replace(glossary, entries=tuple(entries))


@dataclass(frozen=True)
class SubsetResult:
    glossary: Glossary
    missing: tuple[str, ...] = field(default=())


def select_subset(glossary: Glossary, keep: list[str]) -> SubsetResult:
    """Filter entries to the keep-list order; unknown names become warnings."""
    by_key = {term_key(e.term): e for e in glossary.entries}
    entries: list[GlossaryEntry] = []
    missing: list[str] = []
    used: set[str] = set()
    for name in keep:
        key = term_key(name)
        if key in used:
            continue
        entry = by_key.get(key)
        if entry is None:
            missing.append(name)
        else:
            entries.append(entry)
            used.add(key)
    return SubsetResult(
        glossary=replace(glossary, entries=tuple(entries)),
        missing=tuple(missing),
    )


def read_keep_list(path: str | Path) -> list[str]:
    """Read a keep-list file: one term per line, ``#`` comments allowed."""
    terms = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.append(line)
    return terms


def write_glossary(glossary: Glossary, path: str | Path) -> None:
    """Persist a glossary as line-delimited JSON records."""
    lines = []
    for entry in glossary.entries:
        lines.append(
            json.dumps(
                {
                    "term": entry.term,
                    "definition": entry.raw_definition,
                    "normalized_definition": entry.normalized_definition,
                    "cross_refs_resolved": list(entry.cross_refs_resolved),
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
