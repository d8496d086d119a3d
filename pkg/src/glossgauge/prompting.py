"""Prompt templates used to ask a model for a one-sentence definition.

The registry ships eight templates: five phrasings of the plain request
(``base1``..``base5``) and three constrained variants that additionally ask
for official-glossary wording (``ipcc``), child-level readability
(``readable``), or both (``ipcc_readable``). Custom templates can be loaded
from a JSON-lines file with ``id``, ``family`` and ``pattern`` fields;
builtin ids are reserved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, DataError

PLACEHOLDER = "[TERM]"

FAMILIES = ("base", "ipcc", "readable", "ipcc_readable")

_IPCC_SUFFIX = (
    " Adhere to the official Intergovernmental Panel on Climate Change (IPCC)"
    " glossary without citing it."
)
_READABLE_SUFFIX = (
    " You must also make the definition understandable by a 10-year old."
)


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    family: str
    pattern: str


_BUILTINS = (
    PromptTemplate("base1", "base", 'Define "[TERM]" in one sentence.'),
    PromptTemplate(
        "base2", "base", 'How would you define "[TERM]" in a single sentence?'
    ),
    PromptTemplate(
        "base3", "base", 'Can you describe "[TERM]" in just one sentence?'
    ),
    PromptTemplate(
        "base4", "base", 'What is your one-sentence definition of "[TERM]"?'
    ),
    PromptTemplate(
        "base5", "base", 'In one sentence, what does "[TERM]" mean to you?'
    ),
    PromptTemplate("ipcc", "ipcc", 'Define "[TERM]" in one sentence.' + _IPCC_SUFFIX),
    PromptTemplate(
        "readable", "readable", 'Define "[TERM]" in one sentence.' + _READABLE_SUFFIX
    ),
    PromptTemplate(
        "ipcc_readable",
        "ipcc_readable",
        'Define "[TERM]" in one sentence.' + _IPCC_SUFFIX + _READABLE_SUFFIX,
    ),
)

BUILTIN_IDS = tuple(t.id for t in _BUILTINS)


def builtin_templates() -> list[PromptTemplate]:
    """Return the eight builtin templates (five base, three constrained)."""
    return list(_BUILTINS)


def _validate(template: PromptTemplate) -> None:
    if template.pattern.count(PLACEHOLDER) != 1:
        raise DataError(
            f"template {template.id!r}: pattern must contain {PLACEHOLDER}"
            f" exactly once"
        )
    if template.family not in FAMILIES:
        raise DataError(
            f"template {template.id!r}: unknown family {template.family!r}"
        )


def load_template_file(path: str | Path) -> list[PromptTemplate]:
    """Load custom templates from a JSON-lines file."""
    templates = []
    seen = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"template record {lineno}: invalid JSON ({exc})") from exc
        for fieldname in ("id", "family", "pattern"):
            if fieldname not in record:
                raise DataError(
                    f"template record {lineno}: missing field {fieldname!r}"
                )
        template = PromptTemplate(
            id=str(record["id"]),
            family=str(record["family"]),
            pattern=str(record["pattern"]),
        )
        if template.id in BUILTIN_IDS:
            raise DataError(f"template id {template.id!r} is reserved")
        if template.id in seen:
            raise DataError(f"duplicate template id {template.id!r}")
        seen.add(template.id)
        _validate(template)
        templates.append(template)
    return templates


def template_registry(
    template_file: str | Path | None = None,
) -> dict[str, PromptTemplate]:
    """Builtin templates plus any custom file, keyed by id."""
    registry = {t.id: t for t in _BUILTINS}
    if template_file is not None:
        for template in load_template_file(template_file):
            registry[template.id] = template
    return registry


def select_templates(
    ids: list[str], template_file: str | Path | None = None
) -> list[PromptTemplate]:
    registry = template_registry(template_file)
    unknown = [i for i in ids if i not in registry]
    if unknown:
        raise ConfigError(f"unknown template ids: {', '.join(unknown)}")
    return [registry[i] for i in ids]


def render(template: PromptTemplate, term: str) -> str:
    """Substitute the term into the template verbatim (no escaping)."""
    if not term or not term.strip():
        raise DataError("cannot render a prompt for an empty term")
    return template.pattern.replace(PLACEHOLDER, term, 1)
