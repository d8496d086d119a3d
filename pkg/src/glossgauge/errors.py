"""Exception hierarchy shared by all glossgauge modules.

The CLI maps these onto process exit codes: usage/config problems exit 1,
backend (network) failures exit 2, data problems exit 3.
"""

from __future__ import annotations


class GlossGaugeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GlossGaugeError):
    """Invalid configuration or CLI usage (exit code 1)."""


class BackendError(GlossGaugeError):
    """A generation or embedding backend failed after retries (exit code 2)."""


class DataError(GlossGaugeError):
    """Malformed or inconsistent input data (exit code 3)."""


class EmptyTextError(DataError):
    """An operation requiring nonempty text received empty input."""


class DuplicateTermError(DataError):
    """Two glossary records share the same term key."""

    def __init__(self, term: str):
        self.term = term
        super().__init__(f"duplicate glossary term: {term!r}")


class UnresolvedReferenceError(DataError):
    """A cross-reference cites a term that is not in the glossary."""

    def __init__(self, citing_term: str, cited_term: str):
        self.citing_term = citing_term
        self.cited_term = cited_term
        super().__init__(
            f"entry {citing_term!r} cites unknown term {cited_term!r}"
        )


class CrossReferenceCycleError(DataError):
    """Cross-references form a cycle; the chain cannot be resolved."""

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        chain = " -> ".join(self.cycle + [self.cycle[0]])
        super().__init__(f"cross-reference cycle: {chain}")


class GenerationError(BackendError):
    """A term's completion collection aborted; carries what succeeded.

    ``partial`` holds the CompletionSet built so far, so callers can
    persist or inspect completed work before the failure.
    """

    def __init__(self, term: str, partial, cause: Exception | None = None):
        self.term = term
        self.partial = partial
        self.cause = cause
        done = len(partial.completions) if partial is not None else 0
        super().__init__(
            f"generation for term {term!r} aborted after {done} completions: {cause}"
        )
