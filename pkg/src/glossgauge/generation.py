"""Completion collection: pluggable backends, retry, and a durable cache.

Two backends:

* ``stub`` — offline and deterministic: a SHA-256 digest of
  (seed, sample index, prompt) selects and orders words from a fixed
  vocabulary, so golden transcripts hold on every platform.
* ``http_chat`` — the common chat-completions wire protocol:
  ``POST <endpoint>/v1/chat/completions`` with a single user message,
  ``n: 1`` (samples are independent requests so every completion is
  individually cache-addressable), bearer token from ``GLOSSGAUGE_API_KEY``.

The cache is keyed by (model, template id, rendered prompt, sample index)
and persisted as line-delimited JSON; a hit returns the stored text
byte-identically and skips the backend entirely.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

import requests

from .errors import BackendError, ConfigError, GenerationError
from .prompting import PromptTemplate, render

log = logging.getLogger(__name__)

API_KEY_ENV = "GLOSSGAUGE_API_KEY"

BACKENDS = ("stub", "http_chat")

# Fixed vocabulary for the stub backend. Changing it invalidates goldens.
_STUB_VOCAB = (
    "process", "system", "change", "measure", "region", "balance", "surface",
    "carbon", "energy", "impact", "model", "climate", "water", "global",
    "increase", "natural", "human", "activity", "level", "average", "effect",
    "long", "term", "pattern", "gas", "heat", "land", "ocean", "policy",
    "risk", "variation", "response", "condition", "resource", "emission",
    "of", "the", "in", "and", "over", "between", "across", "within", "under",
    "by", "from", "with", "toward",
)


@dataclass
class GenerationConfig:
    backend: str = "stub"  # stub | http_chat
    endpoint: str = ""
    model_name: str = "stub-model"
    samples_per_template: int = 5
    temperature: float | None = None  # None = backend default
    max_retries: int = 3
    request_timeout: float = 30.0
    rate_limit: float = 0.0  # requests/second; 0 = unlimited
    retry_backoff: float = 0.5
    stub_seed: int = 0
    cache_dir: str | None = None

    def validate(self) -> None:
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown generation backend {self.backend!r}")
        if self.samples_per_template < 1:
            raise ConfigError(
                f"samples_per_template must be >= 1, got {self.samples_per_template}"
            )
        if self.backend == "http_chat" and not self.endpoint:
            raise ConfigError("http_chat backend requires an endpoint")


@dataclass(frozen=True)
class Completion:
    """One completion text plus collection metadata."""

    text: str
    timestamp: str
    backend: dict
    flagged_empty: bool = False


@dataclass(frozen=True)
class CompletionSet:
    """All completions for one term, keyed by (template_id, sample_index)."""

    term: str
    model_name: str
    completions: dict[tuple[str, int], Completion] = field(default_factory=dict)

    def texts_ordered(
        self, template_ids: list[str], samples_per_template: int
    ) -> list[tuple[str, int, str]]:
        out = []
        for template_id in template_ids:
            for sample in range(samples_per_template):
                out.append(
                    (template_id, sample, self.completions[(template_id, sample)].text)
                )
        return out


CacheKey = tuple[str, str, str, int]  # (model, template_id, prompt, sample_index)


class CompletionCache:
    """Content-addressed completion store persisted as JSON lines.

    The whole store is rewritten to a temp file and renamed on flush, so a
    reader never sees a torn file. Thread-safe.
    """

    def __init__(self, path: str | Path | None):
        self._path = Path(path) if path is not None else None
        self._records: dict[CacheKey, Completion] = {}
        self._lock = threading.Lock()
        if self._path is not None and self._path.exists():
            self._load()

    def _load(self) -> None:
        for line in self._path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            key = (
                record["model"],
                record["template_id"],
                record["prompt"],
                int(record["sample_index"]),
            )
            self._records[key] = Completion(
                text=record["text"],
                timestamp=record["timestamp"],
                backend=record.get("backend", {}),
                flagged_empty=bool(record.get("flagged_empty", False)),
            )

    def get(self, key: CacheKey) -> Completion | None:
        with self._lock:
            return self._records.get(key)

    def put(self, key: CacheKey, completion: Completion) -> None:
        with self._lock:
            self._records[key] = completion

    def flush(self) -> None:
        if self._path is None:
            return
        with self._lock:
            lines = []
            for key in sorted(self._records):
                model, template_id, prompt, sample_index = key
                completion = self._records[key]
                lines.append(
                    json.dumps(
                        {
                            "model": model,
                            "template_id": template_id,
                            "prompt": prompt,
                            "sample_index": sample_index,
                            "text": completion.text,
                            "timestamp": completion.timestamp,
                            "backend": completion.backend,
                            "flagged_empty": completion.flagged_empty,
                        },
                        ensure_ascii=False,
                        sort_keys=True,
                    )
                )
            self._path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self._path.with_suffix(self._path.suffix + ".tmp")
            tmp.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
            os.replace(tmp, self._path)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)


def _digest_stream(base: bytes) -> Iterator[int]:
    """Endless deterministic byte stream derived from SHA-256 of ``base``."""
    counter = 0
    while True:
        block = hashlib.sha256(base + counter.to_bytes(4, "big")).digest()
        yield from block
        counter += 1


def stub_complete(prompt: str, sample_index: int, seed: int) -> str:
    """Deterministic pseudo-definition built from the fixed vocabulary."""
    base = f"{seed}\x1f{sample_index}\x1f{prompt}".encode("utf-8")
    head = hashlib.sha256(base).digest()
    length = 8 + head[0] % 7
    stream = _digest_stream(base)
    words = []
    for _ in range(length):
        hi, lo = next(stream), next(stream)
        words.append(_STUB_VOCAB[((hi << 8) | lo) % len(_STUB_VOCAB)])
    sentence = " ".join(words)
    return sentence[0].upper() + sentence[1:] + "."


class StubBackend:
    def __init__(self, cfg: GenerationConfig):
        self.seed = cfg.stub_seed
        self.model_name = cfg.model_name
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, prompt: str, sample_index: int) -> tuple[str, dict]:
        with self._lock:
            self.calls += 1
        text = stub_complete(prompt, sample_index, self.seed)
        return text, {"backend": "stub", "seed": self.seed}


class _RateLimiter:
    def __init__(self, per_second: float):
        self._interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self) -> None:
        if self._interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_at - now
            self._next_at = max(now, self._next_at) + self._interval
        if delay > 0:
            time.sleep(delay)


class HttpChatBackend:
    """Chat-completions client with rate limiting and exponential backoff."""

    def __init__(self, cfg: GenerationConfig):
        cfg.validate()
        self.cfg = cfg
        self.calls = 0
        self._limiter = _RateLimiter(cfg.rate_limit)
        self._lock = threading.Lock()

    def complete(self, prompt: str, sample_index: int) -> tuple[str, dict]:
        url = self.cfg.endpoint.rstrip("/") + "/v1/chat/completions"
        payload: dict = {
            "model": self.cfg.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "n": 1,
        }
        if self.cfg.temperature is not None:
            payload["temperature"] = self.cfg.temperature
        headers = {}
        api_key = os.environ.get(API_KEY_ENV, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        last_error: Exception | None = None
        for attempt in range(self.cfg.max_retries + 1):
            if attempt:
                time.sleep(self.cfg.retry_backoff * 2 ** (attempt - 1))
            self._limiter.wait()
            with self._lock:
                self.calls += 1
            try:
                response = requests.post(
                    url, json=payload, headers=headers,
                    timeout=self.cfg.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code != 200:
                last_error = BackendError(
                    f"chat endpoint returned {response.status_code}"
                )
                continue
            try:
                data = response.json()
                text = data["choices"][0]["message"]["content"]
                if text is None:
                    text = ""
                meta = {"backend": "http_chat", "model": data.get("model", "")}
                return str(text), meta
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                last_error = exc
                continue
        raise BackendError(
            f"chat request failed after {self.cfg.max_retries + 1} attempts:"
            f" {last_error}"
        )


def make_backend(cfg: GenerationConfig):
    cfg.validate()
    if cfg.backend == "stub":
        return StubBackend(cfg)
    return HttpChatBackend(cfg)


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def generate_for_term(
    term: str,
    templates: list[PromptTemplate],
    cfg: GenerationConfig,
    cache: CompletionCache,
    backend=None,
) -> CompletionSet:
    """Collect samples_per_template completions for every template.

    The cache is consulted before any backend call and new completions are
    persisted before returning. If a completion still fails after retries,
    the term aborts with a GenerationError carrying what succeeded.
    """
    cfg.validate()
    if backend is None:
        backend = make_backend(cfg)
    completions: dict[tuple[str, int], Completion] = {}
    for template in templates:
        prompt = render(template, term)
        for sample in range(cfg.samples_per_template):
            key: CacheKey = (cfg.model_name, template.id, prompt, sample)
            record = cache.get(key)
            if record is None:
                try:
                    text, meta = backend.complete(prompt, sample)
                except BackendError as exc:
                    cache.flush()
                    raise GenerationError(
                        term=term,
                        partial=CompletionSet(
                            term=term, model_name=cfg.model_name,
                            completions=completions,
                        ),
                        cause=exc,
                    ) from exc
                text = text.strip()
                if not text:
                    log.warning(
                        "empty completion for term %r (template %s, sample %d)",
                        term, template.id, sample,
                    )
                record = Completion(
                    text=text,
                    timestamp=_now_iso(),
                    backend=meta,
                    flagged_empty=not text,
                )
                cache.put(key, record)
            completions[(template.id, sample)] = record
    cache.flush()
    return CompletionSet(term=term, model_name=cfg.model_name, completions=completions)
