"""Text embedding providers and cosine similarity.

Two providers share one contract (unit-norm vectors of a fixed dimension):

* ``hashed_stub`` — a fully offline, bit-exact provider: lowercase, split on
  non-alphanumeric ASCII, FNV-1a 64-bit hash per token, bucket counts modulo
  the dimension, L2-normalized. Text with no tokens maps to the first basis
  vector so empty backend completions never abort a run.
* ``http`` — any service speaking the common embeddings wire protocol
  (``POST <endpoint>/v1/embeddings`` with ``model`` and ``input`` fields).

Vectors are cached as decimal text with 9 significant digits; freshly
computed vectors are passed through the same quantization before use, so a
warm-cache rerun reproduces bit-identical numbers.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import BackendError, ConfigError, DataError

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

_STUB_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")

API_KEY_ENV = "GLOSSGAUGE_API_KEY"


@dataclass(frozen=True)
class EmbeddingVector:
    """Unit-norm vector with the provider it came from."""

    values: tuple[float, ...]
    provider_id: str

    @property
    def dimension(self) -> int:
        return len(self.values)


@dataclass
class EmbeddingProviderConfig:
    kind: str = "hashed_stub"  # hashed_stub | http
    endpoint: str = ""
    model: str = ""
    dimension: int = 256
    seed: int = 0  # namespaces the stub provider id; the algorithm itself is fixed
    batch_size: int = 32
    max_retries: int = 3
    request_timeout: float = 30.0
    retry_backoff: float = 0.5
    cache_dir: str | None = None

    def provider_id(self) -> str:
        if self.kind == "hashed_stub":
            return f"hashed_stub:d{self.dimension}:s{self.seed}"
        if self.kind == "http":
            return f"http:{self.model}"
        raise ConfigError(f"unknown embedding provider kind {self.kind!r}")


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    value = FNV64_OFFSET
    for byte in data:
        value ^= byte
        value = (value * FNV64_PRIME) & _MASK64
    return value


def quantize(values: list[float] | tuple[float, ...]) -> tuple[float, ...]:
    """Round-trip values through the 9-significant-digit cache format."""
    return tuple(float(f"{v:.9g}") for v in values)


def _normalize(values: list[float]) -> list[float]:
    norm = math.sqrt(math.fsum(v * v for v in values))
    if norm == 0.0:
        raise DataError("cannot normalize a zero vector")
    return [v / norm for v in values]


def hashed_stub_embed(
    text: str, dimension: int, provider_id: str | None = None
) -> EmbeddingVector:
    """Deterministic token-hash histogram embedding.

    Algorithm, fixed bit-exactly: lowercase; split on non-alphanumeric ASCII;
    FNV-1a 64-bit hash per token; increment bucket ``hash % dimension``;
    L2-normalize. No tokens at all yields the basis vector e0.
    """
    if dimension < 8:
        raise ConfigError(f"stub embedding dimension must be >= 8, got {dimension}")
    if provider_id is None:
        provider_id = f"hashed_stub:d{dimension}:s0"
    tokens = [t for t in _STUB_TOKEN_SPLIT.split(text.lower()) if t]
    if not tokens:
        values = [0.0] * dimension
        values[0] = 1.0
        return EmbeddingVector(values=tuple(values), provider_id=provider_id)
    counts = [0.0] * dimension
    for token in tokens:
        counts[fnv1a64(token.encode("utf-8")) % dimension] += 1.0
    return EmbeddingVector(
        values=tuple(_normalize(counts)), provider_id=provider_id
    )


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Dot product of two unit vectors, clamped to [-1, 1]."""
    if a.provider_id != b.provider_id:
        raise DataError(
            f"provider mismatch: {a.provider_id!r} vs {b.provider_id!r}"
        )
    if a.dimension != b.dimension:
        raise DataError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}"
        )
    dot = math.fsum(x * y for x, y in zip(a.values, b.values))
    return max(-1.0, min(1.0, dot))


class EmbeddingCache:
    """Line-delimited record store keyed by (provider_id, text hash).

    Records hold the vector as decimal text with 9 significant digits.
    Writes rewrite the whole file to a temp path and rename it, so readers
    never observe a partial file. Safe for concurrent use from threads.
    """

    def __init__(self, path: str | Path | None):
        self._path = Path(path) if path is not None else None
        self._records: dict[tuple[str, str], tuple[str, ...]] = {}
        self._lock = threading.Lock()
        if self._path is not None and self._path.exists():
            self._load()

    @staticmethod
    def _key(provider_id: str, text: str) -> tuple[str, str]:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return (provider_id, digest)

    def _load(self) -> None:
        for line in self._path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            key = (record["provider"], record["text_sha256"])
            self._records[key] = tuple(record["values"])

    def get(self, provider_id: str, text: str) -> EmbeddingVector | None:
        with self._lock:
            stored = self._records.get(self._key(provider_id, text))
        if stored is None:
            return None
        return EmbeddingVector(
            values=tuple(float(v) for v in stored), provider_id=provider_id
        )

    def put(self, provider_id: str, text: str, values: tuple[float, ...]) -> None:
        formatted = tuple(f"{v:.9g}" for v in values)
        with self._lock:
            self._records[self._key(provider_id, text)] = formatted

    def flush(self) -> None:
        if self._path is None:
            return
        with self._lock:
            lines = [
                json.dumps(
                    {
                        "provider": provider,
                        "text_sha256": digest,
                        "values": list(values),
                    },
                    sort_keys=True,
                )
                for (provider, digest), values in sorted(self._records.items())
            ]
            self._path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self._path.with_suffix(self._path.suffix + ".tmp")
            tmp.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
            os.replace(tmp, self._path)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)


class HttpEmbeddingBackend:
    """Client for the ``/v1/embeddings`` wire protocol with retry."""

    def __init__(self, cfg: EmbeddingProviderConfig):
        if not cfg.endpoint:
            raise ConfigError("http embedding provider requires an endpoint")
        self.cfg = cfg
        self.calls = 0
        self._lock = threading.Lock()

    def embed(self, texts: list[str]) -> list[list[float]]:
        url = self.cfg.endpoint.rstrip("/") + "/v1/embeddings"
        payload = {"model": self.cfg.model, "input": texts}
        headers = {}
        api_key = os.environ.get(API_KEY_ENV, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        last_error: Exception | None = None
        for attempt in range(self.cfg.max_retries + 1):
            if attempt:
                time.sleep(self.cfg.retry_backoff * 2 ** (attempt - 1))
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
                    f"embeddings endpoint returned {response.status_code}"
                )
                continue
            try:
                data = response.json()["data"]
                rows = sorted(data, key=lambda item: item.get("index", 0))
                return [list(map(float, row["embedding"])) for row in rows]
            except (KeyError, TypeError, ValueError) as exc:
                last_error = exc
                continue
        raise BackendError(
            f"embedding request failed after {self.cfg.max_retries + 1} attempts:"
            f" {last_error}"
        )


def embed_batch(
    texts: list[str],
    cfg: EmbeddingProviderConfig,
    cache: EmbeddingCache | None = None,
    backend: HttpEmbeddingBackend | None = None,
) -> list[EmbeddingVector]:
    """Embed texts in order, consulting and filling the cache.

    All returned vectors are quantized to the cache's decimal format, so
    cold and warm runs produce identical values.
    """
    if not texts:
        raise DataError("embed_batch requires a nonempty list of texts")
    provider_id = cfg.provider_id()
    if cache is None:
        cache = EmbeddingCache(None)
    results: dict[int, EmbeddingVector] = {}
    pending: list[int] = []
    for i, text in enumerate(texts):
        hit = cache.get(provider_id, text)
        if hit is not None:
            results[i] = hit
        else:
            pending.append(i)
    if pending:
        if cfg.kind == "hashed_stub":
            unit = [
                list(hashed_stub_embed(texts[i], cfg.dimension, provider_id).values)
                for i in pending
            ]
        elif cfg.kind == "http":
            if backend is None:
                backend = HttpEmbeddingBackend(cfg)
            nonempty = [i for i in pending if texts[i].strip()]
            raw: dict[int, list[float]] = {}
            for start in range(0, len(nonempty), cfg.batch_size):
                chunk = nonempty[start : start + cfg.batch_size]
                rows = backend.embed([texts[i] for i in chunk])
                if len(rows) != len(chunk):
                    raise BackendError(
                        f"provider fault: {len(rows)} vectors for {len(chunk)} texts"
                    )
                raw.update(zip(chunk, rows))
            dimensions = {len(v) for v in raw.values()}
            if len(dimensions) > 1:
                raise BackendError(
                    "provider fault: mixed dimensions in one batch:"
                    f" {sorted(dimensions)}"
                )
            dim = dimensions.pop() if dimensions else cfg.dimension
            unit = []
            for i in pending:
                vector = raw.get(i)
                if vector is None or not any(vector):
                    # Empty text (or a degenerate zero vector) maps to e0 so
                    # runs with blank completions still finish.
                    vector = [0.0] * dim
                    vector[0] = 1.0
                    unit.append(vector)
                else:
                    unit.append(_normalize(vector))
        else:
            raise ConfigError(f"unknown embedding provider kind {cfg.kind!r}")
        for i, vector in zip(pending, unit):
            values = quantize(vector)
            cache.put(provider_id, texts[i], values)
            results[i] = EmbeddingVector(values=values, provider_id=provider_id)
        cache.flush()
    ordered = [results[i] for i in range(len(texts))]
    first_dim = ordered[0].dimension
    if any(v.dimension != first_dim for v in ordered):
        raise BackendError("provider fault: cached vectors disagree on dimension")
    return ordered
