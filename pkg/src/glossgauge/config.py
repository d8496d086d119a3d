"""Run configuration: defaults, YAML config files, CLI overrides.

The config file is a YAML document with one section per module::

    seed: 42
    glossary:
      snapshot: glossary.jsonl
      keep_list: keep.txt          # optional
      crossref_mode: definition    # or term_name
    prompting:
      templates: [base1, base2, base3, base4, base5]
      template_file: null          # optional custom templates (JSONL)
    generation:
      backend: stub                # or http_chat
      endpoint: ""
      model_name: stub-model
      samples_per_template: 5
      temperature: null            # null = backend default
      max_retries: 3
      request_timeout: 30.0
      rate_limit: 0.0              # requests/second, 0 = unlimited
    embedding:
      kind: hashed_stub            # or http
      endpoint: ""
      model: ""
      dimension: 256
      seed: 0
      batch_size: 32
    readability:
      iterations: 1000
      sample_size: 50
    report:
      top_k: 3
      histogram_bin_width: 0.05

CLI flags override file values; anything omitted falls back to the defaults
above. The full resolved config is snapshotted into the run manifest.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .embedding import EmbeddingProviderConfig
from .errors import ConfigError
from .generation import GenerationConfig


@dataclass
class GlossaryConfig:
    snapshot: str = ""
    keep_list: str | None = None
    crossref_mode: str = "definition"


@dataclass
class PromptingConfig:
    templates: list[str] = field(
        default_factory=lambda: ["base1", "base2", "base3", "base4", "base5"]
    )
    template_file: str | None = None


@dataclass
class ReadabilityConfig:
    iterations: int = 1000
    sample_size: int = 50


@dataclass
class ReportConfig:
    top_k: int = 3
    histogram_bin_width: float = 0.05


@dataclass
class RunConfig:
    """Everything a run needs; seed feeds both the stub backend and the bootstrap."""

    seed: int = 42
    glossary: GlossaryConfig = field(default_factory=GlossaryConfig)
    prompting: PromptingConfig = field(default_factory=PromptingConfig)
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    embedding: EmbeddingProviderConfig = field(default_factory=EmbeddingProviderConfig)
    readability: ReadabilityConfig = field(default_factory=ReadabilityConfig)
    report: ReportConfig = field(default_factory=ReportConfig)

    def snapshot(self) -> dict:
        return dataclasses.asdict(self)


def _apply_section(instance, values: dict, section: str) -> None:
    known = {f.name for f in dataclasses.fields(instance)}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {section}.{key}")
        setattr(instance, key, value)


def load_config(path: str | Path | None = None) -> RunConfig:
    """Build a RunConfig from defaults plus an optional YAML file."""
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc
    if raw is None:
        return cfg
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    sections = {
        "glossary": cfg.glossary,
        "prompting": cfg.prompting,
        "generation": cfg.generation,
        "embedding": cfg.embedding,
        "readability": cfg.readability,
        "report": cfg.report,
    }
    for key, value in raw.items():
        if key == "seed":
            cfg.seed = int(value)
        elif key in sections:
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be a mapping")
            _apply_section(sections[key], value, key)
        else:
            raise ConfigError(f"unknown config section {key!r}")
    return cfg
