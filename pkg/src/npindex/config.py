"""Pipeline configuration: scoring parameters, thresholds, and file paths."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """Raised with the offending key name in the message."""


# Parameters that change artifact content; used for the stage hash.
_ALGORITHM_KEYS = (
    "lambda1", "lambda2", "ps_threshold", "ps_decay", "ps_floor",
    "max_phases", "atom_min_freq", "atom_noun_ratio", "atom_adj_ratio",
    "attest_substrings", "query_attest",
)

_PATH_KEYS = ("corpus", "lexicon", "queries", "qrels", "index", "output_dir")


@dataclass
class PipelineConfig:
    lambda1: float = 5.0
    lambda2: float = 1000.0
    ps_threshold: float = 0.7
    ps_decay: float = 0.9
    ps_floor: float = 0.3
    max_phases: int = 20
    atom_min_freq: int = 4
    atom_noun_ratio: float = 3.0
    atom_adj_ratio: float = 6.0
    attest_substrings: bool = False
    query_attest: bool = True
    run_tag: str = "npindex"
    search_limit: int = 1000
    corpus: str | None = None
    lexicon: str | None = None
    queries: str | None = None
    qrels: str | None = None
    index: str | None = None
    output_dir: str = "out"

    def validate(self) -> None:
        if not self.lambda1 > 0:
            raise ConfigError("lambda1 must be > 0")
        if not self.lambda2 > 0:
            raise ConfigError("lambda2 must be > 0")
        if not 0 < self.ps_floor <= self.ps_threshold <= 1:
            raise ConfigError("need 0 < ps_floor <= ps_threshold <= 1")
        if not 0 < self.ps_decay < 1:
            raise ConfigError("ps_decay must be in (0, 1)")
        if self.max_phases < 1:
            raise ConfigError("max_phases must be >= 1")
        if self.atom_min_freq < 1:
            raise ConfigError("atom_min_freq must be >= 1")
        if not self.atom_noun_ratio > 0:
            raise ConfigError("atom_noun_ratio must be > 0")
        if not self.atom_adj_ratio > self.atom_noun_ratio:
            raise ConfigError("atom_adj_ratio must exceed atom_noun_ratio")
        if self.search_limit < 0:
            raise ConfigError("search_limit must be >= 0")

    def config_hash(self) -> str:
        payload = {k: getattr(self, k) for k in _ALGORITHM_KEYS}
        digest = hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()
        return digest[:16]

    def merged(self, overrides: dict) -> "PipelineConfig":
        known = {f.name for f in fields(self)}
        values = {k: v for k, v in vars(self).items()}
        for key, value in overrides.items():
            if key not in known:
                raise ConfigError(f"unknown config key: {key}")
            if value is not None:
                values[key] = value
        return PipelineConfig(**values)


def load_config(path) -> PipelineConfig:
    """Read a JSON config file; unknown keys are an error naming the key."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    cfg = PipelineConfig().merged(data)
    cfg.validate()
    return cfg
