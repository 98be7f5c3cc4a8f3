from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

logger = logging.getLogger(__name__)

DEFAULTS: Dict[str, Any] = {
    "inputs": [],
    "encoding": "utf-8",
    "stopwords": None,
    "author_rules": None,
    "journal_rules": None,
    "external_ids": None,
    "surname_fold": "'",
    "stemmer": "plural",
    "use_title": True,
    "wk_multiplicity": False,
    "exclude_et_al": True,
    "idf_base": "e",
    "x_min": 1,
    "core_level": 1.0,
    "island_min": 2,
    "island_max": 10,
    "subject_prefix": "05C",
    "subject_extra": [],
    "min_works": 50,
    "top_k": 20,
    "tfidf_level": 3,
    "threads": 1,
    "out_dir": "out",
    "export_xlsx": False,
}

PATH_KEYS = ("stopwords", "author_rules", "journal_rules", "external_ids")


class ConfigError(ValueError):
    """Invalid pipeline configuration; ``problems`` lists every finding."""

    def __init__(self, problems: List[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class PipelineConfig:
    inputs: List[Path] = field(default_factory=list)
    encoding: str = "utf-8"
    stopwords: Optional[Path] = None
    author_rules: Optional[Path] = None
    journal_rules: Optional[Path] = None
    external_ids: Optional[Path] = None
    surname_fold: str = "'"
    stemmer: str = "plural"
    use_title: bool = True
    wk_multiplicity: bool = False
    exclude_et_al: bool = True
    idf_base: str = "e"
    x_min: int = 1
    core_level: float = 1.0
    island_min: int = 2
    island_max: int = 10
    subject_prefix: str = "05C"
    subject_extra: List[str] = field(default_factory=list)
    min_works: int = 50
    top_k: int = 20
    tfidf_level: int = 3
    threads: int = 1
    out_dir: Path = Path("out")
    export_xlsx: bool = False

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: Path | None = None) -> "PipelineConfig":
        """Build a config from JSON data; relative paths resolve against ``base``."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown configuration key {k!r}" for k in unknown])
        merged = {**DEFAULTS, **data}
        base = base or Path.cwd()

        def _path(value):
            if value is None:
                return None
            path = Path(value)
            return path if path.is_absolute() else base / path

        merged["inputs"] = [_path(p) for p in merged["inputs"]]
        for key in PATH_KEYS:
            merged[key] = _path(merged[key])
        merged["out_dir"] = _path(merged["out_dir"])
        merged["idf_base"] = str(merged["idf_base"])
        return cls(**merged)


def load_config(path: Path | str | None = None,
                overrides: Mapping[str, Any] | None = None) -> PipelineConfig:
    """Read a JSON configuration file and apply command-line ``overrides``."""
    data: Dict[str, Any] = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError([f"config file not found: {path}"])
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: invalid JSON ({exc})"]) from None
        if not isinstance(data, dict):
            raise ConfigError([f"{path}: top level must be an object"])
        base = path.resolve().parent
    config = PipelineConfig.from_mapping(data, base)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("out_dir",) + PATH_KEYS:
            value = Path(value)
        elif key == "inputs":
            value = [Path(v) for v in value]
        setattr(config, key, value)
    logger.debug("Loaded configuration: %s", config)
    return config


def validate_config(config: PipelineConfig, need_inputs: bool = False) -> None:
    """Raise one :class:`ConfigError` listing every problem found."""
    problems = []
    if need_inputs:
        if not config.inputs:
            problems.append("no input files configured")
        for path in config.inputs:
            if not path.is_file():
                problems.append(f"input file not found: {path}")
    for key in PATH_KEYS:
        path = getattr(config, key)
        if path is not None and not path.is_file():
            problems.append(f"{key} file not found: {path}")
    if config.encoding not in ("utf-8", "latin-1"):
        problems.append(f"encoding must be utf-8 or latin-1, got {config.encoding!r}")
    if config.stemmer not in ("plural", "identity", "porter"):
        problems.append(f"unknown stemmer {config.stemmer!r}")
    if config.idf_base not in ("e", "2", "10"):
        problems.append(f"idf_base must be e, 2 or 10, got {config.idf_base!r}")
    if config.x_min < 1:
        problems.append(f"x_min must be at least 1, got {config.x_min}")
    if config.core_level < 0:
        problems.append(f"core_level must be non-negative, got {config.core_level}")
    if not 1 < config.island_min <= config.island_max:
        problems.append(
            f"island sizes need 1 < min <= max, got [{config.island_min}, {config.island_max}]"
        )
    if config.min_works < 1:
        problems.append(f"min_works must be at least 1, got {config.min_works}")
    if config.top_k < 1:
        problems.append(f"top_k must be at least 1, got {config.top_k}")
    if config.tfidf_level not in (2, 3):
        problems.append(f"tfidf_level must be 2 or 3, got {config.tfidf_level}")
    if config.threads < 1:
        problems.append(f"threads must be at least 1, got {config.threads}")
    if problems:
        raise ConfigError(problems)
