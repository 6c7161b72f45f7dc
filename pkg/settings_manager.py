"""Run configuration: the RunConfig record and flat key=value config files."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Optional

import config
from errors import GraphIoError, InvalidParameters, ParseError

logger = logging.getLogger(__name__)

P_ALGORITHMS = ("color-a1eps", "color-oa")


@dataclass
class RunConfig:
    """Everything needed to reproduce one ``cliquesim run``.

    The graph comes from ``graph`` (a file) or, when that is empty, from the
    family generator parameters. ``a`` of None means: use the generator's
    witness bound, else the degeneracy.
    ``p`` overrides the split width of color-a1eps and color-oa; ``t`` the
    class count of the sqrt MIS split. Both stay None elsewhere.
    """

    algorithm: str = "forest-decomp"
    graph: str = ""
    family: str = "forest_union"
    n: int = 64
    k: int = 2
    rows: int = 0
    cols: int = 0
    d: int = 1
    density: float = 1.0
    seed: int = 0
    a: Optional[float] = None
    eps: float = config.DEFAULT_EPS
    eps_h: float = config.EPS_H
    p: Optional[int] = None
    t: Optional[int] = None
    split: str = "sqrt"
    workers: int = 1
    solution_out: str = ""
    stats_out: str = ""
    csv_out: str = ""
    db: str = ""

    def validate(self) -> "RunConfig":
        if self.algorithm not in config.ALGORITHMS:
            raise InvalidParameters(f"unknown algorithm {self.algorithm!r}; expected one of {config.ALGORITHMS}")
        if self.split not in config.MIS_SPLITS:
            raise InvalidParameters(f"unknown split {self.split!r}; expected one of {config.MIS_SPLITS}")
        if self.eps <= 0 or self.eps_h <= 0:
            raise InvalidParameters("eps and eps_h must be positive")
        if self.workers < 1:
            raise InvalidParameters("workers must be >= 1")
        if self.p is not None and self.algorithm not in P_ALGORITHMS:
            raise InvalidParameters(f"p only applies to {', '.join(P_ALGORITHMS)}")
        if self.t is not None and (self.algorithm != "mis" or self.split != "sqrt"):
            raise InvalidParameters("t only applies to mis with split=sqrt")
        return self

    def to_text(self) -> str:
        """Serialize as ``key=value`` lines in field order; None becomes an empty value."""

        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name}={'' if value is None else _format(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls.from_mapping(parse_key_values(text))

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> "RunConfig":
        """Build from string values; unknown keys raise ParseError."""

        known = {f.name: f for f in fields(cls)}
        kwargs: dict[str, Any] = {}
        for key, raw in values.items():
            if key not in known:
                raise ParseError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(known[key].type, raw, key)
        return cls(**kwargs)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _format(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(type_name: Any, raw: str, key: str) -> Any:
    name = str(type_name).replace("typing.", "")
    optional = name.startswith("Optional[")
    if optional:
        name = name[len("Optional[") : -1]
        if raw == "":
            return None
    try:
        if name == "int":
            return int(raw)
        if name == "float":
            return float(raw)
    except ValueError as e:
        raise ParseError(f"config key {key!r}: {raw!r} is not a {name}") from e
    return raw


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment line, blank lines are skipped."""

    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class SettingsManager:
    """File-backed settings with an in-memory cache.

    Keys may carry a dotted category (``bench.jobs``); ``get_category``
    returns the keys under one prefix with the prefix stripped.
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path else None
        self._cache: dict[str, str] = {}
        if self.path is not None and self.path.exists():
            self.preload()

    @staticmethod
    def make_key(category: str, key: str) -> str:
        category = (category or "").strip()
        key = (key or "").strip()
        return f"{category}.{key}" if category else key

    def preload(self) -> None:
        if self.path is None:
            return
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as e:
            raise GraphIoError(f"cannot read config {self.path}: {e}") from e
        self._cache = parse_key_values(text)
        logger.debug("loaded %d settings from %s", len(self._cache), self.path)

    def get(self, category: str, key: str, default: Any = None) -> Any:
        return self._cache.get(self.make_key(category, key), default)

    def get_int(self, category: str, key: str, default: int = 0) -> int:
        value = self.get(category, key)
        return default if value in (None, "") else _coerce("int", value, self.make_key(category, key))

    def get_float(self, category: str, key: str, default: float = 0.0) -> float:
        value = self.get(category, key)
        return default if value in (None, "") else _coerce("float", value, self.make_key(category, key))

    def get_ints(self, category: str, key: str, default: list[int]) -> list[int]:
        """Comma- or space-separated integers."""

        value = self.get(category, key)
        if value in (None, ""):
            return default
        return [_coerce("int", item, self.make_key(category, key)) for item in value.replace(",", " ").split()]

    def set(self, category: str, key: str, value: Any) -> None:
        self._cache[self.make_key(category, key)] = "" if value is None else _format(value)

    def get_category(self, category: str) -> dict[str, str]:
        prefix = f"{category}."
        return {k[len(prefix) :]: v for k, v in self._cache.items() if k.startswith(prefix)}

    def flat(self) -> dict[str, str]:
        """Keys without a category."""

        return {k: v for k, v in self._cache.items() if "." not in k}

    def save(self, path: str | Path | None = None) -> Path:
        target = Path(path) if path else self.path
        if target is None:
            raise InvalidParameters("no settings path to save to")
        body = "".join(f"{k}={v}\n" for k, v in sorted(self._cache.items()))
        try:
            target.write_text(body, encoding="utf-8")
        except OSError as e:
            raise GraphIoError(f"cannot write config {target}: {e}") from e
        return target

    def store_run_config(self, cfg: RunConfig) -> None:
        """Write every RunConfig field as a flat key, replacing earlier values."""

        for key, value in cfg.as_dict().items():
            self.set("", key, value)

    def run_config(self, **overrides: Any) -> RunConfig:
        """RunConfig from the flat keys, with non-None overrides (command-line flags) on top."""

        cfg = RunConfig.from_mapping(self.flat())
        for key, value in overrides.items():
            if value is not None:
                setattr(cfg, key, value)
        return cfg.validate()
