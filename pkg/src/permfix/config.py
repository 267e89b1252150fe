"""Run configuration shared by the library defaults and the CLI."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from permfix.errors import DomainError

ENUMERATION_CAP = 50
TUPLE_BUDGET = 10**7
TUPLE_BUDGET_CEILING = 10**8
POINT_CAP = 10**7
LSET_STAR_CAP = 12
BRUTE_FORCE_CAP = 9
DEFAULT_TRIALS = 10**5
DEFAULT_SEED = 20170915
SEED_ENV = "PERMFIX_SEED"
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    enumeration_cap: int = ENUMERATION_CAP
    tuple_budget: int = TUPLE_BUDGET
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    output_format: str = "csv"
    threads: int = 1

    def __post_init__(self):
        for name in ("enumeration_cap", "tuple_budget", "trials", "threads"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in 64 bits")
        if self.output_format not in FORMATS:
            raise DomainError(f"output_format must be one of {FORMATS}")

    def updated(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def parse_config_file(path: str | Path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
        value = value.strip("\"'")
        out[key] = value if key == "output_format" else int(value)
    return out


def load_config(path: str | Path | None = None, **overrides) -> RunConfig:
    """Defaults, then the config file, then the seed env var, then overrides."""
    values: dict = {}
    if path is not None:
        values.update(parse_config_file(path))
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        values["seed"] = int(env_seed)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
