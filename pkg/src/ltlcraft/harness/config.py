"""Run configuration: a flat ``key = value`` text file with ``#`` comments."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    agents: int = 2
    # task source: a task file path or "preset:<sequential|interleaving|constrained>"
    tasks: str = "preset:sequential"
    task_count: int = 0  # use only the first n tasks; 0 keeps all
    # map source: "random", "adversarial" or "file"
    map: str = "random"
    map_seed: int = 0
    map_file: str = ""
    width: int = 21
    height: int = 21
    candidates: int = 1000
    adversarial_task: str = ""  # task name scored by the adversarial search; default first task
    total_steps: int = 200_000
    eval_period: int = 1000
    horizon: int = 0  # 0 picks 160 when tasks mention is_night, else 300
    gamma: float = 0.9
    xi: float = 1.0
    v_init: float = 0.01
    shaping: bool = True
    ltl_rewards: bool = True
    shared_goal: bool = False
    literal_always: bool = False
    option_steps: int = 20
    eps_start: float = 1.0
    eps_floor: float = 0.05
    eps_decay: float = 0.999
    threshold: float = 0.98
    lr: float = 5e-4
    hidden: str = "64,64"
    buffer_capacity: int = 25_000
    batch_size: int = 32
    sync_period: int = 100
    output: str = "runs/run"

    def __post_init__(self):
        if self.agents < 1:
            raise ConfigError("agents must be at least 1")
        if self.map not in ("random", "adversarial", "file"):
            raise ConfigError(f"map must be random, adversarial or file, not {self.map!r}")
        if self.map == "file" and not self.map_file:
            raise ConfigError("map = file needs map_file")
        for name in ("total_steps", "eval_period", "option_steps", "batch_size",
                     "buffer_capacity", "sync_period", "candidates"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.horizon < 0 or self.task_count < 0:
            raise ConfigError("horizon and task_count must be non-negative")
        self.hidden_sizes()

    def hidden_sizes(self) -> tuple[int, ...]:
        try:
            sizes = tuple(int(h) for h in self.hidden.split(",") if h.strip())
        except ValueError as exc:
            raise ConfigError(f"bad hidden sizes {self.hidden!r}") from exc
        if not sizes or min(sizes) < 1:
            raise ConfigError(f"bad hidden sizes {self.hidden!r}")
        return sizes

    @property
    def algorithm(self) -> str:
        if not self.ltl_rewards:
            return "MHLRS-LTL"
        if not self.shaping:
            return "MHLRS-RS"
        return "MHLRS"

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _TYPES[key]
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if kind == "int":
        try:
            return int(raw.replace("_", ""))
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if kind == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    return raw


def parse_config(text: str, **overrides) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, value)
    values.update(overrides)
    return RunConfig(**values)


def format_config(config: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        v = getattr(config, f.name)
        if isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def load_config(path, **overrides) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), **overrides)
