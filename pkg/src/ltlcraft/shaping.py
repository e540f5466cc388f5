"""Progression rewards, per-agent evaluation values and the cooperative shaped reward."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .ltl import Formula, Status, progress, status_of


@dataclass(frozen=True)
class ShapingConfig:
    gamma: float = 0.9
    xi: float = 1.0
    v_init: float = 0.01
    enabled: bool = True

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError("xi must lie in [0, 1]")


@dataclass(frozen=True)
class TaskProgress:
    current: Formula
    status: Status = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "status", status_of(self.current))

    @property
    def resolved(self) -> bool:
        return self.status is not Status.OPEN


class ResolvedTaskError(RuntimeError):
    pass


def base_reward(task: TaskProgress, sigma, **rules) -> tuple[float, TaskProgress]:
    """Progress the running task by one label set; +1 when it becomes true, else -1."""
    if task.resolved:
        raise ResolvedTaskError(f"task already {task.status.value}")
    nxt = TaskProgress(progress(sigma, task.current, **rules))
    return (1.0 if nxt.status is Status.SATISFIED else -1.0), nxt


@dataclass(frozen=True)
class EvaluationState:
    values: tuple[float, ...]
    xi: float = 1.0
    gamma: float = 0.9

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("need at least one agent")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("evaluation values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def initial(cls, n_agents: int, config: ShapingConfig = ShapingConfig()) -> EvaluationState:
        return cls((config.v_init,) * n_agents, config.xi, config.gamma)


def update_value(ev: EvaluationState, agent_index: int, reward: float) -> EvaluationState:
    """``V_i <- xi * (reward + gamma * V_i)`` for the acting agent only."""
    if not 0 <= agent_index < len(ev.values):
        raise IndexError(f"agent index {agent_index} out of range")
    values = list(ev.values)
    values[agent_index] = ev.xi * (reward + ev.gamma * values[agent_index])
    return replace(ev, values=tuple(values))


def shaped_reward(base: float, ev: EvaluationState, enabled: bool = True) -> float:
    """``base + V_min - gamma * V_max``; ``base`` unchanged when shaping is disabled."""
    if not enabled:
        return base
    return base + min(ev.values) - ev.gamma * max(ev.values)


def shaping_term(values: Sequence[float], gamma: float) -> float:
    return min(values) - gamma * max(values)


from .transform import (  # noqa: E402  (re-exported: task-level verification lives with shaping)
    GameError, TabularGame, TransformationReport, load_game, parse_game, random_game,
    verify_transformation,
)
