"""Hierarchical agent: a meta-controller picks subgoal propositions, a controller reaches them.

Each agent owns two Double-DQN learners and two replay buffers:

* the controller sees ``features ⊕ one-hot(goal)`` and picks a primitive
  move; it is trained on the 0/1 intrinsic reward "goal proposition fired";
* the meta-controller sees ``features`` and scores every goal in the
  vocabulary; it is trained on shaped extrinsic returns accumulated over an
  option, with its argmax restricted to the goals on offer.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .nn import Adam, QPair, ddqn_step, q_network
from .world.grid import Action

GOALS = (
    "got_wood", "got_grass", "got_iron",
    "used_toolshed", "used_workbench", "used_factory", "at_shelter",
)
N_ACTIONS = len(Action)
CHECKPOINT_VERSION = 1


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform minibatch sampling.

    Transitions are added as named fields; all fields of one transition are
    packed into one float64 row so a minibatch is a single gather.
    """

    def __init__(self, capacity: int = 25_000, batch_size: int = 32, rng=None):
        if capacity < 1 or batch_size < 1:
            raise ValueError("capacity and batch size must be positive")
        self.capacity = capacity
        self.batch_size = batch_size
        self.rng = np.random.default_rng(rng)
        self._rows: np.ndarray | None = None
        self._layout: dict[str, tuple[int, int, tuple, np.dtype]] = {}
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def ready(self) -> bool:
        return self._size >= self.batch_size

    def add(self, **fields) -> None:
        if self._rows is None:
            o = 0
            for k, v in fields.items():
                v = np.asarray(v)
                self._layout[k] = (o, o + v.size, v.shape, v.dtype)
                o += v.size
            self._rows = np.zeros((self.capacity, o))
        elif fields.keys() != self._layout.keys():
            raise KeyError(f"expected fields {sorted(self._layout)}, got {sorted(fields)}")
        row = self._rows[self._next]
        for k, v in fields.items():
            a, b, _, _ = self._layout[k]
            row[a:b] = np.ravel(v) if b - a > 1 else v
        self._next = (self._next + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self) -> dict[str, np.ndarray] | None:
        """A batch drawn uniformly with replacement, or None below batch size."""
        if not self.ready:
            return None
        rows = self._rows[self.rng.integers(0, self._size, size=self.batch_size)]
        out = {}
        for k, (a, b, shape, dtype) in self._layout.items():
            col = rows[:, a:b].reshape((self.batch_size,) + shape)
            out[k] = col if dtype == np.float64 else col.astype(dtype)
        return out


class EpsilonSchedule:
    """Multiplicative per-episode decay from ``start`` down to ``floor``."""

    def __init__(self, start: float = 1.0, floor: float = 0.05, decay: float = 0.999, episodes: int = 0):
        if not 0.0 <= floor <= start <= 1.0:
            raise ValueError("need 0 <= floor <= start <= 1")
        if not 0.0 < decay <= 1.0:
            raise ValueError("decay must lie in (0, 1]")
        self.start, self.floor, self.decay = start, floor, decay
        self.episodes = episodes

    @property
    def value(self) -> float:
        return max(self.floor, self.start * self.decay ** self.episodes)

    def anneal(self) -> None:
        self.episodes += 1


@dataclass(frozen=True)
class AgentConfig:
    hidden: tuple[int, ...] = (64, 64)
    lr: float = 5e-4
    gamma: float = 0.9
    sync_period: int = 100
    buffer_capacity: int = 25_000
    batch_size: int = 32
    eps_start: float = 1.0
    eps_floor: float = 0.05
    eps_decay: float = 0.999


def one_hot(index: int, n: int) -> np.ndarray:
    out = np.zeros(n)
    out[index] = 1.0
    return out


def select_goal(meta: QPair, s, goals: Sequence[int], eps: float, rng) -> int:
    """Epsilon-greedy goal index among ``goals`` (indices into the meta network's outputs)."""
    goals = list(goals)
    if not goals:
        raise ValueError("no goals to choose from")
    if eps > 0 and rng.random() < eps:
        return goals[int(rng.integers(len(goals)))]
    q = meta.online.forward(s)
    return max(goals, key=lambda g: (q[g], -g))


def select_action(controller: QPair, s, goal: int, n_goals: int, eps: float, rng) -> int:
    """Epsilon-greedy primitive move for ``s`` under subgoal ``goal``."""
    if eps > 0 and rng.random() < eps:
        return int(rng.integers(controller.online.n_outputs))
    x = np.concatenate([np.asarray(s, dtype=np.float64), one_hot(goal, n_goals)])
    return int(np.argmax(controller.online.forward(x)))


def intrinsic_reward(goal: str, sigma) -> int:
    return 1 if goal in sigma else 0


class HierarchicalAgent:
    def __init__(self, n_features: int, rng=None, config: AgentConfig = AgentConfig(), goals=GOALS):
        self.goals = tuple(goals)
        self.n_features = n_features
        self.config = config
        seeds = np.random.SeedSequence(
            rng.integers(2**63) if isinstance(rng, np.random.Generator) else rng
        ).spawn(5)
        self.rng = np.random.default_rng(seeds[0])
        n_goals = len(self.goals)
        self.controller = QPair(
            q_network(n_features + n_goals, N_ACTIONS, seeds[1], config.hidden), config.sync_period
        )
        self.meta = QPair(q_network(n_features, n_goals, seeds[2], config.hidden), config.sync_period)
        self.controller_opt = Adam(len(self.controller.online.params), lr=config.lr)
        self.meta_opt = Adam(len(self.meta.online.params), lr=config.lr)
        self.d1 = ReplayBuffer(config.buffer_capacity, config.batch_size, seeds[3])
        self.d2 = ReplayBuffer(config.buffer_capacity, config.batch_size, seeds[4])
        self.eps_goal = [self._schedule() for _ in self.goals]
        self.eps_meta = self._schedule()
        self.controller_updates = 0
        self.meta_updates = 0

    def _schedule(self) -> EpsilonSchedule:
        c = self.config
        return EpsilonSchedule(c.eps_start, c.eps_floor, c.eps_decay)

    @property
    def n_goals(self) -> int:
        return len(self.goals)

    def goal_index(self, name: str) -> int:
        return self.goals.index(name)

    def goal_mask(self, names) -> np.ndarray:
        mask = np.zeros(self.n_goals, dtype=bool)
        for name in names:
            if name in self.goals:
                mask[self.goals.index(name)] = True
        return mask

    def controller_input(self, s, goal: int) -> np.ndarray:
        return np.concatenate([s, one_hot(goal, self.n_goals)])

    def choose_goal(self, s, mask, greedy: bool = False) -> int:
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            idx = np.arange(self.n_goals)
        eps = 0.0 if greedy else self.eps_meta.value
        return select_goal(self.meta, s, idx.tolist(), eps, self.rng)

    def choose_action(self, s, goal: int, greedy: bool = False) -> int:
        eps = 0.0 if greedy else self.eps_goal[goal].value
        return select_action(self.controller, s, goal, self.n_goals, eps, self.rng)

    def store_controller(self, s, goal: int, a: int, r: float, s_next, done: bool) -> None:
        self.d1.add(
            s=self.controller_input(s, goal), a=a, r=float(r),
            s2=self.controller_input(s_next, goal), done=bool(done),
        )

    def store_meta(self, s0, goal: int, ret: float, s_end, done: bool, next_mask) -> None:
        mask = np.asarray(next_mask, dtype=bool)
        if not mask.any():
            mask = np.ones(self.n_goals, dtype=bool)
        self.d2.add(s=np.asarray(s0, dtype=np.float64), a=goal, r=float(ret),
                    s2=np.asarray(s_end, dtype=np.float64), done=bool(done), mask=mask)

    def learn_controller(self) -> float | None:
        batch = self.d1.sample()
        if batch is None:
            return None
        loss = ddqn_step(
            self.controller, self.controller_opt, batch["s"], batch["a"], batch["r"],
            batch["s2"], self.config.gamma, batch["done"],
        )
        self.controller_updates += 1
        if self.controller_updates % self.controller.sync_period == 0:
            self.controller.sync()
        return loss

    def learn_meta(self) -> float | None:
        batch = self.d2.sample()
        if batch is None:
            return None
        loss = ddqn_step(
            self.meta, self.meta_opt, batch["s"], batch["a"], batch["r"],
            batch["s2"], self.config.gamma, batch["done"], batch["mask"],
        )
        self.meta_updates += 1
        if self.meta_updates % self.meta.sync_period == 0:
            self.meta.sync()
        return loss

    def anneal(self) -> None:
        self.eps_meta.anneal()
        for sched in self.eps_goal:
            sched.anneal()

    def save(self, path) -> None:
        np.savez(
            Path(path),
            version=np.array(CHECKPOINT_VERSION),
            goals=np.array(self.goals),
            controller_sizes=np.array(self.controller.online.sizes, dtype=np.int64),
            controller=self.controller.online.params,
            controller_target=self.controller.target.params,
            meta_sizes=np.array(self.meta.online.sizes, dtype=np.int64),
            meta=self.meta.online.params,
            meta_target=self.meta.target.params,
            eps_goal=np.array([s.episodes for s in self.eps_goal], dtype=np.int64),
            eps_meta=np.array(self.eps_meta.episodes),
        )

    def load(self, path) -> None:
        with np.load(Path(path)) as data:
            version = int(data["version"])
            if version != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            if tuple(data["goals"].tolist()) != self.goals:
                raise ValueError("checkpoint goal vocabulary differs")
            if tuple(data["controller_sizes"].tolist()) != self.controller.online.sizes \
                    or tuple(data["meta_sizes"].tolist()) != self.meta.online.sizes:
                raise ValueError("checkpoint network shapes differ")
            self.controller.online.params[...] = data["controller"]
            self.controller.target.params[...] = data["controller_target"]
            self.meta.online.params[...] = data["meta"]
            self.meta.target.params[...] = data["meta_target"]
            for sched, n in zip(self.eps_goal, data["eps_goal"].tolist()):
                sched.episodes = n
            self.eps_meta.episodes = int(data["eps_meta"])
