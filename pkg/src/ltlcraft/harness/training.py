"""Training driver, greedy evaluation and run-directory persistence."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..agent import GOALS, AgentConfig, HierarchicalAgent, intrinsic_reward
from ..curriculum import Curriculum
from ..ltl import Formula, Op, Task, goal_propositions, load_tasks, save_tasks
from ..shaping import (
    EvaluationState, ShapingConfig, TaskProgress, base_reward, shaped_reward, update_value,
)
from ..world import (
    GridMap, MapError, WorldState, adversarial_select, feature_size, features, load_map,
    random_map, save_map, step,
)
from .config import ConfigError, RunConfig, format_config, load_config
from .presets import make_experiment

METRICS_HEADER = ("step", "task", "outcome", "total", "seed")
CONSTRAINED_HORIZON = 160
DEFAULT_HORIZON = 300


class DataError(ValueError):
    """Bad task, map or run data (as opposed to bad usage)."""


@dataclass
class EvalRecord:
    step: int
    outcomes: dict[str, int]
    wall_clock: float = 0.0

    @property
    def total(self) -> int:
        return sum(self.outcomes.values())


@dataclass
class TrainResult:
    config: RunConfig
    grid: GridMap
    tasks: list[Task]
    agents: list[HierarchicalAgent]
    curriculum: Curriculum
    records: list[EvalRecord] = field(default_factory=list)
    rewards: list[tuple[float, float]] = field(default_factory=list)  # (base, shaped) per joint step
    episodes: int = 0
    run_dir: Path | None = None

    def metrics_csv(self) -> str:
        return metrics_csv(self.records, self.config.seed)


def resolve_tasks(config: RunConfig) -> list[Task]:
    src = config.tasks
    try:
        tasks = make_experiment(src[7:]) if src.startswith("preset:") else load_tasks(src)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot load tasks from {src!r}: {exc}") from exc
    if config.task_count:
        tasks = tasks[: config.task_count]
    return tasks


def build_map(config: RunConfig, tasks: Sequence[Task]) -> GridMap:
    props = set().union(*(goal_propositions(t.formula) for t in tasks))
    try:
        if config.map == "file":
            grid = load_map(config.map_file)
        elif config.map == "adversarial":
            task = tasks[0]
            if config.adversarial_task:
                named = [t for t in tasks if t.name == config.adversarial_task]
                if not named:
                    raise DataError(f"no task named {config.adversarial_task!r}")
                task = named[0]
            seeds = range(config.map_seed, config.map_seed + config.candidates)
            grid, _ = adversarial_select(
                seeds, task.formula, config.width, config.height, n_agents=config.agents
            )
        else:
            grid = random_map(config.map_seed, config.width, config.height, n_agents=config.agents)
        grid.check_supports(props)
    except (OSError, MapError) as exc:
        raise DataError(str(exc)) from exc
    if grid.n_agents != config.agents:
        raise DataError(f"map has {grid.n_agents} agents, config asks for {config.agents}")
    return grid


def episode_horizon(config: RunConfig, tasks: Sequence[Task]) -> int:
    if config.horizon:
        return config.horizon
    clocked = any("is_night" in t.formula.propositions() for t in tasks)
    return CONSTRAINED_HORIZON if clocked else DEFAULT_HORIZON


def final_event(phi: Formula) -> str:
    """Last goal proposition in reading order: the event that completes a crafting task."""
    props: list[str] = []

    def visit(f: Formula, positive: bool):
        if f.op is Op.PROP:
            if positive:
                props.append(f.name)
        for a in f.args:
            visit(a, positive != (f.op is Op.NOT))

    visit(phi, True)
    if not props:
        raise DataError(f"task has no goal propositions: {phi}")
    return props[-1]


class Episode:
    """One episode of the joint loop, for training (``learn``) or greedy evaluation.

    With ``ltl`` on, the extrinsic reward comes from progressing the task
    formula and goals are the positive propositions of the current residual.
    With it off, a fixed checker pays +1 when the task's final event fires and
    -1 otherwise, and goals range over the whole vocabulary; the formula is
    still progressed on the side so success is scored the same way.
    """

    def __init__(self, agents, grid, task: Formula, config: RunConfig, horizon: int,
                 learn: bool, on_step: Callable | None = None, max_steps: int | None = None):
        self.agents = agents
        self.grid = grid
        self.config = config
        self.horizon = horizon
        self.learn = learn
        self.on_step = on_step
        self.max_steps = horizon if max_steps is None else min(horizon, max_steps)
        self.rules = {"literal_always": config.literal_always}
        self.progress = TaskProgress(task)
        self.final = None if config.ltl_rewards else final_event(task)
        self.shaping = ShapingConfig(config.gamma, config.xi, config.v_init, config.shaping)

    def goal_mask(self, agent: HierarchicalAgent, phi: Formula) -> np.ndarray:
        if self.final is not None:
            return np.ones(agent.n_goals, dtype=bool)
        return agent.goal_mask(goal_propositions(phi))

    def pick_goals(self, who: Sequence[int], feats, goals, phi) -> None:
        greedy = not self.learn
        if self.config.shared_goal:
            lead = self.agents[0]
            g = lead.choose_goal(feats[0], self.goal_mask(lead, phi), greedy)
            for i in who:
                goals[i] = g
            return
        for i in who:
            ag = self.agents[i]
            goals[i] = ag.choose_goal(feats[i], self.goal_mask(ag, phi), greedy)

    def run(self) -> tuple[bool, int]:
        """Play until the task resolves or the step budget ends; return (success, steps)."""
        agents, n = self.agents, len(self.agents)
        greedy = not self.learn
        state = WorldState.initial(self.grid)
        ev = EvaluationState.initial(n, self.shaping)
        feats = [features(state, i) for i in range(n)]
        goals = [0] * n
        self.pick_goals(range(n), feats, goals, self.progress.current)
        start = [f for f in feats]
        ret = [0.0] * n
        length = [0] * n
        done_final = False
        t = 0
        while True:
            actions = [agents[i].choose_action(feats[i], goals[i], greedy) for i in range(n)]
            state, sigma = step(state, actions)
            t += 1
            base, self.progress = base_reward(self.progress, sigma, **self.rules)
            if self.final is not None:
                done_final = self.final in sigma
                base = 1.0 if done_final else -1.0
            ended_task = self.progress.resolved if self.final is None else done_final
            over = ended_task or self.progress.resolved or t >= self.max_steps
            new_feats = [features(state, i) for i in range(n)]
            hit = [intrinsic_reward(agents[i].goals[goals[i]], sigma) for i in range(n)]
            for i, ag in enumerate(agents):
                ev = update_value(ev, i, base)
                if self.learn:
                    ag.store_controller(feats[i], goals[i], actions[i], hit[i], new_feats[i], hit[i] == 1)
                    ag.learn_controller()
                    ag.learn_meta()
            f = shaped_reward(base, ev, self.shaping.enabled)
            ending = []
            for i, ag in enumerate(agents):
                ret[i] += f
                length[i] += 1
                if hit[i] or length[i] >= self.config.option_steps or over:
                    if self.learn:
                        mask = self.goal_mask(ag, self.progress.current)
                        ag.store_meta(start[i], goals[i], ret[i], new_feats[i], ended_task, mask)
                    start[i], ret[i], length[i] = new_feats[i], 0.0, 0
                    ending.append(i)
            if self.on_step is not None:
                self.on_step(base, f)
            feats = new_feats
            if over:
                break
            if ending:
                self.pick_goals(ending, feats, goals, self.progress.current)
        return self.progress.current.op is Op.TRUE, t


def make_agents(config: RunConfig, rng: np.random.Generator) -> list[HierarchicalAgent]:
    acfg = AgentConfig(
        hidden=config.hidden_sizes(), lr=config.lr, gamma=config.gamma,
        sync_period=config.sync_period, buffer_capacity=config.buffer_capacity,
        batch_size=config.batch_size, eps_start=config.eps_start,
        eps_floor=config.eps_floor, eps_decay=config.eps_decay,
    )
    n_feat = feature_size(config.agents)
    return [HierarchicalAgent(n_feat, rng, acfg, GOALS) for _ in range(config.agents)]


def evaluate(agents, tasks: Sequence[Task], grid: GridMap, config: RunConfig,
             horizon: int | None = None, step_count: int = 0) -> EvalRecord:
    """Run every task greedily from the start state; +1 per completed task, -1 otherwise."""
    horizon = horizon or episode_horizon(config, tasks)
    t0 = time.perf_counter()
    outcomes = {}
    for task in tasks:
        ok, _ = Episode(agents, grid, task.formula, config, horizon, learn=False).run()
        outcomes[task.name] = 1 if ok else -1
    return EvalRecord(step_count, outcomes, time.perf_counter() - t0)


def train(config: RunConfig, run_dir=None, record_rewards: bool = False,
          progress: Callable[[EvalRecord], None] | None = None) -> TrainResult:
    """Curriculum-driven training of all agents for ``config.total_steps`` joint steps."""
    tasks = resolve_tasks(config)
    grid = build_map(config, tasks)
    horizon = episode_horizon(config, tasks)
    rng = np.random.default_rng(config.seed)
    agents = make_agents(config, rng)
    curriculum = Curriculum([(t.name, t.formula) for t in tasks], config.threshold)
    result = TrainResult(config, grid, tasks, agents, curriculum)
    steps = [0]

    def on_step(base, shaped):
        steps[0] += 1
        if record_rewards:
            result.rewards.append((base, shaped))
        if steps[0] % config.eval_period == 0:
            rec = evaluate(agents, tasks, grid, config, horizon, steps[0])
            result.records.append(rec)
            if progress is not None:
                progress(rec)

    while steps[0] < config.total_steps:
        index, phi = curriculum.next_task()
        ep = Episode(agents, grid, phi, config, horizon, learn=True, on_step=on_step,
                     max_steps=config.total_steps - steps[0])
        ok, _ = ep.run()
        curriculum.record_outcome(index, ok)
        result.episodes += 1
        for ag in agents:
            ag.anneal()

    if run_dir is not None:
        result.run_dir = write_run(result, run_dir)
    return result


def metrics_csv(records: Sequence[EvalRecord], seed: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for rec in records:
        for name, outcome in rec.outcomes.items():
            w.writerow((rec.step, name, outcome, rec.total, seed))
    return buf.getvalue()


def write_run(result: TrainResult, run_dir) -> Path:
    out = Path(run_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(format_config(result.config), encoding="utf-8")
    save_tasks(result.tasks, out / "tasks.txt")
    save_map(result.grid, out / "map.txt")
    (out / "metrics.csv").write_text(result.metrics_csv(), encoding="utf-8")
    with open(out / "timing.csv", "w", encoding="utf-8") as fh:
        fh.write("step,eval_seconds\n")
        for rec in result.records:
            fh.write(f"{rec.step},{rec.wall_clock:.6f}\n")
    for i, ag in enumerate(result.agents):
        ag.save(out / f"agent{i}.npz")
    return out


def evaluate_run(run_dir) -> EvalRecord:
    """Reload a run directory's agents and score them on its tasks and map."""
    run_dir = Path(run_dir)
    try:
        config = load_config(run_dir / "config.txt")
        tasks = load_tasks(run_dir / "tasks.txt")
        grid = load_map(run_dir / "map.txt")
    except (OSError, ConfigError, ValueError) as exc:
        raise DataError(f"cannot read run directory {run_dir}: {exc}") from exc
    agents = make_agents(config, np.random.default_rng(config.seed))
    for i, ag in enumerate(agents):
        try:
            ag.load(run_dir / f"agent{i}.npz")
        except (OSError, ValueError, KeyError) as exc:
            raise DataError(f"cannot load agent {i}: {exc}") from exc
    return evaluate(agents, tasks, grid, config)
