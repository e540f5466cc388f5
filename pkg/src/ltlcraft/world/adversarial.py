"""Greedy-vs-optimal solution cost on a map, and adversarial map selection.

Both costs are measured in the same subgoal-level model of the world:

* every agent executes a list of target cells (*visits*), walking shortest
  paths between them and departing as soon as it arrives; after its last
  visit it stays put for good;
* at each joint step ``t`` the label set is produced by the cells agents
  occupy at ``t`` (arriving or parked), with the world's usual rules: raw
  materials are consumed on first occupancy, tools fire on every occupied
  step, ``at_shelter`` needs every agent on a shelter, ``is_night`` follows
  the clock. Agents in transit trigger nothing;
* the task formula is progressed once per joint step; the cost of a plan is
  the first step at which it becomes ``true``.

Targets are cells whose proposition occurs positively in the task, and each
agent makes at most as many visits as the task has goal propositions. The
greedy plan has every agent head for the nearest cell whose proposition
would advance the current formula. The optimal cost is found by exhaustive
branch-and-bound over all joint plans, seeded with the greedy cost.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..ltl import FALSE, TRUE, Formula, goal_propositions, progress
from .grid import (
    NIGHT_HOUR, PROPOSITION_KIND, RAW_MATERIALS, TOOLS, GridMap, MapError, ObjectKind, hour,
    proposition_for, random_map,
)

DEFAULT_HORIZON = 300


def bfs_distances(cells: np.ndarray, source: tuple[int, int]) -> np.ndarray:
    """Shortest 4-connected path lengths from ``source`` avoiding walls (inf if cut off)."""
    h, w = cells.shape
    dist = np.full((h, w), np.inf)
    sx, sy = source
    dist[sy, sx] = 0
    queue = deque([(sx, sy)])
    while queue:
        x, y = queue.popleft()
        d = dist[y, x] + 1
        for nx, ny in ((x, y - 1), (x, y + 1), (x - 1, y), (x + 1, y)):
            if 0 <= nx < w and 0 <= ny < h and cells[ny, nx] != ObjectKind.WALL and dist[ny, nx] > d:
                dist[ny, nx] = d
                queue.append((nx, ny))
    return dist


@lru_cache(maxsize=4096)
def advancing_propositions(phi: Formula) -> frozenset[str]:
    """Goal propositions whose occurrence alone would change the progressed formula."""
    idle = progress(frozenset(), phi)
    return frozenset(
        p for p in goal_propositions(phi) if progress(frozenset({p}), phi) != idle
    )


@dataclass
class _Problem:
    grid: GridMap
    task: Formula
    targets: list[tuple[int, int]]  # candidate cells
    kinds: dict[tuple[int, int], ObjectKind]
    dist: dict[tuple[int, int], np.ndarray]  # BFS field from each start/target
    max_visits: int
    horizon: int
    clocked: bool  # task mentions is_night, so parked labels can still change

    @classmethod
    def build(cls, grid: GridMap, task: Formula, horizon: int) -> _Problem:
        goals = goal_propositions(task)
        kinds_wanted = {PROPOSITION_KIND[p] for p in goals if p in PROPOSITION_KIND}
        targets = [
            pos for kind in sorted(kinds_wanted) for pos in grid.positions(kind)
        ]
        targets.sort(key=lambda c: (c[1], c[0]))
        kinds = {c: ObjectKind(int(grid.cells[c[1], c[0]])) for c in targets}
        sources = set(targets) | set(grid.starts)
        dist = {s: bfs_distances(grid.cells, s) for s in sources}
        return cls(
            grid, task, targets, kinds, dist, max(len(goals), 1), horizon,
            "is_night" in task.propositions(),
        )

    def d(self, a, b) -> float:
        return self.dist[a][b[1], b[0]]


def _labels(problem: _Problem, occupied: Sequence, consumed: frozenset, t: int):
    """Label set at step ``t`` given the cell occupied by each agent (None in transit)."""
    labels = set()
    newly = set()
    shelter = True
    for cell in occupied:
        kind = problem.kinds.get(cell) if cell is not None else None
        if kind is None:
            kind = (
                ObjectKind(int(problem.grid.cells[cell[1], cell[0]]))
                if cell is not None else ObjectKind.EMPTY
            )
        if kind in RAW_MATERIALS:
            if cell not in consumed:
                labels.add(proposition_for(kind))
                newly.add(cell)
        elif kind in TOOLS:
            labels.add(proposition_for(kind))
        if kind is not ObjectKind.SHELTER:
            shelter = False
    if shelter:
        labels.add("at_shelter")
    if hour(t) >= NIGHT_HOUR:
        labels.add("is_night")
    return frozenset(labels), consumed | newly if newly else consumed


class _Agent:
    """Mutable per-agent bookkeeping for one search branch (copied on branch)."""

    __slots__ = ("pos", "target", "arrive", "visits")

    def __init__(self, pos, target=None, arrive=None, visits=0):
        self.pos = pos
        self.target = target
        self.arrive = arrive
        self.visits = visits

    def copy(self):
        return _Agent(self.pos, self.target, self.arrive, self.visits)


def _advance(problem, agents, phi, consumed, t, t_end, best):
    """Progress ``phi`` over steps t+1..t_end; return (phi, consumed, t, done_at)."""
    while t < t_end:
        t += 1
        if t >= best:
            return phi, consumed, t, None
        occupied = []
        for ag in agents:
            if ag.target is None:
                occupied.append(ag.pos)
            elif ag.arrive == t:
                occupied.append(ag.target)
            else:
                occupied.append(None)
        sigma, consumed = _labels(problem, occupied, consumed, t)
        phi = progress(sigma, phi)
        if phi == TRUE:
            return phi, consumed, t, t
        if phi == FALSE:
            return phi, consumed, t, None
    return phi, consumed, t, None


def _run_until_event(problem, agents, phi, consumed, t, best):
    """Simulate to the next arrival (or until parked agents stop changing phi)."""
    moving = [ag.arrive for ag in agents if ag.target is not None]
    if moving:
        t_next = min(moving)
        phi, consumed, t2, done = _advance(problem, agents, phi, consumed, t, t_next, best)
        return phi, consumed, t2, done
    # everyone parked: labels repeat (up to the clock), so stop at a fixed point
    limit = min(best - 1, problem.horizon)
    while t < limit:
        prev = phi
        phi, consumed, t, done = _advance(problem, agents, phi, consumed, t, t + 1, best)
        if done is not None or phi == FALSE:
            return phi, consumed, t, done
        if phi == prev and (not problem.clocked or hour(t) >= NIGHT_HOUR):
            return phi, consumed, t, None
    return phi, consumed, t, None


def _land(agents, t):
    """Agents arriving at ``t`` reach their target and become free to choose."""
    free = []
    for i, ag in enumerate(agents):
        if ag.target is not None and ag.arrive == t:
            ag.pos, ag.target, ag.arrive = ag.target, None, None
            free.append(i)
    return free


def greedy_cost(grid: GridMap, task: Formula, horizon: int = DEFAULT_HORIZON) -> float:
    """Cost when every free agent heads for its nearest advancing target cell."""
    problem = _Problem.build(grid, task, horizon)
    return _greedy(problem)[0]


def _greedy(problem: _Problem):
    agents = [_Agent(s) for s in problem.grid.starts]
    plans: list[list] = [[] for _ in agents]
    phi, consumed, t = problem.task, frozenset(), 0
    free = list(range(len(agents)))
    while t < problem.horizon:
        wanted = advancing_propositions(phi)
        for i in free:
            ag = agents[i]
            if ag.visits >= problem.max_visits:
                continue
            best_cell, best_key = None, None
            for cell in problem.targets:
                if cell == ag.pos or proposition_for(problem.kinds[cell]) not in wanted:
                    continue
                if problem.kinds[cell] in RAW_MATERIALS and cell in consumed:
                    continue
                d = problem.d(ag.pos, cell)
                if math.isinf(d):
                    continue
                key = (d, cell[1], cell[0])
                if best_key is None or key < best_key:
                    best_cell, best_key = cell, key
            if best_cell is not None:
                ag.target, ag.arrive = best_cell, t + int(best_key[0])
                ag.visits += 1
                plans[i].append(best_cell)
        phi, consumed, t, done = _run_until_event(
            problem, agents, phi, consumed, t, problem.horizon + 1
        )
        if done is not None:
            return float(done), plans
        if phi == FALSE or all(ag.target is None for ag in agents):
            return math.inf, plans
        free = _land(agents, t)
    return math.inf, plans


def optimal_cost(grid: GridMap, task: Formula, horizon: int = DEFAULT_HORIZON) -> float:
    """Minimum cost over every joint visit plan (exhaustive branch-and-bound)."""
    problem = _Problem.build(grid, task, horizon)
    return _optimal(problem, _greedy(problem)[0])


def _optimal(problem: _Problem, upper: float) -> float:
    best = [min(upper, problem.horizon + 1)]
    seen: set = set()

    def key(agents, phi, consumed, t):
        return (t, phi, consumed, tuple((a.pos, a.target, a.arrive, a.visits) for a in agents))

    def expand(agents, free, phi, consumed, t, idx):
        # assign choices to the free agents one at a time
        if idx == len(free):
            k = key(agents, phi, consumed, t)
            if k in seen:
                return
            seen.add(k)
            phi2, consumed2, t2, done = _run_until_event(
                problem, agents, phi, consumed, t, best[0]
            )
            if done is not None:
                best[0] = min(best[0], done)
                return
            if phi2 == FALSE or t2 >= best[0] or all(a.target is None for a in agents):
                return
            nxt = [a.copy() for a in agents]
            free2 = _land(nxt, t2)
            expand(nxt, free2, phi2, consumed2, t2, 0)
            return
        i = free[idx]
        ag = agents[i]
        # option 1: park here for good
        expand(agents, free, phi, consumed, t, idx + 1)
        if ag.visits >= problem.max_visits:
            return
        for cell in problem.targets:
            if cell == ag.pos:
                continue
            d = problem.d(ag.pos, cell)
            if math.isinf(d) or t + d >= best[0]:
                continue
            branch = [a.copy() for a in agents]
            b = branch[i]
            b.target, b.arrive, b.visits = cell, t + int(d), b.visits + 1
            expand(branch, free, phi, consumed, t, idx + 1)

    start = [_Agent(s) for s in problem.grid.starts]
    expand(start, list(range(len(start))), problem.task, frozenset(), 0, 0)
    return float(best[0]) if best[0] <= problem.horizon else math.inf


@dataclass(frozen=True)
class Candidate:
    seed: int
    greedy: float
    optimal: float

    @property
    def ratio(self) -> float:
        if math.isinf(self.optimal):
            return math.nan
        if math.isinf(self.greedy):
            return math.inf
        return self.greedy / self.optimal


def score_map(grid: GridMap, task: Formula, horizon: int = DEFAULT_HORIZON) -> Candidate:
    problem = _Problem.build(grid, task, horizon)
    g, _ = _greedy(problem)
    return Candidate(grid.seed, g, _optimal(problem, g))


def adversarial_select(
    seeds: Sequence[int],
    task: Formula,
    width: int = 21,
    height: int = 21,
    counts=None,
    n_agents: int = 2,
    horizon: int = DEFAULT_HORIZON,
) -> tuple[GridMap, list[Candidate]]:
    """Among maps generated from ``seeds``, return the one with the largest greedy/optimal ratio.

    Ties go to the lowest seed. Maps on which the task cannot be completed are
    skipped; if that leaves nothing, ``MapError`` is raised.
    """
    scored: list[Candidate] = []
    maps = {}
    for seed in seeds:
        grid = random_map(seed, width, height, counts, n_agents)
        grid.check_supports(goal_propositions(task))
        maps[seed] = grid
        scored.append(score_map(grid, task, horizon))
    feasible = [c for c in scored if not math.isnan(c.ratio)]
    if not feasible:
        raise MapError("task is unachievable on every candidate map")
    chosen = min(feasible, key=lambda c: (-c.ratio, c.seed))
    return maps[chosen.seed], scored
