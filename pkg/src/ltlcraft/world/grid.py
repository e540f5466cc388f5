"""Deterministic multi-agent crafting grid.

Coordinates are ``(x, y)`` with ``x`` the column and ``y`` the row; ``up``
decreases ``y``. All agents move simultaneously and may share a cell.
"""
from __future__ import annotations

import enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


class ObjectKind(enum.IntEnum):
    EMPTY = 0
    WALL = 1
    WOOD = 2
    GRASS = 3
    IRON = 4
    TOOLSHED = 5
    WORKBENCH = 6
    FACTORY = 7
    SHELTER = 8


class Action(enum.IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


MOVES = {Action.UP: (0, -1), Action.DOWN: (0, 1), Action.LEFT: (-1, 0), Action.RIGHT: (1, 0)}
_DX = np.array([0, 0, -1, 1])
_DY = np.array([-1, 1, 0, 0])

RAW_MATERIALS = (ObjectKind.WOOD, ObjectKind.GRASS, ObjectKind.IRON)
TOOLS = (ObjectKind.TOOLSHED, ObjectKind.WORKBENCH, ObjectKind.FACTORY)
# order of the distance block in the feature vector
FEATURE_KINDS = RAW_MATERIALS + TOOLS + (ObjectKind.SHELTER,)

CHARS = {
    ObjectKind.WALL: "#", ObjectKind.EMPTY: ".", ObjectKind.WOOD: "w", ObjectKind.GRASS: "g",
    ObjectKind.IRON: "i", ObjectKind.TOOLSHED: "t", ObjectKind.WORKBENCH: "b",
    ObjectKind.FACTORY: "f", ObjectKind.SHELTER: "s",
}
KINDS_BY_CHAR = {c: k for k, c in CHARS.items()}

START_HOUR = 5
STEPS_PER_HOUR = 10
NIGHT_HOUR = 21


def proposition_for(kind: ObjectKind) -> str | None:
    if kind in RAW_MATERIALS:
        return f"got_{kind.name.lower()}"
    if kind in TOOLS:
        return f"used_{kind.name.lower()}"
    if kind is ObjectKind.SHELTER:
        return "at_shelter"
    return None


PROPOSITION_KIND = {proposition_for(k): k for k in FEATURE_KINDS}
ALL_PROPOSITIONS = tuple(PROPOSITION_KIND) + ("is_night",)


def hour(step_count: int) -> int:
    return START_HOUR + step_count // STEPS_PER_HOUR


class MapError(ValueError):
    pass


class GridMap:
    """Static layout: cell kinds plus agent start poses."""

    __slots__ = ("cells", "starts", "seed")

    def __init__(self, cells, starts: Sequence[tuple[int, int]], seed: int | None = None):
        cells = np.array(cells, dtype=np.int8)
        if cells.ndim != 2:
            raise MapError("cells must be a 2-D grid")
        cells.setflags(write=False)
        self.cells = cells
        self.starts = tuple((int(x), int(y)) for x, y in starts)
        self.seed = seed
        self.validate()

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def n_agents(self) -> int:
        return len(self.starts)

    def validate(self) -> None:
        c = self.cells
        border = np.concatenate([c[0], c[-1], c[:, 0], c[:, -1]])
        if (border != ObjectKind.WALL).any():
            raise MapError("border cells must be walls")
        if not self.starts:
            raise MapError("map has no agent start poses")
        for x, y in self.starts:
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise MapError(f"start pose {(x, y)} out of bounds")
            if c[y, x] == ObjectKind.WALL:
                raise MapError(f"start pose {(x, y)} is on a wall")

    def count(self, kind: ObjectKind) -> int:
        return int((self.cells == kind).sum())

    def positions(self, kind: ObjectKind) -> list[tuple[int, int]]:
        ys, xs = np.nonzero(self.cells == kind)
        return list(zip(xs.tolist(), ys.tolist()))

    def check_supports(self, propositions) -> None:
        """Raise ``MapError`` unless every proposition has an object to trigger it."""
        missing = sorted(
            p for p in propositions
            if p in PROPOSITION_KIND and self.count(PROPOSITION_KIND[p]) == 0
        )
        unknown = sorted(p for p in propositions if p not in ALL_PROPOSITIONS)
        if unknown:
            raise MapError(f"propositions not produced by this world: {unknown}")
        if missing:
            raise MapError(f"map lacks objects for propositions {missing}")

    def __eq__(self, other):
        if not isinstance(other, GridMap):
            return NotImplemented
        return self.starts == other.starts and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.cells.tobytes(), self.cells.shape, self.starts))

    def __repr__(self):
        return f"GridMap({self.width}x{self.height}, agents={self.n_agents}, seed={self.seed})"

    def to_text(self) -> str:
        rows = [[CHARS[ObjectKind(v)] for v in row] for row in self.cells]
        for i, (x, y) in enumerate(self.starts):
            rows[y][x] = str(i + 1)
        return "\n".join("".join(r) for r in rows) + "\n"

    @classmethod
    def from_text(cls, text: str, seed: int | None = None) -> GridMap:
        lines = [ln.rstrip("\r") for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise MapError("empty map")
        width = len(lines[0])
        if any(len(ln) != width for ln in lines):
            raise MapError("map rows have different lengths")
        cells = np.zeros((len(lines), width), dtype=np.int8)
        starts: dict[int, tuple[int, int]] = {}
        for y, ln in enumerate(lines):
            for x, ch in enumerate(ln):
                if ch in "123456789":
                    if int(ch) in starts:
                        raise MapError(f"agent {ch} placed twice")
                    starts[int(ch)] = (x, y)
                    cells[y, x] = ObjectKind.EMPTY
                elif ch in KINDS_BY_CHAR:
                    cells[y, x] = KINDS_BY_CHAR[ch]
                else:
                    raise MapError(f"unknown map character {ch!r} at row {y}, column {x}")
        if sorted(starts) != list(range(1, len(starts) + 1)):
            raise MapError("agent start digits must be 1..N without gaps")
        return cls(cells, [starts[i] for i in sorted(starts)], seed)


def load_map(path) -> GridMap:
    return GridMap.from_text(Path(path).read_text(encoding="utf-8"))


def save_map(grid: GridMap, path) -> None:
    Path(path).write_text(grid.to_text(), encoding="utf-8")


DEFAULT_COUNTS: Mapping[ObjectKind, int] = {
    ObjectKind.WOOD: 2, ObjectKind.GRASS: 2, ObjectKind.IRON: 2, ObjectKind.TOOLSHED: 1,
    ObjectKind.WORKBENCH: 1, ObjectKind.FACTORY: 1, ObjectKind.SHELTER: 1,
}


def random_map(
    seed: int,
    width: int = 21,
    height: int = 21,
    counts: Mapping[ObjectKind, int] | None = None,
    n_agents: int = 2,
) -> GridMap:
    """Walled map with objects and agent starts placed uniformly without overlap."""
    counts = dict(DEFAULT_COUNTS if counts is None else counts)
    for kind in counts:
        if kind in (ObjectKind.WALL, ObjectKind.EMPTY):
            raise MapError(f"cannot place {kind.name} as an object")
    if width < 3 or height < 3:
        raise MapError("map must be at least 3x3")
    interior = (width - 2) * (height - 2)
    n_objects = sum(counts.values())
    if n_objects + n_agents > interior:
        raise MapError(
            f"{n_objects} objects and {n_agents} agents do not fit in {interior} interior cells"
        )
    rng = np.random.default_rng(seed)
    cells = np.full((height, width), ObjectKind.EMPTY, dtype=np.int8)
    cells[0, :] = cells[-1, :] = cells[:, 0] = cells[:, -1] = ObjectKind.WALL
    slots = rng.permutation(interior)[: n_objects + n_agents]
    coords = [(1 + s % (width - 2), 1 + s // (width - 2)) for s in slots.tolist()]
    i = 0
    for kind in sorted(counts):
        for _ in range(counts[kind]):
            x, y = coords[i]
            cells[y, x] = kind
            i += 1
    return GridMap(cells, coords[i:], seed)


def _distance_field(cells: np.ndarray, kind: int, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Manhattan distance from every cell to the nearest ``kind`` cell; -1 if none."""
    h, w = cells.shape
    py, px = np.nonzero(cells == kind)
    if len(py) == 0:
        return np.full((h, w), -1.0)
    d = np.abs(ys[..., None] - py) + np.abs(xs[..., None] - px)
    return d.min(axis=-1).astype(float)


class WorldState:
    """Immutable snapshot of an episode: current cells, agent poses, clock."""

    __slots__ = ("map", "cells", "agents", "step_count", "_fields")

    def __init__(self, grid: GridMap, cells: np.ndarray, agents, step_count: int, fields=None):
        self.map = grid
        self.cells = cells
        self.agents = tuple(agents)
        self.step_count = step_count
        self._fields = fields

    @classmethod
    def initial(cls, grid: GridMap) -> WorldState:
        return cls(grid, grid.cells, grid.starts, 0)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def hour(self) -> int:
        return hour(self.step_count)

    @property
    def fields(self) -> np.ndarray:
        if self._fields is None:
            h, w = self.cells.shape
            ys, xs = np.mgrid[0:h, 0:w]
            self._fields = np.stack(
                [_distance_field(self.cells, k, ys, xs) for k in FEATURE_KINDS]
            )
            self._fields.setflags(write=False)
        return self._fields

    def kind_at(self, x: int, y: int) -> ObjectKind:
        return ObjectKind(int(self.cells[y, x]))

    def __eq__(self, other):
        if not isinstance(other, WorldState):
            return NotImplemented
        return (
            self.agents == other.agents
            and self.step_count == other.step_count
            and np.array_equal(self.cells, other.cells)
        )

    def __repr__(self):
        return f"WorldState(step={self.step_count}, agents={self.agents})"


def step(state: WorldState, actions: Sequence[int]) -> tuple[WorldState, frozenset[str]]:
    """Advance one joint step; return the successor state and the emitted label set."""
    if len(actions) != state.n_agents:
        raise ValueError(f"expected {state.n_agents} actions, got {len(actions)}")
    cells = state.cells
    h, w = cells.shape
    agents = []
    for (x, y), a in zip(state.agents, actions):
        a = int(a)
        if not 0 <= a < 4:
            raise ValueError(f"invalid action {a}")
        nx, ny = x + int(_DX[a]), y + int(_DY[a])
        if 0 <= nx < w and 0 <= ny < h and cells[ny, nx] != ObjectKind.WALL:
            x, y = nx, ny
        agents.append((x, y))

    labels = set()
    consumed = []
    on_shelter = True
    for x, y in agents:
        k = int(cells[y, x])
        if k == ObjectKind.WOOD or k == ObjectKind.GRASS or k == ObjectKind.IRON:
            labels.add(proposition_for(ObjectKind(k)))
            consumed.append((x, y))
        elif k == ObjectKind.TOOLSHED or k == ObjectKind.WORKBENCH or k == ObjectKind.FACTORY:
            labels.add(proposition_for(ObjectKind(k)))
        if k != ObjectKind.SHELTER:
            on_shelter = False
    if on_shelter:
        labels.add("at_shelter")
    count = state.step_count + 1
    if hour(count) >= NIGHT_HOUR:
        labels.add("is_night")

    fields = state._fields
    if consumed:
        cells = cells.copy()
        for x, y in consumed:
            cells[y, x] = ObjectKind.EMPTY
        cells.setflags(write=False)
        fields = None
    return WorldState(state.map, cells, agents, count, fields), frozenset(labels)


def features(state: WorldState, agent_index: int) -> np.ndarray:
    """Feature vector for one agent.

    Layout (length ``7 + 2 * (N - 1) + 1``):

    * ``[0:7]`` Manhattan distance from the agent to the nearest wood, grass,
      iron, toolshed, workbench, factory and shelter, in that order; ``-1``
      when none is left on the map;
    * then ``(dx, dy)`` offsets to every other agent, in agent order;
    * last, the clock hour scaled so 5:00 is 0 and 21:00 (or later) is 1.
    """
    x, y = state.agents[agent_index]
    out = np.empty(len(FEATURE_KINDS) + 2 * (state.n_agents - 1) + 1)
    out[: len(FEATURE_KINDS)] = state.fields[:, y, x]
    j = len(FEATURE_KINDS)
    for k, (ox, oy) in enumerate(state.agents):
        if k != agent_index:
            out[j] = ox - x
            out[j + 1] = oy - y
            j += 2
    out[j] = min(max((state.hour - START_HOUR) / (NIGHT_HOUR - START_HOUR), 0.0), 1.0)
    return out


def feature_size(n_agents: int) -> int:
    return len(FEATURE_KINDS) + 2 * (n_agents - 1) + 1
