"""Standalone brute-force recomputation of greedy/optimal plan costs.

Enumerates every joint visit plan explicitly (per-agent target sequences,
no immediate repeats, at most |goal propositions| visits each) and simulates
each one step by step. Shortest paths come from networkx rather than the
package's BFS. Run as a script to print the selection for seeds 0..19.
"""
import itertools
import math
import sys

import networkx as nx

from ltlcraft.ltl import FALSE, TRUE, goal_propositions, parse, progress
from ltlcraft.world import random_map

RAW = {"w": "got_wood", "g": "got_grass", "i": "got_iron"}
TOOL = {"t": "used_toolshed", "b": "used_workbench", "f": "used_factory"}
PROP_CHAR = {**{v: k for k, v in RAW.items()}, **{v: k for k, v in TOOL.items()}, "at_shelter": "s"}


def _graph(rows):
    g = nx.Graph()
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == "#":
                continue
            g.add_node((x, y))
            for nx_, ny_ in ((x + 1, y), (x, y + 1)):
                if rows[ny_][nx_] != "#":
                    g.add_edge((x, y), (nx_, ny_))
    return g


def _char(rows, cell):
    ch = rows[cell[1]][cell[0]]
    return "." if ch.isdigit() else ch


def timeline(start, plan, dist, until):
    """Cell occupied by one agent at steps 1..until (None while in transit)."""
    occ, t, pos = [], 0, start
    arrivals = {}
    for cell in plan:
        t += dist[pos][cell]
        arrivals[t] = cell
        pos = cell
    for step in range(1, until + 1):
        if step >= t:
            occ.append(pos)
        else:
            occ.append(arrivals.get(step))
    return tuple(occ)


def labels_at(rows, occupied, consumed, t):
    labels, grabbed = set(), set()
    for cell in occupied:
        if cell is None:
            continue
        ch = _char(rows, cell)
        if ch in RAW and cell not in consumed:
            labels.add(RAW[ch])
            grabbed.add(cell)
        if ch in TOOL:
            labels.add(TOOL[ch])
    if all(c is not None and _char(rows, c) == "s" for c in occupied):
        labels.add("at_shelter")
    if 5 + t // 10 >= 21:
        labels.add("is_night")
    return frozenset(labels), grabbed


def simulate(rows, task, timelines):
    """First step (1-based) at which the task becomes true; inf if never."""
    phi, consumed = task, set()
    for t, occupied in enumerate(zip(*timelines), start=1):
        labels, grabbed = labels_at(rows, occupied, consumed, t)
        consumed |= grabbed
        phi = progress(labels, phi)
        if phi == TRUE:
            return t
        if phi == FALSE:
            return math.inf
    return math.inf


def sequences(cells, start, k):
    out = [()]
    frontier = [()]
    for _ in range(k):
        nxt = []
        for seq in frontier:
            last = seq[-1] if seq else start
            nxt += [seq + (c,) for c in cells if c != last]
        out += nxt
        frontier = nxt
    return out


def costs(grid, task, horizon=300):
    rows = grid.to_text().splitlines()
    starts = list(grid.starts)
    goals = goal_propositions(task)
    chars = {PROP_CHAR[p] for p in goals if p in PROP_CHAR}
    cells = sorted(
        ((x, y) for y, row in enumerate(rows) for x, ch in enumerate(row) if ch in chars),
        key=lambda c: (c[1], c[0]),
    )
    g = _graph(rows)
    dist = {s: nx.single_source_shortest_path_length(g, s) for s in set(cells) | set(starts)}
    k = max(len(goals), 1)
    greedy = greedy_plan_cost(rows, task, starts, cells, dist, k, horizon)
    # only steps up to the greedy cost can matter for the minimum; plans whose
    # occupancy agrees on those steps are indistinguishable, so dedupe them
    until = int(greedy) if not math.isinf(greedy) else horizon
    per_agent = [
        sorted({timeline(s, plan, dist, until) for plan in sequences(cells, s, k)}, key=str)
        for s in starts
    ]
    best = math.inf
    for timelines in itertools.product(*per_agent):
        best = min(best, simulate(rows, task, timelines))
    return greedy, best


def greedy_plan_cost(rows, task, starts, cells, dist, k, horizon):
    """Re-derive the greedy plan by direct step-by-step simulation."""
    phi, consumed = task, set()
    pos = list(starts)
    target = [None] * len(starts)
    arrive = [None] * len(starts)
    visits = [0] * len(starts)
    parked = [False] * len(starts)
    free = list(range(len(starts)))
    t = 0
    while t <= horizon:
        idle = progress(frozenset(), phi)
        wanted = {
            p for p in goal_propositions(phi)
            if progress(frozenset({p}), phi) != idle
        }
        for i in free:
            options = []
            if visits[i] < k:
                for c in cells:
                    ch = _char(rows, c)
                    prop = RAW.get(ch) or TOOL.get(ch) or ("at_shelter" if ch == "s" else None)
                    if c == pos[i] or prop not in wanted:
                        continue
                    if ch in RAW and c in consumed:
                        continue
                    options.append((dist[pos[i]][c], c[1], c[0], c))
            if options:
                d, _, _, c = min(options)
                target[i], arrive[i] = c, t + d
                visits[i] += 1
            else:
                parked[i] = True
        t += 1
        if t > horizon:
            break
        occupied = []
        for i in range(len(starts)):
            if target[i] is None:
                occupied.append(pos[i])
            elif arrive[i] == t:
                occupied.append(target[i])
            else:
                occupied.append(None)
        labels, grabbed = labels_at(rows, occupied, consumed, t)
        consumed |= grabbed
        phi = progress(labels, phi)
        if phi == TRUE:
            return t
        if phi == FALSE:
            return math.inf
        free = []
        for i in range(len(starts)):
            if target[i] is not None and arrive[i] == t:
                pos[i], target[i] = target[i], None
                if not parked[i]:
                    free.append(i)
        if all(target[i] is None for i in range(len(starts))) and not free:
            return math.inf
    return math.inf


def select(seeds, task, width, height, counts):
    table = []
    for seed in seeds:
        grid = random_map(seed, width, height, counts)
        g, o = costs(grid, task)
        ratio = math.inf if math.isinf(g) and not math.isinf(o) else g / o
        table.append((seed, g, o, ratio))
    feasible = [row for row in table if not math.isinf(row[2])]
    return min(feasible, key=lambda r: (-r[3], r[0])), table


if __name__ == "__main__":
    from ltlcraft.world import ObjectKind

    axe = parse("F (got_wood & F used_workbench) & F (got_iron & F used_factory)")
    counts = {k: 1 for k in ObjectKind if k not in (ObjectKind.WALL, ObjectKind.EMPTY)}
    chosen, table = select(range(int(sys.argv[1]) if len(sys.argv) > 1 else 20), axe, 7, 7, counts)
    for row in table:
        print(*row)
    print("chosen", chosen)
