"""Random maps, the observation vector, and picking a hard map for a task."""
import numpy as np

from ltlcraft.ltl import parse
from ltlcraft.world import (
    Action, ObjectKind, WorldState, adversarial_select, features, random_map, step,
)

grid = random_map(seed=4, width=9, height=9)
print(grid.to_text())

state = WorldState.initial(grid)
print("features of agent 0:", features(state, 0))

rng = np.random.default_rng(0)
for _ in range(20):
    state, labels = step(state, rng.integers(len(Action), size=grid.n_agents))
    if labels:
        print("step", state.step_count, sorted(labels))

# one of each object makes the map layout matter more
axe = parse("F (got_wood & F used_workbench) & F (got_iron & F used_factory)")
ones = {k: 1 for k in ObjectKind if k not in (ObjectKind.WALL, ObjectKind.EMPTY)}
hard, scored = adversarial_select(range(50), axe, 9, 9, counts=ones)
best = max(scored, key=lambda c: c.ratio)
print(f"seed {hard.seed}: greedy {best.greedy} vs optimal {best.optimal} joint steps")
print(hard.to_text())
