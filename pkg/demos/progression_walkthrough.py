"""Watch a crafting task shrink as labels arrive.

Each step progresses the formula through one label set. The reward is +1 on
the step where it collapses to true and -1 on every other step.
"""
from ltlcraft.ltl import parse, pretty, progress, satisfaction_by_progression, evaluate
from ltlcraft.shaping import TaskProgress, base_reward

axe = parse("F (got_wood & F used_workbench) & F (got_iron & F used_factory)")
trace = [set(), {"got_wood"}, {"got_iron"}, {"used_workbench"}, set(), {"used_factory"}]

phi = axe
for k, sigma in enumerate(trace):
    phi = progress(frozenset(sigma), phi)
    print(f"{k}: {sorted(sigma) or '{}'}")
    print(f"   -> {pretty(phi)}")

# the same trace through the reward function
tp, rewards = TaskProgress(axe), []
for sigma in trace:
    r, tp = base_reward(tp, frozenset(sigma))
    rewards.append(r)
print("rewards", rewards)

print(satisfaction_by_progression(trace, axe))
print("trace semantics agree:", evaluate(trace, 0, axe))

# a safety constraint fails the task as soon as it is broken
night = parse("!is_night U at_shelter")
print(satisfaction_by_progression([set(), {"is_night"}], night))
