"""Train two agents on three sequential crafting tasks and compare against
the variant without temporal-logic rewards.

Takes several minutes per run on one core; lower ``steps`` for a quick look.
"""
import sys

from ltlcraft.harness.config import RunConfig
from ltlcraft.harness.training import train

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000

for ltl in (True, False):
    config = RunConfig(seed=0, width=7, height=7, tasks="preset:sequential", task_count=3,
                       total_steps=steps, eval_period=steps // 5, ltl_rewards=ltl)
    result = train(config)
    print("ltl rewards" if ltl else "final-event rewards")
    for rec in result.records:
        print(f"  {rec.step:7d}  total {rec.total:+d}  {rec.outcomes}")
    print("  curriculum:", [(s.successes, s.episodes) for s in result.curriculum.stats])
