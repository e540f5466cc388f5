"""The 10-task crafting catalog in its three styles.

``sequential`` fixes the order of every step, ``interleaving`` keeps only the
orderings that matter (material before the tool that processes it), and
``constrained`` wraps the interleaving body in a night-time shelter rule.
Tasks are listed from easiest to hardest so a prefix makes a small curriculum.
"""
from __future__ import annotations

from ..ltl import Task, format_tasks, parse

PRESETS = ("sequential", "interleaving", "constrained")

# name -> (sequential form, interleaving form)
CATALOG = {
    "plank": (
        "F (got_wood & F used_toolshed)",
        "F (got_wood & F used_toolshed)",
    ),
    "rope": (
        "F (got_grass & F used_toolshed)",
        "F (got_grass & F used_toolshed)",
    ),
    "cloth": (
        "F (got_grass & F used_factory)",
        "F (got_grass & F used_factory)",
    ),
    "bridge": (
        "F (got_iron & F (got_wood & F used_factory))",
        "F (got_iron & F used_factory) & F (got_wood & F used_factory)",
    ),
    "bed": (
        "F (got_wood & F (used_toolshed & F (got_grass & F used_workbench)))",
        "F (got_wood & F (used_toolshed & F used_workbench)) & F (got_grass & F used_workbench)",
    ),
    "shears": (
        "F (got_wood & F (used_workbench & F (got_iron & F used_workbench)))",
        "F (got_wood & F used_workbench) & F (got_iron & F used_workbench)",
    ),
    "axe": (
        "F (got_wood & F used_workbench) & F (got_iron & F used_factory)",
        "F (got_wood & F used_workbench) & F (got_iron & F used_factory)",
    ),
    "fishing_rod": (
        "F (got_wood & F (used_workbench & F (got_grass & F used_toolshed)))",
        "F (got_wood & F (used_toolshed & F used_workbench)) & F (got_grass & F used_workbench)",
    ),
    "bow_and_arrow": (
        "F (got_wood & F (used_workbench & F (got_grass & F (used_toolshed"
        " & F (got_iron & F used_factory)))))",
        "F (got_wood & F used_workbench) & F (got_grass & F used_toolshed)"
        " & F (got_iron & F used_factory)",
    ),
    "gold_tool": (
        "F (got_iron & F (used_factory & F (got_wood & F (used_workbench & F used_factory))))",
        "F (got_iron & F (used_factory & F used_workbench)) & F (got_wood & F used_workbench)",
    ),
}

SAFETY = "(is_night -> at_shelter)"


def constrain(body: str) -> str:
    return f"{SAFETY} U (({body}) & {SAFETY})"


def make_experiment(preset: str) -> list[Task]:
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    out = []
    for name, (seq, inter) in CATALOG.items():
        text = seq if preset == "sequential" else inter
        if preset == "constrained":
            text = constrain(text)
        out.append(Task(name, parse(text)))
    return out


def preset_text(preset: str) -> str:
    return format_tasks(make_experiment(preset), header=f"{preset} crafting tasks")
