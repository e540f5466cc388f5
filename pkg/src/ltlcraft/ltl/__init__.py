"""Co-safe LTL: syntax, finite-trace semantics and progression."""
from .formula import (
    FALSE, TRUE, Always, And, Eventually, Formula, Implies, Next, Not, Op, Or, Prop,
    Release, Until, goal_propositions, is_cosafe,
)
from .parser import LTLSyntaxError, parse, pretty
from .progression import (
    Resolution, Status, progress, satisfaction_by_progression, simplify, status_of,
)
from .semantics import as_trace, earliest_satisfying_prefix, evaluate
from .tasks import Task, TaskFileError, format_tasks, load_tasks, parse_tasks, save_tasks

__all__ = [
    "FALSE", "TRUE", "Always", "And", "Eventually", "Formula", "Implies", "Next", "Not",
    "Op", "Or", "Prop", "Release", "Until", "goal_propositions", "is_cosafe",
    "LTLSyntaxError", "parse", "pretty", "Resolution", "Status", "progress",
    "satisfaction_by_progression", "simplify", "status_of", "as_trace",
    "earliest_satisfying_prefix", "evaluate", "Task", "TaskFileError", "format_tasks",
    "load_tasks", "parse_tasks", "save_tasks",
]
