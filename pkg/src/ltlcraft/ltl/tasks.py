"""Task files: ``task <name>: <formula>`` stanzas with ``#`` comments.

A formula may continue over several lines; a stanza ends where the next
``task`` line begins.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .formula import Formula
from .parser import LTLSyntaxError, parse, pretty

_HEADER = re.compile(r"task\s+([a-z_][a-z0-9_]*)\s*:(.*)\Z")


@dataclass(frozen=True)
class Task:
    name: str
    formula: Formula


class TaskFileError(ValueError):
    pass


def parse_tasks(text: str) -> list[Task]:
    stanzas: list[tuple[str, int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _HEADER.match(line.strip())
        if m:
            stanzas.append((m.group(1), lineno, [m.group(2)]))
        elif stanzas:
            stanzas[-1][2].append(line)
        else:
            raise TaskFileError(f"line {lineno}: expected 'task <name>: <formula>'")

    tasks, seen = [], set()
    for name, lineno, body in stanzas:
        if name in seen:
            raise TaskFileError(f"line {lineno}: duplicate task name {name!r}")
        seen.add(name)
        try:
            phi = parse("\n".join(body))
        except LTLSyntaxError as exc:
            raise TaskFileError(
                f"task {name!r}: {exc.args[0].split(' at line')[0]} at line "
                f"{lineno + exc.line - 1}"
            ) from exc
        tasks.append(Task(name, phi))
    if not tasks:
        raise TaskFileError("no tasks defined")
    return tasks


def format_tasks(tasks, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines += [f"task {t.name}: {pretty(t.formula)}" for t in tasks]
    return "\n".join(lines) + "\n"


def load_tasks(path) -> list[Task]:
    return parse_tasks(Path(path).read_text(encoding="utf-8"))


def save_tasks(tasks, path, header: str | None = None) -> None:
    Path(path).write_text(format_tasks(tasks, header), encoding="utf-8")
