"""Ordered task selection gated by per-task success rate."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ltl import Formula

DEFAULT_THRESHOLD = 0.98


@dataclass
class TaskStats:
    successes: int = 0
    episodes: int = 0

    @property
    def success_rate(self) -> float:
        return self.successes / self.episodes if self.episodes else 0.0


class Curriculum:
    """Pick the first task (in order) whose success rate is below the threshold.

    Counts are cumulative over the run and per task. Once every task is at or
    above the threshold, the one with the lowest rate gets the next episode;
    ties go to the task with fewer episodes, then to the earlier one.
    """

    def __init__(self, tasks: Sequence[tuple[str, Formula]], threshold: float = DEFAULT_THRESHOLD):
        if not tasks:
            raise ValueError("curriculum needs at least one task")
        if not 0.0 < threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")
        self.tasks = list(tasks)
        self.threshold = threshold
        self.stats = [TaskStats() for _ in self.tasks]

    def __len__(self) -> int:
        return len(self.tasks)

    def rates(self) -> list[float]:
        return [s.success_rate for s in self.stats]

    def next_task(self) -> tuple[int, Formula]:
        rates = self.rates()
        for i, p in enumerate(rates):
            if p < self.threshold:
                return i, self.tasks[i][1]
        i = min(range(len(rates)), key=lambda k: (rates[k], self.stats[k].episodes, k))
        return i, self.tasks[i][1]

    def record_outcome(self, index: int, success: bool) -> TaskStats:
        if not 0 <= index < len(self.stats):
            raise IndexError(f"task index {index} out of range")
        st = self.stats[index]
        st.episodes += 1
        st.successes += bool(success)
        return st


def next_task(curriculum: Curriculum) -> tuple[int, Formula]:
    return curriculum.next_task()


def record_outcome(curriculum: Curriculum, index: int, success: bool) -> TaskStats:
    return curriculum.record_outcome(index, success)
