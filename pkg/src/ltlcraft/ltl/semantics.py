"""Finite-trace satisfaction, computed directly from the quantified definitions.

This module is deliberately naive: it is the oracle that progression is
checked against, so it must not share any rewriting logic with it.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .formula import Formula, Op

LabelSet = frozenset  # frozenset[str]
Trace = Sequence[LabelSet]


def as_trace(steps: Iterable[Iterable[str]]) -> tuple[frozenset[str], ...]:
    trace = tuple(frozenset(s) for s in steps)
    if not trace:
        raise ValueError("a trace needs at least one step")
    return trace


def evaluate(trace: Trace, i: int, phi: Formula, *, literal_always: bool = False) -> bool:
    """Return whether position ``i`` of the finite ``trace`` satisfies ``phi``.

    ``G f`` holds iff ``f`` holds at every position from ``i`` to the end.
    With ``literal_always`` it instead holds unconditionally, which is what
    "exists j in [0, t] with f at every k > j" reduces to on a finite trace
    (take j = t).
    """
    if not trace:
        raise ValueError("empty trace")
    t = len(trace) - 1
    if not 0 <= i <= t:
        raise IndexError(f"index {i} outside trace of length {len(trace)}")
    memo: dict = {}

    def sat(k: int, f: Formula) -> bool:
        key = (k, f)
        if key in memo:
            return memo[key]
        op = f.op
        if op is Op.TRUE:
            r = True
        elif op is Op.FALSE:
            r = False
        elif op is Op.PROP:
            r = f.name in trace[k]
        elif op is Op.NOT:
            r = not sat(k, f.args[0])
        elif op is Op.AND:
            r = sat(k, f.args[0]) and sat(k, f.args[1])
        elif op is Op.OR:
            r = sat(k, f.args[0]) or sat(k, f.args[1])
        elif op is Op.NEXT:
            r = k < t and sat(k + 1, f.args[0])
        elif op is Op.EVENTUALLY:
            r = any(sat(j, f.args[0]) for j in range(k, t + 1))
        elif op is Op.ALWAYS:
            r = literal_always or all(sat(j, f.args[0]) for j in range(k, t + 1))
        elif op is Op.UNTIL:
            a, b = f.args
            r = any(
                sat(j, b) and all(sat(m, a) for m in range(k, j))
                for j in range(k, t + 1)
            )
        elif op is Op.RELEASE:
            a, b = f.args
            r = any(
                sat(j, a) and all(sat(m, b) for m in range(k, j + 1))
                for j in range(k, t + 1)
            ) or all(sat(m, b) for m in range(k, t + 1))
        else:  # pragma: no cover
            raise TypeError(f"unknown operator {op}")
        memo[key] = r
        return r

    return sat(i, phi)


def earliest_satisfying_prefix(trace: Trace, phi: Formula) -> int | None:
    """Smallest k such that the prefix trace[0..k] satisfies phi at 0."""
    for k in range(len(trace)):
        if evaluate(trace[: k + 1], 0, phi):
            return k
    return None
