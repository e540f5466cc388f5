"""Formula progression and simplification."""
from __future__ import annotations

import enum
from functools import lru_cache
from typing import Iterable, NamedTuple

from .formula import (
    FALSE, TRUE, Always, And, Eventually, Formula, Not, Op, Or, Release, Until, rebuild,
)


@lru_cache(maxsize=1 << 16)
def simplify(phi: Formula) -> Formula:
    """Trace-equivalent rewrite applying constant, involution and idempotence laws.

    Nested chains of ``&`` / ``|`` are flattened and deduplicated, keeping
    first occurrences, then rebuilt right-nested.
    """
    op = phi.op
    if not phi.args:
        return phi
    args = tuple(simplify(a) for a in phi.args)

    if op is Op.NOT:
        (a,) = args
        if a == TRUE:
            return FALSE
        if a == FALSE:
            return TRUE
        if a.op is Op.NOT:
            return a.args[0]
        return Not(a)
    if op is Op.AND or op is Op.OR:
        return _simplify_junction(op, args)
    if op is Op.NEXT:
        # X true is not true: it fails on the last position of a trace
        return FALSE if args[0] == FALSE else rebuild(op, *args)
    if op is Op.EVENTUALLY or op is Op.ALWAYS:
        (a,) = args
        if a.is_constant:
            return a
        if a.op is op:
            return a
        return rebuild(op, a)
    a, b = args
    if op is Op.UNTIL:
        if b.is_constant:
            return b
        if a == TRUE:
            return Eventually(b)
        if a == FALSE:
            return b
        return Until(a, b)
    # release
    if b.is_constant:
        return b
    if a == TRUE:
        return b
    if a == FALSE:
        return Always(b)
    return Release(a, b)


def _simplify_junction(op: Op, args) -> Formula:
    unit, zero = (TRUE, FALSE) if op is Op.AND else (FALSE, TRUE)
    flat: list[Formula] = []
    stack = list(reversed(args))
    while stack:
        a = stack.pop()
        if a.op is op:
            stack.extend(reversed(a.args))
        elif a == zero:
            return zero
        elif a != unit and a not in flat:
            flat.append(a)
    if not flat:
        return unit
    out = flat[-1]
    for a in reversed(flat[:-1]):
        out = Formula(op, (a, out))
    return out


def _prog(sigma: frozenset, phi: Formula, literal_always: bool, literal_release: bool) -> Formula:
    op = phi.op
    if op is Op.TRUE or op is Op.FALSE:
        return phi
    if op is Op.PROP:
        return TRUE if phi.name in sigma else FALSE
    if op is Op.NEXT:
        return phi.args[0]
    if op is Op.NOT:
        return Not(_prog(sigma, phi.args[0], literal_always, literal_release))
    if op is Op.AND or op is Op.OR:
        a, b = phi.args
        return Formula(op, (
            _prog(sigma, a, literal_always, literal_release),
            _prog(sigma, b, literal_always, literal_release),
        ))
    if op is Op.EVENTUALLY:
        return Or(_prog(sigma, phi.args[0], literal_always, literal_release), phi)
    if op is Op.ALWAYS:
        if literal_always:
            return TRUE
        return And(_prog(sigma, phi.args[0], literal_always, literal_release), phi)
    a, b = phi.args
    pa = _prog(sigma, a, literal_always, literal_release)
    pb = _prog(sigma, b, literal_always, literal_release)
    if op is Op.UNTIL:
        return Or(pb, And(pa, phi))
    if literal_release:
        return And(pa, Or(pb, Release(b, a)))
    return And(pb, Or(pa, phi))


def progress(
    sigma: Iterable[str],
    phi: Formula,
    *,
    literal_always: bool = False,
    literal_release: bool = False,
) -> Formula:
    """Rewrite ``phi`` against the truth assignment ``sigma`` and simplify.

    ``literal_always`` makes ``G f`` progress straight to ``true``;
    ``literal_release`` uses the operand-swapped release rule. Both are off
    by default because neither agrees with the trace semantics in
    :func:`~ltlcraft.ltl.semantics.evaluate`.
    """
    if not isinstance(sigma, frozenset):
        sigma = frozenset(sigma)
    return _progress(sigma, phi, literal_always, literal_release)


@lru_cache(maxsize=1 << 18)
def _progress(sigma: frozenset, phi: Formula, literal_always: bool, literal_release: bool):
    return simplify(_prog(sigma, phi, literal_always, literal_release))


class Status(enum.Enum):
    OPEN = "open"
    SATISFIED = "satisfied"
    FALSIFIED = "falsified"


class Resolution(NamedTuple):
    status: Status
    step: int | None  # index of the resolving step, None while open
    residual: Formula


def status_of(phi: Formula) -> Status:
    if phi == TRUE:
        return Status.SATISFIED
    if phi == FALSE:
        return Status.FALSIFIED
    return Status.OPEN


def satisfaction_by_progression(trace: Iterable, phi: Formula, **rules) -> Resolution:
    """Fold progression over ``trace``; stop at the first step resolving ``phi``."""
    current = phi
    for k, sigma in enumerate(trace):
        current = progress(sigma, current, **rules)
        st = status_of(current)
        if st is not Status.OPEN:
            return Resolution(st, k, current)
    return Resolution(Status.OPEN, None, current)
