"""Formula AST for co-safe LTL task specifications.

Formulas are immutable and hashable; two formulas compare equal iff they are
structurally identical. Build them with the helper constructors (``Prop``,
``And``, ``Eventually``...) rather than instantiating ``Formula`` directly.
"""
from __future__ import annotations

import enum
import re
from typing import Iterator

PROP_NAME = re.compile(r"[a-z_][a-z0-9_]*\Z")


class Op(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    PROP = "prop"
    NOT = "!"
    AND = "&"
    OR = "|"
    NEXT = "X"
    ALWAYS = "G"
    EVENTUALLY = "F"
    UNTIL = "U"
    RELEASE = "R"


UNARY = frozenset({Op.NOT, Op.NEXT, Op.ALWAYS, Op.EVENTUALLY})
BINARY = frozenset({Op.AND, Op.OR, Op.UNTIL, Op.RELEASE})


class Formula:
    __slots__ = ("op", "args", "name", "_hash")

    def __init__(self, op: Op, args: tuple = (), name: str | None = None):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash((op, args, name)))

    def __setattr__(self, key, value):
        raise AttributeError("Formula is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula) or self._hash != other._hash:
            return False
        return self.op is other.op and self.name == other.name and self.args == other.args

    def __reduce__(self):
        return (Formula, (self.op, self.args, self.name))

    def __repr__(self):
        if self.op is Op.PROP:
            return f"Prop({self.name!r})"
        if self.op in (Op.TRUE, Op.FALSE):
            return self.op.name.capitalize()
        names = {
            Op.NOT: "Not", Op.AND: "And", Op.OR: "Or", Op.NEXT: "Next",
            Op.ALWAYS: "Always", Op.EVENTUALLY: "Eventually",
            Op.UNTIL: "Until", Op.RELEASE: "Release",
        }
        return f"{names[self.op]}({', '.join(map(repr, self.args))})"

    def __str__(self):
        from .parser import pretty

        return pretty(self)

    @property
    def is_constant(self) -> bool:
        return self.op is Op.TRUE or self.op is Op.FALSE

    def walk(self) -> Iterator[Formula]:
        """Pre-order traversal of all subformulas (including self)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.args))

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def depth(self) -> int:
        if not self.args:
            return 1
        return 1 + max(a.depth() for a in self.args)

    def propositions(self) -> frozenset[str]:
        return frozenset(n.name for n in self.walk() if n.op is Op.PROP)


TRUE = Formula(Op.TRUE)
FALSE = Formula(Op.FALSE)


def Prop(name: str) -> Formula:
    if not PROP_NAME.match(name):
        raise ValueError(f"invalid proposition name {name!r}")
    return Formula(Op.PROP, (), name)


def Not(a: Formula) -> Formula:
    return Formula(Op.NOT, (a,))


def And(a: Formula, b: Formula) -> Formula:
    return Formula(Op.AND, (a, b))


def Or(a: Formula, b: Formula) -> Formula:
    return Formula(Op.OR, (a, b))


def Implies(a: Formula, b: Formula) -> Formula:
    """Material implication, desugared to ``Or(Not(a), b)``."""
    return Or(Not(a), b)


def Next(a: Formula) -> Formula:
    return Formula(Op.NEXT, (a,))


def Always(a: Formula) -> Formula:
    return Formula(Op.ALWAYS, (a,))


def Eventually(a: Formula) -> Formula:
    return Formula(Op.EVENTUALLY, (a,))


def Until(a: Formula, b: Formula) -> Formula:
    return Formula(Op.UNTIL, (a, b))


def Release(a: Formula, b: Formula) -> Formula:
    return Formula(Op.RELEASE, (a, b))


_CONSTRUCTORS = {
    Op.NOT: Not, Op.AND: And, Op.OR: Or, Op.NEXT: Next, Op.ALWAYS: Always,
    Op.EVENTUALLY: Eventually, Op.UNTIL: Until, Op.RELEASE: Release,
}


def rebuild(op: Op, *args: Formula) -> Formula:
    return _CONSTRUCTORS[op](*args)


def goal_propositions(phi: Formula) -> frozenset[str]:
    """Propositions occurring under an even number of negations in ``phi``.

    >>> sorted(goal_propositions(Until(Not(Prop("p")), Prop("q"))))
    ['q']
    """
    found = set()
    stack = [(phi, True)]
    while stack:
        node, positive = stack.pop()
        if node.op is Op.PROP:
            if positive:
                found.add(node.name)
        elif node.op is Op.NOT:
            stack.append((node.args[0], not positive))
        else:
            stack.extend((a, positive) for a in node.args)
    return frozenset(found)


def is_cosafe(phi: Formula) -> bool:
    """Syntactic co-safety check: negation only on propositions, no G or R."""
    for node in phi.walk():
        if node.op is Op.NOT and node.args[0].op is not Op.PROP:
            return False
        if node.op in (Op.ALWAYS, Op.RELEASE):
            return False
    return True
