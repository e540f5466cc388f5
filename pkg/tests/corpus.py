"""Formula and trace corpus shared by the progression and reward-consistency checks.

Formulas are co-safe: negation only on propositions, no always/release.
"""
import itertools
import random

from ltlcraft.ltl import And, Eventually, Next, Not, Or, Prop, Until

PROPS3 = ("p", "q", "r")
PROPS4 = ("p", "q", "r", "s")


def exhaustive(depth, props=PROPS3):
    """Every formula of depth <= ``depth`` (atoms and negated atoms have depth 1)."""
    levels = [[]]
    atoms = [Prop(p) for p in props]
    levels.append(atoms + [Not(a) for a in atoms])
    for d in range(2, depth + 1):
        lower = [f for lv in levels[1:d] for f in lv]
        top = levels[d - 1]
        new = []
        for f in top:
            new += [Next(f), Eventually(f)]
        for a, b in itertools.product(lower, repeat=2):
            if a in top or b in top:
                new += [And(a, b), Or(a, b), Until(a, b)]
        levels.append(new)
    return [f for lv in levels[1:] for f in lv]


def random_formula(rng, depth, props=PROPS4):
    if depth <= 1 or rng.random() < 0.2:
        a = Prop(rng.choice(props))
        return Not(a) if rng.random() < 0.3 else a
    op = rng.choice(("X", "F", "&", "|", "U"))
    if op in ("X", "F"):
        sub = random_formula(rng, depth - 1, props)
        return Next(sub) if op == "X" else Eventually(sub)
    a, b = random_formula(rng, depth - 1, props), random_formula(rng, depth - 1, props)
    return {"&": And, "|": Or, "U": Until}[op](a, b)


def random_trace(rng, props, max_len=6):
    n = rng.randint(1, max_len)
    return tuple(frozenset(p for p in props if rng.random() < 0.4) for _ in range(n))


def all_traces(props, max_len):
    label_sets = [frozenset(c) for k in range(len(props) + 1) for c in itertools.combinations(props, k)]
    for n in range(1, max_len + 1):
        yield from itertools.product(label_sets, repeat=n)


def corpus(seed=0, traces_per_exhaustive=3, n_random=10_000, traces_per_random=2):
    """Yield (formula, trace) pairs: exhaustive depth-3 formulas over 3 propositions with
    random traces, 10k random depth-4 formulas over 4 propositions with random traces, and
    every trace of length <= 3 over 2 propositions for the depth-2 formulas over them."""
    rng = random.Random(seed)
    for phi in exhaustive(3):
        for _ in range(traces_per_exhaustive):
            yield phi, random_trace(rng, PROPS3)
    for _ in range(n_random):
        phi = random_formula(rng, 4)
        for _ in range(traces_per_random):
            yield phi, random_trace(rng, PROPS4)
    small = exhaustive(2, ("p", "q"))
    for trace in all_traces(("p", "q"), 3):
        for phi in small:
            yield phi, trace
