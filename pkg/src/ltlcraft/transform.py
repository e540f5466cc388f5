"""Numerical check that progression turns a history-dependent reward into a Markov one.

A small tabular game is solved twice over a fixed horizon:

* on histories: the reward after reaching ``s_t`` is +1 if the label prefix
  ``L(s_0) .. L(s_t)`` satisfies the task formula (finite-trace semantics,
  evaluated by :func:`ltlcraft.ltl.evaluate`) and -1 otherwise; optimal Q
  values are computed by enumerating every history;
* on the product ``(s, residual formula)``: the reward is +1 if progressing
  the residual by ``L(s)`` yields ``true`` and -1 otherwise; optimal Q values
  come from backward induction.

Rewards are shared by all agents and Q is indexed by joint actions.

Game description format (``#`` starts a comment)::

    agents 2
    states s0 s1 s2
    actions 0 a b          # action names of agent 0
    actions 1 a b c
    gamma 0.9
    horizon 6
    formula F (p & F q)
    label s1 p             # propositions true in s1; unlisted states have none
    trans s0 a,b s1        # deterministic
    trans s0 *,c s1 0.5 s2 0.5   # '*' matches any action of that agent
    trans * * s0           # fallback ('*' alone matches every joint action);
                           # the first matching line wins
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from pathlib import Path

from .ltl import TRUE, Formula, evaluate, parse, progress
from .ltl.formula import And, Eventually, Next, Not, Or, Prop, Until

MAX_STATES, MAX_AGENTS, MAX_ACTIONS, MAX_PROPS, MAX_HORIZON = 5, 2, 3, 3, 6


class GameError(ValueError):
    pass


@dataclass(frozen=True)
class TabularGame:
    states: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]  # per agent
    transitions: dict  # (state, joint action tuple) -> tuple of (next state, prob)
    labels: dict  # state -> frozenset of propositions
    formula: Formula
    gamma: float = 0.9
    horizon: int = 6

    @property
    def joint_actions(self) -> list[tuple[str, ...]]:
        return list(itertools.product(*self.actions))

    def check(self) -> None:
        props = set().union(*self.labels.values()) | self.formula.propositions()
        if len(self.states) > MAX_STATES:
            raise GameError(f"at most {MAX_STATES} states are supported")
        if not 1 <= len(self.actions) <= MAX_AGENTS:
            raise GameError(f"between 1 and {MAX_AGENTS} agents are supported")
        if any(not 1 <= len(a) <= MAX_ACTIONS for a in self.actions):
            raise GameError(f"each agent needs 1..{MAX_ACTIONS} actions")
        if len(props) > MAX_PROPS:
            raise GameError(f"at most {MAX_PROPS} propositions are supported")
        if not 1 <= self.horizon <= MAX_HORIZON:
            raise GameError(f"horizon must be within 1..{MAX_HORIZON}")
        for s in self.states:
            for a in self.joint_actions:
                dist = self.transitions.get((s, a))
                if not dist:
                    raise GameError(f"no transition for state {s} under {a}")
                unknown = [t for t, _ in dist if t not in self.states]
                if unknown:
                    raise GameError(f"transition from {s} under {a} to unknown state {unknown[0]!r}")
                if any(p < 0 for _, p in dist) or abs(sum(p for _, p in dist) - 1.0) > 1e-9:
                    raise GameError(f"probabilities for {s} under {a} do not sum to 1")


def parse_game(text: str) -> TabularGame:
    n_agents = None
    states: list[str] = []
    actions: dict[int, list[str]] = {}
    gamma, horizon, formula = 0.9, 6, None
    labels: dict[str, frozenset] = {}
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        words = rest.split()
        try:
            if key == "agents":
                n_agents = int(words[0])
            elif key == "states":
                states = words
            elif key == "actions":
                actions[int(words[0])] = words[1:]
            elif key == "gamma":
                gamma = float(words[0])
            elif key == "horizon":
                horizon = int(words[0])
            elif key == "formula":
                formula = parse(rest)
            elif key == "label":
                labels[words[0]] = frozenset(words[1:])
            elif key == "trans":
                src, joint, targets = words[0], words[1].split(","), words[2:]
                if len(targets) == 1:
                    dist = ((targets[0], 1.0),)
                else:
                    dist = tuple(
                        (targets[i], float(targets[i + 1])) for i in range(0, len(targets), 2)
                    )
                rules.append((src, tuple(joint), dist))
            else:
                raise GameError(f"unknown directive {key!r}")
        except (IndexError, ValueError) as exc:
            raise GameError(f"line {lineno}: {exc}") from exc
    if n_agents is None or formula is None or not states:
        raise GameError("game needs 'agents', 'states' and 'formula' lines")
    if sorted(actions) != list(range(n_agents)):
        raise GameError("every agent needs an 'actions' line")
    acts = tuple(tuple(actions[i]) for i in range(n_agents))
    transitions = {}
    for s in states:
        for joint in itertools.product(*acts):
            for src, pattern, dist in rules:
                if pattern == ("*",):
                    pattern = ("*",) * n_agents
                if src not in ("*", s) or len(pattern) != n_agents:
                    continue
                if all(p in ("*", a) for p, a in zip(pattern, joint)):
                    transitions[(s, joint)] = dist
                    break
    for s in labels:
        if s not in states:
            raise GameError(f"label for unknown state {s!r}")
    game = TabularGame(
        tuple(states), acts, transitions,
        {s: labels.get(s, frozenset()) for s in states}, formula, gamma, horizon,
    )
    game.check()
    return game


def load_game(path) -> TabularGame:
    return parse_game(Path(path).read_text(encoding="utf-8"))


def format_game(game: TabularGame) -> str:
    lines = [f"agents {len(game.actions)}", "states " + " ".join(game.states)]
    lines += [f"actions {i} " + " ".join(a) for i, a in enumerate(game.actions)]
    lines += [f"gamma {game.gamma!r}", f"horizon {game.horizon}", f"formula {game.formula}"]
    lines += [f"label {s} " + " ".join(sorted(game.labels[s])) for s in game.states]
    for (s, joint), dist in game.transitions.items():
        lines.append(
            f"trans {s} {','.join(joint)} " + " ".join(f"{t} {p!r}" for t, p in dist)
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TransformationReport:
    max_abs_diff: float
    argmax_agreement: float  # fraction of histories with identical optimal joint-action sets
    n_histories: int
    n_q_values: int

    @property
    def ok(self) -> bool:
        return self.max_abs_diff < 1e-9 and self.argmax_agreement == 1.0


def _argmax_set(q: dict, tol: float = 1e-9) -> frozenset:
    best = max(q.values())
    return frozenset(a for a, v in q.items() if v >= best - tol)


def history_q(game: TabularGame):
    """Optimal Q for every history (tuple of states), by exhaustive enumeration."""
    joint = game.joint_actions
    sat_cache: dict = {}

    def reward(history) -> float:
        trace = tuple(game.labels[s] for s in history)
        if trace not in sat_cache:
            sat_cache[trace] = 1.0 if evaluate(trace, 0, game.formula) else -1.0
        return sat_cache[trace]

    table: dict = {}

    def value(history) -> float:
        r = reward(history)
        if len(history) == game.horizon:
            q = {a: r for a in joint}
        else:
            s = history[-1]
            succ = {t: value(history + (t,)) for t in game.states}
            q = {
                a: r + game.gamma * sum(p * succ[t] for t, p in game.transitions[(s, a)])
                for a in joint
            }
        table[history] = q
        return max(q.values())

    for s in game.states:
        value((s,))
    return table


def product_q(game: TabularGame):
    """Optimal Q on (steps left, state, residual formula), by backward induction."""
    joint = game.joint_actions
    memo: dict = {}

    def q(k: int, s: str, phi: Formula) -> dict:
        key = (k, s, phi)
        if key in memo:
            return memo[key]
        nxt = progress(game.labels[s], phi)
        r = 1.0 if nxt == TRUE else -1.0
        if k == 0:
            out = {a: r for a in joint}
        else:
            v = {t: max(q(k - 1, t, nxt).values()) for t in game.states}
            out = {
                a: r + game.gamma * sum(p * v[t] for t, p in game.transitions[(s, a)])
                for a in joint
            }
        memo[key] = out
        return out

    return q


def verify_transformation(game: TabularGame) -> TransformationReport:
    game.check()
    hq = history_q(game)
    pq = product_q(game)
    worst, agree, n_q = 0.0, 0, 0
    for history, q_hist in hq.items():
        phi = game.formula
        for s in history[:-1]:
            phi = progress(game.labels[s], phi)
        q_prod = pq(game.horizon - len(history), history[-1], phi)
        for a in q_hist:
            worst = max(worst, abs(q_hist[a] - q_prod[a]))
            n_q += 1
        agree += _argmax_set(q_hist) == _argmax_set(q_prod)
    return TransformationReport(worst, agree / len(hq), len(hq), n_q)


def random_cosafe_formula(rng: random.Random, props, depth: int) -> Formula:
    """Random formula with negation only on propositions and no G/R."""
    if depth <= 1 or rng.random() < 0.25:
        p = Prop(rng.choice(props))
        return Not(p) if rng.random() < 0.25 else p
    kind = rng.choice(["and", "or", "next", "eventually", "until", "eventually"])
    if kind in ("next", "eventually"):
        arg = random_cosafe_formula(rng, props, depth - 1)
        return Next(arg) if kind == "next" else Eventually(arg)
    a = random_cosafe_formula(rng, props, depth - 1)
    b = random_cosafe_formula(rng, props, depth - 1)
    return {"and": And, "or": Or, "until": Until}[kind](a, b)


def random_game(
    seed: int, n_states: int = 4, n_agents: int = 2, n_actions: int = 3,
    props=("p", "q", "r"), horizon: int = 6, gamma: float = 0.9,
) -> TabularGame:
    """Random stochastic game with random labels and a random co-safe task."""
    rng = random.Random(seed)
    states = tuple(f"s{i}" for i in range(n_states))
    acts = tuple(tuple("abc"[:n_actions]) for _ in range(n_agents))
    transitions = {}
    for s in states:
        for joint in itertools.product(*acts):
            succ = rng.sample(states, rng.randint(1, min(2, n_states)))
            weights = [rng.random() + 0.1 for _ in succ]
            total = sum(weights)
            transitions[(s, joint)] = tuple((t, w / total) for t, w in zip(succ, weights))
    labels = {
        s: frozenset(p for p in props if rng.random() < 0.35) for s in states
    }
    formula = random_cosafe_formula(rng, list(props), 3)
    return TabularGame(states, acts, transitions, labels, formula, gamma, horizon)


__all__ = [
    "GameError", "TabularGame", "TransformationReport", "format_game",
    "history_q", "load_game", "parse_game", "product_q", "random_cosafe_formula",
    "random_game", "verify_transformation",
]
