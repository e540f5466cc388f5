import pytest

from ltlcraft.ltl import parse
from ltlcraft.transform import (
    GameError, format_game, history_q, parse_game, product_q, random_game, verify_transformation,
)

LOOP = """
agents 2
states s0
actions 0 a b
actions 1 a
gamma 0.9
horizon 6
formula F p
label s0 p
trans * * s0
"""

CHAIN = """
agents 2
states s0 s1 s2
actions 0 a b
actions 1 a b
gamma 0.9
horizon 6
formula F p
label s2 p
trans s0 a,a s1
trans s1 a,* s2
trans s2 * s2
trans * * s0          # anything else resets
"""


def test_single_state_geometric_sum():
    game = parse_game(LOOP)
    expected = sum(0.9 ** k for k in range(6))
    q_hist = history_q(game)[("s0",)]
    q_prod = product_q(game)(5, "s0", game.formula)
    for a in game.joint_actions:
        assert q_hist[a] == pytest.approx(expected, abs=1e-12)
        assert q_prod[a] == pytest.approx(expected, abs=1e-12)


def test_chain_exact_agreement():
    rep = verify_transformation(parse_game(CHAIN))
    assert rep.max_abs_diff == 0.0
    assert rep.argmax_agreement == 1.0 and rep.ok


def test_chain_optimal_action_heads_for_p():
    game = parse_game(CHAIN)
    q = history_q(game)[("s0",)]
    best = max(q, key=q.get)
    assert best == ("a", "a")


def test_twenty_random_games():
    for seed in range(20):
        rep = verify_transformation(random_game(seed))
        assert rep.max_abs_diff < 1e-9, seed
        assert rep.argmax_agreement == 1.0, seed


def test_nonmarkov_formula_with_ordering():
    game = parse_game(CHAIN.replace("formula F p", "formula F (q & X F p)")
                      .replace("label s2 p", "label s2 p\nlabel s1 q"))
    assert verify_transformation(game).ok


def test_format_roundtrip():
    for seed in range(5):
        g = random_game(seed)
        assert parse_game(format_game(g)) == g


def test_formula_parsed():
    assert parse_game(LOOP).formula == parse("F p")


@pytest.mark.parametrize("patch", [
    ("states s0", "states s0 s1 s2 s3 s4 s5"),
    ("horizon 6", "horizon 7"),
    ("agents 2", "agents 3"),
    ("actions 0 a b", "actions 0 a b c d"),
    ("formula F p", "formula F (p & F (q & F (r & F s)))"),
    ("trans * * s0", "trans * * s9"),
    ("trans * * s0", ""),
    ("formula F p", "formula F (p"),
    ("gamma 0.9", "gamma x"),
    ("label s0 p", "label s7 p"),
    ("trans * * s0", "trans * * s0 0.5"),
    ("agents 2", "colour red\nagents 2"),
])
def test_bad_games(patch):
    with pytest.raises(GameError):
        parse_game(LOOP.replace(*patch))
