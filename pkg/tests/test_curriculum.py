import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlcraft.curriculum import Curriculum, TaskStats, next_task, record_outcome
from ltlcraft.ltl import parse

TASKS = [(name, parse(f"F got_{name}")) for name in ("wood", "grass", "iron")]


def with_stats(*pairs, threshold=0.98):
    c = Curriculum(TASKS[: len(pairs)], threshold)
    for st_, (s, n) in zip(c.stats, pairs):
        st_.successes, st_.episodes = s, n
    return c


def test_order_gating_example():
    c = with_stats((99, 100), (1, 2), (0, 5))
    assert next_task(c)[0] == 1


def test_all_mastered_goes_to_lowest_rate():
    c = with_stats((99, 100), (100, 100), (49, 50))
    assert next_task(c)[0] == 2


def test_all_mastered_tie_goes_to_fewer_episodes():
    c = with_stats((5, 5), (1, 1), (3, 3))
    assert next_task(c)[0] == 1
    c = with_stats((2, 2), (2, 2), (2, 2))
    assert next_task(c)[0] == 0


def test_fresh_curriculum_starts_at_zero():
    i, phi = Curriculum(TASKS).next_task()
    assert i == 0 and phi == TASKS[0][1]


def test_record_outcome():
    c = Curriculum(TASKS)
    assert record_outcome(c, 0, True).success_rate == 1.0
    assert record_outcome(c, 0, False).success_rate == 0.5
    assert c.stats[0] == TaskStats(1, 2)
    with pytest.raises(IndexError):
        c.record_outcome(3, True)
    with pytest.raises(IndexError):
        c.record_outcome(-1, True)


def test_counts_never_reset():
    c = Curriculum(TASKS[:1])
    for k in range(200):
        c.record_outcome(0, k % 4 != 0)
    assert c.stats[0] == TaskStats(150, 200)


def test_construction_errors():
    with pytest.raises(ValueError):
        Curriculum([])
    with pytest.raises(ValueError):
        Curriculum(TASKS, threshold=0.0)
    with pytest.raises(ValueError):
        Curriculum(TASKS, threshold=1.5)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=1, max_size=5))
def test_never_returns_mastered_task_while_one_is_below(pairs):
    pairs = [(min(s, n), n) for s, n in pairs]
    c = Curriculum([(f"t{i}", parse("F p")) for i in range(len(pairs))])
    for st_, (s, n) in zip(c.stats, pairs):
        st_.successes, st_.episodes = s, n
    i, _ = c.next_task()
    rates = c.rates()
    if any(r < c.threshold for r in rates):
        assert rates[i] < c.threshold
        assert all(r >= c.threshold for r in rates[:i])
    else:
        assert rates[i] == min(rates)


def test_failing_task_dominates_long_run():
    c = Curriculum(TASKS)
    picks = []
    for _ in range(5000):
        i, _ = c.next_task()
        picks.append(i)
        c.record_outcome(i, i != 1)
    assert picks[-1000:].count(1) / 1000 > 0.99


def test_stubbed_selection_gating():
    rng = random.Random(0)
    c = Curriculum(TASKS)
    p_success = [0.999, 0.9, 0.995]
    for _ in range(10_000):
        i, _ = c.next_task()
        before = c.rates()
        if any(r < c.threshold for r in before):
            assert before[i] < c.threshold
        c.record_outcome(i, rng.random() < p_success[i])
