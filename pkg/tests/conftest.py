"""Shared fixtures: the two-atom worked setting and its canonical objects."""

import numpy as np
import pytest

from argus.arguments import AGENT, HUMAN, Argument
from argus.belief import PROPOSED, ModelDistribution
from argus.dialogue import DialogueTrace, PoolEntry, Scenario
from argus.logic import Vocabulary, parse_formula


@pytest.fixture
def vocab2():
    return Vocabulary(("a", "b"))


@pytest.fixture
def f2(vocab2):
    def parse(text):
        return parse_formula(text, vocab2)

    return parse


@pytest.fixture
def worked_distribution(vocab2):
    # id order: (F,F)=0.3, (T,F)=0.2, (F,T)=0.4, (T,T)=0.1
    return ModelDistribution(vocab2, np.array([0.3, 0.2, 0.4, 0.1]))


@pytest.fixture
def agent_move(f2):
    # round 1: the agent argues for b from {a, a -> b} at trust 0.6
    return Argument(
        premises=frozenset([f2("a"), f2("a -> b")]),
        claim=f2("b"),
        source=AGENT,
        trust=0.6,
        timestep=1,
    )


@pytest.fixture
def human_move(f2):
    # round 1 counter: the human asserts !a with certainty 0.9
    return Argument(
        premises=frozenset([f2("!a")]),
        claim=f2("!a"),
        source=HUMAN,
        certainty=0.9,
        timestep=2,
    )


@pytest.fixture
def worked_scenario(vocab2, f2):
    pool = (
        PoolEntry(
            Argument(frozenset([f2("!a")]), f2("!a")), 0.9, "I am certain that"
        ),
    )
    return Scenario(
        vocab=vocab2,
        agent_kb=frozenset([f2("a"), f2("a -> b")]),
        human_pool=pool,
        perspectives=(f2("a & b"), f2("a & !b"), f2("!a & b"), f2("!a & !b")),
        gamma=0.85,
        rule=PROPOSED,
        max_rounds=3,
        name="worked",
    )


@pytest.fixture
def worked_trace(worked_scenario, agent_move, human_move):
    return DialogueTrace(
        scenario=worked_scenario, moves=(agent_move, human_move)
    )
