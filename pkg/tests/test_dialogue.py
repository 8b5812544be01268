"""Dialogue layer: scenarios, traces, replay, selection, simulation."""

import json

import numpy as np
import pytest

from argus.arguments import AGENT, HUMAN, Argument, argument_mask
from argus.belief import (
    BASELINE_2,
    PROPOSED,
    apply_move,
    degree_of_belief,
    uniform_prior,
)
from argus.dialogue import (
    CERTAINTY_LABELS,
    CERTAINTY_LEVELS,
    DEFAULT_TRUST_LEVELS,
    DialogueTrace,
    PoolEntry,
    Scenario,
    canonical_json,
    demo_scenario,
    framework_rankings,
    replay,
    replay_steps,
    select_agent_argument,
    simulate_dialogue,
    simulated_human_respond,
    validate_trace,
)
from argus.errors import (
    DegenerateUpdateError,
    DomainError,
    MalformedTraceError,
    NoArgumentAvailableError,
)
from argus.logic import Model, Vocabulary, parse_formula
from oracles import oracle_bayesian_update

EXAMPLE3_P = 0.6293501802996387


# --- scenario construction -----------------------------------------------


def test_pool_entry_certainty_levels(vocab2, f2):
    arg = Argument(frozenset([f2("!a")]), f2("!a"))
    for level in CERTAINTY_LEVELS:
        PoolEntry(arg, level, CERTAINTY_LABELS[level])
    with pytest.raises(DomainError):
        PoolEntry(arg, 0.42, "roughly")


def test_scenario_validation(vocab2, f2):
    base = dict(
        vocab=vocab2,
        agent_kb=frozenset([f2("a")]),
        human_pool=(),
        perspectives=(f2("a"), f2("b")),
    )
    Scenario(**base)  # fine
    with pytest.raises(DomainError):
        Scenario(**{**base, "perspectives": ()})
    with pytest.raises(DomainError):
        Scenario(**{**base, "perspectives": (f2("a"), f2("a"))})
    with pytest.raises(DomainError):
        Scenario(**{**base, "trust_levels": (("high", 0.5), ("low", 0.5))})
    with pytest.raises(DomainError):
        Scenario(**{**base, "trust_levels": (("high", 1.5),)})
    with pytest.raises(DomainError):
        Scenario(**{**base, "gamma": 0.0})
    with pytest.raises(DomainError):
        Scenario(**{**base, "gamma": 1.0001})
    with pytest.raises(DomainError):
        Scenario(**{**base, "max_rounds": 0})


def test_trust_of_label(worked_scenario):
    assert worked_scenario.trust_of_label("almost complete") == 0.9
    assert worked_scenario.trust_of_label("low") == 0.2
    with pytest.raises(DomainError):
        worked_scenario.trust_of_label("total")


def test_scenario_payload_round_trip(worked_scenario):
    payload = worked_scenario.to_payload()
    assert payload["schema"] == 1
    back = Scenario.from_payload(payload)
    assert back.to_payload() == payload
    assert back.gamma == worked_scenario.gamma
    assert back.rule == worked_scenario.rule
    assert back.agent_kb == worked_scenario.agent_kb


def test_scenario_payload_rejects_wrong_schema(worked_scenario):
    payload = worked_scenario.to_payload()
    payload["schema"] = 2
    with pytest.raises(MalformedTraceError):
        Scenario.from_payload(payload)


# --- trace validation -----------------------------------------------------


def test_trace_requires_increasing_timesteps(worked_scenario, agent_move):
    stale = agent_move.as_agent_move(trust=0.6, timestep=1)
    with pytest.raises(MalformedTraceError):
        DialogueTrace(scenario=worked_scenario, moves=(agent_move, stale))


def test_trace_agent_move_needs_trust(worked_scenario, agent_move, f2):
    bare = Argument(
        premises=agent_move.premises,
        claim=agent_move.claim,
        source=AGENT,
        timestep=1,
    )
    with pytest.raises(MalformedTraceError):
        DialogueTrace(scenario=worked_scenario, moves=(bare,))


def test_trace_human_move_must_answer_agent(worked_scenario, human_move):
    with pytest.raises(MalformedTraceError):
        DialogueTrace(scenario=worked_scenario, moves=(human_move,))


def test_trace_human_move_needs_certainty(worked_scenario, agent_move, f2):
    bare = Argument(
        premises=frozenset([f2("!a")]),
        claim=f2("!a"),
        source=HUMAN,
        timestep=2,
    )
    with pytest.raises(MalformedTraceError):
        DialogueTrace(scenario=worked_scenario, moves=(agent_move, bare))


def test_trace_round_cap(worked_scenario, f2):
    moves = []
    arg = Argument(frozenset([f2("a")]), f2("a"))
    for t in range(1, 5):  # 4 agent moves > max_rounds = 3
        moves.append(arg.as_agent_move(trust=0.5, timestep=t))
    with pytest.raises(MalformedTraceError):
        DialogueTrace(scenario=worked_scenario, moves=tuple(moves))


def test_trace_ranking_shape(worked_scenario, agent_move):
    with pytest.raises(MalformedTraceError):
        DialogueTrace(
            scenario=worked_scenario,
            moves=(agent_move,),
            rankings=((0, 1, 2),),  # needs all 4 perspectives
        )
    with pytest.raises(MalformedTraceError):
        DialogueTrace(
            scenario=worked_scenario,
            moves=(agent_move,),
            rankings=((0, 1, 2, 2),),
        )
    # more rankings than rounds
    with pytest.raises(MalformedTraceError):
        DialogueTrace(
            scenario=worked_scenario,
            moves=(agent_move,),
            rankings=((0, 1, 2, 3), (0, 1, 2, 3)),
        )


def test_invalid_human_counter_warns_but_stays(worked_scenario, agent_move, f2):
    # premises do not entail the claim: not a valid argument, kept anyway
    sloppy = Argument(
        premises=frozenset([f2("!a")]),
        claim=f2("!a & !b"),
        source=HUMAN,
        certainty=0.9,
        timestep=2,
    )
    with pytest.warns(UserWarning, match="not a valid"):
        trace = DialogueTrace(
            scenario=worked_scenario, moves=(agent_move, sloppy)
        )
    assert trace.moves[-1] == sloppy


def test_trace_helpers(worked_trace, agent_move):
    assert worked_trace.rounds == 1
    assert worked_trace.next_timestep() == 3
    empty = DialogueTrace(scenario=worked_trace.scenario)
    assert empty.rounds == 0
    assert empty.next_timestep() == 1
    grown = empty.with_move(agent_move)
    assert grown.rounds == 1
    ranked = grown.with_ranking((0, 1, 2, 3))
    assert ranked.rankings == ((0, 1, 2, 3),)


# --- replay -----------------------------------------------------------------


def test_replay_worked_example(worked_trace):
    dists, p_used = replay_steps(worked_trace)
    assert len(dists) == 3  # prior + one per move
    assert list(dists[0].probs) == [0.25] * 4
    assert p_used[0] == pytest.approx(EXAMPLE3_P, abs=1e-8)
    assert p_used[1] == 0.9
    final = dists[-1]
    assert final.probability(0) == pytest.approx(0.45, abs=1e-9)
    assert final.probability(2) == pytest.approx(0.45, abs=1e-9)
    assert final.probability(3) == pytest.approx(0.083, abs=1e-3)
    assert final.probability(1) == pytest.approx(0.017, abs=1e-3)


def test_replay_empty_trace(worked_scenario):
    dists = replay(DialogueTrace(scenario=worked_scenario))
    assert len(dists) == 1
    assert list(dists[0].probs) == [0.25] * 4


def test_replay_is_deterministic(worked_trace):
    a = replay(worked_trace)[-1]
    b = replay(worked_trace)[-1]
    assert np.array_equal(a.probs, b.probs)


def test_replay_identity_weighting_matches_oracle(worked_scenario, agent_move):
    scen = Scenario(
        vocab=worked_scenario.vocab,
        agent_kb=worked_scenario.agent_kb,
        human_pool=worked_scenario.human_pool,
        perspectives=worked_scenario.perspectives,
        gamma=worked_scenario.gamma,
        rule=BASELINE_2,
        max_rounds=3,
        name="identity",
    )
    trace = DialogueTrace(scenario=scen, moves=(agent_move,))
    final = replay(trace)[-1]
    want = oracle_bayesian_update([0.25] * 4, {3}, 0.6)
    assert np.allclose(final.probs, want, atol=1e-12)


def test_replay_degenerate_carries_timestep(worked_scenario, f2):
    sure = Argument(frozenset([f2("a")]), f2("a")).as_agent_move(
        trust=1.0, timestep=1
    )
    # trust 1.0 inverts to p = 1.0: all mass moves to a=T models
    counter = Argument(
        premises=frozenset([f2("!a")]),
        claim=f2("!a"),
        source=HUMAN,
        certainty=0.9,
        timestep=2,
    )
    trace = DialogueTrace(scenario=worked_scenario, moves=(sure, counter))
    with pytest.raises(DegenerateUpdateError) as exc_info:
        replay(trace)
    assert exc_info.value.timestep == 2


def test_replay_epsilon_floor_rescues(worked_scenario, f2):
    sure = Argument(frozenset([f2("a")]), f2("a")).as_agent_move(
        trust=1.0, timestep=1
    )
    counter = Argument(
        premises=frozenset([f2("!a")]),
        claim=f2("!a"),
        source=HUMAN,
        certainty=0.9,
        timestep=2,
    )
    trace = DialogueTrace(scenario=worked_scenario, moves=(sure, counter))
    dists = replay(trace, epsilon_floor=True)
    assert dists[-1].probs.sum() == pytest.approx(1.0)
    assert dists[-1].probability(0) + dists[-1].probability(2) == pytest.approx(
        0.9, abs=1e-9
    )


# --- serialization ------------------------------------------------------------


def test_trace_payload_round_trip(worked_trace, worked_scenario):
    payload = worked_trace.to_payload()
    back = DialogueTrace.from_payload(payload, worked_scenario)
    assert back == worked_trace


def test_canonical_json_byte_stability(worked_trace, worked_scenario):
    text = canonical_json(worked_trace.to_payload())
    reparsed = DialogueTrace.from_payload(json.loads(text), worked_scenario)
    assert canonical_json(reparsed.to_payload()) == text
    assert text.endswith("\n")
    # keys are sorted at every level
    payload = json.loads(text)
    assert list(payload) == sorted(payload)


def test_trace_from_payload_bad_move(worked_scenario):
    payload = {
        "schema": 1,
        "scenario": "worked",
        "moves": [{"source": "agent", "timestep": 1, "premises": ["a ->"], "claim": "a"}],
        "rankings": [],
    }
    with pytest.raises(MalformedTraceError):
        DialogueTrace.from_payload(payload, worked_scenario)


def test_trace_from_payload_wrong_schema(worked_scenario):
    with pytest.raises(MalformedTraceError):
        DialogueTrace.from_payload({"schema": 0, "moves": []}, worked_scenario)


# --- agent argument selection ---------------------------------------------------


def test_select_prefers_largest_shortfall(vocab2, f2):
    scen = Scenario(
        vocab=vocab2,
        agent_kb=frozenset([f2("a"), f2("b")]),
        human_pool=(),
        perspectives=(f2("a"), f2("b")),
        gamma=0.7,
        rule=PROPOSED,
        max_rounds=5,
        name="pick",
    )
    # skew the distribution so b-models hold most of the mass
    d = uniform_prior(vocab2)
    b_move = Argument(frozenset([f2("b")]), f2("b")).as_agent_move(0.9, 1)
    d, _ = apply_move(d, b_move, scen.rule, scen.params)
    pick = select_agent_argument(d, scen)
    assert pick.claim == f2("a")  # a-models now hold the least mass


def test_select_skips_used_arguments(vocab2, f2):
    scen = Scenario(
        vocab=vocab2,
        agent_kb=frozenset([f2("a"), f2("b")]),
        human_pool=(),
        perspectives=(f2("a"), f2("b")),
        gamma=0.7,
        rule=PROPOSED,
        max_rounds=5,
        name="skip",
    )
    d = uniform_prior(vocab2)
    first = select_agent_argument(d, scen)
    trace = DialogueTrace(scenario=scen).with_move(
        first.as_agent_move(trust=0.7, timestep=1)
    )
    second = select_agent_argument(d, scen, trace)
    assert second.content != first.content
    # two candidates total: after both, nothing remains
    trace = trace.with_move(second.as_agent_move(trust=0.7, timestep=2))
    with pytest.raises(NoArgumentAvailableError):
        select_agent_argument(d, scen, trace)


def test_select_over_demo_scenario_has_four_rounds():
    scen = demo_scenario()
    d = uniform_prior(scen.vocab)
    trace = DialogueTrace(scenario=Scenario(
        vocab=scen.vocab,
        agent_kb=scen.agent_kb,
        human_pool=scen.human_pool,
        perspectives=scen.perspectives,
        gamma=scen.gamma,
        rule=scen.rule,
        max_rounds=10,
        name="wide",
    ))
    seen = set()
    for t in range(1, 5):
        pick = select_agent_argument(d, trace.scenario, trace)
        assert pick.content not in seen
        seen.add(pick.content)
        trace = trace.with_move(pick.as_agent_move(trust=0.5, timestep=t))
    with pytest.raises(NoArgumentAvailableError):
        select_agent_argument(d, trace.scenario, trace)


# --- simulated human --------------------------------------------------------------


def test_simulated_human_trust_extremes(vocab2, f2):
    truth = Model.from_assignment(vocab2, {"a": True, "b": True})
    liked = Argument(frozenset([f2("a")]), f2("a"))
    disliked = Argument(frozenset([f2("!a")]), f2("!a"))
    tau_hi, _ = simulated_human_respond(truth, liked, ())
    tau_lo, _ = simulated_human_respond(truth, disliked, ())
    assert tau_hi == 0.9
    assert tau_lo == 0.2


def test_simulated_human_picks_first_matching_counter(vocab2, f2):
    truth = Model.from_assignment(vocab2, {"a": False, "b": True})
    pool = (
        PoolEntry(Argument(frozenset([f2("!b")]), f2("!b")), 0.9, "no b"),
        PoolEntry(Argument(frozenset([f2("!a")]), f2("!a")), 0.7, "no a"),
        PoolEntry(Argument(frozenset([f2("b")]), f2("b")), 0.5, "yes b"),
    )
    incoming = Argument(frozenset([f2("a")]), f2("a"))
    _, counter = simulated_human_respond(truth, incoming, pool)
    # !b fails in the ground truth; !a is the first whose premises hold
    assert counter is not None
    assert counter.claim == f2("!a")
    assert counter.certainty == 0.7
    assert counter.cue == "no a"


def test_simulated_human_no_matching_counter(vocab2, f2):
    truth = Model.from_assignment(vocab2, {"a": True, "b": True})
    pool = (PoolEntry(Argument(frozenset([f2("!a")]), f2("!a")), 0.9, "x"),)
    incoming = Argument(frozenset([f2("a")]), f2("a"))
    _, counter = simulated_human_respond(truth, incoming, pool)
    assert counter is None


# --- closed-loop simulation ----------------------------------------------------


def test_simulate_dialogue_structure():
    scen = demo_scenario()
    truth = Model.from_assignment(scen.vocab, {"stable": False, "fast": False})
    trace = simulate_dialogue(scen, truth)
    assert 1 <= trace.rounds <= scen.max_rounds
    assert len(trace.rankings) == trace.rounds
    validate_trace(trace)  # structurally sound
    # ground-truth ranking puts the true perspective first
    true_index = 3  # !stable & !fast
    assert trace.rankings[0][0] == true_index


def test_simulate_dialogue_deterministic():
    scen = demo_scenario()
    truth = Model.from_assignment(scen.vocab, {"stable": True, "fast": False})
    a = simulate_dialogue(scen, truth)
    b = simulate_dialogue(scen, truth)
    assert a == b


@pytest.mark.parametrize("truth_id", [0, 1, 2, 3])
@pytest.mark.parametrize("pool_kind", ["lit_a", "lit_b", "both_lits", "conj"])
def test_convergence_to_ground_truth(truth_id, pool_kind):
    """Agent plus truthful human drive the mode to the ground-truth model.

    The agent argues its two-atom knowledge base while the simulated human
    counters with literals true in the hidden model; after six rounds the
    hidden model must be among the most probable ones.
    """
    vocab = Vocabulary(("a", "b"))

    def f(text):
        return parse_formula(text, vocab)

    truth = Model(vocab, truth_id)
    la = f("a") if truth.truth("a") else f("!a")
    lb = f("b") if truth.truth("b") else f("!b")
    if pool_kind == "lit_a":
        pool = (PoolEntry(Argument(frozenset([la]), la), 0.9, ""),)
    elif pool_kind == "lit_b":
        pool = (PoolEntry(Argument(frozenset([lb]), lb), 0.9, ""),)
    elif pool_kind == "both_lits":
        pool = (
            PoolEntry(Argument(frozenset([la]), la), 0.9, ""),
            PoolEntry(Argument(frozenset([lb]), lb), 0.7, ""),
        )
    else:
        both = Argument(frozenset([la, lb]), f(f"{la} & {lb}"))
        pool = (PoolEntry(both, 0.9, ""),)
    scen = Scenario(
        vocab=vocab,
        agent_kb=frozenset([f("a"), f("b")]),
        human_pool=pool,
        perspectives=(f("a"), f("b"), f("a & b"), f("a | b"), f("a <-> b")),
        gamma=0.7,
        rule=PROPOSED,
        max_rounds=6,
        name="convergence",
    )
    trace = simulate_dialogue(scen, truth, rounds=6)
    final = replay(trace)[-1]
    assert truth_id in final.argmax_ids(), (
        f"truth {truth} not among argmax of {list(final.probs)}"
    )


# --- framework rankings -----------------------------------------------------------


def test_framework_rankings_per_round(worked_trace):
    rankings = framework_rankings(worked_trace)
    assert len(rankings) == 1
    # post-round distribution is (0.45, 0.017, 0.45, 0.083) over ids
    # perspectives a&b, a&!b, !a&b, !a&!b -> beliefs 0.084, 0.016, 0.45, 0.45
    assert rankings[0] == (2, 3, 0, 1)


def test_framework_rankings_trailing_agent_move(worked_scenario, f2):
    first = Argument(frozenset([f2("a"), f2("a -> b")]), f2("b")).as_agent_move(
        0.6, 1
    )
    second = Argument(frozenset([f2("a")]), f2("a")).as_agent_move(0.9, 2)
    trace = DialogueTrace(scenario=worked_scenario, moves=(first, second))
    rankings = framework_rankings(trace)
    assert len(rankings) == 2
    # round 1 closes when the next agent move arrives
    params = worked_scenario.params
    d = uniform_prior(worked_scenario.vocab)
    d, _ = apply_move(d, first, worked_scenario.rule, params)
    from argus.belief import rank_perspectives

    assert rankings[0] == tuple(
        rank_perspectives(d, worked_scenario.perspectives)
    )


def test_framework_rankings_empty(worked_scenario):
    assert framework_rankings(DialogueTrace(scenario=worked_scenario)) == []


# --- the built-in demo scenario ------------------------------------------------


def test_demo_scenario_is_well_formed():
    scen = demo_scenario()
    assert scen.name == "demo"
    assert scen.max_rounds == 3
    assert len(scen.perspectives) == 4
    payload = scen.to_payload()
    assert Scenario.from_payload(payload).to_payload() == payload


def test_demo_scenario_supports_every_round():
    # the redundant knowledge base yields four distinct minimal supports
    # for the lead perspective, so three rounds never run dry
    from argus.arguments import minimal_supports

    scen = demo_scenario()
    supports = minimal_supports(
        scen.agent_kb, scen.perspectives[0], scen.vocab
    )
    assert len(supports) == 4


def test_demo_scenario_pool_entries_are_valid_arguments():
    from argus.arguments import is_valid_argument

    scen = demo_scenario()
    for entry in scen.human_pool:
        assert is_valid_argument(entry.argument, scen.vocab)
        assert entry.certainty in CERTAINTY_LEVELS
