"""Dialogue scenarios, traces, replay, and closed-loop simulation.

A round is: the agent presents an argument, the human reports a trust
level (recorded as an annotation on that argument), the human optionally
presents a counterargument from the scenario's pool, and the human ranks
the scenario's perspectives. Traces record the moves and the per-round
rankings; replay recomputes the distribution sequence from scratch, so a
trace is always the source of truth.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

from .arguments import (
    AGENT,
    HUMAN,
    Argument,
    argument_mask,
    is_valid_argument,
    minimal_supports,
    model_entails_argument,
)
from .belief import (
    ModelDistribution,
    UpdateRule,
    apply_move,
    degree_of_belief,
    rank_perspectives,
    uniform_prior,
)
from .errors import (
    ArgusError,
    DegenerateUpdateError,
    DomainError,
    MalformedTraceError,
    NoArgumentAvailableError,
)
from .logic import Formula, Model, Vocabulary, evaluate, parse_formula
from .weighting import WeightingParams

DEFAULT_TRUST_LEVELS = (
    ("almost complete", 0.9),
    ("high", 0.7),
    ("average", 0.5),
    ("low", 0.2),
)

CERTAINTY_LEVELS = (0.9, 0.7, 0.5, 0.3, 0.1)

CERTAINTY_LABELS = {
    0.9: "high certainty",
    0.7: "moderate certainty",
    0.5: "neutral uncertainty",
    0.3: "moderate uncertainty",
    0.1: "high uncertainty",
}

DEFAULT_MAX_ROUNDS = 3

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PoolEntry:
    """A counterargument the human may pick, with its certainty and cue."""

    argument: Argument
    certainty: float
    cue: str

    def __post_init__(self):
        if self.certainty not in CERTAINTY_LEVELS:
            raise DomainError(
                f"certainty {self.certainty} is not one of {CERTAINTY_LEVELS}"
            )


@dataclass(frozen=True)
class Scenario:
    """Everything a dialogue needs: language, knowledge, options, rule."""

    vocab: Vocabulary
    agent_kb: frozenset[Formula]
    human_pool: tuple[PoolEntry, ...]
    perspectives: tuple[Formula, ...]
    trust_levels: tuple[tuple[str, float], ...] = DEFAULT_TRUST_LEVELS
    gamma: float = 0.7
    rule: UpdateRule = field(default_factory=lambda: UpdateRule("prospect", "bayesian"))
    max_rounds: int = DEFAULT_MAX_ROUNDS
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "agent_kb", frozenset(self.agent_kb))
        object.__setattr__(self, "human_pool", tuple(self.human_pool))
        object.__setattr__(self, "perspectives", tuple(self.perspectives))
        object.__setattr__(self, "trust_levels", tuple(map(tuple, self.trust_levels)))
        if not self.perspectives:
            raise DomainError("scenario needs at least one perspective")
        rendered = [str(p) for p in self.perspectives]
        if len(set(rendered)) != len(rendered):
            raise DomainError("perspectives must be distinct")
        taus = [tau for _, tau in self.trust_levels]
        if not taus or any(b >= a for a, b in zip(taus, taus[1:])):
            raise DomainError("trust levels must be strictly decreasing in tau")
        if any(not 0.0 <= t <= 1.0 for t in taus):
            raise DomainError("trust levels must lie in [0, 1]")
        if not 0.0 < self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.max_rounds < 1:
            raise DomainError("max_rounds must be at least 1")

    @property
    def params(self) -> WeightingParams:
        return WeightingParams(gamma=self.gamma)

    def trust_of_label(self, label: str) -> float:
        for name, tau in self.trust_levels:
            if name == label:
                return tau
        raise DomainError(f"unknown trust level {label!r}")

    def to_payload(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "vocab": list(self.vocab.atoms),
            "agent_kb": sorted(str(f) for f in self.agent_kb),
            "human_pool": [
                {
                    "premises": [str(p) for p in e.argument.sorted_premises()],
                    "claim": str(e.argument.claim),
                    "certainty": e.certainty,
                    "cue": e.cue,
                }
                for e in self.human_pool
            ],
            "perspectives": [str(p) for p in self.perspectives],
            "trust_levels": [[label, tau] for label, tau in self.trust_levels],
            "gamma": self.gamma,
            "rule": self.rule.name,
            "max_rounds": self.max_rounds,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Scenario":
        _check_schema(payload)
        vocab = Vocabulary(tuple(payload["vocab"]))
        kb = frozenset(parse_formula(s, vocab) for s in payload["agent_kb"])
        pool = tuple(
            PoolEntry(
                argument=Argument(
                    premises=frozenset(parse_formula(p, vocab) for p in e["premises"]),
                    claim=parse_formula(e["claim"], vocab),
                ),
                certainty=float(e["certainty"]),
                cue=e.get("cue", ""),
            )
            for e in payload["human_pool"]
        )
        return cls(
            vocab=vocab,
            agent_kb=kb,
            human_pool=pool,
            perspectives=tuple(parse_formula(s, vocab) for s in payload["perspectives"]),
            trust_levels=tuple((label, float(tau)) for label, tau in payload["trust_levels"]),
            gamma=float(payload["gamma"]),
            rule=UpdateRule.from_name(payload["rule"]),
            max_rounds=int(payload.get("max_rounds", DEFAULT_MAX_ROUNDS)),
            name=str(payload.get("name", "scenario")),
        )


@dataclass(frozen=True)
class DialogueTrace:
    """Annotated move sequence plus the human's per-round rankings."""

    scenario: Scenario
    moves: tuple[Argument, ...] = ()
    rankings: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        object.__setattr__(
            self, "rankings", tuple(tuple(r) for r in self.rankings)
        )
        validate_trace(self)

    @property
    def rounds(self) -> int:
        return sum(1 for m in self.moves if m.source == AGENT)

    def with_move(self, move: Argument) -> "DialogueTrace":
        return replace(self, moves=(*self.moves, move))

    def with_ranking(self, ranking) -> "DialogueTrace":
        return replace(self, rankings=(*self.rankings, tuple(ranking)))

    def next_timestep(self) -> int:
        return self.moves[-1].timestep + 1 if self.moves else 1

    def to_payload(self) -> dict:
        moves = []
        for m in self.moves:
            entry = {
                "source": m.source,
                "timestep": m.timestep,
                "premises": [str(p) for p in m.sorted_premises()],
                "claim": str(m.claim),
            }
            if m.trust is not None:
                entry["trust"] = m.trust
            if m.certainty is not None:
                entry["certainty"] = m.certainty
            if m.cue is not None:
                entry["cue"] = m.cue
            moves.append(entry)
        return {
            "schema": SCHEMA_VERSION,
            "scenario": self.scenario.name,
            "moves": moves,
            "rankings": [list(r) for r in self.rankings],
        }

    @classmethod
    def from_payload(cls, payload: dict, scenario: Scenario) -> "DialogueTrace":
        _check_schema(payload)
        vocab = scenario.vocab
        moves = []
        try:
            for e in payload["moves"]:
                moves.append(
                    Argument(
                        premises=frozenset(
                            parse_formula(p, vocab) for p in e["premises"]
                        ),
                        claim=parse_formula(e["claim"], vocab),
                        source=e["source"],
                        timestep=int(e["timestep"]),
                        trust=e.get("trust"),
                        certainty=e.get("certainty"),
                        cue=e.get("cue"),
                    )
                )
        except (ArgusError, KeyError, ValueError, TypeError) as exc:
            raise MalformedTraceError(f"bad move entry: {exc}") from exc
        return cls(
            scenario=scenario,
            moves=tuple(moves),
            rankings=tuple(tuple(int(i) for i in r) for r in payload.get("rankings", [])),
        )


def _check_schema(payload: dict) -> None:
    version = payload.get("schema")
    if version != SCHEMA_VERSION:
        raise MalformedTraceError(
            f"unsupported schema version {version!r}; expected {SCHEMA_VERSION}"
        )


def validate_trace(trace: DialogueTrace) -> None:
    """Enforce ordering, alternation, round cap, and ranking shape.

    Human moves that fail the validity conditions are kept (external traces
    may be noisy) but produce a warning; the update only ever looks at the
    models consistent with premises plus claim.
    """
    s = trace.scenario
    last_t = 0
    last_source = None
    rounds = 0
    for m in trace.moves:
        if m.timestep <= last_t:
            raise MalformedTraceError(
                f"timesteps must strictly increase ({m.timestep} after {last_t})"
            )
        last_t = m.timestep
        if m.source == AGENT:
            if m.trust is None:
                raise MalformedTraceError(f"agent move at t={m.timestep} lacks trust")
            rounds += 1
        elif m.source == HUMAN:
            if m.certainty is None:
                raise MalformedTraceError(
                    f"human move at t={m.timestep} lacks certainty"
                )
            if last_source != AGENT:
                raise MalformedTraceError(
                    f"human move at t={m.timestep} does not answer an agent argument"
                )
            if not is_valid_argument(m, s.vocab):
                warnings.warn(
                    f"human counterargument at t={m.timestep} is not a valid "
                    "argument; keeping it as stated",
                    stacklevel=2,
                )
        else:
            raise MalformedTraceError(f"move at t={m.timestep} has no source")
        last_source = m.source
    if rounds > s.max_rounds:
        raise MalformedTraceError(
            f"{rounds} rounds exceed the scenario cap of {s.max_rounds}"
        )
    if len(trace.rankings) > rounds:
        raise MalformedTraceError("more rankings than rounds")
    expected = sorted(range(len(s.perspectives)))
    for i, r in enumerate(trace.rankings):
        if sorted(r) != expected:
            raise MalformedTraceError(
                f"ranking {i + 1} is not a permutation of {expected}"
            )


def replay_steps(
    trace: DialogueTrace, epsilon_floor: bool = False
) -> tuple[list[ModelDistribution], list[float]]:
    """Distributions (prior first) and the probability used at each move."""
    s = trace.scenario
    dists = [uniform_prior(s.vocab)]
    probs: list[float] = []
    params = s.params
    for m in trace.moves:
        try:
            d, p_used = apply_move(
                dists[-1], m, s.rule, params, epsilon_floor=epsilon_floor
            )
        except DegenerateUpdateError as exc:
            exc.timestep = m.timestep
            raise
        dists.append(d)
        probs.append(p_used)
    return dists, probs


def replay(trace: DialogueTrace, epsilon_floor: bool = False) -> list[ModelDistribution]:
    """Prior followed by the distribution after each move."""
    return replay_steps(trace, epsilon_floor=epsilon_floor)[0]


def select_agent_argument(
    d: ModelDistribution, s: Scenario, history: DialogueTrace | None = None
) -> Argument:
    """Pick the perspective-supporting argument with the largest shortfall.

    Candidates are the minimal supports from the agent's knowledge base for
    each perspective, in perspective-then-enumeration order. The agent
    fully believes its own knowledge base, so the shortfall of a candidate
    is one minus the mass currently on the models consistent with it.
    Arguments already used in the history are skipped.
    """
    used = set()
    if history is not None:
        used = {m.content for m in history.moves if m.source == AGENT}
    best = None
    best_shortfall = -1.0
    for perspective in s.perspectives:
        for candidate in minimal_supports(s.agent_kb, perspective, s.vocab):
            if candidate.content in used:
                continue
            shortfall = 1.0 - d.mass_of_mask(argument_mask(candidate, s.vocab))
            if shortfall > best_shortfall + 1e-12:
                best = candidate
                best_shortfall = shortfall
    if best is None:
        raise NoArgumentAvailableError("the agent has no unused valid argument left")
    return best


def simulated_human_respond(
    ground_truth: Model,
    incoming: Argument,
    pool: tuple[PoolEntry, ...],
    trust_levels: tuple[tuple[str, float], ...] = DEFAULT_TRUST_LEVELS,
) -> tuple[float, Argument | None]:
    """Test double for a participant with a definite world in mind.

    Reports the highest configured trust when the incoming argument holds
    in the ground-truth model and the lowest otherwise, and answers with
    the first pool counterargument whose premises all hold there.
    """
    taus = [tau for _, tau in trust_levels]
    tau = max(taus) if model_entails_argument(ground_truth, incoming) else min(taus)
    for entry in pool:
        if all(evaluate(ground_truth, p) for p in entry.argument.premises):
            counter = replace(
                entry.argument,
                certainty=entry.certainty,
                cue=entry.cue,
            )
            return tau, counter
    return tau, None


def simulate_dialogue(
    scenario: Scenario,
    ground_truth: Model,
    rounds: int | None = None,
) -> DialogueTrace:
    """Run a closed-loop dialogue against the simulated human.

    Rankings are the ground-truth ones: perspectives true in the model
    first, ties by index. Ends early when the agent runs out of arguments.
    """
    rounds = scenario.max_rounds if rounds is None else rounds
    trace = DialogueTrace(scenario=scenario)
    d = uniform_prior(scenario.vocab)
    params = scenario.params
    truth_ranking = sorted(
        range(len(scenario.perspectives)),
        key=lambda i: (not evaluate(ground_truth, scenario.perspectives[i]), i),
    )
    for _ in range(min(rounds, scenario.max_rounds)):
        try:
            proposal = select_agent_argument(d, scenario, trace)
        except NoArgumentAvailableError:
            break
        tau, counter = simulated_human_respond(
            ground_truth, proposal, scenario.human_pool, scenario.trust_levels
        )
        move = proposal.as_agent_move(trust=tau, timestep=trace.next_timestep())
        trace = trace.with_move(move)
        d, _ = apply_move(d, move, scenario.rule, params)
        if counter is not None:
            counter = replace(counter, source=HUMAN, timestep=trace.next_timestep())
            trace = trace.with_move(counter)
            d, _ = apply_move(d, counter, scenario.rule, params)
        trace = trace.with_ranking(truth_ranking)
    return trace


def framework_rankings(
    trace: DialogueTrace, epsilon_floor: bool = False
) -> list[tuple[int, ...]]:
    """The framework's per-round perspective rankings along the trace.

    A round's ranking reflects the distribution after the last move of
    that round (the counterargument when present, the agent argument
    otherwise), mirroring when the human reports theirs.
    """
    s = trace.scenario
    d = uniform_prior(s.vocab)
    params = s.params
    out: list[tuple[int, ...]] = []
    pending = False  # a round is open and unranked
    for m in trace.moves:
        if m.source == AGENT and pending:
            out.append(tuple(rank_perspectives(d, s.perspectives)))
            pending = False
        try:
            d, _ = apply_move(d, m, s.rule, params, epsilon_floor=epsilon_floor)
        except DegenerateUpdateError as exc:
            exc.timestep = m.timestep
            raise
        pending = True
    if pending:
        out.append(tuple(rank_perspectives(d, s.perspectives)))
    return out


def canonical_json(payload: dict) -> str:
    """Stable serialization: sorted keys, two-space indent, newline at end."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def demo_scenario() -> Scenario:
    """Built-in scenario: is the release stable and fast?

    The agent holds a redundant knowledge base so it can back the same
    picture with fresh reasons across rounds; the pool offers one
    counterargument per certainty level.
    """
    vocab = Vocabulary(("stable", "fast"))

    def f(text: str) -> Formula:
        return parse_formula(text, vocab)

    pool = (
        PoolEntry(Argument(frozenset([f("!stable")]), f("!stable")), 0.9, "I am certain that"),
        PoolEntry(Argument(frozenset([f("!fast")]), f("!fast")), 0.7, "It seems probable that"),
        PoolEntry(
            Argument(frozenset([f("!stable | !fast")]), f("!stable | !fast")),
            0.5,
            "It could be the case that",
        ),
        PoolEntry(
            Argument(frozenset([f("fast -> !stable")]), f("fast -> !stable")),
            0.3,
            "It's questionable whether",
        ),
        PoolEntry(
            Argument(frozenset([f("!stable"), f("!fast")]), f("!stable & !fast")),
            0.1,
            "It's hard to say for sure",
        ),
    )
    return Scenario(
        vocab=vocab,
        agent_kb=frozenset(
            [f("stable"), f("fast"), f("stable -> fast"), f("stable | fast -> stable & fast")]
        ),
        human_pool=pool,
        perspectives=(
            f("stable & fast"),
            f("stable & !fast"),
            f("!stable & fast"),
            f("!stable & !fast"),
        ),
        gamma=0.7,
        rule=UpdateRule(weighting="prospect", distribution_update="bayesian"),
        max_rounds=3,
        name="demo",
    )


def final_beliefs(trace: DialogueTrace) -> list[float]:
    d = replay(trace)[-1]
    return [degree_of_belief(d, p) for p in trace.scenario.perspectives]
