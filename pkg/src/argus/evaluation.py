"""Evaluation metrics and gamma personalization.

Rankings throughout are orderings: perspective indices from most to least
likely, as produced by rank_perspectives and as reported by participants.
They are converted to rank vectors (rank 1 = most likely) before any
correlation arithmetic.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.special import betainc

from .arguments import Argument
from .belief import UpdateRule
from .dialogue import DialogueTrace, Scenario, framework_rankings
from .logic import Vocabulary
from .errors import (
    ArgusError,
    DegenerateInputError,
    DomainError,
    InsufficientRoundsError,
    LengthMismatchError,
)
from .weighting import MIN_INVERTIBLE_GAMMA

DEFAULT_GAMMA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))

TWO_SIDED = "two_sided"
GREATER = "greater"

UPPER_BOUND = "upper_bound"
PERSONALIZATION_1 = "personalization_1"
PERSONALIZATION_2 = "personalization_2"

HISTOGRAM_EDGES = tuple(-1.0 + 0.25 * k for k in range(9))


@dataclass(frozen=True)
class RoundRecord:
    """One participant-round: reported trust and reported ranking."""

    participant_id: str
    round: int
    trust: float
    human_ranking: tuple[int, ...]
    framework_ranking: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "human_ranking", tuple(self.human_ranking))
        if self.framework_ranking is not None:
            object.__setattr__(
                self, "framework_ranking", tuple(self.framework_ranking)
            )
        if self.round < 1:
            raise DomainError("round indices start at 1")
        if not 0.0 <= self.trust <= 1.0:
            raise DomainError(f"trust must lie in [0, 1], got {self.trust}")


@dataclass(frozen=True)
class GammaFit:
    """Fitted gamma for one participant, with the rounds that produced it."""

    participant_id: str
    gamma: float
    fit_rounds: tuple[int, ...]
    eval_rounds: tuple[int, ...]
    fit_rho: float
    eval_rho: float


def ordering_to_ranks(ordering) -> list[float]:
    """Rank vector from an ordering: the k-th listed item gets rank k+1."""
    ranks = [0.0] * len(ordering)
    for position, index in enumerate(ordering):
        ranks[index] = float(position + 1)
    return ranks


def _average_ranks(values) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j) / 2.0 + 1.0  # average of 1-based positions i..j
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def spearman_rho(r1, r2) -> float:
    """Pearson correlation of average ranks; exact under ties."""
    x, y = list(r1), list(r2)
    if len(x) != len(y):
        raise LengthMismatchError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise LengthMismatchError("need at least two items to correlate")
    rx, ry = _average_ranks(x), _average_ranks(y)
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    dx = [r - mx for r in rx]
    dy = [r - my for r in ry]
    sx = math.sqrt(sum(d * d for d in dx))
    sy = math.sqrt(sum(d * d for d in dy))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("all ranks tied; correlation undefined")
    return sum(a * b for a, b in zip(dx, dy)) / (sx * sy)


def ordering_rho(o1, o2) -> float:
    """Spearman rho between two orderings of the same index set."""
    return spearman_rho(ordering_to_ranks(o1), ordering_to_ranks(o2))


def _t_sf(t: float, df: int) -> float:
    # survival function of Student's t via the regularized incomplete beta
    x = df / (df + t * t)
    half_two_sided = 0.5 * float(betainc(df / 2.0, 0.5, x))
    return half_two_sided if t >= 0.0 else 1.0 - half_two_sided


def paired_t_test(before, after, alternative: str = TWO_SIDED) -> tuple[float, float]:
    """Paired Student's t-test on after - before.

    Returns (t, p). two_sided doubles the tail; greater tests whether the
    after scores exceed the before scores.
    """
    b, a = list(before), list(after)
    if len(b) != len(a):
        raise LengthMismatchError(f"length mismatch: {len(b)} vs {len(a)}")
    n = len(b)
    if n < 2:
        raise LengthMismatchError("need at least two pairs")
    if alternative not in (TWO_SIDED, GREATER):
        raise DomainError(f"unknown alternative {alternative!r}")
    d = [ai - bi for bi, ai in zip(b, a)]
    mean = sum(d) / n
    var = sum((di - mean) ** 2 for di in d) / (n - 1)
    if var == 0.0:
        # identical samples are a well-defined no-change result; identical
        # nonzero differences would make t infinite
        if mean == 0.0:
            return 0.0, 1.0 if alternative == TWO_SIDED else 0.5
        raise DegenerateInputError("differences have zero variance")
    t = mean / math.sqrt(var / n)
    df = n - 1
    if alternative == TWO_SIDED:
        p = min(1.0, 2.0 * _t_sf(abs(t), df))
    else:
        p = _t_sf(t, df)
    return t, p


def _effective_grid(grid) -> list[float]:
    kept = sorted({g for g in grid if g >= MIN_INVERTIBLE_GAMMA})
    if not kept:
        raise DomainError(
            f"no grid entry is >= {MIN_INVERTIBLE_GAMMA}; nothing to fit"
        )
    return kept


def _rounds_of(trace: DialogueTrace) -> int:
    return trace.rounds


def variant_round_split(variant: str, available: int) -> tuple[list[int], list[int]]:
    if variant == UPPER_BOUND:
        if available < 1:
            raise InsufficientRoundsError("trace has no rounds")
        rounds = list(range(1, available + 1))
        return rounds, rounds
    if variant == PERSONALIZATION_1:
        if available < 2:
            raise InsufficientRoundsError(
                "personalization_1 needs at least two rounds"
            )
        if available == 2:
            return [1], [2]
        return [1, 2], [3]
    if variant == PERSONALIZATION_2:
        if available < 3:
            raise InsufficientRoundsError(
                "personalization_2 needs at least three rounds"
            )
        return [1], [2, 3]
    raise DomainError(f"unknown variant {variant!r}")


def _mean_rho(
    candidate_rankings: list[tuple[int, ...]],
    human_by_round: dict[int, tuple[int, ...]],
    rounds: list[int],
) -> float:
    rhos = []
    for r in rounds:
        if r > len(candidate_rankings) or r not in human_by_round:
            raise InsufficientRoundsError(f"round {r} missing from trace or records")
        rhos.append(ordering_rho(candidate_rankings[r - 1], human_by_round[r]))
    return sum(rhos) / len(rhos)


def fit_gamma(
    records: list[RoundRecord],
    traces: dict[str, DialogueTrace],
    variant: str = UPPER_BOUND,
    grid=DEFAULT_GAMMA_GRID,
) -> list[GammaFit]:
    """Pick, per participant, the grid gamma whose replay best matches them.

    The trace is replayed under every candidate gamma; the candidate with
    the highest mean Spearman rho over the fit rounds wins, ties going to
    the smaller gamma. Rho on the held-out evaluation rounds is reported
    alongside. Variants differ only in how rounds are split.
    """
    grid = _effective_grid(grid)
    by_participant: dict[str, dict[int, tuple[int, ...]]] = {}
    for rec in records:
        by_participant.setdefault(rec.participant_id, {})[rec.round] = rec.human_ranking
    fits = []
    for pid in sorted(traces):
        if pid not in by_participant:
            raise InsufficientRoundsError(f"no records for participant {pid!r}")
        trace = traces[pid]
        human = by_participant[pid]
        available = min(_rounds_of(trace), max(human) if human else 0)
        fit_rounds, eval_rounds = variant_round_split(variant, available)
        best_gamma = None
        best_mean = -math.inf
        best_rankings = None
        for g in grid:
            scen = replace(trace.scenario, gamma=g)
            candidate = replace(trace, scenario=scen)
            rankings = framework_rankings(candidate)
            mean = _mean_rho(rankings, human, fit_rounds)
            if mean > best_mean + 1e-12:
                best_gamma, best_mean, best_rankings = g, mean, rankings
        fits.append(
            GammaFit(
                participant_id=pid,
                gamma=best_gamma,
                fit_rounds=tuple(fit_rounds),
                eval_rounds=tuple(eval_rounds),
                fit_rho=best_mean,
                eval_rho=_mean_rho(best_rankings, human, eval_rounds),
            )
        )
    return fits


def evaluate_methods(
    records: list[RoundRecord],
    traces: dict[str, DialogueTrace],
    methods: list[UpdateRule],
    gamma: float,
) -> dict[str, dict]:
    """Replay every trace under each method and summarize the rho values.

    Returns, per method name: the per-round rho list, an 8-bin histogram
    over [-1, 1], the fraction of rho in [0.75, 1], and the participants
    whose replay failed (skipped, not fatal).
    """
    if not traces:
        raise DomainError("no traces to evaluate")
    by_participant: dict[str, dict[int, tuple[int, ...]]] = {}
    for rec in records:
        by_participant.setdefault(rec.participant_id, {})[rec.round] = rec.human_ranking
    out: dict[str, dict] = {}
    for method in methods:
        rhos: list[float] = []
        failed: list[str] = []
        for pid in sorted(traces):
            trace = traces[pid]
            human = by_participant.get(pid, {})
            scen = replace(trace.scenario, rule=method, gamma=gamma)
            try:
                rankings = framework_rankings(replace(trace, scenario=scen))
                for r, human_ranking in sorted(human.items()):
                    if r <= len(rankings):
                        rhos.append(ordering_rho(rankings[r - 1], human_ranking))
            except ArgusError as exc:
                failed.append(f"{pid}: {exc}")
        hist, _ = np.histogram(rhos, bins=np.asarray(HISTOGRAM_EDGES))
        out[method.name] = {
            "rhos": rhos,
            "histogram": hist.tolist(),
            "bin_edges": list(HISTOGRAM_EDGES),
            "fraction_high": (
                sum(1 for r in rhos if r >= 0.75) / len(rhos) if rhos else 0.0
            ),
            "count": len(rhos),
            "failed": failed,
        }
    return out


def trust_round_comparison(
    records: list[RoundRecord],
    round_a: int,
    round_b: int,
    alternative: str = TWO_SIDED,
) -> tuple[float, float, int]:
    """Paired t-test of trust in round_b vs round_a over shared participants."""
    by_participant: dict[str, dict[int, float]] = {}
    for rec in records:
        by_participant.setdefault(rec.participant_id, {})[rec.round] = rec.trust
    before, after = [], []
    for pid in sorted(by_participant):
        scores = by_participant[pid]
        if round_a in scores and round_b in scores:
            before.append(scores[round_a])
            after.append(scores[round_b])
    t, p = paired_t_test(before, after, alternative)
    return t, p, len(before)


def save_records_csv(records: list[RoundRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["participant_id", "round", "trust", "human_ranking"])
        for rec in records:
            writer.writerow(
                [
                    rec.participant_id,
                    rec.round,
                    rec.trust,
                    ",".join(str(i) for i in rec.human_ranking),
                ]
            )


def load_records_csv(path) -> list[RoundRecord]:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                RoundRecord(
                    participant_id=row["participant_id"],
                    round=int(row["round"]),
                    trust=float(row["trust"]),
                    human_ranking=tuple(
                        int(i) for i in row["human_ranking"].split(",")
                    ),
                )
            )
    return records


def load_trace_dir(path, scenario: Scenario) -> dict[str, DialogueTrace]:
    """Traces from a directory of <participant_id>.json files."""
    import json

    traces = {}
    for file in sorted(Path(path).glob("*.json")):
        with open(file) as fh:
            payload = json.load(fh)
        traces[file.stem] = DialogueTrace.from_payload(payload, scenario)
    return traces


def synthetic_scenario(
    n_atoms: int = 3,
    max_rounds: int = 16,
    rule: UpdateRule | None = None,
    gamma: float = 0.7,
) -> Scenario:
    """A scenario for synthetic cohorts: perspectives are all the models.

    Every full conjunction of literals is a perspective, so a participant's
    ranking exposes the complete ordering of their model probabilities,
    which is what makes gamma recoverable from rankings alone.
    """
    from .belief import PROPOSED
    from .dialogue import CERTAINTY_LABELS, CERTAINTY_LEVELS, PoolEntry
    from .logic import And, Atom, Not

    names = tuple("abcdefgh"[:n_atoms])
    vocab = Vocabulary(names)
    perspectives = []
    for model_id in range(vocab.model_count):
        literals = [
            Atom(name) if (model_id >> k) & 1 else Not(Atom(name))
            for k, name in enumerate(names)
        ]
        f = literals[0]
        for lit in literals[1:]:
            f = And(f, lit)
        perspectives.append(f)
    pool = []
    for k, name in enumerate(names):
        for lit in (Atom(name), Not(Atom(name))):
            certainty = CERTAINTY_LEVELS[len(pool) % len(CERTAINTY_LEVELS)]
            pool.append(
                PoolEntry(
                    argument=Argument(premises=frozenset([lit]), claim=lit),
                    certainty=certainty,
                    cue=CERTAINTY_LABELS[certainty],
                )
            )
    return Scenario(
        vocab=vocab,
        agent_kb=frozenset(Atom(name) for name in names),
        human_pool=tuple(pool),
        perspectives=tuple(perspectives),
        gamma=gamma,
        rule=PROPOSED if rule is None else rule,
        max_rounds=max_rounds,
        name=f"synthetic-{n_atoms}",
    )


def synthesize_cohort(
    scenario: Scenario,
    gamma_true: float,
    participants: int,
    seed: int,
    rounds: int | None = None,
    counter_probability: float = 0.5,
) -> tuple[list[RoundRecord], dict[str, DialogueTrace]]:
    """Forward-model a cohort of noise-free participants.

    Each participant keeps an internal distribution updated with the
    scenario's rule at gamma_true and reports, every round, a random trust
    level for a randomly chosen literal argument from the agent plus the
    exact perspective ranking implied by their internal beliefs. Replaying
    the trace at the true gamma therefore reproduces their rankings
    exactly.
    """
    from .arguments import HUMAN
    from .belief import apply_move, rank_perspectives, uniform_prior
    from .logic import Atom, Not
    from .weighting import WeightingParams

    rng = np.random.default_rng(seed)
    rounds = scenario.max_rounds if rounds is None else rounds
    if rounds > scenario.max_rounds:
        raise DomainError("rounds exceed the scenario's max_rounds")
    candidates = []
    for name in scenario.vocab.atoms:
        for lit in (Atom(name), Not(Atom(name))):
            candidates.append(Argument(premises=frozenset([lit]), claim=lit))
    taus = [tau for _, tau in scenario.trust_levels]
    params = WeightingParams(gamma=gamma_true)
    records: list[RoundRecord] = []
    traces: dict[str, DialogueTrace] = {}
    for i in range(participants):
        pid = f"p{i:04d}"
        trace = DialogueTrace(scenario=scenario)
        d = uniform_prior(scenario.vocab)
        for r in range(1, rounds + 1):
            arg = candidates[int(rng.integers(len(candidates)))]
            tau = float(taus[int(rng.integers(len(taus)))])
            move = arg.as_agent_move(trust=tau, timestep=trace.next_timestep())
            trace = trace.with_move(move)
            d, _ = apply_move(d, move, scenario.rule, params)
            if scenario.human_pool and rng.random() < counter_probability:
                entry = scenario.human_pool[int(rng.integers(len(scenario.human_pool)))]
                counter = replace(
                    entry.argument,
                    source=HUMAN,
                    certainty=entry.certainty,
                    cue=entry.cue,
                    timestep=trace.next_timestep(),
                )
                trace = trace.with_move(counter)
                d, _ = apply_move(d, counter, scenario.rule, params)
            ranking = tuple(rank_perspectives(d, scenario.perspectives))
            trace = trace.with_ranking(ranking)
            records.append(
                RoundRecord(
                    participant_id=pid,
                    round=r,
                    trust=tau,
                    human_ranking=ranking,
                )
            )
        traces[pid] = trace
    return records, traces
