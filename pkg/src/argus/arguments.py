"""Logical arguments: a consistent, minimal premise set entailing a claim.

An argument is valid when (i) its premises are in the language, (ii) they
entail the claim, (iii) they are jointly consistent, and (iv) no proper
subset of them entails the claim. Two arguments attack each other exactly
when their premise sets are jointly inconsistent, so counterargument is
symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .errors import PremiseSetTooLargeError
from .logic import Formula, Model, Vocabulary, conjunction_mask, entails, consistent, evaluate

DEFAULT_PREMISE_CAP = 12

AGENT = "agent"
HUMAN = "human"


@dataclass(frozen=True)
class Argument:
    """Premises and claim, with optional dialogue provenance.

    Agent moves carry a trust annotation, human moves a certainty annotation;
    a bare (premises, claim) pair with neither is a template, e.g. an entry
    of a counterargument pool or the output of minimal_supports.
    """

    premises: frozenset[Formula]
    claim: Formula
    source: str | None = None
    timestep: int = 0
    trust: float | None = None
    certainty: float | None = None
    cue: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "premises", frozenset(self.premises))
        if self.source not in (None, AGENT, HUMAN):
            raise ValueError(f"unknown source {self.source!r}")
        if self.trust is not None and self.certainty is not None:
            raise ValueError("an argument carries trust or certainty, not both")
        if self.trust is not None and self.source == HUMAN:
            raise ValueError("human arguments carry certainty, not trust")
        if self.certainty is not None and self.source == AGENT:
            raise ValueError("agent arguments carry trust, not certainty")
        for p, name in ((self.trust, "trust"), (self.certainty, "certainty")):
            if p is not None and not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.timestep < 0:
            raise ValueError("timestep must be non-negative")

    @property
    def content(self) -> tuple[frozenset[Formula], Formula]:
        """Logical identity, ignoring provenance and annotations."""
        return (self.premises, self.claim)

    @property
    def annotation(self) -> float | None:
        return self.trust if self.trust is not None else self.certainty

    def sorted_premises(self) -> tuple[Formula, ...]:
        return tuple(sorted(self.premises, key=str))

    def as_agent_move(self, trust: float, timestep: int) -> "Argument":
        return replace(self, source=AGENT, trust=trust, certainty=None, timestep=timestep)

    def as_human_move(self, certainty: float, timestep: int) -> "Argument":
        return replace(self, source=HUMAN, certainty=certainty, trust=None, timestep=timestep)

    def __str__(self) -> str:
        prem = ", ".join(str(p) for p in self.sorted_premises())
        return f"<{{{prem}}}, {self.claim}>"


def _check_cap(size: int, cap: int) -> None:
    if size > cap:
        raise PremiseSetTooLargeError(f"{size} premises exceeds the cap of {cap}")


def is_valid_argument(
    a: Argument, vocab: Vocabulary, premise_cap: int = DEFAULT_PREMISE_CAP
) -> bool:
    """Check the four validity conditions, including premise minimality.

    An empty premise set is valid only for a tautological claim. Minimality
    only needs the size-(n-1) subsets: entailment is monotone in the premise
    set, so a smaller entailing subset implies an entailing co-atom.
    """
    premises = a.sorted_premises()
    _check_cap(len(premises), premise_cap)
    if not consistent(premises, vocab):
        return False
    if not entails(premises, a.claim, vocab):
        return False
    for sub in combinations(premises, len(premises) - 1) if premises else ():
        if entails(sub, a.claim, vocab):
            return False
    return True


def is_counterargument(attacker: Argument, target: Argument, vocab: Vocabulary) -> bool:
    """True when the two premise sets are jointly inconsistent."""
    return not consistent(attacker.premises | target.premises, vocab)


def minimal_supports(
    kb,
    claim: Formula,
    vocab: Vocabulary,
    limit: int | None = None,
    premise_cap: int = DEFAULT_PREMISE_CAP,
) -> list[Argument]:
    """All valid arguments for the claim with premises drawn from the kb.

    Enumerates subsets in (size, lexicographic premise order) so results are
    deterministic. A tautological claim yields the single empty-premise
    argument.
    """
    kb = sorted(set(kb), key=str)
    _check_cap(len(kb), premise_cap)
    found: list[Argument] = []
    entailing: list[frozenset[Formula]] = []
    for size in range(len(kb) + 1):
        for subset in combinations(kb, size):
            sset = frozenset(subset)
            if any(prev < sset for prev in entailing):
                continue  # a proper subset already entails: not minimal
            if not entails(subset, claim, vocab):
                continue
            entailing.append(sset)
            if consistent(subset, vocab):
                found.append(Argument(premises=sset, claim=claim))
                if limit is not None and len(found) >= limit:
                    return found
    return found


def model_entails_argument(m: Model, a: Argument, vocab: Vocabulary | None = None) -> bool:
    """True when every premise and the claim hold in the model."""
    return all(evaluate(m, f) for f in (*a.premises, a.claim))


def argument_mask(a: Argument, vocab: Vocabulary) -> np.ndarray:
    """Mask over model ids of the models consistent with the argument."""
    return conjunction_mask((*a.premises, a.claim), vocab)
