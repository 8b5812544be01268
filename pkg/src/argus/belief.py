"""Probability distributions over models and the two update rules.

The agent's picture of the human is a distribution over all candidate
models. Each dialogue move carries a probability for its argument; the
Bayesian rule splits the mass between the models consistent with the
argument (which share p in proportion to their priors) and the rest (which
share 1 - p). The baseline rule instead assigns p to every consistent
model outright and renormalizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .arguments import AGENT, HUMAN, Argument, argument_mask
from .errors import DegenerateUpdateError, DomainError
from .logic import Formula, Vocabulary, satisfying_mask
from .weighting import WeightingParams, probability_of_trust

NORMALIZATION_TOL = 1e-9
EPSILON_FLOOR = 1e-9

PROSPECT = "prospect"
IDENTITY = "identity"
BAYESIAN = "bayesian"
RENORMALIZE = "renormalize"


@dataclass(frozen=True)
class ModelDistribution:
    """Normalized probability over model ids, in ascending id order."""

    vocab: Vocabulary
    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.shape != (self.vocab.model_count,):
            raise DomainError(
                f"expected {self.vocab.model_count} probabilities, got {arr.shape}"
            )
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("probabilities must lie in [0, 1]")
        if abs(float(arr.sum()) - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"probabilities sum to {arr.sum()}, not 1")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    def probability(self, model_id: int) -> float:
        return float(self.probs[model_id])

    def mass_of_mask(self, mask: np.ndarray) -> float:
        return float(self.probs[mask].sum())

    def argmax_ids(self, tol: float = 1e-12) -> list[int]:
        """Ids of all models within tol of the maximum probability."""
        top = float(self.probs.max())
        return [i for i in range(len(self.probs)) if self.probs[i] >= top - tol]

    def to_payload(self) -> dict:
        return {"vocab": list(self.vocab.atoms), "probs": [float(p) for p in self.probs]}

    @classmethod
    def from_payload(cls, payload: dict) -> "ModelDistribution":
        vocab = Vocabulary(tuple(payload["vocab"]))
        return cls(vocab=vocab, probs=np.asarray(payload["probs"], dtype=np.float64))


@dataclass(frozen=True)
class UpdateRule:
    """A cell of the method matrix: weighting scheme x distribution update."""

    weighting: str
    distribution_update: str

    def __post_init__(self):
        if self.weighting not in (PROSPECT, IDENTITY):
            raise DomainError(f"unknown weighting {self.weighting!r}")
        if self.distribution_update not in (BAYESIAN, RENORMALIZE):
            raise DomainError(f"unknown distribution update {self.distribution_update!r}")

    @property
    def name(self) -> str:
        return _RULE_NAMES[(self.weighting, self.distribution_update)]

    @classmethod
    def from_name(cls, name: str) -> "UpdateRule":
        try:
            weighting, update = _RULES_BY_NAME[name.lower()]
        except KeyError:
            raise DomainError(
                f"unknown rule {name!r}; expected one of {sorted(_RULES_BY_NAME)}"
            ) from None
        return cls(weighting=weighting, distribution_update=update)


_RULE_NAMES = {
    (IDENTITY, RENORMALIZE): "baseline1",
    (IDENTITY, BAYESIAN): "baseline2",
    (PROSPECT, RENORMALIZE): "baseline3",
    (PROSPECT, BAYESIAN): "proposed",
}
_RULES_BY_NAME = {name: combo for combo, name in _RULE_NAMES.items()}

BASELINE_1 = UpdateRule(IDENTITY, RENORMALIZE)
BASELINE_2 = UpdateRule(IDENTITY, BAYESIAN)
BASELINE_3 = UpdateRule(PROSPECT, RENORMALIZE)
PROPOSED = UpdateRule(PROSPECT, BAYESIAN)


def uniform_prior(vocab: Vocabulary) -> ModelDistribution:
    """Agnostic starting point: every model equally likely."""
    n = vocab.model_count
    return ModelDistribution(vocab=vocab, probs=np.full(n, 1.0 / n))


def degree_of_belief(d: ModelDistribution, f: Formula) -> float:
    """Total mass of the models satisfying the formula."""
    return d.mass_of_mask(satisfying_mask(f, d.vocab))


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"argument probability must lie in [0, 1], got {p}")


def _floored(probs: np.ndarray) -> np.ndarray:
    floored = np.maximum(probs, EPSILON_FLOOR)
    return floored / floored.sum()


def bayesian_update(
    d: ModelDistribution,
    a: Argument,
    p: float,
    epsilon_floor: bool = False,
) -> ModelDistribution:
    """Split mass p over the argument's models, 1 - p over the rest.

    Each side shares its mass in proportion to the priors, so relative
    order within a side is preserved. A side that must receive positive
    mass but has zero prior mass makes the update degenerate; the optional
    epsilon floor lifts zero priors to a tiny positive value first, which
    rescues sides that are structurally non-empty.
    """
    _check_probability(p)
    mask = argument_mask(a, d.vocab)
    probs = _floored(d.probs) if epsilon_floor else np.asarray(d.probs)
    mass_c = float(probs[mask].sum())
    mass_i = float(probs[~mask].sum())
    if p > 0.0 and mass_c == 0.0:
        raise DegenerateUpdateError(
            f"update needs probability {p} on models of {a}, but they hold zero prior mass"
        )
    if p < 1.0 and mass_i == 0.0:
        raise DegenerateUpdateError(
            f"update needs probability {1.0 - p} off models of {a}, "
            "but the complement holds zero prior mass"
        )
    new = np.zeros_like(probs)
    if p > 0.0:
        new[mask] = probs[mask] * (p / mass_c)
    if p < 1.0:
        new[~mask] = probs[~mask] * ((1.0 - p) / mass_i)
    return ModelDistribution(vocab=d.vocab, probs=new / new.sum())


def baseline_update(
    d: ModelDistribution,
    a: Argument,
    p: float,
    epsilon_floor: bool = False,
) -> ModelDistribution:
    """Assign p to every consistent model, keep priors elsewhere, normalize."""
    _check_probability(p)
    mask = argument_mask(a, d.vocab)
    probs = _floored(d.probs) if epsilon_floor else np.asarray(d.probs)
    z = float(mask.sum()) * p + float(probs[~mask].sum())
    if z == 0.0:
        raise DegenerateUpdateError(
            f"normalization constant is zero updating on {a} with probability {p}"
        )
    new = np.where(mask, p, probs) / z
    return ModelDistribution(vocab=d.vocab, probs=new / new.sum())


def apply_move(
    d: ModelDistribution,
    a: Argument,
    rule: UpdateRule,
    params: WeightingParams,
    epsilon_floor: bool = False,
) -> tuple[ModelDistribution, float]:
    """Turn a move's annotation into a probability and apply the update.

    Agent moves state a trust level: under prospect weighting it is read
    as the human's weighted impression and inverted back to a probability;
    under identity weighting it is used as-is. Human moves state their
    certainty directly, which is used verbatim under both weightings.
    """
    if a.source == AGENT:
        if a.trust is None:
            raise DomainError("agent move is missing its trust annotation")
        if rule.weighting == PROSPECT:
            p_used = probability_of_trust(
                a.trust, params.gamma, params.tolerance, params.max_iterations
            )
        else:
            p_used = a.trust
    elif a.source == HUMAN:
        if a.certainty is None:
            raise DomainError("human move is missing its certainty annotation")
        p_used = a.certainty
    else:
        raise DomainError(f"move has no source: {a}")
    update = bayesian_update if rule.distribution_update == BAYESIAN else baseline_update
    return update(d, a, p_used, epsilon_floor=epsilon_floor), p_used


def rank_perspectives(
    d: ModelDistribution, perspectives: Sequence[Formula]
) -> list[int]:
    """Perspective indices from most to least believed, ties by index."""
    if not perspectives:
        raise DomainError("perspectives must be non-empty")
    beliefs = [degree_of_belief(d, f) for f in perspectives]
    return sorted(range(len(perspectives)), key=lambda i: (-beliefs[i], i))


def perspective_beliefs(
    d: ModelDistribution, perspectives: Iterable[Formula]
) -> list[float]:
    return [degree_of_belief(d, f) for f in perspectives]
