"""Estimator-style wrapper around replay and gamma personalization.

HumanModelEstimator fits one interlocutor: fit() consumes a dialogue trace
(optionally selecting gamma from the trace's recorded rankings),
partial_fit() folds in additional moves, predict() ranks perspective
formulas, and score() is the Spearman correlation against a reported
ranking. Parameters follow the usual get_params/set_params contract so the
estimator clones cleanly.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .belief import UpdateRule, apply_move, degree_of_belief
from .dialogue import DialogueTrace, Scenario, replay
from .errors import DomainError
from .evaluation import (
    DEFAULT_GAMMA_GRID,
    RoundRecord,
    UPPER_BOUND,
    fit_gamma,
    ordering_to_ranks,
    spearman_rho,
)
from .logic import Formula
from .weighting import WeightingParams


class HumanModelEstimator(BaseEstimator):
    """Maintains a model distribution for one human across a dialogue.

    Parameters mirror a scenario's update configuration; gamma=None defers
    to the scenario carried by the fitted trace, and grid (when set) turns
    fit() into per-participant gamma selection over that grid.
    """

    def __init__(
        self,
        gamma: float | None = None,
        rule: str = "proposed",
        grid: tuple | None = None,
    ):
        self.gamma = gamma
        self.rule = rule
        self.grid = grid

    def _resolved_rule(self) -> UpdateRule:
        return UpdateRule.from_name(self.rule)

    def fit(self, X, y=None):
        """Fit from a DialogueTrace (or a one-element list of them)."""
        trace = X[0] if isinstance(X, (list, tuple)) else X
        if not isinstance(trace, DialogueTrace):
            raise DomainError("fit expects a DialogueTrace")
        scenario = trace.scenario
        gamma = self.gamma if self.gamma is not None else scenario.gamma
        if self.grid is not None:
            if not trace.rankings:
                raise DomainError("gamma selection needs recorded rankings")
            records = [
                RoundRecord(
                    participant_id="self",
                    round=r + 1,
                    trust=0.5,
                    human_ranking=ranking,
                )
                for r, ranking in enumerate(trace.rankings)
            ]
            fits = fit_gamma(
                records,
                {"self": trace},
                variant=UPPER_BOUND,
                grid=self.grid or DEFAULT_GAMMA_GRID,
            )
            gamma = fits[0].gamma
        from dataclasses import replace as dc_replace

        scenario = dc_replace(scenario, gamma=gamma, rule=self._resolved_rule())
        trace = dc_replace(trace, scenario=scenario)
        self.scenario_ = scenario
        self.gamma_ = gamma
        self.trace_ = trace
        self.distribution_ = replay(trace)[-1]
        self.n_moves_ = len(trace.moves)
        return self

    def partial_fit(self, X, y=None):
        """Apply further moves on top of the current state.

        X is an iterable of annotated Argument moves; the first call must
        be preceded by fit(), which establishes the scenario.
        """
        self._check_fitted()
        d = self.distribution_
        trace = self.trace_
        params = WeightingParams(gamma=self.gamma_)
        for move in X:
            trace = trace.with_move(move)
            d, _ = apply_move(d, move, self.scenario_.rule, params)
        self.trace_ = trace
        self.distribution_ = d
        self.n_moves_ = len(trace.moves)
        return self

    def predict(self, X) -> np.ndarray:
        """Rank vector over perspective formulas (1 = most believed)."""
        self._check_fitted()
        beliefs = self.predict_proba(X)
        order = sorted(range(len(beliefs)), key=lambda i: (-beliefs[i], i))
        ranks = np.empty(len(beliefs))
        for position, index in enumerate(order):
            ranks[index] = position + 1
        return ranks

    def predict_proba(self, X) -> np.ndarray:
        """Degree of belief for each perspective formula."""
        self._check_fitted()
        for f in X:
            if not isinstance(f, Formula):
                raise DomainError("predict expects Formula perspectives")
        return np.array([degree_of_belief(self.distribution_, f) for f in X])

    def score(self, X, y) -> float:
        """Spearman rho between predicted ranks and a reported ranking.

        y may be a rank vector or an ordering of indices; orderings are
        recognized as permutations of 0..n-1 and converted.
        """
        self._check_fitted()
        predicted = self.predict(X)
        y = list(y)
        if sorted(y) == list(range(len(y))):
            y = ordering_to_ranks(y)
        return spearman_rho(predicted, y)

    def _check_fitted(self):
        if not hasattr(self, "distribution_"):
            raise DomainError("estimator is not fitted yet; call fit first")


def prior_estimator(scenario: Scenario, **kwargs) -> HumanModelEstimator:
    """A fitted estimator at the uniform prior for a scenario."""
    est = HumanModelEstimator(**kwargs)
    est.fit(DialogueTrace(scenario=scenario))
    return est


__all__ = ["HumanModelEstimator", "prior_estimator"]
