"""argus: model a dialogue partner's beliefs from argument traces.

The package walks the whole pipeline: a propositional language over a
finite vocabulary, logical arguments and counterarguments, trust-to-
probability weighting, Bayesian updates over the model space, dialogue
traces with replay and simulation, rank-correlation evaluation with gamma
personalization, and a CLI plus HTTP session service on top.
"""

from .arguments import (
    AGENT,
    HUMAN,
    Argument,
    is_counterargument,
    is_valid_argument,
    minimal_supports,
    model_entails_argument,
)
from .belief import (
    BASELINE_1,
    BASELINE_2,
    BASELINE_3,
    PROPOSED,
    ModelDistribution,
    UpdateRule,
    apply_move,
    baseline_update,
    bayesian_update,
    degree_of_belief,
    perspective_beliefs,
    rank_perspectives,
    uniform_prior,
)
from .dialogue import (
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
)
from .errors import (
    ArgusError,
    ConvergenceFailureError,
    DegenerateInputError,
    DegenerateUpdateError,
    DomainError,
    FormulaSyntaxError,
    InsufficientRoundsError,
    LengthMismatchError,
    MalformedTraceError,
    NoArgumentAvailableError,
    NonMonotoneGammaError,
    PremiseSetTooLargeError,
    UnknownAtomError,
    VocabularyMismatchError,
    VocabularyTooLargeError,
)
from .estimator import HumanModelEstimator, prior_estimator
from .evaluation import (
    DEFAULT_GAMMA_GRID,
    GammaFit,
    RoundRecord,
    evaluate_methods,
    fit_gamma,
    ordering_rho,
    ordering_to_ranks,
    paired_t_test,
    spearman_rho,
    synthesize_cohort,
    synthetic_scenario,
    trust_round_comparison,
)
from .logic import (
    And,
    Atom,
    Formula,
    Iff,
    Implies,
    Model,
    Not,
    Or,
    Vocabulary,
    atoms_of,
    consistent,
    entails,
    evaluate,
    models_of,
    parse_formula,
    print_formula,
)
from .weighting import (
    MIN_INVERTIBLE_GAMMA,
    WeightingParams,
    probability_of_trust,
    trust_of_probability,
)

__version__ = "0.1.0"

__all__ = [
    "AGENT",
    "HUMAN",
    "Argument",
    "is_counterargument",
    "is_valid_argument",
    "minimal_supports",
    "model_entails_argument",
    "BASELINE_1",
    "BASELINE_2",
    "BASELINE_3",
    "PROPOSED",
    "ModelDistribution",
    "UpdateRule",
    "apply_move",
    "baseline_update",
    "bayesian_update",
    "degree_of_belief",
    "perspective_beliefs",
    "rank_perspectives",
    "uniform_prior",
    "CERTAINTY_LEVELS",
    "DEFAULT_TRUST_LEVELS",
    "DialogueTrace",
    "PoolEntry",
    "Scenario",
    "canonical_json",
    "demo_scenario",
    "framework_rankings",
    "replay",
    "replay_steps",
    "select_agent_argument",
    "simulate_dialogue",
    "simulated_human_respond",
    "ArgusError",
    "ConvergenceFailureError",
    "DegenerateInputError",
    "DegenerateUpdateError",
    "DomainError",
    "FormulaSyntaxError",
    "InsufficientRoundsError",
    "LengthMismatchError",
    "MalformedTraceError",
    "NoArgumentAvailableError",
    "NonMonotoneGammaError",
    "PremiseSetTooLargeError",
    "UnknownAtomError",
    "VocabularyMismatchError",
    "VocabularyTooLargeError",
    "HumanModelEstimator",
    "prior_estimator",
    "DEFAULT_GAMMA_GRID",
    "GammaFit",
    "RoundRecord",
    "evaluate_methods",
    "fit_gamma",
    "ordering_rho",
    "ordering_to_ranks",
    "paired_t_test",
    "spearman_rho",
    "synthesize_cohort",
    "synthetic_scenario",
    "trust_round_comparison",
    "And",
    "Atom",
    "Formula",
    "Iff",
    "Implies",
    "Model",
    "Not",
    "Or",
    "Vocabulary",
    "atoms_of",
    "consistent",
    "entails",
    "evaluate",
    "models_of",
    "parse_formula",
    "print_formula",
    "MIN_INVERTIBLE_GAMMA",
    "WeightingParams",
    "probability_of_trust",
    "trust_of_probability",
    "__version__",
]
