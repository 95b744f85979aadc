"""Classical, quantum and non-signaling values of biased nonlocal games."""

from .classical import (
    DeterministicStrategy,
    classical_closed_form,
    classical_value_chsh,
    classical_value_svetlichny,
)
from .errors import BudgetError, DomainError, GameError, ThresholdError, ValidationError
from .game_model import (
    BiasPair,
    CorrelatorExpansion,
    CorrelatorTable,
    JointBias,
    chsh_score,
    expand_svetlichny,
    expectation_to_success,
    joint_score,
)
from .nonsignaling import BehaviorTable, ns_value, ns_vertices, pr_box, simulate_rounds
from .optimize import OptimizerConfig
from .quantum_chsh import (
    PlanarObservable,
    PureState,
    Region,
    RegionTag,
    classify_region,
    compute_alpha,
    expectation,
    joint_no_advantage,
    optimal_strategy,
    quantum_value_chsh,
    quantum_value_joint_oracle,
    tsirelson_biased,
)
from .svetlichny import AngleSet, OptResult, ghz_objective, ghz_objective_statevector, quantum_value_svetlichny

__version__ = "0.1.0"
