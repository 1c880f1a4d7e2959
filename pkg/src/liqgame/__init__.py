"""Solver and simulator for bilateral, price-free bond-transfer games."""

from .core import (
    Action,
    GameInstance,
    Holding,
    LiquidityGameError,
    PayoffMatrix,
    Player,
    apply_trade,
    bilateral_payoff,
    build_instance,
    build_payoff_matrix,
)
from .solver import (
    MixedProfile,
    PureEquilibrium,
    brute_force_oracle,
    dominated_actions,
    find_pure_equilibria,
    solve_mixed,
    verify_equilibrium,
)
from .bayes import (
    BayesianSolution,
    ConditionalGame,
    TypeSpace,
    dominant_strategy_per_type,
    expected_payoff,
    indifference_threshold,
    load_bundled_game,
)
from .market import (
    CompositionMatrix,
    QuadrantReport,
    best_quadrant,
    load_published_matrix,
    quadrant_analysis,
    weight_by_priors,
)
from .sim import SimConfig, SimReport, StrategySpec, analytic_hit_ratio, run_simulation
from .lp import TransferProblem, max_transfer

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BayesianSolution",
    "CompositionMatrix",
    "ConditionalGame",
    "GameInstance",
    "Holding",
    "LiquidityGameError",
    "MixedProfile",
    "PayoffMatrix",
    "Player",
    "PureEquilibrium",
    "QuadrantReport",
    "SimConfig",
    "SimReport",
    "StrategySpec",
    "TransferProblem",
    "TypeSpace",
    "analytic_hit_ratio",
    "apply_trade",
    "best_quadrant",
    "bilateral_payoff",
    "brute_force_oracle",
    "build_instance",
    "build_payoff_matrix",
    "dominant_strategy_per_type",
    "dominated_actions",
    "expected_payoff",
    "find_pure_equilibria",
    "indifference_threshold",
    "load_bundled_game",
    "load_published_matrix",
    "max_transfer",
    "quadrant_analysis",
    "run_simulation",
    "solve_mixed",
    "verify_equilibrium",
    "weight_by_priors",
]
