"""coopnet: solver for business network games.

Model enterprises exchanging goods over a flow graph, compute payoffs and
total network value (their sum is an exact identity), search for
value-maximizing flows, and construct Pareto-improving side payments.
"""

from .accounting import (
    GoodsFlow,
    Outcome,
    ValueFlow,
    Violation,
    budget_identity_gap,
    check_conservation,
    external_benefit,
    external_cost,
    node_flows,
    payoff,
    tnv,
)
from .model import (
    ZERO,
    BenefitSpec,
    CompanySpec,
    CostSpec,
    Defect,
    GoodType,
    GoodVector,
    NetworkGame,
    Recipe,
    Transformation,
    apply_transformation,
    scale_money,
    validate_game,
)
from .optimizer import SearchBounds, SearchResult, brute_force_max_tnv, enumerate_goods_flows, greedy_improve
from .rebalancer import CollapsedOutcome, WeightVector, collapse_nodes, pareto_rebalance, realize_payoffs
from .scenario import (
    ScenarioDocument,
    build_shipping_demo,
    dump_scenario,
    format_rational,
    load_scenario,
    render_report,
)

__all__ = [
    "BenefitSpec",
    "CollapsedOutcome",
    "CompanySpec",
    "CostSpec",
    "Defect",
    "GoodType",
    "GoodVector",
    "GoodsFlow",
    "NetworkGame",
    "Outcome",
    "Recipe",
    "ScenarioDocument",
    "SearchBounds",
    "SearchResult",
    "Transformation",
    "ValueFlow",
    "Violation",
    "WeightVector",
    "ZERO",
    "apply_transformation",
    "brute_force_max_tnv",
    "budget_identity_gap",
    "build_shipping_demo",
    "check_conservation",
    "collapse_nodes",
    "dump_scenario",
    "enumerate_goods_flows",
    "external_benefit",
    "external_cost",
    "format_rational",
    "greedy_improve",
    "load_scenario",
    "node_flows",
    "pareto_rebalance",
    "payoff",
    "realize_payoffs",
    "render_report",
    "scale_money",
    "tnv",
    "validate_game",
]

__version__ = "0.1.0"
