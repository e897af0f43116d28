"""Turn a TNV surplus into a strict Pareto improvement via side payments,
plus the node-collapse operation that merges two companies while
preserving TNV and their payoff sum."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .accounting import (
    GoodsFlow,
    Outcome,
    ValueFlow,
    external_benefit,
    external_cost,
    node_flows,
    payoff,
    tnv,
)
from .errors import (
    BadWeights,
    CollapseNotRepresentable,
    IdenticalNodes,
    NoSurplus,
    TargetSumMismatch,
)
from .model import (
    BenefitSpec,
    CompanySpec,
    CostSpec,
    GoodVector,
    NetworkGame,
    Recipe,
    Transformation,
)


@dataclass(frozen=True)
class WeightVector:
    """Positive per-company shares of the surplus, summing to one."""

    weights: Mapping[str, Fraction] = field(default_factory=dict)

    @classmethod
    def uniform(cls, game: NetworkGame) -> "WeightVector":
        n = len(game.companies)
        return cls({c.id: Fraction(1, n) for c in game.companies})

    def check_for(self, game: NetworkGame) -> None:
        ids = set(game.company_ids())
        if set(self.weights) != ids:
            raise BadWeights(f"weights must cover exactly the companies {sorted(ids)}")
        if any(w <= 0 for w in self.weights.values()):
            raise BadWeights("all weights must be strictly positive")
        if sum(self.weights.values()) != 1:
            raise BadWeights("weights must sum to 1")


def _net_external(game: NetworkGame, flow: GoodsFlow, cid: str) -> Fraction:
    outcome = Outcome(game, flow, ValueFlow.empty())
    company = game.company(cid)
    g_in, g_out = node_flows(outcome, cid)
    return external_benefit(company, flow.sales(cid)) - external_cost(company, g_in, g_out)


def realize_payoffs(game: NetworkGame, flow: GoodsFlow, targets: Mapping[str, Fraction]) -> ValueFlow:
    """Hub settlement: reach a prescribed payoff vector with at most n-1
    transfers routed through the lexicographically smallest company.

    The target sum must equal tnv(flow) exactly; the hub's own payoff then
    lands on target by the budget identity.
    """
    ids = game.company_ids()
    if set(targets) != set(ids):
        raise TargetSumMismatch(f"targets must cover exactly the companies {ids}")
    total = sum(targets.values(), Fraction(0))
    flow_tnv = tnv(Outcome(game, flow, ValueFlow.empty()))
    if total != flow_tnv:
        raise TargetSumMismatch(f"targets sum to {total}, tnv is {flow_tnv}")

    hub = ids[0]
    transfers: dict[tuple[str, str], Fraction] = {}
    for cid in ids[1:]:
        gap = Fraction(targets[cid]) - _net_external(game, flow, cid)
        if gap > 0:
            transfers[(hub, cid)] = gap
        elif gap < 0:
            transfers[(cid, hub)] = -gap
    return ValueFlow(transfers)


def pareto_rebalance(
    game: NetworkGame,
    baseline: Outcome,
    improved_flow: GoodsFlow,
    weights: WeightVector | None = None,
) -> ValueFlow:
    """Value flow making every company strictly better off under the
    improved goods flow: payoff_i becomes baseline payoff_i plus its
    weighted share of the TNV surplus."""
    if weights is None:
        weights = WeightVector.uniform(game)
    weights.check_for(game)
    surplus = tnv(Outcome(game, improved_flow, ValueFlow.empty())) - tnv(baseline)
    if surplus <= 0:
        raise NoSurplus(f"improved flow adds no value (delta = {surplus})")
    targets = {
        c.id: payoff(baseline, c.id) + weights.weights[c.id] * surplus for c in game.companies
    }
    return realize_payoffs(game, improved_flow, targets)


@dataclass(frozen=True)
class CollapsedOutcome:
    outcome: Outcome
    merged_id: str
    provenance: tuple[str, str]


def _merged_benefit(total: Fraction, sales: GoodVector) -> BenefitSpec:
    if not total:
        return BenefitSpec()
    gid = next(iter(sales))  # sorted; total > 0 implies sales nonzero
    return BenefitSpec({gid: (total / sales.get(gid), None)})


def _merged_cost(total: Fraction, g_in: GoodVector, g_out: GoodVector) -> CostSpec:
    if not total:
        return CostSpec()
    if g_out:
        return CostSpec(fixed=total)
    if g_in:
        gid = next(iter(g_in))
        return CostSpec(per_input={gid: total / g_in.get(gid)})
    raise CollapseNotRepresentable(
        f"merged node has cost {total} but no goods flow to attach it to"
    )


def collapse_nodes(outcome: Outcome, i: str, j: str) -> CollapsedOutcome:
    """Merge companies i and j into one node; edges between them become
    internal and disappear, everything else re-points to the merged node.

    The merged specs reproduce the pair's external benefit and cost
    exactly at the reduced flow (they are bookkeeping devices for this
    outcome, not general functions), so TNV and the payoff sum are
    preserved exactly.
    """
    if i == j:
        raise IdenticalNodes(i)
    game = outcome.game
    ci, cj = game.company(i), game.company(j)  # raises UnknownCompany

    merged_id = f"{i}+{j}"
    existing = set(game.company_ids())
    while merged_id in existing:
        merged_id += "+"

    def repoint(x: str) -> str:
        return merged_id if x in (i, j) else x

    internal: dict[tuple[str, str], GoodVector] = {}
    for (a, b), vec in outcome.goods.internal.items():
        a2, b2 = repoint(a), repoint(b)
        if a2 == b2:
            continue
        internal[(a2, b2)] = internal.get((a2, b2), GoodVector()) + vec
    sales: dict[str, GoodVector] = {}
    for cid, vec in outcome.goods.external_sales.items():
        cid2 = repoint(cid)
        sales[cid2] = sales.get(cid2, GoodVector()) + vec
    transfers: dict[tuple[str, str], Fraction] = {}
    for (a, b), amount in outcome.value.internal.items():
        a2, b2 = repoint(a), repoint(b)
        if a2 == b2:
            continue
        transfers[(a2, b2)] = transfers.get((a2, b2), Fraction(0)) + amount

    # merged node flows in the reduced graph
    endowment = ci.endowment + cj.endowment
    g_in = endowment
    g_out = sales.get(merged_id, GoodVector())
    for (a, b), vec in internal.items():
        if b == merged_id:
            g_in = g_in + vec
        elif a == merged_id:
            g_out = g_out + vec

    eb_total = external_benefit(ci, outcome.goods.sales(i)) + external_benefit(
        cj, outcome.goods.sales(j)
    )
    in_i, out_i = node_flows(outcome, i)
    in_j, out_j = node_flows(outcome, j)
    ect_total = external_cost(ci, in_i, out_i) + external_cost(cj, in_j, out_j)

    recipes = (Recipe(inputs=g_in, outputs=g_out, max_uses=1, priority=1),) if g_out else ()
    merged = CompanySpec(
        id=merged_id,
        name=f"{ci.name}+{cj.name}",
        producible=ci.producible | cj.producible,
        transformation=Transformation(recipes=recipes),
        benefit=_merged_benefit(eb_total, sales.get(merged_id, GoodVector())),
        cost=_merged_cost(ect_total, g_in, g_out),
        endowment=endowment,
    )

    companies = []
    placed = False
    for c in game.companies:
        if c.id in (i, j):
            if not placed:
                companies.append(merged)
                placed = True
        else:
            companies.append(c)
    reduced_game = NetworkGame(goods=game.goods, companies=tuple(companies))
    reduced = Outcome(reduced_game, GoodsFlow(internal, sales), ValueFlow(transfers))
    return CollapsedOutcome(outcome=reduced, merged_id=merged_id, provenance=(i, j))
