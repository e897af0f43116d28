import random
from fractions import Fraction

import pytest

from coopnet import (
    GoodsFlow,
    Outcome,
    ValueFlow,
    WeightVector,
    budget_identity_gap,
    check_conservation,
    collapse_nodes,
    external_benefit,
    external_cost,
    node_flows,
    pareto_rebalance,
    payoff,
    realize_payoffs,
    tnv,
)
from coopnet.errors import (
    BadWeights,
    IdenticalNodes,
    NoSurplus,
    TargetSumMismatch,
    UnknownCompany,
)

from gamegen import random_game, random_valid_outcome, random_value_flow


def all_payoffs(outcome):
    return {c.id: payoff(outcome, c.id) for c in outcome.game.companies}


def test_pareto_rebalance_uniform_demo(demo, improved_flow):
    value = pareto_rebalance(demo.game, demo.baseline, improved_flow)
    outcome = Outcome(demo.game, improved_flow, value)
    assert all_payoffs(outcome) == {
        "c1": Fraction(9, 2),
        "c2": Fraction(9, 2),
        "s1": Fraction(7, 2),
        "s2": Fraction(7, 2),
    }
    assert budget_identity_gap(outcome) == 0
    # s2 ships nothing under the improved flow yet ends up with 7/2
    assert "s2" not in {a for (a, _) in improved_flow.internal}
    assert payoff(outcome, "s2") == Fraction(7, 2)


def test_pareto_rebalance_custom_weights(demo, improved_flow):
    weights = WeightVector(
        {"c1": Fraction(1, 2), "c2": Fraction(1, 6), "s1": Fraction(1, 6), "s2": Fraction(1, 6)}
    )
    value = pareto_rebalance(demo.game, demo.baseline, improved_flow, weights)
    outcome = Outcome(demo.game, improved_flow, value)
    assert all_payoffs(outcome) == {
        "c1": Fraction(5),
        "c2": Fraction(13, 3),
        "s1": Fraction(10, 3),
        "s2": Fraction(10, 3),
    }
    for cid, value in all_payoffs(outcome).items():
        assert value > payoff(demo.baseline, cid)


def test_pareto_rebalance_requires_surplus(demo):
    with pytest.raises(NoSurplus):
        pareto_rebalance(demo.game, demo.baseline, demo.baseline.goods)


def test_pareto_rebalance_rejects_bad_weights(demo, improved_flow):
    with pytest.raises(BadWeights):
        pareto_rebalance(
            demo.game,
            demo.baseline,
            improved_flow,
            WeightVector({"c1": Fraction(1, 2), "c2": Fraction(1, 2)}),
        )
    with pytest.raises(BadWeights):
        pareto_rebalance(
            demo.game,
            demo.baseline,
            improved_flow,
            WeightVector({cid: Fraction(1, 2) for cid in ["c1", "c2", "s1", "s2"]}),
        )


def test_pareto_rebalance_leaves_goods_flow_alone(demo, improved_flow):
    before = improved_flow
    pareto_rebalance(demo.game, demo.baseline, improved_flow)
    assert improved_flow == before


def test_realize_payoffs_hits_targets_exactly(demo, improved_flow):
    targets = {
        "c1": Fraction(9, 2),
        "c2": Fraction(9, 2),
        "s1": Fraction(7, 2),
        "s2": Fraction(7, 2),
    }
    value = realize_payoffs(demo.game, improved_flow, targets)
    assert len(value.internal) <= len(demo.game.companies) - 1
    outcome = Outcome(demo.game, improved_flow, value)
    assert all_payoffs(outcome) == targets


def test_realize_payoffs_base_targets_need_no_transfers(demo, improved_flow):
    empty = Outcome(demo.game, improved_flow, ValueFlow.empty())
    targets = {c.id: payoff(empty, c.id) for c in demo.game.companies}
    assert realize_payoffs(demo.game, improved_flow, targets) == ValueFlow.empty()


def test_realize_payoffs_rejects_sum_mismatch(demo, improved_flow):
    targets = {"c1": Fraction(17), "c2": Fraction(0), "s1": Fraction(0), "s2": Fraction(0)}
    with pytest.raises(TargetSumMismatch):
        realize_payoffs(demo.game, improved_flow, targets)


def test_collapse_cargo_owner_with_its_shipper(demo):
    collapsed = collapse_nodes(demo.baseline, "c1", "s1")
    reduced = collapsed.outcome
    assert len(reduced.game.companies) == 3
    assert payoff(reduced, collapsed.merged_id) == 7
    assert tnv(reduced) == 14
    assert check_conservation(reduced) == []
    merged = reduced.game.company(collapsed.merged_id)
    assert merged.producible == frozenset({"deliv1", "svc1"})
    assert merged.endowment.get("raw1") == 1


def test_collapse_the_two_cargo_owners(demo):
    collapsed = collapse_nodes(demo.baseline, "c1", "c2")
    assert payoff(collapsed.outcome, collapsed.merged_id) == 8
    assert tnv(collapsed.outcome) == 14


def test_collapse_isolated_zero_payoff_pair(demo):
    idle = Outcome(demo.game, GoodsFlow.empty(), ValueFlow.empty())
    collapsed = collapse_nodes(idle, "s1", "s2")
    assert payoff(collapsed.outcome, collapsed.merged_id) == 0
    assert tnv(collapsed.outcome) == tnv(idle)


def test_collapse_error_cases(demo):
    with pytest.raises(IdenticalNodes):
        collapse_nodes(demo.baseline, "c1", "c1")
    with pytest.raises(UnknownCompany):
        collapse_nodes(demo.baseline, "c1", "zz")


def test_collapse_preserves_tnv_and_payoff_sum_randomly():
    rng = random.Random(20240819)
    done = 0
    while done < 40:
        game = random_game(rng, max_companies=4, max_goods=3, min_companies=2, ensure_endowment=True)
        outcome = random_valid_outcome(rng, game)
        i, j = rng.sample(game.company_ids(), 2)
        collapsed = collapse_nodes(outcome, i, j)
        assert tnv(collapsed.outcome) == tnv(outcome)
        assert payoff(collapsed.outcome, collapsed.merged_id) == payoff(outcome, i) + payoff(outcome, j)
        assert budget_identity_gap(collapsed.outcome) == 0
        done += 1


def test_collapse_unrepresentable_corner():
    # purely internal costly shipping between two otherwise silent nodes:
    # the merged node has no flows but a positive cost, which no cost spec
    # with ect(0, 0) = 0 can carry
    from coopnet import (
        CompanySpec,
        CostSpec,
        GoodType,
        GoodVector,
        NetworkGame,
        Recipe,
        Transformation,
    )
    from coopnet.errors import CollapseNotRepresentable

    game = NetworkGame(
        goods=(GoodType("x", "x"),),
        companies=(
            CompanySpec(
                id="a",
                name="a",
                producible=frozenset({"x"}),
                transformation=Transformation(
                    recipes=(Recipe(GoodVector(), GoodVector({"x": 1}), max_uses=1, priority=1),)
                ),
                cost=CostSpec(per_output={"x": Fraction(1)}),
            ),
            CompanySpec(id="b", name="b", producible=frozenset()),
        ),
    )
    outcome = Outcome(
        game,
        GoodsFlow(internal={("a", "b"): GoodVector({"x": 1})}),
        ValueFlow.empty(),
    )
    assert check_conservation(outcome) == []
    with pytest.raises(CollapseNotRepresentable):
        collapse_nodes(outcome, "a", "b")


def test_lemma_end_to_end_on_random_games():
    from coopnet import SearchBounds, brute_force_max_tnv

    rng = random.Random(20240820)
    improved_cases = 0
    attempts = 0
    while improved_cases < 10 and attempts < 200:
        attempts += 1
        game = random_game(rng, max_companies=3, max_goods=3)
        baseline = Outcome(game, GoodsFlow.empty(), random_value_flow(rng, game))
        best = brute_force_max_tnv(game, SearchBounds(max_units_per_edge=1))
        if best.tnv <= tnv(baseline):
            continue
        value = pareto_rebalance(game, baseline, best.flow)
        outcome = Outcome(game, best.flow, value)
        for cid in game.company_ids():
            assert payoff(outcome, cid) > payoff(baseline, cid)
        assert budget_identity_gap(outcome) == 0
        improved_cases += 1
    assert improved_cases == 10
