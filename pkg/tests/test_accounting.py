import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopnet import (
    GoodsFlow,
    GoodVector,
    Outcome,
    ValueFlow,
    budget_identity_gap,
    check_conservation,
    external_benefit,
    external_cost,
    node_flows,
    payoff,
    scale_money,
    tnv,
)
from coopnet.errors import DomainError, UnknownCompany

from gamegen import random_game, random_unchecked_outcome


def test_node_flows_demo_c1(demo):
    g_in, g_out = node_flows(demo.baseline, "c1")
    assert g_in == GoodVector({"raw1": 1, "svc1": 1})
    assert g_out == GoodVector({"deliv1": 1})


def test_node_flows_demo_s1(demo):
    g_in, g_out = node_flows(demo.baseline, "s1")
    assert g_in == GoodVector()
    assert g_out == GoodVector({"svc1": 1})


def test_node_flows_unknown_company(demo):
    with pytest.raises(UnknownCompany):
        node_flows(demo.baseline, "zz")


def test_conservation_demo_baseline_clean(demo):
    assert check_conservation(demo.baseline) == []


def test_conservation_flags_unproduced_shipment(demo):
    bad = Outcome(
        demo.game,
        GoodsFlow(external_sales={"c1": GoodVector({"deliv1": 1})}),
        ValueFlow.empty(),
    )
    violations = check_conservation(bad)
    assert [(v.company, v.good) for v in violations] == [("c1", "deliv1")]


def test_conservation_flags_overselling(demo):
    # c2 sells 2 deliveries from a single raw good
    bad = Outcome(
        demo.game,
        GoodsFlow(
            internal={("s2", "c2"): GoodVector({"svc2": 2})},
            external_sales={"c2": GoodVector({"deliv2": 2})},
        ),
        ValueFlow.empty(),
    )
    assert any(v.company == "c2" and v.good == "deliv2" for v in check_conservation(bad))


def test_exact_mode_is_stricter(demo):
    # shippers produce two services but ship one; fine with disposal only
    assert check_conservation(demo.baseline, mode="disposal") == []
    exact = check_conservation(demo.baseline, mode="exact")
    assert {v.company for v in exact} == {"s1", "s2"}


def test_external_benefit_demo(demo):
    c1 = demo.game.company("c1")
    assert external_benefit(c1, GoodVector({"deliv1": 1})) == 10
    assert external_benefit(c1, GoodVector()) == 0
    assert external_benefit(c1, GoodVector({"deliv1": 3})) == 10  # cap 1


def test_external_benefit_domain_error(demo):
    with pytest.raises(DomainError):
        external_benefit(demo.game.company("c1"), GoodVector({"raw1": 1}))


def test_external_cost_demo(demo):
    s1 = demo.game.company("s1")
    assert external_cost(s1, GoodVector(), GoodVector({"svc1": 1})) == 3
    assert external_cost(s1, GoodVector(), GoodVector({"svc1": 2})) == 6
    assert external_cost(s1, GoodVector(), GoodVector()) == 0


def test_payoffs_demo(demo):
    assert payoff(demo.baseline, "c1") == 4
    assert payoff(demo.baseline, "s1") == 3
    assert payoff(demo.baseline, "c2") == 4
    assert payoff(demo.baseline, "s2") == 3


def test_payoff_no_edges_is_zero(demo):
    idle = Outcome(demo.game, GoodsFlow.empty(), ValueFlow.empty())
    assert payoff(idle, "s1") == 0


def test_tnv_demo(demo, improved_flow):
    assert tnv(demo.baseline) == 14
    assert tnv(Outcome(demo.game, improved_flow, ValueFlow.empty())) == 16


def test_identity_gap_demo(demo):
    assert budget_identity_gap(demo.baseline) == 0


def test_identity_holds_for_arbitrary_value_flows(demo):
    scrambled = Outcome(
        demo.game,
        demo.baseline.goods,
        ValueFlow({("s2", "c1"): Fraction(7, 3), ("c1", "c2"): Fraction(11, 2)}),
    )
    assert budget_identity_gap(scrambled) == 0


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(100)))
def test_extra_transfer_shifts_payoffs_not_tnv(a):
    demo = __import__("coopnet").build_shipping_demo(10, 12, 3, 5, 6, 8)
    base = demo.baseline
    transfers = dict(base.value.internal)
    transfers[("s1", "c2")] = transfers.get(("s1", "c2"), Fraction(0)) + a
    shifted = Outcome(base.game, base.goods, ValueFlow(transfers))
    assert payoff(shifted, "c2") == payoff(base, "c2") + a
    assert payoff(shifted, "s1") == payoff(base, "s1") - a
    assert tnv(shifted) == tnv(base)


def test_scaling_money_scales_payoffs_and_tnv(demo):
    c = Fraction(3, 7)
    scaled_game = scale_money(demo.game, c)
    scaled = Outcome(scaled_game, demo.baseline.goods, demo.baseline.value.scale(c))
    for cid in demo.game.company_ids():
        assert payoff(scaled, cid) == payoff(demo.baseline, cid) * c
    assert tnv(scaled) == tnv(demo.baseline) * c


def test_identity_on_random_unchecked_outcomes():
    rng = random.Random(20240817)
    for _ in range(200):
        outcome = random_unchecked_outcome(rng, random_game(rng))
        assert budget_identity_gap(outcome) == 0
