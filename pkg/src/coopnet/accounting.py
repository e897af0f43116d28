"""Outcome evaluation: conservation checks, payoffs, total network value.

The budget identity sum(payoff_i) == tnv holds exactly for every outcome,
valid or not, because every internal transfer appears once positive and
once negative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DomainError
from .model import ZERO, CompanySpec, GoodVector, NetworkGame, apply_transformation


def _clean_internal_goods(internal):
    clean = {}
    for (a, b), vec in internal.items():
        if a == b:
            raise ValueError(f"self edge {a!r}")
        if vec:
            clean[(a, b)] = vec
    return dict(sorted(clean.items()))


@dataclass(frozen=True)
class GoodsFlow:
    """Goods on company-pair edges plus per-company sales to the sink."""

    internal: Mapping[tuple[str, str], GoodVector] = field(default_factory=dict)
    external_sales: Mapping[str, GoodVector] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "internal", _clean_internal_goods(self.internal))
        sales = {cid: vec for cid, vec in self.external_sales.items() if vec}
        object.__setattr__(self, "external_sales", dict(sorted(sales.items())))

    @classmethod
    def empty(cls) -> "GoodsFlow":
        return cls()

    def sales(self, cid: str) -> GoodVector:
        return self.external_sales.get(cid, ZERO)


@dataclass(frozen=True)
class ValueFlow:
    """Positive money transfers on ordered (payer, payee) pairs.

    Transfers are allowed on pairs with no goods flow: value is decoupled
    from goods.
    """

    internal: Mapping[tuple[str, str], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (payer, payee), amount in self.internal.items():
            if payer == payee:
                raise ValueError(f"self transfer {payer!r}")
            if amount < 0:
                raise ValueError(f"negative transfer {payer!r}->{payee!r}")
            if amount:
                clean[(payer, payee)] = Fraction(amount)
        object.__setattr__(self, "internal", dict(sorted(clean.items())))

    @classmethod
    def empty(cls) -> "ValueFlow":
        return cls()

    def received(self, cid: str) -> Fraction:
        return sum((a for (_, payee), a in self.internal.items() if payee == cid), Fraction(0))

    def paid(self, cid: str) -> Fraction:
        return sum((a for (payer, _), a in self.internal.items() if payer == cid), Fraction(0))

    def scale(self, c: Fraction) -> "ValueFlow":
        return ValueFlow({edge: amount * c for edge, amount in self.internal.items()})


@dataclass(frozen=True)
class Outcome:
    game: NetworkGame
    goods: GoodsFlow
    value: ValueFlow


def node_flows(outcome: Outcome, cid: str) -> tuple[GoodVector, GoodVector]:
    """Total goods entering and leaving a company node.

    Inflow includes the free endowment; outflow includes external sales.
    """
    company = outcome.game.company(cid)
    g_in = company.endowment
    g_out = outcome.goods.sales(cid)
    for (a, b), vec in outcome.goods.internal.items():
        if b == cid:
            g_in = g_in + vec
        elif a == cid:
            g_out = g_out + vec
    return g_in, g_out


@dataclass(frozen=True)
class Violation:
    company: str
    good: str
    outgoing: int
    producible_amount: int
    mode: str

    def __str__(self) -> str:
        op = "<=" if self.mode == "disposal" else "=="
        return (
            f"ConservationViolation({self.company}): {self.good} out={self.outgoing} "
            f"violates out {op} produced={self.producible_amount}"
        )


def check_conservation(outcome: Outcome, mode: str = "disposal") -> list[Violation]:
    """Per-node goods conservation.

    disposal (default): g_out <= t(g_in) componentwise; exact: equality.
    """
    if mode not in ("disposal", "exact"):
        raise ValueError(f"unknown conservation mode {mode!r}")
    violations = []
    registry = outcome.game.good_ids()
    for company in outcome.game.companies:
        g_in, g_out = node_flows(outcome, company.id)
        produced = apply_transformation(company, g_in, registry=registry)
        for gid in sorted(g_out.support | produced.support):
            have, allowed = g_out.get(gid), produced.get(gid)
            bad = have > allowed if mode == "disposal" else have != allowed
            if bad:
                violations.append(Violation(company.id, gid, have, allowed, mode))
    return violations


def external_benefit(company: CompanySpec, g: GoodVector) -> Fraction:
    """Value obtained for selling g to the sink; g must be producible."""
    if not g.support <= company.producible:
        extra = sorted(g.support - company.producible)
        raise DomainError(f"{company.id} cannot sell non-producible goods {extra}")
    return company.benefit.value(g)


def external_cost(company: CompanySpec, g_in: GoodVector, g_out: GoodVector) -> Fraction:
    return company.cost.value(g_in, g_out)


def payoff(outcome: Outcome, cid: str) -> Fraction:
    """Company payoff: transfers received plus sink revenue, minus
    transfers paid and external cost. The goods recipient is the payer."""
    company = outcome.game.company(cid)
    g_in, g_out = node_flows(outcome, cid)
    return (
        outcome.value.received(cid)
        + external_benefit(company, outcome.goods.sales(cid))
        - outcome.value.paid(cid)
        - external_cost(company, g_in, g_out)
    )


def tnv(outcome: Outcome) -> Fraction:
    """Total network value: sink revenue minus source-side costs."""
    total = Fraction(0)
    for company in outcome.game.companies:
        g_in, g_out = node_flows(outcome, company.id)
        total += external_benefit(company, outcome.goods.sales(company.id))
        total -= external_cost(company, g_in, g_out)
    return total


def budget_identity_gap(outcome: Outcome) -> Fraction:
    """sum(payoff_i) - tnv; exactly zero for every outcome."""
    total = sum((payoff(outcome, c.id) for c in outcome.game.companies), Fraction(0))
    return total - tnv(outcome)
