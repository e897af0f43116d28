"""Domain types for business network games: goods, recipes, companies.

Good quantities are nonnegative integers; all money is `fractions.Fraction`
so downstream accounting identities hold exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional

from .errors import UnknownCompany, UnknownGoodType


class GoodVector:
    """Immutable bundle of goods; absent ids count as zero.

    `a <= b` is componentwise over the union of keys.
    """

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[str, int] | None = None):
        clean: dict[str, int] = {}
        for gid, n in (counts or {}).items():
            if isinstance(n, bool) or not isinstance(n, int):
                raise TypeError(f"count for {gid!r} must be an integer, got {n!r}")
            if n < 0:
                raise ValueError(f"negative count for {gid!r}: {n}")
            if n:
                clean[gid] = n
        self._counts = dict(sorted(clean.items()))

    def get(self, gid: str) -> int:
        return self._counts.get(gid, 0)

    def items(self):
        return self._counts.items()

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self._counts)

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GoodVector):
            return NotImplemented
        return self._counts == other._counts

    def __hash__(self) -> int:
        return hash(tuple(self._counts.items()))

    def __add__(self, other: "GoodVector") -> "GoodVector":
        merged = dict(self._counts)
        for gid, n in other.items():
            merged[gid] = merged.get(gid, 0) + n
        return GoodVector(merged)

    def __sub__(self, other: "GoodVector") -> "GoodVector":
        merged = dict(self._counts)
        for gid, n in other.items():
            merged[gid] = merged.get(gid, 0) - n
        return GoodVector(merged)  # raises on any negative component

    def __le__(self, other: "GoodVector") -> bool:
        return all(n <= other.get(gid) for gid, n in self._counts.items())

    def scale(self, k: int) -> "GoodVector":
        if k < 0:
            raise ValueError("scale factor must be nonnegative")
        return GoodVector({gid: n * k for gid, n in self._counts.items()})

    def __repr__(self) -> str:
        inner = ", ".join(f"{gid}:{n}" for gid, n in self._counts.items())
        return f"GoodVector({{{inner}}})"


ZERO = GoodVector()


@dataclass(frozen=True)
class GoodType:
    id: str
    name: str


@dataclass(frozen=True)
class Recipe:
    """One production rule: consume `inputs`, emit `outputs`.

    max_uses None means unbounded; a zero-input recipe must be bounded.
    """

    inputs: GoodVector
    outputs: GoodVector
    max_uses: Optional[int] = None
    priority: int = 1


@dataclass(frozen=True)
class Transformation:
    """Deterministic goods transformation: recipes applied greedily in
    ascending priority order; with passthrough, leftover units of
    producible types pass through, all other leftovers are discarded."""

    recipes: tuple[Recipe, ...] = ()
    passthrough: bool = False

    def apply(self, g: GoodVector, producible: frozenset[str]) -> GoodVector:
        remaining = {gid: n for gid, n in g.items()}
        produced: dict[str, int] = {}
        for recipe in sorted(self.recipes, key=lambda r: r.priority):
            uses = recipe.max_uses
            if recipe.inputs:
                for gid, need in recipe.inputs.items():
                    avail = remaining.get(gid, 0) // need
                    uses = avail if uses is None else min(uses, avail)
            elif uses is None:
                raise ValueError("zero-input recipe must have finite max_uses")
            if not uses:
                continue
            for gid, need in recipe.inputs.items():
                remaining[gid] -= need * uses
            for gid, out in recipe.outputs.items():
                produced[gid] = produced.get(gid, 0) + out * uses
        if self.passthrough:
            for gid, n in remaining.items():
                if n and gid in producible:
                    produced[gid] = produced.get(gid, 0) + n
        return GoodVector(produced)


@dataclass(frozen=True)
class BenefitSpec:
    """Linear external benefit: per-good unit price with an optional cap
    on the number of paid units (cap None = unbounded)."""

    per_good: Mapping[str, tuple[Fraction, Optional[int]]] = field(default_factory=dict)

    def value(self, g: GoodVector) -> Fraction:
        total = Fraction(0)
        for gid, (price, cap) in self.per_good.items():
            n = g.get(gid)
            if cap is not None:
                n = min(n, cap)
            total += price * n
        return total


@dataclass(frozen=True)
class CostSpec:
    """Linear external cost: per-unit rates on actual node in/out flows
    plus a fixed charge incurred iff the output vector is nonzero."""

    per_input: Mapping[str, Fraction] = field(default_factory=dict)
    per_output: Mapping[str, Fraction] = field(default_factory=dict)
    fixed: Fraction = Fraction(0)

    def value(self, g_in: GoodVector, g_out: GoodVector) -> Fraction:
        total = Fraction(0)
        for gid, rate in self.per_input.items():
            total += rate * g_in.get(gid)
        for gid, rate in self.per_output.items():
            total += rate * g_out.get(gid)
        if g_out:
            total += self.fixed
        return total


@dataclass(frozen=True)
class CompanySpec:
    id: str
    name: str
    producible: frozenset[str]
    transformation: Transformation = Transformation()
    benefit: BenefitSpec = BenefitSpec()
    cost: CostSpec = CostSpec()
    endowment: GoodVector = ZERO


@dataclass(frozen=True)
class NetworkGame:
    goods: tuple[GoodType, ...]
    companies: tuple[CompanySpec, ...]

    def good_ids(self) -> frozenset[str]:
        return frozenset(g.id for g in self.goods)

    def company_ids(self) -> list[str]:
        return sorted(c.id for c in self.companies)

    def company(self, cid: str) -> CompanySpec:
        for c in self.companies:
            if c.id == cid:
                return c
        raise UnknownCompany(cid)

    def apply_transformation(self, cid: str, g: GoodVector) -> GoodVector:
        return apply_transformation(self.company(cid), g, registry=self.good_ids())


def apply_transformation(
    company: CompanySpec, g_in: GoodVector, registry: Optional[frozenset[str]] = None
) -> GoodVector:
    """Evaluate the company's transformation on an input bundle.

    If a registry is supplied, unregistered good ids in the input raise
    UnknownGoodType.
    """
    if registry is not None:
        for gid in g_in.support:
            if gid not in registry:
                raise UnknownGoodType(gid)
    return company.transformation.apply(g_in, company.producible)


@dataclass(frozen=True)
class Defect:
    code: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}({self.subject}): {self.detail}"


def validate_game(game: NetworkGame) -> list[Defect]:
    """Structural validation; defects are data, not exceptions."""
    defects: list[Defect] = []
    registry = set()
    for g in game.goods:
        if g.id in registry:
            defects.append(Defect("DuplicateGoodId", g.id, "good id declared twice"))
        registry.add(g.id)

    if not game.companies:
        defects.append(Defect("NoCompanies", "game", "a game needs at least one company"))

    seen = set()
    for c in game.companies:
        if c.id in seen:
            defects.append(Defect("DuplicateCompanyId", c.id, "company id declared twice"))
        seen.add(c.id)

        for gid in sorted(c.producible):
            if gid not in registry:
                defects.append(Defect("UnknownGoodRef", c.id, f"producible good {gid!r} not declared"))
        for gid in c.endowment:
            if gid not in registry:
                defects.append(Defect("UnknownGoodRef", c.id, f"endowment good {gid!r} not declared"))

        priorities = set()
        for r in c.transformation.recipes:
            if r.priority in priorities:
                defects.append(Defect("DuplicateRecipePriority", c.id, f"priority {r.priority} reused"))
            priorities.add(r.priority)
            if not r.outputs:
                defects.append(Defect("EmptyRecipeOutputs", c.id, f"recipe priority {r.priority} outputs nothing"))
            if not r.inputs and r.max_uses is None:
                defects.append(
                    Defect("UnboundedZeroInputRecipe", c.id, f"recipe priority {r.priority} would produce forever")
                )
            if r.max_uses is not None and r.max_uses < 0:
                defects.append(Defect("NegativeMaxUses", c.id, f"recipe priority {r.priority}"))
            for gid in list(r.inputs) + list(r.outputs):
                if gid not in registry:
                    defects.append(Defect("UnknownGoodRef", c.id, f"recipe good {gid!r} not declared"))
            for gid in r.outputs:
                if gid not in c.producible:
                    defects.append(
                        Defect("ProducibleViolation", c.id, f"recipe outputs {gid!r} outside producible set")
                    )

        for gid, (price, cap) in c.benefit.per_good.items():
            if gid not in registry:
                defects.append(Defect("UnknownGoodRef", c.id, f"priced good {gid!r} not declared"))
            elif gid not in c.producible:
                defects.append(Defect("BenefitDomainViolation", c.id, f"price on {gid!r} outside producible set"))
            if price < 0:
                defects.append(Defect("NegativeMoney", c.id, f"price on {gid!r} is negative"))
            if cap is not None and cap < 0:
                defects.append(Defect("NegativeMoney", c.id, f"cap on {gid!r} is negative"))

        for label, rates in (("per_input", c.cost.per_input), ("per_output", c.cost.per_output)):
            for gid, rate in rates.items():
                if gid not in registry:
                    defects.append(Defect("UnknownGoodRef", c.id, f"cost {label} good {gid!r} not declared"))
                if rate < 0:
                    defects.append(Defect("NegativeMoney", c.id, f"cost {label} rate on {gid!r} is negative"))
        if c.cost.fixed < 0:
            defects.append(Defect("NegativeMoney", c.id, "fixed cost is negative"))

    return defects


def scale_money(game: NetworkGame, c: Fraction) -> NetworkGame:
    """Return a copy of the game with every price, rate, and fixed charge
    multiplied by c. Goods and recipes are untouched."""
    if c <= 0:
        raise ValueError("scale factor must be positive")
    companies = []
    for comp in game.companies:
        benefit = BenefitSpec({gid: (price * c, cap) for gid, (price, cap) in comp.benefit.per_good.items()})
        cost = CostSpec(
            per_input={gid: rate * c for gid, rate in comp.cost.per_input.items()},
            per_output={gid: rate * c for gid, rate in comp.cost.per_output.items()},
            fixed=comp.cost.fixed * c,
        )
        companies.append(
            CompanySpec(
                id=comp.id,
                name=comp.name,
                producible=comp.producible,
                transformation=comp.transformation,
                benefit=benefit,
                cost=cost,
                endowment=comp.endowment,
            )
        )
    return NetworkGame(goods=game.goods, companies=tuple(companies))
