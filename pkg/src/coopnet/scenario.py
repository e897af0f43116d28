"""Scenario file I/O, the shipping demo builder, and report rendering.

Scenario files are JSON with exact money: rationals are written as
integers or "p/q" strings, never floats. Unknown keys are rejected so a
typo cannot silently drop data.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .accounting import (
    GoodsFlow,
    Outcome,
    ValueFlow,
    budget_identity_gap,
    check_conservation,
    node_flows,
    payoff,
    tnv,
)
from .errors import ConstraintViolation, ParseError, SemanticError, VersionError
from .model import (
    BenefitSpec,
    CompanySpec,
    CostSpec,
    GoodType,
    GoodVector,
    NetworkGame,
    Recipe,
    Transformation,
)

FORMAT_VERSION = "1"


@dataclass(frozen=True)
class ScenarioDocument:
    game: NetworkGame
    baseline: Optional[Outcome] = None
    improved: Optional[GoodsFlow] = None
    metadata: Mapping[str, str] = field(default_factory=dict)
    version: str = FORMAT_VERSION


# ---------------------------------------------------------------- parsing

def _reject_float(s):
    raise ParseError(f"float literal {s!r} not allowed; use an integer or \"p/q\"")


def _expect_obj(value, path):
    if not isinstance(value, dict):
        raise ParseError("expected an object", path)
    return value


def _expect_list(value, path):
    if not isinstance(value, list):
        raise ParseError("expected a list", path)
    return value


def _expect_str(value, path):
    if not isinstance(value, str):
        raise ParseError("expected a string", path)
    return value


def _check_keys(obj, allowed, path):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ParseError(f"unknown key(s) {unknown}", path)


def _parse_rational(value, path) -> Fraction:
    if isinstance(value, bool):
        raise ParseError("expected a rational", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {value!r}: {exc}", path) from None
    raise ParseError(f"expected a rational, got {value!r}", path)


def _parse_count(value, path) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer count, got {value!r}", path)
    if value < 0:
        raise ParseError(f"count must be nonnegative, got {value}", path)
    return value


def _parse_maybe_unbounded(value, path) -> Optional[int]:
    if value == "unbounded":
        return None
    return _parse_count(value, path)


def _parse_bundle(value, path) -> GoodVector:
    obj = _expect_obj(value, path)
    return GoodVector({gid: _parse_count(n, f"{path}.{gid}") for gid, n in obj.items()})


def _parse_goods_flow(value, path) -> GoodsFlow:
    obj = _expect_obj(value, path)
    _check_keys(obj, {"internal", "external_sales"}, path)
    internal = {}
    for k, entry in enumerate(_expect_list(obj.get("internal", []), f"{path}.internal")):
        epath = f"{path}.internal[{k}]"
        e = _expect_obj(entry, epath)
        _check_keys(e, {"from", "to", "bundle"}, epath)
        edge = (_expect_str(e.get("from"), f"{epath}.from"), _expect_str(e.get("to"), f"{epath}.to"))
        if edge in internal:
            raise ParseError(f"duplicate edge {edge}", epath)
        internal[edge] = _parse_bundle(e.get("bundle", {}), f"{epath}.bundle")
    sales = {
        cid: _parse_bundle(bundle, f"{path}.external_sales.{cid}")
        for cid, bundle in _expect_obj(obj.get("external_sales", {}), f"{path}.external_sales").items()
    }
    try:
        return GoodsFlow(internal=internal, external_sales=sales)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def _parse_value_flow(value, path) -> ValueFlow:
    transfers = {}
    for k, entry in enumerate(_expect_list(value, path)):
        epath = f"{path}[{k}]"
        e = _expect_obj(entry, epath)
        _check_keys(e, {"payer", "payee", "amount"}, epath)
        pair = (_expect_str(e.get("payer"), f"{epath}.payer"), _expect_str(e.get("payee"), f"{epath}.payee"))
        if pair in transfers:
            raise ParseError(f"duplicate transfer {pair}", epath)
        transfers[pair] = _parse_rational(e.get("amount"), f"{epath}.amount")
    try:
        return ValueFlow(transfers)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def _parse_company(obj, path) -> CompanySpec:
    _check_keys(
        obj,
        {"id", "name", "producible", "endowment", "passthrough", "recipes", "benefit", "cost"},
        path,
    )
    cid = _expect_str(obj.get("id"), f"{path}.id")
    recipes = []
    for k, entry in enumerate(_expect_list(obj.get("recipes", []), f"{path}.recipes")):
        rpath = f"{path}.recipes[{k}]"
        r = _expect_obj(entry, rpath)
        _check_keys(r, {"inputs", "outputs", "max_uses", "priority"}, rpath)
        recipes.append(
            Recipe(
                inputs=_parse_bundle(r.get("inputs", {}), f"{rpath}.inputs"),
                outputs=_parse_bundle(r.get("outputs", {}), f"{rpath}.outputs"),
                max_uses=_parse_maybe_unbounded(r.get("max_uses", "unbounded"), f"{rpath}.max_uses"),
                priority=_parse_count(r.get("priority", k + 1), f"{rpath}.priority"),
            )
        )
    benefit = {}
    for gid, entry in _expect_obj(obj.get("benefit", {}), f"{path}.benefit").items():
        bpath = f"{path}.benefit.{gid}"
        b = _expect_obj(entry, bpath)
        _check_keys(b, {"price", "cap"}, bpath)
        benefit[gid] = (
            _parse_rational(b.get("price", 0), f"{bpath}.price"),
            _parse_maybe_unbounded(b.get("cap", "unbounded"), f"{bpath}.cap"),
        )
    cost_obj = _expect_obj(obj.get("cost", {}), f"{path}.cost")
    _check_keys(cost_obj, {"per_input", "per_output", "fixed"}, f"{path}.cost")
    cost = CostSpec(
        per_input={
            gid: _parse_rational(v, f"{path}.cost.per_input.{gid}")
            for gid, v in _expect_obj(cost_obj.get("per_input", {}), f"{path}.cost.per_input").items()
        },
        per_output={
            gid: _parse_rational(v, f"{path}.cost.per_output.{gid}")
            for gid, v in _expect_obj(cost_obj.get("per_output", {}), f"{path}.cost.per_output").items()
        },
        fixed=_parse_rational(cost_obj.get("fixed", 0), f"{path}.cost.fixed"),
    )
    passthrough = obj.get("passthrough", False)
    if not isinstance(passthrough, bool):
        raise ParseError("passthrough must be a boolean", f"{path}.passthrough")
    producible = [
        _expect_str(g, f"{path}.producible[{k}]")
        for k, g in enumerate(_expect_list(obj.get("producible", []), f"{path}.producible"))
    ]
    return CompanySpec(
        id=cid,
        name=_expect_str(obj.get("name", cid), f"{path}.name"),
        producible=frozenset(producible),
        transformation=Transformation(recipes=tuple(recipes), passthrough=passthrough),
        benefit=BenefitSpec(benefit),
        cost=cost,
        endowment=_parse_bundle(obj.get("endowment", {}), f"{path}.endowment"),
    )


def _resolve(doc: ScenarioDocument) -> None:
    """Cross-reference checks; unresolved ids are semantic errors."""
    registry = doc.game.good_ids()
    companies = set(c.id for c in doc.game.companies)

    def check_goods(vec: GoodVector, where: str):
        for gid in vec:
            if gid not in registry:
                raise SemanticError(f"{where}: good {gid!r} never declared")

    def check_company(cid: str, where: str):
        if cid not in companies:
            raise SemanticError(f"{where}: company {cid!r} never declared")

    for c in doc.game.companies:
        for gid in c.producible:
            if gid not in registry:
                raise SemanticError(f"company {c.id}: producible good {gid!r} never declared")
        check_goods(c.endowment, f"company {c.id} endowment")
        for r in c.transformation.recipes:
            check_goods(r.inputs, f"company {c.id} recipe inputs")
            check_goods(r.outputs, f"company {c.id} recipe outputs")
        for gid in c.benefit.per_good:
            if gid not in registry:
                raise SemanticError(f"company {c.id}: priced good {gid!r} never declared")
        for gid in list(c.cost.per_input) + list(c.cost.per_output):
            if gid not in registry:
                raise SemanticError(f"company {c.id}: cost good {gid!r} never declared")

    flows = []
    if doc.baseline is not None:
        flows.append(("baseline", doc.baseline.goods))
        for payer, payee in doc.baseline.value.internal:
            check_company(payer, "baseline value")
            check_company(payee, "baseline value")
    if doc.improved is not None:
        flows.append(("improved", doc.improved))
    for label, flow in flows:
        for (a, b), vec in flow.internal.items():
            check_company(a, f"{label} goods")
            check_company(b, f"{label} goods")
            check_goods(vec, f"{label} goods edge {a}->{b}")
        for cid, vec in flow.external_sales.items():
            check_company(cid, f"{label} external sales")
            check_goods(vec, f"{label} external sales of {cid}")


def load_scenario(data: bytes | str) -> ScenarioDocument:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    obj = _expect_obj(raw, "$")
    _check_keys(obj, {"version", "metadata", "goods", "companies", "baseline", "improved"}, "$")
    version = obj.get("version")
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported scenario version {version!r}")

    goods = []
    for k, entry in enumerate(_expect_list(obj.get("goods", []), "$.goods")):
        gpath = f"$.goods[{k}]"
        g = _expect_obj(entry, gpath)
        _check_keys(g, {"id", "name"}, gpath)
        gid = _expect_str(g.get("id"), f"{gpath}.id")
        goods.append(GoodType(id=gid, name=_expect_str(g.get("name", gid), f"{gpath}.name")))

    companies = tuple(
        _parse_company(_expect_obj(entry, f"$.companies[{k}]"), f"$.companies[{k}]")
        for k, entry in enumerate(_expect_list(obj.get("companies", []), "$.companies"))
    )
    game = NetworkGame(goods=tuple(goods), companies=companies)

    baseline = None
    if "baseline" in obj:
        bpath = "$.baseline"
        b = _expect_obj(obj["baseline"], bpath)
        _check_keys(b, {"goods", "value"}, bpath)
        baseline = Outcome(
            game=game,
            goods=_parse_goods_flow(b.get("goods", {}), f"{bpath}.goods"),
            value=_parse_value_flow(b.get("value", []), f"{bpath}.value"),
        )
    improved = _parse_goods_flow(obj["improved"], "$.improved") if "improved" in obj else None

    metadata = _expect_obj(obj.get("metadata", {}), "$.metadata")
    for key, val in metadata.items():
        _expect_str(val, f"$.metadata.{key}")

    doc = ScenarioDocument(
        game=game, baseline=baseline, improved=improved, metadata=dict(metadata), version=version
    )
    _resolve(doc)
    return doc


# ---------------------------------------------------------------- dumping

def format_rational(x: Fraction):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _dump_maybe_unbounded(n: Optional[int]):
    return "unbounded" if n is None else n


def _dump_bundle(vec: GoodVector) -> dict:
    return {gid: n for gid, n in vec.items()}


def _dump_goods_flow(flow: GoodsFlow) -> dict:
    return {
        "internal": [
            {"from": a, "to": b, "bundle": _dump_bundle(vec)}
            for (a, b), vec in sorted(flow.internal.items())
        ],
        "external_sales": {cid: _dump_bundle(vec) for cid, vec in sorted(flow.external_sales.items())},
    }


def _dump_company(c: CompanySpec) -> dict:
    return {
        "id": c.id,
        "name": c.name,
        "producible": sorted(c.producible),
        "endowment": _dump_bundle(c.endowment),
        "passthrough": c.transformation.passthrough,
        "recipes": [
            {
                "inputs": _dump_bundle(r.inputs),
                "outputs": _dump_bundle(r.outputs),
                "max_uses": _dump_maybe_unbounded(r.max_uses),
                "priority": r.priority,
            }
            for r in sorted(c.transformation.recipes, key=lambda r: r.priority)
        ],
        "benefit": {
            gid: {"price": format_rational(price), "cap": _dump_maybe_unbounded(cap)}
            for gid, (price, cap) in sorted(c.benefit.per_good.items())
        },
        "cost": {
            "per_input": {gid: format_rational(r) for gid, r in sorted(c.cost.per_input.items())},
            "per_output": {gid: format_rational(r) for gid, r in sorted(c.cost.per_output.items())},
            "fixed": format_rational(c.cost.fixed),
        },
    }


def dump_scenario(doc: ScenarioDocument) -> bytes:
    """Canonical serialization: same document, same bytes."""
    obj: dict = {
        "version": doc.version,
        "metadata": {k: doc.metadata[k] for k in sorted(doc.metadata)},
        "goods": [{"id": g.id, "name": g.name} for g in doc.game.goods],
        "companies": [_dump_company(c) for c in doc.game.companies],
    }
    if doc.baseline is not None:
        obj["baseline"] = {
            "goods": _dump_goods_flow(doc.baseline.goods),
            "value": [
                {"payer": payer, "payee": payee, "amount": format_rational(amount)}
                for (payer, payee), amount in sorted(doc.baseline.value.internal.items())
            ],
        }
    if doc.improved is not None:
        obj["improved"] = _dump_goods_flow(doc.improved)
    return (json.dumps(obj, indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------- demo

def build_shipping_demo(
    p_c1: Fraction | int = 10,
    p_c2: Fraction | int = 12,
    p_s1: Fraction | int = 3,
    p_s2: Fraction | int = 5,
    v11: Fraction | int = 6,
    v22: Fraction | int = 8,
) -> ScenarioDocument:
    """Two shippers, two cargo owners; each owner needs one shipping
    service to turn its raw good into a sellable delivery.

    The price ordering p_s_i < v_ii < p_c_i must hold, otherwise no deal
    is worth striking for both sides.
    """
    p_c = [Fraction(p_c1), Fraction(p_c2)]
    p_s = [Fraction(p_s1), Fraction(p_s2)]
    v = [Fraction(v11), Fraction(v22)]
    for i in (0, 1):
        if not (p_s[i] < v[i] < p_c[i]):
            raise ConstraintViolation(
                f"need p_s{i + 1} < v{i + 1}{i + 1} < p_c{i + 1}, got {p_s[i]}, {v[i]}, {p_c[i]}"
            )

    goods = tuple(
        GoodType(id=gid, name=name)
        for gid, name in [
            ("deliv1", "Delivered good 1"),
            ("deliv2", "Delivered good 2"),
            ("raw1", "Raw good 1"),
            ("raw2", "Raw good 2"),
            ("svc1", "Shipping by s1"),
            ("svc2", "Shipping by s2"),
        ]
    )
    companies = []
    for i in (0, 1):
        k = i + 1
        companies.append(
            CompanySpec(
                id=f"c{k}",
                name=f"Cargo owner {k}",
                producible=frozenset({f"deliv{k}"}),
                transformation=Transformation(
                    recipes=(
                        Recipe(
                            inputs=GoodVector({f"raw{k}": 1, "svc1": 1}),
                            outputs=GoodVector({f"deliv{k}": 1}),
                            max_uses=None,
                            priority=1,
                        ),
                        Recipe(
                            inputs=GoodVector({f"raw{k}": 1, "svc2": 1}),
                            outputs=GoodVector({f"deliv{k}": 1}),
                            max_uses=None,
                            priority=2,
                        ),
                    )
                ),
                benefit=BenefitSpec({f"deliv{k}": (p_c[i], 1)}),
                endowment=GoodVector({f"raw{k}": 1}),
            )
        )
    for i in (0, 1):
        k = i + 1
        companies.append(
            CompanySpec(
                id=f"s{k}",
                name=f"Shipper {k}",
                producible=frozenset({f"svc{k}"}),
                transformation=Transformation(
                    recipes=(
                        Recipe(inputs=GoodVector(), outputs=GoodVector({f"svc{k}": 1}), max_uses=2, priority=1),
                    )
                ),
                cost=CostSpec(per_output={f"svc{k}": p_s[i]}),
            )
        )
    game = NetworkGame(goods=goods, companies=tuple(companies))
    baseline = Outcome(
        game=game,
        goods=GoodsFlow(
            internal={
                ("s1", "c1"): GoodVector({"svc1": 1}),
                ("s2", "c2"): GoodVector({"svc2": 1}),
            },
            external_sales={
                "c1": GoodVector({"deliv1": 1}),
                "c2": GoodVector({"deliv2": 1}),
            },
        ),
        value=ValueFlow({("c1", "s1"): v[0], ("c2", "s2"): v[1]}),
    )
    return ScenarioDocument(game=game, baseline=baseline, metadata={"demo": "shipping"})


# ---------------------------------------------------------------- reports

def _format_bundle(vec: GoodVector) -> str:
    if not vec:
        return "-"
    return " ".join(f"{gid}:{n}" for gid, n in vec.items())


def render_report(outcome: Outcome, format: str = "text", mode: str = "disposal") -> bytes:
    """Deterministic report of an outcome.

    text: fixed-width table sorted by company id, ending with the TNV and
    identity-gap line; structured: a scenario document that loads back.
    """
    if format == "structured":
        return dump_scenario(ScenarioDocument(game=outcome.game, baseline=outcome))
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")

    rows = []
    for cid in outcome.game.company_ids():
        g_in, g_out = node_flows(outcome, cid)
        rows.append((cid, format_rational(payoff(outcome, cid)), _format_bundle(g_in), _format_bundle(g_out)))
    header = ("company", "payoff", "goods_in", "goods_out")
    widths = [max(len(str(r[k])) for r in rows + [header]) for k in range(4)]
    lines = ["  ".join(str(v).ljust(w) for v, w in zip(row, widths)).rstrip() for row in [header] + rows]
    for violation in check_conservation(outcome, mode=mode):
        lines.append(str(violation))
    gap = format_rational(budget_identity_gap(outcome))
    lines.append(f"TNV = {format_rational(tnv(outcome))}, identity gap = {gap}")
    return ("\n".join(lines) + "\n").encode("utf-8")
