"""Search for TNV-maximizing goods flows.

Bounded exhaustive enumeration is the ground truth; a deterministic
local-search improver handles larger instances. Both use the same
canonical ordering (companies by id, goods by id) so results are
reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .accounting import GoodsFlow, Outcome, ValueFlow, check_conservation, tnv
from .errors import InvalidGame, InvalidStartFlow
from .model import GoodVector, NetworkGame, apply_transformation, validate_game


@dataclass(frozen=True)
class SearchBounds:
    max_units_per_edge: int = 1
    candidate_edges: Optional[frozenset[tuple[str, str]]] = None

    def __post_init__(self):
        if self.max_units_per_edge < 1:
            raise ValueError("max_units_per_edge must be >= 1")
        if self.candidate_edges is not None:
            object.__setattr__(self, "candidate_edges", frozenset(self.candidate_edges))

    def allows(self, i: str, j: str) -> bool:
        return self.candidate_edges is None or (i, j) in self.candidate_edges


@dataclass(frozen=True)
class SearchResult:
    flow: GoodsFlow
    tnv: Fraction
    visited: int


def _slot_table(game: NetworkGame, bounds: SearchBounds):
    """Per company, the ordered (receiver, good) slots it may ship on."""
    ids = game.company_ids()
    by_id = {c.id: c for c in game.companies}
    slots = {
        i: [(j, g) for j in ids if j != i and bounds.allows(i, j) for g in sorted(by_id[i].producible)]
        for i in ids
    }
    return ids, by_id, slots


def _production_caps(game: NetworkGame, bounds: SearchBounds, by_id, ids):
    """Sound per-good upper bound on what each company can ever ship.

    Uses recipe-level availability bounds against the maximal possible
    inflow; the exact conservation check happens later per candidate.
    """
    b = bounds.max_units_per_edge
    caps = {}
    for i in ids:
        company = by_id[i]
        max_in = dict(company.endowment.items())
        for j in ids:
            if j != i and bounds.allows(j, i):
                for g in by_id[j].producible:
                    max_in[g] = max_in.get(g, 0) + b
        cap: dict[str, int] = {}
        for r in company.transformation.recipes:
            uses = r.max_uses
            for gid, need in r.inputs.items():
                avail = max_in.get(gid, 0) // need
                uses = avail if uses is None else min(uses, avail)
            if uses is None:
                uses = 0  # unbounded zero-input recipe: rejected by validate_game
            for gid, out in r.outputs.items():
                cap[gid] = cap.get(gid, 0) + out * uses
        if company.transformation.passthrough:
            for gid in company.producible:
                cap[gid] = cap.get(gid, 0) + max_in.get(gid, 0)
        caps[i] = cap
    return caps


def _out_assignments(slots_i, cap, bound):
    """All slot-count tuples with per-slot count <= bound and per-good
    totals <= cap, in lexicographic order (all zeros first)."""
    results: list[tuple[int, ...]] = []
    totals: dict[str, int] = {}
    acc: list[int] = []

    def rec(k):
        if k == len(slots_i):
            results.append(tuple(acc))
            return
        _, g = slots_i[k]
        limit = min(bound, cap.get(g, 0) - totals.get(g, 0))
        for n in range(max(limit, 0) + 1):
            acc.append(n)
            totals[g] = totals.get(g, 0) + n
            rec(k + 1)
            totals[g] -= n
            acc.pop()

    rec(0)
    return results


def enumerate_goods_flows(game: NetworkGame, bounds: SearchBounds = SearchBounds()) -> Iterator[GoodsFlow]:
    """Yield every conservation-valid goods flow within the bounds.

    Deterministic lexicographic order over the canonical slot ordering;
    the empty flow comes first. External sales are capped by both the
    per-edge bound and what the node can actually still produce.
    """
    defects = validate_game(game)
    if defects:
        raise InvalidGame(defects)
    b = bounds.max_units_per_edge
    ids, by_id, slots = _slot_table(game, bounds)
    caps = _production_caps(game, bounds, by_id, ids)
    registry = game.good_ids()
    per_company = [_out_assignments(slots[i], caps[i], b) for i in ids]

    for combo in itertools.product(*per_company):
        internal: dict[tuple[str, str], dict[str, int]] = {}
        out_totals = {i: {} for i in ids}
        for i, assignment in zip(ids, combo):
            for (j, g), n in zip(slots[i], assignment):
                if n:
                    internal.setdefault((i, j), {})[g] = n
                    out_totals[i][g] = out_totals[i].get(g, 0) + n

        residuals = {}
        feasible = True
        for i in ids:
            g_in = by_id[i].endowment
            for (a, _), vec in ((e, v) for e, v in internal.items() if e[1] == i):
                g_in = g_in + GoodVector(vec)
            produced = apply_transformation(by_id[i], g_in, registry=registry)
            shipped = GoodVector(out_totals[i])
            if not shipped <= produced:
                feasible = False
                break
            residuals[i] = produced - shipped
        if not feasible:
            continue

        internal_flow = {edge: GoodVector(vec) for edge, vec in internal.items()}
        ext_slots = [
            (i, g, min(b, residuals[i].get(g)))
            for i in ids
            for g in sorted(by_id[i].producible)
            if residuals[i].get(g)
        ]
        for ext_combo in itertools.product(*(range(limit + 1) for (_, _, limit) in ext_slots)):
            sales: dict[str, dict[str, int]] = {}
            for (i, g, _), n in zip(ext_slots, ext_combo):
                if n:
                    sales.setdefault(i, {})[g] = n
            yield GoodsFlow(
                internal=internal_flow,
                external_sales={i: GoodVector(v) for i, v in sales.items()},
            )


def brute_force_max_tnv(game: NetworkGame, bounds: SearchBounds = SearchBounds()) -> SearchResult:
    """Exhaustive optimum; ties go to the earliest flow in enumeration order."""
    best_flow = None
    best_tnv = None
    visited = 0
    for flow in enumerate_goods_flows(game, bounds):
        visited += 1
        value = tnv(Outcome(game, flow, ValueFlow.empty()))
        if best_tnv is None or value > best_tnv:
            best_flow, best_tnv = flow, value
    return SearchResult(flow=best_flow, tnv=best_tnv, visited=visited)


def _flow_to_dicts(flow: GoodsFlow):
    internal = {edge: dict(vec.items()) for edge, vec in flow.internal.items()}
    sales = {cid: dict(vec.items()) for cid, vec in flow.external_sales.items()}
    return internal, sales


def _dicts_to_flow(internal, sales) -> GoodsFlow:
    return GoodsFlow(
        internal={e: GoodVector(v) for e, v in internal.items() if any(v.values())},
        external_sales={c: GoodVector(v) for c, v in sales.items() if any(v.values())},
    )


def greedy_improve(
    game: NetworkGame,
    start: GoodsFlow,
    bounds: SearchBounds = SearchBounds(),
    max_iters: int = 1000,
) -> SearchResult:
    """Deterministic local search from a conservation-valid flow.

    Moves are +-1 unit on a single slot plus paired moves (one unit off
    one slot, one unit onto another), which is what a re-route needs.
    Stops at a local optimum or after max_iters improving steps.
    """
    defects = validate_game(game)
    if defects:
        raise InvalidGame(defects)
    if check_conservation(Outcome(game, start, ValueFlow.empty())):
        raise InvalidStartFlow("start flow violates goods conservation")

    b = bounds.max_units_per_edge
    ids, by_id, slots = _slot_table(game, bounds)
    # canonical slot order: internal slots company-major, then sink slots
    all_slots: list[tuple] = [("internal", i, j, g) for i in ids for (j, g) in slots[i]]
    all_slots += [("external", i, g) for i in ids for g in sorted(by_id[i].producible)]

    def get(internal, sales, slot) -> int:
        if slot[0] == "internal":
            return internal.get((slot[1], slot[2]), {}).get(slot[3], 0)
        return sales.get(slot[1], {}).get(slot[2], 0)

    def bump(internal, sales, slot, delta):
        if slot[0] == "internal":
            edge, g = (slot[1], slot[2]), slot[3]
            internal.setdefault(edge, {})
            internal[edge][g] = internal[edge].get(g, 0) + delta
        else:
            cid, g = slot[1], slot[2]
            sales.setdefault(cid, {})
            sales[cid][g] = sales[cid].get(g, 0) + delta

    internal, sales = _flow_to_dicts(start)
    current = _dicts_to_flow(internal, sales)
    current_tnv = tnv(Outcome(game, current, ValueFlow.empty()))
    visited = 0

    def moves():
        for slot in all_slots:
            yield (slot, +1),
            yield (slot, -1),
        for a in all_slots:
            for c in all_slots:
                if a != c:
                    yield ((a, -1), (c, +1))

    for _ in range(max_iters):
        best_move = None
        best_value = current_tnv
        for move in moves():
            ok = True
            for slot, delta in move:
                n = get(internal, sales, slot) + delta
                if n < 0 or n > b:
                    ok = False
                    break
            if not ok:
                continue
            for slot, delta in move:
                bump(internal, sales, slot, delta)
            candidate = _dicts_to_flow(internal, sales)
            for slot, delta in move:
                bump(internal, sales, slot, -delta)
            outcome = Outcome(game, candidate, ValueFlow.empty())
            if check_conservation(outcome):
                continue
            visited += 1
            value = tnv(outcome)
            if value > best_value:
                best_move, best_value = move, value
        if best_move is None:
            break
        for slot, delta in best_move:
            bump(internal, sales, slot, delta)
        current = _dicts_to_flow(internal, sales)
        current_tnv = best_value

    return SearchResult(flow=current, tnv=current_tnv, visited=visited)
