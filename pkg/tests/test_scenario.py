import json
from fractions import Fraction

import pytest

from coopnet import (
    Outcome,
    SearchBounds,
    ValueFlow,
    brute_force_max_tnv,
    build_shipping_demo,
    check_conservation,
    dump_scenario,
    load_scenario,
    payoff,
    render_report,
    tnv,
    validate_game,
)
from coopnet.errors import ConstraintViolation, ParseError, SemanticError, VersionError


def test_demo_baseline_numbers(demo):
    assert [payoff(demo.baseline, cid) for cid in ["c1", "c2", "s1", "s2"]] == [4, 4, 3, 3]
    assert tnv(demo.baseline) == 14
    assert validate_game(demo.game) == []
    assert check_conservation(demo.baseline) == []


def test_demo_price_ordering_gate():
    with pytest.raises(ConstraintViolation):
        build_shipping_demo(10, 12, 3, 5, 2, 8)  # v11 < p_s1


def test_demo_equal_shipper_costs_leave_no_surplus():
    doc = build_shipping_demo(10, 12, 3, 3, 6, 8)
    assert tnv(doc.baseline) == 16
    best = brute_force_max_tnv(doc.game, SearchBounds(max_units_per_edge=2))
    assert best.tnv == 16


def test_load_demo_roundtrip_fields(demo):
    raw = dump_scenario(demo)
    doc = load_scenario(raw)
    assert len(doc.game.companies) == 4
    assert len(doc.game.goods) == 6
    assert doc.baseline is not None
    assert doc.baseline.goods == demo.baseline.goods
    assert doc.baseline.value == demo.baseline.value
    assert doc.metadata == {"demo": "shipping"}


def test_roundtrip_is_byte_identical(demo):
    first = dump_scenario(demo)
    second = dump_scenario(load_scenario(first))
    assert first == second


def test_load_empty_bytes_is_parse_error():
    with pytest.raises(ParseError):
        load_scenario(b"")


def test_load_rejects_unknown_version(demo):
    obj = json.loads(dump_scenario(demo))
    obj["version"] = "99"
    with pytest.raises(VersionError):
        load_scenario(json.dumps(obj))


def test_load_rejects_unknown_keys(demo):
    obj = json.loads(dump_scenario(demo))
    obj["surprise"] = 1
    with pytest.raises(ParseError):
        load_scenario(json.dumps(obj))


def test_load_rejects_floats(demo):
    raw = dump_scenario(demo).decode().replace('"fixed": 0', '"fixed": 0.5')
    with pytest.raises(ParseError):
        load_scenario(raw)


def test_load_undeclared_good_is_semantic_error(demo):
    obj = json.loads(dump_scenario(demo))
    obj["companies"][0]["endowment"]["svc3"] = 1
    with pytest.raises(SemanticError):
        load_scenario(json.dumps(obj))


def test_load_unknown_flow_company_is_semantic_error(demo):
    obj = json.loads(dump_scenario(demo))
    obj["baseline"]["value"].append({"payer": "ghost", "payee": "c1", "amount": 1})
    with pytest.raises(SemanticError):
        load_scenario(json.dumps(obj))


def test_text_report_ends_with_tnv_line(demo):
    text = render_report(demo.baseline, format="text").decode()
    assert text.endswith("TNV = 14, identity gap = 0\n")
    lines = text.splitlines()
    assert lines[0].split() == ["company", "payoff", "goods_in", "goods_out"]
    assert [line.split()[0] for line in lines[1:5]] == ["c1", "c2", "s1", "s2"]


def test_reports_never_print_float_approximations(demo):
    skewed = Outcome(
        demo.game,
        demo.baseline.goods,
        ValueFlow({("c1", "s1"): Fraction(13, 2), ("c2", "s2"): Fraction(8)}),
    )
    text = render_report(skewed, format="text").decode()
    assert "7/2" in text  # 10 - 13/2, rendered exactly
    assert "3.5" not in text and "6.5" not in text
    structured = render_report(skewed, format="structured").decode()
    assert "6.5" not in structured
    assert '"13/2"' in structured


def test_structured_report_roundtrips(demo):
    structured = render_report(demo.baseline, format="structured")
    doc = load_scenario(structured)
    assert render_report(doc.baseline, format="structured") == structured
