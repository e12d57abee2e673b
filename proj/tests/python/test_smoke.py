import pytest

import tagc

EXPLICIT_FLOW = "fun main() tag P { var x; x = 1@S; return(x) }"
PUBLIC_SUM = "fun main() tag P { var x; x = 1@P + 2@P; return(x) }"
LABEL_CREEP = (
    "fun main() tag P { var x; if (1@S == 1@S) { skip } else { skip };"
    " x = 7@P; return(x) }"
)


def test_policies_listed():
    assert tagc.policies() == ["ifc", "taint", "unit"]


def test_source_run_terminates_with_tagged_atom():
    r = tagc.run_source(PUBLIC_SUM, policy="ifc")
    assert r["kind"] == "terminate"
    assert r["value"] == 3
    assert r["tag"] == "P"


def test_explicit_flow_failstops_in_source_and_compiled():
    src = tagc.run_source(EXPLICIT_FLOW, policy="ifc")
    assert src["kind"] == "failstop"
    assert src["error"] == "IfcWriteViolation"
    for passes in ([], ["deadcode"], ["deadcode", "cse", "constprop"]):
        tgt = tagc.run_compiled(EXPLICIT_FLOW, policy="ifc", passes=passes)
        assert tgt["kind"] == "failstop"
        assert tgt["error"] == "IfcWriteViolation"


def test_label_creep_resets_after_join():
    src = tagc.run_source(LABEL_CREEP, policy="ifc")
    tgt = tagc.run_compiled(LABEL_CREEP, policy="ifc")
    assert src == {**src, **{"kind": "terminate", "value": 7, "tag": "P"}}
    assert tgt["kind"] == "terminate"
    assert (tgt["value"], tgt["tag"]) == (7, "P")


def test_traces_match_between_source_and_compiled():
    src = tagc.run_source(PUBLIC_SUM, policy="ifc", trace=True)
    tgt = tagc.run_compiled(PUBLIC_SUM, policy="ifc", trace=True)
    assert src["trace"] == tgt["trace"]
    assert src["trace"][0].startswith("call")
    assert src["trace"][-1].startswith("ret")


def test_compile_text_mentions_expected_instructions():
    text = tagc.compile_text(PUBLIC_SUM, policy="ifc")
    assert "movi 1@P" in text
    assert "ITassign" in text
    assert "ret " in text
    dot = tagc.compile_dot(PUBLIC_SUM, policy="ifc")
    assert dot.startswith("digraph")


def test_parse_errors_raise_value_errors():
    with pytest.raises(ValueError):
        tagc.run_source("fun main() tag P { var x; y = 1@P }")
    with pytest.raises(ValueError):
        tagc.compile_text("fun main() tag P {", policy="ifc")


def test_generation_is_deterministic():
    a = tagc.generate_program(7, policy="taint")
    b = tagc.generate_program(7, policy="taint")
    assert a == b
    assert "fun main()" in a


def test_small_campaign_is_clean():
    for policy in tagc.policies():
        report = tagc.diff_campaign(
            200, policy=policy, passes=["deadcode", "cse", "constprop"], fuel=2000,
            jobs=2,
        )
        assert report["mismatch"] == 0
        assert report["trace_mismatch"] == 0
        assert report["agree"] + report["inconclusive"] == 200


def test_flag_validation_is_clean():
    for policy in tagc.policies():
        report = tagc.validate_policy(policy)
        assert report["findings"] == []
        assert report["checks"] > 0


def test_dispatch_table_names_the_assign_swap():
    table = tagc.dispatch_table()
    assert "mov ITassign -> assign" in table
