import json

import pytest

import qrot


def test_cases_listed():
    assert qrot.cases() == [
        "gamma",
        "neg-inv-gamma",
        "inv-gamma",
        "neg-gamma",
        "sqrt2",
        "neg-sqrt2",
        "sqrt3",
        "neg-sqrt3",
    ]


def test_step_and_brute_period():
    # (0, 1/2) has period 10 under the golden-mean map.
    z = "(0, 1/2)"
    assert qrot.brute_period("gamma", z) == 10
    assert qrot.step("gamma", z, 10) == ("0", "1/2")


def test_decide_aperiodic_witness():
    v = qrot.decide("gamma", "(0, 1/3)")
    assert v["verdict"] == "aperiodic"
    assert v["period"] is None
    assert len(v["s_cycle"]) == 4
    assert ("0", "1/3") in v["s_cycle"]


def test_decide_periodic_matches_brute_force():
    for case, z in [("gamma", "(0, 0)"), ("neg-inv-gamma", "(0, 1/2)"), ("sqrt2", "(1/3, 1/5)")]:
        v = qrot.decide(case, z)
        assert v["verdict"] == "periodic"
        assert v["period"] == qrot.brute_period(case, z, 10**7)


def test_period_is_a_python_int():
    v = qrot.decide("sqrt3", "(0, 0)")
    assert isinstance(v["period"], int) and v["period"] == 1


def test_certify():
    c = qrot.certify("gamma", 3)
    assert c["conclusion"] == "aperiodic-found"
    assert c["Q"] == 3
    assert qrot.certify("sqrt2", 2)["conclusion"] == "all-periodic"
    assert json.dumps(qrot.certify("gamma", 3, threads=1)) == json.dumps(qrot.certify("gamma", 3, threads=2))


def test_scan():
    rows = qrot.scan("gamma", 3)
    assert len(rows) == 9
    aperiodic = {(i, j) for i, j, periodic, _ in rows if not periodic}
    assert (0, 1) in aperiodic
    assert qrot.scan_svg("gamma", 3).startswith("<svg")


def test_period_table_and_verify():
    t = qrot.period_table("inv-gamma", 2)
    assert all(r["ok"] for r in t["rows"])
    checks = qrot.verify("gamma", 20)["checks"]
    assert checks and all(c["ok"] for c in checks)


def test_thue_morse():
    assert qrot.thue_morse_check(1000)


def test_errors():
    with pytest.raises(ValueError):
        qrot.decide("gamma", "(0.5, 0)")
    with pytest.raises(ValueError):
        qrot.decide("gamma", "(2, 0)")
    with pytest.raises(ValueError):
        qrot.decide("nowhere", "(0, 0)")
