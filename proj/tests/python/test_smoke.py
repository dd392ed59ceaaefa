import math

import pytest

import abgrowth as abg


def test_expressions():
    assert abg.normalize("tower(2,1,1)") == "exp(exp(pow1mz(1)))"
    logmag, phase = abg.evaluate("exp(z)", 0.5)
    assert logmag == pytest.approx(0.5)
    assert phase == pytest.approx(0.0)
    with pytest.raises(abg.AbgError):
        abg.normalize("exp(z")


def test_growth():
    assert abg.max_modulus("exp(z)", 0.6) == pytest.approx(0.6)
    assert math.exp(abg.characteristic("exp(z)", 0.5)) == pytest.approx(0.5 / math.pi, rel=1e-9)
    est = abg.order("tower(2,1,1)")
    assert est["value"] == pytest.approx(1.0, abs=0.05)
    assert len(est["ratios"]) == 24
    assert abg.type("tower(2,2,1)", 1.0) == pytest.approx(2.0, rel=0.1)
    assert abg.evaluable_prefix("tower(3,1,1)") == 18


def test_series_and_bound():
    ez = "k = 2\nA0 = -1\nA1 = 0\nic = 1, 1\n"
    out = abg.solve(ez, 64, [0.5])
    assert out["values"][0][0] == pytest.approx(0.5, abs=1e-12)
    b = abg.bound(ez, 0.9)
    assert b["log_bound"] == pytest.approx(math.log(2) + 0.9)


def test_triples_and_scenarios():
    ok, text = abg.check_triple("iterlog:1,id,id")
    assert ok and "PASS" in text
    assert not abg.check_triple("id,id,id")[0]
    assert "thm21" in abg.scenarios()
    passed, report = abg.verify("lemma36")
    assert passed
    assert "verdict: PASS" in report
    assert len(abg.catalog()) >= 10
