import json
import math

import pytest

from minrank_pke import estimators
from minrank_pke.estimators import Dims, cheapest, estimate_all, log2_binom, ranked
from minrank_pke.presets import DESK64


def by_name(est):
    return {e.attack: e for e in est}


def test_log2_binom_matches_math_comb():
    for a, b in [(10, 3), (100, 50), (5000, 4097), (20000, 7000), (64, 0), (64, 64)]:
        assert log2_binom(a, b) == pytest.approx(math.log2(math.comb(a, b)), abs=1e-3)
    assert log2_binom(3, 4) == -math.inf
    huge = log2_binom(2**200, 2**100)
    assert huge > 2**100


def test_desk64_values():
    e = by_name(estimate_all(DESK64))
    w = estimators.DEFAULT_OMEGA
    assert e["brute-force-s"].log2_cost == pytest.approx(4 + 6 * w)
    assert e["kernel"].log2_cost == pytest.approx(3 + w * 2)
    assert e["brute-force-E"].log2_cost == pytest.approx(384 - 9 + 3 + math.log2(3) + 12 * w)
    assert e["ks-linearization"].applicable
    assert cheapest(estimate_all(DESK64), implemented_only=True).attack == "kernel"


@pytest.mark.parametrize("name", ["brute-force-s", "brute-force-E", "kernel", "ks-linearization"])
def test_implemented_costs_monotone_in_k_and_r(name):
    for r in (1, 2, 3):
        costs = [by_name(estimate_all(Dims(64, k, r)))[name].log2_cost for k in (1, 4, 16, 64, 256)]
        assert costs == sorted(costs)
    for k in (4, 64, 200):
        costs = [by_name(estimate_all(Dims(64, k, r)))[name].log2_cost for r in (1, 2, 4, 8)]
        assert costs == sorted(costs)


def test_kernel_depends_on_ceiling():
    e1 = by_name(estimate_all(Dims(64, 64, 2)))["kernel"].log2_cost
    e2 = by_name(estimate_all(Dims(64, 65, 2)))["kernel"].log2_cost
    assert e2 - e1 > 1.9


def test_applicability_flags():
    e = by_name(estimate_all(Dims(8, 8, 2)))
    assert not e["ks-linearization"].applicable
    e = by_name(estimate_all(Dims(16, 1, 1)))
    assert not e["ks-xl"].applicable and e["ks-xl"].log2_cost == math.inf


def test_ranked_filters():
    est = estimate_all(DESK64)
    classical = ranked(est)
    assert all(not e.quantum and e.kind == "estimate" and e.applicable for e in classical)
    assert [e.log2_cost for e in classical] == sorted(e.log2_cost for e in classical)
    assert ranked(est, quantum=True)[0].attack == "quantum-kernel"
    assert all(e.implemented for e in ranked(est, implemented_only=True))
    assert {e.attack for e in est if e.kind == "lower_bound"} == {
        "minors-system-size", "support-minors-system-size"}


def test_json_and_table():
    est = estimate_all(Dims(16, 1, 1))
    data = json.loads(estimators.to_json(est))
    assert {d["attack"] for d in data} == {e.attack for e in est}
    xl = next(d for d in data if d["attack"] == "ks-xl")
    assert xl["log2_cost"] is None
    assert set(data[0]) == {"attack", "log2_cost", "applicable", "reason", "omega", "kind",
                            "quantum", "implemented"}
    table = estimators.format_table(est)
    assert "kernel" in table and table.count("\n") == len(est)


def test_omega_changes_costs():
    a = by_name(estimate_all(DESK64, omega=2.0))["kernel"].log2_cost
    b = by_name(estimate_all(DESK64, omega=3.0))["kernel"].log2_cost
    assert b - a == pytest.approx(2.0)


def test_invalid_dims():
    with pytest.raises(ValueError):
        estimate_all(Dims(4, 0, 1))
