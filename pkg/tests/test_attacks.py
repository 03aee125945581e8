import numpy as np
import pytest

from minrank_pke import attacks, f2mat
from minrank_pke.errors import BudgetExceededError, InapplicableError, ParamError
from minrank_pke.minrank import Params, PlantedInstance, sample_planted, verify_solution


def test_brute_force_s_and_E_recover(rng):
    for p in (Params(4, 3, 1, 2), Params(4, 4, 2, 2), Params(6, 5, 1, 3)):
        inst = sample_planted(p, rng)
        for fn in (attacks.brute_force_s, attacks.brute_force_E):
            res = fn(inst)
            assert res.success and verify_solution(inst, res.found)


def test_brute_force_agree_on_uniform(rng):
    for _ in range(20):
        inst = sample_planted(Params(3, 2, 1, 1), rng)
        cand = PlantedInstance(inst.params, inst.As, f2mat.sample_uniform(rng, 3, 3))
        assert attacks.brute_force_s(cand).success == attacks.brute_force_E(cand).success


def test_brute_force_limits(rng):
    inst = sample_planted(Params(4, 6, 1, 2), rng)
    with pytest.raises(BudgetExceededError):
        attacks.brute_force_s(inst, budget=0)
    big = sample_planted(Params(2, 31, 1, 1), rng)
    with pytest.raises(ParamError):
        attacks.brute_force_s(big)


def test_rank_enumeration_size():
    assert attacks.rank_enumeration_size(3, 1) == 1 + f2mat.count_rank_exact(3, 1)


@pytest.mark.parametrize("r", [1, 2])
def test_kernel_attack(rng, r):
    for _ in range(5):
        inst = sample_planted(Params(24, 8, r, 4), rng)
        res = attacks.kernel_attack(inst, rng, max_trials=64 << r)
        assert res.success and verify_solution(inst, res.found)
        assert 1 <= res.trials_attempted <= 64 << r


def test_kernel_attack_exhaustion(rng):
    inst = sample_planted(Params(24, 8, 3, 4), rng)
    hidden = PlantedInstance(inst.params, inst.As, f2mat.sample_uniform(rng, 24, 24))
    with pytest.raises(BudgetExceededError) as exc:
        attacks.kernel_attack(hidden, rng, max_trials=4)
    assert exc.value.result.trials_attempted == 4


def test_kernel_success_probability():
    assert attacks.kernel_success_probability(24, 8, 2) == pytest.approx(0.25)
    assert attacks.kernel_success_probability(8, 16, 1) == pytest.approx(0.25)


def test_ks_layout_counts():
    lay = attacks.KsLayout(24, 2, 2)
    assert lay.equations == 24 * 22
    assert lay.unknowns == 2 + 2 * 22 + 2 * 2 * 22
    assert lay.applicable()
    assert not attacks.KsLayout(8, 8, 2).applicable()


def test_ks_planted_assignment_satisfies_system(rng):
    hits = 0
    for _ in range(40):
        inst = sample_planted(Params(12, 2, 2, 4), rng)
        coef, rhs, lay = attacks.ks_system(inst)
        assert coef.shape == (lay.equations, lay.unknowns)
        x = attacks.ks_assignment(lay, inst.witness.s, inst.witness.E)
        if x is None:
            continue
        hits += 1
        assert np.array_equal(f2mat.matvec(coef, x), np.asarray(rhs, dtype=np.uint8))
    assert hits >= 10


def test_ks_linearization(rng):
    ok = 0
    for _ in range(10):
        inst = sample_planted(Params(24, 2, 2, 4), rng)
        res = attacks.ks_linearization(inst, rng)
        ok += res.success and verify_solution(inst, res.found)
    assert ok >= 9


def test_ks_inapplicable(rng):
    inst = sample_planted(Params(8, 8, 2, 2), rng)
    with pytest.raises(InapplicableError):
        attacks.ks_linearization(inst, rng)


def test_result_dict(rng):
    res = attacks.brute_force_s(sample_planted(Params(4, 2, 1, 2), rng))
    d = res.as_dict()
    assert d["attack"] == "brute-s" and d["success"] is True


def test_run_attack_dispatch(rng):
    inst = sample_planted(Params(4, 3, 1, 2), rng)
    for name in attacks.ATTACK_NAMES[:3]:
        assert attacks.run_attack(name, inst, rng).success
    with pytest.raises(ParamError):
        attacks.run_attack("nope", inst, rng)


@pytest.mark.parametrize("threads", [1, 3])
def test_benchmark_row(rng, threads):
    row = attacks.benchmark(Params(24, 8, 2, 4), "kernel", 12, rng, threads=threads)
    assert row.trials == 12 and row.successes == 12
    assert 1 <= row.mean_iterations <= 64
    assert row.csv_row().startswith("n=24;k=8;r=2;t=4,kernel,12,12,")
    assert list(row.as_dict()) == list(attacks.BENCHMARK_FIELDS)


def test_benchmark_counts_budget_failures(rng):
    row = attacks.benchmark(Params(4, 8, 1, 2), "brute-s", 5, rng, budget=0)
    assert row.successes == 0 and row.mean_iterations == 0
    with pytest.raises(InapplicableError):
        attacks.benchmark(Params(8, 8, 2, 2), "ks-lin", 3, rng)
    with pytest.raises(ParamError):
        attacks.benchmark(Params(8, 8, 2, 2), "kernel", 0, rng)
