import warnings

import numpy as np
import pytest

from minrank_pke import blockip, f2mat, reductions
from minrank_pke.errors import BudgetExceededError, ParamError
from minrank_pke.minrank import (
    Params, sample_dual_no, sample_dual_yes, sample_planted, sample_uniform_instance, verify_solution,
)
from minrank_pke.rng import Rng


def test_duality_algebra(rng):
    p = Params(16, 2, 1, 4)
    for _ in range(30):
        inst = sample_planted(p, rng)
        dual = reductions.duality_reduce(inst.As, inst.Y, 2, 4, rng, r=1)
        assert dual.l == 2
        for a in inst.As:
            for h in dual.Hs:
                assert blockip.block_ip(p.ctx, a, h).is_zero()
        assert list(dual.Zs) == blockip.block_ip_tuple(p.ctx, dual.Hs, inst.witness.E)


def test_duality_warns_when_dual_space_too_small(rng):
    inst = sample_planted(Params(4, 3, 1, 2), rng)
    with pytest.warns(UserWarning):
        reductions.duality_reduce(inst.As, inst.Y, 2, 2, rng)


def test_dual_rank_distinguisher(rng):
    # a rank-1 E zeroes whole rows/columns of <H, E>_t, so yes-samples have lower rank
    d = reductions.dual_rank_distinguisher(3)
    yes = sum(d(sample_dual_yes(16, 2, 1, 4, rng)) for _ in range(300))
    no = sum(d(sample_dual_no(16, 2, 1, 4, rng)) for _ in range(300))
    assert yes - no > 30


def test_minrank_from_dual(rng):
    p = Params(16, 2, 1, 4)
    dist = reductions.minrank_distinguisher_from_dual(reductions.dual_rank_distinguisher(3), 2, 4, rng)
    yes = sum(dist(sample_planted(p, rng)) for _ in range(1000))
    no = sum(dist(sample_uniform_instance(p, rng)) for _ in range(1000))
    assert yes - no > 30


def test_witness_distinguisher(rng):
    p = Params(8, 3, 1, 2)
    inst = sample_planted(p, rng)
    assert reductions.witness_distinguisher()(inst)
    assert not reductions.witness_distinguisher()(inst.without_witness())
    assert reductions.witness_distinguisher(inst.witness.s)(inst.without_witness())


def test_diluted_and_coin(rng):
    coin = reductions.coin_flip_distinguisher(rng)
    assert coin.beta == 0.0
    d = reductions.diluted(reductions.witness_distinguisher(), 0.5, rng)
    assert d.beta == 0.5
    with pytest.raises(ValueError):
        reductions.diluted(coin, 1.5, rng)


def test_predictor_with_perfect_oracle(rng):
    p = Params(8, 6, 1, 2)
    inst = sample_planted(p, rng)
    dec = reductions.witness_distinguisher(inst.witness.s)
    for _ in range(40):
        x = rng.bits(6)
        expect = int(x @ inst.witness.s) % 2
        assert reductions.predict_inner_product(dec, inst, x, rng) == expect
    with pytest.raises(ValueError):
        reductions.predict_inner_product(dec, inst, [1, 0], rng)


def test_goldreich_levin_exact_oracle(rng):
    k = 20
    s = rng.bits(k)
    cands = reductions.goldreich_levin(lambda x: int(x @ s) % 2, k, reductions.GlConfig(0.4), rng)
    assert any(np.array_equal(c, s) for c in cands)


def test_goldreich_levin_noisy_oracle(rng):
    k, eps = 16, 0.25
    s = rng.bits(k)
    noise = Rng(99)

    def pred(x):
        truth = int(x @ s) % 2
        return truth if noise.random() < 0.5 + eps else 1 - truth

    cands = reductions.goldreich_levin(pred, k, reductions.GlConfig(eps, failure=0.1), rng)
    assert any(np.array_equal(c, s) for c in cands)


def test_goldreich_levin_small_k_and_budget(rng):
    cands = reductions.goldreich_levin(lambda x: 0, 2, reductions.GlConfig(0.25), rng)
    assert len(cands) == 4
    with pytest.raises(BudgetExceededError):
        reductions.goldreich_levin(lambda x: 0, 64, reductions.GlConfig(0.01, max_queries=10), rng)
    with pytest.raises(ParamError):
        reductions.GlConfig(0.0)


def test_reference_count_monotone():
    cfg = reductions.GlConfig(0.25)
    counts = [cfg.reference_count(k) for k in (1, 8, 64, 512)]
    assert counts == sorted(counts)
    assert reductions.GlConfig(0.1).reference_count(8) > cfg.reference_count(8)


def test_search_from_decision(rng):
    p = Params(8, 8, 1, 2)
    for _ in range(5):
        inst = sample_planted(p, rng)
        s = reductions.search_from_decision(reductions.witness_distinguisher(inst.witness.s), inst, 1.0, rng)
        assert s is not None and verify_solution(inst, s)


def test_search_from_decision_coin_oracle_returns_verified_or_none(rng):
    p = Params(8, 8, 1, 2)
    inst = sample_planted(p, rng)
    s = reductions.search_from_decision(reductions.coin_flip_distinguisher(rng), inst, 1.0, rng)
    assert s is None or verify_solution(inst, s)


def test_locked_distinguisher(rng):
    inner = reductions.witness_distinguisher()
    locked = reductions.LockedDistinguisher(inner)
    inst = sample_planted(Params(8, 2, 1, 2), rng)
    assert locked(inst) == inner(inst)


def test_chernoff_rule_is_larger_and_still_decodes(rng):
    cheb = reductions.GlConfig(0.25)
    cher = reductions.GlConfig(0.25, rule="chernoff")
    assert cher.reference_count(8) > cheb.reference_count(8)
    m = cher.reference_count(8)
    assert (1 << m) - 1 >= 32 * np.log(8 * (1 << m)) / 0.25**2
    with pytest.raises(ParamError):
        reductions.GlConfig(0.25, rule="other")
    s = rng.bits(10)
    cands = reductions.goldreich_levin(lambda x: int(x @ s) % 2, 10, reductions.GlConfig(0.45, rule="chernoff"), rng)
    assert any(np.array_equal(c, s) for c in cands)
