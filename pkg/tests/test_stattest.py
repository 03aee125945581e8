import json
from fractions import Fraction

import numpy as np
import pytest

from minrank_pke import f2mat, reductions, stattest
from minrank_pke.errors import BudgetExceededError, ParamError
from minrank_pke.minrank import Params
from minrank_pke.rng import Rng


def test_report_fields():
    rep = stattest.AdvantageReport("x", 1000, 700, 300, {"n": 8})
    assert rep.rate_yes == 0.7 and rep.rate_no == 0.3
    assert rep.advantage == pytest.approx(0.4)
    assert 0.03 < rep.ci95 < 0.06
    d = json.loads(rep.to_json())
    assert set(d) == {"test", "params", "samples", "rate_yes", "rate_no", "advantage", "ci95"}
    merged = rep.merge(rep)
    assert merged.samples == 2000 and merged.advantage == pytest.approx(0.4)


def test_measure_advantage_threads_consistent(rng):
    dist = reductions.Distinguisher(lambda x: x < 0.7, name="thr")
    yes = lambda g: g.random()
    no = lambda g: g.random() + 0.5
    single = stattest.measure_advantage(dist, yes, no, 4000, Rng(1))
    multi = stattest.measure_advantage(dist, yes, no, 4000, Rng(1), threads=4)
    assert multi.samples == single.samples == 4000
    assert abs(single.advantage - 0.5) < 0.05 and abs(multi.advantage - 0.5) < 0.05
    with pytest.raises(ParamError):
        stattest.measure_advantage(dist, yes, no, 10, rng)


def test_hybrid_chain_shapes_and_identity(rng):
    p = Params(8, 2, 1, 4)
    chain = stattest.HybridChain(p)
    for sampler in stattest.hybrid_chain_pke(p):
        s = sampler(rng)
        assert len(s.mats) == 3 and len(s.cts) == 3
        assert all(c.shape == (4, 4) for c in s.cts)
    # Hyb2 and Hyb3 are the same distribution: identical bytes for identical seeds
    for seed in range(5):
        assert chain.hyb2(Rng(seed)).to_bytes() == chain.hyb3(Rng(seed)).to_bytes()


def test_hyb3_vs_hyb4_distinguishable_at_toy_size(rng):
    p = Params(8, 1, 1, 4)
    chain = stattest.HybridChain(p)
    rep = stattest.measure_advantage(stattest.stacked_rank_distinguisher(3), chain.hyb3, chain.hyb4, 500, rng)
    assert rep.advantage > 0.5


def test_hyb1_vs_hyb2_witness_free_distinguisher_is_weak(rng):
    p = Params(16, 2, 1, 4)
    chain = stattest.HybridChain(p)
    rep = stattest.measure_advantage(reductions.hybrid_rank_distinguisher(1), chain.hyb1, chain.hyb2, 300, rng)
    assert rep.advantage <= 0.1 + rep.ci95


def test_gaussian_binomial():
    assert [stattest.gaussian_binomial(4, k) for k in range(5)] == [1, 15, 35, 15, 1]
    assert stattest.gaussian_binomial(3, 5) == 0


@pytest.mark.parametrize("d,k,l", [(4, 1, 1), (4, 2, 1), (4, 1, 2), (2, 2, 2)])
def test_orbit_tv_matches_bruteforce(d, k, l):
    assert stattest.duality_block_tv(d, k, l) == stattest.duality_block_tv_bruteforce(d, k, l)


def test_law_is_a_distribution():
    d, k, l = 9, 2, 2
    law = stattest.duality_block_law(d, k, l)
    total = sum(law(rho) * stattest.gaussian_binomial(d, rho) * stattest._spanning_tuples(rho, l)
                for rho in range(min(d, l) + 1))
    assert total == 1


def test_tv_scaling_against_lhl_shape():
    for d in (4, 9, 16):
        tv = stattest.duality_block_tv(d, 1, 1)
        ratio = float(tv) / 2.0 ** (1 + 1 - d)
        assert 1 / 8 <= ratio <= 8


def test_exact_tv_tiny_and_guard():
    half = Fraction(1, 2)
    assert stattest.exact_tv_tiny(lambda x: half, lambda x: Fraction(x), [0, 1]) == half
    with pytest.raises(BudgetExceededError):
        stattest.duality_block_tv_bruteforce(9, 2, 1)


def test_lhl_empirical(rng):
    good = stattest.lhl_empirical(16, 4, 1, rng, 20000)
    assert good.advantage < 0.03
    zero = stattest.lhl_empirical(16, 4, 8, rng, 2000, Y=np.zeros(16, dtype=np.uint8))
    assert zero.advantage > 0.9
    with pytest.raises(ParamError):
        stattest.lhl_empirical(16, 4, 1, rng, 10)
    with pytest.raises(ParamError):
        stattest.lhl_empirical(16, 3, 1, rng, 200)


def test_full_rank_probability(rng):
    p = stattest.full_rank_probability(16)
    assert 0.288 < p < 0.289
    arr = rng.generator.integers(0, 2, size=(3000, 16, 16), dtype=np.uint8)
    freq = float((f2mat.batch_rank(arr) == 16).mean())
    assert abs(freq - p) < 0.03
