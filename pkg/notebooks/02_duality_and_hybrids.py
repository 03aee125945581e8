# %% [markdown]
# # Duality, leftover hashing and the hybrid chain
#
# Security of a 0-encryption rests on turning a MinRank instance into its
# dual: pick `H` orthogonal (blockwise) to every `A_i`, then `<H, Y>_t = <H, E>_t`
# and the public matrices drop out. This notebook checks that identity,
# computes how far the dual law is from uniform, and runs the hybrid
# samplers at a toy size where the gaps can be seen.

# %%
from minrank_pke import blockip, reductions, stattest
from minrank_pke.minrank import Params, sample_planted
from minrank_pke.rng import Rng

rng = Rng(7)
p = Params(16, 2, 1, 4)
inst = sample_planted(p, rng)
dual = reductions.duality_reduce(inst.As, inst.Y, 2, 4, rng, r=1)
print("H orthogonal to A:", all(blockip.block_ip(p.ctx, a, h).is_zero() for a in inst.As for h in dual.Hs))
print("<H,Y>_t == <H,E>_t:", list(dual.Zs) == blockip.block_ip_tuple(p.ctx, dual.Hs, inst.witness.E))

# %% [markdown]
# ## Exact distance of one block from uniform
#
# Per block, `h` is uniform in the orthogonal complement of k uniform vectors
# of F2^d (d = (n/t)^2). The probability of an l-tuple only depends on its
# rank, so the total variation sums over ranks instead of all 2^{dl} tuples.
# The ratio to `2^{k+l-d}` stays near 1/4.

# %%
for d in (4, 9, 16, 25):
    tv = stattest.duality_block_tv(d, 1, 1)
    print(f"d={d:2d}: TV = {float(tv):.3e}, TV / 2^(k+l-d) = {float(tv) / 2.0 ** (2 - d):.4f}")
print("brute force at d=4:", stattest.duality_block_tv_bruteforce(4, 1, 1))

# %% [markdown]
# ## Leftover hashing, empirically
#
# `(H, H y)` against `(H, u)` for one block: indistinguishable when `y` is
# uniform, trivially distinguishable when `y = 0`.

# %%
import numpy as np

print(stattest.lhl_empirical(16, 4, 1, rng, 20000).to_json())
print(stattest.lhl_empirical(16, 4, 8, rng, 2000, Y=np.zeros(16, dtype=np.uint8)).to_json())

# %% [markdown]
# ## Hybrids at a toy size
#
# Hyb1 (real encryption of 0) through Hyb5 (real encryption of 1). At n=8,
# t=4, r=1 the step Hyb3 -> Hyb4 is visibly broken: `R = u v^T` zeroes the
# same block-row or block-column of every component, which stacking detects.
# At real sizes this is the step covered by the dual-MinRank assumption.

# %%
chain = stattest.HybridChain(Params(8, 1, 1, 4))
dist = stattest.stacked_rank_distinguisher(3)
names = ["hyb1", "hyb2", "hyb3", "hyb4", "hyb5"]
samplers = chain.samplers()
for i in range(4):
    rep = stattest.measure_advantage(dist, samplers[i], samplers[i + 1], 400, rng)
    print(f"{names[i]} vs {names[i + 1]}: advantage {rep.advantage:.3f} +- {rep.ci95:.3f}")
