# %% [markdown]
# # Attacks and cost estimates
#
# Four attacks run on real instances: brute force over `s`, brute force over
# low-rank `E`, the kernel attack and Kipnis-Shamir linearization. Closed-form
# estimates then extend the comparison to sizes nobody can run.

# %%
import math

from minrank_pke import attacks
from minrank_pke.estimators import cheapest, estimate_all, format_table, ranked
from minrank_pke.minrank import Params, sample_planted
from minrank_pke.presets import DESK64, regime_shape
from minrank_pke.rng import Rng

rng = Rng(11)

# %% [markdown]
# ## Running the attacks
#
# The kernel attack guesses `ceil(k/n)` vectors in the kernel of `E`. Each
# guess is right with probability `2^{-r ceil(k/n)}`, so the trial counts
# below should average about `2^r`.

# %%
for r in (1, 2, 3):
    trials = [attacks.kernel_attack(sample_planted(Params(24, 8, r, 4), rng), rng).trials_attempted
              for _ in range(100)]
    print(f"r={r}: mean trials {sum(trials) / len(trials):.2f} (expected {2 ** r})")

inst = sample_planted(Params(24, 2, 2, 4), rng)
print(attacks.ks_linearization(inst, rng).as_dict())
small = sample_planted(Params(4, 4, 1, 2), rng)
print(attacks.brute_force_s(small).as_dict())
print(attacks.brute_force_E(small).as_dict())

# %% [markdown]
# ## Estimates at desk64

# %%
print(format_table(estimate_all(DESK64)))
print("cheapest implemented:", cheapest(estimate_all(DESK64), implemented_only=True).attack)

# %% [markdown]
# ## The three regimes
#
# Each regime fixes how t, k and r grow with n. The cheapest classical attack
# per size is listed; regime 2 should grow like `n^{1/4} (log n)^{3/4}`.
# The `ks-xl` entry is the closed-form XL expression
# `(D+1) omega log2(r D)` with `D = k(r+1)/(n+k)`, read literally. It is an
# asymptotic shape, not a concrete count, and its small values in regime 3
# should be read as "this regime is broken by XL", not as exact work factors.

# %%
for regime in (1, 2, 3):
    print(f"regime {regime}")
    for lg in (16, 24, 32, 64):
        shape = regime_shape(regime, 1 << lg)
        best = ranked(estimate_all(shape))[0]
        print(f"  n=2^{lg}: k={shape.k} r={shape.r} -> {best.attack} 2^{best.log2_cost:.1f}")

costs = [ranked(estimate_all(regime_shape(2, 1 << lg)))[0].log2_cost for lg in (10, 14)]
ref = [math.log2((1 << lg) ** 0.25 * lg ** 0.75) for lg in (10, 14)]
print("regime 2 slope against n^(1/4) log^(3/4) n:",
      round((math.log2(costs[1]) - math.log2(costs[0])) / (ref[1] - ref[0]), 3))
