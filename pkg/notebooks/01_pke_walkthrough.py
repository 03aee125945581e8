# %% [markdown]
# # Single-bit encryption from MinRank over F2
#
# A public key is a MinRank instance `(A_1..A_k, Y)` with `Y = sum s_i A_i + E`
# and `rank(E) <= r`. The secret key is `s`. This walkthrough builds the
# `desk64` parameter set (n=64, k=4, r=3, t=16), checks its side conditions,
# and encrypts both bit values.

# %%
import numpy as np

from minrank_pke import f2mat
from minrank_pke.blockip import block_ip
from minrank_pke.formats import dump_ciphertext, dump_keypair
from minrank_pke.pke import decrypt, decryption_matrix, encrypt, keygen
from minrank_pke.presets import DESK64
from minrank_pke.rng import Rng

rng = Rng(2024)
print(DESK64.report())

# %% [markdown]
# ## The t-block inner product
#
# `<A, B>_t` cuts both matrices into a t x t grid of (n/t) x (n/t) blocks and
# takes the Frobenius inner product blockwise. Its rank is at most
# `rank(A) * rank(B)`, and this is what makes decryption of a 0 work.

# %%
ctx = DESK64.ctx
A = f2mat.sample_rank_exact(rng, 64, 2)
B = f2mat.sample_rank_exact(rng, 64, 3)
print("rank <A,B>_t =", f2mat.rank(block_ip(ctx, A, B)), "(bound 6)")
U = f2mat.sample_uniform(rng, 64, 64)
print("rank <U,B>_t for uniform U =", f2mat.rank(block_ip(ctx, U, B)))

# %% [markdown]
# ## Keys and ciphertexts
#
# A 0 is `(<R, A_1>_t, ..., <R, A_k>_t, <R, Y>_t)` for a fresh low-rank `R`; a 1 is
# k + 1 uniform t x t matrices. Decryption forms
# `M = C_{k+1} - sum s_i C_i = <R, E>_t` and answers 0 iff `rank(M) <= r^2 = 9`.

# %%
kp = keygen(DESK64, rng)
pk_bytes, sk_bytes = dump_keypair(kp)
print(f"public key {len(pk_bytes)} bytes, secret key {len(sk_bytes)} bytes")
for bit in (0, 1):
    ct = encrypt(kp.pk, bit, rng)
    M = decryption_matrix(kp.sk, ct)
    print(f"bit {bit}: ciphertext {len(dump_ciphertext(ct))} bytes, rank(M) = {f2mat.rank(M)}, "
          f"decrypts to {decrypt(kp, ct)}")

# %% [markdown]
# ## Rank of M over many encryptions
#
# Zeros stay at or below 9 by construction. For a 1, M is a uniform 16 x 16
# matrix and rank <= 9 has probability about 2^-49, so errors never show up.

# %%
ranks = {0: [], 1: []}
for _ in range(500):
    for bit in (0, 1):
        ranks[bit].append(f2mat.rank(decryption_matrix(kp.sk, encrypt(kp.pk, bit, rng))))
for bit in (0, 1):
    values, counts = np.unique(ranks[bit], return_counts=True)
    print(f"bit {bit}:", dict(zip(values.tolist(), counts.tolist())))
