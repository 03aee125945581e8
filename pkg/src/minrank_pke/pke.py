"""Single-bit public-key encryption from MinRank.

KeyGen publishes ``(A, Y = A(s) + E)`` with ``rank(E) <= r`` and keeps ``s``.
A 0 is encrypted as ``(<R, A_1>_t, ..., <R, A_k>_t, <R, Y>_t)`` for a fresh
``R`` of rank at most ``r``; a 1 as ``k + 1`` uniform ``t x t`` matrices.
Decryption forms ``M = C_{k+1} - sum_i s_i C_i`` and outputs 0 iff
``rank(M) <= tau``. For a 0, ``M = <R, E>_t`` has rank at most ``r^2``, so
with the default ``tau = r^2`` zeros always decrypt correctly.

Multi-bit messages are independent single-bit encryptions. This is a
research artifact: no CCA security, no side-channel hardening.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import f2mat
from .blockip import block_ip_tuple
from .errors import DimensionError, MismatchError
from .f2mat import BitMatrix, MatrixTuple
from .minrank import Params, sample_matrices
from .rng import Rng


@dataclass(frozen=True, eq=False)
class PublicKey:
    params: Params
    As: MatrixTuple
    Y: BitMatrix

    def matrices(self) -> MatrixTuple:
        """``A' = (A_1, ..., A_k, Y)``."""
        return self.As.append(self.Y)


@dataclass(frozen=True, eq=False)
class SecretKey:
    params: Params
    s: np.ndarray


@dataclass(frozen=True, eq=False)
class KeyPair:
    pk: PublicKey
    sk: SecretKey

    @property
    def params(self) -> Params:
        return self.pk.params


@dataclass(frozen=True, eq=False)
class Ciphertext:
    Cs: tuple[BitMatrix, ...]

    def __post_init__(self):
        if not self.Cs:
            raise DimensionError("empty ciphertext")
        shape = self.Cs[0].shape
        if shape[0] != shape[1] or any(c.shape != shape for c in self.Cs):
            raise DimensionError("ciphertext components must be equal-size square matrices")

    @property
    def k(self) -> int:
        return len(self.Cs) - 1

    @property
    def t(self) -> int:
        return self.Cs[0].rows

    def __eq__(self, other) -> bool:
        return isinstance(other, Ciphertext) and self.Cs == other.Cs


def keygen(params: Params, rng: Rng) -> KeyPair:
    n, k = params.n, params.k
    As = sample_matrices(rng, k, n)
    s = rng.bits(k)
    E = f2mat.sample_rank_at_most(rng, n, params.r)
    Y = As.combine(s) + E
    return KeyPair(PublicKey(params, As, Y), SecretKey(params, s))


def encrypt(pk: PublicKey, bit: int, rng: Rng) -> Ciphertext:
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    p = pk.params
    if bit == 0:
        R = f2mat.sample_rank_at_most(rng, p.n, p.r)
        return Ciphertext(tuple(block_ip_tuple(p.ctx, pk.matrices(), R)))
    return Ciphertext(tuple(f2mat.sample_uniform(rng, p.t, p.t) for _ in range(p.k + 1)))


def decryption_matrix(sk: SecretKey, ct: Ciphertext) -> BitMatrix:
    """``M = C_{k+1} - sum_i s_i C_i``."""
    p = sk.params
    if ct.k != p.k or ct.t != p.t:
        raise MismatchError(f"ciphertext has k={ct.k}, t={ct.t}; key expects k={p.k}, t={p.t}")
    acc = ct.Cs[-1]
    for bit, c in zip(sk.s, ct.Cs[:-1]):
        acc = f2mat.scale_accumulate(acc, int(bit), c)
    return acc


def decrypt(key: KeyPair | SecretKey, ct: Ciphertext) -> int:
    sk = key.sk if isinstance(key, KeyPair) else key
    m = decryption_matrix(sk, ct)
    return 0 if f2mat.rank_at_most(m, sk.params.tau) else 1


def ciphertext_bits(params: Params) -> int:
    """Payload size of a ciphertext, ``(k + 1) t^2`` bits."""
    return (params.k + 1) * params.t**2


def public_key_bits(params: Params) -> int:
    """Payload size of a public key, ``(k + 1) n^2`` bits."""
    return (params.k + 1) * params.n**2
