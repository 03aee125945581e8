"""Reductions between MinRank variants.

* :func:`duality_reduce` maps a MinRank sample ``(A, Y)`` to a dual sample
  ``(H, <H, Y>_t)`` with ``H`` drawn from the ``<.,.>_t``-dual of ``A``.
* :func:`search_from_decision` turns a decision distinguisher into a search
  algorithm through an inner-product predictor and Goldreich-Levin list
  decoding.

Distinguishers are plain callables wrapped in :class:`Distinguisher`; three
reference flavors are provided for experiments: witness-cheating (ideal),
rank-statistic (honest, only useful at weak parameters) and coin-flip (null).
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import f2mat
from .blockip import BlockIpContext, block_ip_tuple, dual_space_block_kernels, sample_dual
from .errors import BudgetExceededError, ParamError
from .f2mat import BitMatrix, MatrixTuple
from .minrank import DualInstance, PlantedInstance, verify_solution
from .rng import Rng


@dataclass
class Distinguisher:
    """Accept/reject oracle with an optionally declared advantage ``beta``."""

    fn: Callable[[Any], bool]
    beta: float | None = None
    name: str = "distinguisher"

    def __call__(self, sample) -> bool:
        return bool(self.fn(sample))


class LockedDistinguisher(Distinguisher):
    """Serializes calls to a distinguisher that is not thread-safe."""

    def __init__(self, inner: Distinguisher):
        super().__init__(inner.fn, inner.beta, f"locked({inner.name})")
        self._lock = threading.Lock()

    def __call__(self, sample) -> bool:
        with self._lock:
            return bool(self.fn(sample))


# -- reference distinguishers -------------------------------------------------


def witness_distinguisher(s=None) -> Distinguisher:
    """Ideal MinRank oracle that cheats with a witness.

    With ``s`` bound it accepts iff ``rank(Y - A(s)) <= r``; otherwise it
    reads ``s`` from the sample's attached witness and rejects samples that
    carry none.
    """
    bound = None if s is None else np.asarray(s, dtype=np.uint8)

    def fn(inst: PlantedInstance) -> bool:
        key = bound
        if key is None:
            if inst.witness is None:
                return False
            key = inst.witness.s
        return verify_solution(inst, key)

    return Distinguisher(fn, beta=1.0, name="witness-cheating")


def coin_flip_distinguisher(rng: Rng) -> Distinguisher:
    return Distinguisher(lambda _sample: rng.bit() == 1, beta=0.0, name="coin-flip")


def dual_rank_distinguisher(threshold: int) -> Distinguisher:
    """Dual-MinRank oracle: accept iff every ``Z_i`` has rank at most ``threshold``."""

    def fn(dual: DualInstance) -> bool:
        return all(f2mat.rank_at_most(z, threshold) for z in dual.Zs)

    return Distinguisher(fn, name=f"dual-rank<={threshold}")


def hybrid_rank_distinguisher(threshold: int) -> Distinguisher:
    """Accept iff every ciphertext component of a ``(mats, cts)`` sample has rank <= threshold."""

    def fn(sample) -> bool:
        return all(f2mat.rank_at_most(c, threshold) for c in sample.cts)

    return Distinguisher(fn, name=f"ct-rank<={threshold}")


def diluted(base: Distinguisher, weight: float, rng: Rng) -> Distinguisher:
    """Run ``base`` with probability ``weight``, otherwise flip a coin.

    The advantage of the result is ``weight`` times that of ``base``.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight must lie in [0, 1]")

    def fn(sample) -> bool:
        if rng.random() < weight:
            return base(sample)
        return rng.bit() == 1

    beta = None if base.beta is None else weight * base.beta
    return Distinguisher(fn, beta=beta, name=f"diluted({base.name}, {weight:g})")


# -- duality --------------------------------------------------------------------


def duality_reduce(As: MatrixTuple, Y: BitMatrix, l: int, t: int, rng: Rng, r: int = 0) -> DualInstance:
    """``(A, Y) -> (H, <H, Y>_t)`` with ``H_1..H_l`` uniform in ``A^{perp_t}``.

    If ``Y = A(s) + E`` then ``<H, Y>_t = <H, E>_t`` exactly. The
    statistical part of the argument needs ``(n/t)^2 - k - l`` to be large;
    a warning is issued when it is not even positive.
    """
    n = Y.rows
    ctx = BlockIpContext(n, t)
    if (n // t) ** 2 - len(As) - l <= 0:
        warnings.warn(
            f"(n/t)^2 - k - l = {(n // t) ** 2 - len(As) - l} <= 0; the reduced instance "
            "is not close to a dual-MinRank sample",
            stacklevel=2,
        )
    kernels = dual_space_block_kernels(ctx, As)
    Hs = MatrixTuple([sample_dual(ctx, kernels, rng) for _ in range(l)], (n, n))
    return DualInstance(Hs, tuple(block_ip_tuple(ctx, Hs, Y)), r, t)


def minrank_distinguisher_from_dual(dual: Distinguisher, l: int, t: int, rng: Rng) -> Distinguisher:
    """MinRank distinguisher: reduce to dual MinRank, then ask ``dual``."""

    def fn(inst: PlantedInstance) -> bool:
        return dual(duality_reduce(inst.As, inst.Y, l, t, rng, inst.params.r))

    return Distinguisher(fn, beta=dual.beta, name=f"via-dual({dual.name})")


# -- search to decision ----------------------------------------------------------


def predict_inner_product(dec: Distinguisher, instance: PlantedInstance, x, rng: Rng) -> int:
    """Guess ``<s, x>`` with one distinguisher query.

    Picks ``b`` and ``M`` at random, queries ``dec`` on
    ``(A_i + x_i M, Y + b M)`` and returns ``b`` on accept, ``1 - b`` otherwise.
    """
    x = np.asarray(x, dtype=np.uint8).reshape(-1)
    if x.size != instance.k:
        raise ValueError(f"query vector has length {x.size}, expected {instance.k}")
    p = instance.params
    b = rng.bit()
    M = f2mat.sample_uniform(rng, p.n, p.n)
    As = MatrixTuple([a + M if xi & 1 else a for a, xi in zip(instance.As, x)], (p.n, p.n))
    Y = instance.Y + M if b else instance.Y
    accepted = dec(PlantedInstance(p, As, Y))
    return b if accepted else 1 - b


@dataclass(frozen=True)
class GlConfig:
    """Goldreich-Levin settings.

    ``epsilon`` is the oracle's assumed advantage over 1/2 on uniform
    queries. ``failure`` bounds the probability (union over all bits) that
    the candidate for the correct reference guess is wrong. ``max_queries``
    caps oracle calls. ``rule`` picks how the number ``m`` of reference
    vectors is sized (see :meth:`reference_count`).
    """

    epsilon: float
    failure: float = 0.5
    max_queries: int | None = None
    rule: str = "chebyshev"

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ParamError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.failure < 1.0:
            raise ParamError(f"failure must lie in (0, 1), got {self.failure}")
        if self.rule not in ("chebyshev", "chernoff"):
            raise ParamError(f"rule must be 'chebyshev' or 'chernoff', got {self.rule!r}")

    def reference_count(self, k: int) -> int:
        """Number ``m`` of reference vectors.

        ``chebyshev`` (default): the ``2^m - 1`` pairwise-independent votes per
        bit give per-bit error at most ``1 / (4 eps^2 (2^m - 1))``; ``m`` is the
        least value making the union over ``k`` bits at most ``failure``.

        ``chernoff``: the least ``m`` with ``2^m - 1 >= 32 ln(k 2^m) / eps^2``,
        the textbook repetition count for fully independent votes. Much larger;
        kept for comparison.
        """
        if self.rule == "chernoff":
            m = 1
            while (1 << m) - 1 < math.ceil(32 * math.log(k * (1 << m)) / self.epsilon**2):
                m += 1
            return m
        need = k / (4.0 * self.epsilon**2 * self.failure)
        return max(1, math.ceil(math.log2(need + 1)))


def _int_to_bits(v: int, k: int) -> np.ndarray:
    return np.array([(v >> i) & 1 for i in range(k)], dtype=np.uint8)


def goldreich_levin(pred: Callable[[np.ndarray], int], k: int, cfg: GlConfig, rng: Rng) -> list[np.ndarray]:
    """List-decode ``s`` from an oracle that predicts ``<s, x>`` with advantage ``epsilon``.

    Draws ``m`` reference vectors ``r_1..r_m``, queries ``pred(x_J + e_i)``
    for every non-empty ``J`` (``x_J = sum_{j in J} r_j``) and every bit
    ``i``, and for each of the ``2^m`` guesses of ``(<s, r_j>)_j`` sets bit
    ``i`` by majority vote. Returns the ``2^m`` candidates; when
    ``2^k <= 2^m`` it returns all of ``F2^k`` without querying.
    """
    if k < 1:
        raise ParamError("k must be positive")
    m = cfg.reference_count(k)
    if k <= m:
        return [_int_to_bits(v, k) for v in range(1 << k)]
    n_votes = (1 << m) - 1
    queries = n_votes * k
    if cfg.max_queries is not None and queries > cfg.max_queries:
        raise BudgetExceededError(f"Goldreich-Levin needs {queries} queries, budget {cfg.max_queries}")

    refs = [sum(int(b) << i for i, b in enumerate(rng.bits(k))) for _ in range(m)]
    xs = [0] * (1 << m)
    for J in range(1, 1 << m):
        low = (J & -J).bit_length() - 1
        xs[J] = xs[J & (J - 1)] ^ refs[low]

    answers = np.zeros((n_votes, k), dtype=np.int64)
    for J in range(1, 1 << m):
        for i in range(k):
            answers[J - 1, i] = pred(_int_to_bits(xs[J] ^ (1 << i), k)) & 1

    # guesses[sigma, J-1] = parity(sigma & J)
    sig = np.arange(1 << m)[:, None]
    js = np.arange(1, 1 << m)[None, :]
    guesses = (np.bitwise_count((sig & js).astype(np.uint64)) & 1).astype(np.int64)
    disagree = answers.sum(axis=0)[None, :] + guesses.sum(axis=1)[:, None] - 2 * (guesses @ answers)
    bits = (2 * disagree > n_votes).astype(np.uint8)
    return [bits[s] for s in range(1 << m)]


def search_from_decision(dec: Distinguisher, instance: PlantedInstance, beta: float, rng: Rng,
                         cfg: GlConfig | None = None) -> np.ndarray | None:
    """Recover a verifying ``s'`` using only distinguisher queries, or ``None``.

    The predictor has advantage at least ``beta / 4`` on a ``beta / 4``
    fraction of instances, so Goldreich-Levin runs with ``epsilon = beta / 4``.
    Every returned vector passes :func:`verify_solution`.
    """
    if instance.k < 1:
        raise ParamError("instance must have k >= 1")
    if cfg is None:
        eps = min(max(beta / 4.0, 1e-6), 0.5)
        cfg = GlConfig(epsilon=eps)
    candidates = goldreich_levin(lambda x: predict_inner_product(dec, instance, x, rng), instance.k, cfg, rng)
    for cand in candidates:
        if verify_solution(instance, cand):
            return cand
    return None
