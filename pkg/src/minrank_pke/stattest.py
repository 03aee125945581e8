"""Monte-Carlo and exact statistics.

* :func:`measure_advantage` estimates ``|Pr[D(yes)=1] - Pr[D(no)=1]|`` with
  Wilson confidence intervals.
* :func:`hybrid_chain_pke` exposes the five security hybrids of the PKE as
  samplers built from the scheme's own functions.
* :func:`exact_tv_tiny` and :func:`duality_block_tv` compute total-variation
  distances exactly from analytic probabilities.
* :func:`lhl_empirical` tests the leftover-hash step of the duality argument
  with a fixed battery of statistical tests.

Toy-sized parameters cannot be hard, so hybrids that are computationally
indistinguishable in theory are often easy to tell apart here; the harness
checks the algebra of the reductions, not hardness.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from . import f2mat
from .blockip import block_ip_tuple
from .errors import BudgetExceededError, ParamError
from .f2mat import BitMatrix, MatrixTuple
from .minrank import Params, sample_matrices
from .pke import encrypt, keygen
from .reductions import Distinguisher
from .rng import Rng

MIN_SAMPLES = 100
MAX_TV_SUPPORT = 1 << 24


# -- advantage -----------------------------------------------------------------------


def wilson_halfwidth(successes: int, trials: int, alpha: float = 0.05) -> float:
    lo, hi = proportion_confint(successes, trials, alpha=alpha, method="wilson")
    return float(hi - lo) / 2.0


@dataclass
class AdvantageReport:
    """Acceptance rates on the two arms and their difference.

    ``ci95`` is the half-width of a 95% interval for the advantage, combining
    the two arms' Wilson half-widths in quadrature.
    """

    test: str
    samples: int
    accepted_yes: int
    accepted_no: int
    params: dict = field(default_factory=dict)

    @property
    def rate_yes(self) -> float:
        return self.accepted_yes / self.samples

    @property
    def rate_no(self) -> float:
        return self.accepted_no / self.samples

    @property
    def advantage(self) -> float:
        return abs(self.rate_yes - self.rate_no)

    @property
    def ci95(self) -> float:
        return math.hypot(wilson_halfwidth(self.accepted_yes, self.samples),
                          wilson_halfwidth(self.accepted_no, self.samples))

    def merge(self, other: AdvantageReport) -> AdvantageReport:
        return AdvantageReport(self.test, self.samples + other.samples,
                               self.accepted_yes + other.accepted_yes,
                               self.accepted_no + other.accepted_no, self.params)

    def as_dict(self) -> dict:
        return {"test": self.test, "params": self.params, "samples": self.samples,
                "rate_yes": self.rate_yes, "rate_no": self.rate_no,
                "advantage": self.advantage, "ci95": self.ci95}

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


Sampler = Callable[[Rng], object]


def _count_arm(dist: Distinguisher, sampler: Sampler, n: int, rng: Rng) -> int:
    return sum(1 for _ in range(n) if dist(sampler(rng)))


def measure_advantage(dist: Distinguisher, yes_sampler: Sampler, no_sampler: Sampler,
                      n_samples: int, rng: Rng, threads: int = 1, params: dict | None = None) -> AdvantageReport:
    """Run ``dist`` on ``n_samples`` i.i.d. draws from each arm.

    With ``threads > 1`` each arm is split across workers with independent
    child RNG streams; counts are added. ``dist`` must then be thread-safe
    (wrap it in :class:`LockedDistinguisher` otherwise).
    """
    if n_samples < MIN_SAMPLES:
        raise ParamError(f"n_samples must be at least {MIN_SAMPLES}")
    if threads <= 1:
        yes = _count_arm(dist, yes_sampler, n_samples, rng)
        no = _count_arm(dist, no_sampler, n_samples, rng)
    else:
        shares = [n_samples // threads + (i < n_samples % threads) for i in range(threads)]
        streams = rng.spawn(2 * threads)
        with ThreadPoolExecutor(threads) as pool:
            ys = [pool.submit(_count_arm, dist, yes_sampler, s, g) for s, g in zip(shares, streams[:threads])]
            ns = [pool.submit(_count_arm, dist, no_sampler, s, g) for s, g in zip(shares, streams[threads:])]
            yes = sum(f.result() for f in ys)
            no = sum(f.result() for f in ns)
    return AdvantageReport(dist.name, n_samples, yes, no, params or {})


# -- PKE hybrids -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HybridSample:
    """``mats`` are the k+1 public ``n x n`` matrices, ``cts`` the k+1 ``t x t`` components."""

    mats: MatrixTuple
    cts: tuple[BitMatrix, ...]

    def to_bytes(self) -> bytes:
        return b"".join(m.to_bytes() for m in list(self.mats) + list(self.cts))


def _low_rank_products(params: Params, mats: MatrixTuple, rng: Rng) -> HybridSample:
    """Shared by Hyb2 and Hyb3: ``(A', <R, A'>_t)`` with ``rank(R) <= r``."""
    R = f2mat.sample_rank_at_most(rng, params.n, params.r)
    return HybridSample(mats, tuple(block_ip_tuple(params.ctx, mats, R)))


@dataclass(frozen=True)
class HybridChain:
    params: Params

    def hyb1(self, rng: Rng) -> HybridSample:
        """Real public key, encryption of 0."""
        kp = keygen(self.params, rng)
        return HybridSample(kp.pk.matrices(), encrypt(kp.pk, 0, rng).Cs)

    def hyb2(self, rng: Rng) -> HybridSample:
        """Uniform ``A`` and an independent uniform ``Y``, ciphertext from low-rank ``R``."""
        p = self.params
        As = sample_matrices(rng, p.k, p.n)
        Y = f2mat.sample_uniform(rng, p.n, p.n)
        return _low_rank_products(p, As.append(Y), rng)

    def hyb3(self, rng: Rng) -> HybridSample:
        """Uniform ``A' = (A_1..A_{k+1})``; Hyb2 with ``Y`` renamed ``A_{k+1}``."""
        p = self.params
        return _low_rank_products(p, sample_matrices(rng, p.k + 1, p.n), rng)

    def hyb4(self, rng: Rng) -> HybridSample:
        p = self.params
        mats = sample_matrices(rng, p.k + 1, p.n)
        return HybridSample(mats, tuple(f2mat.sample_uniform(rng, p.t, p.t) for _ in range(p.k + 1)))

    def hyb5(self, rng: Rng) -> HybridSample:
        """Real public key, encryption of 1."""
        kp = keygen(self.params, rng)
        return HybridSample(kp.pk.matrices(), encrypt(kp.pk, 1, rng).Cs)

    def samplers(self) -> list[Sampler]:
        return [self.hyb1, self.hyb2, self.hyb3, self.hyb4, self.hyb5]


def hybrid_chain_pke(params: Params, rng: Rng | None = None) -> list[Sampler]:
    """Samplers for Hyb1..Hyb5 (``rng`` is accepted for API symmetry; each sampler takes its own)."""
    return HybridChain(params).samplers()


def stacked_rank_distinguisher(threshold: int) -> Distinguisher:
    """Accept iff the ciphertext components, stacked side by side or on top of
    each other, have rank at most ``threshold``.

    For ``R = u v^T`` every ``<R, A>_t`` equals ``U^T A V`` for fixed ``t``-column
    matrices ``U, V``; a zero block of ``u`` (or ``v``) zeroes the same row (or
    column) in every component, which uniform components rarely share.
    """

    def fn(sample: HybridSample) -> bool:
        h = np.concatenate([c.to_array() for c in sample.cts], axis=1)
        v = np.concatenate([c.to_array() for c in sample.cts], axis=0)
        return (f2mat.rank_at_most(BitMatrix.from_array(h), threshold)
                or f2mat.rank_at_most(BitMatrix.from_array(v), threshold))

    return Distinguisher(fn, name=f"stacked-ct-rank<={threshold}")


# -- exact total variation ----------------------------------------------------------


def exact_tv_tiny(prob_a: Callable[[object], Fraction | float], prob_b: Callable[[object], Fraction | float],
                  support: Iterable, multiplicity: Callable[[object], int] | None = None):
    """``1/2 sum_x |P_a(x) - P_b(x)|`` over an enumerated support.

    Points may stand for orbits of equal probability, weighted by
    ``multiplicity``. At most ``2^24`` points are enumerated. Exact when the
    probability functions return :class:`Fraction`.
    """
    total = 0
    for i, x in enumerate(support):
        if i >= MAX_TV_SUPPORT:
            raise BudgetExceededError(f"support exceeds {MAX_TV_SUPPORT} points")
        w = 1 if multiplicity is None else multiplicity(x)
        total += w * abs(prob_a(x) - prob_b(x))
    return total / 2


def gaussian_binomial(n: int, k: int) -> int:
    """Number of ``k``-dimensional subspaces of ``F2^n``."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= 2 ** (n - i) - 1
        den *= 2 ** (i + 1) - 1
    return num // den


def _spanning_tuples(j: int, k: int) -> int:
    """Number of ``k``-tuples that span a fixed ``j``-dimensional space."""
    out = 1
    for i in range(j):
        out *= 2**k - 2**i
    return out


def duality_block_law(d: int, k: int, l: int) -> Callable[[int], Fraction]:
    """Probability of one ``l``-tuple ``h`` of rank ``rho`` under the block law of ``H_A``.

    ``a_1..a_k`` are uniform in ``F2^d`` and ``h_1..h_l`` uniform in their
    orthogonal space; ``Pr[h]`` depends on ``h`` only through ``rho = rank(h)``:
    ``2^{-dk} sum_j #{a of rank j orthogonal to h} 2^{-l (d - j)}``.
    """

    def prob(rho: int) -> Fraction:
        acc = Fraction(0)
        for j in range(min(d - rho, k) + 1):
            count = gaussian_binomial(d - rho, j) * _spanning_tuples(j, k)
            acc += Fraction(count, 2 ** (l * (d - j)))
        return acc / 2 ** (d * k)

    return prob


def duality_block_tv(d: int, k: int, l: int) -> Fraction:
    """Exact ``TV(vec(H_A^{ij}), vec(H_R^{ij}))`` for one block of ``d = (n/t)^2`` entries."""
    uniform = Fraction(1, 2 ** (d * l))
    return exact_tv_tiny(duality_block_law(d, k, l), lambda _rho: uniform,
                         range(min(d, l) + 1),
                         lambda rho: gaussian_binomial(d, rho) * _spanning_tuples(rho, l))


def duality_block_tv_bruteforce(d: int, k: int, l: int) -> Fraction:
    """Same quantity by enumerating every ``a`` and ``h`` (cross-check; ``d(k+l) <= 20``)."""
    if d * (k + l) > 20:
        raise BudgetExceededError("brute-force TV limited to d(k+l) <= 20")
    counts: dict[tuple[int, ...], Fraction] = {}
    vecs = range(1 << d)
    from itertools import product

    for a in product(vecs, repeat=k):
        perp = [h for h in vecs if all(bin(h & x).count("1") % 2 == 0 for x in a)]
        weight = Fraction(1, 2 ** (d * k) * len(perp) ** l)
        for hs in product(perp, repeat=l):
            counts[hs] = counts.get(hs, 0) + weight
    uniform = Fraction(1, 2 ** (d * l))
    missing = 2 ** (d * l) - len(counts)
    return (sum(abs(p - uniform) for p in counts.values()) + missing * uniform) / 2


# -- leftover hash lemma -------------------------------------------------------------


def lhl_empirical(n: int, t: int, l: int, rng: Rng, n_samples: int,
                  Y: np.ndarray | None = None) -> AdvantageReport:
    """Distinguish ``(H, H vec(Y^{ij}))`` from ``(H, U)`` for one block.

    ``H`` is a uniform ``l x (n/t)^2`` seed, ``Y`` a uniform block unless
    given (``Y = 0`` shows why min-entropy is needed). The report is the
    best of three tests: output is zero; output lies in the column space of
    ``H``; empirical TV of the output histograms.
    """
    if n % t:
        raise ParamError("t must divide n")
    d = (n // t) ** 2
    if l < 1:
        raise ParamError("l must be positive")
    if n_samples < MIN_SAMPLES:
        raise ParamError(f"n_samples must be at least {MIN_SAMPLES}")
    g = rng.generator
    H = g.integers(0, 2, size=(n_samples, l, d), dtype=np.uint8)
    if Y is None:
        ys = g.integers(0, 2, size=(n_samples, d), dtype=np.uint8)
    else:
        y = np.asarray(Y, dtype=np.uint8).reshape(-1)
        if y.size != d:
            raise ParamError(f"Y block must have {d} entries")
        ys = np.broadcast_to(y, (n_samples, d))
    z_yes = (np.einsum("sld,sd->sl", H.astype(np.int64), ys.astype(np.int64)) & 1).astype(np.uint8)
    z_no = g.integers(0, 2, size=(n_samples, l), dtype=np.uint8)

    def in_colspace(z):
        base = f2mat.batch_rank(H)
        aug = f2mat.batch_rank(np.concatenate([H, z[:, :, None]], axis=2))
        return aug == base

    tests = {
        "zero-output": (int((~z_yes.any(axis=1)).sum()), int((~z_no.any(axis=1)).sum())),
        "column-space": (int(in_colspace(z_yes).sum()), int(in_colspace(z_no).sum())),
    }
    # histogram test: accept iff the output is one the yes-arm produces more often
    weights = 1 << np.arange(l, dtype=np.int64)
    ky, kn = z_yes.astype(np.int64) @ weights, z_no.astype(np.int64) @ weights
    if l <= 16:
        hy = np.bincount(ky, minlength=1 << l)
        hn = np.bincount(kn, minlength=1 << l)
        favoured = hy > hn
        tests["histogram"] = (int(hy[favoured].sum()), int(hn[favoured].sum()))
    best = max(tests, key=lambda name: abs(tests[name][0] - tests[name][1]))
    yes, no = tests[best]
    return AdvantageReport(f"lhl:{best}", n_samples, yes, no, {"n": n, "t": t, "l": l, "d": d})


def full_rank_probability(n: int) -> float:
    """``prod_{i<n} (1 - 2^{i-n})``: a uniform ``n x n`` matrix is invertible."""
    return math.prod(1 - 2.0 ** (i - n) for i in range(n))
