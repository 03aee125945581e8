"""MinRank and dual-MinRank instances: parameters, samplers, verification."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import f2mat
from .blockip import BlockIpContext, block_ip_tuple
from .errors import DimensionError, ParamError
from .f2mat import BitMatrix, MatrixTuple
from .rng import Rng


def log2_ceil(n: int) -> int:
    """Concrete stand-in for ``log n`` in the parameter conditions."""
    return max(0, math.ceil(math.log2(n))) if n > 1 else 0


@dataclass(frozen=True)
class Params:
    """Scheme / instance parameters.

    ``tau`` is the decryption threshold and defaults to ``r**2``. With
    ``strict=True`` the two asymptotic side conditions are enforced with
    ``log n`` read as ``ceil(log2 n)``:

    * ``r^2 < t - ceil(log2 n)``
    * ``(n/t)^2 - 2k - 1 >= ceil(log2 n)``
    """

    n: int
    k: int
    r: int
    t: int
    tau: int | None = None
    strict: bool = False

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "tau", self.r * self.r)
        problems = self.violations()
        if problems:
            raise ParamError("; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        if self.n < 1 or self.t < 1:
            out.append(f"n and t must be positive (n={self.n}, t={self.t})")
            return out
        if self.n % self.t:
            out.append(f"t must divide n (n={self.n}, t={self.t})")
        if self.k < 1:
            out.append(f"k must be >= 1 (k={self.k})")
        if self.r < 0 or self.r > self.n:
            out.append(f"r must lie in [0, n] (r={self.r})")
        if self.tau < 0:
            out.append(f"tau must be non-negative (tau={self.tau})")
        if self.strict and not out:
            m = self.margins()
            if m["correctness"] <= 0:
                out.append(
                    f"r^2 < t - ceil(log2 n) fails: r^2={self.r**2} >= {self.t - log2_ceil(self.n)}"
                )
            if m["duality"] < 0:
                out.append(
                    f"(n/t)^2 - 2k - 1 >= ceil(log2 n) fails: "
                    f"{(self.n // self.t) ** 2 - 2 * self.k - 1} < {log2_ceil(self.n)}"
                )
        return out

    @property
    def b(self) -> int:
        return self.n // self.t

    @property
    def ctx(self) -> BlockIpContext:
        return BlockIpContext(self.n, self.t)

    def margins(self) -> dict[str, int]:
        """Slack in each side condition; positive (correctness) / non-negative (duality) is OK."""
        lg = log2_ceil(self.n)
        return {
            "log2n": lg,
            "correctness": (self.t - lg) - self.r * self.r,
            "duality": (self.n // self.t) ** 2 - 2 * self.k - 1 - lg,
        }

    def report(self) -> str:
        m = self.margins()
        lg = m["log2n"]
        lhs = (self.n // self.t) ** 2 - 2 * self.k - 1
        return "\n".join([
            f"n={self.n} k={self.k} r={self.r} t={self.t} tau={self.tau} strict={self.strict}",
            f"t divides n: {self.n % self.t == 0}",
            f"r^2 < t - ceil(log2 n): {self.r**2} < {self.t - lg}  (margin {m['correctness']})",
            f"(n/t)^2 - 2k - 1 >= ceil(log2 n): {lhs} >= {lg}  (margin {m['duality']})",
        ])

    def relaxed(self) -> Params:
        return replace(self, strict=False)


@dataclass(frozen=True, eq=False)
class Witness:
    s: np.ndarray
    E: BitMatrix


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    """``(A, Y)`` with ``Y = A(s) + E`` when a witness is attached."""

    params: Params
    As: MatrixTuple
    Y: BitMatrix
    witness: Witness | None = None

    def __post_init__(self):
        n, k = self.params.n, self.params.k
        if len(self.As) != k or self.As.shape != (n, n) or self.Y.shape != (n, n):
            raise DimensionError(f"instance does not match n={n}, k={k}")

    @property
    def k(self) -> int:
        return len(self.As)

    def error_for(self, s_prime) -> BitMatrix:
        return self.Y + self.As.combine(s_prime)

    def without_witness(self) -> PlantedInstance:
        return replace(self, witness=None)

    def permuted(self, rng: Rng) -> tuple[MatrixTuple, np.ndarray]:
        """The k+1 matrices ``(A_1..A_k, Y)`` in a random order, plus the permutation."""
        mats = list(self.As) + [self.Y]
        perm = rng.generator.permutation(len(mats))
        return MatrixTuple([mats[i] for i in perm]), perm

    def same_as(self, other: PlantedInstance) -> bool:
        if self.params != other.params or self.As != other.As or self.Y != other.Y:
            return False
        if (self.witness is None) != (other.witness is None):
            return False
        if self.witness is None:
            return True
        return (np.array_equal(self.witness.s, other.witness.s)
                and self.witness.E == other.witness.E)


@dataclass(frozen=True, eq=False)
class DualInstance:
    """``(H, Z)`` with ``Z = <H, E>_t`` when a witness is attached."""

    Hs: MatrixTuple
    Zs: tuple[BitMatrix, ...]
    r: int
    t: int
    E: BitMatrix | None = None

    @property
    def l(self) -> int:
        return len(self.Hs)


def _bits_vector(v, k: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.uint8).reshape(-1) & 1
    if v.size != k:
        raise DimensionError(f"expected a vector of length {k}, got {v.size}")
    return v


def sample_matrices(rng: Rng, count: int, n: int) -> MatrixTuple:
    return MatrixTuple([f2mat.sample_uniform(rng, n, n) for _ in range(count)], (n, n))


def sample_planted(params: Params, rng: Rng) -> PlantedInstance:
    """``s <- F2^k, A <- (F2^{n x n})^k, E <- rank <= r``; ``Y = A(s) + E``."""
    n, k = params.n, params.k
    s = rng.bits(k)
    As = sample_matrices(rng, k, n)
    E = f2mat.sample_rank_at_most(rng, n, params.r)
    return PlantedInstance(params, As, As.combine(s) + E, Witness(s, E))


def sample_uniform_instance(params: Params, rng: Rng) -> PlantedInstance:
    n, k = params.n, params.k
    As = sample_matrices(rng, k, n)
    return PlantedInstance(params, As, f2mat.sample_uniform(rng, n, n))


def verify_solution(instance: PlantedInstance, s_prime) -> bool:
    """``rank(Y - A(s')) <= r``."""
    s_prime = _bits_vector(s_prime, instance.k)
    return f2mat.rank_at_most(instance.error_for(s_prime), instance.params.r)


def sample_dual_yes(n: int, l: int, r: int, t: int, rng: Rng) -> DualInstance:
    ctx = BlockIpContext(n, t)
    Hs = sample_matrices(rng, l, n)
    E = f2mat.sample_rank_at_most(rng, n, r)
    return DualInstance(Hs, tuple(block_ip_tuple(ctx, Hs, E)), r, t, E)


def sample_dual_no(n: int, l: int, r: int, t: int, rng: Rng) -> DualInstance:
    BlockIpContext(n, t)
    Hs = sample_matrices(rng, l, n)
    Zs = tuple(f2mat.sample_uniform(rng, t, t) for _ in range(l))
    return DualInstance(Hs, Zs, r, t)


def accidental_solution_probability(n: int, k: int, r: int) -> float:
    """Upper bound on Pr[some s' solves a uniform instance]: ``2^k * #{rank<=r} / 2^{n^2}``."""
    total = sum(f2mat.count_rank_exact(n, rho) for rho in range(min(r, n) + 1))
    return min(1.0, 2.0 ** (math.log2(total) + k - n * n))
