"""Implemented MinRank attacks.

All attacks take a :class:`PlantedInstance` (the witness, if any, is never
read) and return an :class:`AttackResult` whose ``found`` vector, when set,
always passes :func:`verify_solution`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import f2mat
from .errors import BudgetExceededError, InapplicableError, ParamError, UnderdeterminedError
from .f2mat import BitMatrix
from .minrank import PlantedInstance, verify_solution
from .rng import Rng

BRUTE_FORCE_MAX_K = 30
#: Solution spaces of larger dimension are reported as underdetermined.
MAX_ENUM_DIM = 12


@dataclass
class AttackResult:
    attack: str
    found: np.ndarray | None
    iterations: int
    wall_time: float
    trials_attempted: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.found is not None

    def as_dict(self) -> dict:
        return {
            "attack": self.attack,
            "success": self.success,
            "found": None if self.found is None else "".join(map(str, self.found.tolist())),
            "iterations": self.iterations,
            "trials_attempted": self.trials_attempted,
            "wall_time": self.wall_time,
            **self.extra,
        }


def _rank_ints_at_most(rows: list[int], bound: int) -> bool:
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            if len(basis) > bound:
                return False
            basis.sort(reverse=True)
    return True


def _checked(instance: PlantedInstance, s) -> np.ndarray:
    s = np.asarray(s, dtype=np.uint8)
    if not verify_solution(instance, s):
        raise AssertionError("attack produced a non-verifying solution")
    return s


# -- brute force -------------------------------------------------------------------


def brute_force_s(instance: PlantedInstance, budget: int | None = None) -> AttackResult:
    """Try every ``s' in F2^k`` in Gray-code order.

    Consecutive candidates differ in one coordinate, so each step updates
    ``Y - A(s')`` with a single matrix XOR.
    """
    k, r = instance.k, instance.params.r
    if k > BRUTE_FORCE_MAX_K:
        raise ParamError(f"brute force over s refuses k={k} > {BRUTE_FORCE_MAX_K}")
    start = time.perf_counter()
    a_rows = [a.to_ints() for a in instance.As]
    cur = instance.Y.to_ints()
    s = 0
    iterations = 0
    for step in range(1 << k):
        if budget is not None and iterations >= budget:
            raise BudgetExceededError(f"brute_force_s: budget of {budget} candidates exhausted")
        if step:
            bit = (step & -step).bit_length() - 1
            s ^= 1 << bit
            cur = [c ^ a for c, a in zip(cur, a_rows[bit])]
        iterations += 1
        if _rank_ints_at_most(cur, r):
            found = np.array([(s >> i) & 1 for i in range(k)], dtype=np.uint8)
            return AttackResult("brute-s", _checked(instance, found), iterations,
                                time.perf_counter() - start)
    return AttackResult("brute-s", None, iterations, time.perf_counter() - start)


def rank_enumeration_size(n: int, r: int) -> int:
    """Number of ``n x n`` matrices of rank at most ``r``."""
    return sum(f2mat.count_rank_exact(n, rho) for rho in range(min(r, n) + 1))


def _span_system(instance: PlantedInstance) -> BitMatrix:
    # columns vec(A_i): A(s) = Y - E  <=>  system @ s = vec(Y - E)
    return BitMatrix.from_array(np.stack([f2mat.vec(a) for a in instance.As], axis=1))


def brute_force_E(instance: PlantedInstance, budget: int | None = None) -> AttackResult:
    """Enumerate every ``E'`` of rank at most ``r`` and test ``Y - E'`` for membership in span(A)."""
    n, r = instance.params.n, instance.params.r
    size = rank_enumeration_size(n, r)
    if budget is not None and size > budget:
        raise BudgetExceededError(f"brute_force_E: {size} candidates exceed budget {budget}")
    start = time.perf_counter()
    system = _span_system(instance)
    iterations = 0
    for rho in range(min(r, n) + 1):
        for e in f2mat.iter_rank_exact(n, rho):
            iterations += 1
            s = f2mat.solve(system, f2mat.vec(instance.Y + e))
            if s is not None:
                return AttackResult("brute-e", _checked(instance, s), iterations,
                                    time.perf_counter() - start)
    return AttackResult("brute-e", None, iterations, time.perf_counter() - start)


# -- kernel attack ------------------------------------------------------------------


def _enumerate_affine(x0: np.ndarray, kernel: BitMatrix):
    if kernel.rows == 0:
        yield x0
        return
    basis = kernel.to_array()
    for coeffs in product((0, 1), repeat=kernel.rows):
        yield (x0 + np.asarray(coeffs, dtype=np.int64) @ basis) & 1


def kernel_trial(instance: PlantedInstance, rng: Rng) -> np.ndarray | None:
    """One kernel-attack guess.

    Samples ``ceil(k/n)`` independent vectors ``y_j`` hoping they lie in the
    kernel of the unknown ``E``, solves the ``n ceil(k/n)`` linear equations
    ``(Y - A(s)) y_j = 0`` for ``s`` and verifies the solutions.
    """
    n, k = instance.params.n, instance.k
    c = -(-k // n)
    ys = f2mat.sample_full_column_rank(rng, n, c).to_array().astype(np.int64)
    a = np.stack([m.to_array() for m in instance.As]).astype(np.int64)
    ay = (a @ ys) & 1                      # (k, n, c)
    lhs = ay.transpose(1, 2, 0).reshape(n * c, k)
    rhs = ((instance.Y.to_array().astype(np.int64) @ ys) & 1).reshape(n * c)
    sol = f2mat.solve_affine(BitMatrix.from_array(lhs), rhs)
    if sol is None:
        return None
    x0, kern = sol
    if kern.rows > MAX_ENUM_DIM:
        return None
    for cand in _enumerate_affine(x0, kern):
        if verify_solution(instance, cand):
            return cand.astype(np.uint8)
    return None


def kernel_attack(instance: PlantedInstance, rng: Rng, max_trials: int = 1 << 16) -> AttackResult:
    """Repeat :func:`kernel_trial` until success.

    Each trial succeeds with probability about ``2^{-r ceil(k/n)}``. Raises
    :class:`BudgetExceededError` after ``max_trials`` failures; the partial
    result is attached as ``exc.result``.
    """
    start = time.perf_counter()
    for trial in range(1, max_trials + 1):
        s = kernel_trial(instance, rng)
        if s is not None:
            return AttackResult("kernel", _checked(instance, s), trial,
                                time.perf_counter() - start, trials_attempted=trial)
    exc = BudgetExceededError(f"kernel attack: no success in {max_trials} trials")
    exc.result = AttackResult("kernel", None, max_trials, time.perf_counter() - start,
                              trials_attempted=max_trials)
    raise exc


# -- Kipnis-Shamir linearization ------------------------------------------------------


@dataclass(frozen=True)
class KsLayout:
    """Column layout of the linearized Kipnis-Shamir system.

    ``E(s) K(y) = 0`` where ``K`` stacks an ``r x (n-r)`` block of unknowns
    ``y`` on top of ``I_{n-r}``: column ``r + c`` of ``E`` must equal
    ``sum_m y[m, c] E[:, m]``. Unknowns are ``s`` (k), ``y`` (r(n-r)) and the
    products ``z[i, m, c] = s_i y[m, c]`` (k r (n-r)).
    """

    n: int
    k: int
    r: int

    @property
    def width(self) -> int:
        return self.n - self.r

    @property
    def equations(self) -> int:
        return self.n * self.width

    @property
    def unknowns(self) -> int:
        return self.k + self.r * self.width + self.k * self.r * self.width

    def s_index(self, i: int) -> int:
        return i

    def y_index(self, m: int, c: int) -> int:
        return self.k + m * self.width + c

    def z_index(self, i: int, m: int, c: int) -> int:
        return self.k + self.r * self.width + (i * self.r + m) * self.width + c

    def applicable(self) -> bool:
        return self.equations >= self.unknowns


def ks_system(instance: PlantedInstance) -> tuple[BitMatrix, np.ndarray, KsLayout]:
    """Coefficient matrix and right-hand side of the linearized system."""
    n, k, r = instance.params.n, instance.k, instance.params.r
    lay = KsLayout(n, k, r)
    w = lay.width
    a = np.stack([m.to_array() for m in instance.As]) if k else np.zeros((0, n, n), np.uint8)
    y = instance.Y.to_array()
    coef = np.zeros((lay.equations, lay.unknowns), dtype=np.uint8)
    rhs = np.zeros(lay.equations, dtype=np.uint8)
    for c in range(w):
        rows = slice(c * n, (c + 1) * n)
        col = r + c
        rhs[rows] = y[:, col]
        for i in range(k):
            coef[rows, lay.s_index(i)] = a[i, :, col]
        for m in range(r):
            coef[rows, lay.y_index(m, c)] = y[:, m]
            for i in range(k):
                coef[rows, lay.z_index(i, m, c)] = a[i, :, m]
    return BitMatrix.from_array(coef), rhs, lay


def ks_assignment(layout: KsLayout, s, E: BitMatrix) -> np.ndarray | None:
    """The planted assignment ``(s, y, s (x) y)``, or ``None`` if the first ``r``
    columns of ``E`` do not span its column space."""
    n, k, r = layout.n, layout.k, layout.r
    e = E.to_array()
    head = BitMatrix.from_array(e[:, :r]) if r else None
    vec = np.zeros(layout.unknowns, dtype=np.uint8)
    s = np.asarray(s, dtype=np.uint8)
    vec[:k] = s
    for c in range(layout.width):
        target = e[:, r + c]
        if r == 0:
            if target.any():
                return None
            continue
        coeffs = f2mat.solve(head, target)
        if coeffs is None:
            return None
        for m in range(r):
            vec[layout.y_index(m, c)] = coeffs[m]
            for i in range(k):
                vec[layout.z_index(i, m, c)] = s[i] & coeffs[m]
    return vec


def _permute_columns(instance: PlantedInstance, perm: np.ndarray) -> PlantedInstance:
    def pc(m: BitMatrix) -> BitMatrix:
        return BitMatrix.from_array(m.to_array()[:, perm])

    return PlantedInstance(instance.params, f2mat.MatrixTuple([pc(a) for a in instance.As], instance.As.shape),
                           pc(instance.Y))


def ks_linearization(instance: PlantedInstance, rng: Rng | None = None, max_attempts: int = 32,
                     budget: int | None = None, max_dim: int = MAX_ENUM_DIM) -> AttackResult:
    """Solve the Kipnis-Shamir bilinear system by linearization.

    The model assumes the first ``r`` columns of ``E`` span its column
    space. When an attempt finds nothing, the columns of every matrix are
    permuted at random (this keeps the solution set) and the system is
    rebuilt, up to ``max_attempts`` times.

    Raises :class:`InapplicableError` when there are fewer equations than
    linearized unknowns and :class:`UnderdeterminedError` when the solution
    space has dimension above ``max_dim``.
    """
    n, k, r = instance.params.n, instance.k, instance.params.r
    lay = KsLayout(n, k, r)
    if not lay.applicable():
        raise InapplicableError(
            f"KS linearization inapplicable: {lay.unknowns} unknowns > {lay.equations} equations"
        )
    rng = rng or Rng(0)
    start = time.perf_counter()
    iterations = 0
    current = instance
    for attempt in range(1, max_attempts + 1):
        if attempt > 1:
            current = _permute_columns(instance, rng.generator.permutation(n))
        coef, rhs, _ = ks_system(current)
        sol = f2mat.solve_affine(coef, rhs)
        if sol is None:
            continue
        x0, kern = sol
        if kern.rows > max_dim:
            raise UnderdeterminedError(f"linearized system has a {kern.rows}-dimensional solution space")
        if budget is not None and iterations + (1 << kern.rows) > budget:
            raise BudgetExceededError(f"2^{kern.rows} solutions exceed budget {budget}")
        seen = set()
        for cand in _enumerate_affine(x0, kern):
            iterations += 1
            s = cand[:k].astype(np.uint8)
            key = s.tobytes()
            if key in seen:
                continue
            seen.add(key)
            if verify_solution(instance, s):
                return AttackResult("ks-lin", _checked(instance, s), iterations, time.perf_counter() - start,
                                    trials_attempted=attempt, extra={"solution_dim": kern.rows})
    return AttackResult("ks-lin", None, iterations, time.perf_counter() - start,
                        trials_attempted=max_attempts)


def kernel_success_probability(n: int, k: int, r: int) -> float:
    """Lower bound ``2^{-r ceil(k/n)}`` on the per-trial success of the kernel attack."""
    return 2.0 ** (-r * math.ceil(k / n))


# -- dispatch and benchmarking ----------------------------------------------------------

ATTACK_NAMES = ("brute-s", "brute-e", "kernel", "ks-lin")
BENCHMARK_FIELDS = ("params", "attack", "trials", "successes", "mean_iterations", "wall_time")


def run_attack(name: str, instance: PlantedInstance, rng: Rng, trials: int = 1 << 16,
               budget: int | None = None) -> AttackResult:
    """Run one attack by CLI name; ``trials`` caps kernel guesses or KS permutations."""
    if name == "brute-s":
        return brute_force_s(instance, budget=budget)
    if name == "brute-e":
        return brute_force_E(instance, budget=budget)
    if name == "kernel":
        return kernel_attack(instance, rng, max_trials=trials)
    if name == "ks-lin":
        return ks_linearization(instance, rng, max_attempts=trials, budget=budget)
    raise ParamError(f"unknown attack {name!r}; expected one of {', '.join(ATTACK_NAMES)}")


@dataclass
class BenchmarkRow:
    """Aggregate of one attack over fresh planted instances (one CSV row)."""

    params: str
    attack: str
    trials: int
    successes: int
    mean_iterations: float
    wall_time: float

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in BENCHMARK_FIELDS}

    def csv_row(self) -> str:
        return ",".join(str(getattr(self, f)) for f in BENCHMARK_FIELDS)


def _bench_share(params, name: str, count: int, rng: Rng, trials: int, budget: int | None):
    from .minrank import sample_planted

    wins = iters = 0
    for _ in range(count):
        inst = sample_planted(params, rng)
        try:
            res = run_attack(name, inst, rng, trials, budget)
        except BudgetExceededError as exc:
            res = getattr(exc, "result", None)
            if res is None:  # brute force gives up before producing a result
                iters += budget or 0
                continue
        wins += res.success
        iters += res.iterations
    return wins, iters


def benchmark(params, name: str, repeats: int, rng: Rng, threads: int = 1,
              trials: int = 1 << 16, budget: int | None = None) -> BenchmarkRow:
    """Run ``name`` on ``repeats`` fresh planted instances.

    With ``threads > 1`` the instances are split across workers, each with
    its own child RNG stream. Budget exhaustion counts as a failure;
    inapplicable attacks raise before any work is done.
    """
    if repeats < 1:
        raise ParamError("repeats must be positive")
    if name == "ks-lin" and not KsLayout(params.n, params.k, params.r).applicable():
        lay = KsLayout(params.n, params.k, params.r)
        raise InapplicableError(
            f"KS linearization inapplicable: {lay.unknowns} unknowns > {lay.equations} equations")
    start = time.perf_counter()
    threads = max(1, min(threads, repeats))
    if threads == 1:
        wins, iters = _bench_share(params, name, repeats, rng, trials, budget)
    else:
        from concurrent.futures import ThreadPoolExecutor

        shares = [repeats // threads + (i < repeats % threads) for i in range(threads)]
        with ThreadPoolExecutor(threads) as pool:
            futures = [pool.submit(_bench_share, params, name, s, g, trials, budget)
                       for s, g in zip(shares, rng.spawn(threads))]
            parts = [f.result() for f in futures]
        wins, iters = sum(p[0] for p in parts), sum(p[1] for p in parts)
    tag = f"n={params.n};k={params.k};r={params.r};t={params.t}"
    return BenchmarkRow(tag, name, repeats, wins, iters / repeats, time.perf_counter() - start)
