"""Built-in invariant suites run by ``minrank-pke selftest``.

Each check returns ``(passed, detail)``. The ``fast`` level uses small
sample counts (well under a minute); ``full`` uses the sizes of the test
suite's acceptance checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import attacks, blockip, f2mat, reductions
from .estimators import cheapest, estimate_all
from .f2mat import BitMatrix
from .minrank import Params, PlantedInstance, sample_planted, verify_solution
from .pke import decrypt, encrypt, keygen
from .presets import DESK64
from .rng import Rng
from .stattest import duality_block_tv, duality_block_tv_bruteforce

LEVELS = {"fast": 1, "full": 10}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _schoolbook(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0
            for x in range(a.shape[1]):
                acc ^= int(a[i, x]) & int(b[x, j])
            out[i, j] = acc
    return out


def check_mul(rng: Rng, scale: int):
    bad = 0
    for _ in range(20 * scale):
        n, m, p = (int(x) for x in rng.integers(1, 33, size=3))
        a, b = f2mat.sample_uniform(rng, n, m), f2mat.sample_uniform(rng, m, p)
        bad += not np.array_equal((a @ b).to_array(), _schoolbook(a.to_array(), b.to_array()))
    return bad == 0, f"{bad} mismatches vs schoolbook"


def check_rank_kernel(rng: Rng, scale: int):
    bad = 0
    for _ in range(50 * scale):
        m = f2mat.sample_uniform(rng, int(rng.integers(1, 20)), int(rng.integers(1, 20)))
        ker = f2mat.kernel_basis(m)
        if ker.rows != m.cols - f2mat.rank(m):
            bad += 1
        elif ker.rows and (m @ ker.T).weight():
            bad += 1
    return bad == 0, f"{bad} rank-nullity / kernel failures"


def check_kron_form(rng: Rng, scale: int):
    bad = 0
    for n, t in ((4, 2), (6, 3), (8, 4)):
        ctx = blockip.BlockIpContext(n, t)
        sel = blockip.build_selector(ctx)
        for _ in range(10 * scale):
            a, b = f2mat.sample_uniform(rng, n, n), f2mat.sample_uniform(rng, n, n)
            bad += blockip.block_ip(ctx, a, b) != sel.apply(a, b)
    return bad == 0, f"{bad} mismatches between block_ip and P (A kron B) P^T"


def check_rank_preservation(rng: Rng, scale: int):
    bad = 0
    ctx = blockip.BlockIpContext(8, 4)
    for _ in range(100 * scale):
        ra, rb = (int(x) for x in rng.integers(0, 4, size=2))
        a, b = f2mat.sample_rank_exact(rng, 8, ra), f2mat.sample_rank_exact(rng, 8, rb)
        bad += f2mat.rank(blockip.block_ip(ctx, a, b)) > min(ra * rb, 4)
    return bad == 0, f"{bad} violations of rank <= min(rank A rank B, t)"


def check_pke(rng: Rng, scale: int):
    kp = keygen(DESK64, rng)
    n = 100 * scale
    zeros = sum(decrypt(kp, encrypt(kp.pk, 0, rng)) for _ in range(n))
    ones = sum(1 - decrypt(kp, encrypt(kp.pk, 1, rng)) for _ in range(n))
    return zeros == 0 and ones == 0, f"{zeros}/{n} bit-0 and {ones}/{n} bit-1 failures at desk64"


def check_duality_algebra(rng: Rng, scale: int):
    p = Params(16, 2, 1, 4)
    bad = 0
    for _ in range(10 * scale):
        inst = sample_planted(p, rng)
        dual = reductions.duality_reduce(inst.As, inst.Y, 2, 4, rng, r=1)
        expect = blockip.block_ip_tuple(p.ctx, dual.Hs, inst.witness.E)
        bad += tuple(expect) != dual.Zs
        bad += any(blockip.block_ip(p.ctx, a, h).weight() for a in inst.As for h in dual.Hs)
    return bad == 0, f"{bad} instances where <H, Y>_t != <H, E>_t or H not in the dual"


def check_search_to_decision(rng: Rng, scale: int):
    p = Params(8, 8, 1, 2)
    runs = 3 * scale
    ok = 0
    for _ in range(runs):
        inst = sample_planted(p, rng)
        s = reductions.search_from_decision(reductions.witness_distinguisher(inst.witness.s), inst, 1.0, rng)
        ok += s is not None and verify_solution(inst, s)
    return ok == runs, f"{ok}/{runs} recoveries with the witness oracle"


def check_attacks(rng: Rng, scale: int):
    ok = 0
    runs = 3 * scale
    for _ in range(runs):
        inst = sample_planted(Params(16, 8, 2, 4), rng)
        ok += attacks.kernel_attack(inst, rng, max_trials=64 * 4).success
        inst = sample_planted(Params(24, 2, 2, 4), rng)
        ok += attacks.ks_linearization(inst).success
    return ok >= 2 * runs - 1, f"{ok}/{2 * runs} kernel + KS-linearization recoveries"


def check_brute_force_agree(rng: Rng, scale: int):
    bad = 0
    for _ in range(5 * scale):
        inst = sample_planted(Params(3, 2, 1, 1), rng)
        y = f2mat.sample_uniform(rng, 3, 3)
        for cand in (inst, PlantedInstance(inst.params, inst.As, y)):
            bad += attacks.brute_force_s(cand).success != attacks.brute_force_E(cand).success
    return bad == 0, f"{bad} disagreements between the two brute-force searches"


def check_estimators(rng: Rng, scale: int):
    best = cheapest(estimate_all(DESK64), implemented_only=True)
    return best.attack == "kernel", f"cheapest implemented attack at desk64: {best.attack}"


def check_exact_tv(rng: Rng, scale: int):
    a, b = duality_block_tv(4, 1, 1), duality_block_tv_bruteforce(4, 1, 1)
    return a == b, f"orbit TV {float(a):.6f} vs brute force {float(b):.6f}"


CHECKS: list[tuple[str, Callable]] = [
    ("f2mat.mul", check_mul),
    ("f2mat.rank_kernel", check_rank_kernel),
    ("blockip.kron_form", check_kron_form),
    ("blockip.rank_preservation", check_rank_preservation),
    ("pke.round_trip", check_pke),
    ("reductions.duality_algebra", check_duality_algebra),
    ("reductions.search_to_decision", check_search_to_decision),
    ("attacks.recovery", check_attacks),
    ("attacks.brute_force_agree", check_brute_force_agree),
    ("estimators.desk64", check_estimators),
    ("stattest.exact_tv", check_exact_tv),
]


def run(level: str = "fast", rng: Rng | None = None) -> list[CheckResult]:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    rng = rng or Rng()
    scale = LEVELS[level]
    out = []
    for (name, fn), child in zip(CHECKS, rng.spawn(len(CHECKS))):
        start = time.perf_counter()
        try:
            passed, detail = fn(child, scale)
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(passed), detail, time.perf_counter() - start))
    return out
