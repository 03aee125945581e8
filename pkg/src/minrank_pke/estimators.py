"""Closed-form cost estimates (log2 bit operations) for MinRank attacks.

Every estimate is a formula in ``(n, k, r, omega)``; nothing is run. Entries
of kind ``"lower_bound"`` are system sizes that any algorithm handling that
system must at least write down; they are reported but never ranked.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

DEFAULT_OMEGA = 2.81


class Dims(NamedTuple):
    """Bare ``(n, k, r)``; :class:`~minrank_pke.minrank.Params` works too."""

    n: int
    k: int
    r: int


@dataclass(frozen=True)
class ComplexityEstimate:
    attack: str
    log2_cost: float
    applicable: bool
    reason: str
    omega: float
    kind: str = "estimate"
    quantum: bool = False
    implemented: bool = False

    def as_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(self.log2_cost):
            d["log2_cost"] = None
        return d


def log2_binom(a: int, b: int) -> float:
    """``log2 C(a, b)``; ``-inf`` outside ``0 <= b <= a``.

    Exact term-by-term summation when ``min(b, a - b)`` is small, Stirling's
    formula otherwise (accurate to ``O(1/b)`` bits even when ``a`` is far
    beyond float precision).
    """
    a, b = int(a), int(b)
    if b < 0 or b > a:
        return -math.inf
    b = min(b, a - b)
    if b <= 4096:
        return sum(math.log2(a - i) - math.log2(i + 1) for i in range(b))
    c = a - b
    entropy = b * (math.log2(a) - math.log2(b)) + c * math.log1p(b / c) / math.log(2)
    return entropy - 0.5 * (math.log2(2 * math.pi) + math.log2(b) + math.log2(c) - math.log2(a))


def _log2(x: float) -> float:
    return math.log2(x) if x > 0 else -math.inf


def estimate_all(params, omega: float = DEFAULT_OMEGA) -> list[ComplexityEstimate]:
    n, k, r = int(params.n), int(params.k), int(params.r)
    if n < 1 or k < 1 or not 0 <= r <= n:
        raise ValueError(f"need n >= 1, k >= 1, 0 <= r <= n (got n={n}, k={k}, r={r})")
    w = omega
    ck = math.ceil(k / n)
    out: list[ComplexityEstimate] = []

    def add(name, cost, applicable=True, reason="", **kw):
        out.append(ComplexityEstimate(name, float(cost), applicable, reason, w, **kw))

    add("brute-force-s", k + w * _log2(n), reason="2^k candidates, one rank test each",
        implemented=True)

    rank_term = 2 * n * r - r * r + r + (_log2(r) if r else 0.0)
    add("brute-force-E", rank_term + 2 * w * _log2(n),
        reason="~2^{2nr-r^2+r} low-rank matrices, one n^2 x k solve each", implemented=True)

    add("kernel", r * ck + w * _log2(k),
        reason="2^{r ceil(k/n)} trials, one k-variable solve each", implemented=True)

    unknowns = k + r * (n - r) + k * r * (n - r)
    eqs = n * (n - r)
    lin_ok = eqs >= unknowns
    add("ks-linearization", w * _log2(unknowns), lin_ok,
        f"{eqs} equations vs {unknowns} linearized unknowns", implemented=True)

    D = k * (r + 1) / (n + k)
    base = r * D
    add("ks-xl", (D + 1) * w * _log2(base) if base > 1 else math.inf, base > 1,
        f"D = k(r+1)/(n+k) = {D:.3g}" + ("" if base > 1 else "; r*D <= 1, formula degenerate"))

    d_reg = min((n - r) * r, k) + 1
    add("ks-grobner", w * log2_binom(k + r * (n - r) + d_reg, d_reg),
        reason=f"d_reg = min((n-r)r, k) + 1 = {d_reg}")

    add("minors-grobner", w * log2_binom(n * (n - r) + 1, k),
        reason="Groebner basis on the minors system")

    minors_size = 2 * log2_binom(n, r + 1)
    ml_ok = math.e * (k + r) <= n * n / (r + 1)
    add("minors-linearization", max(minors_size, w * log2_binom(k + r, r + 1)), ml_ok,
        "needs e(k+r) <= n^2/(r+1)")

    sm_size = _log2(n) + log2_binom(n, r + 1)
    sm_ok = n * (n - r) / (r + 1) >= k
    add("support-minors", max(sm_size, w * (_log2(k) + log2_binom(n, r))), sm_ok,
        "needs n(n-r)/(r+1) >= k")

    add("quantum-kernel", (r / 2) * ck, reason="Grover over kernel trials", quantum=True)

    add("minors-system-size", minors_size, reason="C(n, r+1)^2 equations", kind="lower_bound")
    add("support-minors-system-size", sm_size, reason="n C(n, r+1) equations", kind="lower_bound")
    return out


def ranked(estimates: list[ComplexityEstimate], *, quantum: bool = False,
           implemented_only: bool = False) -> list[ComplexityEstimate]:
    """Applicable ``estimate``-kind entries sorted by cost (classical by default)."""
    keep = [e for e in estimates
            if e.kind == "estimate" and e.applicable and e.quantum == quantum
            and math.isfinite(e.log2_cost) and (e.implemented or not implemented_only)]
    return sorted(keep, key=lambda e: e.log2_cost)


def cheapest(estimates: list[ComplexityEstimate], **kw) -> ComplexityEstimate:
    return ranked(estimates, **kw)[0]


def to_json(estimates: list[ComplexityEstimate]) -> str:
    return json.dumps([e.as_dict() for e in estimates], indent=2)


def format_table(estimates: list[ComplexityEstimate]) -> str:
    lines = [f"{'attack':28} {'log2 cost':>10}  {'kind':11} applicable  note"]
    for e in estimates:
        cost = f"{e.log2_cost:10.2f}" if math.isfinite(e.log2_cost) else f"{'-':>10}"
        kind = e.kind + ("/q" if e.quantum else "")
        lines.append(f"{e.attack:28} {cost}  {kind:11} {'yes' if e.applicable else 'no ':10}  {e.reason}")
    return "\n".join(lines)
