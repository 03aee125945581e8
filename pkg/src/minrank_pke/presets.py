"""Named parameter sets and the three asymptotic regime families.

Regime generators take ``n`` (a power of two) and return concrete
:class:`Params`. Each regime fixes target shapes for ``t``, ``k`` and ``r``
(``lg = log2 n``):

========  ======================  ==================  ===================
regime    t                       k                   r
========  ======================  ==================  ===================
1         2^ceil(lg/2) ~ sqrt(n)  n / 4               n^(1/4)
2         ~ sqrt(n / lg)          n lg                (n / lg)^(1/4)
3         ~ lg^6 / 1024           n / (64 lg)         lg^3 / 64
========  ======================  ==================  ===================

:func:`regime_shape` returns these shapes as they are (what the asymptotic
cost comparisons are about). :func:`regime_params` builds a usable parameter
set: ``t`` is rounded to a power of two so that it divides ``n``, and the validator
then lowers ``k`` and ``r`` to the largest values meeting
``r^2 < t - lg`` and ``(n/t)^2 - 2k - 1 >= lg``. When no ``k, r >= 1``
survives (small ``n``), the preset falls back to ``k = r = 1`` with
``strict=False`` so the estimators can still be swept.
"""

from __future__ import annotations

import math

from .errors import ParamError
from .estimators import Dims
from .minrank import Params, log2_ceil

DESK64 = Params(n=64, k=4, r=3, t=16, strict=True)
TOY8 = Params(n=8, k=2, r=1, t=2, strict=False)

NAMED = {"desk64": DESK64, "toy8": TOY8}
REGIMES = (1, 2, 3)


def _pow2_round(x: float) -> int:
    return 1 << max(0, round(math.log2(x))) if x > 1 else 1


def regime_targets(regime: int, n: int) -> tuple[int, int, int]:
    """Unclamped ``(t, k, r)`` shapes for a regime."""
    lg = log2_ceil(n)
    if regime == 1:
        return 1 << ((lg + 1) // 2), n // 4, round(n**0.25)
    if regime == 2:
        return _pow2_round(math.sqrt(n / lg)), n * lg, round((n / lg) ** 0.25)
    if regime == 3:
        return _pow2_round(lg**6 / 1024), n // (64 * lg), lg**3 // 64
    raise ParamError(f"unknown regime {regime}; expected one of {REGIMES}")


def regime_shape(regime: int, n: int) -> Dims:
    """The regime's ``(n, k, r)`` without the side conditions, for cost sweeps."""
    if n < 4 or n & (n - 1):
        raise ParamError(f"regime presets need n a power of two >= 4, got {n}")
    _, k, r = regime_targets(regime, n)
    return Dims(n, max(1, k), max(1, r))


def regime_params(regime: int, n: int) -> Params:
    if n < 4 or n & (n - 1):
        raise ParamError(f"regime presets need n a power of two >= 4, got {n}")
    lg = log2_ceil(n)
    t, k_target, r_target = regime_targets(regime, n)
    t = min(t, n)
    k = min(k_target, ((n // t) ** 2 - 1 - lg) // 2)
    r = min(r_target, math.isqrt(max(0, t - lg - 1)))
    if k >= 1 and r >= 1:
        return Params(n=n, k=k, r=r, t=t, strict=True)
    return Params(n=n, k=max(1, min(k_target, k)), r=max(1, min(r_target, r)), t=t, strict=False)


def resolve(name: str) -> Params:
    """``desk64``, ``toy8`` or ``regime<1|2|3>:<n>``."""
    if name in NAMED:
        return NAMED[name]
    if name.startswith("regime") and ":" in name:
        head, _, size = name.partition(":")
        try:
            return regime_params(int(head[len("regime"):]), int(size, 0))
        except ValueError as exc:
            raise ParamError(f"bad regime preset {name!r}: {exc}") from exc
    raise ParamError(f"unknown preset {name!r}; expected desk64, toy8 or regime<1|2|3>:<n>")
