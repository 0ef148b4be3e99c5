"""Parameters of the clique-family construction at edge probability p != 1/2.

For coprime ``u > v >= 1`` and ``h >= 1``: ``a = 2uh``, ``t = h(2u - v)``,
``gamma = (a - 1) / (2a - 2t - 1)`` and ``p`` is the root in (0, 1) of
``p = (1 - p)^gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .family import FamilyParams

SOLVE_P_TOL = 1e-14
FLOOR_AMBIGUITY = 1e-6


@dataclass(frozen=True)
class GammaParams:
    u: int
    v: int
    h: int
    a: int
    t: int
    gamma: Fraction
    p: float

    @property
    def run(self) -> int:
        return self.a - self.t


def solve_p(gamma: float) -> float:
    """Root of ``p = (1 - p)^gamma`` in (0, 1) by bisection."""
    gamma = float(gamma)
    if not gamma >= 1:
        raise ValueError(f"gamma must be at least 1, got {gamma}")

    def resid(p: float) -> float:
        return p - (1 - p) ** gamma

    lo, hi = 0.0, 0.5  # resid(0) = -1 < 0 and resid(1/2) >= 0 for gamma >= 1
    if resid(hi) == 0:
        return hi
    while True:
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if resid(mid) < 0:
            lo = mid
        else:
            hi = mid
    p = lo if abs(resid(lo)) <= abs(resid(hi)) else hi
    if abs(resid(p)) > SOLVE_P_TOL:
        raise ArithmeticError(f"bisection stalled with residual {resid(p)}")
    return p


def solve_p_mp(gamma, dps: int = 50) -> mpmath.mpf:
    """High-precision root, for sequences that raise ``1/p`` to large powers."""
    with mpmath.workdps(dps):
        g = mpmath.mpf(gamma.numerator) / gamma.denominator if isinstance(gamma, Fraction) else mpmath.mpf(gamma)
        return mpmath.findroot(lambda p: p - (1 - p) ** g, (mpmath.mpf("1e-30"), mpmath.mpf("0.5")),
                               solver="anderson")


def derive_params(u: int, v: int, h: int) -> GammaParams:
    fp = FamilyParams(u, v, h)  # validates u > v >= 1, h >= 1, gcd(u, v) = 1
    a, t = fp.a, fp.t
    gamma = Fraction(a - 1, 2 * a - 2 * t - 1)
    p = solve_p(gamma)
    assert a - t == h * v and gamma > 1 and 0 < p < 0.5
    return GammaParams(u, v, h, a, t, gamma, p)


def leading_coefficient(params: GammaParams) -> float:
    """Coefficient of ``ln n`` in the maximum of the log-expectation."""
    with mpmath.workdps(40):
        p = solve_p_mp(params.gamma)
        c = 1 - params.a * mpmath.log(1 / (1 - p)) / (2 * params.run * mpmath.log(1 / p))
        return float(c)


def kstar_for(n: int, p, run: int) -> float:
    """``(ln n - ln ln n + ln(run ln(1/p))) / (run ln(1/p))``."""
    if n < 100:
        raise ValueError("need n >= 100")
    if run < 1:
        raise ValueError("run length must be positive")
    with mpmath.workdps(40):
        p = mpmath.mpf(p)
        if not 0 < p < 1:
            raise ValueError("p must lie in (0, 1)")
        ln = mpmath.log(n)
        scale = run * mpmath.log(1 / p)
        return float((ln - mpmath.log(ln) + mpmath.log(scale)) / scale)


def kstar_general(n: int, params: GammaParams) -> float:
    return kstar_for(n, solve_p_mp(params.gamma), params.run)


@dataclass(frozen=True)
class SequenceValue:
    value: int
    exact: mpmath.mpf  # the real number whose floor is taken
    ambiguous: bool  # within FLOOR_AMBIGUITY of an integer without being one

    def __int__(self) -> int:
        return self.value


def sequence_for(k: int, p, run: int, which: str) -> SequenceValue:
    """``floor(k (1/p)^(run (k + 1/2)))`` for ``which="half"``, ``floor(k (1/p)^(run k))``
    for ``which="integer"``.  ``p`` may be an mpmath number, a float or a Fraction."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if which not in ("half", "integer"):
        raise ValueError(f"which must be 'half' or 'integer', got {which!r}")
    exponent = run * (k + (0.5 if which == "half" else 0))
    digits = int(exponent * 2) + 40
    with mpmath.workdps(digits):
        if isinstance(p, Fraction):
            p = mpmath.mpf(p.numerator) / p.denominator
        x = k * (1 / mpmath.mpf(p)) ** exponent
        value = int(mpmath.floor(x))
        frac = x - value
        ambiguous = bool(frac != 0 and min(frac, 1 - frac) < FLOOR_AMBIGUITY)
    return SequenceValue(value, x, ambiguous)


def subsequences_general(k: int, params: GammaParams, which: str) -> SequenceValue:
    """The two oscillating subsequences for the family construction.

    ``p`` enters through powers as large as ``(1/p)^(run k)``; it is recomputed
    at a working precision well beyond the digits of the result so that the
    floor is correct unless ``ambiguous`` is set.
    """
    exponent = params.run * (k + 1)
    dps = int(exponent * math.log10(1 / params.p)) + 40
    return sequence_for(k, solve_p_mp(params.gamma, dps), params.run, which)
