"""First-moment calculus for the two-clique count X(k, l) on G(n, 1/2).

Everything is in the natural-log domain.  ``n`` is a Python int and may be far
beyond float range for intermediate factorials; ``ln n`` is taken from an
arbitrary-precision logarithm and sums are accumulated with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import mpmath
import numpy as np

LN2 = math.log(2.0)


class MomentDomainError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, trace: list[tuple[float, float]]):
        super().__init__(message)
        self.trace = trace


class TailCheckError(RuntimeError):
    pass


@lru_cache(maxsize=4096)
def ln_n(n: int) -> float:
    with mpmath.workdps(30):
        return float(mpmath.log(mpmath.mpf(n)))


def _check_integers(n: int, k: int, l: int) -> None:
    if k < 1 or l < 1 or k + l + 1 > n:
        raise MomentDomainError(f"need integers 1 <= k, l and k + l + 1 <= n (n={n}, k={k}, l={l})")


def ln_expectation_exact(n: int, k: int, l: int) -> float:
    """ln E X(k, l) for the exact expectation

    n! / (k! l! (n-k-l)!) * (n-k-l) * 2^-C(k+l, 2) * 2^-(k+l) * ((1-2^-k)(1-2^-l))^(n-k-l-1).
    """
    _check_integers(n, k, l)
    s = k + l
    ln = ln_n(n)
    terms = [s * ln]
    terms.extend(math.log1p(-i / n) for i in range(1, s))
    rest = n - s
    terms += [
        -math.lgamma(k + 1),
        -math.lgamma(l + 1),
        math.log(rest),
        -(s * (s - 1) // 2) * LN2,
        -s * LN2,
        (rest - 1) * math.log1p(-2.0 ** -k),
        (rest - 1) * math.log1p(-2.0 ** -l),
    ]
    return math.fsum(terms)


def ln_expectation_mp(n: int, k: int, l: int, dps: int = 50) -> mpmath.mpf:
    """Reference value of :func:`ln_expectation_exact` in ``dps``-digit arithmetic."""
    _check_integers(n, k, l)
    with mpmath.workdps(dps):
        N = mpmath.mpf(n)
        s = k + l
        two = mpmath.mpf(2)
        return (
            mpmath.loggamma(N + 1) - mpmath.loggamma(k + 1) - mpmath.loggamma(l + 1)
            - mpmath.loggamma(N - s + 1) + mpmath.log(N - s)
            - (s * (s - 1) // 2) * mpmath.log(two) - s * mpmath.log(two)
            + (N - s - 1) * (mpmath.log1p(-two ** -k) + mpmath.log1p(-two ** -l))
        )


def ln_expectation_grid(n: int, kmax: int) -> np.ndarray:
    """``out[k-1, l-1] = ln_expectation_exact(n, k, l)`` for 1 <= k, l <= kmax;
    ``-inf`` where k + l + 1 > n."""
    ks = np.arange(1, kmax + 1)
    smax = 2 * kmax
    i = np.arange(1, smax, dtype=np.float64)
    # falling[s] = sum_{i<s} ln(n - i) for s = 0..smax
    with np.errstate(divide="ignore", invalid="ignore"):
        falling = np.concatenate([[0.0], np.cumsum(np.concatenate([[0.0], np.log1p(-i / n)]))])
    falling = falling + np.arange(smax + 1) * ln_n(n)
    K, L = np.meshgrid(ks, ks, indexing="ij")
    S = K + L
    valid = S + 1 <= n if n <= smax + 1 else np.ones_like(S, dtype=bool)
    lg = np.array([math.lgamma(k + 1) for k in ks])
    rest = float(n) - S  # n may exceed int64; the float error is far below the term sizes
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            falling[S] - lg[K - 1] - lg[L - 1] + np.log(np.where(valid, rest, 1.0))
            - (S * (S - 1) // 2) * LN2 - S * LN2
            + (rest - 1) * (np.log1p(-np.exp2(-K.astype(float))) + np.log1p(-np.exp2(-L.astype(float))))
        )
    return np.where(valid, out, -np.inf)


def _check_real(n: int, k: float, l: float) -> None:
    if k < 1 or l < 1 or k + l > n - 1:
        raise MomentDomainError(f"need real k, l >= 1 with k + l <= n - 1 (n={n}, k={k}, l={l})")


def f(n: int, k: float, l: float) -> float:
    """Log-scale surrogate for E X(k, l) (upper bound up to an additive 1)."""
    _check_real(n, k, l)
    ln = ln_n(n)
    s = k + l
    return math.fsum([
        (s + 1) * ln, -k * math.log(k), -l * math.log(l), s,
        -s * s / 2 * LN2, -s / 2 * LN2, -(float(n) - s) * (2.0 ** -k + 2.0 ** -l),
    ])


def grad_f(n: int, k: float, l: float) -> tuple[float, float]:
    _check_real(n, k, l)
    ln = ln_n(n)
    rest = float(n) - k - l
    common = ln - (k + l) * LN2 - LN2 / 2 + 2.0 ** -k + 2.0 ** -l
    return (
        common - math.log(k) + rest * 2.0 ** -k * LN2,
        common - math.log(l) + rest * 2.0 ** -l * LN2,
    )


def hessian_f(n: int, k: float, l: float) -> tuple[tuple[float, float], tuple[float, float]]:
    _check_real(n, k, l)
    rest = float(n) - k - l
    hkk = -1 / k - LN2 - rest * 2.0 ** -k * LN2 ** 2 - 2.0 ** (1 - k) * LN2
    hll = -1 / l - LN2 - rest * 2.0 ** -l * LN2 ** 2 - 2.0 ** (1 - l) * LN2
    hkl = -LN2 - (2.0 ** -k + 2.0 ** -l) * LN2
    return ((hkk, hkl), (hkl, hll))


def is_negative_definite(h) -> bool:
    (a, b), (_, d) = h
    return a < 0 and a * d - b * b > 0


@dataclass(frozen=True)
class MomentPoint:
    n: int
    k: float
    l: float
    ln_E_exact: float | None
    f_value: float
    grad: tuple[float, float]
    hessian: tuple[tuple[float, float], tuple[float, float]]


def moment_point(n: int, k: float, l: float) -> MomentPoint:
    exact = None
    if float(k).is_integer() and float(l).is_integer() and k + l + 1 <= n:
        exact = ln_expectation_exact(n, int(k), int(l))
    return MomentPoint(n, k, l, exact, f(n, k, l), grad_f(n, k, l), hessian_f(n, k, l))


def _diag_slope(n: int, k: float) -> float:
    return grad_f(n, k, k)[0]


def _diag_curvature(n: int, k: float) -> float:
    (hkk, hkl), _ = hessian_f(n, k, k)
    return hkk + hkl


def solve_kstar(n: int, tol: float = 1e-8, max_iter: int = 200) -> float:
    """Root of k -> df/dk(k, k): Newton from log2 n, bisection whenever a step leaves
    the bracket [1, 3 log2 n] or fails to shrink the residual."""
    if n < 100:
        raise MomentDomainError("solve_kstar needs n >= 100")
    lo, hi = 1.0, min(3 * math.log2(n), (n - 1) / 2)
    if _diag_slope(n, lo) <= 0 or _diag_slope(n, hi) >= 0:
        raise ConvergenceError("derivative does not change sign on the bracket", [])
    k = math.log2(n)
    trace: list[tuple[float, float]] = []
    for _ in range(max_iter):
        r = _diag_slope(n, k)
        trace.append((k, r))
        if abs(r) <= tol:
            return k
        if r > 0:
            lo = k
        else:
            hi = k
        step = k - r / _diag_curvature(n, k)
        if not lo < step < hi:
            step = (lo + hi) / 2
        k = step
    raise ConvergenceError(f"no root after {max_iter} iterations", trace)


def kstar_asymptotic(n: int) -> float:
    ln = ln_n(n)
    return (ln - math.log(ln) + math.log(LN2)) / LN2


def subsequence_n(k: int, which: str) -> int:
    """``k 2^k`` (``which="integer"``) or ``floor(2^(k+1/2) k)`` (``which="half"``), exactly."""
    if k < 1:
        raise MomentDomainError("k must be at least 1")
    base = k << k
    if which == "integer":
        return base
    if which == "half":
        return isqrt(2 * base * base)
    raise ValueError(f"which must be 'half' or 'integer', got {which!r}")


def g(x: float) -> float:
    return x + math.exp(-x) - 1


def deviation_bound(n: int, dk: float, dl: float) -> float:
    """-(ln n / ln 2) (g(dk ln 2) + g(dl ln 2)): the leading-order drop of f away from (k*, k*)."""
    return -(ln_n(n) / LN2) * (g(dk * LN2) + g(dl * LN2))


_NEGLIGIBLE_LN = -700.0


@dataclass(frozen=True)
class UnionBound:
    n: int
    window: int
    window_sum: float
    tail_bound: float
    terms: np.ndarray  # ln E X(k, l) over the window, -inf outside the domain

    @property
    def total(self) -> float:
        return self.window_sum + self.tail_bound

    @property
    def ln_total(self) -> float:
        return math.log(self.total) if self.total > 0 else -math.inf


def union_bound(n: int) -> UnionBound:
    """Upper bound on sum over all k, l >= 1 of E X(k, l).

    Exact terms are summed over ``[1, W]^2`` with ``W = floor(3 kstar_asymptotic(n))``.
    Beyond the window, concavity of ``f`` bounds each ray of terms by a geometric
    series started at the boundary, using ``ln E <= f + 1``.  The boundary slopes
    must be negative and the exact terms must decrease across the boundary,
    otherwise :class:`TailCheckError` is raised.
    """
    if n < 100:
        raise MomentDomainError("union_bound needs n >= 100")
    W = int(3 * kstar_asymptotic(n))
    grid = ln_expectation_grid(n, W + 1)
    inner = grid[:W, :W]
    edge_out = grid[W, :W]
    edge_in = grid[W - 1, :W]
    # Terms below e^-700 vanish in double precision and their log differences are
    # dominated by rounding; the analytic slope check below covers them.
    visible = np.isfinite(edge_out) & (np.maximum(edge_in, edge_out) > _NEGLIGIBLE_LN)
    if np.any(edge_out[visible] >= edge_in[visible]):
        raise TailCheckError(f"terms do not decrease across the window boundary k = {W} (n={n})")
    tail = []
    for l in range(1, W + 1):
        if W + l > n - 1:
            continue
        fk, _ = grad_f(n, W, l)
        if fk >= 0:
            raise TailCheckError(f"df/dk({W}, {l}) = {fk} is not negative (n={n})")
        q = math.exp(fk)
        tail.append(2 * math.exp(f(n, W, l) + 1) * q / (1 - q))  # k-ray and, by symmetry, l-ray
    if 2 * W <= n - 1:
        fk, fl = grad_f(n, W, W)
        qk, ql = math.exp(fk), math.exp(fl)
        tail.append(math.exp(f(n, W, W) + 1) * qk * ql / ((1 - qk) * (1 - ql)))
    window_sum = math.fsum(np.exp(inner[inner > _NEGLIGIBLE_LN]).tolist())
    return UnionBound(n, W, window_sum, math.fsum(tail), inner)


def union_bound_sum(n: int) -> float:
    return union_bound(n).total


def ln_union_bound_sum(n: int) -> float:
    return union_bound(n).ln_total


def aux_overlap_probability(k: int, j1: int, j2: int) -> tuple[Fraction, Fraction]:
    """Probability that an outside vertex has a neighbour in each of four k-sets
    ``U1_1, U1_2, U2_1, U2_2`` where ``|U1_1 & U2_1| = j1`` and ``|U1_2 & U2_2| = j2``
    (other pairs disjoint), together with the first-order expansion
    ``1 + 2^-k (-4 + 2^(j1-k) + 2^(j2-k))``.

    Both are dyadic rationals and are returned exactly: their difference is of
    order ``2^-2k``, below double-precision resolution near 1 once k > 26.
    """
    if not (0 <= j1 <= k and 0 <= j2 <= k) or j1 + j2 < 1:
        raise MomentDomainError(f"need 0 <= j1, j2 <= k and j1 + j2 >= 1 (k={k}, j1={j1}, j2={j2})")
    p1, p2 = Fraction(1, 2 ** j1), Fraction(1, 2 ** j2)
    r1, r2 = 1 - Fraction(1, 2 ** (k - j1)), 1 - Fraction(1, 2 ** (k - j2))
    lhs = (1 - p1) * (1 - p2) + p1 * (1 - p2) * r1 ** 2 + p2 * (1 - p1) * r2 ** 2 + p1 * p2 * r1 ** 2 * r2 ** 2
    rhs = 1 + Fraction(1, 2 ** k) * (-4 + Fraction(2 ** j1, 2 ** k) + Fraction(2 ** j2, 2 ** k))
    return lhs, rhs


@dataclass(frozen=True)
class SecondMomentTerm:
    j: int
    C_j: float
    ln_B_j: float
    ln_F_j: float
    ln_A_j: float
    ratio_j: float


@dataclass(frozen=True)
class SecondMomentReport:
    k: int
    n: int
    ln_E_tilde: float
    terms: list[SecondMomentTerm]
    special: dict[str, float]
    ratio_sum: float
    pz_bound: float


MIN_SECOND_MOMENT_K = 10


def second_moment_report(k: int, dps: int = 40) -> SecondMomentReport:
    """Second-moment bookkeeping for ``X~ = X(k, k) / 2`` at ``n = k 2^k``.

    Pairs of witnesses are split by the number ``j`` of vertices their clique
    unions share.  For ``1 <= j <= 2k - 1`` the contribution ``A_j`` is bounded by

        4 (E X~)^2 F_j B_j e^(k C_j) / (C(n, 2k) C(2k, k) n^2 2^-4k),
        F_j = C(2k, j) C(n - 2k, 2k - j) C(2k - j, k - floor(j/2)) 2^C(j, 2),

    where ``B_j`` bounds the expected number of admissible pairs of common
    neighbours and ``C_j`` the excess domination exponent.  The Paley-Zygmund
    bound keeps the pairs with identical cliques (equal triplets contribute
    ``E X~``, different common neighbours the shared-sets term) explicitly.
    """
    if k < MIN_SECOND_MOMENT_K:
        raise MomentDomainError(f"second-moment report needs k >= {MIN_SECOND_MOMENT_K}")
    n = subsequence_n(k, "integer")
    with mpmath.workdps(dps):
        N = mpmath.mpf(n)
        L2 = mpmath.log(2)

        def lnC(a, b):
            return mpmath.loggamma(a + 1) - mpmath.loggamma(b + 1) - mpmath.loggamma(a - b + 1)

        ln_Et = ln_expectation_mp(n, k, k, dps) - L2
        Et = mpmath.exp(ln_Et)
        m = 2 * k
        rest = N - m
        shared_ln = (
            mpmath.loggamma(N + 1) - mpmath.log(2) - 2 * mpmath.loggamma(k + 1) - mpmath.loggamma(rest + 1)
            + mpmath.log(rest) + mpmath.log(rest - 1)
            - (m * (m - 1) // 2) * L2 - 4 * k * L2
            + 2 * (rest - 2) * mpmath.log1p(-mpmath.mpf(2) ** -k)
        )
        disjoint_ln = (
            mpmath.loggamma(N + 1) - mpmath.log(4) - 4 * mpmath.loggamma(k + 1) - mpmath.loggamma(N - 4 * k + 1)
            + 2 * mpmath.log(N) - 2 * (m * (m - 1) // 2) * L2 - 4 * k * L2
            - 4 * N * mpmath.mpf(2) ** -k
        )
        ln_denominator = lnC(N, m) + lnC(m, k) + 2 * mpmath.log(N) - 4 * k * L2
        terms = []
        ratios = []
        for j in range(1, m):
            Cj = mpmath.mpf(2) ** -(k - j) if j <= k else 1 + mpmath.mpf(2) ** -(m - j)
            e = m - j
            B = (N ** 2 * mpmath.mpf(2) ** (-4 * k) + N * mpmath.mpf(2) ** -(4 * k - j)
                 + 2 * N * e * mpmath.mpf(2) ** -(4 * k - j) + e * e * mpmath.mpf(2) ** (-2 * e))
            ln_B = mpmath.log(B)
            ln_F = lnC(m, j) + lnC(rest, e) + lnC(e, k - j // 2) + (j * (j - 1) // 2) * L2
            ln_ratio = mpmath.log(4) + ln_F + ln_B + k * Cj - ln_denominator
            ratios.append(mpmath.exp(ln_ratio))
            terms.append(SecondMomentTerm(j, float(Cj), float(ln_B), float(ln_F),
                                          float(ln_ratio + 2 * ln_Et), float(ratios[-1])))
        ratio_sum = mpmath.fsum(ratios)
        shared = mpmath.exp(shared_ln)
        pz = Et ** 2 / (Et + Et ** 2 * (1 + ratio_sum) + shared)
    return SecondMomentReport(
        k=k, n=n, ln_E_tilde=float(ln_Et), terms=terms,
        special={
            "equal_triplets": float(Et),
            "shared_sets_ln": float(shared_ln),
            "disjoint_sets_ln": float(disjoint_ln),
        },
        ratio_sum=float(ratio_sum), pz_bound=float(pz),
    )
