import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from emsolaw import moments as M
from emsolaw.graph import enumerate_graphs
from emsolaw.witness import count_witnesses
from oracles import f_mp

QUARTER_PI = 1 / (4 * math.pi)


def test_exact_expectation_matches_exhaustive_mean():
    graphs = list(enumerate_graphs(5))
    for k in range(1, 4):
        for l in range(1, 5 - k):
            mean = Fraction(sum(count_witnesses(g, k, l) for g in graphs), len(graphs))
            assert math.exp(M.ln_expectation_exact(5, k, l)) == pytest.approx(float(mean), rel=1e-12)


def test_exact_expectation_symmetry_and_domain():
    for n in (10, 10 ** 6, 2 ** 80):
        assert M.ln_expectation_exact(n, 2, 5) == M.ln_expectation_exact(n, 5, 2)
    for bad in [(5, 0, 1), (5, 2, 3), (5, 1, 0)]:
        with pytest.raises(M.MomentDomainError):
            M.ln_expectation_exact(*bad)


def test_exact_expectation_against_high_precision():
    rs = random.Random(4)
    for _ in range(60):
        n = rs.choice([100, 10 ** 4, 2 ** 40, 2 ** 70, 2 ** 100])
        k, l = rs.randint(1, 120), rs.randint(1, 120)
        if k + l + 1 > n:
            continue
        ref = float(M.ln_expectation_mp(n, k, l))
        assert abs(M.ln_expectation_exact(n, k, l) - ref) <= 1e-10 * abs(ref) + 1e-9


def test_grid_matches_scalar():
    for n in (5, 100, 12345, 2 ** 70):
        grid = M.ln_expectation_grid(n, 8)
        for k in range(1, 9):
            for l in range(1, 9):
                if k + l + 1 <= n:
                    ref = M.ln_expectation_exact(n, k, l)
                    assert grid[k - 1, l - 1] == pytest.approx(ref, rel=1e-12, abs=1e-9)
                else:
                    assert grid[k - 1, l - 1] == -math.inf


def test_bound_by_f_plus_one():
    n = 10 ** 6
    for k in range(1, 51):
        for l in range(1, 51):
            assert M.ln_expectation_exact(n, k, l) <= M.f(n, k, l) + 1


def test_f_symmetry():
    n = 10 ** 6
    assert M.f(n, 7.5, 12.25) == M.f(n, 12.25, 7.5)
    a, b = M.grad_f(n, 7.5, 12.25)
    assert M.grad_f(n, 12.25, 7.5) == (b, a)


def test_f_matches_high_precision():
    for n, k, l in [(10 ** 3, 2.5, 7), (10 ** 6, 10, 12.3), (10 ** 12, 3.2, 30), (2 ** 90, 80, 85)]:
        ref = float(f_mp(n, k, l))
        assert M.f(n, k, l) == pytest.approx(ref, rel=1e-13, abs=1e-9)


def _rel_close(a, b):
    return abs(a - b) <= 1e-6 * max(1.0, abs(b))


def test_gradient_and_hessian_vs_finite_differences():
    # central differences of f taken in 40-digit arithmetic, step 1e-4
    h = mpmath.mpf("1e-4")
    rs = random.Random(7)
    for _ in range(20):
        n = rs.choice([10 ** 3, 10 ** 6, 10 ** 12])
        k, l = rs.uniform(2, 30), rs.uniform(2, 30)
        with mpmath.workdps(40):
            K, L = mpmath.mpf(k), mpmath.mpf(l)
            fd_k = (f_mp(n, K + h, L) - f_mp(n, K - h, L)) / (2 * h)
            fd_l = (f_mp(n, K, L + h) - f_mp(n, K, L - h)) / (2 * h)
            f0 = f_mp(n, K, L)
            fd_kk = (f_mp(n, K + h, L) - 2 * f0 + f_mp(n, K - h, L)) / h ** 2
            fd_ll = (f_mp(n, K, L + h) - 2 * f0 + f_mp(n, K, L - h)) / h ** 2
            fd_kl = (f_mp(n, K + h, L + h) - f_mp(n, K + h, L - h) - f_mp(n, K - h, L + h)
                     + f_mp(n, K - h, L - h)) / (4 * h * h)
        gk, gl = M.grad_f(n, k, l)
        (hkk, hkl), (_, hll) = M.hessian_f(n, k, l)
        assert _rel_close(gk, float(fd_k)) and _rel_close(gl, float(fd_l))
        assert _rel_close(hkk, float(fd_kk)) and _rel_close(hll, float(fd_ll)) and _rel_close(hkl, float(fd_kl))


def test_hessian_negative_definite_example():
    assert M.is_negative_definite(M.hessian_f(10 ** 6, 10, 12))


def test_domain_checks_for_f():
    with pytest.raises(M.MomentDomainError):
        M.f(100, 0.5, 3)
    with pytest.raises(M.MomentDomainError):
        M.hessian_f(100, 50, 50)


def test_moment_point():
    pt = M.moment_point(1000, 4, 5)
    assert pt.ln_E_exact == M.ln_expectation_exact(1000, 4, 5)
    assert pt.ln_E_exact <= pt.f_value + 1
    assert M.moment_point(1000, 4.5, 5).ln_E_exact is None


def test_subsequences():
    assert M.subsequence_n(10, "integer") == 10240
    assert M.subsequence_n(10, "half") == 14481
    assert M.subsequence_n(1, "integer") == 2
    for k in (3, 30, 90):
        assert M.subsequence_n(k, "half") == int(math.isqrt(2 * (k << k) ** 2))
    with pytest.raises(ValueError):
        M.subsequence_n(3, "third")


def test_solve_kstar():
    for k in (30,):
        assert abs(M.solve_kstar(M.subsequence_n(k, "half")) - (k + 0.5)) <= 0.05
        assert abs(M.solve_kstar(M.subsequence_n(k, "integer")) - k) <= 0.05
    for n in (100, 10 ** 5, 2 ** 60):
        ks = M.solve_kstar(n)
        assert all(abs(c) <= 1e-8 for c in M.grad_f(n, ks, ks))
        ln = math.log(n)
        assert abs(ks - M.kstar_asymptotic(n)) <= 25 * math.log(ln) / ln
    with pytest.raises(M.MomentDomainError):
        M.solve_kstar(50)


def test_solve_kstar_unique_sign_change():
    for n in (100, 10 ** 6, 2 ** 50):
        hi = 3 * math.log2(n)
        xs = np.linspace(1, hi, 400)
        signs = np.sign([M.grad_f(n, x, x)[0] for x in xs])
        assert np.count_nonzero(np.diff(signs)) == 1


def test_solve_kstar_reports_trace():
    with pytest.raises(M.ConvergenceError) as exc:
        M.solve_kstar(10 ** 6, max_iter=1)
    assert len(exc.value.trace) == 1


def test_kstar_asymptotic():
    n = 2 ** 100
    expected = 100 - math.log2(100 * math.log(2)) + math.log2(math.log(2))
    assert M.kstar_asymptotic(n) == pytest.approx(expected, rel=1e-14)
    vals = [M.kstar_asymptotic(10 ** e) for e in range(2, 30)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    gaps = [abs(M.solve_kstar(M.subsequence_n(j, "integer")) - M.kstar_asymptotic(M.subsequence_n(j, "integer")))
            for j in (20, 40, 80)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_g_and_deviation_bound():
    assert M.g(0) == 0
    assert all(M.g(x) > 0 for x in np.linspace(-5, 5, 101) if x != 0)
    n = 10 ** 9
    assert M.deviation_bound(n, 0, 0) == 0
    assert M.deviation_bound(n, 1, -2) < 0


def _deviation_ratio(k):
    n = M.subsequence_n(k, "half")
    ks = M.solve_kstar(n)
    f0 = M.f(n, ks, ks)
    box = range(math.ceil(ks - 5), math.floor(ks + 5) + 1)
    return min((M.f(n, a, b) - f0) / M.deviation_bound(n, a - ks, b - ks) for a in box for b in box)


def test_deviation_ratio_trend():
    # ratio of the true drop to the leading-order drop over the |dk|, |dl| <= 5 box
    r20, r40, r60 = _deviation_ratio(20), _deviation_ratio(40), _deviation_ratio(60)
    assert r20 < r40 < r60 < 1
    assert r40 >= 0.89
    assert r60 >= 0.9


@pytest.mark.xfail(strict=True, reason="leading-order drop is only reached to a factor 0.894 at k = 40; "
                                       "0.9 is first met near k = 50")
def test_deviation_slack_point_nine_at_k40():
    assert _deviation_ratio(40) >= 0.9


def test_far_terms_drop_by_three_log_n():
    n = M.subsequence_n(40, "half")
    ks = M.solve_kstar(n)
    f0 = M.f(n, ks, ks)
    W = int(3 * M.kstar_asymptotic(n))
    ln = math.log(n)
    worst = max(M.f(n, a, b) - f0 for a in range(1, W + 1) for b in range(1, W + 1)
                if abs(a - ks) >= 5 or abs(b - ks) >= 5)
    assert worst <= -3 * ln


def test_union_bound_structure():
    for n in (100, 1000, 10 ** 6):
        ub = M.union_bound(n)
        terms = ub.terms[np.isfinite(ub.terms)]
        assert ub.window_sum == pytest.approx(math.fsum(np.exp(terms)), rel=1e-12)
        assert ub.total >= ub.window_sum
    with pytest.raises(M.MomentDomainError):
        M.union_bound_sum(99)


def test_union_bound_small_n_full_sum():
    # at n = 100 every term fits in the window except those the tail bound covers
    n = 100
    exact = math.fsum(math.exp(M.ln_expectation_exact(n, k, l))
                      for k in range(1, 99) for l in range(1, 99) if k + l + 1 <= n)
    ub = M.union_bound(n)
    assert exact <= ub.total * (1 + 1e-12)
    assert ub.total - exact <= 1e-6


def test_union_bound_integer_sequence_dominates_diagonal():
    for k in (20, 30):
        n = M.subsequence_n(k, "integer")
        assert M.union_bound_sum(n) >= math.exp(M.ln_expectation_exact(n, k, k))


def test_union_bound_decreases_along_half_sequence():
    vals = [M.union_bound_sum(M.subsequence_n(k, "half")) for k in range(20, 61)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_aux_overlap():
    k = 12
    lhs, _ = M.aux_overlap_probability(k, k, k)
    assert lhs == (1 - Fraction(1, 2 ** k)) ** 2
    for k in range(10, 31):
        for j1 in range(0, k + 1):
            for j2 in range(0, k + 1):
                if j1 + j2 == 0:
                    continue
                lhs, rhs = M.aux_overlap_probability(k, j1, j2)
                assert abs(lhs - rhs) <= Fraction(10, 4 ** k)
    with pytest.raises(M.MomentDomainError):
        M.aux_overlap_probability(10, 0, 0)


def test_aux_overlap_matches_enumeration():
    # small k: enumerate every neighbourhood of the outside vertex on the 4k - j1 - j2 vertices
    import itertools
    k, j1, j2 = 3, 1, 2
    a1 = set(range(k)); b1 = set(range(k - j1, 2 * k - j1))
    a2 = set(range(10, 10 + k)); b2 = set(range(10 + k - j2, 10 + 2 * k - j2))
    verts = sorted(a1 | b1 | a2 | b2)
    hits = 0
    for mask in range(1 << len(verts)):
        nb = {v for i, v in enumerate(verts) if mask >> i & 1}
        hits += all(nb & s for s in (a1, b1, a2, b2))
    lhs, _ = M.aux_overlap_probability(k, j1, j2)
    assert lhs == Fraction(hits, 2 ** len(verts))


def test_endpoint_maximization():
    k = 20
    for j in range(1, 2 * k):
        vals = {j2: 2.0 ** (-k + j - j2) + 2.0 ** (-k + j2) for j2 in range(max(0, j - k), min(k, j) + 1)}
        assert max(vals.values()) == max(vals[min(vals)], vals[max(vals)])


def test_second_moment_report():
    rep = M.second_moment_report(20)
    assert rep.n == 20 << 20
    assert [t.j for t in rep.terms] == list(range(1, 40))
    C = [t.C_j for t in rep.terms]
    assert all(a <= b for a, b in zip(C, C[1:]))
    assert C[19] == 1.0 and C[20] == 1 + 2.0 ** -19 and C[0] == 2.0 ** -19
    assert 0 < rep.pz_bound < 1
    assert rep.ratio_sum == pytest.approx(math.fsum(t.ratio_j for t in rep.terms), rel=1e-12)
    assert rep.special["equal_triplets"] == pytest.approx(math.exp(rep.ln_E_tilde))
    assert rep.ln_E_tilde == pytest.approx(M.ln_expectation_exact(rep.n, 20, 20) - math.log(2), rel=1e-12)
    with pytest.raises(M.MomentDomainError):
        M.second_moment_report(9)


def _unimodal(seq):
    i = seq.index(min(seq))
    return all(a > b for a, b in zip(seq[:i], seq[1:i + 1])) and all(a < b for a, b in zip(seq[i:], seq[i + 1:]))


@pytest.mark.parametrize("k", [20, 40])
def test_F_unimodal(k):
    assert _unimodal([t.ln_F_j for t in M.second_moment_report(k).terms])


def test_ratio_sum_and_pz():
    reps = [M.second_moment_report(k) for k in (20, 30, 40)]
    sums = [r.ratio_sum for r in reps]
    assert sums[0] > sums[1] > sums[2]
    assert sums[2] < 1e-2
    assert reps[2].pz_bound == pytest.approx(1 / (4 * math.pi + 1), rel=0.10)


def test_positive_limit_along_integer_sequence():
    vals = [math.exp(M.ln_expectation_exact(M.subsequence_n(k, "integer"), k, k)) / 2 for k in (20, 40, 60)]
    assert abs(vals[0] - QUARTER_PI) > abs(vals[1] - QUARTER_PI) > abs(vals[2] - QUARTER_PI)
