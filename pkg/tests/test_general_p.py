import math
from fractions import Fraction

import pytest

from emsolaw import general_p as G
from emsolaw import moments as M


def test_derive_params_examples():
    g = G.derive_params(3, 2, 1)
    assert (g.a, g.t, g.gamma) == (6, 4, Fraction(5, 3))
    g = G.derive_params(3, 2, 10)
    assert (g.a, g.t, g.gamma) == (60, 40, Fraction(59, 39))
    for bad in [(4, 2, 1), (2, 3, 1), (2, 2, 1), (3, 2, 0)]:
        with pytest.raises(ValueError):
            G.derive_params(*bad)


def test_derive_params_invariants_grid():
    for u in range(2, 11):
        for v in range(1, u):
            if math.gcd(u, v) != 1:
                continue
            prev = None
            for h in range(1, 21):
                g = G.derive_params(u, v, h)
                assert g.a - g.t == h * v > 0
                assert 2 * g.a - 2 * g.t - 1 == 2 * h * v - 1
                assert g.gamma > 1 and 0 < g.p < 0.5
                gap = abs(g.gamma - Fraction(u, v))
                assert prev is None or gap < prev
                prev = gap


def test_solve_p():
    assert G.solve_p(1) == 0.5
    assert abs(G.solve_p(2) - (3 - math.sqrt(5)) / 2) <= 1e-12
    grid = [1 + i / 10 for i in range(91)]
    ps = [G.solve_p(x) for x in grid]
    assert all(a > b for a, b in zip(ps, ps[1:]))
    for x, p in zip(grid, ps):
        assert abs(p - (1 - p) ** x) <= 1e-14
    assert G.solve_p(100) < 0.05
    with pytest.raises(ValueError):
        G.solve_p(0.9)


def test_solve_p_continuity():
    grid = [1 + i / 100 for i in range(901)]
    ps = [G.solve_p(x) for x in grid]
    # dp/dgamma is bounded by p ln(1/(1-p)) / (1 + gamma p/(1-p)) < 1/2 on this range
    assert max(a - b for a, b in zip(ps, ps[1:])) <= 0.5 * 0.01


def test_solve_p_matches_high_precision():
    for gamma in (Fraction(5, 3), Fraction(59, 39), 2, 7.5):
        assert abs(G.solve_p(gamma) - float(G.solve_p_mp(gamma))) <= 1e-15


def test_leading_coefficient():
    vals = [G.leading_coefficient(G.derive_params(3, 2, h)) for h in range(1, 51)]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.01


def test_leading_coefficient_closed_form():
    # with p = (1 - p)^gamma the coefficient reduces to (u - v) / (v (2uh - 1))
    for u, v, h in [(3, 2, 1), (3, 2, 7), (5, 3, 2), (2, 1, 4)]:
        g = G.derive_params(u, v, h)
        assert G.leading_coefficient(g) == pytest.approx((u - v) / (v * (2 * u * h - 1)), rel=1e-12)


def test_gamma_gap_halves_when_h_doubles():
    gaps = [float(abs(G.derive_params(3, 2, h).gamma - Fraction(3, 2))) for h in (1, 2, 4, 8, 16, 32)]
    ratios = [b / a for a, b in zip(gaps, gaps[1:])]
    assert all(r < 0.5 for r in ratios)
    assert ratios[-1] == pytest.approx(0.5, abs=0.01)


def test_unit_case_reduces_to_half_probability_sequences():
    half = Fraction(1, 2)
    assert G.sequence_for(10, half, 1, "integer").value == 10240
    for k in (1, 5, 10, 33):
        assert G.sequence_for(k, half, 1, "integer").value == M.subsequence_n(k, "integer")
        assert G.sequence_for(k, half, 1, "half").value == M.subsequence_n(k, "half")
    for n in (10 ** 3, 10 ** 9, 2 ** 80):
        assert G.kstar_for(n, 0.5, 1) == pytest.approx(M.kstar_asymptotic(n), rel=1e-12)


def test_sequences_general():
    params = G.derive_params(3, 2, 1)
    for k in range(1, 31):
        n1 = G.subsequences_general(k, params, "half")
        n2 = G.subsequences_general(k, params, "integer")
        assert n1.value > n2.value
        assert not n1.ambiguous and not n2.ambiguous
    n2 = G.subsequences_general(30, params, "integer").value
    assert abs(G.kstar_general(n2, params) - 30) <= 0.05


def test_sequence_precision_independent_of_dps():
    params = G.derive_params(3, 2, 2)
    a = G.sequence_for(25, G.solve_p_mp(params.gamma, 80), params.run, "half").value
    b = G.sequence_for(25, G.solve_p_mp(params.gamma, 200), params.run, "half").value
    assert a == b == G.subsequences_general(25, params, "half").value


def test_floor_ambiguity_flag():
    # k (1/p)^(run k) just below an integer
    p = Fraction(10 ** 12, 10 ** 12 + 1)
    v = G.sequence_for(1, p, 1, "integer")
    assert v.value == 1 and v.ambiguous
    assert not G.sequence_for(10, Fraction(1, 2), 1, "integer").ambiguous
