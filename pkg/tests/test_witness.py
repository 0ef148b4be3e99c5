import json

import numpy as np
import pytest

from emsolaw.graph import Graph, VertexSet, complete_graph, empty_graph, enumerate_graphs, path_graph, sample_gnp
from emsolaw.logic import builtin, evaluate
from emsolaw.witness import (
    SearchGuardError, Witness, check_phi, count_witnesses, satisfies_phi, validate_witness,
    witness_size_profile,
)
from oracles import phi_bruteforce_count

PHI = builtin("phi")


def test_examples():
    assert check_phi(path_graph(3)) == Witness(VertexSet.of([1]), VertexSet.of([3]), 2)
    assert check_phi(complete_graph(3)) is None
    assert count_witnesses(path_graph(3), 1, 1) == 2
    for k, l in [(1, 1)]:
        assert count_witnesses(complete_graph(3), k, l) == 0


def test_agrees_with_evaluator_exhaustively():
    for n in range(1, 6):
        for g in enumerate_graphs(n):
            assert satisfies_phi(g) == evaluate(g, PHI), g


def test_agrees_with_evaluator_random():
    for i in range(150):
        n = 6 + i % 5
        g = sample_gnp(n, 0.5, 77, stream=i)
        assert satisfies_phi(g) == evaluate(g, PHI)


def test_witness_is_lexicographically_least():
    for i in range(60):
        g = sample_gnp(7, 0.5, 5, stream=i)
        w = check_phi(g)
        prof_keys = []
        # brute force every (c1, c2, x) and take the least key
        import itertools
        verts = range(1, 8)
        for r1 in range(1, 7):
            for c1 in itertools.combinations(verts, r1):
                for r2 in range(1, 8 - r1):
                    for c2 in itertools.combinations([v for v in verts if v not in c1], r2):
                        for x in verts:
                            cand = Witness(VertexSet.of(c1), VertexSet.of(c2), x)
                            if not validate_witness(g, cand):
                                prof_keys.append(cand.key())
        assert (w.key() if w else None) == (min(prof_keys) if prof_keys else None)


def test_counts_match_direct_enumeration():
    for i in range(40):
        n = 5 + i % 3
        g = sample_gnp(n, 0.5, 8, stream=i)
        for k in range(1, n - 1):
            for l in range(1, n - k):
                assert count_witnesses(g, k, l) == phi_bruteforce_count(g, k, l)


def test_count_symmetry_and_isomorphism():
    rs = np.random.default_rng(0)
    for i in range(30):
        g = sample_gnp(9, 0.5, 3, stream=i)
        h = g.relabel([int(v) + 1 for v in rs.permutation(9)])
        assert satisfies_phi(g) == satisfies_phi(h)
        for k, l in [(1, 1), (1, 2), (2, 3), (3, 2)]:
            assert count_witnesses(g, k, l) == count_witnesses(g, l, k)
            assert count_witnesses(g, k, l) == count_witnesses(h, k, l)


def test_profile_consistent_with_counts():
    for i in range(20):
        g = sample_gnp(8, 0.5, 21, stream=i)
        prof = witness_size_profile(g)
        assert (len(prof) > 0) == satisfies_phi(g)
        for (k, l), c in prof.items():
            assert count_witnesses(g, k, l) == c


def test_existence_iff_some_count_positive():
    for g in enumerate_graphs(5):
        any_count = any(count_witnesses(g, k, l) > 0 for k in range(1, 4) for l in range(1, 5 - k))
        assert any_count == satisfies_phi(g)


def test_returned_witness_validates():
    for i in range(50):
        g = sample_gnp(30, 0.5, 1, stream=i)
        w = check_phi(g)
        if w is not None:
            assert validate_witness(g, w) == []


def test_validator_catches_violations():
    g = path_graph(3)
    assert validate_witness(g, Witness(VertexSet.of([1]), VertexSet.of([2]), 3))
    assert validate_witness(g, Witness(VertexSet.of([1]), VertexSet(), 2))
    assert validate_witness(g, Witness(VertexSet.of([1]), VertexSet.of([3]), 1))


def test_json_roundtrip():
    w = Witness(VertexSet.of([1, 4]), VertexSet.of([3]), 2)
    assert json.loads(w.to_json()) == {"c1": [1, 4], "c2": [3], "x": 2}
    assert Witness.from_json(w.to_json()) == w


def test_parameter_checks_and_guard():
    with pytest.raises(ValueError):
        count_witnesses(path_graph(3), 0, 1)
    with pytest.raises(ValueError):
        count_witnesses(path_graph(3), 1, 2)
    with pytest.raises(SearchGuardError):
        check_phi(empty_graph(201))
    assert check_phi(Graph.from_edges(1, [])) is None
