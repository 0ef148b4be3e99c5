import pytest
from hypothesis import given, settings

from emsolaw.graph import complete_graph, empty_graph, enumerate_graphs, path_graph, sample_gnp
from emsolaw.logic import (
    BUILTINS, Adj, And, Eq, EvaluationGuardError, ExistsFO, ExistsMSO, ForallFO, ForallMSO,
    FormulaError, In, Not, Or, ParseError, SortError, UnboundVariableError, builtin, builtin_text,
    evaluate, fo_quantifier_depth, fo_variable_count, mso_quantifier_depth, mso_variables,
    negate_adjacencies, parse_formula, pretty, quantifier_depth,
)
from oracles import naive_evaluate
from strategies import graphs, sentences

PHI = builtin("phi")


# ---------------------------------------------------------------- parser

def test_parse_example():
    assert parse_formula("exists X. exists x. X(x)") == ExistsMSO("X", ExistsFO("x", In("X", "x")))


def test_parse_precedence():
    s = parse_formula("forall x. forall y. !x ~ y & x = y | x !~ y -> x = x -> y = y <-> x != y")
    body = s.body.body
    # <-> binds loosest, -> is right-associative, & binds tighter than |
    left = body.left
    assert left.left == Or(And(Not(Adj("x", "y")), Eq("x", "y")), Not(Adj("x", "y")))
    assert left.right.left == Eq("x", "x")
    assert body.right == Not(Eq("x", "y"))


def test_quantifier_body_extends_right():
    s = parse_formula("exists x. x = x & (forall y. y ~ x) | x ~ x")
    assert isinstance(s, ExistsFO) and isinstance(s.body, Or)
    assert isinstance(s.body.left.right, ForallFO)


@pytest.mark.parametrize("text, err, pos", [
    ("forall x. x ~ y", UnboundVariableError, 14),
    ("exists X. X(X)", SortError, 12),
    ("exists x. x(x)", SortError, 10),
    ("exists x. Y(x)", UnboundVariableError, 10),
    ("exists x. x ~", ParseError, 13),
    ("exists x. x # x", ParseError, 12),
    ("exists x. x = x)", ParseError, 15),
    ("exists x. x = x & exists y. y = y", ParseError, 18),
])
def test_parse_errors(text, err, pos):
    with pytest.raises(err) as exc:
        parse_formula(text)
    assert exc.value.pos == pos


def test_error_kinds_are_distinct():
    assert not issubclass(UnboundVariableError, SortError)
    assert not issubclass(SortError, UnboundVariableError)


@pytest.mark.parametrize("name", BUILTINS)
def test_pretty_roundtrip_builtins(name):
    s = builtin(name)
    assert parse_formula(pretty(s)) == s


@settings(max_examples=200, deadline=None)
@given(sentences())
def test_pretty_roundtrip_random(s):
    assert parse_formula(pretty(s)) == s


# ---------------------------------------------------------------- metrics

def test_metrics_of_builtins():
    assert fo_quantifier_depth(PHI) == 2
    assert fo_variable_count(PHI) == 2
    assert mso_variables(PHI) == {"X1", "X2"}
    assert quantifier_depth(PHI) == 4
    phi1, phi2 = builtin("phi1"), builtin("phi2")
    assert fo_variable_count(phi1) == 2
    assert fo_quantifier_depth(phi2) == 3
    assert len(mso_variables(phi1)) == 1 and len(mso_variables(phi2)) == 1


def test_metrics_small():
    s = parse_formula("exists X. forall x. (exists y. x ~ y) & (exists z. X(z))")
    assert quantifier_depth(s) == 3
    assert fo_quantifier_depth(s) == 2
    assert mso_quantifier_depth(s) == 1
    assert fo_variable_count(s) == 3


def test_builtin_unknown_and_files():
    with pytest.raises(KeyError):
        builtin("psi")
    assert "exists X1" in builtin_text("phi")


# ---------------------------------------------------------------- evaluation

def test_evaluate_examples():
    assert evaluate(path_graph(3), PHI)
    assert not evaluate(complete_graph(3), PHI)
    assert not evaluate(empty_graph(4), PHI)


def test_evaluate_rejects_open_formula():
    with pytest.raises(FormulaError):
        evaluate(path_graph(3), Adj("x", "y"))


def test_guard_reports_work():
    with pytest.raises(EvaluationGuardError) as exc:
        evaluate(empty_graph(13), PHI)
    assert exc.value.work_log2 == 26
    one_set = builtin("phi1")
    with pytest.raises(EvaluationGuardError):
        evaluate(empty_graph(15), one_set)
    evaluate(empty_graph(12), PHI)  # n = 12 with two set variables is allowed


@settings(max_examples=150, deadline=None)
@given(sentences(), graphs())
def test_evaluate_matches_naive_semantics(s, g):
    assert evaluate(g, s) == naive_evaluate(g, s)


def test_builtins_match_naive_semantics_small():
    for n in range(1, 5):
        for g in enumerate_graphs(n):
            assert evaluate(g, PHI) == naive_evaluate(g, PHI)


@settings(max_examples=100, deadline=None)
@given(sentences(), graphs(max_n=5))
def test_negation_soundness(s, g):
    assert evaluate(g, Not(s)) == (not evaluate(g, s))


@settings(max_examples=100, deadline=None)
@given(sentences(), graphs(max_n=5))
def test_quantifier_duality(s, g):
    body = s.body.body.body.body  # strip the closing prefix QX QY Qx Qy

    def close(inner):
        return ForallMSO("X", ForallMSO("Y", ForallFO("x", inner)))

    assert evaluate(g, close(Not(ForallFO("y", body)))) == evaluate(g, close(ExistsFO("y", Not(body))))


@settings(max_examples=100, deadline=None)
@given(sentences(), graphs(max_n=5))
def test_complement_hook(s, g):
    assert evaluate(g, s) == evaluate(g.complement(), negate_adjacencies(s))


def test_isomorphism_invariance():
    import numpy as np
    rs = np.random.default_rng(1)
    for trial in range(40):
        g = sample_gnp(7, 0.5, 17, stream=trial)
        perm = [int(v) + 1 for v in rs.permutation(7)]
        for name in ("phi", "phi1", "phi2"):
            assert evaluate(g, builtin(name)) == evaluate(g.relabel(perm), builtin(name))


def test_literal_transcriptions_differ_from_phi():
    # with plain x !~ y a member of X counts as its own non-neighbour
    diffs = sum(evaluate(g, builtin("phi1_literal")) != evaluate(g, PHI) for g in enumerate_graphs(4))
    assert diffs > 0
