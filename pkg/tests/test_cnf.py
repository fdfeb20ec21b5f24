import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uctc.cnf import (
    AMBIGUOUS,
    CnfFormula,
    count_models,
    dimacs_comments,
    emit_dimacs,
    enumerate_models,
    evaluate,
    model_table,
    parse_dimacs,
    prefix_completion,
    random_cnf,
)
from uctc.errors import DimensionError, ParseError, ValidationError


@st.composite
def formulas(draw, max_n=8, max_clauses=12):
    n = draw(st.integers(1, max_n))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=4), max_size=max_clauses))
    return CnfFormula(n, tuple(tuple(c) for c in clauses))


def naive_evaluate(clauses, bits):
    """Second evaluator: a clause is satisfied iff some literal matches."""
    values = {i + 1: c == "1" for i, c in enumerate(bits)}
    return all(any(values[abs(l)] if l > 0 else not values[abs(l)] for l in cl) for cl in clauses)


def test_parse_examples():
    assert parse_dimacs("p cnf 1 1\n1 0\n") == CnfFormula(1, ((1,),))
    phi = parse_dimacs("p cnf 2 2\n1 0\n-2 0\n")
    assert phi.num_vars == 2 and phi.clauses == ((1,), (-2,))


def test_parse_comments_multiline_and_end_marker():
    text = "c hello\np cnf 3 2\n1 -2\n 3 0 -1 0\n%\n0\n"
    assert parse_dimacs(text).clauses == ((1, -2, 3), (-1,))


@pytest.mark.parametrize(
    "text",
    [
        "1 0\n",
        "p cnf x 1\n1 0\n",
        "p cnf 2 1\n3 0\n",
        "p cnf 2 1\n1 2\n",
        "p cnf 2 2\n1 0\n",
        "p cnf 2 1\n1 a 0\n",
        "",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_dimacs(text)


def test_parse_error_reports_line():
    with pytest.raises(ParseError, match="line 3"):
        parse_dimacs("p cnf 2 2\n1 0\n1 7 0\n")


def test_evaluate_examples():
    assert evaluate(CnfFormula(1, ((1,),)), "1")
    phi = CnfFormula(2, ((1,), (-2,)))
    assert evaluate(phi, "10")
    assert not evaluate(phi, "11")
    with pytest.raises(DimensionError):
        evaluate(phi, "1")


def test_evaluate_against_naive_evaluator():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        phi = random_cnf(n, int(rng.integers(0, 8)), int(rng.integers(1, n + 1)), int(rng.integers(2**31)))
        bits = "".join(rng.choice(["0", "1"], n))
        assert evaluate(phi, bits) == naive_evaluate(phi.clauses, bits)


def test_counting_examples():
    assert count_models(CnfFormula(1, ((1, -1),))) == 2
    assert count_models(CnfFormula(3, ())) == 8
    phi = CnfFormula(2, ((1,), (-2,)))
    assert count_models(phi) == 1
    assert enumerate_models(phi) == ["10"]
    assert count_models(CnfFormula(2, ((),))) == 0


@settings(max_examples=100, deadline=None)
@given(phi=formulas(max_n=10))
def test_count_matches_enumeration_and_truth_table(phi):
    models = enumerate_models(phi)
    assert count_models(phi) == len(models)
    oracle = [
        "".join(t) for t in itertools.product("01", repeat=phi.num_vars)
        if naive_evaluate(phi.clauses, "".join(t))
    ]
    assert models == oracle
    assert model_table(phi).sum() == len(models)


def test_prefix_completion_examples():
    phi = CnfFormula(2, ((1,), (-2,)))
    assert prefix_completion(phi, "1") == 0
    assert prefix_completion(phi, "0") is None
    assert prefix_completion(CnfFormula(1, ((1,),)), "") == 1
    assert prefix_completion(CnfFormula(2, ((1,),)), "1") == AMBIGUOUS
    with pytest.raises(DimensionError):
        prefix_completion(phi, "10")


@settings(max_examples=60, deadline=None)
@given(phi=formulas(max_n=6))
def test_prefix_completion_consistent_with_models(phi):
    models = set(enumerate_models(phi))
    for t in itertools.product("01", repeat=phi.num_vars - 1):
        p = "".join(t)
        hits = [b for b in (0, 1) if p + str(b) in models]
        got = prefix_completion(phi, p)
        if not hits:
            assert got is None
        elif len(hits) == 2:
            assert got == AMBIGUOUS
        else:
            assert got == hits[0]


@settings(max_examples=80, deadline=None)
@given(phi=formulas())
def test_dimacs_roundtrip(phi):
    assert parse_dimacs(emit_dimacs(phi)) == phi


def test_dimacs_roundtrip_corpus():
    for seed in range(50):
        phi = random_cnf(2 + seed % 7, seed % 11, 1 + seed % 2, seed)
        text = emit_dimacs(phi)
        assert parse_dimacs(emit_dimacs(parse_dimacs(text))) == phi


def test_original_vars_and_comments_roundtrip():
    phi = CnfFormula(4, ((1, 4), (-4,)), original_vars=2)
    text = emit_dimacs(phi, ["vv seed=3 k=1 mode=auxiliary"])
    back = parse_dimacs(text)
    assert back == phi and back.original_vars == 2
    assert dimacs_comments(text) == {"seed": "3", "k": "1", "mode": "auxiliary"}


def test_normalisation_and_validation():
    phi = CnfFormula(2, ((1, 1, 2), (1, -1)))
    assert phi.clauses == ((1, 2),)
    with pytest.raises(ValidationError):
        CnfFormula(2, ((3,),))
    with pytest.raises(ValidationError):
        CnfFormula(2, ((0,),))
    with pytest.raises(ValidationError):
        CnfFormula(2, (), original_vars=3)


def test_random_cnf_determinism_and_widths():
    a = random_cnf(6, 20, 3, 99)
    assert a == random_cnf(6, 20, 3, 99)
    assert all(len(c) == 3 and len({abs(l) for l in c}) == 3 for c in a.clauses)
    with pytest.raises(ValidationError):
        random_cnf(2, 3, 3, 0)


def independent_cnf(n, m, w, rng):
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), w)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(n, tuple(clauses))


def test_random_cnf_satisfiable_fraction_matches_independent_generator():
    n, m, samples = 4, 14, 10_000
    ours = np.mean([count_models(random_cnf(n, m, 3, s)) > 0 for s in range(samples)])
    rng = random.Random(2024)
    theirs = np.mean([count_models(independent_cnf(n, m, 3, rng)) > 0 for _ in range(samples)])
    assert abs(ours - theirs) <= 0.02
