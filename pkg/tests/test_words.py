import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_compose
from tame3.automorphism import PolyMap, compose, invert, sigma, swap
from tame3.poly import Polynomial, PolynomialError
from tame3.words import (
    RelationError,
    SigmaLetter,
    SigmaWord,
    check_relation,
    evaluate,
    format_word,
    make_relation,
    parse_word,
    random_poly,
    random_relation,
    random_scalar,
    random_word,
    relation_cases,
    tau_word,
    word,
)

X1, X2, X3 = Polynomial.variables(3)
ID = PolyMap.identity(3)


def test_eval_empty():
    assert evaluate(SigmaWord()) == ID


def test_eval_tau_word():
    assert evaluate(tau_word(1, 2)) == PolyMap.parse("(X2; X1; X3)")


def test_eval_r2_instance():
    s = SigmaLetter(1, 1, X2 ** 2)
    w = word(s.inverse(), SigmaLetter(3, 1, X1), s)
    assert evaluate(w) == PolyMap.parse("(X1; X2; X3 + X1 + X2^2)")
    oracle = oracle_compose(oracle_compose(sigma(1, 1, -X2 ** 2), sigma(3, 1, X1)), sigma(1, 1, X2 ** 2))
    assert evaluate(w) == oracle


def test_tau_word_shape():
    w = tau_word(2, 3)
    assert len(w) == 3
    assert [l.i for l in w] == [3, 2, 3]


def test_tau_word_involution():
    assert evaluate(tau_word(1, 3) * tau_word(1, 3)) == ID


def test_tau_word_symmetric():
    assert evaluate(tau_word(1, 3)) == evaluate(tau_word(3, 1)) == swap(1, 3)


def test_letter_validation():
    with pytest.raises(PolynomialError):
        SigmaLetter(2, 1, X2)
    with pytest.raises(PolynomialError):
        SigmaLetter(2, 0, X1)


def test_make_r1_example():
    r = make_relation("R1", i=1, alpha=2, f=X2, beta=3, g=X3 ** 2)
    assert r.lhs == word(SigmaLetter(1, 2, X2), SigmaLetter(1, 3, X3 ** 2))
    assert r.rhs == word(SigmaLetter(1, 6, X2 + 2 * X3 ** 2))
    assert check_relation(r)


def test_make_r3_example():
    r = make_relation("R3", k=1, l=2, i=1, alpha=1, f=X2 * X3)
    (out,) = r.rhs.letters
    assert out.i == 2
    assert out.f == X1 * X3
    assert check_relation(r)


def test_make_r2_rejects_f_using_xj():
    with pytest.raises(RelationError):
        make_relation("R2", i=1, j=3, alpha=1, f=X3, beta=1, g=X2)


def test_make_r2_rejects_g_using_xj():
    with pytest.raises(RelationError):
        make_relation("R2", i=1, j=3, alpha=1, f=X2, beta=1, g=X3)


def test_make_relation_missing_parameter():
    with pytest.raises(RelationError):
        make_relation("R1", i=1, alpha=1, f=X2)


def test_relation_case_counts():
    assert len(relation_cases("R1")) == 3
    assert len(relation_cases("R2")) == 6
    assert len(relation_cases("R3")) == 18


@pytest.mark.parametrize("kind", ["R1", "R2", "R3"])
def test_every_case_holds(kind):
    for n, case in enumerate(relation_cases(kind)):
        for s in range(5):
            r = random_relation(f"{kind}-{n}-{s}", kind, 4, 9, case=case)
            assert r.case == case
            assert check_relation(r)


def test_random_word_deterministic():
    assert random_word(11, 12, 4, 5) == random_word(11, 12, 4, 5)
    assert random_word(11, 0, 4, 5) == SigmaWord()


def test_random_r2_side_conditions():
    for s in range(50):
        r = random_relation(s, "R2", 5, 9)
        i, j = r.case
        assert not r.params["f"].uses_variable(i)
        assert not r.params["f"].uses_variable(j)
        assert not r.params["g"].uses_variable(j)


def test_parse_format_round_trip():
    w = random_word(3, 10, 3, 4)
    assert parse_word(format_word(w)) == w


def test_parse_tau_sugar():
    assert parse_word("t(1,3)") == tau_word(1, 3)
    assert parse_word("s(2,1/2,X1*X3)^-1").letters[0] == SigmaLetter(2, Fraction(1, 2), X1 * X3, -1)


def test_parse_errors():
    with pytest.raises(PolynomialError):
        parse_word("s(1,1,X2")
    with pytest.raises(PolynomialError):
        parse_word("q(1,1,X2)")


# --- properties ------------------------------------------------------------------

seeds = st.integers(0, 10 ** 6)


@settings(max_examples=30, deadline=None)
@given(seeds, seeds)
def test_eval_is_homomorphism(a, b):
    u, v = random_word(a, 5, 3, 5), random_word(b, 5, 3, 5)
    assert evaluate(u * v) == compose(evaluate(u), evaluate(v))
    assert evaluate(u.inverse()) == invert(evaluate(u).forget_inverse())


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]))
def test_commutation_when_g_avoids_xi(seed, ij):
    # if g avoids Xi as well as Xj, the two elementary maps commute
    i, j = ij
    rng = random.Random(seed)
    rest = [v for v in (1, 2, 3) if v not in (i, j)]
    f = random_poly(rng, 3, rest, 4, 9)
    g = random_poly(rng, 3, rest, 4, 9)
    a, b = sigma(i, random_scalar(rng, 9), f), sigma(j, random_scalar(rng, 9), g)
    assert compose(a, b) == compose(b, a)


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from(["R1", "R2", "R3"]))
def test_relations_hold_property(seed, kind):
    assert check_relation(random_relation(seed, kind, 6, 9))
