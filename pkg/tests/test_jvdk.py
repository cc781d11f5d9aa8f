import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tame3.automorphism import PolyMap, compose, nagata, sigma, tau
from tame3.jvdk import (
    NotAutomorphism,
    PlaneKind,
    PlaneLetter,
    factor_ga2,
    factor_ta2_ring,
    is_affine,
    is_triangular,
    recompose,
    univariate_divmod,
)
from tame3.poly import Polynomial, PolynomialError
from tame3.words import SigmaWord, evaluate

Y1, Y2 = Polynomial.variables(2)
X1, X2, X3 = Polynomial.variables(3)
ID2 = PolyMap.identity(2)


def M(text):
    return PolyMap.parse(text)


def random_affine(rng):
    while True:
        a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
        if a * d - b * c:
            return PolyMap([Y1 * a + Y2 * b + rng.randint(-3, 3), Y1 * c + Y2 * d + rng.randint(-3, 3)])


def random_triangular(rng, max_degree=4):
    p = sum((Y1 ** e * rng.randint(-4, 4) for e in range(2, rng.randint(2, max_degree) + 1)),
            Polynomial.zero(2))
    a = rng.choice([1, -1, 2, -3])
    c = rng.choice([1, -1, 3])
    return PolyMap([Y1 * a + rng.randint(-2, 2), Y2 * c + p])


def alternating_product(seed, letters=6):
    rng = random.Random(seed)
    m = ID2
    start = rng.randint(0, 1)
    for k in range(rng.randint(1, letters)):
        m = compose(m, random_affine(rng) if (k + start) % 2 == 0 else random_triangular(rng))
    return m


# --- factor_ga2 ------------------------------------------------------------------------

def test_swap_is_one_affine_letter():
    letters = factor_ga2(M("(X2; X1)"))
    assert [l.kind for l in letters] == [PlaneKind.AFFINE]


def test_lower_triangular_is_one_letter():
    letters = factor_ga2(M("(X1; X2 + X1^3)"))
    assert [l.kind for l in letters] == [PlaneKind.TRIANGULAR]


def test_upper_triangular_factors_through_the_swap():
    phi = M("(X1 + X2^3; X2)")
    letters = factor_ga2(phi)
    assert recompose(letters) == phi
    assert [l.kind for l in letters] == [PlaneKind.AFFINE, PlaneKind.TRIANGULAR, PlaneKind.AFFINE]


def test_letters_are_well_formed():
    for s in range(20):
        for l in factor_ga2(alternating_product(s)):
            assert is_affine(l.element) if l.kind is PlaneKind.AFFINE else is_triangular(l.element)


def test_rejects_non_automorphisms():
    for text in ("(X1^2; X2)", "(X1 + X2^2; X2 + X1^2)", "(X1*X2; X2)", "(X1^2 + X2^3; X2)"):
        with pytest.raises(NotAutomorphism):
            factor_ga2(M(text))


def test_degree_sequence_strictly_decreasing():
    for s in range(30):
        _, degrees = factor_ga2(alternating_product(s), return_degrees=True)
        assert all(a > b for a, b in zip(degrees, degrees[1:]))


def test_needs_plane_maps():
    with pytest.raises(PolynomialError):
        factor_ga2(PolyMap.identity(3))


def test_plane_letter_validation():
    with pytest.raises(PolynomialError):
        PlaneLetter(PlaneKind.TRIANGULAR, M("(X1 + X2^2; X2)"))
    with pytest.raises(PolynomialError):
        PlaneLetter(PlaneKind.AFFINE, M("(X1 + X2^2; X2)"))


# --- recompose ------------------------------------------------------------------------------

def test_recompose_empty_and_single():
    assert recompose([]) == ID2
    l = PlaneLetter(PlaneKind.TRIANGULAR, M("(X1; X2 + X1^2)"))
    assert recompose([l]) == l.element


# --- ring mode ------------------------------------------------------------------------------

def test_ring_one_step():
    phi = M("(X1; X2 + X1*X3^2; X3)")
    steps = factor_ta2_ring(phi)
    assert len(steps) == 1
    assert evaluate(SigmaWord(tuple(steps))) == phi


def test_ring_identity():
    assert factor_ta2_ring(PolyMap.identity(3)) == []


def test_ring_nagata_pair_unknown():
    # the plane pair (X + Z*D, Y - 2*X*D - Z*D^2) with Z = X1 as the coefficient
    x, y, z = X2, X3, X1
    d = y * z + x ** 2
    pair = PolyMap([X1, x + z * d, y - 2 * x * d - z * d ** 2])
    assert factor_ta2_ring(pair) is None


def test_ring_conjugated_nagata_unknown():
    conj = compose(tau(1, 3), compose(nagata(), tau(1, 3)))
    assert factor_ta2_ring(conj) is None


def test_ring_certificates_replay():
    rng = random.Random(1)
    for _ in range(30):
        m = PolyMap.identity(3)
        for _ in range(rng.randint(1, 4)):
            slot = rng.choice((2, 3))
            other = X3 if slot == 2 else X2
            g = sum((X1 ** rng.randint(0, 2) * other ** rng.randint(0, 3) * rng.randint(-3, 3)
                     for _ in range(2)), Polynomial.zero(3))
            m = compose(m, sigma(slot, rng.choice((1, -1, 2)), g))
        steps = factor_ta2_ring(m)
        assert steps is not None
        assert evaluate(SigmaWord(tuple(steps))) == m
        for s in steps:
            assert s.i in (2, 3) and not s.f.uses_variable(s.i)


def test_univariate_divmod():
    q, r = univariate_divmod(X1 ** 3 + 2 * X1 + 1, X1 + 1)
    assert q * (X1 + 1) + r == X1 ** 3 + 2 * X1 + 1
    assert r.total_degree() < 1


# --- properties --------------------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_round_trip(seed):
    phi = alternating_product(seed)
    assert recompose(factor_ga2(phi)) == phi
