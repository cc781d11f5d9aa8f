"""Shared strategies and an independent polynomial oracle built on sympy."""

from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import strategies as st

from tame3.automorphism import PolyMap, sigma
from tame3.poly import Polynomial

SYMS = sympy.symbols("X1 X2 X3")


def to_sympy(p: Polynomial):
    xs = SYMS[: p.n]
    return sympy.Add(*[sympy.Rational(c) * sympy.Mul(*[x ** e for x, e in zip(xs, m)])
                       for m, c in p.terms.items()])


def from_sympy(expr, n: int) -> Polynomial:
    poly = sympy.Poly(sympy.expand(expr), *SYMS[:n])
    terms = {}
    for mono, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(int(e) for e in mono)] = Fraction(int(c.p), int(c.q))
    return Polynomial(n, terms)


def oracle_compose(phi: PolyMap, psi: PolyMap) -> PolyMap:
    """Composition done entirely in sympy: substitute psi into phi."""
    n = phi.n
    subs = {SYMS[i]: to_sympy(psi.components[i]) for i in range(n)}
    return PolyMap([from_sympy(to_sympy(c).xreplace(subs), n) for c in phi.components])


coeffs = st.integers(-9, 9)
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, n: int = 3, max_degree: int = 3, allowed=None, max_terms: int = 5):
    allowed = list(range(1, n + 1)) if allowed is None else list(allowed)
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = [0] * n
        for _ in range(draw(st.integers(0, max_degree))):
            if allowed:
                mono[draw(st.sampled_from(allowed)) - 1] += 1
        terms[tuple(mono)] = draw(st.one_of(coeffs, fracs))
    return Polynomial(n, terms)


nonzero = st.integers(-5, 5).filter(bool)


@st.composite
def elementary(draw, max_degree: int = 2):
    i = draw(st.integers(1, 3))
    others = [v for v in (1, 2, 3) if v != i]
    return sigma(i, draw(nonzero), draw(polys(allowed=others, max_degree=max_degree, max_terms=3)))


@st.composite
def tame_maps(draw, length: int = 3, max_degree: int = 2):
    m = PolyMap.identity(3)
    for _ in range(draw(st.integers(0, length))):
        from tame3.automorphism import compose
        m = compose(m, draw(elementary(max_degree)))
    return m
