"""Formal words in the elementary generators and the relation instances.

A :class:`SigmaWord` is an element of the free group on symbols
``[sigma_{i,alpha,f}]``.  Words are read left to right as products under
:func:`tame3.automorphism.compose`; :func:`evaluate` is the homomorphism
into the tame group.  Relations of the three families

    R1  [s(i,a,f)] [s(i,b,g)]            = [s(i, a*b, f + a*g)]
    R2  [s(i,a,f)]^-1 [s(j,b,g)] [s(i,a,f)] = [s(j, b, g(sigma_{i,a,f}))]
    R3  [t(k,l)] [s(i,a,f)] [t(k,l)]      = [s(j, a, f(tau_{k,l}))]

are produced by :func:`make_relation` and checked by :func:`check_relation`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .automorphism import PolyMap, apply_to_poly, compose, sigma, swap
from .poly import Polynomial, PolynomialError, Scalar, format_poly, parse_poly, scalar


class RelationError(ValueError):
    pass


@dataclass(frozen=True)
class SigmaLetter:
    i: int
    alpha: Scalar
    f: Polynomial
    exponent: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", scalar(self.alpha))
        if self.exponent not in (1, -1):
            raise PolynomialError("exponent must be +1 or -1")
        if not 1 <= self.i <= self.f.n:
            raise PolynomialError(f"slot {self.i} out of range 1..{self.f.n}")
        if self.alpha == 0:
            raise PolynomialError("alpha must be nonzero")
        if self.f.uses_variable(self.i):
            raise PolynomialError(f"f = {self.f} must not involve X{self.i}")

    @property
    def n(self) -> int:
        return self.f.n

    def inverse(self) -> "SigmaLetter":
        return SigmaLetter(self.i, self.alpha, self.f, -self.exponent)

    def base(self) -> "SigmaLetter":
        """The positive letter with the same symbol."""
        return self if self.exponent == 1 else self.inverse()

    def to_map(self) -> PolyMap:
        m = sigma(self.i, self.alpha, self.f)
        return m if self.exponent == 1 else m.inverse

    def __str__(self) -> str:
        a = self.alpha
        a_txt = str(a) if isinstance(a, int) else f"{a.numerator}/{a.denominator}"
        s = f"s({self.i},{a_txt},{format_poly(self.f)})"
        return s if self.exponent == 1 else s + "^-1"


def letter(i: int, alpha, f: Polynomial | int = 0, exponent: int = 1, n: int = 3) -> SigmaLetter:
    if not isinstance(f, Polynomial):
        f = Polynomial.constant(n, f)
    return SigmaLetter(i, alpha, f, exponent)


@dataclass(frozen=True)
class SigmaWord:
    letters: tuple = ()
    n: int = 3

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        for l in self.letters:
            if l.n != self.n:
                raise PolynomialError("letter ambient differs from word ambient")

    def __mul__(self, other: "SigmaWord") -> "SigmaWord":
        if self.n != other.n:
            raise PolynomialError("ambient mismatch")
        return SigmaWord(self.letters + other.letters, self.n)

    def inverse(self) -> "SigmaWord":
        return SigmaWord(tuple(l.inverse() for l in reversed(self.letters)), self.n)

    def reduced(self) -> "SigmaWord":
        """Free reduction: cancel adjacent ``x x^-1`` pairs."""
        out: list[SigmaLetter] = []
        for l in self.letters:
            if out and out[-1] == l.inverse():
                out.pop()
            else:
                out.append(l)
        return SigmaWord(tuple(out), self.n)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return SigmaWord(self.letters[idx], self.n)
        return self.letters[idx]

    def __str__(self) -> str:
        return format_word(self)


def word(*letters: SigmaLetter, n: int = 3) -> SigmaWord:
    return SigmaWord(tuple(letters), n)


def evaluate(w: SigmaWord) -> PolyMap:
    """Left-to-right product of the letters in the tame group."""
    result = PolyMap.identity(w.n)
    for l in reversed(w.letters):
        result = compose(l.to_map(), result)
    return result


def tau_word(k: int, l: int, n: int = 3) -> SigmaWord:
    """``[s(l,1,Xk)] [s(k,1,-Xl)] [s(l,-1,Xk)]``."""
    if k == l:
        raise PolynomialError("tau_word needs k != l")
    xk = Polynomial.var(n, k)
    xl = Polynomial.var(n, l)
    return SigmaWord((SigmaLetter(l, 1, xk), SigmaLetter(k, 1, -xl), SigmaLetter(l, -1, xk)), n)


def transposed_index(i: int, k: int, l: int) -> int:
    return l if i == k else k if i == l else i


# ---------------------------------------------------------------------------
# relation instances

RELATION_KINDS = ("R1", "R2", "R3")


@dataclass(frozen=True)
class RelationInstance:
    kind: str
    params: dict = field(compare=False)
    lhs: SigmaWord
    rhs: SigmaWord

    @property
    def case(self) -> tuple:
        p = self.params
        if self.kind == "R1":
            return (p["i"],)
        if self.kind == "R2":
            return (p["i"], p["j"])
        return (p["k"], p["l"], p["i"])


def _poly(value, n: int) -> Polynomial:
    return value if isinstance(value, Polynomial) else Polynomial.constant(n, value)


def make_relation(kind: str, n: int = 3, **params) -> RelationInstance:
    """Build an instance of relation family ``kind`` ("R1", "R2" or "R3").

    R1 takes ``i, alpha, f, beta, g``; R2 takes ``i, j, alpha, f, beta, g``;
    R3 takes ``k, l, i, alpha, f``.  Side conditions are enforced.
    """
    try:
        if kind == "R1":
            i, alpha, beta = params["i"], scalar(params["alpha"]), scalar(params["beta"])
            f, g = _poly(params["f"], n), _poly(params["g"], n)
            lhs = word(SigmaLetter(i, alpha, f), SigmaLetter(i, beta, g), n=n)
            rhs = word(SigmaLetter(i, alpha * beta, f + g * alpha), n=n)
        elif kind == "R2":
            i, j = params["i"], params["j"]
            alpha, beta = scalar(params["alpha"]), scalar(params["beta"])
            f, g = _poly(params["f"], n), _poly(params["g"], n)
            if i == j:
                raise RelationError("R2 needs i != j")
            if f.uses_variable(i) or f.uses_variable(j):
                raise RelationError(f"R2 needs f free of X{i} and X{j}, got {f}")
            if g.uses_variable(j):
                raise RelationError(f"R2 needs g free of X{j}, got {g}")
            s = SigmaLetter(i, alpha, f)
            lhs = word(s.inverse(), SigmaLetter(j, beta, g), s, n=n)
            rhs = word(SigmaLetter(j, beta, apply_to_poly(g, s.to_map())), n=n)
        elif kind == "R3":
            k, l, i = params["k"], params["l"], params["i"]
            alpha, f = scalar(params["alpha"]), _poly(params["f"], n)
            if k == l:
                raise RelationError("R3 needs k != l")
            t = tau_word(k, l, n)
            j = transposed_index(i, k, l)
            lhs = t * word(SigmaLetter(i, alpha, f), n=n) * t
            rhs = word(SigmaLetter(j, alpha, apply_to_poly(f, swap(k, l, n))), n=n)
        else:
            raise RelationError(f"unknown relation kind {kind!r}")
    except KeyError as exc:
        raise RelationError(f"{kind} is missing parameter {exc.args[0]!r}") from None
    except PolynomialError as exc:
        raise RelationError(str(exc)) from None
    return RelationInstance(kind, dict(params), lhs, rhs)


def check_relation(r: RelationInstance) -> bool:
    return evaluate(r.lhs) == evaluate(r.rhs)


def relation_cases(kind: str, n: int = 3) -> list[tuple]:
    idx = range(1, n + 1)
    if kind == "R1":
        return [(i,) for i in idx]
    if kind == "R2":
        return [(i, j) for i in idx for j in idx if i != j]
    if kind == "R3":
        return [(k, l, i) for k in idx for l in idx if k != l for i in idx]
    raise RelationError(f"unknown relation kind {kind!r}")


# ---------------------------------------------------------------------------
# random instances

def random_scalar(rng: random.Random, bound: int) -> int:
    return rng.choice([c for c in range(-bound, bound + 1) if c])


def random_poly(rng: random.Random, n: int, allowed: Iterable[int], max_degree: int,
                coeff_bound: int, max_terms: int = 4, nonzero: bool = False) -> Polynomial:
    """Sparse random polynomial in the variables ``allowed`` (1-based)."""
    allowed = sorted(set(allowed))
    terms: dict = {}
    count = rng.randint(1 if nonzero else 0, max_terms)
    for _ in range(count):
        d = rng.randint(0, max_degree) if allowed else 0
        mono = [0] * n
        for _ in range(d):
            mono[rng.choice(allowed) - 1] += 1
        terms[tuple(mono)] = terms.get(tuple(mono), 0) + random_scalar(rng, coeff_bound)
    p = Polynomial(n, terms)
    if nonzero and p.is_zero():
        return Polynomial.constant(n, random_scalar(rng, coeff_bound))
    return p


def random_letter(rng: random.Random, max_degree: int, coeff_bound: int, n: int = 3,
                  slot: int | None = None) -> SigmaLetter:
    i = slot if slot is not None else rng.randint(1, n)
    others = [v for v in range(1, n + 1) if v != i]
    f = random_poly(rng, n, others, max_degree, coeff_bound)
    return SigmaLetter(i, random_scalar(rng, coeff_bound), f, rng.choice((1, -1)))


def random_word(seed, length: int, max_degree: int, coeff_bound: int, n: int = 3,
                degree_budget: int = 30) -> SigmaWord:
    """Seeded random word of exactly ``length`` letters.

    Each letter's polynomial has degree at most ``max_degree``; in addition
    the product of the letters' degrees stays within ``degree_budget`` so
    that exact expansion of long words remains tractable.
    """
    if length < 0 or max_degree < 0 or coeff_bound < 1:
        raise ValueError("bounds must be non-negative (coeff_bound positive)")
    rng = random.Random(seed)
    letters = []
    growth = 1
    for _ in range(length):
        cap = min(max_degree, max(1, degree_budget // growth))
        letters.append(random_letter(rng, rng.randint(0, cap), coeff_bound, n))
        growth *= max(1, letters[-1].f.total_degree())
    return SigmaWord(tuple(letters), n)


def random_relation(seed, kind: str, max_degree: int, coeff_bound: int,
                    case: tuple | None = None, n: int = 3) -> RelationInstance:
    """Seeded random instance of ``kind``; ``case`` pins the index pattern."""
    rng = random.Random(seed)
    if case is None:
        case = rng.choice(relation_cases(kind, n))
    every = range(1, n + 1)
    rp = lambda allowed, nz=False: random_poly(rng, n, allowed, max_degree, coeff_bound, nonzero=nz)
    alpha = random_scalar(rng, coeff_bound)
    if kind == "R1":
        (i,) = case
        others = [v for v in every if v != i]
        return make_relation("R1", n, i=i, alpha=alpha, f=rp(others),
                             beta=random_scalar(rng, coeff_bound), g=rp(others))
    if kind == "R2":
        i, j = case
        return make_relation("R2", n, i=i, j=j, alpha=alpha,
                             f=rp([v for v in every if v not in (i, j)]),
                             beta=random_scalar(rng, coeff_bound),
                             g=rp([v for v in every if v != j]))
    if kind == "R3":
        k, l, i = case
        return make_relation("R3", n, k=k, l=l, i=i, alpha=alpha,
                             f=rp([v for v in every if v != i]))
    raise RelationError(f"unknown relation kind {kind!r}")


# ---------------------------------------------------------------------------
# text format

def format_word(w: SigmaWord) -> str:
    return " ".join(str(l) for l in w.letters)


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_word(text: str, n: int = 3) -> SigmaWord:
    """Parse ``s(i,alpha,f)``, ``s(i,alpha,f)^-1`` and ``t(k,l)`` letters."""
    letters: list[SigmaLetter] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        head = text[pos]
        if head not in "st" or pos + 1 >= len(text) or text[pos + 1] != "(":
            raise PolynomialError(f"expected 's(' or 't(' at position {pos}: {text!r}")
        depth, end = 0, None
        for q in range(pos + 1, len(text)):
            if text[q] == "(":
                depth += 1
            elif text[q] == ")":
                depth -= 1
                if depth == 0:
                    end = q
                    break
        if end is None:
            raise PolynomialError(f"unbalanced parentheses at position {pos}: {text!r}")
        args = _split_top(text[pos + 2:end], ",")
        pos = end + 1
        exponent = 1
        if text.startswith("^-1", pos):
            exponent = -1
            pos += 3
        try:
            if head == "t":
                if len(args) != 2:
                    raise PolynomialError("t(k,l) takes two indices")
                tw = tau_word(int(args[0]), int(args[1]), n)
                letters.extend(tw.letters if exponent == 1 else tw.inverse().letters)
            else:
                if len(args) != 3:
                    raise PolynomialError("s(i,alpha,f) takes three arguments")
                letters.append(SigmaLetter(int(args[0]), Fraction(args[1].strip()),
                                           parse_poly(args[2], n), exponent))
        except ValueError as exc:
            raise PolynomialError(f"bad letter near position {pos}: {exc}") from None
    return SigmaWord(tuple(letters), n)
