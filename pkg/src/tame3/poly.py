"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``n`` variables ``X1..Xn`` is a map from exponent tuples to
nonzero rational coefficients.  Coefficients are kept as ``int`` whenever they
are integral and as :class:`fractions.Fraction` otherwise; both compare and
hash identically, so this is purely a speed measure.

    >>> p = parse_poly("X2*X3 + X1^2", 3)
    >>> p * p
    X1^4 + 2*X1^2*X2*X3 + X2^2*X3^2
"""

from __future__ import annotations

import re
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Scalar = Union[int, Fraction]
Monomial = tuple

#: Degree of the zero polynomial.
NEG_INF = float("-inf")


class PolynomialError(ValueError):
    pass


class ParseError(PolynomialError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def scalar(value) -> Scalar:
    """Coerce ``value`` to an exact scalar (int when integral)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return scalar(Fraction(value))
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not allowed")
    raise TypeError(f"cannot use {type(value).__name__} as a scalar")


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _clean(terms: dict) -> dict:
    return {m: _norm(c) for m, c in terms.items() if c != 0}


def _mul_terms(a: dict, b: dict, max_deg=None) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            if max_deg is not None and sum(m) > max_deg:
                continue
            out[m] = get(m, 0) + ca * cb
    return _clean(out)


def _add_into(acc: dict, terms: dict, factor=1) -> None:
    get = acc.get
    for m, c in terms.items():
        v = get(m, 0) + factor * c
        if v == 0:
            acc.pop(m, None)
        else:
            acc[m] = v


@lru_cache(maxsize=None)
def _var_terms(n: int) -> tuple:
    return tuple({tuple(int(j == i) for j in range(n)): 1} for i in range(n))


class Polynomial:
    """Immutable polynomial in ``n`` variables with rational coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, Scalar] | None = None):
        if n < 1:
            raise PolynomialError("a polynomial needs at least one variable")
        self.n = n
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != n or any(e < 0 for e in m):
                raise PolynomialError(f"bad exponent vector {m} for n={n}")
            c = scalar(c)
            if c:
                clean[m] = clean.get(m, 0) + c
        self._terms = _clean(clean)
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.n = n
        p._terms = terms
        p._hash = None
        return p

    # construction helpers

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "Polynomial":
        c = scalar(c)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def var(cls, n: int, i: int) -> "Polynomial":
        """The variable ``Xi`` (1-based)."""
        if not 1 <= i <= n:
            raise PolynomialError(f"variable index {i} out of range 1..{n}")
        return cls._raw(n, {tuple(int(j == i - 1) for j in range(n)): 1})

    @classmethod
    def variables(cls, n: int) -> list["Polynomial"]:
        return [cls.var(n, i) for i in range(1, n + 1)]

    # inspection

    @property
    def terms(self) -> Mapping[Monomial, Scalar]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Scalar]]:
        return iter(self._terms.items())

    def coefficient(self, mono: Sequence[int]) -> Scalar:
        return self._terms.get(tuple(mono), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> Scalar:
        return self._terms.get((0,) * self.n, 0)

    def total_degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(m) for m in self._terms)

    def degree_in(self, i: int):
        """Degree in ``Xi`` alone."""
        self._check_index(i)
        if not self._terms:
            return NEG_INF
        return max(m[i - 1] for m in self._terms)

    def uses_variable(self, i: int) -> bool:
        self._check_index(i)
        return any(m[i - 1] for m in self._terms)

    def variables_used(self) -> set[int]:
        return {i + 1 for m in self._terms for i, e in enumerate(m) if e}

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial._raw(self.n, {m: c for m, c in self._terms.items() if sum(m) == d})

    def truncate(self, d: int) -> "Polynomial":
        """Terms of total degree at most ``d``."""
        return Polynomial._raw(self.n, {m: c for m, c in self._terms.items() if sum(m) <= d})

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise PolynomialError(f"variable index {i} out of range 1..{self.n}")

    def _check_same(self, other: "Polynomial") -> None:
        if self.n != other.n:
            raise PolynomialError(f"ambient mismatch: {self.n} vs {other.n} variables")

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check_same(other)
            return other
        return Polynomial.constant(self.n, other)

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        _add_into(out, other._terms)
        return Polynomial._raw(self.n, _clean(out))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        _add_into(out, other._terms, -1)
        return Polynomial._raw(self.n, _clean(out))

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check_same(other)
            return Polynomial._raw(self.n, _mul_terms(self._terms, other._terms))
        try:
            c = scalar(other)
        except TypeError:
            return NotImplemented
        if not c:
            return Polynomial.zero(self.n)
        return Polynomial._raw(self.n, {m: _norm(v * c) for m, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        c = scalar(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (Fraction(1) / c)

    def __pow__(self, e: int) -> "Polynomial":
        if not isinstance(e, int) or e < 0:
            raise PolynomialError("only non-negative integer powers are supported")
        result = Polynomial.constant(self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def mul_truncated(self, other: "Polynomial", max_deg: int) -> "Polynomial":
        self._check_same(other)
        return Polynomial._raw(self.n, _mul_terms(self._terms, other._terms, max_deg))

    def derivative(self, i: int) -> "Polynomial":
        self._check_index(i)
        k = i - 1
        out = {}
        for m, c in self._terms.items():
            e = m[k]
            if e:
                mm = list(m)
                mm[k] = e - 1
                out[tuple(mm)] = c * e
        return Polynomial._raw(self.n, out)

    # substitution

    def substitute(self, images: Sequence["Polynomial"], max_deg: int | None = None) -> "Polynomial":
        """Simultaneously replace ``Xi`` by ``images[i-1]``.

        With ``max_deg`` set, terms of total degree above it are discarded
        along the way (used by the series inverter).
        """
        if len(images) != self.n:
            raise PolynomialError(
                f"substitution needs {self.n} images, got {len(images)}"
            )
        if not images:
            raise PolynomialError("empty substitution")
        n_out = images[0].n
        for im in images:
            if im.n != n_out:
                raise PolynomialError("substitution images must share one ambient")
        one = (0,) * n_out
        if max_deg is None and n_out == self.n:
            moved = [v for v, im in enumerate(images) if im._terms != _var_terms(self.n)[v]]
            if not moved:
                return self
            if len(moved) == 1:
                return self._horner(moved[0], images[moved[0]])
        powers: list[dict[int, dict]] = [{0: {one: 1}} for _ in images]

        def power(v: int, e: int) -> dict:
            table = powers[v]
            if e not in table:
                best = max(k for k in table if k < e)
                cur = table[best]
                base = images[v]._terms
                for k in range(best + 1, e + 1):
                    cur = _mul_terms(cur, base, max_deg)
                    table[k] = cur
            return table[e]

        acc: dict = {}
        for m, c in self._terms.items():
            term = {one: c}
            for v, e in enumerate(m):
                if e:
                    term = _mul_terms(term, power(v, e), max_deg)
                    if not term:
                        break
            _add_into(acc, term)
        return Polynomial._raw(n_out, _clean(acc))

    def _horner(self, v: int, image: "Polynomial") -> "Polynomial":
        # only X_{v+1} moves: group by its exponent and run Horner's scheme
        groups: dict[int, dict] = {}
        for m, c in self._terms.items():
            e = m[v]
            groups.setdefault(e, {})[m[:v] + (0,) + m[v + 1:]] = c
        if not groups or set(groups) == {0}:
            return self
        top = max(groups)
        acc = dict(groups.get(top, {}))
        img = image._terms
        for e in range(top - 1, -1, -1):
            acc = _mul_terms(acc, img)
            if e in groups:
                _add_into(acc, groups[e])
        return Polynomial._raw(self.n, _clean(acc))

    def rename(self, mapping: Mapping[int, "Polynomial"]) -> "Polynomial":
        """Substitute only the variables named in ``mapping`` (1-based keys)."""
        images = [mapping.get(i, Polynomial.var(self.n, i)) for i in range(1, self.n + 1)]
        return self.substitute(images)

    def evaluate(self, point: Sequence) -> Scalar:
        if len(point) != self.n:
            raise PolynomialError("point dimension mismatch")
        total = 0
        for m, c in self._terms.items():
            t = c
            for x, e in zip(point, m):
                if e:
                    t *= x ** e
            total += t
        return scalar(Fraction(total))

    # comparison / printing

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == ({(0,) * self.n: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        # graded lex: higher total degree first, then lexicographically larger
        return sorted(self._terms.items(), key=lambda mc: (sum(mc[0]), mc[0]), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return format_poly(self)


def substitute(f: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    return f.substitute(images)


def uses_variable(f: Polynomial, i: int) -> bool:
    return f.uses_variable(i)


def total_degree(f: Polynomial):
    return f.total_degree()


# ---------------------------------------------------------------------------
# text format

def _format_scalar(c: Scalar) -> str:
    c = _norm(Fraction(c))
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


def format_poly(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    pieces = []
    for m, c in f.sorted_terms():
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(f"X{i + 1}")
            elif e > 1:
                factors.append(f"X{i + 1}^{e}")
        if not factors:
            body = _format_scalar(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_scalar(mag) + "*" + "*".join(factors)
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>X(?P<idx>\d+))|(?P<op>[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), start))
        elif m.group("var") is not None:
            tokens.append(("var", m.group("idx"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    return tokens


def parse_poly(text: str, n: int) -> Polynomial:
    """Parse ``text`` (e.g. ``"2*X1^2*X2 - 3/4"``) as a polynomial in ``n`` variables.

    Terms are joined by ``+``/``-``; each term is a ``*``-separated product
    of rational constants and variable powers ``Xk^e``.  Parentheses are not
    part of the grammar.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial", text, 0)
    acc: dict = {}
    i = 0
    expect_term = True
    sign = 1
    while i < len(tokens):
        kind, val, pos = tokens[i]
        if expect_term:
            if kind == "op" and val in "+-":
                if val == "-":
                    sign = -sign
                i += 1
                continue
            coeff: Scalar = sign
            mono = [0] * n
            while True:
                if i >= len(tokens):
                    raise ParseError("expected a factor", text, len(text))
                kind, val, pos = tokens[i]
                if kind == "num":
                    coeff = coeff * Fraction(val)
                    i += 1
                elif kind == "var":
                    k = int(val)
                    if not 1 <= k <= n:
                        raise ParseError(f"unknown variable X{k} (n={n})", text, pos)
                    i += 1
                    e = 1
                    if i < len(tokens) and tokens[i][:2] == ("op", "^"):
                        if i + 1 >= len(tokens) or tokens[i + 1][0] != "num" or "/" in tokens[i + 1][1]:
                            raise ParseError("expected an integer exponent", text, tokens[i][2])
                        e = int(tokens[i + 1][1])
                        if e < 1:
                            raise ParseError("exponents must be at least 1", text, tokens[i + 1][2])
                        i += 2
                    mono[k - 1] += e
                else:
                    raise ParseError(f"unexpected {val!r}", text, pos)
                if i < len(tokens) and tokens[i][:2] == ("op", "*"):
                    i += 1
                    continue
                break
            _add_into(acc, {tuple(mono): coeff})
            expect_term = False
            sign = 1
        else:
            if kind == "op" and val in "+-":
                sign = -1 if val == "-" else 1
                expect_term = True
                i += 1
            else:
                raise ParseError(f"expected '+' or '-', got {val!r}", text, pos)
    if expect_term:
        raise ParseError("dangling operator", text, len(text))
    return Polynomial._raw(n, _clean(acc))


def var(n: int, i: int) -> Polynomial:
    return Polynomial.var(n, i)


def const(n: int, c) -> Polynomial:
    return Polynomial.constant(n, c)


def poly_sum(polys: Iterable[Polynomial], n: int) -> Polynomial:
    acc: dict = {}
    for p in polys:
        _add_into(acc, p._terms)
    return Polynomial._raw(n, _clean(acc))
