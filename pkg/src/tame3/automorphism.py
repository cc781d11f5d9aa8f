"""Polynomial endomorphisms of affine n-space and the elementary generators.

Maps act on the right: ``compose(phi, psi)`` substitutes the components of
``psi`` into those of ``phi``, so ``f(phi psi) == f(phi)(psi)``.  With this
convention the product relations among the elementary maps hold verbatim, e.g.

    sigma(i, a, f) * sigma(i, b, g) == sigma(i, a*b, f + a*g)
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import Polynomial, PolynomialError, Scalar, format_poly, parse_poly, scalar


class NotInvertible(ArithmeticError):
    pass


class PolyMap:
    """An ordered tuple of ``n`` polynomials in ``n`` variables.

    A map may carry a stored two-sided inverse; such maps are *verified*.
    The stored inverse never takes part in equality.
    """

    __slots__ = ("n", "components", "_inv", "_inv_factors", "_hash")

    def __init__(self, components: Sequence[Polynomial]):
        components = tuple(components)
        n = len(components)
        if n == 0:
            raise PolynomialError("a map needs at least one component")
        for c in components:
            if not isinstance(c, Polynomial):
                raise TypeError("components must be Polynomial instances")
            if c.n != n:
                raise PolynomialError(
                    f"component has {c.n} variables but the map has {n} components"
                )
        self.n = n
        self.components = components
        self._inv: PolyMap | None = None
        # (phi, psi) when self == phi*psi with both verified; inverse built on demand
        self._inv_factors: tuple | None = None
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "PolyMap":
        m = cls(Polynomial.variables(n))
        return _link(m, m)

    @classmethod
    def parse(cls, text: str) -> "PolyMap":
        s = text.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise PolynomialError(f"automorphism must look like '(F1; ...; Fn)': {text!r}")
        parts = s[1:-1].split(";")
        n = len(parts)
        return cls([parse_poly(p, n) for p in parts])

    @property
    def _inverse(self) -> "PolyMap | None":
        if self._inv is None and self._inv_factors is not None:
            phi, psi = self._inv_factors
            inv = PolyMap([c.substitute(phi._inverse.components)
                           for c in psi._inverse.components])
            self._inv_factors = None
            _link(self, inv)
        return self._inv

    @property
    def verified(self) -> bool:
        return self._inv is not None or self._inv_factors is not None

    @property
    def inverse(self) -> "PolyMap | None":
        return self._inverse

    def with_inverse(self, inv: "PolyMap") -> "PolyMap":
        """Attach ``inv`` as the inverse of ``self`` (and vice versa).

        Both compositions are checked before linking.
        """
        ident = PolyMap.identity(self.n)
        if compose(self, inv) != ident or compose(inv, self) != ident:
            raise NotInvertible("supplied inverse does not compose to the identity")
        return _link(PolyMap(self.components), PolyMap(inv.components))

    def forget_inverse(self) -> "PolyMap":
        return PolyMap(self.components)

    def is_identity(self) -> bool:
        return all(
            len(c) == 1 and c.coefficient(tuple(int(j == i) for j in range(self.n))) == 1
            for i, c in enumerate(self.components)
        )

    def degree(self):
        return max(c.total_degree() for c in self.components)

    def __getitem__(self, i: int) -> Polynomial:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return self.n

    def __mul__(self, other: "PolyMap") -> "PolyMap":
        if not isinstance(other, PolyMap):
            return NotImplemented
        return compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.components)
        return self._hash

    def __str__(self) -> str:
        return format_map(self)

    __repr__ = __str__


def _link(a: PolyMap, b: PolyMap) -> PolyMap:
    a._inv = b
    b._inv = a
    return a


def format_map(phi: PolyMap) -> str:
    return "(" + "; ".join(format_poly(c) for c in phi.components) + ")"


def parse_map(text: str) -> PolyMap:
    return PolyMap.parse(text)


def identity(n: int = 3) -> PolyMap:
    return PolyMap.identity(n)


def compose(phi: PolyMap, psi: PolyMap) -> PolyMap:
    """Product ``phi psi``: component i is ``phi[i]`` with ``psi`` substituted."""
    if phi.n != psi.n:
        raise PolynomialError(f"ambient mismatch: {phi.n} vs {psi.n}")
    if phi.is_identity():
        return psi
    if psi.is_identity():
        return phi
    out = PolyMap([c.substitute(psi.components) for c in phi.components])
    if phi.verified and psi.verified:
        out._inv_factors = (phi, psi)
    return out


def compose_all(maps: Sequence[PolyMap], n: int) -> PolyMap:
    # fold from the right so each step substitutes into a small factor
    result = PolyMap.identity(n)
    for m in reversed(maps):
        result = compose(m, result)
    return result


def apply_to_poly(f: Polynomial, phi: PolyMap) -> Polynomial:
    """``f(phi)``: substitute the components of ``phi`` into ``f``."""
    if f.n != phi.n:
        raise PolynomialError(f"ambient mismatch: {f.n} vs {phi.n}")
    return f.substitute(phi.components)


# ---------------------------------------------------------------------------
# elementary generators

def sigma(i: int, alpha, f: Polynomial | int = 0, n: int = 3) -> PolyMap:
    """Elementary map replacing slot ``i`` by ``alpha*Xi + f`` (f free of Xi)."""
    alpha = scalar(alpha)
    if isinstance(f, Polynomial):
        n = f.n
    else:
        f = Polynomial.constant(n, f)
    if not 1 <= i <= n:
        raise PolynomialError(f"slot {i} out of range 1..{n}")
    if alpha == 0:
        raise PolynomialError("alpha must be nonzero")
    if f.uses_variable(i):
        raise PolynomialError(f"f = {f} must not involve X{i}")
    xs = Polynomial.variables(n)
    fwd = list(xs)
    fwd[i - 1] = xs[i - 1] * alpha + f
    ainv = Fraction(1) / alpha
    back = list(xs)
    back[i - 1] = xs[i - 1] * ainv - f * ainv
    return _link(PolyMap(fwd), PolyMap(back))


def swap(k: int, l: int, n: int = 3) -> PolyMap:
    """Literal coordinate transposition of slots ``k`` and ``l``."""
    if k == l:
        raise PolynomialError("transposition needs two distinct slots")
    xs = Polynomial.variables(n)
    xs[k - 1], xs[l - 1] = xs[l - 1], xs[k - 1]
    m = PolyMap(xs)
    return _link(m, m)


def tau(k: int, l: int, n: int = 3) -> PolyMap:
    """The transposition of slots k and l, built from three elementary maps."""
    if k == l:
        raise PolynomialError("tau needs k != l")
    xk = Polynomial.var(n, k)
    xl = Polynomial.var(n, l)
    t = compose(compose(sigma(l, 1, xk), sigma(k, 1, -xl)), sigma(l, -1, xk))
    if t != swap(k, l, n):
        raise AssertionError("elementary construction of tau disagrees with the swap")
    return t


def nagata() -> PolyMap:
    """Nagata's map ``(X + Z*D, Y - 2*X*D - Z*D^2, Z)`` with ``D = Y*Z + X^2``.

    Variables are identified as (X, Y, Z) = (X1, X2, X3).  The inverse is
    obtained from :func:`invert`.
    """
    x, y, z = Polynomial.variables(3)
    d = y * z + x * x
    phi = PolyMap([x + z * d, y - 2 * x * d - z * d * d, z])
    return invert(phi)._inverse


# ---------------------------------------------------------------------------
# Jacobian and inversion

def jacobian_matrix(phi: PolyMap) -> list[list[Polynomial]]:
    return [[c.derivative(j) for j in range(1, phi.n + 1)] for c in phi.components]


def poly_det(rows: list[list[Polynomial]]) -> Polynomial:
    size = len(rows)
    if size == 1:
        return rows[0][0]
    total = None
    for j in range(size):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * poly_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def jacobian_determinant(phi: PolyMap) -> Polynomial:
    return poly_det(jacobian_matrix(phi))


def scalar_det(m: list[list]) -> Fraction:
    a = [[Fraction(x) for x in row] for row in m]
    size = len(a)
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, size):
            factor = a[r][col] / a[col][col]
            if factor:
                for c in range(col, size):
                    a[r][c] -= factor * a[col][c]
    return det


def scalar_inverse(m: list[list]) -> list[list[Fraction]]:
    size = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(size)]
         for i, row in enumerate(m)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            raise NotInvertible("singular linear part")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(size):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[size:] for row in a]


def affine_factors(phi: PolyMap) -> list[PolyMap]:
    """Elementary maps whose left-to-right product is the affine map ``phi``.

    Composing with these one at a time substitutes a single variable per
    step, which is far cheaper than substituting dense linear forms at once.
    """
    n = phi.n
    if phi.degree() > 1:
        raise PolynomialError("affine_factors needs an affine map")
    units = [tuple(int(j == i) for j in range(n)) for i in range(n)]
    zero = (0,) * n
    rows = [[Fraction(c.coefficient(u)) for u in units] + [Fraction(c.coefficient(zero))]
            for c in phi.components]
    xs = Polynomial.variables(n)
    ops: list[PolyMap] = []

    def op(i: int, alpha, coeffs: dict, const=0):
        # left multiplication: row i <- alpha*row i + sum c_j row j + const
        f = Polynomial.constant(n, const)
        for j, c in coeffs.items():
            f = f + xs[j] * c
        ops.append(sigma(i + 1, alpha, f))
        new = [alpha * x for x in rows[i]]
        for j, c in coeffs.items():
            new = [a + c * b for a, b in zip(new, rows[j])]
        new[n] += const
        rows[i] = new

    for col in range(n):
        if rows[col][col] == 0:
            piv = next((r for r in range(col + 1, n) if rows[r][col] != 0), None)
            if piv is None:
                raise NotInvertible("singular linear part")
            op(col, 1, {piv: 1})
        if rows[col][col] != 1:
            op(col, Fraction(1) / rows[col][col], {})
        for r in range(n):
            if r != col and rows[r][col] != 0:
                op(r, 1, {col: -rows[r][col]})
    for i in range(n):
        if rows[i][n] != 0:
            op(i, 1, {}, -rows[i][n])
    return [e.inverse for e in ops]


def linear_part(phi: PolyMap) -> list[list[Scalar]]:
    n = phi.n
    units = [tuple(int(j == i) for j in range(n)) for i in range(n)]
    return [[c.coefficient(u) for u in units] for c in phi.components]


def invert(phi: PolyMap, use_cached: bool = True) -> PolyMap:
    """Inverse of ``phi``, or :class:`NotInvertible`.

    The inverse is found degree by degree as the formal inverse of the
    translated map, up to the degree bound ``deg(phi)**(n-1)``; a candidate
    is only accepted once both compositions are exactly the identity.  A
    non-constant or vanishing Jacobian determinant rejects immediately.
    """
    if use_cached and phi.verified:
        return phi._inverse
    n = phi.n
    jac = jacobian_determinant(phi)
    if jac.is_zero() or not jac.is_constant():
        raise NotInvertible(f"Jacobian determinant {jac} is not a nonzero constant")
    deg = phi.degree()
    bound = max(1, int(deg) ** (n - 1))
    shift = [c.constant_term() for c in phi.components]
    lin = linear_part(phi)
    linv = scalar_inverse(lin)
    xs = Polynomial.variables(n)
    # G = phi - phi(0) = L x + N(x); N collects the terms of degree >= 2
    nonlinear = [
        Polynomial._raw(n, {m: c for m, c in comp.items() if sum(m) >= 2})
        for comp in phi.components
    ]

    def apply_linv(vec: list[Polynomial]) -> list[Polynomial]:
        return [
            sum((vec[j] * linv[k][j] for j in range(n) if linv[k][j]), Polynomial.zero(n))
            for k in range(n)
        ]

    series = apply_linv(xs)
    back_shift = [xs[j] - shift[j] for j in range(n)]
    ident = PolyMap.identity(n)

    def candidate() -> PolyMap | None:
        psi = PolyMap([h.substitute(back_shift) for h in series])
        if compose(phi, psi) == ident and compose(psi, phi) == ident:
            return psi
        return None

    for d in range(2, bound + 1):
        resid = [
            nl.substitute(series, max_deg=d).homogeneous_part(d) if nl else Polynomial.zero(n)
            for nl in nonlinear
        ]
        step = apply_linv(resid)
        if all(s.is_zero() for s in step):
            psi = candidate()
            if psi is not None:
                return _link(PolyMap(phi.components), psi)._inverse
            continue
        series = [h - s for h, s in zip(series, step)]
    psi = candidate()
    if psi is None:
        raise NotInvertible(f"no inverse of degree <= {bound}")
    return _link(PolyMap(phi.components), psi)._inverse


def is_automorphism(phi: PolyMap) -> bool:
    try:
        invert(phi)
    except NotInvertible:
        return False
    return True


def verify(phi: PolyMap) -> PolyMap:
    """Return a copy of ``phi`` carrying its inverse (raises NotInvertible)."""
    if phi.verified:
        return phi
    return invert(phi)._inverse
