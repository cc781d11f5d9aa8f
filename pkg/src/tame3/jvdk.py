"""Degree-reduction factorization of plane automorphisms.

Over a field, every automorphism of the plane splits into alternating
affine and triangular pieces; :func:`factor_ga2` finds such a splitting by
repeatedly cancelling the leading form of the higher-degree component.

:func:`factor_ta2_ring` runs the same reduction for maps of ``K[X1][X2, X3]``
that fix ``X1``.  It only ever subtracts ``c * Q**k`` with ``c`` in ``K[X1]``,
so it can fail on tame input; failure is reported as ``None`` (unknown).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .automorphism import PolyMap, compose, compose_all, linear_part, scalar_det
from .poly import Polynomial, PolynomialError
from .words import SigmaLetter


class NotAutomorphism(ValueError):
    pass


class PlaneKind(enum.Enum):
    AFFINE = "A"
    TRIANGULAR = "T"


@dataclass(frozen=True)
class PlaneLetter:
    kind: PlaneKind
    element: PolyMap

    def __post_init__(self):
        if self.element.n != 2:
            raise PolynomialError("plane letters live in two variables")
        if self.kind is PlaneKind.AFFINE and not is_affine(self.element):
            raise PolynomialError(f"{self.element} is not affine")
        if self.kind is PlaneKind.TRIANGULAR and not is_triangular(self.element):
            raise PolynomialError(f"{self.element} is not triangular")

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.element}"


def is_affine(phi: PolyMap) -> bool:
    if phi.degree() > 1:
        return False
    return scalar_det(linear_part(phi)) != 0


def is_triangular(phi: PolyMap) -> bool:
    """``(a*X1 + b, c*X2 + p(X1))`` with ``a, c`` nonzero."""
    p1, p2 = phi.components
    if p1.total_degree() > 1 or p1.uses_variable(2) or p1.coefficient((1, 0)) == 0:
        return False
    c = p2.coefficient((0, 1))
    rest = p2 - Polynomial.var(2, 2) * c
    return c != 0 and not rest.uses_variable(2)


def recompose(letters, n: int = 2) -> PolyMap:
    return compose_all([l.element for l in letters], n)


def _leading_form(p: Polynomial) -> Polynomial:
    return p.homogeneous_part(p.total_degree())


def _proportional_power(big: Polynomial, small: Polynomial):
    """Return ``(c, k)`` with ``lead(big) == c * lead(small)**k``, else ``None``."""
    db, ds = big.total_degree(), small.total_degree()
    if ds < 1 or db % ds:
        return None
    k = db // ds
    lead_small_k = _leading_form(small) ** k
    lead_big = _leading_form(big)
    m, ref = next(iter(lead_small_k.items()))
    c = Fraction(lead_big.coefficient(m)) / ref
    if c == 0 or lead_big != lead_small_k * c:
        return None
    return c, k


def _simplify(letters: list[PlaneLetter]) -> list[PlaneLetter]:
    out: list[PlaneLetter] = []
    for l in letters:
        if l.element.is_identity():
            continue
        if out and out[-1].kind is l.kind:
            merged = compose(out[-1].element, l.element)
            out.pop()
            if not merged.is_identity():
                out.append(PlaneLetter(l.kind, merged))
        else:
            out.append(l)
    return out


def factor_ga2(phi: PolyMap, return_degrees: bool = False):
    """Split a plane automorphism into affine and triangular letters.

    ``recompose(factor_ga2(phi)) == phi``.  With ``return_degrees`` the
    sequence ``deg F1 + deg F2`` observed after each cancellation is returned
    as well; it is strictly decreasing.  Raises :class:`NotAutomorphism` when
    leading forms fail the power-of-the-other shape.
    """
    if phi.n != 2:
        raise PolynomialError("factor_ga2 works on plane maps")
    x1, x2 = Polynomial.variables(2)
    swap_map = PolyMap([x2, x1])
    cur = phi
    undo: list[PlaneLetter] = []  # applied on the left, in order
    degrees = []
    while cur.degree() > 1:
        p, q = cur.components
        dp, dq = p.total_degree(), q.total_degree()
        if dp < 1 or dq < 1:
            raise NotAutomorphism(f"constant component in {cur}")
        if dp > dq:
            undo.append(PlaneLetter(PlaneKind.AFFINE, swap_map))
            cur = compose(swap_map, cur)
            p, q = q, p
            dp, dq = dq, dp
        # now deg q >= deg p: cancel lead(q) against a power of lead(p)
        found = _proportional_power(q, p)
        if found is None:
            raise NotAutomorphism(f"leading forms of {cur} are not powers of each other")
        c, k = found
        tri = PolyMap([x1, x2 - c * x1 ** k])
        nxt = compose(tri, cur)
        if nxt.components[1].total_degree() >= dq:
            raise NotAutomorphism("degree failed to drop")
        undo.append(PlaneLetter(PlaneKind.TRIANGULAR, tri))
        cur = nxt
        degrees.append(sum(c.total_degree() for c in cur.components))
    if not is_affine(cur):
        raise NotAutomorphism(f"terminal map {cur} is not an invertible affine map")
    # undo_m ... undo_1 phi = cur  =>  phi = undo_1^-1 ... undo_m^-1 cur
    letters = [PlaneLetter(u.kind, _plane_inverse(u.element)) for u in undo]
    letters.append(PlaneLetter(PlaneKind.AFFINE, cur))
    letters = _simplify(letters)
    if return_degrees:
        return letters, degrees
    return letters


def _plane_inverse(m: PolyMap) -> PolyMap:
    x1, x2 = Polynomial.variables(2)
    p1, p2 = m.components
    if p1 == x2 and p2 == x1:
        return m
    # (X1, X2 - c*X1^k)
    return PolyMap([x1, x2 + (x2 - p2)])


# ---------------------------------------------------------------------------
# ring mode: X1 is a coefficient, slots 2 and 3 are the plane variables

def _deg23(p: Polynomial):
    if p.is_zero():
        return float("-inf")
    return max(m[1] + m[2] for m in p._terms)


def _lead23(p: Polynomial) -> Polynomial:
    d = _deg23(p)
    return Polynomial._raw(p.n, {m: c for m, c in p._terms.items() if m[1] + m[2] == d})


def univariate_divmod(a: Polynomial, b: Polynomial):
    """Division with remainder in ``K[X1]`` (both arguments free of X2, X3)."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    n = a.n
    x1 = Polynomial.var(n, 1)
    db = b.degree_in(1)
    lb = Fraction(b.coefficient((db,) + (0,) * (n - 1)))
    q = Polynomial.zero(n)
    r = a
    while not r.is_zero() and r.degree_in(1) >= db:
        dr = r.degree_in(1)
        c = Fraction(r.coefficient((dr,) + (0,) * (n - 1))) / lb
        t = x1 ** (dr - db) * c
        q = q + t
        r = r - t * b
    return q, r


def _coefficient_quotient(big: Polynomial, small: Polynomial):
    """``c`` in K[X1] with ``big == c * small``, or ``None``."""
    m = next(iter(small._terms))
    n = small.n

    def x1_part(p, mono):
        return Polynomial._raw(n, {(e[0],) + (0,) * (n - 1): c for e, c in p._terms.items()
                                   if e[1:] == mono[1:]})

    num, den = x1_part(big, m), x1_part(small, m)
    q, r = univariate_divmod(num, den)
    if not r.is_zero() or q.is_zero() or q * small != big:
        return None
    return q


def _x1_only(p: Polynomial) -> bool:
    return not (p.uses_variable(2) or p.uses_variable(3))


def factor_ta2_ring(phi: PolyMap, max_steps: int = 200) -> list[SigmaLetter] | None:
    """Elementary factorization of a map fixing X1, over the ring ``K[X1]``.

    Returns letters ``s(slot, alpha, g)`` with ``slot`` in {2, 3} and ``g`` in
    ``K[X1][other slot]`` whose left-to-right product is ``phi``, or ``None``
    when the reduction gets stuck.
    """
    if phi.n != 3 or phi.components[0] != Polynomial.var(3, 1):
        raise PolynomialError("ring mode needs a 3-variable map fixing X1")
    n = 3
    x1, x2, x3 = Polynomial.variables(n)
    slot_var = {2: x2, 3: x3}
    cur = phi
    ops: list[SigmaLetter] = []  # left multiplications, in order

    def apply(slot: int, alpha, g: Polynomial):
        nonlocal cur
        op = SigmaLetter(slot, alpha, g)
        ops.append(op)
        cur = compose(op.to_map(), cur)

    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            return None
        p, q = cur.components[1], cur.components[2]
        dp, dq = _deg23(p), _deg23(q)
        if dp < 1 or dq < 1:
            return None
        if dp <= 1 and dq <= 1:
            break
        done = False
        # cancel the higher component's leading form by a power of the other's
        for slot, big, small, db, ds in ((3, q, p, dq, dp), (2, p, q, dp, dq)):
            if db < ds or db % ds:
                continue
            k = db // ds
            c = _coefficient_quotient(_lead23(big), _lead23(small) ** k)
            if c is None:
                continue
            other = x2 if slot == 3 else x3
            apply(slot, 1, -(c * other ** k))
            done = True
            break
        if not done:
            return None
    # linear stage over K[X1]: rows are (coefficient of X2, coefficient of X3)
    for slot in (2, 3):
        comp = cur.components[slot - 1]
        shift = Polynomial._raw(n, {m: c for m, c in comp._terms.items() if m[1] + m[2] == 0})
        if not shift.is_zero():
            apply(slot, 1, -shift)

    def coeff(slot: int, var_idx: int) -> Polynomial:
        comp = cur.components[slot - 1]
        return Polynomial._raw(n, {(m[0], 0, 0): c for m, c in comp._terms.items()
                                   if m[var_idx] == 1 and m[1] + m[2] == 1})

    while True:
        steps += 1
        if steps > max_steps:
            return None
        a, c = coeff(2, 1), coeff(3, 1)
        if c.is_zero() or a.is_zero():
            break
        if a.degree_in(1) >= c.degree_in(1):
            quo, _ = univariate_divmod(a, c)
            apply(2, 1, -(quo * x3))
        else:
            quo, _ = univariate_divmod(c, a)
            apply(3, 1, -(quo * x2))
    if coeff(2, 1).is_zero():
        # rows (0, b), (c, d): add row 3 to row 2 so the X2 column leads in slot 2
        apply(2, 1, x3)
        if coeff(3, 1).is_zero():
            return None
        quo, r = univariate_divmod(coeff(3, 1), coeff(2, 1))
        if not r.is_zero():
            return None
        apply(3, 1, -(quo * x2))
    a, b, d = coeff(2, 1), coeff(2, 2), coeff(3, 2)
    if not (a.is_constant() and d.is_constant()) or a.is_zero() or d.is_zero():
        return None
    a0, d0 = a.constant_term(), d.constant_term()
    # row2 -= (b/d) row3
    if not b.is_zero():
        apply(2, 1, -(b * (Fraction(1) / d0) * x3))
    if a0 != 1:
        apply(2, Fraction(1) / a0, 0 * x1)
    if d0 != 1:
        apply(3, Fraction(1) / d0, 0 * x1)
    if not cur.is_identity():
        return None
    # ops_m ... ops_1 phi = id  =>  phi = ops_1^-1 ... ops_m^-1
    return [_elementary_inverse(o) for o in ops]


def _elementary_inverse(l: SigmaLetter) -> SigmaLetter:
    inv_alpha = Fraction(1) / l.alpha
    return SigmaLetter(l.i, inv_alpha, l.f * (-inv_alpha))
