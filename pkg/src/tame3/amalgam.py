"""The three factor groups of the tame group in dimension three.

* ``H3`` -- the affine group.
* ``H2`` -- maps with ``F1, F2`` affine in ``X1, X2`` only and
  ``F3 = u*X3 + g(X1, X2)``.
* ``H1T`` -- tame maps with ``F1 = a*X1 + b``.  Membership is only
  semi-decidable here: a positive answer comes with a
  :class:`TamenessCertificate` that replays to the element.

An :class:`AmalgamWord` is a product of letters, each tagged with a factor.
Equality of words is decided through :func:`phi_map`, the evaluation into
the tame group, which is injective on the amalgam because the tame group in
dimension three *is* the amalgamated product of these three factors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .automorphism import PolyMap, compose, linear_part, scalar_det
from .jvdk import factor_ta2_ring
from .poly import Polynomial, Scalar, format_poly, scalar
from .words import SigmaLetter, SigmaWord, evaluate, parse_word, format_word


class FactorId(enum.Enum):
    H1T = "H1T"
    H2 = "H2"
    H3 = "H3"

    def __str__(self) -> str:
        return self.value


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class TamenessCertificate:
    """``element == steps[0] * ... * steps[-1] * (a*X1 + b, X2, X3)``.

    Every step is an elementary letter in slot 2 or 3 whose polynomial lives
    in ``K[X1][other slot]``.
    """

    affine_x1: tuple = (1, 0)
    steps: tuple = ()

    def __post_init__(self):
        a, b = scalar(self.affine_x1[0]), scalar(self.affine_x1[1])
        if a == 0:
            raise ValueError("affine part of X1 must be invertible")
        object.__setattr__(self, "affine_x1", (a, b))
        object.__setattr__(self, "steps", tuple(self.steps))
        for s in self.steps:
            if s.i not in (2, 3) or s.exponent != 1:
                raise ValueError(f"certificate step {s} must be a positive slot-2/3 letter")

    def affine_map(self) -> PolyMap:
        a, b = self.affine_x1
        x1, x2, x3 = Polynomial.variables(3)
        if (a, b) == (1, 0):
            return PolyMap.identity(3)
        from .automorphism import sigma
        return sigma(1, a, Polynomial.constant(3, b))

    def as_word(self) -> SigmaWord:
        a, b = self.affine_x1
        letters = list(self.steps)
        if (a, b) != (1, 0):
            letters.append(SigmaLetter(1, a, Polynomial.constant(3, b)))
        return SigmaWord(tuple(letters), 3)

    def replay(self) -> PolyMap:
        return evaluate(self.as_word())

    def then(self, other: "TamenessCertificate") -> "TamenessCertificate":
        """Certificate of the product ``self.element * other.element``."""
        # S1 A1 S2 A2 = S1 (A1 S2 A1^-1) A1 A2
        a1, b1 = self.affine_x1
        a2, b2 = other.affine_x1
        moved = _conjugate_steps(other.steps, a1, b1)
        return TamenessCertificate((a1 * a2, a1 * b2 + b1), self.steps + moved)

    def inverse(self) -> "TamenessCertificate":
        # (S A)^-1 = A^-1 S^-1 = (A^-1 S^-1 A) A^-1
        a, b = self.affine_x1
        ia = Fraction(1) / a
        ib = -b * ia
        inv_steps = tuple(_elem_inverse(s) for s in reversed(self.steps))
        return TamenessCertificate((ia, ib), _conjugate_steps(inv_steps, ia, ib))

    def __str__(self) -> str:
        return format_word(self.as_word())


def _elem_inverse(s: SigmaLetter) -> SigmaLetter:
    ia = Fraction(1) / s.alpha
    return SigmaLetter(s.i, ia, s.f * (-ia))


def _conjugate_steps(steps: Sequence[SigmaLetter], a, b) -> tuple:
    """Conjugate steps by ``A = (a*X1 + b, X2, X3)``: ``A s A^-1``."""
    if (a, b) == (1, 0):
        return tuple(steps)
    x1, x2, x3 = Polynomial.variables(3)
    back = (x1 - b) * (Fraction(1) / a)
    return tuple(SigmaLetter(s.i, s.alpha, s.f.substitute([back, x2, x3])) for s in steps)


@dataclass(frozen=True)
class Membership:
    verdict: Verdict
    certificate: TamenessCertificate | None = None

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES


# ---------------------------------------------------------------------------
# membership tests

def _affine_in(p: Polynomial, allowed: Iterable[int]) -> bool:
    allowed = set(allowed)
    for m in p._terms:
        if sum(m) > 1:
            return False
        if any(e and (i + 1) not in allowed for i, e in enumerate(m)):
            return False
    return True


def membership_H3(phi: PolyMap) -> bool:
    if phi.n != 3:
        raise ValueError("factor membership is defined in three variables")
    if phi.degree() > 1:
        return False
    return scalar_det(linear_part(phi)) != 0


def membership_H2(phi: PolyMap) -> bool:
    if phi.n != 3:
        raise ValueError("factor membership is defined in three variables")
    f1, f2, f3 = phi.components
    if not (_affine_in(f1, (1, 2)) and _affine_in(f2, (1, 2))):
        return False
    if scalar_det([[f1.coefficient((1, 0, 0)), f1.coefficient((0, 1, 0))],
                   [f2.coefficient((1, 0, 0)), f2.coefficient((0, 1, 0))]]) == 0:
        return False
    u = f3.coefficient((0, 0, 1))
    if u == 0:
        return False
    return not (f3 - Polynomial.var(3, 3) * u).uses_variable(3)


def membership_H1T(phi: PolyMap) -> Membership:
    if phi.n != 3:
        raise ValueError("factor membership is defined in three variables")
    f1 = phi.components[0]
    if not _affine_in(f1, (1,)):
        return Membership(Verdict.NO)
    a, b = f1.coefficient((1, 0, 0)), f1.constant_term()
    if a == 0:
        return Membership(Verdict.NO)
    cert_affine = TamenessCertificate((a, b))
    psi = compose(phi, cert_affine.affine_map().inverse)
    # psi fixes X1; a K[X1]-automorphism has a unit Jacobian in X2, X3
    p, q = psi.components[1], psi.components[2]
    jac = p.derivative(2) * q.derivative(3) - p.derivative(3) * q.derivative(2)
    if jac.is_zero() or not jac.is_constant():
        return Membership(Verdict.NO)
    steps = factor_ta2_ring(psi)
    if steps is None:
        return Membership(Verdict.UNKNOWN)
    return Membership(Verdict.YES, TamenessCertificate((a, b), tuple(steps)))


def member(phi: PolyMap, factor: FactorId) -> bool:
    if factor is FactorId.H3:
        return membership_H3(phi)
    if factor is FactorId.H2:
        return membership_H2(phi)
    return membership_H1T(phi).verdict is Verdict.YES


def in_intersection(phi: PolyMap, a: FactorId, b: FactorId) -> bool:
    if a is b:
        raise ValueError("intersection needs two different factors")
    # cheap tests first
    order = sorted((a, b), key=lambda f: f is FactorId.H1T)
    return all(member(phi, f) for f in order)


# ---------------------------------------------------------------------------
# letters and words

class InvalidLetter(ValueError):
    pass


@dataclass(frozen=True)
class AmalgamLetter:
    factor: FactorId
    element: PolyMap
    certificate: TamenessCertificate | None = None

    def inverse(self) -> "AmalgamLetter":
        inv = self.element.inverse
        if inv is None:
            from .automorphism import invert
            inv = invert(self.element)
        cert = self.certificate.inverse() if self.certificate is not None else None
        return AmalgamLetter(self.factor, inv, cert)

    def same_element(self, other: "AmalgamLetter") -> bool:
        return self.element == other.element

    def __str__(self) -> str:
        s = f"{self.factor}: {self.element}"
        if self.certificate is not None:
            s += f" cert: {self.certificate}"
        return s


def make_letter(factor: FactorId | str, element: PolyMap,
                certificate: TamenessCertificate | None = None) -> AmalgamLetter:
    """Validated letter.  H1T letters get a certificate found on demand."""
    factor = FactorId(factor) if isinstance(factor, str) else factor
    if factor is FactorId.H1T:
        if certificate is None:
            m = membership_H1T(element)
            if m.verdict is not Verdict.YES:
                raise InvalidLetter(f"{element} has no tameness certificate ({m.verdict.value})")
            certificate = m.certificate
        elif certificate.replay() != element:
            raise InvalidLetter("certificate does not replay to the element")
    else:
        if certificate is not None:
            raise InvalidLetter("only H1T letters carry certificates")
        if not member(element, factor):
            raise InvalidLetter(f"{element} is not in {factor}")
    if not element.verified:
        from .automorphism import verify
        element = verify(element)
    return AmalgamLetter(factor, element, certificate)


def h1t_letter(i: int, alpha, f: Polynomial) -> AmalgamLetter:
    """Elementary map in slot 2 or 3, with its one-step certificate."""
    s = SigmaLetter(i, alpha, f)
    if i not in (2, 3):
        raise InvalidLetter("elementary H1T letters live in slot 2 or 3")
    return AmalgamLetter(FactorId.H1T, s.to_map(), TamenessCertificate((1, 0), (s,)))


@dataclass(frozen=True)
class AmalgamWord:
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    def __mul__(self, other: "AmalgamWord") -> "AmalgamWord":
        return AmalgamWord(self.letters + other.letters)

    def inverse(self) -> "AmalgamWord":
        return AmalgamWord(tuple(l.inverse() for l in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return AmalgamWord(self.letters[idx])
        return self.letters[idx]

    def factors(self) -> list[FactorId]:
        return [l.factor for l in self.letters]

    def __str__(self) -> str:
        return format_amalgam(self)


def phi_map(w: AmalgamWord | Sequence[AmalgamLetter]) -> PolyMap:
    # fold from the right so each step substitutes into a single letter
    result = PolyMap.identity(3)
    for l in reversed(list(w)):
        result = compose(l.element, result)
    return result


def amalgam_equal(u: AmalgamWord, v: AmalgamWord) -> bool:
    return phi_map(u) == phi_map(v)


def _merge_same(a: AmalgamLetter, b: AmalgamLetter) -> AmalgamLetter:
    elem = compose(a.element, b.element)
    cert = None
    if a.factor is FactorId.H1T:
        cert = a.certificate.then(b.certificate)
    return AmalgamLetter(a.factor, elem, cert)


def _relabel(l: AmalgamLetter, target: FactorId) -> AmalgamLetter | None:
    if target is FactorId.H1T:
        m = membership_H1T(l.element)
        if m.verdict is not Verdict.YES:
            return None
        return AmalgamLetter(target, l.element, m.certificate)
    if not member(l.element, target):
        return None
    return AmalgamLetter(target, l.element, None)


_PREFERENCE = (FactorId.H3, FactorId.H2, FactorId.H1T)


def _try_merge(a: AmalgamLetter, b: AmalgamLetter) -> AmalgamLetter | None:
    if a.factor is b.factor:
        return _merge_same(a, b)
    for target in _PREFERENCE:
        if target is a.factor:
            moved = _relabel(b, target)
            if moved is not None:
                return _merge_same(a, moved)
        elif target is b.factor:
            moved = _relabel(a, target)
            if moved is not None:
                return _merge_same(moved, b)
    return None


def reduce(w: AmalgamWord) -> AmalgamWord:
    """Greedy simplifier preserving :func:`phi_map`.

    Drops identity letters and merges neighbours that share a factor,
    relabelling a letter into its neighbour's factor when it lies in the
    intersection.  The output has no mergeable neighbours, so ``reduce`` is
    idempotent.
    """
    out: list[AmalgamLetter] = []
    for l in w:
        if l.element.is_identity():
            continue
        cur: AmalgamLetter | None = l
        while out:
            merged = _try_merge(out[-1], cur)
            if merged is None:
                break
            out.pop()
            if merged.element.is_identity():
                cur = None
                break
            cur = merged
        if cur is not None:
            out.append(cur)
    return AmalgamWord(tuple(out))


# ---------------------------------------------------------------------------
# text format

def format_amalgam(w: AmalgamWord) -> str:
    return "\n".join(str(l) for l in w.letters)


def parse_amalgam(text: str) -> AmalgamWord:
    """One letter per line: ``<factor>: (F1; F2; F3)`` with optional ``cert: <word>``."""
    letters = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected '<factor>: (F1; F2; F3)'")
        try:
            factor = FactorId(head.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: unknown factor {head.strip()!r}") from None
        body, csep, cert_txt = rest.partition("cert:")
        element = PolyMap.parse(body.strip())
        cert = None
        if csep:
            cert = certificate_from_word(parse_word(cert_txt, 3))
        letters.append(make_letter(factor, element, cert))
    return AmalgamWord(tuple(letters))


def certificate_from_word(w: SigmaWord) -> TamenessCertificate:
    """Read a certificate written as slot-2/3 letters plus an optional final slot-1 affine letter."""
    letters = list(w.letters)
    affine = (1, 0)
    if letters and letters[-1].i == 1:
        last = letters.pop()
        if not last.f.is_constant() or last.exponent != 1:
            raise ValueError("the slot-1 certificate letter must be s(1,a,b) with b constant")
        affine = (last.alpha, last.f.constant_term())
    return TamenessCertificate(affine, tuple(letters))
