"""The rewriting map from elementary words to amalgam words, and chain replay.

:func:`psi_letter` sends

* ``s(i, a, f)`` with ``i`` in {2, 3} to the one-letter H1T word,
* ``s(1, a, f)`` with ``deg f <= 1`` to the one-letter H3 word,
* ``s(1, a, f)`` in general to ``t13 . s(3, a, f(tau13)) . t13`` where the
  transpositions are H3 letters and the middle letter is in H1T.

Inverse letters go to inverse words.  :func:`psi` concatenates and reduces.

Proof chains are sequences of local rewrites of amalgam words, each tagged
with the identity that licenses it.  :func:`replay` re-checks every step
independently of how the chain was built.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .amalgam import (
    AmalgamLetter,
    AmalgamWord,
    FactorId,
    Verdict,
    amalgam_equal,
    h1t_letter,
    member,
    membership_H1T,
    phi_map,
    reduce,
)
from .automorphism import PolyMap, compose, sigma, tau
from .poly import Polynomial
from .words import (
    RelationInstance,
    SigmaLetter,
    SigmaWord,
    evaluate,
    make_relation,
    random_poly,
    random_scalar,
    tau_word,
)

_X = Polynomial.variables(3)


def _perm(p: Polynomial, k: int, l: int) -> Polynomial:
    """``p(tau_{k,l})``: exchange ``Xk`` and ``Xl``."""
    images = list(_X)
    images[k - 1], images[l - 1] = images[l - 1], images[k - 1]
    return p.substitute(images)


def t_letter(k: int, l: int) -> AmalgamLetter:
    return AmalgamLetter(FactorId.H3, tau(k, l))


def s_letter(i: int, alpha, f: Polynomial, exponent: int = 1) -> AmalgamLetter:
    """Elementary letter for slot 2 or 3 (H1T) or an affine slot-1 letter (H3)."""
    if i == 1:
        if f.total_degree() > 1:
            raise ValueError("slot-1 letters are single letters only for affine f")
        l = AmalgamLetter(FactorId.H3, sigma(1, alpha, f))
    else:
        l = h1t_letter(i, alpha, f)
    return l if exponent == 1 else l.inverse()


# ---------------------------------------------------------------------------
# the map

def psi_letter(l: SigmaLetter, general_form: bool = False) -> AmalgamWord:
    """Image of one letter.  ``general_form`` forces the three-letter shape for slot 1."""
    if l.n != 3:
        raise ValueError("the rewriting map is defined in three variables")
    base = l.base()
    if base.i in (2, 3):
        img = AmalgamWord((h1t_letter(base.i, base.alpha, base.f),))
    elif base.f.total_degree() <= 1 and not general_form:
        img = AmalgamWord((AmalgamLetter(FactorId.H3, base.to_map()),))
    else:
        t13 = t_letter(1, 3)
        img = AmalgamWord((t13, h1t_letter(3, base.alpha, _perm(base.f, 1, 3)), t13))
    return img if l.exponent == 1 else img.inverse()


def psi_unreduced(w: SigmaWord, general_form: bool = False) -> AmalgamWord:
    out: list[AmalgamLetter] = []
    for l in w:
        out.extend(psi_letter(l, general_form).letters)
    return AmalgamWord(tuple(out))


def psi(w: SigmaWord) -> AmalgamWord:
    return reduce(psi_unreduced(w))


def _tau_at(w: SigmaWord, pos: int):
    """``(k, l)`` when ``w[pos:pos+3]`` spells ``tau_word(k, l)``."""
    if pos + 3 > len(w):
        return None
    chunk = w.letters[pos:pos + 3]
    k = chunk[1].i
    l = chunk[0].i
    if k == l:
        return None
    if chunk == tau_word(k, l).letters:
        return k, l
    return None


def psi_t(w: SigmaWord, general_form: bool = True) -> AmalgamWord:
    """Like :func:`psi_unreduced`, but each ``tau_word`` block becomes one H3 letter.

    This is the form in which relation sides appear at the ends of proof chains.
    """
    out: list[AmalgamLetter] = []
    pos = 0
    while pos < len(w):
        kl = _tau_at(w, pos)
        if kl is not None:
            out.append(t_letter(*kl))
            pos += 3
            continue
        out.extend(psi_letter(w[pos], general_form).letters)
        pos += 1
    return AmalgamWord(tuple(out))


def verify_relation_respect(r: RelationInstance) -> bool:
    return amalgam_equal(psi(r.lhs), psi(r.rhs))


# ---------------------------------------------------------------------------
# justifications and chains

class Rule(enum.Enum):
    IN_FACTOR = "InFactor"
    PERM_REL = "PermRel"
    SPECIAL12 = "Special12"
    TAU_INVOLUTION = "TauInvolution"
    R1_IN_FACTOR = "R1InFactor"
    R2_IN_FACTOR = "R2InFactor"
    PSI_ASSIGN = "PsiAssign"


@dataclass(frozen=True)
class Justification:
    rule: Rule
    factor: FactorId | None = None
    description: str = ""
    letter: SigmaLetter | None = None  # only for PSI_ASSIGN

    def __str__(self) -> str:
        s = self.rule.value
        if self.factor is not None:
            s += f"({self.factor})"
        if self.description:
            s += f" {self.description}"
        return s


def InFactor(factor: FactorId, description: str = "") -> Justification:
    return Justification(Rule.IN_FACTOR, factor, description)


PermRel = Justification(Rule.PERM_REL)
Special12 = Justification(Rule.SPECIAL12)
TauInvolution = Justification(Rule.TAU_INVOLUTION)


def R1InFactor(factor: FactorId = FactorId.H1T) -> Justification:
    return Justification(Rule.R1_IN_FACTOR, factor)


def R2InFactor(factor: FactorId = FactorId.H1T) -> Justification:
    return Justification(Rule.R2_IN_FACTOR, factor)


def PsiAssign(l: SigmaLetter) -> Justification:
    return Justification(Rule.PSI_ASSIGN, letter=l)


@dataclass(frozen=True)
class ProofStep:
    """``before[span]`` is replaced, giving ``after``."""

    before: AmalgamWord
    after: AmalgamWord
    span: tuple
    justification: Justification

    @property
    def replaced(self) -> tuple:
        return self.before.letters[self.span[0]:self.span[1]]

    @property
    def inserted(self) -> tuple:
        start, stop = self.span
        new_stop = stop + len(self.after) - len(self.before)
        return self.after.letters[start:new_stop]


@dataclass(frozen=True)
class ProofChain:
    label: str
    lhs: SigmaWord
    rhs: SigmaWord
    opening: AmalgamWord
    steps: tuple = ()

    @property
    def closing(self) -> AmalgamWord:
        return self.steps[-1].after if self.steps else self.opening


class ChainError(ValueError):
    pass


class _Builder:
    def __init__(self, label: str, r: RelationInstance):
        self.label = label
        self.r = r
        self.opening = psi_t(r.lhs)
        self.line = self.opening
        self.steps: list[ProofStep] = []

    def rewrite(self, at: int, old: Sequence[AmalgamLetter], new: Sequence[AmalgamLetter],
                just: Justification):
        cur = self.line.letters
        stop = at + len(old)
        if any(a.element != b.element for a, b in zip(cur[at:stop], old)) or stop > len(cur):
            raise ChainError(f"{self.label}: step {len(self.steps)} does not match the line")
        nxt = AmalgamWord(cur[:at] + tuple(new) + cur[stop:])
        self.steps.append(ProofStep(self.line, nxt, (at, stop), just))
        self.line = nxt

    def done(self) -> ProofChain:
        return ProofChain(self.label, self.r.lhs, self.r.rhs, self.opening, tuple(self.steps))


# ---------------------------------------------------------------------------
# chain templates

@dataclass(frozen=True)
class ChainTemplate:
    """A chain valid for all admissible parameters.

    ``f_vars`` and ``g_vars`` name the variables the parameter polynomials
    may use; ``g_vars`` is empty for families without ``g``.
    """

    label: str
    kind: str
    case: tuple
    f_vars: tuple
    g_vars: tuple
    builder: Callable = field(compare=False, repr=False)
    nontrivial: bool = True

    def sample(self, rng: random.Random, max_degree: int = 3, coeff_bound: int = 5) -> dict:
        p = {"alpha": random_scalar(rng, coeff_bound),
             "f": random_poly(rng, 3, self.f_vars, max_degree, coeff_bound, nonzero=True)}
        if self.kind != "R3":
            p["beta"] = random_scalar(rng, coeff_bound)
            p["g"] = random_poly(rng, 3, self.g_vars, max_degree, coeff_bound, nonzero=True)
        return p

    def relation(self, params: dict) -> RelationInstance:
        if self.kind == "R1":
            return make_relation("R1", i=self.case[0], **params)
        if self.kind == "R2":
            return make_relation("R2", i=self.case[0], j=self.case[1], **params)
        k, l, i = self.case
        return make_relation("R3", k=k, l=l, i=i, **params)

    def build(self, params: dict) -> ProofChain:
        r = self.relation(params)
        b = _Builder(self.label, r)
        self.builder(b, params)
        return b.done()


def _s_inv(i, alpha, f):
    return s_letter(i, alpha, f, -1)


def _chain_r1_slot1(b: _Builder, p):
    a, be, f, g = p["alpha"], p["beta"], p["f"], p["g"]
    t13 = t_letter(1, 3)
    f13, g13 = _perm(f, 1, 3), _perm(g, 1, 3)
    b.rewrite(2, [t13, t13], [], TauInvolution)
    b.rewrite(1, [s_letter(3, a, f13), s_letter(3, be, g13)],
              [s_letter(3, a * be, f13 + g13 * a)], R1InFactor(FactorId.H1T))
    b.rewrite(0, b.line.letters, b.line.letters, PsiAssign(SigmaLetter(1, a * be, f + g * a)))


def _chain_r1_in_factor(i):
    def build(b: _Builder, p):
        a, be, f, g = p["alpha"], p["beta"], p["f"], p["g"]
        b.rewrite(0, [s_letter(i, a, f), s_letter(i, be, g)],
                  [s_letter(i, a * be, f + g * a)], R1InFactor(FactorId.H1T))
    return build


def _chain_r2_in_factor(i, j):
    def build(b: _Builder, p):
        a, be, f, g = p["alpha"], p["beta"], p["f"], p["g"]
        s = s_letter(i, a, f)
        new_g = g.substitute(s.element.components)
        b.rewrite(0, [s.inverse(), s_letter(j, be, g), s], [s_letter(j, be, new_g)],
                  R2InFactor(FactorId.H1T))
    return build


def _expand_t13(b: _Builder):
    """Replace every ``t13`` of the line by ``t12 t23 t12``, right to left."""
    t13, t12, t23 = t_letter(1, 3), t_letter(1, 2), t_letter(2, 3)
    for pos in reversed(range(len(b.line))):
        if b.line[pos].element == t13.element:
            b.rewrite(pos, [t13], [t12, t23, t12], PermRel)


def _chain_r2_13(b: _Builder, p):
    # f in K[X2], g in K[X1, X2]
    a, be, f, g = p["alpha"], p["beta"], p["f"], p["g"]
    x1, x2, x3 = _X
    t12, t23 = t_letter(1, 2), t_letter(2, 3)
    _expand_t13(b)
    f1 = _perm(f, 1, 2)
    g21 = _perm(g, 1, 2)
    b.rewrite(2, [t12, _s_inv(3, a, f), t12], [_s_inv(3, a, f1)], InFactor(FactorId.H2, "t12 s3^-1 t12"))
    b.rewrite(8, [t12, s_letter(3, a, f), t12], [s_letter(3, a, f1)], InFactor(FactorId.H2, "t12 s3 t12"))
    b.rewrite(4, [t12, s_letter(3, be, g), t12], [s_letter(3, be, g21)], InFactor(FactorId.H2, "t12 s3 t12"))
    g31 = _perm(g21, 2, 3)
    b.rewrite(3, [t23, s_letter(3, be, g21), t23], [s_letter(2, be, g31)],
              InFactor(FactorId.H1T, "t23 s3 t23 = s2"))
    h = g31.substitute([x1, x2, x3 * a + f1])
    b.rewrite(2, [_s_inv(3, a, f1), s_letter(2, be, g31), s_letter(3, a, f1)], [s_letter(2, be, h)],
              R2InFactor(FactorId.H1T))
    k = _perm(h, 2, 3)
    b.rewrite(1, [t23, s_letter(2, be, h), t23], [s_letter(3, be, k)], InFactor(FactorId.H1T, "t23 s2 t23 = s3"))
    b.rewrite(0, [t12, s_letter(3, be, k), t12], [s_letter(3, be, _perm(k, 1, 2))],
              InFactor(FactorId.H2, "t12 s3 t12"))


def _chain_r2_31(b: _Builder, p):
    # f in K[X2], g in K[X2, X3]
    a, be, f, g = p["alpha"], p["beta"], p["f"], p["g"]
    x1, x2, x3 = _X
    t13, t12, t23 = t_letter(1, 3), t_letter(1, 2), t_letter(2, 3)
    b.rewrite(len(b.line), [], [t13, t13], TauInvolution)
    b.rewrite(0, [], [t13, t13], TauInvolution)
    # expand only the inner four t13
    for pos in (7, 5, 3, 1):
        b.rewrite(pos, [t13], [t12, t23, t12], PermRel)
    f1 = _perm(f, 1, 2)
    b.rewrite(3, [t12, _s_inv(3, a, f), t12], [_s_inv(3, a, f1)], InFactor(FactorId.H2, "t12 s3^-1 t12"))
    b.rewrite(9, [t12, s_letter(3, a, f), t12], [s_letter(3, a, f1)], InFactor(FactorId.H2, "t12 s3 t12"))
    b.rewrite(2, [t23, _s_inv(3, a, f1), t23], [_s_inv(2, a, f1)], InFactor(FactorId.H1T, "t23 s3^-1 t23"))
    b.rewrite(6, [t23, s_letter(3, a, f1), t23], [s_letter(2, a, f1)], InFactor(FactorId.H1T, "t23 s3 t23"))
    g_sw = _perm(g, 1, 3)  # g(X2, X1)
    g12 = _perm(g_sw, 1, 2)
    b.rewrite(3, [t12, s_letter(3, be, g_sw), t12], [s_letter(3, be, g12)], InFactor(FactorId.H2, "t12 s3 t12"))
    m = g12.substitute([x1, x2 * a + f1, x3])
    b.rewrite(2, [_s_inv(2, a, f1), s_letter(3, be, g12), s_letter(2, a, f1)], [s_letter(3, be, m)],
              R2InFactor(FactorId.H1T))
    b.rewrite(1, [t12, s_letter(3, be, m), t12], [s_letter(3, be, _perm(m, 1, 2))],
              InFactor(FactorId.H2, "t12 s3 t12"))
    b.rewrite(0, b.line.letters, b.line.letters, PsiAssign(b.r.rhs[0]))


def _chain_r2_12(b: _Builder, p):
    # f in K[X3], g in K[X1, X3]
    a, be, f, g = p["alpha"], p["beta"], p["f"], p["g"]
    x1, x2, x3 = _X
    t13 = t_letter(1, 3)
    f1 = _perm(f, 1, 3)
    g13 = _perm(g, 1, 3)
    b.rewrite(2, [t13, s_letter(2, be, g), t13], [s_letter(2, be, g13)], Special12)
    h = g13.substitute([x1, x2, x3 * a + f1])
    b.rewrite(1, [_s_inv(3, a, f1), s_letter(2, be, g13), s_letter(3, a, f1)], [s_letter(2, be, h)],
              R2InFactor(FactorId.H1T))
    b.rewrite(0, [t13, s_letter(2, be, h), t13], [s_letter(2, be, _perm(h, 1, 3))], Special12)


def _chain_r2_21(b: _Builder, p):
    # f in K[X3], g in K[X2, X3]
    a, be, f, g = p["alpha"], p["beta"], p["f"], p["g"]
    x1, x2, x3 = _X
    t13 = t_letter(1, 3)
    b.rewrite(len(b.line), [], [t13, t13], TauInvolution)
    b.rewrite(0, [], [t13, t13], TauInvolution)
    f1 = _perm(f, 1, 3)
    b.rewrite(1, [t13, _s_inv(2, a, f), t13], [_s_inv(2, a, f1)], Special12)
    b.rewrite(3, [t13, s_letter(2, a, f), t13], [s_letter(2, a, f1)], Special12)
    g_sw = _perm(g, 1, 3)
    m = g_sw.substitute([x1, x2 * a + f1, x3])
    b.rewrite(1, [_s_inv(2, a, f1), s_letter(3, be, g_sw), s_letter(2, a, f1)], [s_letter(3, be, m)],
              R2InFactor(FactorId.H1T))
    b.rewrite(0, b.line.letters, b.line.letters, PsiAssign(b.r.rhs[0]))


def _chain_r3_in_factor(factor, k, l, i):
    def build(b: _Builder, p):
        a, f = p["alpha"], p["f"]
        t = t_letter(k, l)
        j = l if i == k else k if i == l else i
        b.rewrite(0, [t, s_letter(i, a, f), t], [s_letter(j, a, _perm(f, k, l))],
                  InFactor(factor, f"t{k}{l} s{i} t{k}{l}"))
    return build


def _chain_r3_3_13(b: _Builder, p):
    b.rewrite(0, b.line.letters, b.line.letters, PsiAssign(b.r.rhs[0]))


def _chain_r3_2_12(b: _Builder, p):
    # f in K[X1, X3]
    a, f = p["alpha"], p["f"]
    t13, t12, t23 = t_letter(1, 3), t_letter(1, 2), t_letter(2, 3)
    f23 = _perm(f, 2, 3)
    b.rewrite(1, [s_letter(2, a, f)], [t23, s_letter(3, a, f23), t23], InFactor(FactorId.H1T, "s2 = t23 s3 t23"))
    b.rewrite(0, [t12, t23], [t13, t12], PermRel)
    b.rewrite(3, [t23, t12], [t12, t13], PermRel)
    b.rewrite(1, [t12, s_letter(3, a, f23), t12], [s_letter(3, a, _perm(f23, 1, 2))],
              InFactor(FactorId.H2, "t12 s3 t12"))
    b.rewrite(0, b.line.letters, b.line.letters, PsiAssign(b.r.rhs[0]))


def _chain_r3_2_13(b: _Builder, p):
    a, f = p["alpha"], p["f"]
    t13 = t_letter(1, 3)
    b.rewrite(0, [t13, s_letter(2, a, f), t13], [s_letter(2, a, _perm(f, 1, 3))], Special12)


def _chain_r3_1_23(b: _Builder, p):
    # f in K[X2, X3]
    a, f = p["alpha"], p["f"]
    t13, t12, t23 = t_letter(1, 3), t_letter(1, 2), t_letter(2, 3)
    f13 = _perm(f, 1, 3)
    b.rewrite(0, [t23, t13], [t13, t12], PermRel)
    b.rewrite(3, [t13, t23], [t12, t13], PermRel)
    b.rewrite(1, [t12, s_letter(3, a, f13), t12], [s_letter(3, a, _perm(f13, 1, 2))],
              InFactor(FactorId.H2, "t12 s3 t12"))
    b.rewrite(0, b.line.letters, b.line.letters, PsiAssign(b.r.rhs[0]))


def _chain_r3_1_13(b: _Builder, p):
    t13 = t_letter(1, 3)
    b.rewrite(0, [t13, t13], [], TauInvolution)
    b.rewrite(1, [t13, t13], [], TauInvolution)


def _chain_r3_1_12(b: _Builder, p):
    # f in K[X2, X3]
    a, f = p["alpha"], p["f"]
    t13, t12, t23 = t_letter(1, 3), t_letter(1, 2), t_letter(2, 3)
    f13 = _perm(f, 1, 3)
    b.rewrite(0, [t12, t13], [t13, t23], PermRel)
    b.rewrite(3, [t13, t12], [t23, t13], PermRel)
    h = _perm(f13, 2, 3)
    b.rewrite(1, [t23, s_letter(3, a, f13), t23], [s_letter(2, a, h)], InFactor(FactorId.H1T, "t23 s3 t23 = s2"))
    b.rewrite(0, [t13, s_letter(2, a, h), t13], [s_letter(2, a, _perm(h, 1, 3))], Special12)


def builtin_proof_chains() -> list[ChainTemplate]:
    """Every rewriting chain, as a template over its admissible parameters."""
    H1T, H2 = FactorId.H1T, FactorId.H2
    C = ChainTemplate
    return [
        C("R1 case i=1", "R1", (1,), (2, 3), (2, 3), _chain_r1_slot1),
        C("R1 case i=2", "R1", (2,), (1, 3), (1, 3), _chain_r1_in_factor(2), False),
        C("R1 case i=3", "R1", (3,), (1, 2), (1, 2), _chain_r1_in_factor(3), False),
        C("R2 case i=2 j=3", "R2", (2, 3), (1,), (1, 2), _chain_r2_in_factor(2, 3), False),
        C("R2 case i=3 j=2", "R2", (3, 2), (1,), (1, 3), _chain_r2_in_factor(3, 2), False),
        C("R2 case i=1 j=3", "R2", (1, 3), (2,), (1, 2), _chain_r2_13),
        C("R2 case i=3 j=1", "R2", (3, 1), (2,), (2, 3), _chain_r2_31),
        C("R2 case i=1 j=2", "R2", (1, 2), (3,), (1, 3), _chain_r2_12),
        C("R2 case i=2 j=1", "R2", (2, 1), (3,), (2, 3), _chain_r2_21),
        C("R3 case i=2 {k,l}={2,3}", "R3", (2, 3, 2), (1, 3), (), _chain_r3_in_factor(H1T, 2, 3, 2), False),
        C("R3 case i=3 {k,l}={2,3}", "R3", (2, 3, 3), (1, 2), (), _chain_r3_in_factor(H1T, 2, 3, 3), False),
        C("R3 case i=3 {k,l}={1,2}", "R3", (1, 2, 3), (1, 2), (), _chain_r3_in_factor(H2, 1, 2, 3), False),
        C("R3 case i=3 {k,l}={1,3}", "R3", (1, 3, 3), (1, 2), (), _chain_r3_3_13),
        C("R3 case i=2 {k,l}={1,2}", "R3", (1, 2, 2), (1, 3), (), _chain_r3_2_12),
        C("R3 case i=2 {k,l}={1,3}", "R3", (1, 3, 2), (1, 3), (), _chain_r3_2_13),
        C("R3 case i=1 {k,l}={2,3}", "R3", (2, 3, 1), (2, 3), (), _chain_r3_1_23),
        C("R3 case i=1 {k,l}={1,3}", "R3", (1, 3, 1), (2, 3), (), _chain_r3_1_13),
        C("R3 case i=1 {k,l}={1,2}", "R3", (1, 2, 1), (2, 3), (), _chain_r3_1_12),
    ]


# ---------------------------------------------------------------------------
# replay

@dataclass(frozen=True)
class Verified:
    steps: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class FailedStep:
    index: int
    reason: str

    def __bool__(self) -> bool:
        return False


def _same_line(u: Sequence[AmalgamLetter], v: Sequence[AmalgamLetter]) -> bool:
    return len(u) == len(v) and all(a.element == b.element for a, b in zip(u, v))


def _letter_valid(l: AmalgamLetter) -> bool:
    if l.factor is FactorId.H1T:
        return l.certificate is not None and l.certificate.replay() == l.element
    return member(l.element, l.factor)


def _in_factor(l: AmalgamLetter, factor: FactorId) -> bool:
    if factor is FactorId.H1T:
        if l.factor is FactorId.H1T and l.certificate is not None:
            if l.certificate.replay() == l.element:
                return True
        return membership_H1T(l.element).verdict is Verdict.YES
    return member(l.element, factor)


def decode_elementary(phi: PolyMap):
    """``(i, alpha, f)`` when ``phi == sigma(i, alpha, f)`` moves exactly one slot."""
    moved = [i for i, c in enumerate(phi.components) if c != _X[i]]
    if len(moved) != 1:
        return None
    i = moved[0] + 1
    comp = phi.components[i - 1]
    e = tuple(int(v == i - 1) for v in range(3))
    alpha = comp.coefficient(e)
    rest = comp - _X[i - 1] * alpha
    if alpha == 0 or rest.uses_variable(i):
        return None
    return i, alpha, rest


def _is_swap(l: AmalgamLetter):
    for k, m in ((1, 2), (1, 3), (2, 3)):
        if l.element == tau(k, m):
            return (k, m)
    return None


def _product(letters) -> PolyMap:
    return phi_map(list(letters))


def _check_step(step: ProofStep) -> str | None:
    j = step.justification
    old, new = step.replaced, step.inserted
    rule = j.rule
    for l in old + new:
        if not _letter_valid(l):
            return f"letter {l} is not in its tagged factor {l.factor}"
    if rule in (Rule.IN_FACTOR, Rule.R1_IN_FACTOR, Rule.R2_IN_FACTOR):
        if j.factor is None:
            return "factor justification without a factor"
        for l in old + new:
            if not _in_factor(l, j.factor):
                return f"letter {l.element} is not in {j.factor}"
    if rule is Rule.IN_FACTOR:
        if not old and not new:
            return "empty rewrite"
        if _product(old) != _product(new):
            return "local identity fails"
        return None
    if rule is Rule.PERM_REL:
        if not all(_is_swap(l) for l in old + new) or not old or not new:
            return "permutation relation spans must consist of transpositions"
        if _product(old) != _product(new):
            return "transposition products differ"
        return None
    if rule is Rule.TAU_INVOLUTION:
        pair = old or new
        if (old and new) or len(pair) != 2 or not _is_swap(pair[0]) or pair[0].element != pair[1].element:
            return "involution step must insert or delete a pair t t"
        return None
    if rule is Rule.SPECIAL12:
        if len(old) == 3 and len(new) == 1:
            triple, single = old, new[0]
        elif len(old) == 1 and len(new) == 3:
            triple, single = new, old[0]
        else:
            return "special identity needs the shape t13 s2 t13 = s2"
        if _is_swap(triple[0]) != (1, 3) or _is_swap(triple[2]) != (1, 3):
            return "special identity is conjugation by t13"
        mid, out = decode_elementary(triple[1].element), decode_elementary(single.element)
        if mid is None or out is None or mid[0] != 2 or out[0] != 2:
            return "special identity needs slot-2 elementary letters"
        if mid[1] != out[1] or _perm(mid[2], 1, 3) != out[2]:
            return "special identity parameters do not match"
        return None
    if rule is Rule.R1_IN_FACTOR:
        if len(old) != 2 or len(new) != 1:
            return "R1 rewrite needs two letters into one"
        a, b, c = (decode_elementary(l.element) for l in (old[0], old[1], new[0]))
        if None in (a, b, c) or not (a[0] == b[0] == c[0]):
            return "R1 rewrite needs elementary letters in one slot"
        if c[1] != a[1] * b[1] or c[2] != a[2] + b[2] * a[1]:
            return "R1 template does not match"
        return None
    if rule is Rule.R2_IN_FACTOR:
        if len(old) != 3 or len(new) != 1:
            return "R2 rewrite needs three letters into one"
        fwd = decode_elementary(old[2].element)
        mid = decode_elementary(old[1].element)
        out = decode_elementary(new[0].element)
        if None in (fwd, mid, out):
            return "R2 rewrite needs elementary letters"
        if compose(old[0].element, old[2].element) != PolyMap.identity(3):
            return "R2 rewrite needs a conjugation"
        i, _, f = fwd
        jj, beta, g = mid
        if i == jj or f.uses_variable(i) or f.uses_variable(jj) or g.uses_variable(jj):
            return "R2 side conditions fail"
        if out[0] != jj or out[1] != beta or out[2] != g.substitute(old[2].element.components):
            return "R2 template does not match"
        return None
    if rule is Rule.PSI_ASSIGN:
        if j.letter is None:
            return "assignment step without a letter"
        if not (_same_line(old, new) and _same_line(new, psi_letter(j.letter, True).letters)):
            return "span is not the image of the cited letter"
        return None
    return f"unknown rule {rule}"


def replay(chain: ProofChain | ChainTemplate, params: dict | None = None) -> Verified | FailedStep:
    """Re-check a chain line by line.  Templates are instantiated with ``params``."""
    if isinstance(chain, ChainTemplate):
        try:
            chain = chain.build(params)
        except (ChainError, ValueError) as exc:
            return FailedStep(0, f"chain does not instantiate: {exc}")
    if not _same_line(chain.opening.letters, psi_t(chain.lhs).letters):
        return FailedStep(0, "opening line is not the image of the left-hand side")
    prev_line = chain.opening
    prev_phi = phi_map(prev_line)
    for idx, step in enumerate(chain.steps):
        if not _same_line(step.before.letters, prev_line.letters):
            return FailedStep(idx, "step does not start from the previous line")
        start, stop = step.span
        if not (0 <= start <= stop <= len(step.before)):
            return FailedStep(idx, "span out of range")
        tail = len(step.before) - stop
        if (not _same_line(step.before.letters[:start], step.after.letters[:start])
                or not _same_line(step.before.letters[stop:],
                                  step.after.letters[len(step.after) - tail:])
                or len(step.after) - tail < start):
            return FailedStep(idx, "letters outside the span changed")
        reason = _check_step(step)
        if reason is not None:
            return FailedStep(idx, reason)
        phi = phi_map(step.after)
        if phi != prev_phi:
            return FailedStep(idx, "line images differ")
        prev_line, prev_phi = step.after, phi
    target = psi_t(chain.rhs)
    if not _same_line(prev_line.letters, target.letters):
        if not _same_line(reduce(prev_line).letters, reduce(target).letters):
            return FailedStep(max(len(chain.steps) - 1, 0),
                              "closing line is not the image of the right-hand side")
    return Verified(len(chain.steps))


def corrupt(chain: ProofChain, index: int | None = None) -> ProofChain:
    """Negative control: retag a factor justification with a factor its letters are not in."""
    steps = list(chain.steps)
    for idx, s in enumerate(steps):
        if index is not None and idx != index:
            continue
        if s.justification.factor is None:
            continue
        for wrong in (FactorId.H3, FactorId.H2, FactorId.H1T):
            if wrong is s.justification.factor:
                continue
            j = Justification(s.justification.rule, wrong, s.justification.description)
            bad = ProofStep(s.before, s.after, s.span, j)
            if _check_step(bad) is not None:
                steps[idx] = bad
                return ProofChain(chain.label, chain.lhs, chain.rhs, chain.opening, tuple(steps))
    raise ValueError("chain has no factor-tagged step that a retag would break")


@dataclass(frozen=True)
class ReplayRecord:
    label: str
    seed: int
    steps: int
    result: Verified | FailedStep


def replay_all(seed: int, samples: int, max_degree: int = 3, coeff_bound: int = 5) -> list[ReplayRecord]:
    """Replay every built-in chain on ``samples`` parameter sets each."""
    records = []
    for c_idx, tmpl in enumerate(builtin_proof_chains()):
        for s in range(samples):
            sub_seed = seed * 1_000_003 + c_idx * 10_007 + s
            params = tmpl.sample(random.Random(sub_seed), max_degree, coeff_bound)
            chain = tmpl.build(params)
            records.append(ReplayRecord(tmpl.label, sub_seed, len(chain.steps), replay(chain)))
    return records
