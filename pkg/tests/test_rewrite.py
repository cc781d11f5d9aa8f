import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tame3.amalgam import AmalgamWord, FactorId, amalgam_equal, phi_map, reduce
from tame3.automorphism import PolyMap, sigma, swap
from tame3.poly import Polynomial
from tame3.rewrite import (
    ChainTemplate,
    FailedStep,
    ProofChain,
    ProofStep,
    Rule,
    Verified,
    builtin_proof_chains,
    corrupt,
    psi,
    psi_letter,
    psi_t,
    replay,
    replay_all,
    t_letter,
    verify_relation_respect,
)
from tame3.words import (
    SigmaLetter,
    SigmaWord,
    evaluate,
    make_relation,
    random_relation,
    random_word,
    relation_cases,
    tau_word,
)

X1, X2, X3 = Polynomial.variables(3)
H1T, H2, H3 = FactorId.H1T, FactorId.H2, FactorId.H3


def chain(label) -> ChainTemplate:
    return next(c for c in builtin_proof_chains() if c.label == label)


# --- psi_letter / psi ---------------------------------------------------------------------

def test_slot2_letter_is_one_h1t_letter():
    img = psi_letter(SigmaLetter(2, 1, X1 * X3))
    assert [l.factor for l in img] == [H1T]
    assert img[0].certificate.replay() == sigma(2, 1, X1 * X3)


def test_affine_slot1_letter_is_one_h3_letter():
    img = psi_letter(SigmaLetter(1, 1, 3 * X2 - X3 + 2))
    assert [l.factor for l in img] == [H3]


def test_general_slot1_letter_is_three_letters():
    img = psi_letter(SigmaLetter(1, 1, X2 * X3))
    assert [l.factor for l in img] == [H3, H1T, H3]
    assert img[0].element == swap(1, 3) == img[2].element
    assert img[1].element == sigma(3, 1, X2 * X1)
    assert phi_map(img) == sigma(1, 1, X2 * X3)


def test_inverse_letter_image_is_inverse_word():
    l = SigmaLetter(1, 2, X2 ** 2 * X3)
    img, inv = psi_letter(l), psi_letter(l.inverse())
    assert [a.element for a in inv] == [a.inverse().element for a in reversed(img.letters)]
    assert len(reduce(img * inv)) == 0


def test_psi_empty():
    assert len(psi(SigmaWord())) == 0


def test_psi_tau_word():
    assert phi_map(psi(tau_word(1, 3))) == PolyMap.parse("(X3; X2; X1)")


def test_psi_random_word():
    w = random_word(20, 20, 5, 9)
    assert phi_map(psi(w)) == evaluate(w)


def test_psi_t_collapses_tau_blocks():
    w = tau_word(1, 2) * SigmaWord((SigmaLetter(3, 1, X1),)) * tau_word(1, 2)
    out = psi_t(w)
    assert len(out) == 3
    assert out[0].element == swap(1, 2) == out[2].element


@pytest.mark.parametrize("kind", ["R1", "R2", "R3"])
def test_relation_respect_every_case(kind):
    for n, case in enumerate(relation_cases(kind)):
        for s in range(3):
            assert verify_relation_respect(random_relation(f"{kind}-{n}-{s}", kind, 4, 9, case=case))


def test_slot1_affine_coherence():
    rng = random.Random(0)
    for _ in range(20):
        f = X2 * rng.randint(-5, 5) + X3 * rng.randint(-5, 5) + rng.randint(-5, 5)
        l = SigmaLetter(1, rng.choice([1, -2, 3]), f)
        general = reduce(psi_letter(l, general_form=True))
        single = psi_letter(l)
        assert len(general) == 1 and general[0].factor is H3
        assert general[0].element == single[0].element


# --- chains ---------------------------------------------------------------------------------

def test_chain_inventory():
    chains = builtin_proof_chains()
    labels = [c.label for c in chains]
    assert len(set(labels)) == len(labels)
    r2 = [c for c in chains if c.kind == "R2"]
    assert sum(c.nontrivial for c in r2) == 4
    assert {c.case for c in r2} == set(relation_cases("R2"))
    r3_sets = {(frozenset(c.case[:2]), c.case[2]) for c in chains if c.kind == "R3"}
    assert len(r3_sets) == 9


def test_r1_slot1_uses_one_involution():
    tmpl = chain("R1 case i=1")
    built = tmpl.build(tmpl.sample(random.Random(0)))
    rules = [s.justification.rule for s in built.steps]
    assert rules.count(Rule.TAU_INVOLUTION) == 1


def test_r3_i3_13_single_assignment_step():
    tmpl = chain("R3 case i=3 {k,l}={1,3}")
    built = tmpl.build(tmpl.sample(random.Random(0)))
    assert [s.justification.rule for s in built.steps] == [Rule.PSI_ASSIGN]


def test_r2_13_example_instance():
    tmpl = chain("R2 case i=1 j=3")
    params = {"alpha": 2, "f": X2 ** 2, "beta": 1, "g": X1 * X2}
    assert isinstance(replay(tmpl, params), Verified)


def test_r3_i1_13_two_involution_steps():
    tmpl = chain("R3 case i=1 {k,l}={1,3}")
    result = replay(tmpl, {"alpha": 1, "f": X2 * X3})
    assert result == Verified(2)


def test_r2_31_anchor_uses_involution():
    tmpl = chain("R2 case i=3 j=1")
    built = tmpl.build(tmpl.sample(random.Random(3)))
    assert Rule.TAU_INVOLUTION in [s.justification.rule for s in built.steps]


def test_r2_12_uses_special_identity():
    tmpl = chain("R2 case i=1 j=2")
    built = tmpl.build(tmpl.sample(random.Random(3)))
    assert [s.justification.rule for s in built.steps].count(Rule.SPECIAL12) == 2


def test_r3_i1_23_uses_permutation_relation():
    tmpl = chain("R3 case i=1 {k,l}={2,3}")
    built = tmpl.build(tmpl.sample(random.Random(3)))
    assert Rule.PERM_REL in [s.justification.rule for s in built.steps]


def test_every_chain_replays():
    for rec in replay_all(seed=5, samples=3):
        assert rec.result, (rec.label, rec.result)


def test_every_chain_starts_and_ends_at_the_images():
    for tmpl in builtin_proof_chains():
        built = tmpl.build(tmpl.sample(random.Random(1)))
        assert [l.element for l in built.opening] == [l.element for l in psi_t(built.lhs)]
        assert [l.element for l in built.closing] == [l.element for l in psi_t(built.rhs)]


# --- negative controls ----------------------------------------------------------------------

def test_corrupted_factor_tag_fails():
    for tmpl in builtin_proof_chains():
        built = tmpl.build(tmpl.sample(random.Random(2)))
        if not any(s.justification.factor for s in built.steps):
            continue
        result = replay(corrupt(built))
        assert isinstance(result, FailedStep)


def test_tampered_line_fails():
    tmpl = chain("R2 case i=1 j=3")
    built = tmpl.build(tmpl.sample(random.Random(4)))
    s = built.steps[4]
    start = s.span[0]
    bogus = AmalgamWord(s.after.letters[:start] + (t_letter(1, 2),) + s.after.letters[start + 1:])
    steps = list(built.steps)
    steps[4] = ProofStep(s.before, bogus, s.span, s.justification)
    result = replay(ProofChain(built.label, built.lhs, built.rhs, built.opening, tuple(steps)))
    assert isinstance(result, FailedStep) and result.index == 4


def test_wrong_opening_fails():
    tmpl = chain("R1 case i=2")
    built = tmpl.build(tmpl.sample(random.Random(4)))
    other = ProofChain(built.label, built.rhs, built.rhs, built.opening, built.steps)
    assert isinstance(replay(other), FailedStep)


def test_outside_span_change_fails():
    tmpl = chain("R3 case i=1 {k,l}={1,2}")
    built = tmpl.build(tmpl.sample(random.Random(4)))
    s = built.steps[0]
    shifted = ProofStep(s.before, s.after, (s.span[0] + 1, s.span[1] + 1), s.justification)
    steps = (shifted,) + built.steps[1:]
    result = replay(ProofChain(built.label, built.lhs, built.rhs, built.opening, steps))
    assert isinstance(result, FailedStep) and result.index == 0


# --- properties ------------------------------------------------------------------------------

seeds = st.integers(0, 10 ** 6)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(0, 12))
def test_phi_after_psi_is_eval(seed, length):
    w = random_word(seed, length, 4, 9)
    assert phi_map(psi(w)) == evaluate(w)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from(["R1", "R2", "R3"]))
def test_respects_relations(seed, kind):
    assert verify_relation_respect(random_relation(seed, kind, 5, 9))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_inverse_images_are_group_inverses(seed):
    w = random_word(seed, 6, 3, 5)
    assert amalgam_equal(psi(w.inverse()), psi(w).inverse())
