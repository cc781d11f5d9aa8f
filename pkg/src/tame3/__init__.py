"""Exact arithmetic in the tame automorphism group of affine 3-space.

Modules:

* :mod:`tame3.poly` -- sparse rational polynomials.
* :mod:`tame3.automorphism` -- polynomial maps, composition, inversion.
* :mod:`tame3.words` -- elementary words and the relation families R1-R3.
* :mod:`tame3.amalgam` -- the three factor groups and amalgam words.
* :mod:`tame3.rewrite` -- the rewriting map into the amalgam and chain replay.
* :mod:`tame3.jvdk` -- plane factorization into affine and triangular maps.
"""

from .poly import ParseError, Polynomial, PolynomialError, format_poly, parse_poly
from .automorphism import (
    NotInvertible,
    PolyMap,
    apply_to_poly,
    compose,
    invert,
    is_automorphism,
    jacobian_determinant,
    nagata,
    sigma,
    swap,
    tau,
)
from .words import (
    RelationInstance,
    SigmaLetter,
    SigmaWord,
    check_relation,
    evaluate,
    make_relation,
    parse_word,
    random_relation,
    random_word,
    tau_word,
)
from .amalgam import (
    AmalgamLetter,
    AmalgamWord,
    FactorId,
    TamenessCertificate,
    Verdict,
    amalgam_equal,
    in_intersection,
    membership_H1T,
    membership_H2,
    membership_H3,
    phi_map,
    reduce,
)
from .rewrite import builtin_proof_chains, psi, psi_letter, replay, verify_relation_respect
from .jvdk import NotAutomorphism, PlaneLetter, factor_ga2, factor_ta2_ring, recompose

__version__ = "0.1.0"
