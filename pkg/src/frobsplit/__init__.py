"""Frobenius summands of invariant rings of finite groups in positive characteristic."""

from .fields import GF, FieldElement, FieldSpec, perfect_closure
from .polyring import FracPolynomial, PolyRing
from .groups import MatrixGroup, detect_monomial, pseudoreflection_and_smallness
from .frobdecomp import decompose, verify_perm_map
from .modrep import build_V, annihilator, distinct_witnesses, socle_dim
from .fsing import fedder_test, sandwich_check, verify_orbit_identity, verify_presentation

__version__ = "0.1.0"

__all__ = [
    "GF", "FieldElement", "FieldSpec", "perfect_closure",
    "FracPolynomial", "PolyRing",
    "MatrixGroup", "detect_monomial", "pseudoreflection_and_smallness",
    "decompose", "verify_perm_map",
    "build_V", "annihilator", "distinct_witnesses", "socle_dim",
    "fedder_test", "sandwich_check", "verify_orbit_identity", "verify_presentation",
]
