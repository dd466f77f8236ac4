"""Invariant-theoretic identity checks, graded subring membership and Fedder's test.

Membership questions are answered by exact linear algebra in a single
graded piece: the candidate products of subring generators of the right
degree are expanded in the ambient ring and the target is solved for in
their span.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources

from . import linalg
from .fields import GF, Field, make_field
from .groups import MatrixGroup
from .parsing import ParseError, _key_value, _lines, parse_field_spec, parse_matrix, parse_polynomial
from .polyring import (FracPolynomial, PolyRing, determinant, moore_determinant,
                       poly_divide_split, product)


class FsingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# graded subrings

def _exponent_vectors(degrees: list, target: Fraction):
    """All ``a`` with ``sum a_i degrees_i = target`` (degrees positive)."""
    if target < 0:
        return
    if not degrees:
        if target == 0:
            yield ()
        return
    d0 = degrees[0]
    k = 0
    while k * d0 <= target:
        for rest in _exponent_vectors(degrees[1:], target - k * d0):
            yield (k,) + rest
        k += 1


@dataclass
class MembershipResult:
    member: bool
    degree: Fraction
    certificate: list = dc_field(default_factory=list)
    verified: bool = False

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "degree": str(self.degree),
            "certificate": [{"coefficient": c, "term": t} for c, t in self.certificate],
            "certificate_reexpands": self.verified,
        }


class GradedSubring:
    """The subring ``k[g_1, ..., g_r]`` of an ambient polynomial ring."""

    def __init__(self, generators, names=None):
        gens = list(generators)
        if not gens:
            raise FsingError("a subring needs generators")
        for g in gens:
            if g.is_zero() or not g.is_homogeneous() or g.level:
                raise FsingError(f"generator {g} is not a nonzero homogeneous polynomial")
        self.ring = gens[0].ring
        self.generators = gens
        self.names = list(names) if names else [f"g{i + 1}" for i in range(len(gens))]
        self.degrees = [g.degree() for g in gens]
        self._powers: dict = {}
        self._products: dict = {}

    def monomials(self, degree) -> list[tuple]:
        return list(_exponent_vectors(self.degrees, Fraction(degree)))

    def _power(self, i: int, k: int) -> FracPolynomial:
        key = (i, k)
        if key not in self._powers:
            self._powers[key] = self.generators[i] ** k
        return self._powers[key]

    def expand(self, exps: tuple) -> FracPolynomial:
        if exps not in self._products:
            out = self.ring.one
            for i, k in enumerate(exps):
                if k:
                    out = out * self._power(i, k)
            self._products[exps] = out
        return self._products[exps]

    def name(self, exps: tuple) -> str:
        parts = [n if k == 1 else f"{n}^{k}" for n, k in zip(self.names, exps) if k]
        return "*".join(parts) if parts else "1"

    def membership(self, f: FracPolynomial, degree=None, multiples_of=None) -> MembershipResult:
        """Decide ``f`` in the subring, or in the ideal of it generated by ``multiples_of``.

        ``multiples_of`` is a list of ``(polynomial, label)`` pairs.
        """
        if f.level:
            raise FsingError("membership is decided for ordinary polynomials")
        field = self.ring.field
        if degree is None:
            degree = f.degree() if f else Fraction(0)
        degree = Fraction(degree)
        if f and (not f.is_homogeneous() or f.degree() != degree):
            raise FsingError(f"target is not homogeneous of degree {degree}")
        candidates = []
        factors = multiples_of if multiples_of is not None else [(self.ring.one, None)]
        for h, label in factors:
            for exps in self.monomials(degree - h.degree()):
                poly = h * self.expand(exps)
                text = self.name(exps)
                if label is not None:
                    text = label if text == "1" else f"{label}*{text}"
                candidates.append((poly, text))
        ech = linalg.SparseEchelon(field)
        for i, (poly, _) in enumerate(candidates):
            ech.add(poly.terms, i)
        combo = ech.express(f.terms)
        if combo is None:
            return MembershipResult(False, degree)
        cert = []
        total = self.ring.zero
        for i in sorted(combo):
            c = combo[i]
            if field.is_zero(c):
                continue
            poly, text = candidates[i]
            cert.append((field.fmt(c), text))
            total = total + poly.scale(field.element(c))
        return MembershipResult(True, degree, cert, total == f)

    def contains(self, f: FracPolynomial) -> bool:
        return self.membership(f).member


# ---------------------------------------------------------------------------
# invariance and orbit products

@dataclass
class InvarianceVerdict:
    polynomial: str
    invariant: bool
    failures: list

    def to_dict(self) -> dict:
        return {"polynomial": self.polynomial, "invariant": self.invariant,
                "failures": self.failures}


def verify_invariance(f: FracPolynomial, G: MatrixGroup | list, name: str | None = None) -> InvarianceVerdict:
    """``f(g x) = f(x)`` for every generator ``g``."""
    gens = G.generators if isinstance(G, MatrixGroup) else G
    labels = G.generator_names if isinstance(G, MatrixGroup) else [f"g{i + 1}" for i in range(len(gens))]
    failures = []
    for label, g in zip(labels, gens):
        img = f.substitute(g)
        if img != f:
            failures.append({"generator": label, "image": str(img)})
    return InvarianceVerdict(name or str(f), not failures, failures)


def orbit(f: FracPolynomial, G: MatrixGroup) -> list[FracPolynomial]:
    """Distinct images of ``f`` under the elements of ``G``, in element order."""
    seen = []
    for g in G.elements:
        img = f.substitute(g)
        if img not in seen:
            seen.append(img)
    return seen


def orbit_product(f: FracPolynomial, G: MatrixGroup) -> FracPolynomial:
    return product(orbit(f, G), f.ring)


# ---------------------------------------------------------------------------
# the unipotent group on four variables in characteristic p

def unipotent_ring(p: int) -> PolyRing:
    return PolyRing(GF(p), ["x1", "x2", "x3", "x4"])


def unipotent_group(p: int) -> MatrixGroup:
    """Generated by ``x3 -> x3 + x1, x4 -> x4 + x2``; ``x4 -> x4 + x1``; ``x3 -> x3 + x2``."""
    gens = [
        [[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    ]
    return MatrixGroup(GF(p), gens)


@dataclass
class OrbitProducts:
    p: int
    u: FracPolynomial
    v: FracPolynomial
    t: FracPolynomial
    w: FracPolynomial
    moore_agrees: bool

    def to_dict(self) -> dict:
        return {"p": self.p, "deg_u": str(self.u.degree()), "deg_v": str(self.v.degree()),
                "deg_t": str(self.t.degree()), "moore_quotient_equals_orbit_product": self.moore_agrees}


def orbit_products(p: int) -> OrbitProducts:
    """``u``, ``v`` as orbit products of ``x3``, ``x4`` (two ways) and the invariant ``t``."""
    R = unipotent_ring(p)
    x1, x2, x3, x4 = R.gens
    w = moore_determinant([x1, x2])
    u_moore = moore_determinant([x1, x2, x3]).exact_div(w)
    v_moore = moore_determinant([x1, x2, x4]).exact_div(w)
    F = R.field
    forms3 = [x3 + x1.scale(F(a)) + x2.scale(F(c)) for a in range(p) for c in range(p)]
    forms4 = [x4 + x1.scale(F(a)) + x2.scale(F(c)) for a in range(p) for c in range(p)]
    u = product(forms3, R)
    v = product(forms4, R)
    t = x1 * x4 ** p - x1 ** p * x4 + x2 * x3 ** p - x2 ** p * x3
    return OrbitProducts(p, u, v, t, w, u == u_moore and v == v_moore)


@dataclass
class Verdict:
    name: str
    ok: bool
    details: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.name, "ok": self.ok, **self.details}


def verify_orbit_identity(p: int) -> Verdict:
    """``t^p - v x1^p - u x2^p = t w^(p-1)`` and the Moore determinant identity behind it."""
    op = orbit_products(p)
    R = op.u.ring
    x1, x2, x3, x4 = R.gens
    t, u, v, w = op.t, op.u, op.v, op.w
    m3 = moore_determinant([x1, x2, x3])
    m4 = moore_determinant([x1, x2, x4])
    det_identity = w * t ** p - x1 ** p * m4 - x2 ** p * m3 == w ** p * t
    main = t ** p - v * x1 ** p - u * x2 ** p == t * w ** (p - 1)
    return Verdict("orbit_identity", det_identity and main and op.moore_agrees, {
        "p": p,
        "determinant_identity": det_identity,
        "identity": main,
        "moore_quotient_equals_orbit_product": op.moore_agrees,
    })


def orbit_subring(p: int, op: OrbitProducts | None = None) -> GradedSubring:
    op = op or orbit_products(p)
    x1, x2 = op.u.ring.gens[:2]
    return GradedSubring([x1, x2, op.t, op.u, op.v], ["x1", "x2", "t", "u", "v"])


def frobenius_closure_check(p: int) -> Verdict:
    """``t`` is not in ``(x1, x2)C`` but ``t^p`` is in ``(x1^p, x2^p)C``."""
    op = orbit_products(p)
    C = orbit_subring(p, op)
    x1, x2 = op.u.ring.gens[:2]
    not_in = C.membership(op.t, multiples_of=[(x1, "x1"), (x2, "x2")])
    frob = C.membership(op.t ** p, multiples_of=[(x1 ** p, f"x1^{p}"), (x2 ** p, f"x2^{p}")])
    ok = not not_in.member and frob.member and frob.verified
    return Verdict("frobenius_closure", ok, {
        "p": p,
        "t_in_(x1,x2)C": not_in.to_dict(),
        "t^p_in_(x1^p,x2^p)C": frob.to_dict(),
    })


def _split_coefficients(op: OrbitProducts):
    """``A', B'`` with ``w^(p-1) = A' x1^p + B' x2^p``."""
    A, B, rem = poly_divide_split(op.w ** (op.p - 1), 0, 1)
    if rem:
        raise FsingError("w^(p-1) is not in (x1^p, x2^p)")
    return A, B


def tilde_generators(p: int, op: OrbitProducts | None = None):
    """``(u~, v~, A', B')`` with ``u~ = u + t B'`` and ``v~ = v + t A'``."""
    op = op or orbit_products(p)
    A, B = _split_coefficients(op)
    return op.u + op.t * B, op.v + op.t * A, A, B


def sandwich_check(p: int, independent: bool | None = None) -> Verdict:
    """``A = k[x1, x2, u~, v~]`` is a polynomial ring with ``A <= C <= A^(1/p)``.

    (i) ``u~, v~`` are invariant; (ii) ``t^p = v~ x1^p + u~ x2^p``;
    (iii) ``g^p`` lies in ``A`` for every generator ``g`` of ``C``, by an
    explicit expression that is re-expanded (and, when ``independent`` is
    set, also by graded linear algebra); (iv) the Jacobian determinant of
    ``(x1, x2, u~, v~)`` is nonzero.  ``C`` and ``k[x1, x2, t, u~, v~]``
    are compared by membership of each generator set in the other ring.
    """
    if independent is None:
        independent = p <= 3
    op = orbit_products(p)
    R = op.u.ring
    x1, x2, x3, x4 = R.gens
    G = unipotent_group(p)
    ut, vt, A1, B1 = tilde_generators(p, op)
    t, u, v = op.t, op.u, op.v

    invariance = {name: verify_invariance(f, G, name).invariant
                  for name, f in (("t", t), ("u", u), ("v", v), ("u~", ut), ("v~", vt))}
    item_i = invariance["u~"] and invariance["v~"]
    item_ii = t ** p == vt * x1 ** p + ut * x2 ** p

    # g^p in A: x1^p, x2^p trivially; t^p by (ii); u = u~ - t B', v = v~ - t A'
    tp = vt * x1 ** p + ut * x2 ** p
    explicit = {
        "x1": (True, f"x1^{p}"),
        "x2": (True, f"x2^{p}"),
        "t": (t ** p == tp, f"v~*x1^{p} + u~*x2^{p}"),
        "u": (u ** p == ut ** p - tp * B1 ** p, f"u~^{p} - (v~*x1^{p} + u~*x2^{p})*(B')^{p}"),
        "v": (v ** p == vt ** p - tp * A1 ** p, f"v~^{p} - (v~*x1^{p} + u~*x2^{p})*(A')^{p}"),
    }
    item_iii = all(ok for ok, _ in explicit.values())
    iii = {name: {"expression": text, "reexpands": ok} for name, (ok, text) in explicit.items()}
    if independent:
        Asub = GradedSubring([x1, x2, ut, vt], ["x1", "x2", "u~", "v~"])
        for name, g in (("x1", x1), ("x2", x2), ("t", t), ("u", u), ("v", v)):
            res = Asub.membership(g ** p)
            iii[name]["linear_algebra_member"] = res.member and res.verified
            item_iii = item_iii and res.member and res.verified

    jac = [[f.derivative(i) for i in range(4)] for f in (x1, x2, ut, vt)]
    jdet = determinant(jac)
    jacobian = "full rank" if jdet else "inconclusive"

    # S is integral over A: x3, x4 are roots of the monic orbit polynomials
    # u, v over k[x1, x2], and u^p, v^p lie in A; so A has dimension 4 and
    # its four generators are algebraically independent
    integral = {
        "u_monic_in_x3": _monic_in(u, 2, p * p),
        "v_monic_in_x4": _monic_in(v, 3, p * p),
        "u^p_v^p_in_A": explicit["u"][0] and explicit["v"][0],
    }
    item_iv = all(integral.values())

    C = orbit_subring(p, op)
    C2 = GradedSubring([x1, x2, t, ut, vt], ["x1", "x2", "t", "u~", "v~"])
    mutual = all(C.membership(g).member for g in C2.generators) and \
        all(C2.membership(g).member for g in C.generators)

    ok = item_i and item_ii and item_iii and item_iv and mutual and all(invariance.values())
    return Verdict("sandwich", ok, {
        "p": p,
        "group_order": G.order,
        "invariance": invariance,
        "A_prime": str(A1),
        "B_prime": str(B1),
        "i_tilde_invariant": item_i,
        "ii_tp_relation": item_ii,
        "iii_pth_powers_in_A": iii,
        "iv_jacobian": jacobian,
        "iv_algebraic_independence_by_integrality": integral,
        "same_subring_as_C": mutual,
    })


def _monic_in(f: FracPolynomial, var: int, degree: int) -> bool:
    """``f`` involves only x1, x2 and ``x_var``, with ``x_var^degree`` as its top power, coefficient 1."""
    allowed = {0, 1, var}
    for exps, c in f.terms.items():
        if any(k and i not in allowed for i, k in enumerate(exps)):
            return False
        if exps[var] > degree:
            return False
    top = [(exps, c) for exps, c in f.terms.items() if exps[var] == degree]
    unit = tuple(degree if i == var else 0 for i in range(f.ring.n))
    return len(top) == 1 and top[0][0] == unit and top[0][1] == f.field.one


# ---------------------------------------------------------------------------
# Fedder's criterion for hypersurfaces

@dataclass
class HypersurfacePresentation:
    ring: PolyRing
    F: FracPolynomial

    def __post_init__(self):
        if self.F.is_zero() or not self.F.is_homogeneous():
            raise FsingError("the defining polynomial must be nonzero and homogeneous")

    @property
    def degree(self) -> Fraction:
        return self.F.degree()


def hypersurface_presentation(p: int) -> HypersurfacePresentation:
    """``t^p - v x1^p - u x2^p - t (x1 x2^p - x1^p x2)^(p-1)`` with weights ``1, 1, p+1, p^2, p^2``."""
    R = PolyRing(GF(p), ["x1", "x2", "t", "u", "v"], [1, 1, p + 1, p * p, p * p])
    x1, x2, t, u, v = R.gens
    F = t ** p - v * x1 ** p - u * x2 ** p - t * (x1 * x2 ** p - x1 ** p * x2) ** (p - 1)
    return HypersurfacePresentation(R, F)


@dataclass
class FedderVerdict:
    f_pure: bool
    degree: Fraction
    witness: str | None
    terms_checked: int

    def to_dict(self) -> dict:
        return {
            "f_pure": self.f_pure,
            "verdict": "F-pure" if self.f_pure else "not F-pure",
            "degree": str(self.degree),
            "witness_monomial": self.witness,
            "terms_of_F^(p-1)": self.terms_checked,
        }


def fedder_test(H: HypersurfacePresentation) -> FedderVerdict:
    """F-purity at the homogeneous maximal ideal: ``F^(p-1)`` not in ``(x_i^p)``.

    A monomial lies in the Frobenius power of the maximal ideal exactly when
    one of its exponents is at least ``p``; the witness is a monomial of
    ``F^(p-1)`` with all exponents below ``p``.
    """
    p = H.ring.p
    G = H.F ** (p - 1)
    if G.level:
        raise FsingError("Fedder's test needs integral exponents")
    witness = None
    for exps in sorted(G.terms, key=lambda k: (sum(k), k)):
        if all(k < p for k in exps):
            witness = "*".join(f"{n}^{k}" if k > 1 else n
                               for n, k in zip(H.ring.names, exps) if k) or "1"
            break
    return FedderVerdict(witness is not None, H.degree, witness, len(G))


# ---------------------------------------------------------------------------
# the stored presentation of the counterexample invariant ring

@dataclass
class PresentationData:
    field: Field
    ring: PolyRing
    generators: list
    invariants: dict
    factors: dict
    orbit_of: dict
    relation_ring: PolyRing
    relation: FracPolynomial


def load_presentation(text: str | None = None) -> PresentationData:
    if text is None:
        text = resources.files("frobsplit").joinpath("data/presentation.txt").read_text()
    field = ring = None
    gens, invariants, factors, orbit_of, relation_text = [], {}, {}, {}, None
    for lineno, body in _lines(text):
        key, value, col = _key_value(body, lineno)
        head = key.split()
        if head[0] == "field":
            field = make_field(parse_field_spec(value, lineno, col))
        elif head[0] == "vars":
            ring = PolyRing(field, [v.strip() for v in value.split(",")])
        elif head[0] == "gen":
            gens.append(parse_matrix(value, field, lineno, col))
        elif head[0] == "invariant":
            invariants[head[1]] = parse_polynomial(value, ring, lineno, col)
        elif head[0] == "factor":
            factors.setdefault(head[1], []).append(parse_polynomial(value, ring, lineno, col))
        elif head[0] == "orbit":
            orbit_of[head[1]] = parse_polynomial(value, ring, lineno, col)
        elif head[0] == "relation":
            relation_text = (value, lineno, col)
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if field is None or ring is None or relation_text is None or not invariants:
        raise ParseError("presentation data needs field, vars, invariants and a relation")
    names = list(invariants)
    weights = [invariants[n].degree() for n in names]
    rel_ring = PolyRing(field, names, weights)
    relation = parse_polynomial(relation_text[0], rel_ring, relation_text[1], relation_text[2])
    return PresentationData(field, ring, gens, invariants, factors, orbit_of, rel_ring, relation)


def verify_presentation(text: str | None = None) -> Verdict:
    """Invariance of the generators, the orbit product, the relation and the a-invariant."""
    data = load_presentation(text)
    G = MatrixGroup(data.field, data.generators, names=["s", "u"])
    invariance = {n: verify_invariance(f, G, n).invariant for n, f in data.invariants.items()}
    orbit_checks = {}
    for name, seed in data.orbit_of.items():
        f = data.invariants[name]
        by_orbit = orbit_product(seed, G)
        by_factors = product(data.factors.get(name, []), data.ring) if name in data.factors else None
        orbit_checks[name] = {
            "equals_orbit_product": f == by_orbit,
            "orbit_size": len(orbit(seed, G)),
            "equals_listed_factors": by_factors is not None and f == by_factors,
        }
    expanded = data.relation.compose([data.invariants[n] for n in data.relation_ring.names])
    rel_zero = expanded.is_zero()
    homogeneous = data.relation.is_homogeneous()
    rel_degree = data.relation.degree()
    a_invariant = rel_degree - sum(data.relation_ring.weights)
    fedder = fedder_test(HypersurfacePresentation(data.relation_ring, data.relation))
    ok = (all(invariance.values()) and rel_zero and homogeneous
          and all(c["equals_orbit_product"] and c["equals_listed_factors"]
                  for c in orbit_checks.values()))
    return Verdict("presentation", ok, {
        "field": str(data.field.spec),
        "group_order": G.order,
        "invariance": invariance,
        "orbit_products": orbit_checks,
        "relation_degree": str(rel_degree),
        "weights": [str(w) for w in data.relation_ring.weights],
        "relation_homogeneous": homogeneous,
        "relation_expands_to_zero": rel_zero,
        "a_invariant": str(a_invariant),
        "fedder": fedder.to_dict(),
    })
