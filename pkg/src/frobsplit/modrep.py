"""Modules over ``kG = k[a,b]/(a^3, b^3)`` for ``G = Z/3 x Z/3`` in characteristic 3.

A module is stored by the matrices of the two generators ``sigma`` and
``tau``; ``a = sigma - 1`` and ``b = tau - 1`` act by ``A`` and ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import linalg
from .fields import Field, FieldElement, perfect_closure
from .groups import (MatrixGroup, mat_identity, mat_mul, mat_power, format_matrix,
                     pseudoreflection_and_smallness, twist_representation)
from .polyring import PolyRing

# basis a^i b^j of the 9-dimensional group algebra, graded with b before a
MONOMIALS = sorted(((i, j) for i in range(3) for j in range(3)),
                   key=lambda m: (-(m[0] + m[1]), -m[1]))


class ModuleError(ValueError):
    pass


def _mat_sub(field, x, y):
    return tuple(tuple(field.sub(a, b) for a, b in zip(r, s)) for r, s in zip(x, y))


def _mat_add(field, x, y):
    return tuple(tuple(field.add(a, b) for a, b in zip(r, s)) for r, s in zip(x, y))


def _mat_scale(field, c, x):
    return tuple(tuple(field.mul(c, a) for a in r) for r in x)


def _is_zero_mat(field, x) -> bool:
    return all(field.is_zero(a) for r in x for a in r)


@dataclass(frozen=True)
class KGModule:
    field: Field
    sigma: tuple
    tau: tuple
    degree: Fraction | None = None

    @property
    def dim(self) -> int:
        return len(self.sigma)

    @property
    def A(self) -> tuple:
        return _mat_sub(self.field, self.sigma, mat_identity(self.field, self.dim))

    @property
    def B(self) -> tuple:
        return _mat_sub(self.field, self.tau, mat_identity(self.field, self.dim))

    def action(self, i: int, j: int) -> tuple:
        """Matrix of ``a^i b^j``."""
        f = self.field
        return mat_mul(f, mat_power(f, self.A, i), mat_power(f, self.B, j))

    def check_axioms(self) -> bool:
        f = self.field
        A, B = self.A, self.B
        return (_is_zero_mat(f, mat_power(f, A, 3)) and _is_zero_mat(f, mat_power(f, B, 3))
                and mat_mul(f, A, B) == mat_mul(f, B, A))

    def __str__(self):
        return (f"sigma={format_matrix(self.field, self.sigma)} "
                f"tau={format_matrix(self.field, self.tau)}")


def _check_field(field: Field):
    if field.p != 3:
        raise ModuleError(f"group algebra of Z/3 x Z/3 needs characteristic 3, got {field.p}")


def _nilpotent(field: Field) -> tuple:
    z, o = field.zero, field.one
    return ((z, o, z), (z, z, o), (z, z, z))


def build_V(alpha, field: Field | None = None) -> KGModule:
    """The module ``k^3`` with ``sigma = I + N`` and ``tau = I + alpha N``."""
    field, a = _resolve(alpha, field)
    _check_field(field)
    N = _nilpotent(field)
    I = mat_identity(field, 3)
    return KGModule(field, _mat_add(field, I, N), _mat_add(field, I, _mat_scale(field, a, N)))


def _resolve(alpha, field):
    if isinstance(alpha, FieldElement):
        return alpha.field, alpha.raw
    if field is None:
        field = perfect_closure(3)
    return field, field(alpha).raw if isinstance(alpha, (int, str)) else alpha


def regular_module(field: Field | None = None) -> KGModule:
    """``kG`` acting on itself; ``sigma`` and ``tau`` multiply by ``1 + a`` and ``1 + b``."""
    field = field or perfect_closure(3)
    _check_field(field)
    basis = [(i, j) for i in range(3) for j in range(3)]
    idx = {m: k for k, m in enumerate(basis)}

    def mult(di, dj):
        m = [[field.zero] * 9 for _ in range(9)]
        for (i, j), col in idx.items():
            m[col][col] = field.one
            if i + di < 3 and j + dj < 3:
                m[idx[(i + di, j + dj)]][col] = field.one
        return tuple(tuple(r) for r in m)

    return KGModule(field, mult(1, 0), mult(0, 1))


def direct_sum(*mods: KGModule) -> KGModule:
    field = mods[0].field
    n = sum(m.dim for m in mods)

    def block(mats):
        out = [[field.zero] * n for _ in range(n)]
        off = 0
        for m in mats:
            for i, row in enumerate(m):
                for j, x in enumerate(row):
                    out[off + i][off + j] = x
            off += len(m)
        return tuple(tuple(r) for r in out)

    return KGModule(field, block([m.sigma for m in mods]), block([m.tau for m in mods]))


# ---------------------------------------------------------------------------
# ideals of the group algebra as subspaces

@dataclass(frozen=True)
class AnnihilatorIdeal:
    """Ideal of ``k[a,b]/(a^3,b^3)`` stored as a reduced echelon basis over ``MONOMIALS``."""

    field: Field
    rows: tuple

    @property
    def dim(self) -> int:
        return len(self.rows)

    def elements(self) -> list[str]:
        return [_fmt_element(self.field, r) for r in self.rows]

    def generators(self) -> list[str]:
        """A minimal generating set, chosen greedily from the echelon basis by degree."""
        f = self.field
        rows = sorted(self.rows, key=lambda r: min(
            (sum(MONOMIALS[k]) for k, x in enumerate(r) if not f.is_zero(x)), default=0))
        chosen: list = []
        for r in rows:
            if not _contains(ideal_normal_form(f, chosen), r):
                chosen.append(r)
                if ideal_normal_form(f, chosen).rows == self.rows:
                    break
        return [_fmt_element(f, r) for r in chosen]

    def __str__(self):
        gens = self.generators()
        return "(" + ", ".join(gens) + ")" if gens else "(0)"


def _contains(ideal: AnnihilatorIdeal, row) -> bool:
    if not ideal.rows:
        return all(ideal.field.is_zero(x) for x in row)
    return linalg.rank(ideal.field, [list(r) for r in ideal.rows] + [list(row)]) == ideal.dim


def _fmt_element(field, row) -> str:
    text = ""
    for (i, j), c in zip(MONOMIALS, row):
        if field.is_zero(c):
            continue
        sign, coeff = "+", field.fmt(c)
        negated = field.fmt(field.neg(c))
        if len(negated) < len(coeff):
            sign, coeff = "-", negated
        mono = "*".join(x for x in (_pw("a", i), _pw("b", j)) if x)
        if not mono:
            term = coeff
        elif coeff == "1":
            term = mono
        else:
            if " " in coeff or "/" in coeff:
                coeff = f"({coeff})"
            term = f"{coeff}*{mono}"
        if not text:
            text = term if sign == "+" else "-" + term
        else:
            text += f" {sign} {term}"
    return text or "0"


def _pw(v, k):
    return "" if k == 0 else (v if k == 1 else f"{v}^{k}")


def _alg_mul(field, x: dict, y: dict) -> dict:
    out: dict = {}
    for (i, j), c in x.items():
        for (k, l), d in y.items():
            if i + k < 3 and j + l < 3:
                key = (i + k, j + l)
                out[key] = field.add(out.get(key, field.zero), field.mul(c, d))
    return out


def _normal_form_of_span(field, vectors: list) -> AnnihilatorIdeal:
    if not vectors:
        return AnnihilatorIdeal(field, ())
    red, _ = linalg.rref(field, vectors)
    return AnnihilatorIdeal(field, tuple(tuple(r) for r in red))


def ideal_normal_form(field: Field, generators) -> AnnihilatorIdeal:
    """Echelon normal form of the ideal generated by ``generators``.

    Each generator is a row over ``MONOMIALS`` or a dict ``{(i, j): raw}``.
    """
    vecs = []
    for g in generators:
        gd = g if isinstance(g, dict) else {m: c for m, c in zip(MONOMIALS, g)}
        for m in MONOMIALS:
            prod = _alg_mul(field, gd, {m: field.one})
            vecs.append([prod.get(mm, field.zero) for mm in MONOMIALS])
    return _normal_form_of_span(field, vecs)


def expected_annihilator(alpha, field: Field | None = None) -> AnnihilatorIdeal:
    """Normal form of ``(b - alpha a)``."""
    field, a = _resolve(alpha, field)
    return ideal_normal_form(field, [{(0, 1): field.one, (1, 0): field.neg(a)}])


def annihilator(M: KGModule) -> AnnihilatorIdeal:
    """``{f : f M = 0}`` computed as the kernel of ``c -> sum c_ij A^i B^j``."""
    field = M.field
    columns = []
    for (i, j) in MONOMIALS:
        mat = M.action(i, j)
        columns.append([x for row in mat for x in row])
    rows = [list(r) for r in zip(*columns)]
    kernel = linalg.nullspace(field, rows)
    return _normal_form_of_span(field, kernel)


def socle_dim(M: KGModule) -> int:
    field = M.field
    rows = [list(r) for r in M.A] + [list(r) for r in M.B]
    return len(linalg.nullspace(field, rows))


# ---------------------------------------------------------------------------
# the counterexample group and its twists

def counterexample_group(alpha=None, field: Field | None = None) -> MatrixGroup:
    """``<I + N, I + alpha N>`` acting on three variables, with its abstract presentation."""
    from .parsing import parse_ast
    field, a = _resolve(alpha if alpha is not None else perfect_closure(3).t, field)
    M = build_V(field.element(a))
    relators = [(parse_ast(w), w) for w in ("s^3", "u^3", "s*u*s^-1*u^-1")]
    return MatrixGroup(field, [M.sigma, M.tau], names=["s", "u"], relators=relators,
                       abstract_order=9)


def twist_module(M: KGModule, e: int) -> KGModule:
    """Frobenius twist: every matrix entry replaced by its ``3^e``-th root."""
    if e == 0:
        return M
    G = MatrixGroup(M.field, [M.sigma, M.tau], names=["s", "u"])
    T = twist_representation(G, e)
    gens = dict(zip(T.generator_names, T.generators))
    degree = M.degree / 3 ** e if M.degree is not None else None
    return KGModule(M.field, gens["s"], gens["u"], degree)


def lowest_degree_component(e: int, alpha=None) -> KGModule:
    """Action of the two generators on the degree ``1/3^e`` piece of ``S^(1/3^e)``.

    Computed by substituting into the fractional monomials ``x_j^(1/3^e)``.
    """
    field, a = _resolve(alpha if alpha is not None else perfect_closure(3).t, None)
    V = build_V(field.element(a))
    ring = PolyRing(field, 3)
    gens = [ring.monomial(tuple(int(i == j) for i in range(3)), e) for j in range(3)]
    mats = []
    for g in (V.sigma, V.tau):
        m = [[field.zero] * 3 for _ in range(3)]
        for j, xj in enumerate(gens):
            img = xj.substitute(g)
            for i, xi in enumerate(gens):
                m[i][j] = img.coefficient(xi.monomials()[0].exps, xi.monomials()[0].level).raw
        mats.append(tuple(tuple(r) for r in m))
    return KGModule(field, mats[0], mats[1], Fraction(1, 3 ** e))


def closed_form_check(alpha=None) -> list[dict]:
    """``sigma^i tau^j = I + (i + j alpha) N + (C(i,2) + i j alpha + C(j,2) alpha^2) N^2``."""
    field, a = _resolve(alpha if alpha is not None else perfect_closure(3).t, None)
    V = build_V(field.element(a))
    N = _nilpotent(field)
    N2 = mat_mul(field, N, N)
    I = mat_identity(field, 3)
    rows = []
    for i in range(3):
        for j in range(3):
            lhs = mat_mul(field, mat_power(field, V.sigma, i), mat_power(field, V.tau, j))
            c1 = field.add(field.from_int(i), field.mul(field.from_int(j), a))
            c2 = field.add(field.add(field.from_int(comb(i, 2)),
                                     field.mul(field.from_int(i * j), a)),
                           field.mul(field.from_int(comb(j, 2)), field.mul(a, a)))
            rhs = _mat_add(field, _mat_add(field, I, _mat_scale(field, c1, N)),
                           _mat_scale(field, c2, N2))
            diff = _mat_sub(field, lhs, I)
            rank = linalg.rank(field, [list(r) for r in diff])
            rows.append({"i": i, "j": j, "ok": lhs == rhs, "rank_minus_identity": rank})
    return rows


@dataclass
class Witness:
    e: int
    degree: Fraction
    module: KGModule
    annihilator: AnnihilatorIdeal
    expected: AnnihilatorIdeal
    socle_dim: int
    matches_twist: bool

    @property
    def ok(self) -> bool:
        return (self.annihilator.rows == self.expected.rows and self.socle_dim == 1
                and self.matches_twist)

    def to_dict(self) -> dict:
        return {
            "e": self.e,
            "degree": str(self.degree),
            "annihilator": str(self.annihilator),
            "expected": str(self.expected),
            "socle_dim": self.socle_dim,
            "matches_twist_of_V": self.matches_twist,
            "ok": self.ok,
        }


@dataclass
class WitnessReport:
    alpha: str
    witnesses: list
    pairwise_distinct: bool
    closed_form: list
    smallness: dict

    @property
    def ok(self) -> bool:
        return (self.pairwise_distinct and all(w.ok for w in self.witnesses)
                and all(r["ok"] for r in self.closed_form) and self.smallness["small"])

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "pairwise_distinct": self.pairwise_distinct,
            "closed_form": self.closed_form,
            "smallness": self.smallness,
            "ok": self.ok,
        }


def distinct_witnesses(max_e: int, alpha=None) -> WitnessReport:
    """Annihilators of the lowest-degree components for ``e = 0..max_e``."""
    field, a = _resolve(alpha if alpha is not None else perfect_closure(3).t, None)
    V = build_V(field.element(a))
    witnesses = []
    for e in range(max_e + 1):
        M = lowest_degree_component(e, field.element(a))
        twisted = twist_module(V, e)
        witnesses.append(Witness(
            e=e,
            degree=Fraction(1, 3 ** e),
            module=M,
            annihilator=annihilator(M),
            expected=expected_annihilator(field.element(field.root(a, e))),
            socle_dim=socle_dim(M),
            matches_twist=(M.sigma, M.tau) == (twisted.sigma, twisted.tau),
        ))
    rows = [w.annihilator.rows for w in witnesses]
    distinct = len(set(rows)) == len(rows)
    G = counterexample_group(field.element(a))
    return WitnessReport(
        alpha=field.fmt(a),
        witnesses=witnesses,
        pairwise_distinct=distinct,
        closed_form=closed_form_check(field.element(a)),
        smallness=pseudoreflection_and_smallness(G).to_dict(),
    )
