"""Decomposition of ``(S^G)^(1/q)`` for monomial actions into orbit summands.

The basis ``B_e`` of ``S^(1/q)`` over ``S`` consists of the fractional
monomials ``x^(lam/q)`` with ``0 <= lam_i < q``.  A monomial group moves each
such monomial to a scalar multiple of another, so ``B_e`` splits into orbits
of lines.  For an orbit with representative ``mu``, stabiliser ``H`` and
character ``chi`` the summand ``(S gamma_mu)^G`` is isomorphic to
``(S mu)^H`` via the sum over left coset representatives.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import linalg
from .fields import FieldSpec, make_field
from .groups import MatrixGroup, MonomialStructure, Refusal, detect_monomial
from .polyring import FracMonomial, FracPolynomial, PolyRing, compositions

DEFAULT_MAX_DEGREE = 3


class NotMonomialError(ValueError):
    def __init__(self, refusal: Refusal):
        super().__init__(f"group is not monomial in the standard basis: {refusal}")
        self.refusal = refusal


def monomial_structure(G: MatrixGroup) -> MonomialStructure:
    ms = detect_monomial(G)
    if isinstance(ms, Refusal):
        raise NotMonomialError(ms)
    return ms


@dataclass(frozen=True)
class FracBasis:
    n: int
    p: int
    e: int

    @property
    def q(self) -> int:
        return self.p ** self.e

    def __len__(self):
        return self.q ** self.n

    def __iter__(self):
        return iter(itertools.product(range(self.q), repeat=self.n))

    def monomials(self) -> list[FracMonomial]:
        return [FracMonomial.make(lam, self.e, self.p) for lam in self]


def enumerate_basis(n: int, p: int, e: int) -> FracBasis:
    return FracBasis(n, p, e)


@dataclass
class OrbitSummand:
    representative: FracMonomial
    exps: tuple              # exponent vector of the representative at level e
    orbit_size: int
    stabilizer: tuple        # element indices, sorted
    character: tuple         # raw scalars aligned with ``stabilizer``
    degree: Fraction
    label: str = ""
    name: str = ""
    certified_indecomposable: bool = False


# ---------------------------------------------------------------------------
# orbit enumeration

def _orbit_block(args):
    """Orbit representatives among ``lam`` whose first coordinate lies in ``firsts``.

    A vector is a representative iff it is the lex-least member of its orbit.
    """
    spec, perms, scalars, n, e, firsts = args
    field = make_field(spec)
    q = spec.p ** e
    one = field.one
    permutation = all(c == one for row in scalars for c in row)
    out = []
    for first in firsts:
        for rest in itertools.product(range(q), repeat=n - 1):
            lam = (first,) + rest
            images = []
            stab = []
            for gi, perm in enumerate(perms):
                img = [0] * n
                for j, k in enumerate(lam):
                    img[perm[j]] = k
                img = tuple(img)
                images.append(img)
                if img == lam:
                    stab.append(gi)
            if min(images) != lam:
                continue
            if permutation:
                chi = tuple(one for _ in stab)
            else:
                chi = tuple(_scalar(field, scalars[h], lam, e) for h in stab)
            out.append((lam, len(set(images)), tuple(stab), chi))
    return out


def _scalar(field, scalars, lam, e):
    c = field.one
    for cj, k in zip(scalars, lam):
        if k and cj != field.one:
            c = field.mul(c, field.power(cj, k))
    return field.root(c, e) if e else c


def orbit_representatives(ms: MonomialStructure, e: int, workers: int = 1) -> list:
    G = ms.group
    n, q = G.n, G.field.p ** e
    spec = G.field.spec
    if workers <= 1 or q < 2:
        return _orbit_block((spec, ms.perms, ms.scalars, n, e, range(q)))
    size = -(-q // workers)
    blocks = [range(i, min(q, i + size)) for i in range(0, q, size)]
    jobs = [(spec, ms.perms, ms.scalars, n, e, b) for b in blocks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_orbit_block, jobs))
    return [item for part in parts for item in part]


# ---------------------------------------------------------------------------
# labels

class _Labeler:
    """Canonical (stabiliser up to conjugacy, transported character) labels."""

    def __init__(self, G: MatrixGroup):
        self.G = G
        self.inv = [G.inverse(i) for i in range(G.order)]
        self.cache: dict = {}

    def label(self, stab: tuple, chi: tuple) -> tuple:
        key = (stab, chi)
        if key not in self.cache:
            G, field = self.G, self.G.field
            best = None
            for g in range(G.order):
                pairs = sorted((G.mul(G.mul(g, h), self.inv[g]), c) for h, c in zip(stab, chi))
                cand = tuple((h, field.key(c)) for h, c in pairs)
                if best is None or cand < best[0]:
                    best = (cand, tuple(pairs))
            self.cache[key] = best[1]
        return self.cache[key]

    def text(self, canon: tuple) -> str:
        G, field = self.G, self.G.field
        hs = ",".join(G.word_name(h) for h, _ in canon)
        chi = ",".join(field.fmt(c) for _, c in canon)
        return f"H=<{hs}> chi=({chi})"


def _is_p_power(k: int, p: int) -> bool:
    while k % p == 0:
        k //= p
    return k == 1


def _unipotent(G: MatrixGroup) -> bool:
    from .groups import mat_identity, mat_mul
    field = G.field
    ident = mat_identity(field, G.n)
    for m in G.elements:
        d = tuple(tuple(field.sub(m[i][j], ident[i][j]) for j in range(G.n)) for i in range(G.n))
        power = d
        for _ in range(G.n - 1):
            power = mat_mul(field, power, d)
        if any(not field.is_zero(x) for row in power for x in row):
            return False
    return True


def _scalar_group(G: MatrixGroup) -> bool:
    field = G.field
    for m in G.elements:
        c = m[0][0]
        for i in range(G.n):
            for j in range(G.n):
                if m[i][j] != (c if i == j else field.zero):
                    return False
    return True


class _Namer:
    def __init__(self, G: MatrixGroup):
        self.G = G
        self.order = G.order
        self.free_certified = (G.field.is_prime_field and _is_p_power(G.order, G.field.p)
                               and _unipotent(G))
        self.scalar = _scalar_group(G)

    def name(self, stab: tuple, chi: tuple) -> tuple[str, bool]:
        G, field = self.G, self.G.field
        trivial = all(c == field.one for c in chi)
        if len(stab) == self.order and trivial:
            return "S^G", True
        if len(stab) == 1:
            return "S", self.free_certified
        if self.scalar and len(stab) == self.order:
            r = self._veronese_residue(chi)
            if r is not None:
                return self._veronese_ideal(r), False
        if trivial:
            return "S^H", False
        return "(S⊗chi)^H", False

    def _veronese_residue(self, chi):
        G, field = self.G, self.G.field
        for r in range(self.order):
            if all(field.mul(field.power(G.elements[h][0][0], r), c) == field.one
                   for h, c in zip(range(self.order), chi)):
                return r
        return None

    def _veronese_ideal(self, r: int) -> str:
        n, N = self.G.n, self.order
        names = [f"x{i + 1}" for i in range(n)]
        gens = []
        for comp in compositions(r, n):
            exps = list(comp)
            exps[0] += N - r
            gens.append("*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(names, exps) if k))
        return "(" + ", ".join(gens) + ")S^G"


# ---------------------------------------------------------------------------

@dataclass
class SummandClass:
    label: str
    name: str
    stabilizer_order: int
    character: list
    multiplicity: int
    shifts: list
    certified_indecomposable: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "name": self.name,
            "stabilizer_order": self.stabilizer_order,
            "character": self.character,
            "multiplicity": self.multiplicity,
            "shifts": [str(s) for s in self.shifts],
            "certified_indecomposable": self.certified_indecomposable,
        }


@dataclass
class DecompositionReport:
    group: str
    p: int
    e: int
    n: int
    order: int
    summands: list = dc_field(repr=False)
    classes: list = dc_field(default_factory=list)
    total_rank: int = 0
    rank_check: bool = False

    @property
    def q(self) -> int:
        return self.p ** self.e

    def multiplicities(self) -> dict:
        """``{name: multiplicity}`` summed over classes sharing a name."""
        out: dict = {}
        for c in self.classes:
            out[c.name] = out.get(c.name, 0) + c.multiplicity
        return out

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "p": self.p,
            "e": self.e,
            "n": self.n,
            "order": self.order,
            "classes": [c.to_dict() for c in self.classes],
            "rank_check": {"sum_of_orbit_sizes": self.total_rank,
                           "expected": self.q ** self.n, "ok": self.rank_check},
        }


def orbit_and_stabilizer(G: MatrixGroup, mu, e: int | None = None) -> OrbitSummand:
    """Orbit of the line through ``mu``, its stabiliser and the character on it.

    ``mu`` is a FracMonomial, or an exponent vector at level ``e``.
    """
    ms = monomial_structure(G)
    field = G.field
    p = field.p
    if isinstance(mu, FracMonomial):
        e = mu.level if e is None else e
        lam = tuple(mu.at_level(e))
    else:
        lam = tuple(mu)
    q = p ** e
    if any(not 0 <= k < q for k in lam):
        raise ValueError("mu must lie in B_e")
    images = {ms.permute(g, lam) for g in range(G.order)}
    stab = tuple(g for g in range(G.order) if ms.permute(g, lam) == lam)
    chi = tuple(ms.act(h, lam, e)[0] for h in stab)
    labeler = _Labeler(G)
    name, cert = _Namer(G).name(stab, chi)
    return OrbitSummand(
        representative=FracMonomial.make(lam, e, p),
        exps=lam,
        orbit_size=len(images),
        stabilizer=stab,
        character=chi,
        degree=Fraction(sum(lam), q),
        label=labeler.text(labeler.label(stab, chi)),
        name=name,
        certified_indecomposable=cert,
    )


def decompose(G: MatrixGroup, e: int, workers: int = 1, group_id: str = "") -> DecompositionReport:
    """Split ``B_e`` into orbits and group the summands into classes."""
    ms = monomial_structure(G)
    field = G.field
    p, q = field.p, field.p ** e
    labeler = _Labeler(G)
    namer = _Namer(G)
    summands = []
    grouped: dict = {}
    for lam, size, stab, chi in orbit_representatives(ms, e, workers):
        canon = labeler.label(stab, chi)
        name, cert = namer.name(stab, chi)
        s = OrbitSummand(
            representative=FracMonomial.make(lam, e, p),
            exps=lam,
            orbit_size=size,
            stabilizer=stab,
            character=chi,
            degree=Fraction(sum(lam), q),
            label=labeler.text(canon),
            name=name,
            certified_indecomposable=cert,
        )
        summands.append(s)
        grouped.setdefault(canon, []).append(s)
    classes = []
    for canon, members in grouped.items():
        first = members[0]
        classes.append(SummandClass(
            label=first.label,
            name=first.name,
            stabilizer_order=len(first.stabilizer),
            character=[field.fmt(c) for _, c in canon],
            multiplicity=len(members),
            shifts=sorted(m.degree for m in members),
            certified_indecomposable=first.certified_indecomposable,
        ))
    classes.sort(key=lambda c: (-c.stabilizer_order, c.label))
    total = sum(s.orbit_size for s in summands)
    return DecompositionReport(
        group=group_id, p=p, e=e, n=G.n, order=G.order, summands=summands,
        classes=classes, total_rank=total, rank_check=(total == q ** G.n),
    )


# ---------------------------------------------------------------------------
# the coset-sum isomorphism, checked degree by degree

def _left_coset_reps(G: MatrixGroup, stab: tuple) -> list[int]:
    seen: set = set()
    reps = []
    for g in range(G.order):
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(g, h) for h in stab)
    return reps


def _act_vec(ms: MonomialStructure, g: int, vec: dict, e: int) -> dict:
    field = ms.group.field
    out: dict = {}
    for lam, c in vec.items():
        s, img = ms.act(g, lam, e)
        out[img] = field.add(out.get(img, field.zero), field.mul(s, c))
    return {k: v for k, v in out.items() if not field.is_zero(v)}


def _invariants(ms: MonomialStructure, basis: list, elements: list, e: int) -> list[dict]:
    """Kernel of the stacked ``(g - 1)`` maps on the span of ``basis``."""
    field = ms.group.field
    columns = []
    for lam in basis:
        col = {}
        for g in elements:
            img = _act_vec(ms, g, {lam: field.one}, e)
            img[lam] = field.sub(img.get(lam, field.zero), field.one)
            for k, v in img.items():
                if not field.is_zero(v):
                    col[(g, k)] = v
        columns.append(col)
    kernel = linalg.kernel_of_columns(field, columns)
    return [{basis[i]: c for i, c in vec.items()} for vec in kernel]


def _piece(n: int, q: int, offsets: list, k: int) -> list:
    """Level-e exponents ``q*m + off`` for ``off`` in offsets and integral ``|m| = k``."""
    out = []
    for off in offsets:
        for m in compositions(k, n):
            out.append(tuple(q * a + b for a, b in zip(m, off)))
    return out


@dataclass
class PermMapVerdict:
    representative: str
    degrees: list
    ok: bool

    def to_dict(self) -> dict:
        return {"representative": self.representative, "degrees": self.degrees, "ok": self.ok}


def verify_perm_map(G: MatrixGroup, mu, e: int, max_degree=DEFAULT_MAX_DEGREE) -> PermMapVerdict:
    """Check that the coset sum maps ``(S mu)^H`` bijectively onto ``(S gamma_mu)^G``.

    ``mu`` is an exponent vector at level ``e`` (or a FracMonomial).
    """
    ms = monomial_structure(G)
    field = G.field
    p, q = field.p, field.p ** e
    lam = tuple(mu.at_level(e)) if isinstance(mu, FracMonomial) else tuple(mu)
    if any(not 0 <= k < q for k in lam):
        raise ValueError("mu must lie in B_e")
    orbit = sorted({ms.permute(g, lam) for g in range(G.order)})
    stab = tuple(g for g in range(G.order) if ms.permute(g, lam) == lam)
    reps = _left_coset_reps(G, stab)
    gen_idx = [G.index[g] for g in G.generators]
    base = Fraction(sum(lam), q)
    rows = []
    ok = True
    k = 0
    while base + k <= Fraction(max_degree):
        source_basis = _piece(G.n, q, [lam], k)
        target_basis = _piece(G.n, q, orbit, k)
        source = _invariants(ms, source_basis, list(stab), e)
        target = _invariants(ms, target_basis, gen_idx, e)
        images = []
        lands = True
        for v in source:
            img: dict = {}
            for g in reps:
                for key, c in _act_vec(ms, g, v, e).items():
                    img[key] = field.add(img.get(key, field.zero), c)
            img = {kk: vv for kk, vv in img.items() if not field.is_zero(vv)}
            for s in gen_idx:
                if _act_vec(ms, s, img, e) != img:
                    lands = False
            images.append(img)
        ech = linalg.SparseEchelon(field)
        for i, img in enumerate(images):
            ech.add(img, i)
        row = {
            "degree": str(base + k),
            "source_dim": len(source),
            "target_dim": len(target),
            "image_rank": ech.rank,
            "lands_in_invariants": lands,
        }
        row["bijective"] = lands and ech.rank == len(source) == len(target)
        ok = ok and row["bijective"]
        rows.append(row)
        k += 1
    rep = str(FracPolynomial.build(PolyRing(field, G.n), {lam: field.one}, e))
    return PermMapVerdict(rep, rows, ok)


# ---------------------------------------------------------------------------
# Hilbert function bookkeeping

def invariant_dimension(G: MatrixGroup, degree: int) -> int:
    """``dim [S^G]_degree`` by substituting generator matrices (no monomial structure used)."""
    field = G.field
    ring = PolyRing(field, G.n)
    basis = list(compositions(degree, G.n))
    columns = []
    for lam in basis:
        f = ring.monomial(lam)
        col = {}
        for gi, g in enumerate(G.generators):
            diff = f.substitute(g) - f
            for k, v in diff.terms.items():
                col[(gi, k)] = v
        columns.append(col)
    return len(linalg.kernel_of_columns(field, columns))


def hilbert_check(G: MatrixGroup, e: int, max_degree=DEFAULT_MAX_DEGREE) -> list[dict]:
    """Compare ``sum_mu dim[(S mu)^H]_d`` with ``dim[(S^G)^(1/q)]_d`` for ``d <= max_degree``."""
    report = decompose(G, e)
    ms = monomial_structure(G)
    q = G.field.p ** e
    rows = []
    top = int(Fraction(max_degree) * q)
    for dq in range(top + 1):
        d = Fraction(dq, q)
        total = 0
        for s in report.summands:
            k = d - s.degree
            if k < 0 or k.denominator != 1:
                continue
            basis = _piece(G.n, q, [s.exps], int(k))
            total += len(_invariants(ms, basis, list(s.stabilizer), e))
        direct = invariant_dimension(G, dq)
        rows.append({"degree": str(d), "from_summands": total, "direct": direct,
                     "ok": total == direct})
    return rows


# ---------------------------------------------------------------------------
# F-purity: the mu = 1 summand splits off

@dataclass
class SplitWitness:
    e: int
    description: str
    checked: int
    degrees: list
    ok: bool

    def to_dict(self) -> dict:
        return {"e": self.e, "projection": self.description, "checked_invariants": self.checked,
                "degrees": self.degrees, "ok": self.ok}


def fpure_split_witness(G: MatrixGroup, e: int, max_degree=2) -> SplitWitness:
    """Projection of ``(S^G)^(1/q)`` onto its ``mu = 1`` summand, checked on invariants.

    Every invariant up to ``max_degree`` must project to a ``G``-invariant
    polynomial of ``S``; the projection must fix 1 and commute with
    multiplication by the degree-1 and degree-``q`` invariants sampled.
    """
    ms = monomial_structure(G)
    field = G.field
    q = field.p ** e
    ring = PolyRing(field, G.n)
    gen_idx = [G.index[g] for g in G.generators]

    def project(vec: dict) -> FracPolynomial:
        terms = {tuple(k // q for k in lam): c for lam, c in vec.items()
                 if all(k % q == 0 for k in lam)}
        return FracPolynomial.build(ring, terms, 0)

    def as_poly(vec: dict) -> FracPolynomial:
        return FracPolynomial.build(ring, dict(vec), e)

    samples = []
    for deg in (1, 2):
        for lam in compositions(deg, G.n):
            f = ring.monomial(lam)
            orbit_sum = ring.zero
            for g in G.elements:
                orbit_sum = orbit_sum + f.substitute(g)
            if orbit_sum and all(orbit_sum.substitute(g) == orbit_sum for g in G.generators):
                samples.append(orbit_sum)
    ok = project({(0,) * G.n: field.one}) == ring.one
    checked = 0
    rows = []
    for dq in range(int(Fraction(max_degree) * q) + 1):
        basis = list(compositions(dq, G.n))
        invs = _invariants(ms, basis, gen_idx, e)
        row_ok = True
        for v in invs:
            checked += 1
            pv = project(v)
            if any(pv.substitute(g) != pv for g in G.generators):
                row_ok = False
            f = as_poly(v)
            for r in samples:
                if project((r * f).lifted(e)) != r * pv:
                    row_ok = False
        rows.append({"degree": str(Fraction(dq, q)), "invariants": len(invs), "ok": row_ok})
        ok = ok and row_ok
    desc = "coefficient of the basis monomial 1 in the S-basis B_e of S^(1/q)"
    return SplitWitness(e, desc, checked, rows, ok)


# ---------------------------------------------------------------------------

def empirical_signature(G: MatrixGroup, e_values) -> dict:
    """Multiplicity ratios ``c / q^n`` per class for each ``e``."""
    table = []
    for e in e_values:
        rep = decompose(G, e)
        qn = rep.q ** rep.n
        row = {"e": e, "q": rep.q, "ratios": {}}
        for c in rep.classes:
            row["ratios"][c.label] = {"name": c.name, "multiplicity": c.multiplicity,
                                      "ratio": c.multiplicity / qn}
        free = [c for c in rep.classes if c.stabilizer_order == 1]
        row["free_ratio"] = sum(c.multiplicity for c in free) / qn
        table.append(row)
    return {"order": G.order, "inverse_order": 1 / G.order, "rows": table}
