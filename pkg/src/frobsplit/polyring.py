"""Sparse polynomials with exponents in (1/p^e)·Z_{>=0}.

A :class:`FracPolynomial` stores integer exponent vectors together with one
*level* ``e`` for the whole polynomial; the vector ``lam`` at level ``e``
stands for ``x^(lam/p^e)``.  Levels are kept minimal, so structural
equality is equality of elements of ``S^(1/p^inf)``.

Group elements act on the variables by the column convention
``g.x_j = sum_i g[i][j] x_i``; on level-``e`` polynomials the entries are
replaced by their ``p^e``-th roots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .fields import Field, FieldElement, FieldError


class PolynomialError(ValueError):
    pass


def _divisible(exps: Iterable[int], m: int) -> bool:
    return all(k % m == 0 for k in exps)


@dataclass(frozen=True, order=True)
class FracMonomial:
    """``x^(exps/p^level)``; build through :meth:`make` to get the canonical level."""

    exps: tuple
    level: int
    p: int

    @classmethod
    def make(cls, exps, level: int, p: int) -> "FracMonomial":
        exps = tuple(exps)
        while level > 0 and _divisible(exps, p):
            exps = tuple(k // p for k in exps)
            level -= 1
        return cls(exps, level, p)

    @property
    def degree(self) -> Fraction:
        return Fraction(sum(self.exps), self.p ** self.level)

    def at_level(self, level: int) -> tuple:
        if level < self.level:
            raise PolynomialError("cannot lower the level of a monomial")
        f = self.p ** (level - self.level)
        return tuple(k * f for k in self.exps)

    def fractional_exponents(self) -> tuple:
        q = self.p ** self.level
        return tuple(Fraction(k, q) for k in self.exps)


class PolyRing:
    """``k[x_1, ..., x_n]`` together with all of its ``p^e``-th roots."""

    def __init__(self, field: Field, names: Sequence[str] | int, weights: Sequence | None = None):
        if isinstance(names, int):
            names = tuple(f"x{i + 1}" for i in range(names))
        self.field = field
        self.names = tuple(names)
        self.n = len(self.names)
        if len(set(self.names)) != self.n:
            raise PolynomialError("variable names must be distinct")
        self.weights = tuple(Fraction(w) for w in (weights or [1] * self.n))
        if len(self.weights) != self.n:
            raise PolynomialError("one weight per variable is required")

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.field == other.field
                and self.names == other.names and self.weights == other.weights)

    def __hash__(self):
        return hash((self.field, self.names, self.weights))

    def __repr__(self):
        return f"PolyRing({self.field}, {self.names})"

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def zero(self) -> "FracPolynomial":
        return FracPolynomial(self, {}, 0)

    @property
    def one(self) -> "FracPolynomial":
        return self.const(self.field.one)

    def const(self, c) -> "FracPolynomial":
        c = self._raw(c)
        if self.field.is_zero(c):
            return self.zero
        return FracPolynomial(self, {(0,) * self.n: c}, 0)

    def var(self, i: int) -> "FracPolynomial":
        exps = [0] * self.n
        exps[i] = 1
        return FracPolynomial(self, {tuple(exps): self.field.one}, 0)

    def __getitem__(self, name: str) -> "FracPolynomial":
        return self.var(self.names.index(name))

    @property
    def gens(self) -> list:
        return [self.var(i) for i in range(self.n)]

    def monomial(self, exps, level: int = 0, coeff=None) -> "FracPolynomial":
        c = self.field.one if coeff is None else self._raw(coeff)
        if self.field.is_zero(c):
            return self.zero
        return FracPolynomial.build(self, {tuple(exps): c}, level)

    def from_monomial(self, mono: FracMonomial, coeff=None) -> "FracPolynomial":
        return self.monomial(mono.exps, mono.level, coeff)

    def parse(self, text: str) -> "FracPolynomial":
        from .parsing import parse_polynomial
        return parse_polynomial(text, self)

    def _raw(self, c):
        if isinstance(c, FieldElement):
            if c.field != self.field:
                raise FieldError(f"coefficient from {c.field} in a ring over {self.field}")
            return c.raw
        if isinstance(c, int):
            return self.field.from_int(c)
        return c

    def weighted_degree(self, exps, level: int = 0) -> Fraction:
        return sum((w * k for w, k in zip(self.weights, exps)), Fraction(0)) / self.p ** level


def _term_key(exps):
    return (sum(exps), exps)


class FracPolynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to raw coefficients."""

    __slots__ = ("ring", "terms", "level", "_hash")

    def __init__(self, ring: PolyRing, terms: dict, level: int):
        self.ring = ring
        self.terms = terms
        self.level = level
        self._hash = None

    @classmethod
    def build(cls, ring: PolyRing, terms: dict, level: int) -> "FracPolynomial":
        """Drop zero coefficients and bring the level down to its minimum."""
        field = ring.field
        terms = {k: v for k, v in terms.items() if not field.is_zero(v)}
        p = ring.p
        if level > 0 and terms:
            shift = 0
            while shift < level and all(_divisible(k, p ** (shift + 1)) for k in terms):
                shift += 1
            if shift:
                d = p ** shift
                terms = {tuple(x // d for x in k): v for k, v in terms.items()}
                level -= shift
        if not terms:
            level = 0
        return cls(ring, terms, level)

    # -- basic queries -------------------------------------------------

    @property
    def field(self) -> Field:
        return self.ring.field

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, FieldElement)):
            other = self.ring.const(other)
        if not isinstance(other, FracPolynomial):
            return NotImplemented
        return self.ring == other.ring and self.level == other.level and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.level, frozenset(self.terms.items())))
        return self._hash

    def monomials(self) -> list:
        """Monomials in descending graded-lex order."""
        p = self.ring.p
        return [FracMonomial.make(k, self.level, p)
                for k in sorted(self.terms, key=_term_key, reverse=True)]

    def items(self) -> list:
        """``(FracMonomial, FieldElement)`` pairs in descending graded-lex order."""
        p, field = self.ring.p, self.field
        return [(FracMonomial.make(k, self.level, p), field.element(self.terms[k]))
                for k in sorted(self.terms, key=_term_key, reverse=True)]

    def coefficient(self, exps, level: int = 0) -> FieldElement:
        mono = FracMonomial.make(exps, level, self.ring.p)
        if mono.level > self.level:
            return self.field.element(self.field.zero)
        key = mono.at_level(self.level)
        return self.field.element(self.terms.get(key, self.field.zero))

    def degrees(self) -> set:
        """Distinct weighted degrees of the monomials present."""
        return {self.ring.weighted_degree(k, self.level) for k in self.terms}

    def degree(self) -> Fraction:
        if not self.terms:
            raise PolynomialError("the zero polynomial has no degree")
        return max(self.degrees())

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * self.ring.n}

    def constant_coefficient(self) -> FieldElement:
        return self.coefficient((0,) * self.ring.n)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "FracPolynomial":
        if isinstance(other, FracPolynomial):
            if other.ring != self.ring:
                raise PolynomialError("polynomials from different rings")
            return other
        if isinstance(other, (int, FieldElement)):
            return self.ring.const(other)
        return NotImplemented

    def lifted(self, level: int) -> dict:
        """Terms re-expressed at a (higher or equal) level."""
        if level == self.level:
            return self.terms
        if level < self.level:
            raise PolynomialError("cannot lower the level of a polynomial")
        f = self.ring.p ** (level - self.level)
        return {tuple(x * f for x in k): v for k, v in self.terms.items()}

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        level = max(self.level, other.level)
        field = self.field
        out = dict(self.lifted(level))
        zero = field.zero
        for k, v in other.lifted(level).items():
            out[k] = field.add(out.get(k, zero), v)
        return FracPolynomial.build(self.ring, out, level)

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg
        return FracPolynomial(self.ring, {k: neg(v) for k, v in self.terms.items()}, self.level)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FracPolynomial":
        c = self.ring._raw(c)
        if self.field.is_zero(c):
            return self.ring.zero
        mul = self.field.mul
        return FracPolynomial(self.ring, {k: mul(c, v) for k, v in self.terms.items()}, self.level)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return self.ring.zero
        level = max(self.level, other.level)
        a, b = self.lifted(level), other.lifted(level)
        if len(a) < len(b):
            a, b = b, a
        field = self.field
        out: dict = {}
        if field.is_prime_field:
            p = field.p
            for kb, vb in b.items():
                for ka, va in a.items():
                    key = tuple(x + y for x, y in zip(ka, kb))
                    out[key] = out.get(key, 0) + va * vb
            out = {k: v % p for k, v in out.items()}
        else:
            add, mul, zero = field.add, field.mul, field.zero
            for kb, vb in b.items():
                for ka, va in a.items():
                    key = tuple(x + y for x, y in zip(ka, kb))
                    out[key] = add(out.get(key, zero), mul(va, vb))
        return FracPolynomial.build(self.ring, out, level)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("only non-negative integer powers are supported; "
                                  "use frobenius_root for fractional exponents")
        p = self.ring.p
        result = self.ring.one
        base = self
        j = 0
        # peel off factors of p with the Frobenius, which is exact and cheap
        while k and k % p == 0:
            k //= p
            j += 1
        if j:
            base = base.frobenius_power(j)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius_power(self, e: int = 1) -> "FracPolynomial":
        """``f^(p^e)``."""
        if e == 0 or not self.terms:
            return self
        frob = self.field.frob
        p = self.ring.p
        if self.level >= e:
            terms = {k: frob(v, e) for k, v in self.terms.items()}
            return FracPolynomial.build(self.ring, terms, self.level - e)
        f = p ** (e - self.level)
        terms = {tuple(x * f for x in k): frob(v, e) for k, v in self.terms.items()}
        return FracPolynomial(self.ring, terms, 0)

    def frobenius_root(self, e: int = 1) -> "FracPolynomial":
        """The unique ``h`` with ``h^(p^e) = f``."""
        if e == 0 or not self.terms:
            return self
        root = self.field.root
        terms = {k: root(v, e) for k, v in self.terms.items()}
        return FracPolynomial.build(self.ring, terms, self.level + e)

    # -- substitution and friends --------------------------------------

    def substitute(self, matrix) -> "FracPolynomial":
        """Act by a matrix of raw field values: ``x_j -> sum_i m[i][j] x_i``."""
        if self.level:
            e = self.level
            return self.frobenius_power(e).substitute(matrix).frobenius_root(e)
        ring = self.ring
        n = ring.n
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise PolynomialError(f"substitution needs a {n}x{n} matrix")
        images = []
        for j in range(n):
            img = {}
            for i in range(n):
                c = matrix[i][j]
                if not ring.field.is_zero(c):
                    e_i = [0] * n
                    e_i[i] = 1
                    img[tuple(e_i)] = c
            images.append(FracPolynomial(ring, img, 0))
        return self.compose(images)

    def compose(self, images: Sequence["FracPolynomial"]) -> "FracPolynomial":
        """Evaluate this (level-0) polynomial at ``images``, one per variable."""
        if self.level:
            raise PolynomialError("compose needs a level-0 polynomial")
        if len(images) != self.ring.n:
            raise PolynomialError("one image per variable is required")
        target = images[0].ring if images else self.ring
        cache: list[dict] = [{0: target.one, 1: img} for img in images]

        def power(i, k):
            c = cache[i]
            if k not in c:
                c[k] = images[i] ** k
            return c[k]

        field = target.field
        add, zero = field.add, field.zero
        out: dict = {}
        for k, v in self.terms.items():
            term = target.const(v)
            for i, ki in enumerate(k):
                if ki:
                    term = term * power(i, ki)
            for kk, vv in term.terms.items():
                out[kk] = add(out.get(kk, zero), vv)
        return FracPolynomial.build(target, out, 0)

    def derivative(self, i: int) -> "FracPolynomial":
        if self.level:
            raise PolynomialError("derivatives are only defined at level 0")
        field = self.field
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                c = field.mul(field.from_int(k[i]), v)
                if not field.is_zero(c):
                    nk = list(k)
                    nk[i] -= 1
                    out[tuple(nk)] = c
        return FracPolynomial(self.ring, out, 0)

    # -- division ------------------------------------------------------

    def leading(self, key=_term_key):
        """Leading ``(exps, raw_coeff)`` for an order given by ``key`` (largest wins)."""
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading term")
        k = max(self.terms, key=key)
        return k, self.terms[k]

    def divmod(self, g: "FracPolynomial") -> tuple["FracPolynomial", "FracPolynomial"]:
        """Multivariate division by one polynomial in graded-lex order (level 0)."""
        if self.level or g.level:
            raise PolynomialError("division is only defined at level 0")
        if not g.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        field = self.field
        lg, cg = g.leading()
        inv = field.inv(cg)
        rem = dict(self.terms)
        quo: dict = {}
        out_rem: dict = {}
        while rem:
            k = max(rem, key=_term_key)
            c = rem[k]
            if all(a >= b for a, b in zip(k, lg)):
                shift = tuple(a - b for a, b in zip(k, lg))
                qc = field.mul(c, inv)
                quo[shift] = qc
                for kg, vg in g.terms.items():
                    key = tuple(a + b for a, b in zip(kg, shift))
                    nv = field.sub(rem.get(key, field.zero), field.mul(qc, vg))
                    if field.is_zero(nv):
                        rem.pop(key, None)
                    else:
                        rem[key] = nv
            else:
                out_rem[k] = c
                del rem[k]
        return FracPolynomial(self.ring, quo, 0), FracPolynomial(self.ring, out_rem, 0)

    def exact_div(self, g: "FracPolynomial") -> "FracPolynomial":
        q, r = self.divmod(g)
        if r:
            raise PolynomialError("division is not exact")
        return q

    # -- output ----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        field, ring = self.field, self.ring
        q = ring.p ** self.level
        parts = []
        for k in sorted(self.terms, key=_term_key, reverse=True):
            factors = []
            for name, x in zip(ring.names, k):
                if not x:
                    continue
                ex = Fraction(x, q)
                if ex == 1:
                    factors.append(name)
                elif ex.denominator == 1:
                    factors.append(f"{name}^{ex.numerator}")
                else:
                    factors.append(f"{name}^({ex.numerator}/{ex.denominator})")
            c = field.fmt(self.terms[k])
            if " " in c or "/" in c:
                c = f"({c})"
            if not factors:
                parts.append(c)
            elif c == "1":
                parts.append("*".join(factors))
            else:
                parts.append(c + "*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"FracPolynomial({self})"


# ---------------------------------------------------------------------------
# module-level operations

def poly_arith(f: FracPolynomial, g: FracPolynomial, op: str) -> FracPolynomial:
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown operation {op!r}")


def check_invertible(field: Field, matrix) -> None:
    from .linalg import rank
    if rank(field, [list(r) for r in matrix]) < len(matrix):
        raise PolynomialError("substitution matrix is singular")


def substitute(f: FracPolynomial, g, check: bool = True) -> FracPolynomial:
    """Apply the matrix ``g`` (raw values or FieldElements) to ``f``."""
    m = [[f.ring._raw(c) for c in row] for row in g]
    if check:
        check_invertible(f.field, m)
    return f.substitute(m)


def frobenius_root(f: FracPolynomial, e: int = 1) -> FracPolynomial:
    return f.frobenius_root(e)


def determinant(entries: Sequence[Sequence[FracPolynomial]]) -> FracPolynomial:
    """Determinant of a square matrix of polynomials.

    Cofactor expansion up to size 4, fraction-free Bareiss elimination above.
    """
    m = len(entries)
    if any(len(row) != m for row in entries):
        raise PolynomialError("determinant needs a square matrix")
    if m == 0:
        raise PolynomialError("empty matrix")
    if m <= 4:
        return _cofactor(entries)
    return _bareiss(entries)


def _cofactor(a) -> FracPolynomial:
    m = len(a)
    if m == 1:
        return a[0][0]
    if m == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = a[0][0].ring.zero
    for j in range(m):
        if not a[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * _cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _bareiss(entries) -> FracPolynomial:
    a = [list(row) for row in entries]
    m = len(a)
    ring = a[0][0].ring
    sign = 1
    prev = ring.one
    for k in range(m - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, m) if a[i][k]), None)
            if swap is None:
                return ring.zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    det = a[m - 1][m - 1]
    return det if sign == 1 else -det


def moore_matrix(rows: Sequence[FracPolynomial], m: int | None = None) -> list:
    """``m x m`` matrix with ``(i, j)`` entry ``rows[j]^(p^i)``."""
    m = len(rows) if m is None else m
    if len(rows) != m:
        raise PolynomialError("a Moore matrix needs exactly m polynomials")
    if any(f.level for f in rows):
        raise PolynomialError("Moore determinants take level-0 inputs")
    return [[f.frobenius_power(i) for f in rows] for i in range(m)]


def moore_determinant(rows: Sequence[FracPolynomial], m: int | None = None) -> FracPolynomial:
    return determinant(moore_matrix(rows, m))


def compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total`` (lex descending)."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def graded_piece(n: int, p: int, e: int, d) -> list[FracMonomial]:
    """Monomial basis of the degree-``d`` piece of ``S^(1/p^e)`` in ``n`` variables."""
    q = p ** e
    d = Fraction(d)
    if d < 0:
        return []
    scaled = d * q
    if scaled.denominator != 1:
        raise PolynomialError(f"degree {d} is not in (1/{q})Z")
    return [FracMonomial.make(c, e, p) for c in compositions(int(scaled), n)]


def poly_divide_split(f: FracPolynomial, i: int = 0, j: int = 1):
    """Greedy split ``f = A*x_i^p + B*x_j^p + R`` with no term of ``R`` divisible by either.

    Terms divisible by ``x_i^p`` go to ``A`` first.
    """
    if f.level:
        raise PolynomialError("poly_divide_split needs a level-0 polynomial")
    p = f.ring.p
    a, b, r = {}, {}, {}
    for k, v in f.terms.items():
        if k[i] >= p:
            nk = list(k)
            nk[i] -= p
            a[tuple(nk)] = v
        elif k[j] >= p:
            nk = list(k)
            nk[j] -= p
            b[tuple(nk)] = v
        else:
            r[k] = v
    ring = f.ring
    return FracPolynomial(ring, a, 0), FracPolynomial(ring, b, 0), FracPolynomial(ring, r, 0)


def linear_form(ring: PolyRing, coeffs) -> FracPolynomial:
    return FracPolynomial.build(ring, {
        tuple(1 if k == i else 0 for k in range(ring.n)): ring._raw(c)
        for i, c in enumerate(coeffs)
    }, 0)


def product(polys: Iterable[FracPolynomial], ring: PolyRing) -> FracPolynomial:
    out = ring.one
    for f in polys:
        out = out * f
    return out


def all_exponents(n: int, bound: int):
    """Exponent vectors in ``[0, bound)^n`` in lex order."""
    return itertools.product(range(bound), repeat=n)
