"""Exact coefficient fields: F_p, F_{p^n} and the perfection of F_p(t).

Every field works on canonical *raw* values (ints or nested tuples) so that
polynomial and matrix code can do arithmetic without wrapping each
coefficient.  :class:`FieldElement` is the user-facing wrapper.

Raw representations:

* ``PrimeField``: an int in ``range(p)``.
* ``ExtensionField``: a tuple of ``n`` ints, coordinates in the power basis
  of a fixed generator ``w`` (root of a Conway polynomial).
* ``PerfectClosure``: a triple ``(num, den, e)`` where ``num``/``den`` are
  sparse univariate polynomials over F_p in a symbol ``s`` (tuples of
  ``(exponent, coeff)`` pairs, ascending) and the value is ``num/den``
  evaluated at ``s = t^(1/p^e)``.  The fraction is reduced, ``den`` is monic
  and ``e`` is minimal, so equal values have equal raws.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    """Raised for mixed fields or malformed field data."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


# Conway polynomials, coefficients listed from the constant term up.
CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}


@dataclass(frozen=True)
class FieldSpec:
    """Which coefficient field: ``GF(p)``, ``GF(p^n)`` or perfection of ``GF(p)(t)``."""

    p: int
    n: int = 1
    transcendental: bool = False

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"characteristic {self.p} is not prime")
        if self.n < 1:
            raise FieldError("extension degree must be >= 1")
        if self.transcendental and self.n != 1:
            raise FieldError("the perfection of F_p(t) is only supported over the prime field")

    def __str__(self):
        if self.transcendental:
            return f"GF({self.p})(t)"
        if self.n == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.n})"


# ---------------------------------------------------------------------------
# sparse univariate polynomials over F_p (used by the perfection)

def _from_dict(d: dict, p: int) -> tuple:
    return tuple(sorted((k, v % p) for k, v in d.items() if v % p))


def _uadd(a: tuple, b: tuple, p: int, sign: int = 1) -> tuple:
    d = dict(a)
    for k, v in b:
        d[k] = (d.get(k, 0) + sign * v) % p
    return tuple(sorted((k, v) for k, v in d.items() if v))


def _umul(a: tuple, b: tuple, p: int) -> tuple:
    if not a or not b:
        return ()
    if len(a) == 1 and len(b) == 1:
        (ka, va), (kb, vb) = a[0], b[0]
        return ((ka + kb, va * vb % p),)
    d: dict = {}
    for ka, va in a:
        for kb, vb in b:
            d[ka + kb] = d.get(ka + kb, 0) + va * vb
    return _from_dict(d, p)


def _uscale(a: tuple, c: int, p: int) -> tuple:
    c %= p
    if not c:
        return ()
    return tuple((k, v * c % p) for k, v in a)


def _udivmod(a: tuple, b: tuple, p: int) -> tuple[tuple, tuple]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    db, lb = b[-1]
    inv_lb = pow(lb, p - 2, p)
    rem = dict(a)
    quo: dict = {}
    while rem:
        dr = max(rem)
        if dr < db:
            break
        c = rem[dr] * inv_lb % p
        shift = dr - db
        quo[shift] = c
        for k, v in b:
            key = k + shift
            nv = (rem.get(key, 0) - c * v) % p
            if nv:
                rem[key] = nv
            else:
                rem.pop(key, None)
    return _from_dict(quo, p), _from_dict(rem, p)


def _umonic(a: tuple, p: int) -> tuple:
    lc = a[-1][1]
    if lc == 1:
        return a
    return _uscale(a, pow(lc, p - 2, p), p)


def _ugcd(a: tuple, b: tuple, p: int) -> tuple:
    # monomial shortcut: gcd(s^k, f) = s^min(k, ord_s f)
    if len(a) == 1 or len(b) == 1:
        mono, other = (a, b) if len(a) == 1 else (b, a)
        if not other:
            return ((mono[0][0], 1),)
        return ((min(mono[0][0], other[0][0]), 1),)
    while b:
        a, b = b, _udivmod(a, b, p)[1]
    return _umonic(a, p) if a else a


_ONE_U = ((0, 1),)


# ---------------------------------------------------------------------------
# fields

class Field:
    """Common interface.  Subclasses implement arithmetic on raw values."""

    spec: FieldSpec

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def is_prime_field(self) -> bool:
        return not self.spec.transcendental and self.spec.n == 1

    def __eq__(self, other):
        return isinstance(other, Field) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec}>"

    def __str__(self):
        return str(self.spec)

    # generic helpers built on the primitive operations

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def power(self, a, k: int):
        if k < 0:
            a, k = self.inv(a), -k
        result = self.one
        while k:
            if k & 1:
                result = self.mul(result, a)
            k >>= 1
            if k:
                a = self.mul(a, a)
        return result

    def root(self, a, e: int = 1):
        """The unique ``p^e``-th root of ``a``."""
        for _ in range(e):
            a = self.pth_root(a)
        return a

    def frob(self, a, e: int = 1):
        """``a^(p^e)``."""
        for _ in range(e):
            a = self.pth_power(a)
        return a

    def key(self, a):
        """A sort key giving a deterministic total order on raw values."""
        return a

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError(f"element of {value.field} given where {self} expected")
            return value
        if isinstance(value, int):
            return FieldElement(self, self.from_int(value))
        if isinstance(value, str):
            from .parsing import parse_element
            return parse_element(value, self)
        raise FieldError(f"cannot coerce {value!r} into {self}")

    def element(self, raw) -> "FieldElement":
        return FieldElement(self, raw)

    def random(self, rng):
        raise NotImplementedError


class PrimeField(Field):
    def __init__(self, p: int):
        self.spec = FieldSpec(p)
        self.zero = 0
        self.one = 1

    def from_int(self, k: int) -> int:
        return k % self.spec.p

    def add(self, a, b):
        return (a + b) % self.spec.p

    def sub(self, a, b):
        return (a - b) % self.spec.p

    def neg(self, a):
        return -a % self.spec.p

    def mul(self, a, b):
        return a * b % self.spec.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero in " + str(self))
        return pow(a, self.spec.p - 2, self.spec.p)

    def pth_root(self, a):
        return a

    def pth_power(self, a):
        return a

    def root(self, a, e=1):
        return a

    def frob(self, a, e=1):
        return a

    def fmt(self, a) -> str:
        return str(a)

    def elements(self):
        return list(range(self.spec.p))

    def random(self, rng):
        return rng.randrange(self.spec.p)


def _irreducible_modulus(p: int, n: int) -> tuple:
    """First monic irreducible of degree n in lex order of coefficients."""
    for tail in itertools.product(range(p), repeat=n):
        if tail[0] == 0:
            continue
        cand = tuple(enumerate(tail + (1,)))
        cand = tuple((k, v) for k, v in cand if v)
        if all(_udivmod(cand, tuple((k, v) for k, v in enumerate(f + (1,)) if v), p)[1]
               for d in range(1, n // 2 + 1)
               for f in itertools.product(range(p), repeat=d)):
            return tail + (1,)
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")


class ExtensionField(Field):
    """``F_p[w]/(m(w))`` with ``m`` a Conway polynomial when one is tabulated."""

    def __init__(self, p: int, n: int):
        self.spec = FieldSpec(p, n)
        self.modulus = CONWAY.get((p, n)) or _irreducible_modulus(p, n)
        self.zero = (0,) * n
        self.one = (1,) + (0,) * (n - 1)
        self.order = p ** n

    def from_int(self, k):
        return (k % self.spec.p,) + (0,) * (self.spec.n - 1)

    @property
    def generator(self):
        """The raw value of ``w``."""
        n = self.spec.n
        if n == 1:
            return self.from_int(-self.modulus[0])
        return (0, 1) + (0,) * (n - 2)

    def add(self, a, b):
        p = self.spec.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.spec.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.spec.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p, n = self.spec.p, self.spec.n
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        m = self.modulus
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k] % p
            if c:
                for i in range(n):
                    prod[k - n + i] -= c * m[i]
        return tuple(c % p for c in prod[:n])

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("division by zero in " + str(self))
        return self.power(a, self.order - 2)

    def pth_power(self, a):
        return self.power(a, self.spec.p)

    def pth_root(self, a):
        return self.power(a, self.spec.p ** (self.spec.n - 1))

    def fmt(self, a) -> str:
        terms = []
        for k in range(len(a) - 1, -1, -1):
            c = a[k]
            if not c:
                continue
            mono = "" if k == 0 else ("w" if k == 1 else f"w^{k}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"

    def elements(self):
        return [tuple(c) for c in itertools.product(range(self.spec.p), repeat=self.spec.n)]

    def random(self, rng):
        return tuple(rng.randrange(self.spec.p) for _ in range(self.spec.n))

    def multiplicative_order(self, a) -> int:
        k, x = 1, a
        while x != self.one:
            x = self.mul(x, a)
            k += 1
        return k

    def primitive_element(self):
        for a in self.elements():
            if a != self.zero and self.multiplicative_order(a) == self.order - 1:
                return a
        raise FieldError("no primitive element found")  # unreachable for a field


class PerfectClosure(Field):
    """The perfection ``F_p(t)^(1/p^inf)``: all ``p^e``-th roots of rational functions in t."""

    def __init__(self, p: int):
        self.spec = FieldSpec(p, 1, True)
        self.zero = ((), _ONE_U, 0)
        self.one = (_ONE_U, _ONE_U, 0)

    @property
    def t(self):
        return (((1, 1),), _ONE_U, 0)

    def from_int(self, k):
        k %= self.spec.p
        if not k:
            return self.zero
        return (((0, k),), _ONE_U, 0)

    def monomial(self, exponent: Fraction | int, coeff: int = 1):
        """Raw value of ``coeff * t^exponent``; exponent must have a p-power denominator."""
        exponent = Fraction(exponent)
        p = self.spec.p
        den, e = exponent.denominator, 0
        while den % p == 0:
            den //= p
            e += 1
        if den != 1:
            raise FieldError(f"exponent {exponent} does not have a power-of-{p} denominator")
        if exponent < 0:
            return self.inv(self.monomial(-exponent, coeff))
        coeff %= p
        if not coeff:
            return self.zero
        return self._normalize(((exponent.numerator * 1, coeff),), _ONE_U, e)

    def _normalize(self, num: tuple, den: tuple, e: int):
        p = self.spec.p
        if not num:
            return self.zero
        if den != _ONE_U:
            g = _ugcd(num, den, p)
            if g != _ONE_U:
                num = _udivmod(num, g, p)[0]
                den = _udivmod(den, g, p)[0]
            lc = den[-1][1]
            if lc != 1:
                inv = pow(lc, p - 2, p)
                num = _uscale(num, inv, p)
                den = _uscale(den, inv, p)
        while e > 0 and all(k % p == 0 for k, _ in num) and all(k % p == 0 for k, _ in den):
            num = tuple((k // p, v) for k, v in num)
            den = tuple((k // p, v) for k, v in den)
            e -= 1
        return (num, den, e)

    def _lift(self, a, level: int):
        num, den, e = a
        if e == level:
            return num, den
        f = self.spec.p ** (level - e)
        return tuple((k * f, v) for k, v in num), tuple((k * f, v) for k, v in den)

    def add(self, a, b):
        if not a[0]:
            return b
        if not b[0]:
            return a
        p = self.spec.p
        level = max(a[2], b[2])
        an, ad = self._lift(a, level)
        bn, bd = self._lift(b, level)
        if ad == bd:
            return self._normalize(_uadd(an, bn, p), ad, level)
        num = _uadd(_umul(an, bd, p), _umul(bn, ad, p), p)
        return self._normalize(num, _umul(ad, bd, p), level)

    def neg(self, a):
        p = self.spec.p
        return (tuple((k, -v % p) for k, v in a[0]), a[1], a[2])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not a[0] or not b[0]:
            return self.zero
        p = self.spec.p
        level = max(a[2], b[2])
        an, ad = self._lift(a, level)
        bn, bd = self._lift(b, level)
        return self._normalize(_umul(an, bn, p), _umul(ad, bd, p), level)

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("division by zero in " + str(self))
        return self._normalize(a[1], a[0], a[2])

    def pth_root(self, a):
        # coefficients lie in F_p, so r(t^(1/p^(e+1)))^p = r(t^(1/p^e))
        if not a[0]:
            return a
        return self._normalize(a[0], a[1], a[2] + 1)

    def pth_power(self, a):
        num, den, e = a
        if not num:
            return a
        if e > 0:
            return (num, den, e - 1)
        p = self.spec.p
        return (tuple((k * p, v) for k, v in num), tuple((k * p, v) for k, v in den), 0)

    def key(self, a):
        return (a[2], a[1], a[0])

    def level(self, a) -> int:
        return a[2]

    def fmt(self, a) -> str:
        num, den, e = a
        n = self._fmt_poly(num, e)
        if den == _ONE_U:
            return n
        d = self._fmt_poly(den, e)
        if len(num) > 1:
            n = f"({n})"
        if len(den) > 1 or "*" in d:
            d = f"({d})"
        return f"{n}/{d}"

    def _fmt_poly(self, u: tuple, e: int) -> str:
        if not u:
            return "0"
        q = self.spec.p ** e
        terms = []
        for k, c in reversed(u):
            ex = Fraction(k, q)
            if ex == 0:
                mono = ""
            elif ex == 1:
                mono = "t"
            elif ex.denominator == 1:
                mono = f"t^{ex.numerator}"
            else:
                mono = f"t^({ex.numerator}/{ex.denominator})"
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms)

    def random(self, rng, max_degree: int = 3, max_level: int = 2):
        p = self.spec.p

        def upoly(allow_zero):
            while True:
                d = {k: rng.randrange(p) for k in range(rng.randint(0, max_degree) + 1)}
                u = _from_dict(d, p)
                if u or allow_zero:
                    return u

        num = upoly(True)
        if not num:
            return self.zero
        den = upoly(False)
        return self._normalize(num, den, rng.randint(0, max_level))


@functools.lru_cache(maxsize=None)
def make_field(spec: FieldSpec) -> Field:
    if spec.transcendental:
        return PerfectClosure(spec.p)
    if spec.n == 1:
        return PrimeField(spec.p)
    return ExtensionField(spec.p, spec.n)


def GF(p: int, n: int = 1) -> Field:
    return make_field(FieldSpec(p, n))


def perfect_closure(p: int) -> PerfectClosure:
    return make_field(FieldSpec(p, 1, True))


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    """An immutable element of one of the fields above."""

    field: Field
    raw: object

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return FieldElement(self.field, self.field.from_int(other))
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldError(f"mixed fields: {self.field} and {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.field.add(self.raw, other.raw))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.field.sub(self.raw, other.raw))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.raw))

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.field.mul(self.raw, other.raw))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.field.div(self.raw, other.raw))

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, k: int):
        return FieldElement(self.field, self.field.power(self.raw, k))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.raw == self.field.from_int(other)
        if isinstance(other, FieldElement):
            return self.field == other.field and self.raw == other.raw
        return NotImplemented

    def __hash__(self):
        return hash((self.field.spec, self.raw))

    def __bool__(self):
        return not self.field.is_zero(self.raw)

    def pth_root(self) -> "FieldElement":
        return FieldElement(self.field, self.field.pth_root(self.raw))

    def pth_power(self) -> "FieldElement":
        return FieldElement(self.field, self.field.pth_power(self.raw))

    def __str__(self):
        return self.field.fmt(self.raw)

    def __repr__(self):
        return f"FieldElement({self.field.spec}, {self})"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two elements of one field."""
    ops = {"add": FieldElement.__add__, "sub": FieldElement.__sub__,
           "mul": FieldElement.__mul__, "div": FieldElement.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    if not isinstance(b, FieldElement) or a.field != b.field:
        raise FieldError("operands must lie in the same field")
    return ops[op](a, b)


def pth_root(a: FieldElement) -> FieldElement:
    return a.pth_root()


def pth_power(a: FieldElement) -> FieldElement:
    return a.pth_power()
