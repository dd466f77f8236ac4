import itertools
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from frobsplit.fields import GF, perfect_closure
from frobsplit.polyring import (FracMonomial, PolyRing, PolynomialError, compositions,
                                graded_piece, moore_determinant, poly_divide_split, product,
                                substitute)
from frobsplit.parsing import ParseError, parse_polynomial

X = sympy.symbols("x1:5")


def _random_poly(ring, rng, terms=5, degree=4):
    out = ring.zero
    for _ in range(terms):
        exps = tuple(rng.randrange(degree + 1) for _ in range(ring.n))
        out = out + ring.monomial(exps, coeff=rng.randrange(ring.p))
    return out


def _to_sympy(f, p):
    expr = 0
    for exps, c in f.terms.items():
        term = int(c)
        for v, k in zip(X, exps):
            term *= v ** k
        expr += term
    return sympy.Poly(expr, *X[:f.ring.n], modulus=p)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_multiplication_matches_sympy(p):
    rng = random.Random(p)
    R = PolyRing(GF(p), 3)
    for _ in range(20):
        f, g = _random_poly(R, rng), _random_poly(R, rng)
        assert _to_sympy(f * g, p) == _to_sympy(f, p) * _to_sympy(g, p)
        assert _to_sympy(f ** 3, p) == _to_sympy(f, p) ** 3


def test_small_examples():
    R = PolyRing(GF(2), 2)
    x1, x2 = R.gens
    assert str((x1 + x2) ** 2) == "x1^2 + x2^2"
    assert str(moore_determinant([x1, x2])) == "x1^2*x2 + x1*x2^2"
    K = perfect_closure(3)
    S = PolyRing(K, 1)
    y = S.gens[0]
    assert str((S.const(K.element(K.t)) * y ** 3).frobenius_root()) == "(t^(1/3))*x1"


def test_fractional_exponents_combine():
    R = PolyRing(GF(3), 2)
    a = R.monomial((1, 0), level=1)
    b = R.monomial((2, 0), level=1)
    assert a * b == R.gens[0]
    assert (a * b).level == 0
    assert (R.gens[0] + R.gens[1]) ** 3 == (R.gens[0] ** 3 + R.gens[1] ** 3)
    assert ((R.gens[0] + R.gens[1]) ** 3).frobenius_root() == R.gens[0] + R.gens[1]


def test_frac_monomial_levels():
    m = FracMonomial.make((3, 6), 1, 3)
    assert m.level == 0 and m.exps == (1, 2)
    assert FracMonomial.make((1, 0), 2, 2).degree == sympy.Rational(1, 4)


def test_graded_piece_counts():
    assert len(graded_piece(3, 3, 1, 1)) == len([c for c in itertools.product(range(4), repeat=3)
                                                if sum(c) == 3])
    assert len(list(compositions(4, 3))) == 15


@pytest.mark.parametrize("p", [2, 3, 5])
def test_moore_quotient_is_orbit_product(p):
    R = PolyRing(GF(p), 3)
    x1, x2, x3 = R.gens
    F = R.field
    forms = [x3 + x1.scale(F(a)) + x2.scale(F(b)) for a in range(p) for b in range(p)]
    assert moore_determinant([x1, x2, x3]).exact_div(moore_determinant([x1, x2])) == product(forms, R)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_divide_split_reconstructs(p):
    R = PolyRing(GF(p), 2)
    x1, x2 = R.gens
    w = x1 * x2 ** p - x1 ** p * x2
    A, B, rem = poly_divide_split(w ** (p - 1), 0, 1)
    assert rem.is_zero()
    assert A * x1 ** p + B * x2 ** p == w ** (p - 1)
    f = x1 ** 2 + x2 ** 2 + x1 * x2
    A, B, rem = poly_divide_split(f, 0, 1)
    assert A * x1 ** p + B * x2 ** p + rem == f


def test_divmod_and_exact_div():
    R = PolyRing(GF(5), 2)
    x1, x2 = R.gens
    f = (x1 + 2 * x2) * (x1 ** 2 - x2)
    assert f.exact_div(x1 + 2 * x2) == x1 ** 2 - x2
    with pytest.raises(PolynomialError):
        (x1 ** 2 + 1).exact_div(x1 + x2)


def test_substitution_level_one():
    R = PolyRing(GF(3), 2)
    f = R.monomial((1, 0), level=1)  # x1^(1/3)
    g = ((1, 1), (0, 1))  # x2 -> x1 + x2, x1 fixed
    assert substitute(f, g) == f
    h = R.monomial((0, 1), level=1)
    img = substitute(h, g)
    assert img == R.monomial((1, 0), level=1) + h


def test_singular_substitution_rejected():
    R = PolyRing(GF(2), 2)
    with pytest.raises(Exception):
        substitute(R.gens[0], ((1, 1), (1, 1)))


def test_parse_polynomial_errors():
    R = PolyRing(GF(3), ["x", "y"])
    assert parse_polynomial("x^2 - y", R) == R["x"] ** 2 - R["y"]
    with pytest.raises(ParseError) as err:
        parse_polynomial("x + (y", R)
    assert err.value.line == 1
    with pytest.raises(ParseError):
        parse_polynomial("x / y", R)


def test_weighted_homogeneity():
    R = PolyRing(GF(2), ["x1", "x2", "t"], [1, 1, 3])
    x1, x2, t = R.gens
    assert (t + x1 ** 3).is_homogeneous()
    assert not (t + x1 ** 2).is_homogeneous()
    assert (t * x2).degree() == 4


@st.composite
def poly_triples(draw):
    p = draw(st.sampled_from([2, 3, 5]))
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    R = PolyRing(GF(p), 3)
    f, g = _random_poly(R, rng, 4, 3), _random_poly(R, rng, 4, 3)
    while True:
        m = tuple(tuple(rng.randrange(p) for _ in range(3)) for _ in range(3))
        if sympy.Matrix(m).det() % p:
            return R, f, g, m


@settings(max_examples=60, deadline=None)
@given(poly_triples())
def test_substitution_is_multiplicative_and_additive(triple):
    R, f, g, m = triple
    assert substitute(f * g, m) == substitute(f, m) * substitute(g, m)
    assert substitute(f + g, m) == substitute(f, m) + substitute(g, m)


@settings(max_examples=60, deadline=None)
@given(poly_triples())
def test_frobenius_root_inverts_power(triple):
    R, f, g, m = triple
    for e in (1, 2):
        assert f.frobenius_power(e).frobenius_root(e) == f
        assert f.frobenius_root(e).frobenius_power(e) == f
    # the root of a substituted polynomial is the twisted substitution of the root
    assert substitute(f, m).frobenius_root() == substitute(f.frobenius_root(), m)
