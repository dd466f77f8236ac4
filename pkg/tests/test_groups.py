import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from frobsplit.builtins import builtin_group
from frobsplit.fields import GF, perfect_closure
from frobsplit.groups import (CapExceeded, GroupError, MatrixGroup, Refusal, detect_monomial,
                              mat_mul, mat_root, pseudoreflection_and_smallness,
                              twist_representation)
from frobsplit.parsing import ParseError, parse_group_text

GROUP_FILE = """
# the counterexample group
field: GF(3)(t)
gen s: [[1,1,0],[0,1,1],[0,0,1]]
gen u: [[1,t,0],[0,1,t],[0,0,1]]
relators: s^3, u^3, s*u*s^-1*u^-1
order: 9
"""


def _brute_force_closure(F, gens):
    """Closure under multiplication, by repeated squaring of the element set."""
    elems = {g for g in gens}
    while True:
        new = {mat_mul(F, a, b) for a in elems for b in elems} | elems
        if new == elems:
            return elems
        elems = new


def test_counterexample_group_from_file():
    gf = parse_group_text(GROUP_FILE)
    G = MatrixGroup(gf.field, gf.generators, gf.names, gf.relators, gf.order)
    assert G.order == 9
    report = pseudoreflection_and_smallness(G)
    assert report.relators_hold and report.faithful and report.small
    assert report.pseudoreflections == []
    assert isinstance(detect_monomial(G), Refusal)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_unipotent_group_order(p):
    G = builtin_group(f"unipotent-{p}")
    assert G.order == p ** 3
    if p <= 3:
        assert len(_brute_force_closure(G.field, G.generators)) == p ** 3


def test_small_permutation_groups():
    A3 = builtin_group("a3")
    assert A3.order == 3
    ms = detect_monomial(A3)
    assert ms.is_permutation
    assert pseudoreflection_and_smallness(A3).small
    Z4 = builtin_group("z4-f2")
    assert Z4.order == 4
    # the transposition-free cyclic group of order 4: c^2 swaps two pairs, no reflections
    assert pseudoreflection_and_smallness(Z4).pseudoreflections == []


def test_reflection_is_detected():
    F = GF(3)
    G = MatrixGroup(F, [[[0, 1], [1, 0]]])
    rep = pseudoreflection_and_smallness(G)
    assert rep.pseudoreflections and not rep.small


def test_monomial_structure_reconstructs_elements():
    G = builtin_group("veronese-3")
    ms = detect_monomial(G)
    assert not ms.is_permutation
    for i, m in enumerate(G.elements):
        assert ms.reconstruct(i) == m


def test_cap_exceeded(monkeypatch):
    monkeypatch.setenv("FROBSPLIT_CAP", "5")
    with pytest.raises(CapExceeded):
        builtin_group("unipotent-2")
    with pytest.raises(CapExceeded):
        MatrixGroup(GF(2), [[[1, 1, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 1], [0, 1, 0], [0, 0, 1]],
                            [[1, 0, 0], [0, 1, 1], [0, 0, 1]]], cap=4)


def test_invalid_generators():
    with pytest.raises(GroupError):
        MatrixGroup(GF(2), [[[1, 1], [1, 1]]])
    with pytest.raises(ParseError) as err:
        parse_group_text("field: GF(3)\ngen s: [[1,1],[0]]\n")
    assert err.value.line == 2


def test_wrong_relator_means_not_faithful():
    gf = parse_group_text(GROUP_FILE.replace("s^3, ", "s^2, "))
    G = MatrixGroup(gf.field, gf.generators, gf.names, gf.relators, gf.order)
    assert not pseudoreflection_and_smallness(G).faithful


def test_twist_of_counterexample_group():
    K = perfect_closure(3)
    gf = parse_group_text(GROUP_FILE)
    G = MatrixGroup(gf.field, gf.generators, gf.names)
    T = twist_representation(G, 1)
    u = dict(zip(T.generator_names, T.generators))["u"]
    assert K.fmt(u[0][1]) == "t^(1/3)"


@st.composite
def matrix_groups(draw):
    kind = draw(st.sampled_from(["unipotent", "monomial"]))
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    if kind == "unipotent":
        K = perfect_closure(draw(st.sampled_from([2, 3])))
        gens = []
        for _ in range(2):
            a = K.random(rng, 2, 1)
            gens.append(((K.one, a, K.zero), (K.zero, K.one, K.zero), (K.zero, K.zero, K.one)))
        return MatrixGroup(K, gens)
    F = GF(2, draw(st.sampled_from([2, 3])))
    n = 2
    gens = []
    for _ in range(2):
        perm = rng.sample(range(n), n)
        m = [[F.zero] * n for _ in range(n)]
        for j, i in enumerate(perm):
            m[i][j] = F.random(rng)
            while m[i][j] == F.zero:
                m[i][j] = F.random(rng)
        gens.append(tuple(tuple(r) for r in m))
    return MatrixGroup(F, gens)


@settings(max_examples=30, deadline=None)
@given(matrix_groups(), st.integers(0, 2), st.integers(0, 2))
def test_twist_functoriality(G, e1, e2):
    once = twist_representation(twist_representation(G, e1), e2)
    direct = twist_representation(G, e1 + e2)
    assert once.elements == direct.elements
    # twisting is a group isomorphism: it preserves the multiplication table
    T = direct
    for i, j in itertools.islice(itertools.product(range(G.order), repeat=2), 40):
        assert T.index[mat_mul(G.field, T.elements[i], T.elements[j])] == G.mul(i, j)
    assert [mat_root(G.field, g, e1 + e2) for g in G.generators] == direct.generators
