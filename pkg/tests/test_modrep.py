import random

import pytest
from hypothesis import given, settings, strategies as st

from frobsplit.fields import GF, perfect_closure
from frobsplit.groups import mat_mul, mat_power
from frobsplit.modrep import (MONOMIALS, ModuleError, annihilator, build_V, closed_form_check,
                              counterexample_group, direct_sum, distinct_witnesses,
                              expected_annihilator, ideal_normal_form, lowest_degree_component,
                              regular_module, socle_dim, twist_module)

K = perfect_closure(3)
t = K.element(K.t)


def _kills(M, row):
    """Evaluate ``sum c_ij a^i b^j`` on ``M`` directly from the matrices."""
    f = M.field
    acc = None
    for (i, j), c in zip(MONOMIALS, row):
        term = tuple(tuple(f.mul(c, x) for x in r) for r in M.action(i, j))
        acc = term if acc is None else tuple(
            tuple(f.add(x, y) for x, y in zip(r, s)) for r, s in zip(acc, term))
    return all(f.is_zero(x) for r in acc for x in r)


def test_basis_order():
    assert MONOMIALS[0] == (2, 2) and MONOMIALS[-1] == (0, 0)
    assert MONOMIALS.index((0, 1)) < MONOMIALS.index((1, 0))


def test_V_t_annihilator_and_socle():
    V = build_V(t)
    assert V.check_axioms()
    ann = annihilator(V)
    assert ann.dim == 6
    assert ann.rows == expected_annihilator(t).rows
    assert str(ann) == "(b - t*a)"
    assert all(_kills(V, r) for r in ann.rows)
    assert socle_dim(V) == 1


def test_regular_module():
    R = regular_module()
    assert R.check_axioms()
    assert annihilator(R).dim == 0
    assert str(annihilator(R)) == "(0)"
    assert socle_dim(R) == 1


def test_direct_sum():
    M = direct_sum(build_V(t), build_V(t.pth_root()))
    assert M.dim == 6 and M.check_axioms()
    assert socle_dim(M) == 2
    # the annihilator of a sum is the intersection
    ann = annihilator(M)
    assert ann.dim < 6
    assert all(_kills(build_V(t), r) and _kills(build_V(t.pth_root()), r) for r in ann.rows)


def test_ideal_normal_form_is_canonical():
    a_gen = {(0, 1): K.one, (1, 0): K.neg(K.t)}
    doubled = {k: K.mul(K.from_int(2), v) for k, v in a_gen.items()}
    assert ideal_normal_form(K, [a_gen]) == ideal_normal_form(K, [doubled])
    assert ideal_normal_form(K, [a_gen, {(1, 1): K.one, (2, 0): K.neg(K.t)}]) == ideal_normal_form(K, [a_gen])


def test_wrong_characteristic():
    with pytest.raises(ModuleError):
        build_V(1, GF(5))


def test_closed_form():
    rows = closed_form_check()
    assert len(rows) == 9 and all(r["ok"] for r in rows)
    ranks = {(r["i"], r["j"]): r["rank_minus_identity"] for r in rows}
    assert ranks[(0, 0)] == 0
    assert all(v == 2 for k, v in ranks.items() if k != (0, 0))


def test_lowest_degree_component_is_twist():
    for e in range(4):
        M = lowest_degree_component(e)
        T = twist_module(build_V(t), e)
        assert (M.sigma, M.tau) == (T.sigma, T.tau)
        assert M.tau[0][1] == K.root(K.t, e)
        assert K.power(M.tau[0][1], 3 ** e) == K.t


def test_witnesses_e0_to_4():
    rep = distinct_witnesses(4)
    assert rep.ok and rep.pairwise_distinct
    assert [w.to_dict()["annihilator"] for w in rep.witnesses] == [
        "(b - t*a)", "(b - (t^(1/3))*a)", "(b - (t^(1/9))*a)", "(b - (t^(1/27))*a)",
        "(b - (t^(1/81))*a)"]
    assert all(w.socle_dim == 1 for w in rep.witnesses)
    assert rep.smallness["small"]


@pytest.mark.parametrize("alpha", [0, 1, 2])
def test_prime_field_alpha_is_not_small(alpha):
    G = counterexample_group(alpha)
    rep = distinct_witnesses(1, alpha)
    assert not rep.pairwise_distinct
    assert not rep.smallness["small"]
    assert G.order in (3, 9)


alphas = st.integers(0, 2 ** 32).map(lambda s: K.random(random.Random(s), 3, 2))


@settings(max_examples=60, deadline=None)
@given(alphas, st.integers(0, 3))
def test_annihilator_of_V_alpha(alpha, e):
    V = build_V(K.element(alpha))
    assert V.check_axioms()
    assert annihilator(V).rows == expected_annihilator(K.element(alpha)).rows
    assert socle_dim(V) == 1
    # twisting by e is V at the 3^e-th root of alpha
    root = K.root(alpha, e)
    W = twist_module(V, e)
    assert (W.sigma, W.tau) == (build_V(K.element(root)).sigma, build_V(K.element(root)).tau)
    assert annihilator(W).rows == expected_annihilator(K.element(root)).rows


@settings(max_examples=40, deadline=None)
@given(alphas)
def test_group_relations_hold(alpha):
    V = build_V(K.element(alpha))
    s, u = V.sigma, V.tau
    assert mat_mul(K, s, u) == mat_mul(K, u, s)
    assert mat_power(K, s, 3) == mat_power(K, u, 3) == mat_power(K, s, 0)
