import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatcliff.core import AlgebraError, find_isomorphism
from flatcliff.groups import (check_group, closure, cyclic, dihedral, dihedral_tilde, direct_product,
                              from_table, heisenberg, heisenberg_abc, heisenberg_tilde, is_abelian,
                              lower_central_series, named_group, nilpotency_class, pair, quaternion,
                              subgroup_generated, trivial)

import oracles

ALL = ["E", "C2", "C3", "C4", "C6", "C9", "D6", "D8", "D10", "Q8", "H3", "C2xC2", "C3xC9",
       "Htilde3", "Dtilde6", "Dtilde10", "D6xC12"]


@pytest.mark.parametrize("name", ALL)
def test_constructors_pass_group_axioms(name):
    G = named_group(name)
    assert check_group(G).passed
    assert len(closure(G, G.generating_set())) == G.size


def test_orders_and_exponents():
    H = heisenberg(3)
    assert H.size == 27 and H.exponent() == 3
    Q = quaternion()
    assert Q.size == 8 and Q.exponent() == 4
    assert cyclic(9).exponent() == 9
    assert dihedral(3).size == 6
    for m in range(1, 13):
        assert cyclic(m).exponent() == m


@given(st.integers(1, 12), st.integers(1, 12))
@settings(max_examples=30, deadline=None)
def test_exponent_of_product_is_lcm(a, b):
    P = direct_product(cyclic(a), cyclic(b))
    assert P.exponent() == math.lcm(a, b)


def test_exponent_of_product_is_p_squared():
    P = named_group("H3xC9")
    assert P.size == 243
    assert P.exponent() == 9


def test_heisenberg_relations():
    for p in (3, 5):
        H = heisenberg(p)
        a, b, c = heisenberg_abc(p)
        assert H.mul(a, b) == H.mul(H.mul(b, a), c)
        assert H.mul(a, c) == H.mul(c, a)
        assert H.mul(b, c) == H.mul(c, b)


def test_heisenberg_matches_matrix_product():
    p = 3
    elems, mul = oracles.heisenberg_triples(p)
    H = heisenberg(p)
    idx = {t: t[0] * p * p + t[1] * p + t[2] for t in elems}
    for s in elems:
        for t in elems:
            assert H.mul(idx[s], idx[t]) == idx[mul(s, t)]


def test_heisenberg_rejects_even_prime():
    with pytest.raises(AlgebraError):
        heisenberg(2)


def test_nilpotency_witnesses():
    for G in (heisenberg(3), quaternion()):
        assert not is_abelian(G)
        assert nilpotency_class(G) == 2
    for m in range(2, 10):
        assert is_abelian(cyclic(m)) and nilpotency_class(cyclic(m)) == 1
    assert nilpotency_class(dihedral(3)) is None
    assert len(lower_central_series(dihedral(3))[-1]) == 3


def test_heisenberg_tilde_order_from_independent_closure():
    p = 3
    elems, hmul = oracles.heisenberg_triples(p)

    def mul(s, t):
        return (hmul(s[0], t[0]), (s[1] + t[1]) % (p * p))

    gens = [((1, 0, 0), 1), ((0, 1, 0), 0)]
    sub = oracles.closure_of(gens, mul, ((0, 0, 0), 0))
    assert len(sub) == 81
    G = heisenberg_tilde(p)
    assert G.size == 81
    assert G.exponent() == 9
    assert not is_abelian(G)


def test_dihedral_tilde_order_from_permutations():
    rot, ref = (1, 2, 0), (0, 2, 1)

    def compose(f, g):
        return tuple(f[g[i]] for i in range(3))

    def mul(s, t):
        return (compose(s[0], t[0]), (s[1] + t[1]) % 12)

    sub = oracles.closure_of([(rot, 0), (ref, 3)], mul, ((0, 1, 2), 0))
    assert len(sub) == 12
    G = dihedral_tilde(3)
    assert G.size == 12 and G.exponent() == 12


def test_dihedral_matches_permutation_group():
    D = dihedral(4)
    # rotation and reflection of a square as permutations of its corners
    rot, ref = (1, 2, 3, 0), (0, 3, 2, 1)
    perms = sorted(oracles.closure_of([rot, ref], lambda f, g: tuple(f[g[i]] for i in range(4)),
                                      (0, 1, 2, 3)))
    assert len(perms) == 8
    pos = {q: i for i, q in enumerate(perms)}
    table = [[pos[tuple(f[g[i]] for i in range(4))] for g in perms] for f in perms]
    assert find_isomorphism(D, from_table(table)) is not None


def test_subgroup_generated():
    P = direct_product(heisenberg(3), cyclic(9))
    a, b, _ = heisenberg_abc(3)
    S, incl = subgroup_generated(P, [pair(heisenberg(3), cyclic(9), a, 1),
                                     pair(heisenberg(3), cyclic(9), b, 0)])
    assert S.size == 81
    assert find_isomorphism(S, heisenberg_tilde(3)) is not None
    T, incl = subgroup_generated(P, [P.identity])
    assert T.size == 1 and incl == [P.identity]


@pytest.mark.parametrize("name", ["Q8", "D8", "C2xC2", "Dtilde6"])
def test_regenerating_from_all_elements_is_isomorphic(name):
    G = named_group(name)
    S, incl = subgroup_generated(G, list(range(G.size)))
    assert incl == list(range(G.size))
    assert find_isomorphism(G, S) is not None


def test_named_group_errors_and_trivial():
    assert named_group("E").size == 1 == trivial().size
    with pytest.raises(AlgebraError):
        named_group("Z5")


def test_check_group_rejects_non_group():
    M = np.array([[0, 0], [0, 1]])
    with pytest.raises(AlgebraError):
        from_table(M)
