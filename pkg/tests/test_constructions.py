import pytest

from flatcliff.congruences import Partition, is_congruence
from flatcliff.constructions import (clifford_decompose, clifford_inverse, closure, empty_signature_algebra,
                                     flat, flat_extension, idempotent_subalgebra, ideals, is_ideal,
                                     is_semifield, multiplicative_zero, nonzero_group,
                                     pointed_semidiscriminator, product, projections, quotient,
                                     subalgebra_generated, subgroups, verify_ideal_lemma)
from flatcliff.core import AlgebraError, check_ai_semiring, find_isomorphism, in_class, is_homomorphism
from flatcliff.groups import cyclic, named_group, quaternion, trivial


def test_flat_extension_of_c2():
    ext = flat_extension(cyclic(2))
    S = ext.result
    assert S.size == 3
    assert ext.embedding == (1, 2)
    assert check_ai_semiring(S).passed
    assert in_class(S, "M", 2)
    A, M = S["add"], S["mul"]
    for x in range(3):
        assert M[0, x] == M[x, 0] == 0
        for y in range(3):
            assert A[x, y] == (x if x == y else 0)


@pytest.mark.parametrize("name", ["C3", "C4", "Q8", "D6", "C2xC2", "H3"])
def test_flat_extension_is_ai_semiring(name):
    assert check_ai_semiring(flat(named_group(name))).passed


def test_flat_of_trivial_group():
    S = flat(trivial())
    assert S.size == 2
    assert (S["add"] == S["mul"]).all()
    assert in_class(S, "M", 1)


def test_pointed_semidiscriminator_c2():
    P = pointed_semidiscriminator(cyclic(2))
    assert P.size == 3
    meet, rhd = P["meet"], P["rhd"]
    inf, e, a = 0, 1, 2
    assert rhd[meet[a, a], e] == e
    assert rhd[meet[a, e], e] == inf
    for x in range(3):
        for y in range(3):
            for z in range(3):
                expected = z if x == y != inf else inf
                assert rhd[meet[x, y], z] == expected


def test_pointed_semidiscriminator_of_empty_signature():
    P = pointed_semidiscriminator(empty_signature_algebra(1))
    assert P.size == 2
    assert P["meet"].tolist() == [[0, 0], [0, 1]]


def test_pointed_semidiscriminator_name_clash():
    with pytest.raises(AlgebraError, match="name clash"):
        pointed_semidiscriminator(pointed_semidiscriminator(cyclic(2)))


def test_product_and_projections_are_homomorphisms():
    S, T = flat(cyclic(2)), flat(cyclic(3))
    P = product(S, T)
    assert P.size == 12
    p1, p2 = projections(S, T)
    assert is_homomorphism(P, S, p1) and is_homomorphism(P, T, p2)


def test_quotient_by_universal_is_trivial():
    S = flat(cyclic(3))
    Q, proj = quotient(S, Partition.universal(S.size))
    assert Q.size == 1 and set(proj) == {0}
    with pytest.raises(AlgebraError):
        quotient(S, Partition([0, 0, 1, 1]))


def test_quotient_projection_is_homomorphism():
    S = product(flat(cyclic(2)), flat(cyclic(2)))
    p1, _ = projections(flat(cyclic(2)), flat(cyclic(2)))
    theta = Partition(p1)
    assert is_congruence(S, theta)
    Q, proj = quotient(S, theta)
    assert Q.size == 3
    assert is_homomorphism(S, Q, proj)
    assert find_isomorphism(Q, flat(cyclic(2))) is not None


def test_subalgebra_generated_by_one_element_of_c3_flat():
    S = flat(cyclic(3))
    sub, elems = subalgebra_generated(S, [2])
    assert elems == [0, 1, 2, 3]
    assert sub == S
    assert closure(S, [1]) == [1]


def test_clifford_decomposition_examples():
    D = clifford_decompose(flat(cyclic(2)), 2)
    assert D.semilattice == (0, 1)
    assert D.components == {0: (0,), 1: (1, 2)}
    G = named_group("Q8")
    D = clifford_decompose(G, 4)
    assert D.components == {G.identity: tuple(range(8))}
    P = product(flat(cyclic(2)), flat(cyclic(2)))
    D = clifford_decompose(P, 2)
    assert len(D.semilattice) == 4
    assert sorted(len(c) for c in D.components.values()) == [1, 2, 2, 4]


def test_clifford_inverse():
    S = flat(cyclic(6))
    inv = clifford_inverse(S, 6)
    M = S["mul"]
    for s in range(S.size):
        assert M[M[s, inv[s]], s] == s
    with pytest.raises(AlgebraError):
        clifford_inverse(flat(cyclic(3)), 1)


def test_semifield_recognition():
    S = flat(quaternion())
    assert multiplicative_zero(S) == 0
    G, rest = nonzero_group(S)
    assert G.size == 8 and rest == list(range(1, 9))
    assert is_semifield(S)
    assert not is_semifield(product(flat(cyclic(2)), flat(cyclic(2))))


def test_idempotent_subalgebra():
    E, elems = idempotent_subalgebra(flat(cyclic(4)))
    assert elems == [0, 1]
    assert E.size == 2


def test_ideal_lemma_examples():
    S = flat(cyclic(3))
    assert verify_ideal_lemma(S, [0], [1, 2, 3], 3).passed
    S2 = flat(cyclic(2))
    # {0, e} is not an ideal since e*a = a, so the lemma does not apply,
    # although its conclusion 0 + e = 0 holds
    rep = verify_ideal_lemma(S2, [0], [1], 2)
    assert rep.verdict == "inapplicable" and rep.detail == "J u H is not an ideal"
    assert S2["add"][0, 1] == 0
    assert verify_ideal_lemma(S2, [0], [1, 2], 2).passed
    assert verify_ideal_lemma(S2, [1], [0], 2).verdict == "inapplicable"


def test_ideal_lemma_over_all_preconditions_of_product():
    S = product(flat(cyclic(2)), flat(cyclic(2)))
    checked = 0
    for J in ideals(S):
        for H in subgroups(S):
            rep = verify_ideal_lemma(S, J, H, 2)
            assert rep.verdict in ("pass", "inapplicable")
            checked += rep.passed
    assert checked > 0


def test_ideals_and_subgroups_brute_force():
    S = flat(cyclic(2))
    assert set(ideals(S)) == {(0,), (0, 1, 2)}
    assert all(is_ideal(S, J) for J in ideals(S))
    assert set(subgroups(S)) == {(0,), (1,), (1, 2)}
