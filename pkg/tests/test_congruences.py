import pytest
from hypothesis import given, settings, strategies as st

from flatcliff.congruences import (Partition, all_congruences, check_subdirect_decomposition,
                                   check_tau_extension, classify_si, congruence_count,
                                   is_congruence, is_simple, is_subdirectly_irreducible, monolith,
                                   principal_congruence, restriction_check, subdirect_decomposition,
                                   tau_extension)
from flatcliff.constructions import flat, idempotent_subalgebra, product, projections
from flatcliff.core import AlgebraError, SEMIRING, find_isomorphism, make_algebra
from flatcliff.enumerate import census
from flatcliff.groups import cyclic, named_group

import oracles


def c2c2():
    return product(flat(cyclic(2)), flat(cyclic(2)))


def duplicated_chain(k):
    T = [[min(i, j) for j in range(k)] for i in range(k)]
    return make_algebra(k, SEMIRING, {"add": T, "mul": T})


def tables(S):
    return [S[name] for name in S.signature.names()]


def test_partition_basics():
    p = Partition([5, 5, 2, 7])
    assert p.labels == (0, 0, 1, 2)
    assert p.blocks() == [[0, 1], [2], [3]]
    q = Partition.from_blocks(4, [[2, 3]])
    assert p.meet(q).is_diagonal()
    assert p.join(q).labels == (0, 0, 1, 1)
    assert Partition.diagonal(4) <= p <= Partition.universal(4)
    assert not q <= p


@given(st.lists(st.integers(0, 3), min_size=5, max_size=5),
       st.lists(st.integers(0, 3), min_size=5, max_size=5))
@settings(max_examples=60, deadline=None)
def test_partition_lattice_laws(a, b):
    p, q = Partition(a), Partition(b)
    m, j = p.meet(q), p.join(q)
    assert m <= p and m <= q and p <= j and q <= j
    assert p.meet(j) == p and p.join(m) == p


def test_principal_congruence_examples():
    S = flat(cyclic(2))
    assert principal_congruence(S, 2, 1).is_universal()
    assert principal_congruence(S, 2, 2).is_diagonal()
    P = c2c2()
    p1, _ = projections(flat(cyclic(2)), flat(cyclic(2)))
    # (a, e) and (e, e) differ only in the first coordinate; collapsing them
    # collapses the whole first factor, giving the kernel of the second projection
    a_e, e_e = 2 * 3 + 1, 1 * 3 + 1
    _, p2 = projections(flat(cyclic(2)), flat(cyclic(2)))
    assert principal_congruence(P, a_e, e_e) == Partition(p2)


@pytest.mark.parametrize("name", ["C2", "C3", "C4", "C2xC2"])
def test_all_congruences_match_brute_force_on_flats(name):
    S = flat(named_group(name))
    expected = {Partition(p) for p in oracles.congruences_brute(tables(S), S.size)}
    assert set(all_congruences(S).congruences) == expected


def test_all_congruences_match_brute_force_on_census():
    for S in census(4):
        expected = {Partition(p) for p in oracles.congruences_brute(tables(S), S.size)}
        lat = all_congruences(S)
        assert set(lat.congruences) == expected
        assert lat.congruences[0].is_diagonal() and lat.congruences[-1].is_universal()


def test_all_congruences_match_brute_force_on_product():
    S = c2c2()
    expected = {Partition(p) for p in oracles.congruences_brute(tables(S), S.size)}
    assert set(all_congruences(S).congruences) == expected


def test_lattice_tables_closed():
    lat = all_congruences(c2c2())
    n = len(lat)
    for i in range(n):
        for j in range(n):
            assert lat.congruences[lat.join_table[i, j]] == lat[i].join(lat[j])
            assert lat.congruences[lat.meet_table[i, j]] == lat[i].meet(lat[j])
            assert lat.leq[i, j] == (lat[i] <= lat[j])


def test_size_bound():
    S = flat(named_group("D6xC2"))
    with pytest.raises(AlgebraError, match="bound"):
        all_congruences(S)
    assert congruence_count(S, bound=20) == 2


def test_simplicity_examples():
    S = flat(cyclic(3))
    assert is_simple(S) and is_subdirectly_irreducible(S)
    assert congruence_count(S) == 2
    assert not is_subdirectly_irreducible(c2c2())
    assert monolith(c2c2()) is None
    D = duplicated_chain(2)
    assert is_subdirectly_irreducible(D)
    one = duplicated_chain(1)
    assert not is_simple(one) and not is_subdirectly_irreducible(one)


def test_monolith_is_least_nondiagonal():
    for S in census(3):
        m = monolith(S)
        nondiag = [c for c in all_congruences(S).congruences if not c.is_diagonal()]
        if m is None:
            assert not any(all(c <= d for d in nondiag) for c in nondiag)
        else:
            assert m in nondiag and all(m <= d for d in nondiag)


def test_restriction_check_on_sr2_census():
    for S in census(4, "Sr", 2):
        assert restriction_check(S, 2).passed
    assert restriction_check(flat(cyclic(3)), 3).passed


def test_tau_extension_examples():
    S = flat(cyclic(2))
    E, elems = idempotent_subalgebra(S)
    assert tau_extension(S, Partition.diagonal(E.size), 2).is_diagonal()
    assert tau_extension(S, Partition.universal(E.size), 2).is_universal()
    with pytest.raises(AlgebraError):
        tau_extension(duplicated_chain(3), Partition([0, 1, 0]), 1)


def test_tau_extension_sweep_on_m2_census():
    count = 0
    for S in census(4, "M", 2):
        E, _ = idempotent_subalgebra(S)
        for rho in all_congruences(E).congruences:
            rep = check_tau_extension(S, rho, 2)
            assert rep.passed, rep
            count += 1
    assert count > 0


def test_classify_si_examples():
    assert classify_si(flat(cyclic(2)), 2).witness == dict.fromkeys(
        ["subdirectly_irreducible", "semifield", "flat_extension", "simple_nontrivial"], True)
    one = duplicated_chain(1)
    rep = classify_si(one, 1)
    assert rep.passed and not any(rep.witness.values())
    rep = classify_si(c2c2(), 2)
    assert rep.passed and not any(rep.witness.values())
    assert classify_si(flat(cyclic(2)), 1).verdict == "inapplicable"


def test_subdirect_decomposition_of_product():
    S2, S3 = flat(cyclic(2)), flat(cyclic(3))
    P = product(S2, S3)
    parts = subdirect_decomposition(P, 6)
    assert len(parts) == 2
    p1, p2 = projections(S2, S3)
    assert {theta for theta, _ in parts} == {Partition(p1), Partition(p2)}
    sizes = sorted(Q.size for _, Q in parts)
    assert sizes == [3, 4]
    for _, Q in parts:
        assert find_isomorphism(Q, S2) is not None or find_isomorphism(Q, S3) is not None
    assert check_subdirect_decomposition(P, 6).passed


def test_subdirect_decomposition_of_si_is_itself():
    S = flat(cyclic(3))
    parts = subdirect_decomposition(S, 3)
    assert len(parts) == 1
    theta, Q = parts[0]
    assert theta.is_diagonal() and Q == S


def test_is_congruence_rejects_non_congruence():
    S = flat(cyclic(3))
    assert not is_congruence(S, Partition([0, 1, 1, 2]))
