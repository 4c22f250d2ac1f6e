import pytest

from flatcliff import campaigns as cp
from flatcliff.constructions import flat, product
from flatcliff.core import in_class
from flatcliff.fixtures import (CORPUS_GROUPS, SIMPLICITY_GROUPS, census_fixtures, group,
                                groups_of_exponent_dividing, semiring_fixtures)
from flatcliff.groups import cyclic, named_group
from flatcliff.report import FAIL, PASS


def verdicts(rep):
    yield rep.verdict
    for c in rep.children:
        yield from verdicts(c)


def test_corpus_groups_cover_pentagon_nodes_up_to_72():
    for name in ("C3", "C9", "H3", "C6", "C12", "Dtilde6", "D6", "D6xC12"):
        assert name in CORPUS_GROUPS
    assert all(group(g).size <= 72 for g in CORPUS_GROUPS)
    assert set(SIMPLICITY_GROUPS) <= set(CORPUS_GROUPS)


def test_fixture_selection():
    assert groups_of_exponent_dividing(2) == ["E", "C2", "C2xC2"]
    fixtures = semiring_fixtures(2, "M")
    assert fixtures and all(in_class(f.algebra, "M", 2) for f in fixtures)
    assert len(census_fixtures(3)) == 1 + 6 + 61


@pytest.mark.parametrize("n", [1, 2, 3])
def test_verify_lemmas(n):
    rep = cp.verify_lemmas(n)
    assert rep.verdict == PASS, [c.claim for c in rep.children if c.verdict != PASS]
    assert FAIL not in set(verdicts(rep))
    claims = [c.claim for c in rep.children]
    assert len(claims) == len(set(claims))
    assert set(claims) == set(cp.LEMMA_CLAIMS)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_verify_theorem(n):
    rep = cp.verify_theorem(n)
    assert rep.verdict == PASS
    assert set(c.claim for c in rep.children) == set(cp.THEOREM_CLAIMS)


@pytest.mark.parametrize("n", [2, 3])
def test_verify_basis(n):
    assert cp.verify_basis(n).verdict == PASS


def test_ps_check():
    rep = cp.ps_check()
    assert rep.verdict == PASS
    assert [c.claim for c in rep.children] == ["semidiscriminator", "power-term", "meet-inverse-identity"]


def test_power_term_needs_exponent_dividing_n():
    assert cp.check_power_term(cyclic(4), 4, "C4").passed
    assert cp.check_power_term(cyclic(4), 8, "C4").passed
    rep = cp.check_power_term(cyclic(4), 2, "C4")
    assert rep.verdict == FAIL and rep.counterexample is not None


def test_flat_product_map_is_homomorphism_onto_flat_of_product():
    from flatcliff.core import is_homomorphism
    G1, G2 = named_group("C2"), named_group("C3")
    psi = cp.psi_map(G1, G2)
    P = product(flat(G1), flat(G2))
    target = flat(named_group("C2xC3"))
    assert is_homomorphism(P, target, psi)
    assert set(psi) == set(range(target.size))


def test_duplicated_pair_is_flat_of_trivial():
    from flatcliff.core import find_isomorphism
    assert find_isomorphism(cp.duplicated_pair(), flat(named_group("E"))) is not None


def test_sharp_instance_detects_bad_map():
    G1, G2 = named_group("C2"), named_group("C2")
    S = product(flat(G1), flat(G2))
    # a map that is not a homomorphism onto flat(C2)
    bad = [0] * S.size
    bad[-1] = 1
    rep = cp.check_sharp_instance(S, bad, G1, 2, "bad map")
    assert rep.verdict == FAIL
