"""Acceptance checks, one test per criterion. A pass/fail line per criterion
is printed in the terminal summary (see conftest.py)."""
import subprocess
import sys
import time

import pytest

from flatcliff.campaigns import check_power_term, check_semidiscriminator
from flatcliff.congruences import (Partition, all_congruences, check_subdirect_decomposition, check_tau_extension,
                                   congruence_count, restriction_check, subdirect_decomposition)
from flatcliff.constructions import flat, idempotent_subalgebra
from flatcliff.enumerate import census, verify_basis_equivalence, verify_si_census
from flatcliff.fixtures import CORPUS_GROUPS, SIMPLICITY_GROUPS, group
from flatcliff.groups import heisenberg, is_abelian, named_group, nilpotency_class, quaternion
from flatcliff.quasivar import search_homomorphisms, verify_pentagon
from flatcliff.report import ASSUMED, FAIL, PASS
from flatcliff.terms import check_schema

import oracles

IDENTITY_SUITE = ("srn", "cryptic", "m-chain", "mn", "center", "summing", "new1")


@pytest.mark.criterion(1, "flat extensions of the seven test groups are simple")
def test_criterion_1_simplicity():
    start = time.monotonic()
    for name in SIMPLICITY_GROUPS:
        S = flat(group(name))
        assert congruence_count(S, bound=S.size) == 2, name
    assert time.monotonic() - start < 10


@pytest.mark.criterion(2, "identity suite on corpus flats and the order<=4 M_n census")
def test_criterion_2_identity_suite():
    start = time.monotonic()
    failures = []
    for name in CORPUS_GROUPS:
        G = group(name)
        S, e = flat(G), G.exponent()
        for key in IDENTITY_SUITE:
            rep = check_schema(S, key, e)
            if rep.verdict != PASS:
                failures.append((name, key, rep.counterexample))
    for n in (1, 2, 3):
        members = census(4, "M", n)
        assert members
        for S in members:
            for key in IDENTITY_SUITE:
                rep = check_schema(S, key, n)
                if rep.verdict != PASS:
                    failures.append((S.to_json(), key, rep.counterexample))
    assert failures == []
    assert time.monotonic() - start < 120


@pytest.mark.criterion(3, "idempotent restriction and tau extension over the order<=4 M_2 census")
def test_criterion_3_restriction_and_tau():
    checked = 0
    for S in census(4, "M", 2):
        assert restriction_check(S, 2).verdict == PASS
        E, _ = idempotent_subalgebra(S)
        for rho in all_congruences(E).congruences:
            rep = check_tau_extension(S, rho, 2)
            assert rep.verdict == PASS, rep.counterexample
            checked += 1
    assert checked > 0


@pytest.mark.criterion(4, "four-way si characterization and flat subdirect factors, M_n census n=1,2,3")
def test_criterion_4_si_characterization():
    start = time.monotonic()
    for n in (1, 2, 3):
        assert verify_si_census(4, n).verdict == PASS
        for S in census(4, "M", n):
            if S.size < 2:
                continue
            assert check_subdirect_decomposition(S, n).verdict == PASS
            for _, Q in subdirect_decomposition(S, n):
                assert oracles.looks_flat(Q["add"].tolist(), Q["mul"].tolist())
    assert time.monotonic() - start < 300


@pytest.mark.criterion(5, "M_n and N_n agree on the order<=4 Sr_n census, n=2,3")
def test_criterion_5_basis_equivalence():
    for n in (2, 3):
        rep = verify_basis_equivalence(4, n)
        assert rep.verdict == PASS, rep.counterexample
        assert rep.detail.endswith("0 discrepancies")


@pytest.mark.criterion(6, "both pentagons at p=3, meets assumed")
def test_criterion_6_pentagons():
    start = time.monotonic()
    for kind in ("odd-square", "four-p"):
        rep = verify_pentagon(kind, 3)
        assert rep.verdict == PASS
        assert rep.detail.startswith("non-modularity confirmed modulo assumed meets")
        assumed = [c for c in rep.children if c.verdict == ASSUMED]
        assert len(assumed) == 2 and all("^" in c.claim for c in assumed)
        checked = [c for c in rep.children if c.verdict != ASSUMED]
        inclusions = [c for c in checked if " < " in c.claim]
        incomparable = [c for c in checked if " || " in c.claim]
        joins = [c for c in checked if " v " in c.claim and "= top" in c.claim]
        assert (len(inclusions), len(incomparable), len(joins)) == (5, 2, 2)
        assert all(c.verdict == PASS for c in checked)
    assert time.monotonic() - start < 600


@pytest.mark.criterion(7, "witness groups: class 2 non-abelian, exponent p^2")
def test_criterion_7_witness_groups():
    for G in (heisenberg(3), quaternion()):
        assert not is_abelian(G)
        assert nilpotency_class(G) == 2
    p = 3
    assert named_group("H3xC9").exponent() == 9 == p ** 2
    assert heisenberg(p).exponent() == p


@pytest.mark.criterion(8, "semidiscriminator on ps(C2), ps(C3) and the power term on flats")
def test_criterion_8_semidiscriminator():
    for name in ("C2", "C3"):
        assert check_semidiscriminator(group(name), name).verdict == PASS
    checked = 0
    for name in CORPUS_GROUPS:
        G = group(name)
        if G.size > 27:
            continue
        e = G.exponent()
        for n in (e, 2 * e, 3 * e):
            assert check_power_term(G, n, name).verdict == PASS, (name, n)
            checked += 1
    assert checked > 0


@pytest.mark.criterion(9, "byte-identical verify-lemmas JSON; seeds leave verdicts and meets unchanged")
def test_criterion_9_determinism():
    cmd = [sys.executable, "-m", "flatcliff", "verify-lemmas", "--n", "2", "--json", "-"]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    assert first.returncode == 0
    assert first.stdout and first.stdout == second.stdout
    for A, B in [("C4", "C2"), ("Q8", "C2xC2"), ("C9", "H3"), ("C3", "H3"), ("Dtilde6", "D6")]:
        base = search_homomorphisms(group(A), group(B))
        for seed in range(4):
            res = search_homomorphisms(group(A), group(B), seed=seed)
            assert Partition(res.meet) == Partition(base.meet)
            assert res.separates == base.separates
    base = verify_pentagon("four-p", 3)
    seeded = verify_pentagon("four-p", 3, seed=5)
    assert [(c.claim, c.verdict) for c in base.children] == [(c.claim, c.verdict) for c in seeded.children]
    assert FAIL not in {c.verdict for c in seeded.children}
