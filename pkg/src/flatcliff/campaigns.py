"""Verification campaigns over the fixture corpus.

Each campaign returns one :class:`Report` whose children are ordered by
claim id, so output is deterministic whatever the worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import fixtures as fx
from .congruences import (all_congruences, check_subdirect_decomposition,
                          check_tau_extension, classify_si, congruence_count,
                          is_subdirectly_irreducible, restriction_check)
from .constructions import (flat, idempotent_subalgebra, ideals, is_ideal,
                            is_semifield, nonzero_group, pointed_semidiscriminator, product,
                            empty_signature_algebra, subgroup_identity, subgroups,
                            verify_ideal_lemma, with_clifford_inverse)
from .core import (SEMIRING, FinAlgebra, check_idempotent_lemma, find_isomorphism, idempotents,
                   in_class, is_homomorphism, make_algebra, power_table)
from .enumerate import census, verify_basis_equivalence
from .groups import Group, direct_product, subgroup_generated
from .report import FAIL, INAPPLICABLE, PASS, Report, combine
from .terms import check_schema, parse_term

IDEAL_SIZE = 9


def _sweep(claim: str, fixtures, check, detail: str = "") -> Report:
    children = []
    for f in fixtures:
        rep = check(f.algebra)
        rep.claim = f.name
        children.append(rep)
    applicable = sum(1 for c in children if c.verdict != INAPPLICABLE)
    return combine(claim, children, detail or f"{applicable} fixtures checked")


def _schemas(*keys, n):
    def check(S):
        return combine("schemas", [check_schema(S, k, n) for k in keys])
    return check


# --- individual claims ----------------------------------------------------------------

def flat_simple(n: int) -> Report:
    """Flat extensions of groups have exactly two congruences."""
    children = []
    for name in fx.CORPUS_GROUPS:
        G = fx.group(name)
        if G.size > 27:
            continue
        count = congruence_count(fx.flat_of(name), bound=G.size + 1)
        children.append(Report(f"flat({name})", PASS if count == 2 else FAIL,
                               f"{count} congruences",
                               counterexample=None if count == 2 else {"congruences": count}))
    return combine("flat-simple", children, f"{len(children)} flat extensions")


def idempotents_are_powers(n: int) -> Report:
    return _sweep("idempotents-are-powers", fx.semiring_fixtures(n, "Sr", 28),
                  lambda S: check_idempotent_lemma(S, n))


def power_map_multiplicative(n: int) -> Report:
    return _sweep("power-map-multiplicative", fx.semiring_fixtures(n, "Sr", 28),
                  _schemas("cryptic", n=n))


def m_chain(n: int) -> Report:
    return _sweep("m-chain", fx.semiring_fixtures(n, "Sr", 28),
                  _schemas("m-chain", "m-expansion", n=n))


def idempotent_restriction(n: int) -> Report:
    return _sweep("idempotent-restriction", fx.semiring_fixtures(n, "Sr"),
                  lambda S: restriction_check(S, n, bound=fx.CONGRUENCE_SIZE))


def m_identities(n: int) -> Report:
    return _sweep("m-identities", fx.semiring_fixtures(n, "M", 28),
                  _schemas("center", "summing", "summing-expanded", "new1", n=n))


def _ideal_instances(S: FinAlgebra, n: int) -> Report:
    children = []
    subs = subgroups(S)
    for J in ideals(S):
        for H in subs:
            if set(J) & set(H) or not is_ideal(S, set(J) | set(H)):
                continue
            children.append(verify_ideal_lemma(S, J, H, n))
    rep = combine("ideal-sums", children, f"{len(children)} (J, H) pairs")
    rep.children = [c for c in children if c.verdict == FAIL]
    return rep


def ideal_sums(n: int) -> Report:
    return _sweep("ideal-sums", fx.semiring_fixtures(n, "M", IDEAL_SIZE),
                  lambda S: _ideal_instances(S, n))


def _semifield_flat(S: FinAlgebra) -> Report:
    ng = nonzero_group(S)
    if ng is None:
        return Report("semifield-is-flat", INAPPLICABLE, "not a semifield")
    G, _ = ng
    iso = find_isomorphism(S, flat(G))
    if iso is None:
        return Report("semifield-is-flat", FAIL, "no isomorphism onto the flat extension",
                      counterexample={"algebra": S.to_json()})
    return Report("semifield-is-flat", PASS, witness={"isomorphism": iso})


def semifield_is_flat(n: int) -> Report:
    return _sweep("semifield-is-flat", fx.semiring_fixtures(n, "M", 28), _semifield_flat)


def _tau_all(S: FinAlgebra, n: int) -> Report:
    Esub, _ = idempotent_subalgebra(S)
    children = [check_tau_extension(S, rho, n) for rho in all_congruences(Esub).congruences]
    rep = combine("tau-extension", children, f"{len(children)} congruences of the idempotents")
    rep.children = [c for c in children if c.verdict == FAIL]
    return rep


def tau_extension_sweep(n: int) -> Report:
    return _sweep("tau-extension", fx.semiring_fixtures(n, "M"), lambda S: _tau_all(S, n))


def _si_semifield(S: FinAlgebra) -> Report:
    if not is_subdirectly_irreducible(S):
        return Report("si-is-semifield", INAPPLICABLE, "not subdirectly irreducible")
    if is_semifield(S):
        return Report("si-is-semifield", PASS)
    return Report("si-is-semifield", FAIL, "subdirectly irreducible but not a semifield",
                  counterexample={"algebra": S.to_json()})


def si_is_semifield(n: int) -> Report:
    return _sweep("si-is-semifield", fx.semiring_fixtures(n, "M"), _si_semifield)


def si_classification(n: int) -> Report:
    return _sweep("si-classification", fx.semiring_fixtures(n, "M"), lambda S: classify_si(S, n))


def subdirect_flat(n: int) -> Report:
    return _sweep("subdirect-flat", fx.semiring_fixtures(n, "M"),
                  lambda S: check_subdirect_decomposition(S, n))


LEMMA_CLAIMS = {
    "flat-simple": flat_simple,
    "idempotents-are-powers": idempotents_are_powers,
    "power-map-multiplicative": power_map_multiplicative,
    "m-chain": m_chain,
    "idempotent-restriction": idempotent_restriction,
    "m-identities": m_identities,
    "ideal-sums": ideal_sums,
    "semifield-is-flat": semifield_is_flat,
    "tau-extension": tau_extension_sweep,
    "si-is-semifield": si_is_semifield,
    "si-classification": si_classification,
    "subdirect-flat": subdirect_flat,
}


def _run_claim(args):
    table, key, n = args
    return _TABLES[table][key](n)


def _run(table: str, n: int, jobs: int) -> list[Report]:
    keys = list(_TABLES[table])
    items = [(table, k, n) for k in keys]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_claim, items))
    return [_run_claim(it) for it in items]


def verify_lemmas(n: int, jobs: int = 1) -> Report:
    """Every finitely checkable structural lemma over the fixture corpus."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rep = combine(f"verify-lemmas n={n}", _run("lemmas", n, jobs))
    rep.config = {"n": n}
    return rep


# --- the flat / sharp correspondence ------------------------------------------------------

def flat_in_m(n: int) -> Report:
    children = []
    for name in fx.groups_of_exponent_dividing(n):
        ok = in_class(fx.flat_of(name), "M", n)
        children.append(Report(f"flat({name})", PASS if ok else FAIL,
                               counterexample=None if ok else {"group": name}))
    return combine("flat-in-M", children, f"{len(children)} groups of exponent dividing {n}")


def exponent_obstruction(n: int) -> Report:
    """Flat extensions of groups whose exponent does not divide ``n`` fail
    ``x = x^(n+1)``."""
    children = []
    for name in fx.CORPUS_GROUPS:
        G = fx.group(name)
        if n % G.exponent() == 0:
            continue
        ok = not in_class(fx.flat_of(name), "Sr", n)
        children.append(Report(f"flat({name})", PASS if ok else FAIL, f"exponent {G.exponent()}",
                               counterexample=None if ok else {"group": name}))
    return combine("exponent-obstruction", children, f"{len(children)} groups")


def two_idempotents(n: int) -> Report:
    children = []
    for name in fx.groups_of_exponent_dividing(n):
        G = fx.group(name)
        E = sorted(idempotents(fx.flat_of(name)))
        ok = E == [0, G.identity + 1]
        children.append(Report(f"flat({name})", PASS if ok else FAIL, witness=E,
                               counterexample=None if ok else {"idempotents": E}))
    return combine("two-idempotents", children)


def duplicated_pair() -> FinAlgebra:
    """``{0, 1}`` with ``x + y = x y = min(x, y)``."""
    T = np.array([[0, 0], [0, 1]])
    return make_algebra(2, SEMIRING, {"add": T, "mul": T}, ["0", "1"])


def flat_of_trivial(n: int) -> Report:
    Eb = fx.flat_of("E")
    D = duplicated_pair()
    iso = find_isomorphism(Eb, D)
    checks = [Report("isomorphic to the duplicated pair", PASS if iso is not None else FAIL,
                     witness=iso, counterexample=None if iso is not None else {"algebra": Eb.to_json()}),
              Report("lies in M_1", PASS if in_class(Eb, "M", 1) else FAIL,
                     counterexample=None if in_class(Eb, "M", 1) else {"algebra": Eb.to_json()}),
              check_schema(Eb, "dupl", 1)]
    return combine("flat-of-trivial", checks)


def _flat_map(phi, size_from: int) -> list[int]:
    return [0] + [int(phi[i]) + 1 for i in range(size_from)]


def flat_embedding(n: int) -> Report:
    """``phi`` injective ``K -> G`` gives an embedding ``K^flat -> G^flat``."""
    children = []
    for name in fx.groups_of_exponent_dividing(n, max_order=27):
        G = fx.group(name)
        seen = set()
        for g in range(G.size):
            K, incl = subgroup_generated(G, [g])
            key = tuple(incl)
            if key in seen:
                continue
            seen.add(key)
            f = _flat_map(incl, K.size)
            ok = is_homomorphism(flat(K), fx.flat_of(name), f) and len(set(f)) == len(f)
            children.append(Report(f"<{G.labels[g]}> in {name}", PASS if ok else FAIL,
                                   counterexample=None if ok else {"map": f}))
    return combine("flat-embedding", children, f"{len(children)} cyclic subgroups")


def psi_map(G1: Group, G2: Group) -> list[int]:
    """``(a, b) -> (a, b)`` on nonzero pairs, else 0, from ``G1^flat x G2^flat``
    to ``(G1 x G2)^flat``."""
    m = G2.size + 1
    out = []
    for i in range((G1.size + 1) * m):
        a, b = divmod(i, m)
        out.append(0 if a == 0 or b == 0 else (a - 1) * G2.size + (b - 1) + 1)
    return out


def flat_product_map(n: int) -> Report:
    children = []
    names = fx.groups_of_exponent_dividing(n, max_order=12)
    for i, a in enumerate(names):
        for b in names[i:]:
            G1, G2 = fx.group(a), fx.group(b)
            if G1.size * G2.size > 36:
                continue
            src = product(flat(G1), flat(G2))
            dst = flat(direct_product(G1, G2))
            f = psi_map(G1, G2)
            ok = is_homomorphism(src, dst, f) and len(set(f)) == dst.size
            children.append(Report(f"{a}^flat x {b}^flat -> ({a}x{b})^flat", PASS if ok else FAIL,
                                   counterexample=None if ok else {"map": f}))
    return combine("flat-product-map", children, f"{len(children)} pairs")


def si_census_groups(n: int) -> Report:
    children = []
    for i, S in enumerate(census(4, "M", n)):
        if not is_subdirectly_irreducible(S):
            continue
        ng = nonzero_group(S)
        ok = ng is not None and n % ng[0].exponent() == 0
        children.append(Report(f"M_{n} census #{i} (order {S.size})", PASS if ok else FAIL,
                               witness={"group_order": ng[0].size} if ng else None,
                               counterexample=None if ok else {"algebra": S.to_json()}))
    return combine("si-census-groups", children, f"{len(children)} subdirectly irreducible members")


def check_sharp_instance(S: FinAlgebra, zeta, G: Group, n: int, claim: str) -> Report:
    """Walk the argument that recovers ``G`` inside a preimage of ``G^flat``:
    ``H`` = preimage of the group part is a Clifford semigroup, the component
    ``H_gamma`` at the product of its idempotents is an ideal, ``J u H_gamma``
    is an ideal of ``S``, sums of distinct elements there fall in ``J``, and
    ``zeta`` maps ``H_gamma`` bijectively onto ``G``."""
    target = flat(G)
    zeta = list(zeta)
    steps = []

    def step(name, ok, **info):
        steps.append(Report(name, PASS if ok else FAIL, witness=info or None,
                            counterexample=None if ok else (info or {"step": name})))
        return ok

    if not step("zeta is a surjective homomorphism",
                is_homomorphism(S, target, zeta) and set(zeta) == set(range(target.size))):
        return combine(claim, steps)
    M = S["mul"]
    J = [s for s in range(S.size) if zeta[s] == 0]
    H = [s for s in range(S.size) if zeta[s] != 0]
    step("J is an ideal", is_ideal(S, J), J=J)
    step("H is closed under mul", bool(np.isin(M[np.ix_(H, H)], H).all()))
    pw = power_table(S, n)
    Y = sorted({int(pw[h]) for h in H})
    comps = {a: [h for h in H if pw[h] == a] for a in Y}
    step("H is a semilattice of groups",
         all(subgroup_identity(S, c) == a for a, c in comps.items())
         and all(M[a, b] == M[b, a] for a in Y for b in Y), Y=Y)
    gamma = Y[0]
    for a in Y[1:]:
        gamma = int(M[gamma, a])
    Hg = comps.get(gamma, [])
    step("gamma absorbs Y", all(M[a, gamma] == gamma == M[gamma, a] for a in Y), gamma=gamma)
    step("H_gamma is an ideal of H",
         bool(np.isin(M[np.ix_(H, Hg)], Hg).all() and np.isin(M[np.ix_(Hg, H)], Hg).all()))
    step("J u H_gamma is an ideal", is_ideal(S, J + Hg))
    lemma = verify_ideal_lemma(S, J, Hg, n)
    lemma.claim = "distinct sums in J u H_gamma land in J"
    steps.append(lemma)
    img = [zeta[h] for h in Hg]
    step("zeta maps H_gamma bijectively onto G",
         len(set(img)) == len(img) == G.size and 0 not in img, H_gamma=Hg)
    return combine(claim, steps)


def sharp_argument(n: int) -> Report:
    children = []
    names = fx.groups_of_exponent_dividing(n, max_order=4)
    for i, a in enumerate(names):
        for b in names[i:]:
            G1, G2 = fx.group(a), fx.group(b)
            S = product(flat(G1), flat(G2))
            m = G2.size + 1
            pi1 = [s // m for s in range(S.size)]
            pi2 = [s % m for s in range(S.size)]
            children.append(check_sharp_instance(S, pi1, G1, n, f"{a}^flat x {b}^flat -> {a}^flat"))
            children.append(check_sharp_instance(S, pi2, G2, n, f"{a}^flat x {b}^flat -> {b}^flat"))
            children.append(check_sharp_instance(S, psi_map(G1, G2), direct_product(G1, G2), n,
                                                 f"{a}^flat x {b}^flat -> ({a}x{b})^flat"))
    return combine("sharp-argument", children, f"{len(children)} instances")


THEOREM_CLAIMS = {
    "exponent-obstruction": exponent_obstruction,
    "flat-embedding": flat_embedding,
    "flat-in-M": flat_in_m,
    "flat-of-trivial": flat_of_trivial,
    "flat-product-map": flat_product_map,
    "sharp-argument": sharp_argument,
    "si-census-groups": si_census_groups,
    "two-idempotents": two_idempotents,
}


def verify_theorem(n: int, jobs: int = 1) -> Report:
    """Desk-scale checks of both directions of the correspondence between
    quasivarieties of groups of exponent dividing ``n`` and varieties between
    ``M_1`` and ``M_n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rep = combine(f"verify-theorem n={n}", _run("theorem", n, jobs))
    rep.config = {"n": n}
    return rep


# --- bases, pointed semidiscriminators ----------------------------------------------------

def verify_basis(n: int) -> Report:
    children = [verify_basis_equivalence(4, n)]
    fl = []
    for name in fx.CORPUS_GROUPS:
        G = fx.group(name)
        if G.size > 8:
            continue
        e = G.exponent()
        S = fx.flat_of(name)
        ok = in_class(S, "M", e) and in_class(S, "N", e)
        fl.append(Report(f"flat({name}) n={e}", PASS if ok else FAIL,
                         counterexample=None if ok else {"group": name}))
    children.append(combine("flat extensions satisfy both bases", fl))
    rep = combine(f"verify-basis n={n}", children)
    rep.config = {"n": n}
    return rep


def check_semidiscriminator(A: FinAlgebra, name: str) -> Report:
    """On ``ps(A)``, ``(x meet y) rhd z`` is ``z`` when ``x = y`` is not the
    adjoined element, and the adjoined element otherwise."""
    P = pointed_semidiscriminator(A)
    meet, rhd = P["meet"], P["rhd"]
    r = np.arange(P.size)
    x, y, z = r[:, None, None], r[None, :, None], r[None, None, :]
    got = rhd[meet[x, y], z]
    want = np.where((x == y) & (x != 0), z, 0)
    bad = got != want
    if bad.any():
        i, j, k = (int(v) for v in np.unravel_index(int(np.argmax(bad)), bad.shape))
        return Report(f"ps({name})", FAIL, counterexample={"x": i, "y": j, "z": k,
                                                            "value": int(got[i, j, k])})
    return Report(f"ps({name})", PASS, f"{P.size ** 3} triples")


def check_power_term(G: Group, n: int, name: str) -> Report:
    """On ``G^flat`` with the exponent of ``G`` dividing ``n``,
    ``t(x + y, z) = (x + y)^n z`` behaves like ``(x meet y) rhd z``."""
    S = flat(G)
    r = np.arange(S.size)
    x, y, z = r[:, None, None], r[None, :, None], r[None, None, :]
    t = parse_term("(x + y)^n*z")
    from .terms import eval_vec
    got = eval_vec(S, t, {"x": x, "y": y, "z": z}, n)
    want = np.where((x == y) & (x != 0), z, 0)
    bad = got != want
    if bad.any():
        i, j, k = (int(v) for v in np.unravel_index(int(np.argmax(bad)), bad.shape))
        return Report(f"flat({name}) n={n}", FAIL, counterexample={"x": i, "y": j, "z": k})
    return Report(f"flat({name}) n={n}", PASS)


def ps_check() -> Report:
    from .terms import check_schema as _cs
    ps = [check_semidiscriminator(fx.group(g), g) for g in ("C2", "C3")]
    P0 = pointed_semidiscriminator(empty_signature_algebra(1))
    ok0 = P0.size == 2 and (P0["meet"] == np.array([[0, 0], [0, 1]])).all()
    ps.append(Report("ps(one-element, empty signature)", PASS if ok0 else FAIL,
                     counterexample=None if ok0 else {"algebra": P0.to_json()}))
    terms = []
    for name in fx.CORPUS_GROUPS:
        G = fx.group(name)
        if G.size > 27:
            continue
        e = G.exponent()
        for n in sorted({e, 2 * e}):
            terms.append(check_power_term(G, n, name))
    clif = []
    for name in fx.CORPUS_GROUPS:
        G = fx.group(name)
        if G.size > 12:
            continue
        S = with_clifford_inverse(fx.flat_of(name), G.exponent())
        rep = _cs(S, "natorder-clifford", G.exponent())
        rep.claim = f"flat({name})"
        clif.append(rep)
    children = [combine("semidiscriminator", ps),
                combine("power-term", terms, f"{len(terms)} (group, n) pairs"),
                combine("meet-inverse-identity", clif, f"{len(clif)} flat extensions")]
    return combine("ps-check", children)


_TABLES = {"lemmas": LEMMA_CLAIMS, "theorem": THEOREM_CLAIMS}
