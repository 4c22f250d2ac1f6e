"""Algebra-building constructions: flat extensions, pointed semidiscriminator
extensions, products, subalgebras, quotients and Clifford decompositions."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from typing import Iterable, Sequence

import numpy as np

from .congruences import Partition, is_congruence
from .core import (SEMIRING, AlgebraError, FinAlgebra, Signature, idempotents, in_class,
                   make_algebra, power_table)
from .groups import Group, from_table
from .report import FAIL, INAPPLICABLE, PASS, Report


@dataclass(frozen=True)
class FlatExtension:
    base: FinAlgebra
    result: FinAlgebra
    embedding: tuple[int, ...]


def _absorbing_table(T: np.ndarray, arity: int) -> np.ndarray:
    """Extend an operation table by an absorbing element at index 0."""
    k = T.shape[0] if arity else None
    if arity == 0:
        return np.asarray(T + 1)
    out = np.zeros((k + 1,) * arity, dtype=np.int64)
    out[(slice(1, None),) * arity] = T + 1
    return out


def _flat_meet(k: int) -> np.ndarray:
    """``a + b = a`` if ``a == b``, else the adjoined element 0."""
    r = np.arange(k + 1)
    return np.where(r[:, None] == r[None, :], r[:, None], 0)


def flat_extension(A: FinAlgebra, mode: str = "group") -> FlatExtension:
    """Adjoin an absorbing element at index 0 and the flat meet.

    ``mode="group"`` expects a group and returns an ai-semiring with
    operations ``add`` (the flat rule) and ``mul``. ``mode="generic"`` keeps
    every operation of ``A`` (made absorbing) and adds ``meet``.
    """
    k = A.size
    if mode == "group":
        if "mul" not in A.signature or A.signature.arity("mul") != 2:
            raise AlgebraError("group mode needs a binary mul")
        tables = {"add": _flat_meet(k), "mul": _absorbing_table(A["mul"], 2)}
        S = make_algebra(k + 1, SEMIRING, tables, ["0"] + list(A.labels))
    elif mode == "generic":
        if "meet" in A.signature:
            raise AlgebraError("operation name 'meet' already used")
        tables = {name: _absorbing_table(A[name], ar) for name, ar in A.signature.ops}
        tables["meet"] = _flat_meet(k)
        S = make_algebra(k + 1, A.signature.extend(("meet", 2)), tables,
                         ["inf"] + list(A.labels))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return FlatExtension(A, S, tuple(range(1, k + 1)))


def flat(G: FinAlgebra) -> FinAlgebra:
    """Shorthand for the semiring ``G^flat``."""
    return flat_extension(G, "group").result


def with_right_projection(A: FinAlgebra) -> FinAlgebra:
    """``A`` with the extra operation ``rhd(a, b) = b``."""
    if "rhd" in A.signature:
        raise AlgebraError("operation name 'rhd' already used")
    r = np.arange(A.size)
    tables = dict(A.tables)
    tables["rhd"] = np.broadcast_to(r[None, :], (A.size, A.size)).copy()
    return make_algebra(A.size, A.signature.extend(("rhd", 2)), tables, A.labels)


def pointed_semidiscriminator(A: FinAlgebra) -> FinAlgebra:
    """Flat extension (generic mode) of ``A`` with right projection added."""
    if "rhd" in A.signature or "meet" in A.signature:
        raise AlgebraError("name clash: 'rhd' or 'meet' already in the signature")
    return flat_extension(with_right_projection(A), "generic").result


def empty_signature_algebra(size: int = 1) -> FinAlgebra:
    return make_algebra(size, Signature(()), {})


# --- products, subalgebras, quotients ------------------------------------------

def product(S: FinAlgebra, T: FinAlgebra) -> FinAlgebra:
    """Componentwise product; pair ``(s, t)`` has index ``s*|T| + t``."""
    if S.signature != T.signature:
        raise AlgebraError("product needs equal signatures")
    m = T.size
    r = np.arange(S.size * m)
    s, t = r // m, r % m
    tables = {}
    for name, ar in S.signature.ops:
        if ar == 0:
            tables[name] = int(S[name]) * m + int(T[name])
            continue
        grids = np.indices((len(r),) * ar)
        tables[name] = S[name][tuple(s[g] for g in grids)] * m + T[name][tuple(t[g] for g in grids)]
    labels = [f"({S.labels[i]},{T.labels[j]})" for i, j in zip(s, t)]
    return make_algebra(len(r), S.signature, tables, labels)


def projections(S: FinAlgebra, T: FinAlgebra) -> tuple[list[int], list[int]]:
    m = T.size
    return [i // m for i in range(S.size * m)], [i % m for i in range(S.size * m)]


def closure(S: FinAlgebra, subset: Iterable[int]) -> list[int]:
    """Sorted universe of the subalgebra generated by ``subset``."""
    seen = set(int(x) for x in subset)
    for name, ar in S.signature.ops:
        if ar == 0:
            seen.add(int(S[name]))
    order = sorted(seen)
    i = 0
    while i < len(order):
        x = order[i]
        new = []
        for name, ar in S.signature.ops:
            T = S[name]
            if ar == 1:
                new.append(int(T[x]))
            elif ar == 2:
                done = order[:i + 1]
                new.extend(T[x, done].tolist())
                new.extend(T[done, x].tolist())
            elif ar > 2:
                done = order[:i + 1]
                for args in cartesian(done, repeat=ar):
                    if x in args:
                        new.append(int(T[args]))
        for y in new:
            if y not in seen:
                seen.add(y)
                order.append(y)
        i += 1
    return sorted(seen)


def induced(S: FinAlgebra, elems: Sequence[int]) -> FinAlgebra:
    """Subalgebra on a closed subset, reindexed in increasing order."""
    elems = sorted(elems)
    pos = np.full(S.size, -1, dtype=np.int64)
    pos[elems] = np.arange(len(elems))
    tables = {}
    for name, ar in S.signature.ops:
        if ar == 0:
            tables[name] = pos[int(S[name])]
        else:
            tables[name] = pos[S[name][np.ix_(*([elems] * ar))]]
    if any((np.asarray(t) < 0).any() for t in tables.values()):
        raise AlgebraError("subset is not closed under the operations")
    return make_algebra(len(elems), S.signature, tables, [S.labels[e] for e in elems])


def subalgebra_generated(S: FinAlgebra, subset: Iterable[int]) -> tuple[FinAlgebra, list[int]]:
    elems = closure(S, subset)
    if not elems:
        raise AlgebraError("empty subalgebra")
    return induced(S, elems), elems


def quotient(S: FinAlgebra, theta: Partition) -> tuple[FinAlgebra, list[int]]:
    """Quotient by a congruence; blocks are numbered by least member."""
    if not is_congruence(S, theta):
        raise AlgebraError("partition is not a congruence")
    blocks = theta.canonical().labels
    reps = theta.representatives()
    proj = np.asarray(blocks)
    tables = {}
    for name, ar in S.signature.ops:
        if ar == 0:
            tables[name] = proj[int(S[name])]
        else:
            tables[name] = proj[S[name][np.ix_(*([reps] * ar))]]
    labels = ["{" + ",".join(S.labels[e] for e in theta.block_of(r)) + "}" for r in reps]
    return make_algebra(len(reps), S.signature, tables, labels), [int(b) for b in blocks]


# --- semifields and the idempotent subsemiring ----------------------------------

def multiplicative_zero(S: FinAlgebra) -> int | None:
    M = S["mul"]
    for z in range(S.size):
        if (M[z] == z).all() and (M[:, z] == z).all():
            return z
    return None


def nonzero_group(S: FinAlgebra) -> tuple[Group, list[int]] | None:
    """The group of nonzero elements when ``S`` is a semifield, else ``None``."""
    z = multiplicative_zero(S)
    if z is None or S.size < 2:
        return None
    rest = [s for s in range(S.size) if s != z]
    M = S["mul"][np.ix_(rest, rest)]
    pos = {e: i for i, e in enumerate(rest)}
    if not np.isin(M, rest).all():
        return None
    try:
        G = from_table(np.vectorize(pos.__getitem__, otypes=[np.int64])(M),
                       labels=[S.labels[e] for e in rest])
    except AlgebraError:
        return None
    return G, rest


def is_semifield(S: FinAlgebra) -> bool:
    return nonzero_group(S) is not None


def idempotent_subalgebra(S: FinAlgebra) -> tuple[FinAlgebra, list[int]]:
    E = sorted(idempotents(S))
    return induced(S, E), E


def is_ideal(S: FinAlgebra, J: Iterable[int]) -> bool:
    """Two-sided multiplicative ideal (nonempty)."""
    J = sorted(set(J))
    if not J:
        return False
    M = S["mul"]
    return bool(np.isin(M[J, :], J).all() and np.isin(M[:, J], J).all())


def subgroup_identity(S: FinAlgebra, H: Iterable[int]) -> int | None:
    """Identity of ``H`` if ``H`` is a subgroup of ``(S, mul)``, else ``None``."""
    H = sorted(set(H))
    if not H:
        return None
    M = S["mul"]
    sub = M[np.ix_(H, H)]
    if not np.isin(sub, H).all():
        return None
    for e in H:
        if M[e, e] != e:
            continue
        if all(M[e, h] == h and M[h, e] == h for h in H) and \
                all(any(M[h, g] == e and M[g, h] == e for g in H) for h in H):
            return e
    return None


# --- Clifford structure -----------------------------------------------------------

@dataclass(frozen=True)
class CliffordDecomposition:
    semilattice: tuple[int, ...]
    components: dict[int, tuple[int, ...]]

    def component_of(self, s: int) -> int:
        for alpha, comp in self.components.items():
            if s in comp:
                return alpha
        raise KeyError(s)


def clifford_decompose(S: FinAlgebra, n: int) -> CliffordDecomposition:
    """Split ``S`` into the groups ``G_alpha = {s : s^n = alpha}``.

    Raises :class:`AlgebraError` naming a non-commuting pair of idempotents,
    or the first structural condition that fails.
    """
    M = S["mul"]
    E = sorted(idempotents(S))
    for e in E:
        for f in E:
            if M[e, f] != M[f, e]:
                raise AlgebraError(f"idempotents {e} and {f} do not commute")
    pw = power_table(S, n)
    comps: dict[int, list[int]] = {e: [] for e in E}
    for s in range(S.size):
        alpha = int(pw[s])
        if alpha not in comps:
            raise AlgebraError(f"{s}^n = {alpha} is not idempotent")
        comps[alpha].append(s)
    for alpha, comp in comps.items():
        if subgroup_identity(S, comp) != alpha:
            raise AlgebraError(f"component of {alpha} is not a group with identity {alpha}")
    where = {s: alpha for alpha, comp in comps.items() for s in comp}
    for a in range(S.size):
        for b in range(S.size):
            if where[int(M[a, b])] != M[where[a], where[b]]:
                raise AlgebraError(f"product {a}*{b} leaves the component of the product of idempotents")
    return CliffordDecomposition(tuple(E), {a: tuple(c) for a, c in comps.items()})


def clifford_inverse(S: FinAlgebra, n: int) -> np.ndarray:
    """Inverse of each element inside its group component: ``s^(2n-1)``."""
    inv = power_table(S, 2 * n - 1)
    M = S["mul"]
    r = np.arange(S.size)
    if (M[M[r, inv], r] != r).any() or (M[M[inv, r], inv] != inv).any():
        raise AlgebraError("no component inverse; algebra is not in Sr_n")
    return inv


def with_clifford_inverse(S: FinAlgebra, n: int) -> FinAlgebra:
    tables = dict(S.tables)
    tables["inv"] = clifford_inverse(S, n)
    return make_algebra(S.size, S.signature.extend(("inv", 1)), tables, S.labels)


# --- the ideal lemma ----------------------------------------------------------------

def verify_ideal_lemma(S: FinAlgebra, J: Iterable[int], H: Iterable[int], n: int) -> Report:
    """For ``S`` in ``M_n``, an ideal ``J`` and a subgroup ``H`` disjoint from
    ``J`` with ``J u H`` an ideal: distinct ``a, b`` in ``J u H`` have
    ``a + b`` in ``J``. Unmet preconditions give ``inapplicable``."""
    J, H = set(int(x) for x in J), set(int(x) for x in H)
    claim = "ideal-lemma"
    cfg = {"J": sorted(J), "H": sorted(H), "n": n}
    if not in_class(S, "M", n):
        return Report(claim, INAPPLICABLE, detail="S not in M_n", config=cfg)
    if not is_ideal(S, J):
        return Report(claim, INAPPLICABLE, detail="J is not an ideal", config=cfg)
    if subgroup_identity(S, H) is None:
        return Report(claim, INAPPLICABLE, detail="H is not a subgroup", config=cfg)
    if J & H:
        return Report(claim, INAPPLICABLE, detail="J and H intersect", config=cfg)
    if not is_ideal(S, J | H):
        return Report(claim, INAPPLICABLE, detail="J u H is not an ideal", config=cfg)
    A = S["add"]
    U = sorted(J | H)
    for a in U:
        for b in U:
            if a != b and int(A[a, b]) not in J:
                return Report(claim, FAIL, counterexample={"a": a, "b": b, "a+b": int(A[a, b])},
                              config=cfg)
    return Report(claim, PASS, config=cfg)


def subgroups(S: FinAlgebra) -> list[tuple[int, ...]]:
    """All subsets forming a group under ``mul`` (small algebras only)."""
    out = []
    for e in sorted(idempotents(S)):
        cand = [s for s in range(S.size) if S["mul"][e, s] == s and S["mul"][s, e] == s]
        for mask in range(1, 1 << len(cand)):
            H = [c for i, c in enumerate(cand) if mask >> i & 1]
            if e in H and subgroup_identity(S, H) == e:
                out.append(tuple(H))
    return out


def ideals(S: FinAlgebra) -> list[tuple[int, ...]]:
    """All nonempty two-sided ideals (small algebras only)."""
    out = []
    for mask in range(1, 1 << S.size):
        J = [s for s in range(S.size) if mask >> s & 1]
        if is_ideal(S, J):
            out.append(tuple(J))
    return out
