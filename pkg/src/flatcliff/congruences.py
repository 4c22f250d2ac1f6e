"""Partitions, congruences and the congruence lattice of small algebras."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import AlgebraError, FinAlgebra, find_isomorphism, idempotents, in_class, power_table
from .report import FAIL, INAPPLICABLE, PASS, Report

DEFAULT_SIZE_BOUND = 12


class Partition:
    """Equivalence relation on ``0..k-1`` as a canonical block labelling:
    blocks are numbered in order of their least member."""

    __slots__ = ("labels",)

    def __init__(self, labels: Iterable[int]):
        labels = list(labels)
        remap: dict[int, int] = {}
        self.labels = tuple(remap.setdefault(b, len(remap)) for b in labels)

    @classmethod
    def diagonal(cls, k: int) -> Partition:
        return cls(range(k))

    @classmethod
    def universal(cls, k: int) -> Partition:
        return cls([0] * k)

    @classmethod
    def from_blocks(cls, k: int, blocks: Iterable[Iterable[int]]) -> Partition:
        lab = list(range(k))
        for i, block in enumerate(blocks):
            for x in block:
                lab[x] = k + i
        return cls(lab)

    @classmethod
    def kernel(cls, f: Sequence[int]) -> Partition:
        return cls(f)

    def canonical(self) -> Partition:
        return self

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def num_blocks(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.labels):
            out[b].append(x)
        return out

    def block_of(self, x: int) -> list[int]:
        b = self.labels[x]
        return [y for y, c in enumerate(self.labels) if c == b]

    def representatives(self) -> list[int]:
        return [blk[0] for blk in self.blocks()]

    def related(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def is_diagonal(self) -> bool:
        return self.num_blocks == self.size

    def is_universal(self) -> bool:
        return self.num_blocks <= 1

    def __le__(self, other: Partition) -> bool:
        """Refinement: every block of ``self`` lies inside a block of ``other``."""
        seen: dict[int, int] = {}
        for a, b in zip(self.labels, other.labels):
            if seen.setdefault(a, b) != b:
                return False
        return True

    def __lt__(self, other: Partition) -> bool:
        return self <= other and self != other

    def meet(self, other: Partition) -> Partition:
        return Partition(zip(self.labels, other.labels))

    def join(self, other: Partition) -> Partition:
        return _components(self.size, [np.asarray(self.labels), np.asarray(other.labels)])

    def restrict(self, subset: Sequence[int]) -> Partition:
        """Restriction to ``subset``, reindexed in the given order."""
        return Partition(self.labels[x] for x in subset)

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.size) for b in range(a + 1, self.size)
                if self.labels[a] == self.labels[b]]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Partition) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return "Partition(" + "|".join(",".join(map(str, b)) for b in self.blocks()) + ")"

    def to_json(self) -> list[int]:
        return list(self.labels)


def _components(k: int, label_arrays: Sequence[np.ndarray],
                edges: Sequence[tuple[np.ndarray, np.ndarray]] = ()) -> Partition:
    """Finest partition joining each labelling and each edge list."""
    src, dst = [], []
    for lab in label_arrays:
        lab = np.asarray(lab)
        first = np.full(lab.max() + 1 if k else 0, -1, dtype=np.int64)
        order = np.arange(k)[::-1]
        first[lab[order]] = order
        src.append(np.arange(k))
        dst.append(first[lab])
    for a, b in edges:
        src.append(np.ravel(a))
        dst.append(np.ravel(b))
    if not src:
        return Partition.diagonal(k)
    s, d = np.concatenate(src), np.concatenate(dst)
    g = coo_matrix((np.ones(len(s), dtype=np.int8), (s, d)), shape=(k, k))
    _, lab = connected_components(g, directed=False)
    return Partition(lab.tolist())


def _translation_edges(S: FinAlgebra, theta: Partition) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairs forced by applying each one-step translation to ``theta``."""
    rep = np.asarray(theta.representatives())[np.asarray(theta.labels)]
    edges = []
    for name, ar in S.signature.ops:
        T = S[name]
        for axis in range(ar):
            edges.append((T, np.take(T, rep, axis=axis)))
    return edges


def congruence_generated(S: FinAlgebra, theta: Partition) -> Partition:
    """Least congruence containing ``theta`` (fixpoint of translation closure)."""
    cur = theta
    while True:
        nxt = _components(S.size, [np.asarray(cur.labels)], _translation_edges(S, cur))
        if nxt == cur:
            return cur
        cur = nxt


def principal_congruence(S: FinAlgebra, a: int, b: int) -> Partition:
    lab = list(range(S.size))
    lab[b] = lab[a]
    return congruence_generated(S, Partition(lab))


def is_congruence(S: FinAlgebra, theta: Partition) -> bool:
    if theta.size != S.size:
        return False
    lab = np.asarray(theta.labels)
    for a, b in _translation_edges(S, theta):
        if (lab[a] != lab[b]).any():
            return False
    return True


def _check_bound(S: FinAlgebra, bound: int | None) -> None:
    bound = DEFAULT_SIZE_BOUND if bound is None else bound
    if S.size > bound:
        raise AlgebraError(f"size bound exceeded: {S.size} > {bound}")


def principal_congruences(S: FinAlgebra) -> dict[tuple[int, int], Partition]:
    return {(a, b): principal_congruence(S, a, b)
            for a in range(S.size) for b in range(a + 1, S.size)}


@dataclass
class CongruenceLattice:
    congruences: list[Partition]

    @cached_property
    def index(self) -> dict[Partition, int]:
        return {c: i for i, c in enumerate(self.congruences)}

    @cached_property
    def leq(self) -> np.ndarray:
        cs = self.congruences
        return np.array([[a <= b for b in cs] for a in cs], dtype=bool)

    @cached_property
    def join_table(self) -> np.ndarray:
        cs = self.congruences
        return np.array([[self.index[a.join(b)] for b in cs] for a in cs], dtype=np.int64)

    @cached_property
    def meet_table(self) -> np.ndarray:
        cs = self.congruences
        return np.array([[self.index[a.meet(b)] for b in cs] for a in cs], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.congruences)

    def __getitem__(self, i: int) -> Partition:
        return self.congruences[i]


def _canonical_order(parts: Iterable[Partition]) -> list[Partition]:
    return sorted(set(parts), key=lambda p: (-p.num_blocks, p.labels))


def all_congruences(S: FinAlgebra, bound: int | None = None) -> CongruenceLattice:
    """Every congruence of ``S``: joins of principal congruences.

    Listed with the diagonal first (``cong#0``) and the universal relation
    last, otherwise by decreasing number of blocks then block labels.
    """
    _check_bound(S, bound)
    found = {Partition.diagonal(S.size)}
    for p in set(principal_congruences(S).values()):
        found |= {q.join(p) for q in found}
    return CongruenceLattice(_canonical_order(found))


def congruence_count(S: FinAlgebra, bound: int | None = None) -> int:
    return len(all_congruences(S, bound))


def monolith(S: FinAlgebra) -> Partition | None:
    """Least non-diagonal congruence, or ``None`` when there is none."""
    pcs = principal_congruences(S)
    if not pcs:
        return None
    m = Partition.universal(S.size)
    for p in pcs.values():
        m = m.meet(p)
    return None if m.is_diagonal() else m


def is_subdirectly_irreducible(S: FinAlgebra) -> bool:
    return monolith(S) is not None


def is_simple(S: FinAlgebra) -> bool:
    if S.size < 2:
        return False
    return all(p.is_universal() for p in principal_congruences(S).values())


# --- idempotent restriction and the tau extension -------------------------------

def _idempotent_part(S: FinAlgebra) -> tuple[FinAlgebra, list[int]]:
    from .constructions import idempotent_subalgebra
    return idempotent_subalgebra(S)


def restriction_check(S: FinAlgebra, n: int, bound: int | None = None) -> Report:
    """Every congruence whose restriction to the idempotents is diagonal is
    itself diagonal."""
    claim = "idempotent-restriction"
    if not in_class(S, "Sr", n):
        return Report(claim, INAPPLICABLE, detail="S not in Sr_n")
    E = sorted(idempotents(S))
    lat = all_congruences(S, bound)
    for i, theta in enumerate(lat.congruences):
        if theta.restrict(E).is_diagonal() and not theta.is_diagonal():
            return Report(claim, FAIL, counterexample={"congruence": f"cong#{i}", "blocks": theta.to_json()})
    return Report(claim, PASS, detail=f"{len(lat)} congruences checked")


def tau_relation(S: FinAlgebra, rho: Partition, n: int) -> np.ndarray:
    """``a tau b`` iff some idempotent ``e`` has ``ea = eb`` and
    ``e rho a^n rho b^n``. ``rho`` is indexed by the sorted idempotents."""
    E = sorted(idempotents(S))
    pos = {e: i for i, e in enumerate(E)}
    M = S["mul"]
    pw = power_table(S, n)
    blk = np.array([rho.labels[pos[int(pw[s])]] for s in range(S.size)])
    rel = np.zeros((S.size, S.size), dtype=bool)
    for e in E:
        be = rho.labels[pos[e]]
        ok = blk == be
        row = M[e]
        rel |= ok[:, None] & ok[None, :] & (row[:, None] == row[None, :])
    return rel


def tau_extension(S: FinAlgebra, rho: Partition, n: int) -> Partition:
    """Extend a congruence of the idempotent subsemiring to all of ``S``.

    Raises :class:`AlgebraError` when ``rho`` is not a congruence of the
    idempotent part or the resulting relation is not an equivalence.
    """
    Esub, _ = _idempotent_part(S)
    if not is_congruence(Esub, rho):
        raise AlgebraError("rho is not a congruence of the idempotent subsemiring")
    rel = tau_relation(S, rho, n)
    part = Partition(int(np.argmax(rel[s])) for s in range(S.size))
    same = np.asarray(part.labels)[:, None] == np.asarray(part.labels)[None, :]
    if (same != rel).any():
        raise AlgebraError("tau is not an equivalence relation")
    return part


def check_tau_extension(S: FinAlgebra, rho: Partition, n: int) -> Report:
    claim = "tau-extension"
    if not in_class(S, "M", n):
        return Report(claim, INAPPLICABLE, detail="S not in M_n")
    E = sorted(idempotents(S))
    try:
        tau = tau_extension(S, rho, n)
    except AlgebraError as exc:
        return Report(claim, FAIL, detail=str(exc), counterexample={"rho": rho.to_json()})
    if not is_congruence(S, tau):
        return Report(claim, FAIL, detail="tau is not a congruence",
                      counterexample={"rho": rho.to_json(), "tau": tau.to_json()})
    if tau.restrict(E) != rho:
        return Report(claim, FAIL, detail="tau does not restrict to rho",
                      counterexample={"rho": rho.to_json(), "tau": tau.to_json()})
    return Report(claim, PASS, witness={"rho": rho.to_json(), "tau": tau.to_json()})


# --- subdirectly irreducible members of M_n ----------------------------------------

def flat_candidate_iso(S: FinAlgebra, n: int) -> list[int] | None:
    """An isomorphism from ``S`` onto the flat extension of some group of
    exponent dividing ``n``, found by trying each element as the zero."""
    from .constructions import flat
    from .groups import from_table

    if S.size < 2:
        return None
    M = S["mul"]
    for z in range(S.size):
        rest = [s for s in range(S.size) if s != z]
        sub = M[np.ix_(rest, rest)]
        if not np.isin(sub, rest).all():
            continue
        pos = np.full(S.size, -1, dtype=np.int64)
        pos[rest] = np.arange(len(rest))
        try:
            G = from_table(pos[sub])
        except AlgebraError:
            continue
        if n % G.exponent():
            continue
        iso = find_isomorphism(S, flat(G))
        if iso is not None:
            return iso
    return None


def classify_si(S: FinAlgebra, n: int) -> Report:
    """Compute independently: subdirectly irreducible, semifield, flat
    extension of a group in ``G_n``, simple with more than one element.
    Pass iff the four agree."""
    from .constructions import is_semifield

    claim = "si-classification"
    if not in_class(S, "M", n):
        return Report(claim, INAPPLICABLE, detail="S not in M_n")
    flags = {
        "subdirectly_irreducible": is_subdirectly_irreducible(S),
        "semifield": is_semifield(S),
        "flat_extension": flat_candidate_iso(S, n) is not None,
        "simple_nontrivial": is_simple(S) and S.size > 1,
    }
    verdict = PASS if len(set(flags.values())) == 1 else FAIL
    return Report(claim, verdict, witness=flags,
                  counterexample=None if verdict == PASS else flags)


def separating_congruence(S: FinAlgebra, a: int, b: int,
                          principals: dict[tuple[int, int], Partition]) -> Partition:
    """A congruence maximal among those not relating ``a`` and ``b``."""
    theta = Partition.diagonal(S.size)
    for p in _canonical_order(principals.values()):
        cand = theta.join(p)
        if not cand.related(a, b):
            theta = cand
    return theta


def subdirect_decomposition(S: FinAlgebra, n: int | None = None) -> list[tuple[Partition, FinAlgebra]]:
    """Congruences with diagonal meet whose quotients are subdirectly
    irreducible. With ``n`` given, also require each quotient to be a flat
    extension of a group of exponent dividing ``n``."""
    from .constructions import quotient

    if S.size < 2:
        raise AlgebraError("subdirect decomposition needs more than one element")
    pcs = principal_congruences(S)
    family = _canonical_order(separating_congruence(S, a, b, pcs) for a, b in pcs)
    diag = Partition.diagonal(S.size)
    if diag in family:
        family = [diag]
    else:
        keep = list(family)
        for theta in family:
            rest = [t for t in keep if t != theta]
            meet = Partition.universal(S.size)
            for t in rest:
                meet = meet.meet(t)
            if rest and meet.is_diagonal():
                keep = rest
        family = keep
    out = []
    for theta in family:
        Q, _ = quotient(S, theta)
        if not is_subdirectly_irreducible(Q):
            raise AlgebraError(f"quotient by {theta} is not subdirectly irreducible")
        if n is not None and flat_candidate_iso(Q, n) is None:
            raise AlgebraError(f"quotient by {theta} is not a flat extension of a group")
        out.append((theta, Q))
    return out


def check_subdirect_decomposition(S: FinAlgebra, n: int) -> Report:
    claim = "subdirect-decomposition"
    if S.size < 2:
        return Report(claim, INAPPLICABLE, detail="one-element algebra")
    if not in_class(S, "M", n):
        return Report(claim, INAPPLICABLE, detail="S not in M_n")
    try:
        parts = subdirect_decomposition(S, n)
    except AlgebraError as exc:
        return Report(claim, FAIL, detail=str(exc), counterexample={"algebra": S.to_json()})
    meet = Partition.universal(S.size)
    for theta, _ in parts:
        meet = meet.meet(theta)
    if not meet.is_diagonal():
        return Report(claim, FAIL, detail="factor kernels do not meet to the diagonal",
                      counterexample={"algebra": S.to_json(), "meet": meet.to_json()})
    return Report(claim, PASS, witness=[{"kernel": t.to_json(), "quotient_size": q.size} for t, q in parts])
