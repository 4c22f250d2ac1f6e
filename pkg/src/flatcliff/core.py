"""Finite algebras stored as dense operation tables.

Elements of an algebra of size ``k`` are the integers ``0..k-1``. An operation
of arity ``m`` is an ``m``-dimensional numpy array of element indices; row
index is the first argument.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .report import FAIL, INAPPLICABLE, PASS, UNKNOWN, Report

DEFAULT_BUDGET = 10**8


class AlgebraError(ValueError):
    pass


def resolve_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get("FLATCLIFF_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class Signature:
    ops: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.ops]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate operation names in {names}")
        for name, arity in self.ops:
            if not isinstance(arity, int) or arity < 0:
                raise AlgebraError(f"bad arity {arity!r} for {name!r}")

    @classmethod
    def of(cls, ops: Iterable[Sequence]) -> Signature:
        return cls(tuple((str(name), int(arity)) for name, arity in ops))

    def names(self) -> list[str]:
        return [name for name, _ in self.ops]

    def arity(self, name: str) -> int:
        for op, ar in self.ops:
            if op == name:
                return ar
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(op == name for op, _ in self.ops)

    def extend(self, *ops: tuple[str, int]) -> Signature:
        return Signature(self.ops + tuple(ops))


SEMIRING = Signature((("add", 2), ("mul", 2)))
GROUP = Signature((("mul", 2), ("inv", 1)))


class FinAlgebra:
    """An immutable finite algebra."""

    __slots__ = ("size", "signature", "tables", "labels", "_hash")

    def __init__(self, size: int, signature: Signature,
                 tables: Mapping[str, np.ndarray], labels: Sequence[str] | None = None):
        self.size = size
        self.signature = signature
        self.tables = dict(tables)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(size))
        self._hash: int | None = None

    def __getitem__(self, op: str) -> np.ndarray:
        return self.tables[op]

    def op(self, name: str, *args: int) -> int:
        return int(self.tables[name][tuple(args)])

    @property
    def elements(self) -> range:
        return range(self.size)

    def key(self) -> tuple:
        return (self.size, self.signature.ops,
                tuple(self.tables[n].tobytes() for n in self.signature.names()))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinAlgebra) and self.key() == other.key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        return f"FinAlgebra(size={self.size}, ops={self.signature.names()})"

    def with_labels(self, labels: Sequence[str]) -> FinAlgebra:
        return FinAlgebra(self.size, self.signature, self.tables, labels)

    def reduct(self, names: Sequence[str]) -> FinAlgebra:
        sig = Signature(tuple((n, self.signature.arity(n)) for n in names))
        return FinAlgebra(self.size, sig, {n: self.tables[n] for n in names}, self.labels)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "signature": [[n, a] for n, a in self.signature.ops],
            "tables": {n: self.tables[n].tolist() for n in self.signature.names()},
            "labels": list(self.labels),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def make_algebra(size: int, signature: Signature | Iterable[Sequence],
                 tables: Mapping[str, object], labels: Sequence[str] | None = None) -> FinAlgebra:
    """Validate raw tables and build a :class:`FinAlgebra`.

    Raises :class:`AlgebraError` on missing or ragged tables and on entries
    outside ``0..size-1``.
    """
    if not isinstance(size, (int, np.integer)) or size < 1:
        raise AlgebraError(f"size must be a positive integer, got {size!r}")
    size = int(size)
    if not isinstance(signature, Signature):
        signature = Signature.of(signature)
    extra = set(tables) - set(signature.names())
    if extra:
        raise AlgebraError(f"tables for undeclared operations: {sorted(extra)}")
    arrs = {}
    for name, arity in signature.ops:
        if name not in tables:
            raise AlgebraError(f"missing table for operation {name!r}")
        try:
            arr = np.array(tables[name], dtype=np.int64)
        except ValueError as exc:
            raise AlgebraError(f"dimension mismatch in table {name!r}: ragged rows") from exc
        if arr.shape != (size,) * arity:
            raise AlgebraError(
                f"dimension mismatch in table {name!r}: shape {arr.shape}, expected {(size,) * arity}")
        if arr.size and (arr.min() < 0 or arr.max() >= size):
            bad = arr[(arr < 0) | (arr >= size)].flat[0]
            raise AlgebraError(f"entry out of range in table {name!r}: {bad}")
        arr.setflags(write=False)
        arrs[name] = arr
    if labels is not None and len(labels) != size:
        raise AlgebraError(f"expected {size} labels, got {len(labels)}")
    return FinAlgebra(size, signature, arrs, labels)


def from_json(data: Mapping | str) -> FinAlgebra:
    if isinstance(data, str):
        data = json.loads(data)
    return make_algebra(data["size"], data["signature"], data["tables"], data.get("labels"))


def _require(S: FinAlgebra, *names: str) -> None:
    for name in names:
        if name not in S.signature:
            raise AlgebraError(f"algebra has no operation named {name!r}")


# --- semiring axioms -------------------------------------------------------

def _first_true(mask: np.ndarray) -> tuple[int, ...] | None:
    if not mask.any():
        return None
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(mask)), mask.shape))


def check_ai_semiring(S: FinAlgebra) -> Report:
    """Check that ``add`` is a semilattice operation, ``mul`` is associative
    and multiplication distributes over addition on both sides."""
    _require(S, "add", "mul")
    A, M = S["add"], S["mul"]
    r = np.arange(S.size)
    x, y, z = r[:, None, None], r[None, :, None], r[None, None, :]
    checks = [
        ("add idempotent", lambda: A[r, r] != r, 1),
        ("add commutative", lambda: A != A.T, 2),
        ("add associative", lambda: A[A[x, y], z] != A[x, A[y, z]], 3),
        ("mul associative", lambda: M[M[x, y], z] != M[x, M[y, z]], 3),
        ("left distributive", lambda: M[x, A[y, z]] != A[M[x, y], M[x, z]], 3),
        ("right distributive", lambda: M[A[x, y], z] != A[M[x, z], M[y, z]], 3),
    ]
    for name, bad, _ in checks:
        where = _first_true(bad())
        if where is not None:
            return Report("ai-semiring", FAIL, detail=f"{name} fails", counterexample=list(where))
    return Report("ai-semiring", PASS)


def is_ai_semiring(S: FinAlgebra) -> bool:
    return check_ai_semiring(S).passed


def is_group(G: FinAlgebra) -> bool:
    """Associative binary ``mul`` with a two-sided identity and inverses."""
    M = G["mul"]
    r = np.arange(G.size)
    if (M[M[:, :, None], r[None, None, :]] != M[r[:, None, None], M[None, :, :]]).any():
        return False
    ids = [e for e in r if (M[e] == r).all() and (M[:, e] == r).all()]
    if not ids:
        return False
    e = ids[0]
    return all((M[a] == e).any() for a in r)


# --- idempotents and powers ------------------------------------------------

def idempotents(S: FinAlgebra) -> frozenset[int]:
    _require(S, "mul")
    M = S["mul"]
    return frozenset(int(e) for e in range(S.size) if M[e, e] == e)


def power_table(S: FinAlgebra, k: int) -> np.ndarray:
    """Vector ``s -> s^k`` computed as iterated (left-bracketed) products."""
    if k < 1:
        raise AlgebraError("power exponent must be at least 1 outside product contexts")
    M = S["mul"]
    r = np.arange(S.size)
    out = r.copy()
    for _ in range(k - 1):
        out = M[out, r]
    return out


def power(S: FinAlgebra, s: int, k: int) -> int:
    return int(power_table(S, k)[s])


def m_operator(S: FinAlgebra, s: int, n: int) -> int:
    """The element ``s + s^n``."""
    _require(S, "add", "mul")
    return int(S["add"][s, power(S, s, n)])


def nth_powers(S: FinAlgebra, n: int) -> frozenset[int]:
    return frozenset(int(v) for v in power_table(S, n))


def is_closed(S: FinAlgebra, subset: Iterable[int], ops: Sequence[str] | None = None) -> bool:
    sub = sorted(set(subset))
    if not sub:
        return True
    members = np.zeros(S.size, dtype=bool)
    members[sub] = True
    for name in ops or S.signature.names():
        ar = S.signature.arity(name)
        if ar == 0:
            if not members[S[name]]:
                return False
            continue
        idx = np.ix_(*([sub] * ar))
        if not members[S[name][idx]].all():
            return False
    return True


def check_idempotent_lemma(S: FinAlgebra, n: int) -> Report:
    """In ``Sr_n`` the idempotents are exactly the ``n``-th powers and form
    a subsemiring."""
    E = idempotents(S)
    P = nth_powers(S, n)
    if E != P:
        return Report("idempotents", FAIL, detail="idempotents differ from n-th powers",
                      counterexample={"idempotents": E, "nth_powers": P})
    if not is_closed(S, E, ["add", "mul"]):
        return Report("idempotents", FAIL, detail="idempotents not closed",
                      counterexample=sorted(E))
    return Report("idempotents", PASS, witness=sorted(E))


# --- classes Sr_n, M_n, N_n --------------------------------------------------

CLASS_SCHEMAS = {
    "Sr": ("srn",),
    "M": ("srn", "mn"),
    "N": ("srn", "center", "natordern"),
}
_CLASS_ALIASES = {"Srn": "Sr", "Sr_n": "Sr", "Mn": "M", "M_n": "M", "Nn": "N", "N_n": "N"}


def check_in_class(S: FinAlgebra, cls: str, n: int, budget: int | None = None) -> Report:
    """Membership in ``Sr_n``, ``M_n`` or ``N_n`` (``cls`` one of "Sr", "M", "N")."""
    from .terms import satisfies, schema

    if n < 1:
        raise AlgebraError("n must be at least 1")
    cls = _CLASS_ALIASES.get(cls, cls)
    if cls not in CLASS_SCHEMAS:
        raise AlgebraError(f"unknown class {cls!r}")
    claim = f"{cls}_{n}"
    base = check_ai_semiring(S)
    if not base.passed:
        return Report(claim, INAPPLICABLE, detail="not an ai-semiring", children=[base])
    for key in CLASS_SCHEMAS[cls]:
        for ident in schema(key):
            rep = satisfies(S, ident, n, budget=budget)
            if rep.verdict == UNKNOWN:
                return Report(claim, UNKNOWN, detail=rep.detail)
            if not rep.passed:
                return Report(claim, FAIL, detail=f"schema {key} fails: {ident}",
                              counterexample=rep.counterexample)
    return Report(claim, PASS)


def in_class(S: FinAlgebra, cls: str, n: int) -> bool:
    return check_in_class(S, cls, n).passed


# --- homomorphisms and isomorphism ----------------------------------------

def is_homomorphism(A: FinAlgebra, B: FinAlgebra, f: Sequence[int]) -> bool:
    f = np.asarray(f)
    for name, arity in A.signature.ops:
        TA, TB = A[name], B[name]
        if arity == 0:
            if f[TA] != TB:
                return False
            continue
        grids = np.indices((A.size,) * arity)
        lhs = f[TA]
        rhs = TB[tuple(f[g] for g in grids)]
        if (lhs != rhs).any():
            return False
    return True


def _invariants(S: FinAlgebra) -> list[tuple]:
    """Isomorphism-invariant fingerprint of each element."""
    inv = []
    ops = [(n, a) for n, a in S.signature.ops]
    for s in range(S.size):
        parts = []
        for name, ar in ops:
            T = S[name]
            if ar == 1:
                parts.append(int(T[s] == s))
            elif ar == 2:
                parts.append((int(T[s, s] == s), int((T[s] == s).sum()), int((T[:, s] == s).sum()),
                              len(set(T[s].tolist())), len(set(T[:, s].tolist()))))
        if "mul" in S.signature and S.signature.arity("mul") == 2:
            seen, x = [], s
            while x not in seen:
                seen.append(x)
                x = int(S["mul"][x, s])
            parts.append((len(seen), seen.index(x)))
        inv.append(tuple(parts))
    # one refinement round: multiset of neighbours' invariants
    base = inv
    refined = []
    for s in range(S.size):
        extra = []
        for name, ar in ops:
            if ar == 2:
                T = S[name]
                extra.append(tuple(sorted(base[int(v)] for v in T[s])))
                extra.append(tuple(sorted(base[int(v)] for v in T[:, s])))
        refined.append((base[s], tuple(extra)))
    return refined


def find_isomorphism(A: FinAlgebra, B: FinAlgebra) -> list[int] | None:
    """Backtracking search for an isomorphism ``A -> B``, or ``None``."""
    if A.size != B.size or A.signature != B.signature:
        return None
    ia, ib = _invariants(A), _invariants(B)
    if sorted(ia) != sorted(ib):
        return None
    k = A.size
    cands = [[b for b in range(k) if ib[b] == ia[a]] for a in range(k)]
    order = sorted(range(k), key=lambda a: len(cands[a]))
    binops = [(A[n], B[n]) for n, ar in A.signature.ops if ar == 2]
    unops = [(A[n], B[n]) for n, ar in A.signature.ops if ar == 1]
    nullops = [(A[n], B[n]) for n, ar in A.signature.ops if ar == 0]
    f = [-1] * k
    used = [False] * k
    assigned: list[int] = []

    def consistent(a: int) -> bool:
        fa = f[a]
        for TA, TB in unops:
            v = int(TA[a])
            if f[v] >= 0 and f[v] != TB[fa]:
                return False
        for TA, TB in binops:
            for c in assigned:
                for x, y in ((a, c), (c, a), (a, a)):
                    v = int(TA[x, y])
                    if f[v] >= 0 and f[v] != TB[f[x], f[y]]:
                        return False
        return True

    def rec(i: int) -> bool:
        if i == k:
            # partial checks only prune; the leaf needs the full check
            return all(f[int(TA)] == TB for TA, TB in nullops) and is_homomorphism(A, B, f)
        a = order[i]
        for b in cands[a]:
            if used[b]:
                continue
            f[a] = b
            used[b] = True
            assigned.append(a)
            if consistent(a) and rec(i + 1):
                return True
            assigned.pop()
            used[b] = False
            f[a] = -1
        return False

    return f if rec(0) else None


def is_isomorphic(A: FinAlgebra, B: FinAlgebra) -> bool:
    return find_isomorphism(A, B) is not None


def relabel(S: FinAlgebra, perm: Sequence[int]) -> FinAlgebra:
    """Image of ``S`` under the bijection ``s -> perm[s]``."""
    perm = np.asarray(perm)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    tables = {}
    for name, ar in S.signature.ops:
        T = S[name]
        if ar == 0:
            tables[name] = perm[T]
        else:
            tables[name] = perm[T[np.ix_(*([inv] * ar))]]
    labels = [S.labels[i] for i in inv]
    return make_algebra(S.size, S.signature, tables, labels)

