"""Exhaustive generation of small ai-semirings up to isomorphism.

The additive reduct is drawn from a list of semilattices, one per
isomorphism type, each in its lexicographically least labelling. The
multiplication is then built row by row: each left translation
``L_x = mul[x]`` must be an endomorphism of ``(S, +)``, and the rows obey
``L_{xy} = L_x o L_y`` (associativity) and ``L_{y+z} = L_y + L_z`` (right
distributivity), which force most rows once a few are chosen. Isomorphic
copies are removed by keeping the least multiplication table over the
automorphisms of the fixed additive table.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product
from pathlib import Path

import numpy as np

from .core import SEMIRING, AlgebraError, FinAlgebra, check_ai_semiring, from_json, in_class, make_algebra
from .report import FAIL, PASS, Report

MAX_ORDER = 5
FILTERS = ("all-ai", "Sr", "M", "N")
_FILTER_ALIASES = {"all": "all-ai", "ai": "all-ai", "Srn": "Sr", "Sr_n": "Sr",
                   "Mn": "M", "M_n": "M", "Nn": "N", "N_n": "N"}
ENUM_VERSION = "rows-endo-propagation/1"
DATA = Path(__file__).parent / "data"


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumSpec:
    order: int
    filter: str = "all-ai"
    n: int = 1
    up_to_iso: bool = True
    allow_order5: bool = False
    time_budget: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "filter", _FILTER_ALIASES.get(self.filter, self.filter))
        if self.filter not in FILTERS:
            raise AlgebraError(f"unknown filter {self.filter!r}")
        if self.order < 1:
            raise AlgebraError("order must be at least 1")
        if self.order > MAX_ORDER:
            raise AlgebraError(f"bound exceeded: order {self.order} > {MAX_ORDER}")
        if self.order == MAX_ORDER and not self.allow_order5:
            raise AlgebraError("order 5 is opt-in (allow_order5=True)")
        if self.filter != "all-ai" and self.n < 1:
            raise AlgebraError("n must be at least 1")

    def key(self) -> dict:
        return {"order": self.order, "filter": self.filter,
                "n": self.n if self.filter != "all-ai" else None, "up_to_iso": self.up_to_iso}


@dataclass
class Census:
    spec: EnumSpec
    algebras: list[FinAlgebra]
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def provenance(self) -> str:
        blob = json.dumps({"spec": self.spec.key(), "version": ENUM_VERSION}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __len__(self) -> int:
        return len(self.algebras)

    def __iter__(self):
        return iter(self.algebras)

    def to_json(self) -> dict:
        return {
            "metadata": {**self.spec.key(), "count": len(self.algebras),
                         "counts": self.counts, "provenance": self.provenance,
                         "version": ENUM_VERSION},
            "algebras": [a.to_json() for a in self.algebras],
        }


# --- semilattices ------------------------------------------------------------

def _canonical_table(T: np.ndarray, perms) -> tuple:
    best = None
    for p in perms:
        p = np.asarray(p)
        inv = np.argsort(p)
        key = tuple(p[T[np.ix_(inv, inv)]].ravel())
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def semilattices(k: int) -> tuple[np.ndarray, ...]:
    """One table per isomorphism type of ``k``-element semilattice,
    each in its lexicographically least labelling."""
    cells = [(i, j) for i in range(k) for j in range(i + 1, k)]
    T = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        T[i, i] = i
    found = set()

    def assoc_ok() -> bool:
        for x, y, z in product(range(k), repeat=3):
            xy, yz = T[x, y], T[y, z]
            if xy >= 0 and yz >= 0 and T[xy, z] >= 0 and T[x, yz] >= 0 and T[xy, z] != T[x, yz]:
                return False
        return True

    def rec(c: int) -> None:
        if c == len(cells):
            found.add(_canonical_table(T, permutations(range(k))))
            return
        i, j = cells[c]
        for v in range(k):
            T[i, j] = T[j, i] = v
            if assoc_ok():
                rec(c + 1)
        T[i, j] = T[j, i] = -1

    for i, j in cells:
        T[i, j] = T[j, i] = -1
    rec(0)
    return tuple(np.array(key, dtype=np.int64).reshape(k, k) for key in sorted(found))


def endomorphisms(A: np.ndarray) -> list[tuple[int, ...]]:
    """All maps ``f`` with ``f(a + b) = f(a) + f(b)``."""
    k = A.shape[0]
    out = []
    for f in product(range(k), repeat=k):
        fa = np.asarray(f)
        if (fa[A] == A[fa[:, None], fa[None, :]]).all():
            out.append(f)
    return out


def automorphisms(T: np.ndarray) -> list[tuple[int, ...]]:
    k = T.shape[0]
    out = []
    for p in permutations(range(k)):
        pa = np.asarray(p)
        if (pa[T] == T[pa[:, None], pa[None, :]]).all():
            out.append(p)
    return out


# --- multiplications over a fixed addition -------------------------------------

def _multiplications(A: np.ndarray, deadline: float | None):
    """Yield every multiplication table making ``(A, mul)`` an ai-semiring."""
    k = A.shape[0]
    endos = endomorphisms(A)
    rows: list[tuple[int, ...] | None] = [None] * k
    Al = A.tolist()

    def propagate(assigned: list[int]) -> bool:
        """Apply the forcing rules until stable; record new rows in ``assigned``."""
        changed = True
        while changed:
            changed = False
            known = [x for x in range(k) if rows[x] is not None]
            for x in known:
                Lx = rows[x]
                for y in known:
                    Ly = rows[y]
                    w = Lx[y]
                    comp = tuple(Lx[v] for v in Ly)
                    if rows[w] is None:
                        rows[w] = comp
                        assigned.append(w)
                        changed = True
                    elif rows[w] != comp:
                        return False
                    s = Al[x][y]
                    summ = tuple(Al[a][b] for a, b in zip(Lx, Ly))
                    if rows[s] is None:
                        rows[s] = summ
                        assigned.append(s)
                        changed = True
                    elif rows[s] != summ:
                        return False
                if changed:
                    break
        return True

    def rec():
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("wall-clock budget exceeded")
        try:
            x = rows.index(None)
        except ValueError:
            yield np.array(rows, dtype=np.int64)
            return
        for f in endos:
            assigned = [x]
            rows[x] = f
            if propagate(assigned):
                yield from rec()
            for w in assigned:
                rows[w] = None

    yield from rec()


def _canonical_mul(M: np.ndarray, auts) -> tuple[tuple, tuple]:
    best, best_p = None, None
    for p in auts:
        pa = np.asarray(p)
        inv = np.argsort(pa)
        key = tuple(pa[M[np.ix_(inv, inv)]].ravel())
        if best is None or key < best:
            best, best_p = key, p
    return best, best_p


def _all_ai_semirings(k: int, deadline: float | None) -> list[FinAlgebra]:
    out = []
    for A in semilattices(k):
        auts = automorphisms(A)
        seen = set()
        for M in _multiplications(A, deadline):
            key, _ = _canonical_mul(M, auts)
            seen.add(key)
        for key in sorted(seen):
            M = np.array(key, dtype=np.int64).reshape(k, k)
            S = make_algebra(k, SEMIRING, {"add": A, "mul": M})
            out.append(S)
    return out


@lru_cache(maxsize=None)
def _ai_census(k: int) -> tuple[FinAlgebra, ...]:
    path = DATA / f"census_ai_order{k}.json"
    if path.exists():
        data = json.loads(path.read_text())
        return tuple(from_json(a) for a in data["algebras"])
    return tuple(_all_ai_semirings(k, None))


def passes_filter(S: FinAlgebra, filt: str, n: int) -> bool:
    filt = _FILTER_ALIASES.get(filt, filt)
    if filt == "all-ai":
        return check_ai_semiring(S).passed
    return in_class(S, filt, n)


def enumerate_algebras(spec: EnumSpec, use_shipped: bool = True) -> Census:
    """All ai-semirings of ``spec.order`` passing ``spec.filter``."""
    deadline = time.monotonic() + spec.time_budget if spec.time_budget else None
    if use_shipped:
        base = list(_ai_census(spec.order))
    else:
        base = _all_ai_semirings(spec.order, deadline)
    members = [S for S in base if passes_filter(S, spec.filter, spec.n)]
    if not spec.up_to_iso:
        members = _labelled_copies(members)
    counts = {"all-ai": len(base), spec.filter: len(members)}
    return Census(spec, members, counts)


def _labelled_copies(members: list[FinAlgebra]) -> list[FinAlgebra]:
    from .core import relabel
    out = {}
    for S in members:
        for p in permutations(range(S.size)):
            T = relabel(S, p)
            out[T.key()] = T
    return [out[key] for key in sorted(out)]


def census(order_max: int, filt: str = "all-ai", n: int = 1) -> list[FinAlgebra]:
    """Members of all orders ``1..order_max`` passing the filter."""
    out = []
    for k in range(1, order_max + 1):
        out.extend(enumerate_algebras(EnumSpec(k, filt, n, allow_order5=True)).algebras)
    return out


def write_census(c: Census, path: str | Path) -> None:
    Path(path).write_text(json.dumps(c.to_json(), separators=(",", ":")) + "\n")


# --- sweeps over the census ----------------------------------------------------------

def verify_si_census(order_max: int, n: int) -> Report:
    """Four-way characterization of the subdirectly irreducible members of
    ``M_n`` on every census member of order at most ``order_max``."""
    from .congruences import classify_si
    members = census(order_max, "M", n)
    children = []
    for S in members:
        rep = classify_si(S, n)
        if rep.verdict != PASS:
            rep.counterexample = {"algebra": S.to_json(), "flags": rep.witness}
            children.append(rep)
    verdict = FAIL if children else PASS
    si = sum(1 for S in members if classify_si(S, n).witness["subdirectly_irreducible"])
    return Report(f"si-census order<={order_max} n={n}", verdict,
                  detail=f"{len(members)} members of M_{n}, {si} subdirectly irreducible",
                  children=children, config={"order_max": order_max, "n": n},
                  counterexample=children[0].counterexample if children else None)


def verify_basis_equivalence(order_max: int, n: int) -> Report:
    """On members of ``Sr_n``: ``M_n`` membership equals ``N_n`` membership,
    and the intermediate identities of the derivation hold in ``M_n``."""
    from .terms import satisfies, schema
    members = census(order_max, "Sr", n)
    discrepancies = []
    m_members = []
    for S in members:
        m, nn = in_class(S, "M", n), in_class(S, "N", n)
        if m != nn:
            discrepancies.append({"algebra": S.to_json(), "M": m, "N": nn})
        if m:
            m_members.append(S)
    chain_fail = None
    keys = ("square-sum", "product-expansion", "e-chain", "center", "summing", "natordern")
    for S in m_members:
        for key in keys:
            for ident in schema(key, n):
                r = satisfies(S, ident, n)
                if not r.passed and chain_fail is None:
                    chain_fail = {"algebra": S.to_json(), "identity": str(ident),
                                  "assignment": r.counterexample}
    verdict = PASS if not discrepancies and chain_fail is None else FAIL
    detail = (f"{len(members)} members of Sr_{n}, {len(m_members)} in M_{n}; "
              f"{len(discrepancies)} discrepancies")
    cex = discrepancies[0] if discrepancies else chain_fail
    return Report(f"basis-equivalence order<={order_max} n={n}", verdict, detail=detail,
                  counterexample=cex, config={"order_max": order_max, "n": n})
