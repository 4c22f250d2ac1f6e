"""Quasivariety membership between finite groups.

For finite ``A`` and ``B``, ``A`` lies in the quasivariety generated by ``B``
exactly when ``A`` embeds in a finite power of ``B``, which happens exactly
when the kernels of all homomorphisms ``A -> B`` meet to the diagonal.
Homomorphisms are found by choosing images of a generating set one generator
at a time; every prefix is checked on the subgroup it generates, with whole
batches of candidate images evaluated at once in numpy.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .congruences import Partition
from .core import AlgebraError, resolve_budget
from .groups import Group, _is_prime, named_group
from .report import ASSUMED, FAIL, PASS, UNKNOWN, Report, combine

_CHUNK = 1 << 15
CERTIFICATE_BOUND = 100


class HomBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Homomorphism:
    source: Group
    target: Group
    map: tuple[int, ...]

    def kernel(self) -> Partition:
        return Partition.kernel(self.map)

    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)


@dataclass
class HomSearch:
    """Outcome of one homomorphism search."""
    homs: list[tuple[int, ...]]
    meet: np.ndarray
    complete: bool
    exhausted: bool
    checks: int
    separating: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def separates(self) -> bool:
        return len(np.unique(self.meet)) == self.meet.size


def _prefix_plans(A: Group, gens: Sequence[int]) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """For each prefix of ``gens``: BFS order, parent and generator index of
    the subgroup the prefix generates."""
    mul = A.tables["mul"]
    plans = []
    for j in range(1, len(gens) + 1):
        parent = {A.identity: (-1, -1)}
        order = [A.identity]
        queue = deque(order)
        while queue:
            x = queue.popleft()
            for i in range(j):
                y = int(mul[x, gens[i]])
                if y not in parent:
                    parent[y] = (x, i)
                    order.append(y)
                    queue.append(y)
        order_a = np.array(order, dtype=np.int64)
        par = np.array([parent[x][0] for x in order], dtype=np.int64)
        via = np.array([parent[x][1] for x in order], dtype=np.int64)
        plans.append((order_a, par, via))
    return plans


def _extend_maps(A: Group, B: Group, gens: Sequence[int], plan, imgs: np.ndarray) -> np.ndarray:
    """Images of every element of the prefix subgroup; rows that fail the
    relation check are dropped. Returns (kept imgs, kept maps)."""
    order, par, via = plan
    Amul, Bmul = A.tables["mul"], B.tables["mul"]
    N = imgs.shape[0]
    F = np.full((N, A.size), -1, dtype=np.int64)
    F[:, A.identity] = B.identity
    for x, p, i in zip(order[1:], par[1:], via[1:]):
        F[:, x] = Bmul[F[:, p], imgs[:, i]]
    ok = np.ones(N, dtype=bool)
    for i in range(imgs.shape[1]):
        lhs = F[:, Amul[order, gens[i]]]
        rhs = Bmul[F[:, order], imgs[:, i:i + 1]]
        ok &= (lhs == rhs).all(axis=1)
    return imgs[ok], F[ok]


def _meet_labels(labels: np.ndarray, maps: np.ndarray) -> np.ndarray:
    stacked = np.vstack([labels[None, :], maps]).T
    _, inv = np.unique(stacked, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def _as_group(G) -> Group:
    if isinstance(G, Group):
        return G
    if isinstance(G, str):
        return named_group(G)
    raise AlgebraError(f"expected a group, got {type(G).__name__}")


def search_homomorphisms(A: Group, B: Group, mode: str = "all", budget: int | None = None,
                         seed: int | None = None, generators: Sequence[int] | None = None) -> HomSearch:
    """Enumerate ``Hom(A, B)``.

    ``mode="all"`` returns every homomorphism. ``mode="separating-closure"``
    stops as soon as the running meet of kernels is the diagonal; only the
    homomorphisms that refined the meet are returned. ``budget`` caps the
    number of elementwise relation checks; on overrun ``exhausted`` is set and
    the result is incomplete. ``seed`` shuffles the order in which candidate
    images are tried.
    """
    if mode not in ("all", "separating-closure"):
        raise AlgebraError(f"unknown mode {mode!r}")
    A, B = _as_group(A), _as_group(B)
    budget = resolve_budget(budget)
    gens = tuple(generators) if generators is not None else A.generating_set()
    labels = np.zeros(A.size, dtype=np.int64)
    if not gens:
        trivial = tuple(B.identity for _ in range(A.size))
        return HomSearch([trivial], labels, True, False, 0, [trivial])
    rng = np.random.default_rng(seed) if seed is not None else None
    plans = _prefix_plans(A, gens)
    border = np.array([B.element_order(b) for b in range(B.size)])
    cands = []
    for g in gens:
        c = np.flatnonzero(A.element_order(g) % border == 0)
        if rng is not None:
            c = rng.permutation(c)
        cands.append(c)

    found: list[tuple[int, ...]] = []
    separating: list[tuple[int, ...]] = []
    checks = 0
    r = len(gens)

    def level(j: int, imgs: np.ndarray) -> bool:
        """Extend prefix images to generator ``j``; return True to stop early."""
        nonlocal checks, labels
        c = cands[j]
        for start in range(0, imgs.shape[0], max(1, _CHUNK // max(1, len(c)))):
            block = imgs[start:start + max(1, _CHUNK // max(1, len(c)))]
            ext = np.hstack([np.repeat(block, len(c), axis=0),
                             np.tile(c, block.shape[0])[:, None]])
            cost = ext.shape[0] * len(plans[j][0]) * (j + 1)
            if checks + cost > budget:
                raise HomBudgetExceeded
            checks += cost
            kept, maps = _extend_maps(A, B, gens, plans[j], ext)
            if not kept.shape[0]:
                continue
            if j + 1 < r:
                if level(j + 1, kept):
                    return True
                continue
            if mode == "all":
                found.extend(tuple(row) for row in maps.tolist())
            if _meet_labels(labels, maps).max() == labels.max():
                continue
            for row in maps:
                new = _meet_labels(labels, row[None, :])
                if new.max() > labels.max():
                    labels = new
                    separating.append(tuple(int(v) for v in row))
                    if mode == "separating-closure" and labels.max() + 1 == A.size:
                        return True
        return False

    exhausted = stopped = False
    try:
        stopped = level(0, np.zeros((1, 0), dtype=np.int64))
    except HomBudgetExceeded:
        exhausted = True
    homs = sorted(found) if mode == "all" else list(separating)
    complete = not exhausted and not stopped
    return HomSearch(homs, labels, complete, exhausted, checks, separating)


def homomorphisms(A, B, mode: str = "all", budget: int | None = None,
                  seed: int | None = None) -> list[Homomorphism]:
    """Homomorphisms ``A -> B``; raises :class:`HomBudgetExceeded` if the
    budget runs out, so a partial list is never mistaken for the whole."""
    A, B = _as_group(A), _as_group(B)
    res = search_homomorphisms(A, B, mode, budget, seed)
    if res.exhausted:
        raise HomBudgetExceeded("budget exceeded")
    return [Homomorphism(A, B, h) for h in res.homs]


def kernel_meet(A, targets: Iterable, budget: int | None = None, seed: int | None = None):
    """Meet of the kernels of all homomorphisms from ``A`` into any of the
    ``targets``. Returns ``(partition, separating maps, exhausted)``; the
    search stops early once the meet is the diagonal."""
    A = _as_group(A)
    labels = np.zeros(A.size, dtype=np.int64)
    sep: list[tuple[str, tuple[int, ...]]] = []
    for B in targets:
        B = _as_group(B)
        res = search_homomorphisms(A, B, "separating-closure", budget, seed)
        if res.exhausted:
            return Partition(labels), sep, True
        for h in res.separating:
            new = _meet_labels(labels, np.array([h]))
            if new.max() > labels.max():
                labels = new
                sep.append((B.name, h))
        if labels.max() + 1 == A.size:
            break
    return Partition(labels), sep, False


def embedding_certificate(A: Group, B: Group, maps: Sequence[Sequence[int]]) -> dict:
    """Materialize ``a -> (f_1(a), ..., f_m(a))`` into ``B^m`` and check that
    it is an injective homomorphism."""
    F = np.array(maps, dtype=np.int64).reshape(len(maps), A.size)
    Amul, Bmul = A.tables["mul"], B.tables["mul"]
    coords_ok = all(bool((Bmul[f[:, None], f[None, :]] == f[Amul]).all()) for f in F)
    injective = len({tuple(col) for col in F.T}) == A.size
    return {"power": len(maps), "injective": injective, "homomorphic": coords_ok,
            "valid": injective and coords_ok}


def check_membership(A, B, budget: int | None = None, seed: int | None = None) -> Report:
    """Is ``A`` in the quasivariety generated by ``B``?"""
    A, B = _as_group(A), _as_group(B)
    claim = f"{A.name or 'A'} in qvar{{{B.name or 'B'}}}"
    cfg = {"budget": resolve_budget(budget), "seed": seed}
    res = search_homomorphisms(A, B, "separating-closure", budget, seed)
    meet = Partition(res.meet)
    if res.separates:
        witness = {"separating_homs": [list(h) for h in res.separating]}
        if A.size <= CERTIFICATE_BOUND:
            cert = embedding_certificate(A, B, res.separating)
            witness["certificate"] = cert
            if not cert["valid"]:
                return Report(claim, FAIL, "embedding certificate failed", witness=witness,
                              counterexample=cert, config=cfg)
        return Report(claim, PASS, f"{len(res.separating)} homomorphisms separate points",
                      witness=witness, config=cfg)
    if res.exhausted:
        return Report(claim, UNKNOWN, "budget exceeded", config=cfg,
                      witness={"partial_meet": meet.to_json()})
    return Report(claim, FAIL, f"kernel meet has {meet.num_blocks} blocks, not the diagonal",
                  counterexample={"unseparated": [b[:2] for b in meet.blocks() if len(b) > 1][0]},
                  witness={"kernel_meet": meet.to_json()},
                  config=cfg)


def _tri(rep: Report) -> bool | None:
    return {PASS: True, FAIL: False}.get(rep.verdict)


def in_qvar(A, B, budget: int | None = None, seed: int | None = None) -> bool | None:
    """True, False, or None when the budget runs out."""
    return _tri(check_membership(A, B, budget, seed))


def qvar_relation(A, B, budget: int | None = None, seed: int | None = None) -> str:
    """One of ``"A<B"``, ``"B<A"``, ``"equal"``, ``"incomparable"``, ``"unknown"``."""
    ab, ba = in_qvar(A, B, budget, seed), in_qvar(B, A, budget, seed)
    if ab is None or ba is None:
        return "unknown"
    return {(True, True): "equal", (True, False): "A<B",
            (False, True): "B<A", (False, False): "incomparable"}[(ab, ba)]


def check_join(A, B, T, budget: int | None = None, seed: int | None = None) -> Report:
    """Does the join of ``qvar{A}`` and ``qvar{B}`` equal ``qvar{T}``?

    For groups ``qvar{A} v qvar{B} = qvar{A x B}``, and ``A x B`` lies in
    ``qvar{T}`` iff both factors do. ``T`` lies in ``qvar{A x B}`` iff the
    homomorphisms from ``T`` into ``A`` and into ``B`` jointly separate
    points, which avoids building the product.
    """
    A, B, T = _as_group(A), _as_group(B), _as_group(T)
    claim = f"qvar{{{A.name}}} v qvar{{{B.name}}} = qvar{{{T.name}}}"
    meet, sep, exhausted = kernel_meet(T, [A, B], budget, seed)
    down = Report(f"{T.name} in qvar{{{A.name}, {B.name}}}",
                  UNKNOWN if exhausted and not meet.is_diagonal() else
                  (PASS if meet.is_diagonal() else FAIL),
                  detail=f"kernel meet has {meet.num_blocks} of {T.size} blocks",
                  witness={"separating": [[name, list(h)] for name, h in sep]} if meet.is_diagonal() else None)
    up_a = check_membership(A, T, budget, seed)
    up_b = check_membership(B, T, budget, seed)
    return combine(claim, [down, up_a, up_b])


def join_equals(A, B, T, budget: int | None = None, seed: int | None = None) -> bool | None:
    return _tri(check_join(A, B, T, budget, seed))


# --- pentagons --------------------------------------------------------------------

NODES = ("bottom", "left-lower", "left-upper", "right", "top")
EDGES = (("bottom", "left-lower"), ("left-lower", "left-upper"), ("left-upper", "top"),
         ("bottom", "right"), ("right", "top"))
INCOMPARABLE = (("left-lower", "right"), ("left-upper", "right"))
JOINS = (("left-lower", "right", "top"), ("left-upper", "right", "top"))
MEETS = (("left-lower", "right", "bottom"), ("left-upper", "right", "bottom"))


@dataclass
class PentagonSpec:
    kind: str
    p: int
    groups: dict[str, Group]
    edges: tuple = EDGES
    incomparable: tuple = INCOMPARABLE
    joins: tuple = JOINS
    assumed_meets: tuple = MEETS

    def __post_init__(self) -> None:
        if set(self.groups) != set(NODES):
            raise AlgebraError("a pentagon has exactly the five nodes " + ", ".join(NODES))


def pentagon_spec(kind: str, p: int, allow_p5: bool = False) -> PentagonSpec:
    if not isinstance(p, int) or p % 2 == 0 or not _is_prime(p):
        raise AlgebraError(f"p must be an odd prime, got {p}")
    if p > 5:
        raise AlgebraError(f"bound exceeded: p={p} > 5")
    if p == 5 and not allow_p5:
        raise AlgebraError("p=5 is opt-in (allow_p5=True)")
    if kind == "odd-square":
        names = {"bottom": f"C{p}", "left-lower": f"C{p * p}", "left-upper": f"Htilde{p}",
                 "right": f"H{p}", "top": f"H{p}xC{p * p}"}
    elif kind == "four-p":
        names = {"bottom": f"C{2 * p}", "left-lower": f"C{4 * p}", "left-upper": f"Dtilde{2 * p}",
                 "right": f"D{2 * p}", "top": f"D{2 * p}xC{4 * p}"}
    else:
        raise AlgebraError(f"unknown pentagon kind {kind!r}")
    return PentagonSpec(kind, p, {k: named_group(v) for k, v in names.items()})


def _negate(rep: Report, claim: str) -> Report:
    """Non-membership: a failed membership check becomes a pass (its
    unseparated pair is the witness) and vice versa."""
    if rep.verdict == PASS:
        return Report(claim, FAIL, rep.detail, counterexample=rep.witness)
    if rep.verdict == FAIL:
        return Report(claim, PASS, rep.detail, witness=rep.counterexample)
    return Report(claim, rep.verdict, rep.detail)


def _order_closure(edges) -> set[tuple[str, str]]:
    le = {(x, x) for x in NODES} | set(edges)
    while True:
        more = {(a, d) for a, b in le for c, d in le if b == c} - le
        if not more:
            return le
        le |= more


def _modular_law(spec: PentagonSpec) -> Report:
    """Evaluate both sides of the modular law in the five-node lattice whose
    order is the verified inclusions. Joins agree with the verified join
    equalities; meets are the greatest lower bounds, which is where the
    assumed meet equalities enter."""
    le = _order_closure(spec.edges)

    def bound(x, y, upper):
        if upper:
            common = [z for z in NODES if (x, z) in le and (y, z) in le]
            best = [z for z in common if all((z, w) in le for w in common)]
        else:
            common = [z for z in NODES if (z, x) in le and (z, y) in le]
            best = [z for z in common if all((w, z) in le for w in common)]
        return best[0]

    a, b, c = "left-lower", "left-upper", "right"
    lhs = bound(a, bound(c, b, upper=False), upper=True)
    rhs = bound(bound(a, c, upper=True), b, upper=False)
    claim = "modular law fails at (left-lower, left-upper, right)"
    detail = (f"a v (c ^ b) = {lhs}, (a v c) ^ b = {rhs}; "
              "the meet c ^ b is taken from the assumed meet equality")
    witness = {"a v (c ^ b)": lhs, "(a v c) ^ b": rhs}
    if lhs != rhs and (lhs, rhs) in le:
        return Report(claim, PASS, detail, witness=witness)
    return Report(claim, FAIL, detail, counterexample=witness)


def verify_pentagon(kind: str, p: int, budget: int | None = None, seed: int | None = None,
                    allow_p5: bool = False) -> Report:
    """Check the strict inclusions, incomparabilities and joins of a five-node
    non-modular configuration of quasivarieties of finite groups. The two
    meets are literature facts and are reported as assumed."""
    spec = pentagon_spec(kind, p, allow_p5)
    G = spec.groups
    name = {k: G[k].name for k in NODES}
    memo: dict[tuple[str, str], Report] = {}

    def member(x: str, y: str) -> Report:
        if (x, y) not in memo:
            memo[(x, y)] = check_membership(G[x], G[y], budget, seed)
        return memo[(x, y)]

    children = []
    for lo, hi in spec.edges:
        up, down = member(lo, hi), member(hi, lo)
        children.append(combine(f"{lo} < {hi}: qvar{{{name[lo]}}} < qvar{{{name[hi]}}}",
                                [up, _negate(down, f"{name[hi]} not in qvar{{{name[lo]}}}")]))
    for x, y in spec.incomparable:
        parts = [_negate(member(x, y), f"{name[x]} not in qvar{{{name[y]}}}"),
                 _negate(member(y, x), f"{name[y]} not in qvar{{{name[x]}}}")]
        children.append(combine(f"{x} || {y}: {name[x]} and {name[y]} incomparable", parts))
    for x, y, z in spec.joins:
        rep = check_join(G[x], G[y], G[z], budget, seed)
        rep.claim = f"{x} v {y} = {z}: " + rep.claim
        children.append(rep)
    for x, y, z in spec.assumed_meets:
        children.append(Report(f"{x} ^ {y} = {z}: qvar{{{name[x]}}} ^ qvar{{{name[y]}}} = qvar{{{name[z]}}}",
                               ASSUMED, "taken from the literature; not machine-checked"))
    checked = combine("checked", children[:len(spec.edges) + len(spec.incomparable) + len(spec.joins)])
    if checked.verdict == PASS:
        modular = _modular_law(spec)
    else:
        modular = Report("modular law fails at (left-lower, left-upper, right)", UNKNOWN,
                         "not derived: some checked relation did not pass")
    children.append(modular)
    nodes = ", ".join(f"{k}={name[k]}({G[k].size})" for k in NODES)
    rep = combine(f"pentagon-{kind}-p{p}", children, detail=nodes)
    if rep.verdict == PASS:
        rep.detail = "non-modularity confirmed modulo assumed meets; " + nodes
    rep.config = {"kind": kind, "p": p, "budget": resolve_budget(budget), "seed": seed}
    rep.witness = {k: {"name": name[k], "order": G[k].size} for k in NODES}
    return rep
