"""Concrete finite groups as full multiplication tables."""
from __future__ import annotations

import math
import re
from collections import deque
from functools import reduce
from typing import Sequence

import numpy as np

from .core import GROUP, AlgebraError, FinAlgebra, make_algebra
from .report import FAIL, PASS, Report


class Group(FinAlgebra):
    """A :class:`FinAlgebra` with ``mul`` and ``inv``, plus cached facts."""

    __slots__ = ("identity", "name", "generators", "_exponent")

    def __init__(self, alg: FinAlgebra, identity: int, name: str = "",
                 generators: Sequence[int] | None = None):
        super().__init__(alg.size, alg.signature, alg.tables, alg.labels)
        self.identity = identity
        self.name = name
        self.generators = tuple(generators) if generators is not None else None
        self._exponent: int | None = None

    def __repr__(self) -> str:
        return f"Group({self.name or '?'}, order={self.size})"

    @property
    def order(self) -> int:
        return self.size

    def mul(self, a: int, b: int) -> int:
        return int(self.tables["mul"][a, b])

    def inv(self, a: int) -> int:
        return int(self.tables["inv"][a])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def pow(self, a: int, k: int) -> int:
        x = self.identity
        for _ in range(k % self.element_order(a)):
            x = self.mul(x, a)
        return x

    def exponent(self) -> int:
        if self._exponent is None:
            self._exponent = reduce(math.lcm, (self.element_order(a) for a in range(self.size)), 1)
        return self._exponent

    def generating_set(self) -> tuple[int, ...]:
        if self.generators is None:
            self.generators = greedy_generators(self)
        return self.generators


def from_table(mul: Sequence[Sequence[int]] | np.ndarray, name: str = "",
               labels: Sequence[str] | None = None,
               generators: Sequence[int] | None = None) -> Group:
    """Build a group from its multiplication table, deriving the inverse."""
    M = np.asarray(mul, dtype=np.int64)
    k = M.shape[0]
    r = np.arange(k)
    ids = [e for e in range(k) if (M[e] == r).all() and (M[:, e] == r).all()]
    if not ids:
        raise AlgebraError("table has no identity element")
    e = ids[0]
    inv = np.empty(k, dtype=np.int64)
    for a in range(k):
        hits = np.flatnonzero(M[a] == e)
        if len(hits) != 1:
            raise AlgebraError(f"element {a} has no unique inverse")
        inv[a] = hits[0]
    alg = make_algebra(k, GROUP, {"mul": M, "inv": inv}, labels)
    G = Group(alg, e, name, generators)
    rep = check_group(G)
    if not rep.passed:
        raise AlgebraError(f"not a group: {rep.detail}")
    return G


def check_group(G: FinAlgebra) -> Report:
    M, I = G["mul"], G["inv"]
    r = np.arange(G.size)
    x, y, z = r[:, None, None], r[None, :, None], r[None, None, :]
    bad = M[M[x, y], z] != M[x, M[y, z]]
    if bad.any():
        where = np.unravel_index(int(np.argmax(bad)), bad.shape)
        return Report("group axioms", FAIL, detail="mul not associative",
                      counterexample=[int(i) for i in where])
    e = getattr(G, "identity", None)
    if e is None:
        e = int(M[0, I[0]])
    bad = (M[e] != r) | (M[:, e] != r)
    if bad.any():
        return Report("group axioms", FAIL, detail="identity law fails",
                      counterexample={"identity": int(e), "element": int(np.argmax(bad))})
    bad = (M[r, I] != e) | (M[I, r] != e)
    if bad.any():
        return Report("group axioms", FAIL, detail="inverse law fails",
                      counterexample={"element": int(np.argmax(bad))})
    return Report("group axioms", PASS)


# --- constructors ------------------------------------------------------------

def cyclic(m: int) -> Group:
    if m < 1:
        raise AlgebraError("cyclic group order must be at least 1")
    r = np.arange(m)
    labels = ["1"] + [f"c^{i}" if i > 1 else "c" for i in range(1, m)]
    return from_table((r[:, None] + r[None, :]) % m, f"C{m}", labels, [1] if m > 1 else [])


def trivial() -> Group:
    return cyclic(1)


def dihedral(p: int) -> Group:
    """Order ``2p``: index ``k`` is ``a^k``, index ``p+k`` is ``b a^k``."""
    if p < 2:
        raise AlgebraError("dihedral parameter must be at least 2")
    M = np.empty((2 * p, 2 * p), dtype=np.int64)
    for i in range(p):
        for j in range(p):
            M[i, j] = (i + j) % p
            M[i, p + j] = p + (j - i) % p
            M[p + i, j] = p + (i + j) % p
            M[p + i, p + j] = (j - i) % p
    labels = [f"a^{k}" for k in range(p)] + [f"ba^{k}" for k in range(p)]
    labels[0] = "1"
    return from_table(M, f"D{2 * p}", labels, [1, p])


_QUAT = ["1", "i", "j", "k"]
# unit products: _QUAT_MUL[u][v] = (sign, unit)
_QUAT_MUL = [
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0)],
]


def quaternion() -> Group:
    """``Q_8``; index ``2u + s`` is ``(-1)^s`` times unit ``u`` of 1, i, j, k."""
    M = np.empty((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            (ua, sa), (ub, sb) = divmod(a, 2), divmod(b, 2)
            sign, u = _QUAT_MUL[ua][ub]
            s = (sa + sb + (sign < 0)) % 2
            M[a, b] = 2 * u + s
    labels = [("-" if s else "") + _QUAT[u] for u in range(4) for s in range(2)]
    return from_table(M, "Q8", labels, [2, 4])


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def heisenberg(p: int) -> Group:
    """Upper unitriangular 3x3 matrices mod ``p``.

    ``(x, y, z)`` stands for the matrix with ``x``, ``y`` on the superdiagonal
    and ``z`` in the corner, stored at index ``x*p^2 + y*p + z``. The
    generators are ``a = (1,0,0)`` and ``b = (0,1,0)``; ``c = (0,0,1)`` is
    their commutator, so that ``ab = bac``.
    """
    if not _is_prime(p) or p == 2:
        raise AlgebraError(f"heisenberg needs an odd prime, got {p}")
    k = p ** 3
    r = np.arange(k)
    x, y, z = r // (p * p), (r // p) % p, r % p
    X = (x[:, None] + x[None, :]) % p
    Y = (y[:, None] + y[None, :]) % p
    Z = (z[:, None] + z[None, :] + x[:, None] * y[None, :]) % p
    M = X * p * p + Y * p + Z
    labels = [f"({a},{b},{c})" for a, b, c in zip(x, y, z)]
    return from_table(M, f"H{p}", labels, [p * p, p])


def heisenberg_abc(p: int) -> tuple[int, int, int]:
    """Indices of ``a``, ``b``, ``c`` in :func:`heisenberg`."""
    return p * p, p, 1


def direct_product(G: Group, H: Group) -> Group:
    """Componentwise product; pair ``(g, h)`` has index ``g*|H| + h``."""
    m = H.size
    r = np.arange(G.size * m)
    g, h = r // m, r % m
    M = G["mul"][g[:, None], g[None, :]] * m + H["mul"][h[:, None], h[None, :]]
    labels = [f"({G.labels[i]},{H.labels[j]})" for i, j in zip(g, h)]
    gens = [a * m + H.identity for a in G.generating_set()] + \
           [G.identity * m + b for b in H.generating_set()]
    name = f"{G.name}x{H.name}" if G.name and H.name else ""
    return from_table(M, name, labels, gens)


def pair(G: Group, H: Group, g: int, h: int) -> int:
    """Index of ``(g, h)`` in ``direct_product(G, H)``."""
    return g * H.size + h


def closure(G: Group, gens: Sequence[int]) -> list[int]:
    """Sorted element indices of the subgroup generated by ``gens``."""
    seen = {G.identity}
    queue = deque([G.identity])
    M = G["mul"]
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(M[x, g])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


def subgroup_generated(G: Group, gens: Sequence[int], name: str = "") -> tuple[Group, list[int]]:
    """The subgroup generated by ``gens`` with its own dense indexing
    (increasing order of the original indices) and the inclusion map."""
    elems = closure(G, gens)
    pos = {e: i for i, e in enumerate(elems)}
    sub = G["mul"][np.ix_(elems, elems)]
    M = np.vectorize(pos.__getitem__, otypes=[np.int64])(sub) if len(elems) > 1 else np.zeros((1, 1), np.int64)
    labels = [G.labels[e] for e in elems]
    H = from_table(M, name, labels, [pos[g] for g in gens if g != G.identity])
    return H, elems


def is_abelian(G: Group) -> bool:
    M = G["mul"]
    return bool((M == M.T).all())


def commutator(G: Group, a: int, b: int) -> int:
    """``[a, b] = a^-1 b^-1 a b``."""
    return G.mul(G.mul(G.inv(a), G.inv(b)), G.mul(a, b))


def commutator_subgroup(G: Group, A: Sequence[int], B: Sequence[int]) -> list[int]:
    return closure(G, sorted({commutator(G, a, b) for a in A for b in B}))


def lower_central_series(G: Group) -> list[list[int]]:
    series = [list(range(G.size))]
    while True:
        nxt = commutator_subgroup(G, series[0], series[-1])
        if nxt == series[-1]:
            return series
        series.append(nxt)


def nilpotency_class(G: Group) -> int | None:
    """Least ``c`` with trivial ``gamma_{c+1}``; ``None`` if not nilpotent."""
    series = lower_central_series(G)
    if len(series[-1]) != 1:
        return None
    return len(series) - 1


def greedy_generators(G: Group) -> tuple[int, ...]:
    """A small generating set: an exhaustive try of 1 and 2 generators,
    falling back to greedy growth by largest element order."""
    if G.size == 1:
        return ()
    orders = [G.element_order(a) for a in range(G.size)]
    if max(orders) == G.size:
        return (orders.index(G.size),)
    by_order = sorted(range(G.size), key=lambda a: (-orders[a], a))
    if G.size <= 128:
        for i, a in enumerate(by_order):
            for b in by_order[i + 1:]:
                if len(closure(G, [a, b])) == G.size:
                    return (a, b)
    gens: list[int] = []
    span = [G.identity]
    while len(span) < G.size:
        inside = set(span)
        best = max((a for a in by_order if a not in inside),
                   key=lambda a: len(closure(G, gens + [a])))
        gens.append(best)
        span = closure(G, gens)
    return tuple(gens)


# --- named groups -------------------------------------------------------------

def heisenberg_tilde(p: int) -> Group:
    """Subgroup of ``H_p x C_{p^2}`` generated by ``(a, c)`` and ``(b, 1)``."""
    H, C = heisenberg(p), cyclic(p * p)
    P = direct_product(H, C)
    a, b, _ = heisenberg_abc(p)
    sub, _ = subgroup_generated(P, [pair(H, C, a, 1), pair(H, C, b, 0)], f"Htilde{p}")
    return sub


def dihedral_tilde(p: int) -> Group:
    """Subgroup of ``D_{2p} x C_{4p}`` generated by ``(a, 1)`` and ``(b, c^p)``."""
    D, C = dihedral(p), cyclic(4 * p)
    P = direct_product(D, C)
    sub, _ = subgroup_generated(P, [pair(D, C, 1, 0), pair(D, C, p, p)], f"Dtilde{2 * p}")
    return sub


_NAME = re.compile(r"^(C|D|Q|H|Htilde|Dtilde|E)(\d*)$")


def named_group(spec: str) -> Group:
    """Parse names like ``C4``, ``D6`` (order 6), ``Q8``, ``H3``, ``Htilde3``,
    ``Dtilde6``, ``E`` and products ``H3xC9``."""
    parts = spec.strip().split("x")
    if len(parts) > 1:
        G = named_group(parts[0])
        for part in parts[1:]:
            G = direct_product(G, named_group(part))
        G.name = spec.strip()
        return G
    m = _NAME.match(spec.strip())
    if not m:
        raise AlgebraError(f"unknown group name {spec!r}")
    kind, num = m.group(1), m.group(2)
    k = int(num) if num else None
    if kind == "E":
        G = trivial()
        G.name = "E"
        return G
    if k is None:
        raise AlgebraError(f"group name {spec!r} needs a number")
    if kind == "C":
        return cyclic(k)
    if kind == "D":
        if k % 2:
            raise AlgebraError("dihedral names use the group order, which is even")
        return dihedral(k // 2)
    if kind == "Q":
        if k != 8:
            raise AlgebraError("only Q8 is available")
        return quaternion()
    if kind == "H":
        return heisenberg(k)
    if kind == "Htilde":
        return heisenberg_tilde(k)
    if k % 2:
        raise AlgebraError("Dtilde names use the order of the dihedral factor")
    return dihedral_tilde(k // 2)
