"""The shipped fixture corpus: named groups, their flat extensions, small
products of flat extensions and the order-4 censuses."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .constructions import flat, product
from .core import FinAlgebra, in_class
from .enumerate import _ai_census
from .groups import Group, named_group

# every named group of order at most 72 used by the pentagons and witness checks,
# plus a few small groups for variety
CORPUS_GROUPS = ("E", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12",
                 "C2xC2", "C3xC3", "Q8", "D6", "D8", "D10", "H3", "Dtilde6", "D6xC12")
# the groups whose flat extensions must be simple
SIMPLICITY_GROUPS = ("C2", "C3", "C4", "C6", "Q8", "D6", "H3")
# the largest size for fixtures that need the full congruence lattice
CONGRUENCE_SIZE = 12


@dataclass(frozen=True)
class Fixture:
    name: str
    algebra: FinAlgebra


@lru_cache(maxsize=None)
def group(name: str) -> Group:
    G = named_group(name)
    G.name = name
    return G


@lru_cache(maxsize=None)
def flat_of(name: str) -> FinAlgebra:
    return flat(group(name))


def groups_of_exponent_dividing(n: int, max_order: int | None = None) -> list[str]:
    out = []
    for name in CORPUS_GROUPS:
        G = group(name)
        if n % G.exponent() == 0 and (max_order is None or G.size <= max_order):
            out.append(name)
    return out


def census_fixtures(max_order: int = 4) -> list[Fixture]:
    """Every ai-semiring of order at most ``max_order``, named by order and
    position in the canonical census."""
    return [Fixture(f"census{k}#{i}", S)
            for k in range(1, max_order + 1) for i, S in enumerate(_ai_census(k))]


@lru_cache(maxsize=None)
def _semiring_fixtures(n: int, max_size: int) -> tuple[Fixture, ...]:
    names = groups_of_exponent_dividing(n)
    flats = [Fixture(f"flat({g})", flat_of(g)) for g in names if group(g).size + 1 <= max_size]
    prods = []
    for i, a in enumerate(flats):
        for b in flats[i:]:
            if a.algebra.size * b.algebra.size <= max_size:
                prods.append(Fixture(f"{a.name}x{b.name}", product(a.algebra, b.algebra)))
    return tuple(flats + prods + census_fixtures())


def semiring_fixtures(n: int, cls: str = "Sr", max_size: int = CONGRUENCE_SIZE) -> list[Fixture]:
    """Fixtures lying in ``Sr_n`` or ``M_n``: flat extensions of corpus groups
    of exponent dividing ``n``, their pairwise products, and census members."""
    return [f for f in _semiring_fixtures(n, max_size) if in_class(f.algebra, cls, n)]


def exponent_lcm(names) -> int:
    return math.lcm(*(group(g).exponent() for g in names))
