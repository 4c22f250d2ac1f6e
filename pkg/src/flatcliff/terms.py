"""Semiring and group terms with a symbolic exponent parameter ``n``.

Grammar (whitespace insignificant)::

    term     := sum
    sum      := prod ("+" prod)*
    prod     := pow ("*" pow)*
    pow      := atom ("^" exp)?
    atom     := var | "(" term ")" | atom "'"        (inverse: group dialect)
    exp      := int | "n" | "(" affine ")"
    affine   := [int "*"] "n" [("+"|"-") int] | int
    identity := term "=" term
    quasi    := identity ("&" identity)* "->" identity

Products must be written with ``*``; juxtaposition is rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

import numpy as np

from .core import AlgebraError, FinAlgebra, resolve_budget
from .report import FAIL, PASS, UNKNOWN, Report


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Exp:
    """Affine exponent ``a*n + b``."""
    a: int = 0
    b: int = 0

    def value(self, n: int) -> int:
        return self.a * n + self.b

    def __str__(self) -> str:
        if self.a == 0:
            return str(self.b)
        if self.a == 1 and self.b == 0:
            return "n"
        s = "n" if self.a == 1 else f"{self.a}*n"
        if self.b > 0:
            s += f"+{self.b}"
        elif self.b < 0:
            s += f"-{-self.b}"
        return f"({s})"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul:
    left: Term
    right: Term


@dataclass(frozen=True)
class Pow:
    base: Term
    exp: Exp


@dataclass(frozen=True)
class Inv:
    arg: Term


Term = Union[Var, Add, Mul, Pow, Inv]


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{to_str(self.lhs)} = {to_str(self.rhs)}"

    def variables(self) -> list[str]:
        return sorted(variables(self.lhs) | variables(self.rhs))


@dataclass(frozen=True)
class QuasiIdentity:
    premises: tuple[Identity, ...]
    conclusion: Identity

    def __str__(self) -> str:
        if not self.premises:
            return str(self.conclusion)
        return " & ".join(map(str, self.premises)) + " -> " + str(self.conclusion)

    def variables(self) -> list[str]:
        vs: set[str] = set(self.conclusion.variables())
        for p in self.premises:
            vs |= set(p.variables())
        return sorted(vs)


def variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (Add, Mul)):
        return variables(t.left) | variables(t.right)
    if isinstance(t, Pow):
        return variables(t.base)
    return variables(t.arg)


def uses_inverse(t: Term) -> bool:
    if isinstance(t, Inv):
        return True
    if isinstance(t, (Add, Mul)):
        return uses_inverse(t.left) or uses_inverse(t.right)
    if isinstance(t, Pow):
        return uses_inverse(t.base)
    return False


# --- printer ---------------------------------------------------------------

def to_str(t: Term) -> str:
    """Print so that :func:`parse` rebuilds exactly the same tree."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Add):
        right = to_str(t.right)
        if isinstance(t.right, Add):
            right = f"({right})"
        return f"{to_str(t.left)} + {right}"
    if isinstance(t, Mul):
        left, right = to_str(t.left), to_str(t.right)
        if isinstance(t.left, Add):
            left = f"({left})"
        if isinstance(t.right, (Add, Mul)):
            right = f"({right})"
        return f"{left}*{right}"
    if isinstance(t, Pow):
        base = to_str(t.base)
        if not isinstance(t.base, (Var, Inv)):
            base = f"({base})"
        return f"{base}^{t.exp}"
    inner = to_str(t.arg)
    if not isinstance(t.arg, (Var, Inv)):
        inner = f"({inner})"
    return f"{inner}'"


# --- parser ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(->)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            toks.append(("int", m.group(1), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        elif m.group(3):
            toks.append(("op", "->", start))
        elif m.group(4):
            toks.append(("op", m.group(4), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, dialect: str):
        if dialect not in ("semiring", "group"):
            raise ValueError(f"unknown dialect {dialect!r}")
        self.toks = _tokenize(text)
        self.i = 0
        self.dialect = dialect

    @property
    def tok(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.tok[2])

    def accept(self, value: str) -> bool:
        if self.tok[0] == "op" and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> None:
        if not self.accept(value):
            got = self.tok[1] or "end of input"
            raise self.error(f"expected {value!r}, got {got!r}")

    def finish(self) -> None:
        if self.tok[0] != "end":
            raise self.error(f"unexpected {self.tok[1]!r}")

    def term(self) -> Term:
        t = self.prod()
        while self.accept("+"):
            t = Add(t, self.prod())
        return t

    def prod(self) -> Term:
        start = self.tok[2]
        t = self.pow()
        if isinstance(t, Pow) and t.exp == Exp(0, 0):
            raise ParseError("exponent 0 outside product context", start)
        while self.accept("*"):
            t = Mul(t, self.pow())
        return t

    def pow(self) -> Term:
        start = self.tok[2]
        t = self.atom()
        if self.accept("^"):
            e = self.exp()
            if e.a == 0 and e.b < 0:
                raise ParseError("negative exponent", start)
            t = Pow(t, e)
        return t

    def atom(self) -> Term:
        kind, val, _ = self.tok
        if kind == "name":
            self.i += 1
            t: Term = Var(val)
        elif self.accept("("):
            t = self.term()
            self.expect(")")
        else:
            raise self.error(f"expected a variable or '(', got {val or 'end of input'!r}")
        while self.tok[0] == "op" and self.tok[1] == "'":
            if self.dialect != "group":
                raise self.error("inverse is only available in the group dialect")
            self.i += 1
            t = Inv(t)
        if self.tok[0] in ("name", "int") or (self.tok[0] == "op" and self.tok[1] == "("):
            raise self.error("juxtaposition is not allowed, use '*'")
        return t

    def integer(self) -> int:
        kind, val, _ = self.tok
        if kind != "int":
            raise self.error(f"expected an integer, got {val or 'end of input'!r}")
        self.i += 1
        return int(val)

    def exp(self) -> Exp:
        kind, val, _ = self.tok
        if kind == "int":
            return Exp(0, self.integer())
        if kind == "name" and val == "n":
            self.i += 1
            return Exp(1, 0)
        self.expect("(")
        e = self.affine()
        self.expect(")")
        return e

    def affine(self) -> Exp:
        a = 1
        if self.tok[0] == "int":
            c = self.integer()
            if not self.accept("*"):
                return Exp(0, c)
            a = c
        kind, val, _ = self.tok
        if not (kind == "name" and val == "n"):
            raise self.error("expected 'n' in exponent")
        self.i += 1
        b = 0
        if self.accept("+"):
            b = self.integer()
        elif self.accept("-"):
            b = -self.integer()
        return Exp(a, b)

    def identity(self) -> Identity:
        lhs = self.term()
        self.expect("=")
        return Identity(lhs, self.term())

    def quasi(self) -> QuasiIdentity:
        first = self.identity()
        if self.tok[0] == "end":
            return QuasiIdentity((), first)
        prem = [first]
        while self.accept("&"):
            prem.append(self.identity())
        self.expect("->")
        return QuasiIdentity(tuple(prem), self.identity())


def parse(text: str, kind: str = "identity", dialect: str = "semiring"):
    """Parse ``text`` as a ``"term"``, ``"identity"`` or ``"quasi-identity"``."""
    p = _Parser(text, dialect)
    if kind == "term":
        out = p.term()
    elif kind == "identity":
        out = p.identity()
    elif kind in ("quasi-identity", "quasi"):
        out = p.quasi()
    else:
        raise ValueError(f"unknown kind {kind!r}")
    p.finish()
    return out


def parse_term(text: str, dialect: str = "semiring") -> Term:
    return parse(text, "term", dialect)


def parse_identity(text: str, dialect: str = "semiring") -> Identity:
    return parse(text, "identity", dialect)


def parse_quasi(text: str, dialect: str = "semiring") -> QuasiIdentity:
    return parse(text, "quasi-identity", dialect)


# --- evaluation ------------------------------------------------------------

def _power_vec(M: np.ndarray, x: np.ndarray, e: int) -> np.ndarray:
    out = x
    for _ in range(e - 1):
        out = M[out, x]
    return out


def eval_vec(S: FinAlgebra, t: Term, env: Mapping[str, np.ndarray], n: int) -> np.ndarray:
    """Evaluate ``t`` elementwise over broadcastable arrays of elements."""
    if isinstance(t, Var):
        if t.name not in env:
            raise AlgebraError(f"unbound variable {t.name!r}")
        return env[t.name]
    if isinstance(t, Add):
        return S["add"][eval_vec(S, t.left, env, n), eval_vec(S, t.right, env, n)]
    if isinstance(t, Mul):
        if isinstance(t.right, Pow) and t.right.exp.value(n) == 0:
            # u*v^0 = u, but v's variables must still be bound
            for name in variables(t.right):
                if name not in env:
                    raise AlgebraError(f"unbound variable {name!r}")
            return eval_vec(S, t.left, env, n)
        return S["mul"][eval_vec(S, t.left, env, n), eval_vec(S, t.right, env, n)]
    if isinstance(t, Pow):
        e = t.exp.value(n)
        if e < 1:
            raise AlgebraError(f"exponent {t.exp} = {e} for n={n} outside product context")
        return _power_vec(S["mul"], eval_vec(S, t.base, env, n), e)
    return S["inv"][eval_vec(S, t.arg, env, n)]


def evaluate(S: FinAlgebra, t: Term | str, assignment: Mapping[str, int], n: int = 1) -> int:
    """Value of ``t`` under ``assignment`` (variable name -> element index)."""
    if isinstance(t, str):
        t = parse_term(t, "group" if "'" in t else "semiring")
    if n < 1:
        raise AlgebraError("n must be at least 1")
    env = {k: np.asarray(v) for k, v in assignment.items()}
    return int(eval_vec(S, t, env, n))


def _as_quasi(phi) -> QuasiIdentity:
    if isinstance(phi, QuasiIdentity):
        return phi
    if isinstance(phi, Identity):
        return QuasiIdentity((), phi)
    if isinstance(phi, str):
        return parse_quasi(phi, "group" if "'" in phi else "semiring")
    raise TypeError(f"cannot check {type(phi).__name__}")


_CHUNK = 1 << 22


def _assignment_chunks(k: int, nvars: int) -> Iterator[tuple[int, list[np.ndarray]]]:
    """Yield (offset, grids) covering all assignments in lexicographic order."""
    if nvars == 0:
        yield 0, []
        return
    total = k ** nvars
    step = max(1, min(total, _CHUNK))
    for start in range(0, total, step):
        idx = np.arange(start, min(total, start + step), dtype=np.int64)
        grids = []
        rest = idx
        for j in range(nvars - 1, -1, -1):
            grids.append(rest % k)
            rest = rest // k
        yield start, grids[::-1]


def satisfies(S: FinAlgebra, phi, n: int = 1, budget: int | None = None,
              claim: str | None = None) -> Report:
    """Exhaustive check of an identity or quasi-identity.

    Assignments violating a premise are skipped. On failure the
    lexicographically least failing assignment (variables in sorted order)
    is reported. When ``k**v`` exceeds the budget the verdict is
    ``unknown`` with detail ``"budget exceeded"``.
    """
    q = _as_quasi(phi)
    if n < 1:
        raise AlgebraError("n must be at least 1")
    names = q.variables()
    total = S.size ** len(names)
    claim = claim or str(q)
    if total > resolve_budget(budget):
        return Report(claim, UNKNOWN, detail="budget exceeded",
                      config={"assignments": total, "budget": resolve_budget(budget)})
    for start, grids in _assignment_chunks(S.size, len(names)):
        env = dict(zip(names, grids))
        if not names:
            env = {}
        ok = np.ones(grids[0].shape if grids else (), dtype=bool)
        for prem in q.premises:
            ok = ok & (eval_vec(S, prem.lhs, env, n) == eval_vec(S, prem.rhs, env, n))
        bad = ok & (eval_vec(S, q.conclusion.lhs, env, n) != eval_vec(S, q.conclusion.rhs, env, n))
        bad = np.atleast_1d(bad)
        if bad.any():
            i = int(np.argmax(bad))
            cex = {v: int(np.atleast_1d(g)[i]) for v, g in zip(names, grids)}
            return Report(claim, FAIL, counterexample=cex, config={"n": n})
    return Report(claim, PASS, config={"n": n})


def holds(S: FinAlgebra, phi, n: int = 1) -> bool:
    return satisfies(S, phi, n).passed


# --- schema library --------------------------------------------------------

def _m(w: str) -> str:
    return f"({w} + ({w})^n)"


_SCHEMA_TEXT: dict[str, tuple[str, ...]] = {
    # x = x^{n+1}
    "srn": ("x = x^(n+1)",),
    # (xy)^n = x^n y^n
    "cryptic": ("(x*y)^n = x^n*y^n",),
    # M(x) = x M(x) = M(x) x = M(x)^2
    "m-chain": (f"{_m('x')} = x*{_m('x')}",
                f"{_m('x')} = {_m('x')}*x",
                f"{_m('x')} = {_m('x')}^2"),
    "mn": ("x^n + y^n = x^n*y^n",),
    "dupl": ("x + y = x*y",),
    "center": ("x*y^n = y^n*x",),
    "summing": (f"x + y = {_m('x*y^(n-1)')}*y",),
    "new1": ("x + y = x*y^n + x^n*y",),
    "natordern": ("x + y = x*(x + y)^n",),
    "natorder-clifford": ("x + y = x*(x + y)'*(x + y)",),
    "commuting-idempotents": ("x^n*y^n = y^n*x^n",),
    # e := M(y x^{n-1}); x + y = e x,  e(x+y) = e^2 x = e x = x + y
    "e-chain": (f"x + y = {_m('y*x^(n-1)')}*x",
                f"{_m('y*x^(n-1)')}*(x + y) = {_m('y*x^(n-1)')}^2*x",
                f"{_m('y*x^(n-1)')}^2*x = {_m('y*x^(n-1)')}*x",
                f"x + y = x*{_m('y*x^(n-1)')}"),
    "square-sum": ("(x^n + y^n)^2 = x^n + y^n",
                   "x^n + y^n = x^n*(x^n + y^n)",
                   "x^n + y^n = y^n*(x^n + y^n)"),
    "product-expansion": (
        "(x^n + y^n)^2 = x^n*(x^n + y^n)*(y^n*(x^n + y^n))",
        "x^n*(x^n + y^n)*(y^n*(x^n + y^n)) = "
        "(x^n)^2*y^n*x^n + (x^n)^2*(y^n)^2 + x^n*(y^n)^2*x^n + x^n*(y^n)^3"),
}

_DIALECT = {"natorder-clifford": "group"}


def schema_keys() -> list[str]:
    return sorted(_SCHEMA_TEXT) + ["m-expansion", "summing-expanded"]


def schema(key: str, n: int | None = None) -> tuple[Identity, ...]:
    """Identities stored under ``key``.

    Most schemas are symbolic in ``n``. Two need the concrete value:
    ``m-expansion`` (``x + x^n = x + x^2 + ... + x^n``) and
    ``summing-expanded`` (``M(x y^{n-1}) y = x y^n + x^n y^{n(n-1)+1}``).
    """
    if key in _SCHEMA_TEXT:
        dialect = _DIALECT.get(key, "semiring")
        return tuple(parse_identity(s, dialect) for s in _SCHEMA_TEXT[key])
    if key == "m-expansion":
        if n is None:
            raise KeyError("schema 'm-expansion' needs a concrete n")
        rhs = " + ".join("x" if i == 1 else f"x^{i}" for i in range(1, n + 1))
        return (parse_identity(f"x + x^n = {rhs}"),)
    if key == "summing-expanded":
        if n is None:
            raise KeyError("schema 'summing-expanded' needs a concrete n")
        return (parse_identity(f"{_m('x*y^(n-1)')}*y = x*y^n + x^n*y^{n * (n - 1) + 1}"),)
    raise KeyError(f"unknown schema key {key!r}")


def builtin_schemas(n: int | None = None) -> dict[str, tuple[Identity, ...]]:
    out = {k: schema(k) for k in _SCHEMA_TEXT}
    if n is not None:
        out["m-expansion"] = schema("m-expansion", n)
        out["summing-expanded"] = schema("summing-expanded", n)
    return out


def check_schema(S: FinAlgebra, key: str, n: int, budget: int | None = None) -> Report:
    from .report import combine
    reps = [satisfies(S, ident, n, budget=budget) for ident in schema(key, n)]
    return combine(f"schema {key}", reps, config={"n": n})
