import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatcliff.constructions import flat, product, with_clifford_inverse
from flatcliff.core import AlgebraError, SEMIRING, make_algebra
from flatcliff.groups import cyclic, quaternion
from flatcliff.terms import (Add, Exp, Identity, Inv, Mul, ParseError, Pow, QuasiIdentity, Var,
                             builtin_schemas, evaluate, parse, parse_identity,
                             parse_term, satisfies, schema, schema_keys, to_str)

import oracles

VARS = ("x", "y", "z", "u")


def random_exp(rng):
    kind = rng.randrange(3)
    if kind == 0:
        return Exp(0, rng.randint(1, 4))
    if kind == 1:
        return Exp(1, 0)
    return Exp(rng.randint(1, 3), rng.randint(0, 3))


def random_term(rng, depth, group=False):
    if depth == 0 or rng.random() < 0.25:
        t = Var(rng.choice(VARS))
        if group and rng.random() < 0.2:
            t = Inv(t)
        return t
    kind = rng.randrange(5 if group else 4)
    if kind == 0:
        return Add(random_term(rng, depth - 1, group), random_term(rng, depth - 1, group))
    if kind == 1:
        left = random_term(rng, depth - 1, group)
        if rng.random() < 0.15:
            return Mul(left, Pow(Var(rng.choice(VARS)), Exp(0, 0)))
        return Mul(left, random_term(rng, depth - 1, group))
    if kind == 2:
        return Pow(random_term(rng, depth - 1, group), random_exp(rng))
    if kind == 3:
        return Var(rng.choice(VARS))
    return Inv(random_term(rng, depth - 1, group))


def as_tuple(t):
    if isinstance(t, Var):
        return ("var", t.name)
    if isinstance(t, Add):
        return ("add", as_tuple(t.left), as_tuple(t.right))
    if isinstance(t, Mul):
        return ("mul", as_tuple(t.left), as_tuple(t.right))
    if isinstance(t, Pow):
        return ("pow", as_tuple(t.base), t.exp.a, t.exp.b)
    return ("inv", as_tuple(t.arg))


def test_parse_distributivity():
    ident = parse("x*(y+z) = x*y + x*z")
    assert ident == Identity(Mul(Var("x"), Add(Var("y"), Var("z"))),
                             Add(Mul(Var("x"), Var("y")), Mul(Var("x"), Var("z"))))


def test_parse_affine_exponent():
    ident = parse("x^(n+1) = x")
    assert ident.lhs == Pow(Var("x"), Exp(1, 1))
    assert parse_term("x^(2*n-1)").exp == Exp(2, -1)
    assert parse_term("x^n").exp == Exp(1, 0)
    assert parse_term("x^(3)").exp == Exp(0, 3)


def test_parse_quasi_identity():
    q = parse("x*y = y*x & x^2 = x -> x = y", "quasi-identity")
    assert isinstance(q, QuasiIdentity)
    assert len(q.premises) == 2
    assert str(q.conclusion) == "x = y"


@pytest.mark.parametrize("text,msg", [
    ("x y = x", "juxtaposition"),
    ("x' = x", "group dialect"),
    ("x^0 = x", "exponent 0"),
    ("x + = y", "expected a variable"),
    ("(x + y = x", r"expected '\)'"),
    ("x^(m+1) = x", "expected 'n'"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ParseError, match=msg):
        parse(text)


def test_group_dialect_inverse():
    t = parse_term("(x*y)'*x", "group")
    assert t == Mul(Inv(Mul(Var("x"), Var("y"))), Var("x"))


def test_round_trip_random_terms():
    rng = random.Random(2024)
    for i in range(1000):
        group = i % 2 == 1
        t = random_term(rng, 4, group)
        text = to_str(t)
        assert parse_term(text, "group" if group else "semiring") == t, text


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_round_trip_identities(seed):
    rng = random.Random(seed)
    ident = Identity(random_term(rng, 3), random_term(rng, 3))
    assert parse_identity(str(ident)) == ident


def test_evaluation_matches_naive_evaluator():
    rng = random.Random(11)
    S = with_clifford_inverse(flat(cyclic(6)), 6)
    add, mul, inv = S["add"].tolist(), S["mul"].tolist(), S["inv"].tolist()
    for _ in range(400):
        t = random_term(rng, 4, group=True)
        env = {v: rng.randrange(S.size) for v in VARS}
        for n in (1, 2, 6):
            assert evaluate(S, t, env, n) == oracles.evaluate_naive(add, mul, inv, as_tuple(t), env, n)


def test_eval_examples():
    S = flat(cyclic(3))
    for x in range(S.size):
        assert evaluate(S, "x + x", {"x": x}) == x
        for y in range(S.size):
            assert evaluate(S, "x*y^0", {"x": x, "y": y}, n=2) == x
    with pytest.raises(AlgebraError, match="unbound"):
        evaluate(S, "x*y^0", {"x": 1})


def test_satisfies_examples():
    assert satisfies(flat(cyclic(3)), "x = x^(n+1)", n=3).passed
    assert satisfies(flat(cyclic(2)), "x^n + y^n = x^n*y^n", n=2).passed
    C2 = cyclic(2)
    both = make_algebra(2, SEMIRING, {"add": C2["mul"], "mul": C2["mul"]})
    assert satisfies(both, "x + y = x*y").passed
    from flatcliff.core import check_ai_semiring
    assert not check_ai_semiring(both).passed


def test_satisfies_counterexample_is_least():
    S = flat(cyclic(2))
    rep = satisfies(S, "x = x^(n+1)", n=1)
    assert rep.verdict == "fail"
    assert rep.counterexample == {"x": 2}


def test_satisfies_agrees_with_brute_force():
    rng = random.Random(5)
    S = flat(product(cyclic(2), cyclic(2)))
    add, mul = S["add"].tolist(), S["mul"].tolist()
    for _ in range(80):
        ident = Identity(random_term(rng, 3), random_term(rng, 3))
        names = ident.variables()
        for n in (1, 2):
            truth = True
            for vals in np.ndindex(*(S.size,) * len(names)):
                env = dict(zip(names, map(int, vals)))
                lhs = oracles.evaluate_naive(add, mul, None, as_tuple(ident.lhs), env, n)
                rhs = oracles.evaluate_naive(add, mul, None, as_tuple(ident.rhs), env, n)
                if lhs != rhs:
                    truth = False
                    break
            assert satisfies(S, ident, n).passed == truth


def test_quasi_identity_premises_filter():
    G = cyclic(4)
    S = make_algebra(4, [("mul", 2)], {"mul": G["mul"]})
    assert satisfies(S, "x*x = y*y -> x = y").verdict == "fail"
    assert satisfies(S, "x*y = x -> y = y*y").passed


def test_budget_gives_unknown():
    rep = satisfies(flat(quaternion()), "x*y*z = z*y*x", budget=100)
    assert rep.verdict == "unknown" and rep.detail == "budget exceeded"


def test_schema_library():
    assert str(schema("center")[0]) == "x*y^n = y^n*x"
    assert str(schema("summing")[0]) == "x + y = (x*y^(n-1) + (x*y^(n-1))^n)*y"
    assert schema("srn")[0] == parse_identity("x = x^(n+1)")
    lib = builtin_schemas(3)
    for key in ("srn", "mn", "center", "summing", "new1", "natordern", "natorder-clifford"):
        assert key in lib
    assert set(lib) == set(schema_keys())
    with pytest.raises(KeyError):
        schema("no-such-schema")


def test_srn_with_n_one_is_x_equals_x_squared():
    S = flat(cyclic(2))
    ident = schema("srn")[0]
    assert satisfies(S, ident, 1).passed == satisfies(S, "x = x^2").passed
