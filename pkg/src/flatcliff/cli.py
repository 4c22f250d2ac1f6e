"""Command-line driver.

Exit codes: 0 when every verdict is pass, assumed or inapplicable; 1 when any
verdict is fail; 2 when none fails but some is unknown; 3 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from .core import AlgebraError, FinAlgebra, check_ai_semiring, from_json, resolve_budget
from .terms import ParseError
from .report import (ASSUMED, FAIL, INAPPLICABLE, PASS, REPORT_SCHEMA_VERSION, UNKNOWN,
                     Report)

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- algebra expressions -----------------------------------------------------------------

def _split_args(body: str) -> list[str]:
    depth, start, out = 0, 0, []
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append(body[start:i].strip())
            start = i + 1
    out.append(body[start:].strip())
    return out


_CALL = re.compile(r"^(\w+)\((.*)\)$", re.S)


def build_algebra(expr: str) -> FinAlgebra:
    """Algebras from expressions: ``C3``, ``H3xC9``, ``flat(C3)``, ``ps(C2)``,
    ``prod(flat(C2), flat(C3))``, ``quot(flat(C2)xflat(C2)... , cong#i)``,
    ``census(order, index)`` and paths to JSON algebra files."""
    from .congruences import all_congruences
    from .constructions import flat, pointed_semidiscriminator, product, quotient
    from .enumerate import _ai_census
    from .groups import named_group

    expr = expr.strip()
    m = _CALL.match(expr)
    if m:
        fn, args = m.group(1), _split_args(m.group(2))
        if fn == "flat" and len(args) == 1:
            return flat(named_group(args[0]))
        if fn == "ps" and len(args) == 1:
            return pointed_semidiscriminator(named_group(args[0]))
        if fn == "prod" and len(args) == 2:
            return product(build_algebra(args[0]), build_algebra(args[1]))
        if fn == "quot" and len(args) == 2:
            S = build_algebra(args[0])
            cm = re.fullmatch(r"cong#(\d+)", args[1])
            if not cm:
                raise UsageError(f"expected cong#i, got {args[1]!r}")
            lat = all_congruences(S, bound=max(12, S.size))
            i = int(cm.group(1))
            if i >= len(lat):
                raise UsageError(f"cong#{i} out of range: {len(lat)} congruences")
            return quotient(S, lat.congruences[i])[0]
        if fn == "census" and len(args) == 2:
            members = _ai_census(int(args[0]))
            return members[int(args[1])]
        raise UsageError(f"cannot build {expr!r}")
    path = Path(expr)
    if expr.endswith(".json") or path.exists():
        if not path.exists():
            raise UsageError(f"no such file: {expr}")
        return from_json(path.read_text())
    return named_group(expr)


# --- output -------------------------------------------------------------------------------

def exit_code(rep: Report) -> int:
    verdicts = set(_all_verdicts(rep))
    if FAIL in verdicts:
        return EXIT_FAIL
    if UNKNOWN in verdicts:
        return EXIT_UNKNOWN
    return EXIT_OK


def _all_verdicts(rep: Report):
    yield rep.verdict
    for c in rep.children:
        yield from _all_verdicts(c)


def _print(rep: Report, depth: int, indent: int = 0, out=None) -> None:
    out = out or sys.stdout
    pad = "  " * indent
    line = f"{pad}[{rep.verdict.upper():>12}] {rep.claim}"
    if rep.detail:
        line += f": {rep.detail}"
    print(line, file=out)
    if rep.counterexample is not None and rep.verdict != PASS:
        print(f"{pad}    counterexample: {json.dumps(_plain(rep.counterexample), sort_keys=True)}",
              file=out)
    for c in rep.children:
        if indent + 1 <= depth or c.verdict in (FAIL, UNKNOWN, ASSUMED):
            _print(c, depth, indent + 1, out)


def _plain(x):
    from .report import _plain as p
    return p(x)


def emit(rep: Report, args, command: str) -> int:
    if args.json != "-":
        _print(rep, args.depth)
    if args.json:
        doc = {"schema_version": REPORT_SCHEMA_VERSION, "command": command,
               "report": rep.to_dict(timing=args.timing)}
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text)
    return exit_code(rep)


# --- subcommands ----------------------------------------------------------------------------

def cmd_check(args) -> Report:
    from .terms import check_schema, parse, satisfies
    S = build_algebra(args.algebra)
    if args.schema:
        rep = check_schema(S, args.schema, args.n, budget=args.budget)
        rep.claim = f"{args.algebra} satisfies {args.schema} (n={args.n})"
        return rep
    if args.identity:
        dialect = "group" if "'" in args.identity else "semiring"
        kind = "quasi-identity" if "->" in args.identity else "identity"
        phi = parse(args.identity, kind, dialect)
        return satisfies(S, phi, args.n, budget=args.budget,
                         claim=f"{args.algebra} satisfies {args.identity} (n={args.n})")
    raise UsageError("check needs --schema or --identity")


def cmd_axioms(args) -> Report:
    from .groups import check_group
    S = build_algebra(args.algebra)
    names = set(S.signature.names())
    if {"add", "mul"} <= names:
        rep = check_ai_semiring(S)
    elif names == {"mul", "inv"}:
        rep = check_group(S)
    else:
        rep = Report("axioms", INAPPLICABLE, "signature is neither a semiring nor a group: "
                     + ", ".join(sorted(names)))
    rep.claim = f"{args.algebra}: {rep.claim}"
    if args.cls:
        from .core import check_in_class
        from .report import combine
        return combine(f"axioms {args.algebra} class={args.cls}",
                       [rep, check_in_class(S, args.cls, args.n, args.budget)])
    return rep


def cmd_congruences(args) -> Report:
    from .congruences import all_congruences, monolith
    S = build_algebra(args.algebra)
    lat = all_congruences(S, bound=args.bound)
    mono = monolith(S)
    children = [Report(f"cong#{i}", PASS, f"{t.num_blocks} blocks", witness=t.to_json())
                for i, t in enumerate(lat.congruences)]
    return Report(f"congruences of {args.algebra}", PASS,
                  f"{len(lat)} congruences; simple={len(lat) == 2}; "
                  f"subdirectly irreducible={mono is not None}",
                  witness={"count": len(lat), "monolith": mono.to_json() if mono else None},
                  children=children)


def cmd_classify(args) -> Report:
    from .congruences import check_subdirect_decomposition, classify_si
    S = build_algebra(args.algebra)
    rep = classify_si(S, args.n)
    rep.claim = f"{args.algebra}: si-classification (n={args.n})"
    if rep.witness:
        rep.detail = ", ".join(f"{k}={v}" for k, v in rep.witness.items())
    children = [rep]
    if S.size > 1 and rep.verdict != INAPPLICABLE:
        children.append(check_subdirect_decomposition(S, args.n))
    from .report import combine
    return combine(f"classify {args.algebra}", children)


def cmd_qvar(args) -> Report:
    from . import quasivar as qv
    action, names = args.action, args.groups
    need = {"le": 2, "in": 2, "relation": 2, "join": 3, "homs": 2, "pentagon": 0}
    if action not in need:
        raise UsageError(f"unknown qvar action {action!r}")
    if len(names) != need[action]:
        raise UsageError(f"qvar {action} takes {need[action]} groups")
    if action == "pentagon":
        return cmd_pentagon(args)
    G = [build_algebra(g) for g in names]
    for g, name in zip(G, names):
        g.name = name
    if action in ("le", "in"):
        return qv.check_membership(G[0], G[1], args.budget, args.seed)
    if action == "relation":
        rel = qv.qvar_relation(G[0], G[1], args.budget, args.seed)
        return Report(f"qvar relation {names[0]} vs {names[1]}",
                      UNKNOWN if rel == "unknown" else PASS, rel.replace("A", names[0], 1).replace("B", names[1], 1)
                      if rel in ("A<B", "B<A") else rel, witness={"relation": rel})
    if action == "join":
        return qv.check_join(G[0], G[1], G[2], args.budget, args.seed)
    res = qv.search_homomorphisms(G[0], G[1], "all", args.budget, args.seed)
    from .congruences import Partition
    meet = Partition(res.meet)
    return Report(f"Hom({names[0]}, {names[1]})", UNKNOWN if res.exhausted else PASS,
                  "budget exceeded" if res.exhausted else
                  f"{len(res.homs)} homomorphisms; kernel meet has {meet.num_blocks} blocks",
                  witness={"homs": [list(h) for h in res.homs], "kernel_meet": meet.to_json()})


def cmd_pentagon(args) -> Report:
    from .quasivar import verify_pentagon
    if args.kind is None or args.p is None:
        raise UsageError("pentagon needs --kind and --p")
    return verify_pentagon(args.kind, args.p, args.budget, args.seed, allow_p5=args.allow_p5)


def cmd_enumerate(args) -> Report:
    from .enumerate import BudgetExceeded, EnumSpec, enumerate_algebras, write_census
    if args.order is None:
        raise UsageError("enumerate needs --order")
    spec = EnumSpec(args.order, args.filter, args.n, up_to_iso=not args.labelled,
                    allow_order5=args.allow_order5, time_budget=args.time_budget)
    try:
        c = enumerate_algebras(spec, use_shipped=not args.fresh and args.order <= 4)
    except BudgetExceeded:
        return Report(f"enumerate order={args.order} filter={spec.filter}", UNKNOWN, "budget exceeded")
    if args.out:
        write_census(c, args.out)
    return Report(f"enumerate order={args.order} filter={spec.filter}"
                  + (f" n={spec.n}" if spec.filter != "all-ai" else ""), PASS,
                  f"{len(c)} algebras", witness={"count": len(c), "provenance": c.provenance})


def cmd_verify_lemmas(args) -> Report:
    from .campaigns import verify_lemmas
    return verify_lemmas(args.n, args.jobs)


def cmd_verify_theorem(args) -> Report:
    from .campaigns import verify_theorem
    return verify_theorem(args.n, args.jobs)


def cmd_verify_basis(args) -> Report:
    from .campaigns import verify_basis
    return verify_basis(args.n)


def cmd_ps_check(args) -> Report:
    from .campaigns import ps_check
    return ps_check()


COMMANDS = {
    "check": cmd_check, "axioms": cmd_axioms, "congruences": cmd_congruences,
    "classify": cmd_classify, "qvar": cmd_qvar, "pentagon": cmd_pentagon,
    "enumerate": cmd_enumerate, "verify-lemmas": cmd_verify_lemmas,
    "verify-theorem": cmd_verify_theorem, "verify-basis": cmd_verify_basis,
    "ps-check": cmd_ps_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=1, help="exponent parameter n (default 1)")
    common.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
    common.add_argument("--budget", type=int, default=None,
                        help="evaluation budget (default 1e8, or $FLATCLIFF_BUDGET)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=None, help="shuffle hom-search order")
    common.add_argument("--depth", type=int, default=1, help="report levels to print")
    common.add_argument("--timing", action="store_true", help="include timings in JSON")

    p = _Parser(prog="flatcliff", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("check", parents=[common], help="check one schema or identity on an algebra")
    s.add_argument("--algebra", required=True)
    s.add_argument("--schema")
    s.add_argument("--identity")

    s = sub.add_parser("axioms", parents=[common], help="ai-semiring or group axioms")
    s.add_argument("--algebra", required=True)
    s.add_argument("--class", dest="cls", choices=["Sr", "M", "N"])

    s = sub.add_parser("congruences", parents=[common], help="list all congruences")
    s.add_argument("--algebra", required=True)
    s.add_argument("--bound", type=int, default=None)

    s = sub.add_parser("classify", parents=[common], help="subdirect irreducibility classification")
    s.add_argument("--algebra", required=True)

    s = sub.add_parser("qvar", parents=[common], help="quasivariety membership between groups")
    s.add_argument("action", help="le | in | relation | join | homs | pentagon")
    s.add_argument("groups", nargs="*")
    s.add_argument("--kind", choices=["odd-square", "four-p"])
    s.add_argument("--p", type=int)
    s.add_argument("--allow-p5", action="store_true")

    s = sub.add_parser("pentagon", parents=[common], help="non-modular pentagon of quasivarieties")
    s.add_argument("--kind", choices=["odd-square", "four-p"], required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--allow-p5", action="store_true")

    s = sub.add_parser("enumerate", parents=[common], help="ai-semirings of small order")
    s.add_argument("--order", type=int)
    s.add_argument("--filter", default="all-ai")
    s.add_argument("--out", help="write the census JSON here")
    s.add_argument("--labelled", action="store_true", help="keep every labelling")
    s.add_argument("--fresh", action="store_true", help="recompute instead of loading shipped data")
    s.add_argument("--allow-order5", action="store_true")
    s.add_argument("--time-budget", type=float, default=None, help="seconds")

    for name, text in (("verify-lemmas", "structural lemmas over the fixture corpus"),
                       ("verify-theorem", "flat/sharp correspondence at desk scale"),
                       ("verify-basis", "equivalence of the two bases of M_n"),
                       ("ps-check", "pointed semidiscriminator behaviour")):
        sub.add_parser(name, parents=[common], help=text)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.budget is not None and args.budget < 1:
            raise UsageError("--budget must be positive")
        if args.n < 1:
            raise UsageError("--n must be at least 1")
        resolve_budget(args.budget)
        start = time.monotonic()
        rep = COMMANDS[args.command](args)
        rep.elapsed = time.monotonic() - start
    except (UsageError, AlgebraError, ParseError, KeyError) as exc:
        print(f"flatcliff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return emit(rep, args, args.command)


if __name__ == "__main__":
    sys.exit(main())
