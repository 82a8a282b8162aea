"""``peculiar`` command line.

Curves, modules and bimodules travel between commands as text (see
:mod:`peculiar.textio`).  Inputs come from a file argument or stdin, outputs
go to stdout or ``-o FILE``.  Exit codes: 0 success, 1 a check failed,
2 usage or parse error.  ``PECULIAR_TRACE=1`` or ``--trace`` prints
simplification steps to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Sequence

from . import f2
from .algebra import Matching
from .bimodules import (MissingTranscription, conjugation_bimodule, dehn_twist, half_identity,
                        twist_module)
from .complexes import (ADBimodule, Complex, GradingError, apply_quotient, box_tensor, check_d2,
                        extend_over_minus, validate_ad)
from .curves import (CurveError, Loop, Multicurve, as_multicurve, assign_absolute_gradings,
                     b_curve, canonicalize, classify, d_curve, irrational, lift, pi, rational, recognize)
from .simplify import SimplifyError, reduce, to_loop_form
from .textio import (ParseError, canonical_text, format_bimodule, format_module, format_multicurve,
                     parse_bimodule, parse_module, parse_multicurve, sniff)


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# io helpers


def _read(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _tracer(args) -> Callable[[str], None] | None:
    if getattr(args, "trace", False) or os.environ.get("PECULIAR_TRACE") == "1":
        return lambda msg: print(msg, file=sys.stderr)
    return None


def _curve_from_text(text: str) -> Multicurve:
    kind = sniff(text)
    if kind != "curve":
        raise UsageError(f"expected a curve, got a {kind}")
    return parse_multicurve(text)


def _module_from_text(text: str) -> Complex:
    """A module, or Pi of a curve when handed curve text."""
    kind = sniff(text)
    if kind == "module":
        return parse_module(text)
    if kind == "curve":
        return pi(parse_multicurve(text))
    raise UsageError("expected a module or a curve, got a bimodule")


def _ints(text: str, n: int, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be {n} comma separated integers") from None
    if len(vals) != n:
        raise UsageError(f"{what} must be {n} comma separated integers")
    return vals


def _matching(text: str) -> Matching:
    try:
        return Matching.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _build(spec: Sequence[str]) -> Loop | Multicurve:
    """Curve from a short name: ``r SLOPE``, ``i N SLOPE I,J``, ``b N``, ``d N``,
    ``even-segment`` or ``set NAME``."""
    from .datasets import curveset, even_segment_curve

    if not spec:
        raise UsageError("missing curve name")
    kind, rest = spec[0], list(spec[1:])
    try:
        if kind == "r" and len(rest) == 1:
            return rational(rest[0])
        if kind == "i" and len(rest) == 3:
            return irrational(int(rest[0]), rest[1], _ints(rest[2], 2, "puncture pair"))
        if kind in ("b", "d") and len(rest) == 1:
            return (b_curve if kind == "b" else d_curve)(int(rest[0]))
        if kind == "even-segment" and not rest:
            return even_segment_curve()
        if kind == "set" and len(rest) == 1:
            return curveset(rest[0])
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None
    raise UsageError(f"cannot build curve from {' '.join(spec)!r}; "
                     "use r SLOPE | i N SLOPE I,J | b N | d N | even-segment | set NAME")


def _curve_arg(spec: str) -> Multicurve:
    """A file path, '-' for stdin, or an inline name like 'r:1/2' or 'set:pretzel-2m3'."""
    if spec == "-" or os.path.exists(spec):
        return _curve_from_text(_read(spec))
    return as_multicurve(assign_absolute_gradings(_build(spec.replace(":", " ").split())))


# ---------------------------------------------------------------------------
# curve


def cmd_curve(args) -> str:
    if args.action == "build":
        L = _build(args.spec)
        if args.X:
            if not isinstance(L, Loop) or classify(L)[0] != "rational":
                raise UsageError("--X only applies to rational curves")
            X = f2.companion(f2.pparse(args.X)) if "x" in args.X else f2.parse_mat(args.X)
            L = rational(classify(L)[1], X)
        return format_multicurve(as_multicurve(assign_absolute_gradings(L)))
    M = _curve_from_text(_read(args.input))
    if args.action == "canon":
        return format_multicurve(canonicalize(M))
    out = []
    for k, L in enumerate(M.loops):
        if args.action == "classify":
            out.append(_describe(classify(L)))
        elif args.action == "show":
            out.append(f"component {k}: {_describe(classify(L))}, {L.n} intersections, "
                       f"local system dim {len(L.X)}")
        elif args.action == "lift":
            w = lift(L)
            out.append(f"component {k}: displacement {w.delta}, closes by {w.closes_by}, "
                       f"{'linear' if w.linear else 'not linear'}")
            out.append("  squares " + " ".join(f"({x},{y})" for x, y in w.squares))
    return "\n".join(out) + "\n"


def _describe(cls: tuple) -> str:
    if cls[0] == "rational":
        return f"r({cls[1]})"
    if cls[0] == "irrational":
        return f"i{cls[1]}({cls[2]};{cls[3][0]},{cls[3][1]})"
    return "other"


# ---------------------------------------------------------------------------
# module


def cmd_module(args) -> str:
    tr = _tracer(args)
    M = _module_from_text(_read(args.input))
    act = args.action
    if act == "pi":
        if args.quotient:
            M = apply_quotient(M, *_ints(args.quotient, 2, "--quotient"))
        return canonical_text(M) if args.canonical else format_module(M)
    if act == "check-d2":
        rep = check_d2(M)
        if not rep:
            raise CheckFailed(str(rep))
        return "d^2 ok\n"
    if act == "quotient":
        return format_module(apply_quotient(M, *_ints(args.ij, 2, "quotient")))
    if act == "reduce":
        return format_module(reduce(M, trace=tr))
    if act == "loopform":
        return format_module(to_loop_form(M, trace=tr))
    if act == "recognize":
        N = to_loop_form(M, trace=tr) if args.simplify else M
        return format_multicurve(recognize(N))
    if act == "extend-minus":
        ext = extend_over_minus(M, _matching(args.matching), args.u_bound, trace=tr)
        if not ext:
            raise CheckFailed(str(ext))
        return str(ext) + "\n" + format_module(ext.complex)
    raise UsageError(f"unknown module action {act}")


# ---------------------------------------------------------------------------
# bimod


def _bimodule(name: str, arc: int) -> ADBimodule:
    if name == "dehn-twist":
        return dehn_twist(arc)
    if name == "half-identity":
        return half_identity(arc, (arc + 1) % 4 + 1)
    if name == "conjugation":
        return conjugation_bimodule()
    if os.path.exists(name):
        return parse_bimodule(_read(name))
    raise UsageError(f"unknown bimodule {name!r}; use dehn-twist, half-identity, conjugation or a file")


def cmd_bimod(args) -> str:
    tr = _tracer(args)
    if args.action == "show":
        return format_bimodule(_bimodule(args.name, args.arc))
    if args.action == "validate":
        B = _bimodule(args.name, args.arc)
        problems = validate_ad(B)
        if problems:
            raise CheckFailed("\n".join(problems))
        return f"{B.name}: AD relations hold up to input length {B.max_input_len + 1}\n"
    # apply
    M = _module_from_text(_read(args.on))
    if args.name == "dehn-twist":
        out = twist_module(M, args.arc, trace=tr)
    else:
        B = _bimodule(args.name, args.arc)
        if M.alg != B.a_alg:
            M = apply_quotient(M, *_quotient_of(B))
        out = reduce(box_tensor(M, B), trace=tr)
    if args.recognize:
        return format_multicurve(recognize(out))
    return format_module(out)


def _quotient_of(B: ADBimodule) -> tuple[int, int]:
    return B.a_alg.i, B.a_alg.j


# ---------------------------------------------------------------------------
# pairing, mutation, reports


def cmd_pair(args) -> str:
    from .invariants import pair

    A, B = _curve_arg(args.first), _curve_arg(args.second)
    res = pair(A, B)
    return res.mor.table() + f"\ntotal rank {res.mor.total}\n"


def cmd_mutate(args) -> str:
    from .curves import mutate

    return format_multicurve(canonicalize(mutate(_curve_arg(args.curve), args.axis)))


def cmd_report(args) -> str:
    from .invariants import closures_up_to, conjugation_check, mutation_report

    L = _curve_arg(args.curve) if args.curve else _curve_arg(f"set:{args.curveset}")
    if args.kind == "conj":
        rep = conjugation_check(L)
    else:
        rep = mutation_report(L, closures_up_to(args.closures))
    if not rep.ok:
        raise CheckFailed(str(rep))
    return str(rep) + "\n"


def cmd_selftest(args) -> str:
    from .selftest import run_all

    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_all(seed=args.seed, only=only, echo=lambda s: print(s, flush=True))
    passed = sum(r.ok for r in results)
    summary = f"{passed}/{len(results)} criteria pass\n"
    if passed != len(results):
        raise CheckFailed(summary.rstrip())
    return summary


# ---------------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser, top: bool) -> None:
    # accepted both before and after the subcommand; leaves must not clobber the top level
    dflt = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument("-o", "--output", default=dflt(None), help="write the result to this file")
    parser.add_argument("--trace", action="store_true", default=dflt(False),
                        help="print simplification steps to stderr")
    parser.add_argument("--seed", type=int, default=dflt(0), help="seed for randomised checks")


class _Parser(argparse.ArgumentParser):
    def add_subparsers(self, **kw):
        kw.setdefault("parser_class", _Leaf)
        return super().add_subparsers(**kw)


class _Leaf(_Parser):
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        _common(self, top=False)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="peculiar", description="Peculiar modules and immersed curves.")
    _common(ap, top=True)
    sub = ap.add_subparsers(dest="command", required=True)

    cu = sub.add_parser("curve", help="build and inspect curves")
    cs = cu.add_subparsers(dest="action", required=True)
    b = cs.add_parser("build", help="r SLOPE | i N SLOPE I,J | b N | d N | even-segment | set NAME")
    b.add_argument("spec", nargs="+")
    b.add_argument("--X", help="local system: polynomial like x^2+x+1 or matrix rows like 01,11")
    for name in ("show", "canon", "lift", "classify"):
        c = cs.add_parser(name)
        c.add_argument("input", nargs="?", default="-")
    cu.set_defaults(func=cmd_curve)

    mo = sub.add_parser("module", help="modules: Pi, checks and simplification")
    ms = mo.add_subparsers(dest="action", required=True)
    p = ms.add_parser("pi", help="module of a curve")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--quotient", metavar="I,J")
    p.add_argument("--canonical", action="store_true", help="print the canonical rendering")
    for name in ("check-d2", "reduce", "loopform"):
        ms.add_parser(name).add_argument("input", nargs="?", default="-")
    q = ms.add_parser("quotient")
    q.add_argument("ij", metavar="I,J")
    q.add_argument("input", nargs="?", default="-")
    r = ms.add_parser("recognize")
    r.add_argument("input", nargs="?", default="-")
    r.add_argument("--simplify", action="store_true", help="bring into loop form first")
    e = ms.add_parser("extend-minus")
    e.add_argument("input", nargs="?", default="-")
    e.add_argument("--matching", default="14,23")
    e.add_argument("--u-bound", type=int, default=1)
    mo.set_defaults(func=cmd_module)

    bi = sub.add_parser("bimod", help="type AD bimodules")
    bs = bi.add_subparsers(dest="action", required=True)
    for name in ("show", "validate", "apply"):
        c = bs.add_parser(name)
        c.add_argument("name", help="dehn-twist | half-identity | conjugation | FILE")
        c.add_argument("--arc", type=int, default=3, choices=(1, 2, 3, 4))
        if name == "apply":
            c.add_argument("--on", default="-", help="module or curve file")
            c.add_argument("--recognize", action="store_true", help="print the resulting curve")
    bi.set_defaults(func=cmd_bimod)

    pa = sub.add_parser("pair", help="pairing homology of two curves")
    pa.add_argument("first")
    pa.add_argument("second")
    pa.set_defaults(func=cmd_pair)

    mu = sub.add_parser("mutate", help="mutate a curve")
    mu.add_argument("axis", choices=("x", "y", "z"))
    mu.add_argument("curve", nargs="?", default="-")
    mu.set_defaults(func=cmd_mutate)

    rp = sub.add_parser("report", help="symmetry reports")
    rp.add_argument("kind", choices=("conj", "mutation"))
    rp.add_argument("--curveset", default="pretzel-2m3")
    rp.add_argument("--curve", help="curve file or inline name instead of a curve set")
    rp.add_argument("--closures", type=int, default=4)
    rp.set_defaults(func=cmd_report)

    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--only", help="comma separated criterion numbers")
    st.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    status = 0
    try:
        text = args.func(args)
    except CheckFailed as exc:
        text, status = str(exc) + "\n", 1
    except ParseError as exc:
        print(f"peculiar: parse error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, CurveError) as exc:
        print(f"peculiar: {exc}", file=sys.stderr)
        return 2
    except (SimplifyError, GradingError, MissingTranscription) as exc:
        print(f"peculiar: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
