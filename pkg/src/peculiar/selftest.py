"""The acceptance suite: eleven end-to-end checks with their time budgets.

Each check returns a :class:`Outcome`.  ``peculiar selftest`` and the test
suite both run these functions, so the command line and CI agree.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .algebra import Matching
from .bimodules import (MissingTranscription, conjugation_bimodule, half_identity, segment_action,
                        twist_module, twist_via_bimodules)
from .complexes import GradingError, apply_quotient, box_tensor, check_d2, extend_over_minus
from .curves import (as_multicurve, assign_absolute_gradings, b_curve, canonicalize, d_curve, equal, half_twist, pi,
                     rational, recognize)
from .datasets import even_segment_curve, generated_family, pretzel_2m3, slopes_up_to
from .invariants import V, closures_up_to, mutation_report, pair, poincare, stabilize
from .simplify import SimplifyError, clean_up, reduce, to_loop_form
from .textio import canonical_text


@dataclass
class Outcome:
    number: int
    title: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"criterion {self.number:>2} {'PASS' if self.ok else 'FAIL'}  {self.title}: {self.detail}"


def _timed(limit: float | None, fn: Callable[[], tuple[bool, str]]) -> tuple[bool, str, float]:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if limit is not None:
        detail += f"; {dt:.1f}s (limit {limit:g}s)"
        ok = ok and dt < limit
    return ok, detail, dt


# ---------------------------------------------------------------------------
# 1


def curvature_suite(seed: int = 0) -> tuple[bool, str]:
    fam = generated_family(seed=seed)
    bad = [name for name, L in fam if not check_d2(pi(L))]
    return not bad, f"{len(fam) - len(bad)}/{len(fam)} modules satisfy d^2 = curvature" + (
        f", failing: {bad[:3]}" if bad else "")


# ---------------------------------------------------------------------------
# 2

GOLDEN_EXTRA = {"rX": [(0, 0, 1, 1, 0)]}
GOLDEN_MATRICES = {
    "rX_1": [[1]],
    "rX_2": [[0, 1], [1, 1]],
    "rX_3": [[0, 0, 1], [1, 0, 1], [0, 1, 0]],
}


def golden_text(name: str) -> str:
    return resources.files("peculiar").joinpath("golden", f"{name}.txt").read_text()


def library_golden(name: str) -> str:
    """Canonical text of the library's quotient image for a golden file name."""
    if name.startswith("rX"):
        L = assign_absolute_gradings(rational("0/1", GOLDEN_MATRICES[name]))
        return canonical_text(apply_quotient(pi(L), 3, 1), GOLDEN_EXTRA["rX"])
    n = int(name[1:])
    if name[0] == "b":
        return canonical_text(apply_quotient(pi(assign_absolute_gradings(b_curve(n))), 3, 1))
    return canonical_text(apply_quotient(pi(assign_absolute_gradings(d_curve(n))), 1, 3))


GOLDEN_NAMES = ("b1", "b2", "b3", "d1", "d2", "d3", "rX_1", "rX_2", "rX_3")


def golden_transcriptions() -> tuple[bool, str]:
    bad = [n for n in GOLDEN_NAMES if library_golden(n) != golden_text(n)]
    return not bad, f"{len(GOLDEN_NAMES) - len(bad)}/{len(GOLDEN_NAMES)} byte-identical" + (
        f", differing: {bad}" if bad else "")


# ---------------------------------------------------------------------------
# 3

# (target, label, expected arrows) for segments leaving c, in library notation
SEGMENT_ROWS = (
    ("b", "p3", {("cB", "1", "bB"), ("cB", "q3", "cC"), ("cD", "p4", "cC")}),
    ("a", "p23", {("cB", "p2", "aA"), ("cB", "q3", "cC"), ("cD", "p4", "cC")}),
    ("d", "p123", {("cB", "p12", "dD"), ("cB", "q3", "cC"), ("cD", "p4", "cC")}),
    ("d", "q4", {("cD", "1", "dD"), ("cD", "p4", "cC"), ("cB", "q3", "cC")}),
    ("a", "q14", {("cD", "q1", "aA"), ("cD", "p4", "cC"), ("cB", "q3", "cC")}),
    ("b", "q214", {("cD", "q21", "bB"), ("cD", "p4", "cC"), ("cB", "q3", "cC")}),
)


def twist_family(seed: int = 0) -> list[tuple[str, object]]:
    return generated_family(max_slope=3, max_n=1, n_random=3, seed=seed)


def dehn_twist_agreement(seed: int = 0) -> tuple[bool, str]:
    fam = twist_family(seed)
    bad = []
    for name, L in fam:
        L = assign_absolute_gradings(L)
        for arc in (1, 2, 3, 4):
            try:
                ok = equal(recognize(twist_module(pi(L), arc)), half_twist(L, arc, 1))
            except (SimplifyError, GradingError, ValueError) as exc:
                ok = False
                name = f"{name} ({exc})"
            if not ok:
                bad.append((name, arc))
    rows_bad = [lab for tgt, lab, want in SEGMENT_ROWS if set(segment_action(tgt, lab)) != want]
    total = 4 * len(fam)
    detail = f"{total - len(bad)}/{total} twists agree with zero shift, {6 - len(rows_bad)}/6 segment rows"
    if bad:
        detail += f", failing: {bad[:3]}"
    return not bad and not rows_bad, detail


# ---------------------------------------------------------------------------
# 4


def random_twist_words(count: int, max_len: int, seed: int) -> list[list[str]]:
    rng = random.Random(seed)
    letters = ["t1", "t2", "t1^-1", "t2^-1"]
    return [[rng.choice(letters) for _ in range(rng.randint(1, max_len))] for _ in range(count)]


def mcg_instance(seed: int = 0) -> tuple[bool, str]:
    from .curves import twist

    L = pretzel_2m3()
    words = random_twist_words(10, 4, seed)
    bad = [w for w in words if not equal(twist_via_bimodules(L, w), twist(L, w))]
    return not bad, f"{10 - len(bad)}/10 words agree" + (f", failing: {bad[:2]}" if bad else "")


# ---------------------------------------------------------------------------
# 5


def half_identity_check(seed: int = 0) -> tuple[bool, str]:
    B = half_identity(3, 1)
    fam = generated_family(max_n=2, n_random=10, seed=seed)
    bad = []
    for name, L in fam:
        M = apply_quotient(pi(L), 3, 1)
        if canonical_text(reduce(box_tensor(M, B))) != canonical_text(M):
            bad.append(name)
    return not bad, f"{len(fam) - len(bad)}/{len(fam)} reduce to their input" + (
        f", failing: {bad[:3]}" if bad else "")


# ---------------------------------------------------------------------------
# 6


def conjugation_criterion() -> tuple[bool, str]:
    try:
        conjugation_bimodule()
    except MissingTranscription as exc:
        return False, f"not attempted: {exc}"
    return False, "conjugation bimodule present but no check is wired up"


# ---------------------------------------------------------------------------
# 7

RIGID_MATCHING = Matching(((1, 4), (2, 3)))


def has_expected_arrows(added) -> bool:
    """U2 at c, U2 at a and a U-multiple of q2 among the added arrows."""
    labels = {str(b) for _, _, b, _ in added}
    return {"U2*i3", "U2*i1"} <= labels and any(b.kind == "q" and b.start == 2 and b.length == 1
                                                for _, _, b, _ in added)


def rigid_extension() -> tuple[bool, str]:
    notes = []
    ok = True
    for n in (1, 2, 3):
        M = pi(b_curve(n))
        first = extend_over_minus(M, RIGID_MATCHING)
        only_idem = all(b.kind == "i" and b.udeg == 1 for _, _, b, _ in first.added)
        shaped = extend_over_minus(M, RIGID_MATCHING, require=has_expected_arrows)
        good = bool(first) and only_idem and bool(shaped)
        ok &= good
        notes.append(f"b{n} {'extends' if good else 'FAILS'}")
    ext = extend_over_minus(pi(even_segment_curve()), RIGID_MATCHING)
    q2 = [t for t in ext.residual if t[2].kind == "q" and t[2].start == 2 and t[2].length == 1
          and t[0][0] == "a" and t[1][0] == "b"]
    blocked = not ext and ext.certificate is not None and bool(q2)
    ok &= blocked
    notes.append("even segment " + (f"blocked by {q2[0][0]}->{q2[0][1]} {q2[0][2]}" if blocked
                                    else "NOT blocked"))
    return ok, ", ".join(notes)


# ---------------------------------------------------------------------------
# 8


def stabilization_check(seed: int = 0) -> tuple[bool, str]:
    from .datasets import PRETZEL_MATCHING

    cases = [(pretzel_2m3(), PRETZEL_MATCHING)]
    cases += [(assign_absolute_gradings(L), RIGID_MATCHING)
              for _, L in generated_family(max_slope=3, max_n=2, n_random=5, seed=seed)]
    bad = []
    checks = 0
    for L, P in cases:
        S = stabilize(L, (1, 0))
        for probe in getattr(L, "loops", (L,)):
            base = poincare(L, probe, P)
            checks += 1
            if poincare(S, probe, P) != base * V(0, len(base.colors)):
                bad.append(str(probe))
    return not bad, f"{checks - len(bad)}/{checks} probe polynomials gain the factor t1 + 1/t1"


# ---------------------------------------------------------------------------
# 9


def lifted_intersection(s1, s2) -> int:
    """Minimal intersection of two rational curves: 2|det| on distinct slopes, else 2."""
    from .curves import Slope

    a, b = Slope.parse(s1), Slope.parse(s2)
    det = abs(a.p * b.q - a.q * b.p)
    return 2 * det if det else 2


def pairing_sanity(seed: int = 0) -> tuple[bool, str]:
    from .curves import Slope, mirror

    base = pair(rational("0/1"), rational("1/0")).mor.total
    ok = base == lifted_intersection("0/1", "1/0")
    rng = random.Random(seed)
    slopes = slopes_up_to(3)
    sym_bad = orc_bad = 0
    for _ in range(20):
        s1, s2 = rng.choice(slopes), rng.choice(slopes)
        A, B = rational(s1), rational(s2)
        ab, ba = pair(A, B).mor.total, pair(B, A).mor.total
        sym_bad += ab != ba
        ms = mirror(A)
        orc_bad += ab != lifted_intersection(_slope_of(ms), s2)
    ok = ok and not sym_bad and not orc_bad
    return ok, f"rank(r(0/1), r(1/0)) = {base}, {20 - sym_bad}/20 symmetric, {20 - orc_bad}/20 match intersection count"


def _slope_of(L) -> object:
    from .curves import classify

    return classify(L)[1]


# ---------------------------------------------------------------------------
# 10


def mutation_check() -> tuple[bool, str]:
    rep = mutation_report(pretzel_2m3(), closures_up_to(4))
    failing = [r[0] for r in rep.rows if not r[1]]
    return rep.ok, f"{len(rep.rows) - len(failing)}/{len(rep.rows)} rows" + (
        f", failing: {failing[:3]}" if failing else "")


# ---------------------------------------------------------------------------
# 11


def clean_up_moves(M, max_len: int = 4) -> list[tuple]:
    """All grading-homogeneous clean-up maps h (up to max_len) that change M."""
    from .algebra import FULL, basis_paths

    out = []
    for x in M.gens:
        for y in M.gens:
            if x.name == y.name or x.dim != y.dim:
                continue
            for b in basis_paths(FULL, max_len, right=x.idem, left=y.idem):
                if b.kind == "i":
                    continue
                inc = M.incoherence(x, y, b)
                if inc is None or not M.lattice.equal(inc, (-1, 0, 0, 0, 0)):
                    continue
                try:
                    N = clean_up(M, x.name, y.name, b)
                except (SimplifyError, GradingError):
                    continue
                if N.arrows != M.arrows:
                    out.append((x.name, y.name, b))
    return out


def perturbed_variants(count: int = 50, seed: int = 0) -> list[tuple[str, object, object]]:
    """(label, curve, perturbed module) triples built from 1 to 3 random clean-ups."""
    rng = random.Random(seed)
    pool = []
    for name, L in generated_family(max_slope=3, max_n=2, n_random=0, seed=seed):
        M = pi(assign_absolute_gradings(L))
        if clean_up_moves(M):
            pool.append((name, assign_absolute_gradings(L), M))
    out = []
    for k in range(count):
        name, L, M = pool[rng.randrange(len(pool))]
        steps = rng.randint(1, 3)
        applied = 0
        for _ in range(steps):
            moves = clean_up_moves(M)
            if not moves:
                break
            s, d, b = moves[rng.randrange(len(moves))]
            M = clean_up(M, s, d, b)
            applied += 1
        out.append((f"{name}+{applied}", L, M))
    return out


def round_trip(seed: int = 0) -> tuple[bool, str]:
    fam = generated_family(seed=seed)
    bad = []
    for name, L in fam:
        try:
            ok = recognize(to_loop_form(pi(L))) == canonicalize(as_multicurve(L))
        except (SimplifyError, ValueError):
            ok = False
        if not ok:
            bad.append(name)
    var = perturbed_variants(50, seed)
    vbad = []
    for name, L, M in var:
        try:
            ok = equal(recognize(to_loop_form(M)), L)
        except (SimplifyError, ValueError):
            ok = False
        if not ok:
            vbad.append(name)
    ok = not bad and not vbad
    return ok, (f"{len(fam) - len(bad)}/{len(fam)} family curves, {len(var) - len(vbad)}/{len(var)} perturbed"
                + (f", failing: {(bad + vbad)[:3]}" if not ok else ""))


# ---------------------------------------------------------------------------

CRITERIA: tuple[tuple[int, str, float | None, Callable[..., tuple[bool, str]]], ...] = (
    (1, "curvature suite", 10, curvature_suite),
    (2, "golden transcriptions", None, golden_transcriptions),
    (3, "Dehn-twist action", 30, dehn_twist_agreement),
    (4, "mapping class group instance", None, mcg_instance),
    (5, "half identity", None, half_identity_check),
    (6, "conjugation bimodule", 60, conjugation_criterion),
    (7, "rigid curves / extension", None, rigid_extension),
    (8, "stabilization", None, stabilization_check),
    (9, "pairing sanity", 10, pairing_sanity),
    (10, "mutation invariance", 120, mutation_check),
    (11, "round trip", None, round_trip),
)


def run(number: int, seed: int = 0) -> Outcome:
    for k, title, limit, fn in CRITERIA:
        if k == number:
            args = {"seed": seed} if "seed" in fn.__code__.co_varnames[:fn.__code__.co_argcount] else {}
            ok, detail, dt = _timed(limit, lambda: fn(**args))
            return Outcome(k, title, ok, detail, dt)
    raise KeyError(f"no criterion {number}")


def run_all(seed: int = 0, only: list[int] | None = None, echo: Callable[[str], None] | None = None) -> list[Outcome]:
    out = []
    for k, *_ in CRITERIA:
        if only and k not in only:
            continue
        res = run(k, seed)
        if echo:
            echo(res.line())
        out.append(res)
    return out
