"""Explicit type AD bimodules and their relabelled siblings."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import f2
from .algebra import FULL, Basis, Relabel, basis_paths, cyclic, m4, parse_basis, quotient, site_index
from .complexes import (ADBimodule, BiGen, Complex, Gen, Letters, STANDARD, apply_quotient, box_tensor,
                        shift, transform_alex)
from .curves import (Loop, Multicurve, _elementary, assign_absolute_gradings, equal_up_to_shift,
                     half_twist, parse_twist_word, pi, rational, recognize, reverse_label,
                     step_grading)
from .gradings import Vec
from .simplify import SimplifyError, loop_form_defects, reduce

H = Fraction(1, 2)

# Reference Dehn twist along arc c: (name, delta, Alexander).  The first
# letter of a name is the A-side idempotent, the second the D-side one.
_TWIST_GENS = (
    ("dD", 0, (0, 0, H, H)),
    ("cD", -H, (0, 0, -H, H)),
    ("aA", 0, (0, 0, H, H)),
    ("cC", 0, (0, 0, -H, -H)),
    ("bB", 0, (0, 0, H, H)),
    ("cB", -H, (0, 0, H, -H)),
)

# (src, input, dst, output); '-' is the empty input, 'i' the D-side unit.
_TWIST_ACTS = (
    ("dD", "q1", "aA", "q1"),
    ("dD", "q21", "bB", "q21"),
    ("cD", "q4", "dD", "i"),
    ("cD", "q14", "aA", "q1"),
    ("cD", "q214", "bB", "q21"),
    ("cD", "-", "cC", "p4"),
    ("aA", "p1", "dD", "p1"),
    ("aA", "q2", "bB", "q2"),
    ("bB", "p2", "aA", "p2"),
    ("bB", "p12", "dD", "p12"),
    ("cB", "-", "cC", "q3"),
    ("cB", "p23", "aA", "p2"),
    ("cB", "p123", "dD", "p12"),
    ("cB", "p3", "bB", "i"),
)


def _parse_output(tok: str, dst_d: int) -> Basis:
    return Basis("i", dst_d) if tok == "i" else parse_basis(tok)


def _relabel(B: ADBimodule, r: Relabel, name: str) -> ADBimodule:
    def rename(n: str) -> str:
        return "abcd"[r.site(site_index(n[0])) - 1] + "ABCD"[r.site(site_index(n[1].lower())) - 1]

    gens = tuple(BiGen(rename(g.name), r.site(g.a_idem), r.site(g.d_idem), g.delta, r.alex(g.alex))
                 for g in B.gens)
    acts = tuple((rename(s), tuple(r.basis(a) for a in ins), rename(d), r.basis(b))
                 for s, ins, d, b in B.actions)
    perm = tuple(r.end(B.a_letters.perm[r.inverse().end(k) - 1]) for k in range(1, 5))
    letters = Letters(B.a_letters.sign, perm)  # type: ignore[arg-type]
    return ADBimodule(name, r.image_alg(B.a_alg), r.image_alg(B.d_alg), gens, acts, letters,
                      B.max_input_len)


def _reference_twist() -> ADBimodule:
    gens = tuple(BiGen(n, site_index(n[0]), site_index(n[1].lower()), d, a) for n, d, a in _TWIST_GENS)
    d_idem = {n: site_index(n[1].lower()) for n, _, _ in _TWIST_GENS}
    acts = tuple((s, () if i == "-" else (parse_basis(i),), d, _parse_output(o, d_idem[d]))
                 for s, i, d, o in _TWIST_ACTS)
    return ADBimodule("dehn-twist-c", quotient(4, 3), quotient(3, 4), gens, acts,
                      Letters(1, (1, 2, 4, 3)), 1)


def dehn_twist(arc: int = 3) -> ADBimodule:
    """The half-twist bimodule along arc 1..4 (arc 3 is the reference).

    Modules fed into it must first be graded by :func:`rr34`-type letters,
    i.e. the Alexander entries of the arc's two ends are swapped.
    """
    if arc not in (1, 2, 3, 4):
        raise ValueError("arc must lie in 1..4")
    B = _reference_twist()
    if arc == 3:
        return B
    return _relabel(B, cyclic(arc - 3), f"dehn-twist-{'abcd'[arc - 1]}")


def twist_quotient(arc: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """(A-side, D-side) quotient indices of :func:`dehn_twist`."""
    return (m4(arc + 1), arc), (arc, m4(arc + 1))


def half_identity(i: int = 3, j: int = 1) -> ADBimodule:
    """The identity AD bimodule over the quotient killing p_i and q_j."""
    if m4(i + 2) != j:
        raise ValueError("half identities exist for (i, j) with j = i + 2 mod 4")
    alg = quotient(i, j)
    gens = tuple(BiGen(s + s.upper(), k, k) for k, s in enumerate("abcd", start=1))
    names = {g.a_idem: g.name for g in gens}
    acts = tuple((names[b.right], (b,), names[b.left], b) for b in basis_paths(alg, 3, idempotents=False))
    return ADBimodule(f"half-identity-{i}{j}", alg, alg, gens, acts, STANDARD, 1)


# --------------------------------------------------------------------------
# acting on curves through the twist bimodules

# Inverse half-twists as positive words in the half-twists (first acts first).
# They agree with the inverse up to a deck transformation and a grading shift.
INVERSE_WORDS = {1: (1, 2, 1, 1, 2), 2: (1, 1, 2, 1, 1), 3: (1, 2, 1, 3, 4), 4: (1, 1, 4, 1, 1)}


def lift_quotient(M: Complex) -> Complex:
    """Undo a quotient functor on a loop-form complex.

    Every surviving arrow gets its partner traversing the same segment backwards.
    """
    arrows = []
    for s, d, b, m in M.arrows:
        arrows.append((s, d, b, m))
        arrows.append((d, s, reverse_label(b), f2.inverse(m)))
    return Complex(FULL, M.gens, tuple(arrows), lattice=M.lattice)


def twist_module(M: Complex, arc: int = 3, *, trace=None) -> Complex:
    """Quotient, regrade, box with the half-twist bimodule, reduce and lift back."""
    B = dehn_twist(arc)
    (i, j), _ = twist_quotient(arc)
    N = transform_alex(apply_quotient(M, i, j), 1, B.a_letters.perm)
    T = reduce(box_tensor(N, B), trace=trace)
    defects = loop_form_defects(T)
    if defects:
        raise SimplifyError("tensor product did not reduce to loop form: " + defects[0])
    return lift_quotient(T)


_CALIBRATION: dict[int, Vec] = {}


def inverse_shift(arc: int) -> Vec:
    """Grading shift between the positive-word inverse and the true inverse twist.

    A composite of bimodules shifts every input by the same amount, so one
    reference curve fixes it.
    """
    if arc not in _CALIBRATION:
        L = assign_absolute_gradings(rational("0/1"))
        M = pi(L)
        for k in INVERSE_WORDS[arc]:
            M = twist_module(M, k)
        s = equal_up_to_shift(recognize(M), half_twist(L, arc, -1))
        if s is None:
            raise SimplifyError(f"positive word for the inverse twist along {arc} is wrong")
        _CALIBRATION[arc] = s
    return _CALIBRATION[arc]


def twist_via_bimodules(L: Loop | Multicurve, word: str | Sequence[str], *, trace=None) -> Multicurve:
    """Act on a curve by a twist word using only tensor products with bimodules."""
    M = pi(L)
    for tok in reversed(parse_twist_word(word)):
        for arc, sgn in _elementary(tok):
            if sgn > 0:
                M = twist_module(M, arc, trace=trace)
                continue
            for k in INVERSE_WORDS[arc]:
                M = twist_module(M, k, trace=trace)
            s = inverse_shift(arc)
            M = shift(M, s[0], s[1:])
    return recognize(M)


# elementary segments leaving site c that the reference twist actually moves
SEGMENTS_AT_C = (("b", "p3"), ("a", "p23"), ("d", "p123"), ("d", "q4"), ("a", "q14"), ("b", "q214"))


def segment_action(target: str, label: str, B: ADBimodule | None = None) -> list[tuple[str, str, str]]:
    """Arrows of S box B for the two-generator segment c -> target.

    Returned as (source, label, target) with bimodule generator names; the
    unit is written "1".
    """
    B = B or dehn_twist(3)
    b = parse_basis(label)
    g = step_grading((Fraction(0),) * 5, b)
    S = Complex(B.a_alg, (Gen("c", 3), Gen(target, site_index(target), g[0], g[1:])),
                (("c", target, b, [[1]]),), check=False)
    T = box_tensor(transform_alex(S, 1, B.a_letters.perm), B)
    out = [(s.split(".")[1], "1" if x.is_idempotent else str(x), d.split(".")[1]) for s, d, x, _ in T.arrows]
    return sorted(out)


def segment_table() -> list[str]:
    rows = []
    for tgt, lab in SEGMENTS_AT_C:
        arrows = ", ".join(f"{s} -{x}-> {d}" for s, x, d in segment_action(tgt, lab))
        rows.append(f"c -{lab}-> {tgt} | {arrows}")
    return rows


class MissingTranscription(LookupError):
    """Raised for bimodules whose action table is not available to this package."""


def conjugation_bimodule() -> ADBimodule:
    """The 32-generator conjugation bimodule.

    Only fragments of its action table are known here (the grading
    conventions, the (q3|1) and (p1|1) components, and the arrows created
    by the cancellations), so no complete table can be assembled.
    """
    raise MissingTranscription(
        "the conjugation bimodule's complete action table is not available; "
        "see the decisions ledger")
