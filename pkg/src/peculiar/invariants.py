"""Poincaré polynomials, pairing, stabilization and the symmetry checkers."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import f2
from .algebra import Matching, MIRROR
from .complexes import mor_homology
from .curves import (
    Loop,
    Multicurve,
    Slope,
    as_multicurve,
    canonical_loop,
    classify,
    mirror,
    mutate,
    pi,
)
from .gradings import fmt_half, vsub

Term = tuple[Fraction, tuple[Fraction, ...]]


@dataclass(frozen=True)
class PoincarePolynomial:
    """Finitely supported counts indexed by (delta, colour exponents)."""

    terms: Mapping[Term, int] = field(default_factory=dict)
    colors: tuple[str, ...] = ("t1", "t2")

    def __post_init__(self) -> None:
        clean = {(Fraction(d), tuple(Fraction(x) for x in a)): int(n)
                 for (d, a), n in self.terms.items() if n}
        if any(n < 0 for n in clean.values()):
            raise ValueError("Poincaré counts are nonnegative")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @staticmethod
    def monomial(delta=0, alex: Sequence = (), count: int = 1, colors=("t1", "t2")) -> "PoincarePolynomial":
        return PoincarePolynomial({(Fraction(delta), tuple(alex)): count}, colors)

    def __add__(self, other: "PoincarePolynomial") -> "PoincarePolynomial":
        acc = Counter(self.terms)
        acc.update(other.terms)
        return PoincarePolynomial(dict(acc), self.colors)

    def __mul__(self, other: "PoincarePolynomial") -> "PoincarePolynomial":
        acc: Counter = Counter()
        for (d1, a1), n1 in self.terms.items():
            for (d2, a2), n2 in other.terms.items():
                if a1 and a2 and len(a1) != len(a2):
                    raise ValueError("colour vectors of different lengths")
                a = tuple(x + y for x, y in zip(a1, a2)) if a1 and a2 else (a1 or a2)
                acc[(d1 + d2, a)] += n1 * n2
        return PoincarePolynomial(dict(acc), self.colors)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PoincarePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    @property
    def total(self) -> int:
        return sum(self.terms.values())

    def delta_specialized(self) -> "PoincarePolynomial":
        acc: Counter = Counter()
        for (d, _), n in self.terms.items():
            acc[(d, ())] += n
        return PoincarePolynomial(dict(acc), self.colors)

    def shifted(self, delta=0, alex: Sequence = ()) -> "PoincarePolynomial":
        out = {}
        for (d, a), n in self.terms.items():
            b = tuple(x + Fraction(y) for x, y in zip(a, alex)) if alex else a
            out[(d + Fraction(delta), b)] = n
        return PoincarePolynomial(out, self.colors)

    def normalized(self) -> "PoincarePolynomial":
        """Shift so that the least term sits at delta 0 and colour exponents 0."""
        if not self.terms:
            return self
        d0, a0 = min(self.terms)
        return self.shifted(-d0, tuple(-x for x in a0))

    def same_up_to_shift(self, other: "PoincarePolynomial") -> bool:
        return self.normalized() == other.normalized()

    def lines(self) -> list[str]:
        out = []
        for (d, a), n in self.terms.items():
            mono = [f"d^{{{fmt_half(d)}}}"]
            for name, e in zip(self.colors, a):
                if e:
                    mono.append(f"{name}^{{{fmt_half(e)}}}" if e != 1 else name)
            out.append(" ".join(mono) + f" : {n}")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines()) if self.terms else "0"

    def table(self) -> str:
        """A deterministic text table: one row per (delta, A)."""
        head = "delta  " + "  ".join(self.colors) + "  count"
        rows = [head]
        for (d, a), n in self.terms.items():
            rows.append(f"{fmt_half(d):>5}  " + "  ".join(f"{fmt_half(x):>2}" for x in a) + f"  {n:>5}")
        return "\n".join(rows)


def parse_poincare(text: str, colors=("t1", "t2")) -> PoincarePolynomial:
    import re

    terms: Counter = Counter()
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line or line == "0":
            continue
        mono, _, cnt = line.partition(":")
        if not cnt.strip():
            raise ValueError(f"line {ln}: expected '<monomial> : <count>'")
        d = Fraction(0)
        a = [Fraction(0)] * len(colors)
        seen_alex = False
        for tok in mono.split():
            m = re.fullmatch(r"([A-Za-z]\w*)(?:\^\{?(-?\d+(?:/\d+)?)\}?)?", tok)
            if not m:
                raise ValueError(f"line {ln}: bad monomial factor {tok!r}")
            name, e = m.group(1), Fraction(m.group(2) or 1)
            if name == "d":
                d += e
            elif name in colors:
                a[colors.index(name)] += e
                seen_alex = True
            else:
                raise ValueError(f"line {ln}: unknown variable {name!r}")
        terms[(d, tuple(a) if seen_alex or any(a) else tuple(a))] += int(cnt)
    return PoincarePolynomial(dict(terms), colors)


# --------------------------------------------------------------------------
# counting probes


def _alignments(a: Loop, b: Loop) -> list[int]:
    """Rotations k with a.rotated(k) word-equal to b."""
    ka, kb = a.key(), b.key()
    n = len(ka)
    if n != len(kb):
        return []
    return [k for k in range(n) if ka[k:] + ka[:k] == kb]


def _shifts(component: Loop, probe: Loop) -> list[tuple[Fraction, ...]]:
    out = []
    for cand in (component, component.reversed()):
        for k in _alignments(cand, probe):
            out.append(vsub(cand.position_gradings[k], probe.anchor))
    return out


def _multiplicity(X: f2.Mat, Y: f2.Mat) -> int:
    """How often Y occurs as a direct summand of X (elementary divisor count)."""
    ex = Counter(f2.elementary_divisors(X))
    ey = Counter(f2.elementary_divisors(Y))
    if not ey:
        return 0
    return min(ex[g] // c for g, c in ey.items())


def _colour(alex: Sequence, matching: Matching | None) -> tuple[Fraction, ...]:
    if matching is None:
        return tuple(Fraction(x) for x in alex)
    return matching.colored(alex)


def count(L: Loop | Multicurve, probe: Loop, matching: Matching | None = None) -> PoincarePolynomial:
    """Poincaré polynomial of grading-shifted copies of ``probe`` inside ``L``.

    Shifts are measured from the probe's own anchor; with a matching the
    Alexander part is reported in colour exponents.
    """
    M = as_multicurve(L)
    lat = M.lattice.join(probe.lattice)
    pc = canonical_loop(probe)
    colors = matching.colors if matching is not None and matching.colors[0] != matching.colors[1] else ("t",)
    if matching is None:
        colors = ("A1", "A2", "A3", "A4")
    acc: Counter = Counter()
    for comp in M.loops:
        if sorted(canonical_loop(comp).key()) != sorted(pc.key()):
            continue
        shifts = _shifts(comp, pc)
        if not shifts:
            continue
        mult = _multiplicity(comp.X, pc.X)
        if not mult:
            continue
        s = min(lat.reduce(v) for v in shifts)
        acc[(s[0], _colour(s[1:], matching))] += mult
    return PoincarePolynomial(dict(acc), colors)


def probe_curve(kind: str, *args) -> Loop:
    from .curves import irrational, rational

    if kind in ("r", "rational"):
        return rational(*args)
    if kind in ("i", "irrational"):
        return irrational(*args)
    raise ValueError(f"unknown probe kind {kind!r}")


# --------------------------------------------------------------------------
# pairing


def rational_matching(slope: Slope | str) -> Matching:
    """Tangle ends joined by the rational tangle whose curve has this slope."""
    from .curves import puncture_class

    s = Slope.parse(slope)
    q, p = s.direction
    partner = puncture_class(q, p)
    rest = sorted({1, 2, 3, 4} - {3, partner})
    return Matching(((3, partner), (rest[0], rest[1])))


def glued_components(m1: Matching, m2: Matching) -> int:
    """Number of closed components after glueing the mirror of m1's tangle to m2's."""
    mm = Matching(tuple(tuple(MIRROR.end(k) for k in pr) for pr in m1.pairs))  # type: ignore[arg-type]
    parent = {k: k for k in range(1, 5)}

    def find(k):
        while parent[k] != k:
            k = parent[k]
        return k

    for i, o in mm.pairs + m2.pairs:
        parent[find(i)] = find(o)
    return len({find(k) for k in range(1, 5)})


@dataclass(frozen=True)
class Pairing:
    mor: PoincarePolynomial
    components: int | None

    @property
    def divides_by_V(self) -> bool:
        return self.components == 1

    @property
    def link_rank(self) -> int | None:
        """Rank of the link invariant after the V bookkeeping (None if unknown)."""
        if self.components is None:
            return None
        return self.mor.total // 2 if self.divides_by_V else self.mor.total


def pair(L1: Loop | Multicurve, L2: Loop | Multicurve, m1: Matching | None = None,
         m2: Matching | None = None) -> Pairing:
    """Homology of Mor(Pi(mirror L1), Pi(L2)), delta-graded."""
    if isinstance(L1, Stabilized) or isinstance(L2, Stabilized):
        return _pair_stabilized(L1, L2, m1, m2)
    A, B = as_multicurve(L1), as_multicurve(L2)
    if not A.loops or not B.loops:
        return Pairing(PoincarePolynomial({}, ()), None)
    h = mor_homology(pi(mirror(A)), pi(B))
    poly = PoincarePolynomial({(d, ()): n for d, n in h.items()}, ())
    comps = glued_components(m1, m2) if m1 is not None and m2 is not None else None
    return Pairing(poly, comps)


def V(color: int = 0, ncolors: int = 2) -> PoincarePolynomial:
    """The two-dimensional space V_t, t the colour with the given index."""
    up = [Fraction(0)] * ncolors
    up[color] = Fraction(1)
    down = [-x for x in up]
    return PoincarePolynomial({(Fraction(0), tuple(up)): 1, (Fraction(0), tuple(down)): 1})


# --------------------------------------------------------------------------
# stabilization


@dataclass(frozen=True)
class Stabilized:
    """A multicurve tensored with V_{t_k}^{n_k}."""

    curve: Multicurve
    counts: tuple[int, ...]

    def factor(self, ncolors: int | None = None) -> PoincarePolynomial:
        n = len(self.counts) if ncolors is None else ncolors
        out = PoincarePolynomial({(Fraction(0), (Fraction(0),) * n): 1})
        for k, c in enumerate(self.counts):
            for _ in range(c):
                out = out * V(k, n)
        return out


def stabilize(L: Loop | Multicurve | Stabilized, counts: Sequence[int]) -> Stabilized:
    if any(c < 0 for c in counts):
        raise ValueError("stabilization counts are nonnegative")
    if isinstance(L, Stabilized):
        if len(L.counts) != len(counts):
            raise ValueError("colour count mismatch")
        return Stabilized(L.curve, tuple(a + b for a, b in zip(L.counts, counts)))
    return Stabilized(as_multicurve(L), tuple(int(c) for c in counts))


def poincare(L: Loop | Multicurve | Stabilized, probe: Loop, matching: Matching) -> PoincarePolynomial:
    """Coloured Poincaré polynomial of a probe, including stabilization factors."""
    if isinstance(L, Stabilized):
        base = count(L.curve, probe, matching)
        f = L.factor(len(base.colors))
        return PoincarePolynomial((base * f).terms, base.colors)
    return count(L, probe, matching)


def _pair_stabilized(L1, L2, m1, m2) -> Pairing:
    f = PoincarePolynomial({(Fraction(0), ()): 1})
    parts = []
    for L in (L1, L2):
        if isinstance(L, Stabilized):
            f = f * L.factor().delta_specialized()
            parts.append(L.curve)
        else:
            parts.append(L)
    base = pair(parts[0], parts[1], m1, m2)
    return Pairing(base.mor * f, base.components)


# --------------------------------------------------------------------------
# symmetry checks


@dataclass
class Report:
    title: str
    rows: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r[1] for r in self.rows)

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.rows.append((label, ok, detail))

    def __str__(self) -> str:
        w = max([len(r[0]) for r in self.rows] + [5])
        out = [self.title]
        for label, ok, detail in self.rows:
            out.append(f"{label:<{w}}  {'PASS' if ok else 'FAIL'}  {detail}".rstrip())
        out.append(f"overall: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(out)


def _delta_counts(L: Multicurve) -> dict[tuple, Counter]:
    """Per curve type, a counter of delta gradings (with local system classes for rationals)."""
    out: dict[tuple, Counter] = {}
    lat = L.lattice
    for comp in L.loops:
        cls = classify(comp)
        if cls[0] == "other":
            key = ("other", canonical_loop(comp).key())
            out.setdefault(key, Counter())[comp.anchor[0]] += 1
            continue
        d = _reference(comp)
        if cls[0] == "rational":
            key = ("rational", cls[1])
            for g in f2.elementary_divisors(comp.X):
                out.setdefault(key + (g,), Counter())[d] += 1
        else:
            key = ("irrational", cls[1], cls[2], cls[3])
            out.setdefault(key, Counter())[d] += 1
    return out


def _reference(comp: Loop) -> Fraction:
    from .curves import reference_delta

    return reference_delta(comp)


def _inverse_divisor(g: int) -> int:
    """Elementary divisor of X^-1 matching the divisor g of X (reciprocal polynomial)."""
    d = f2.pdeg(g)
    return sum(((g >> k) & 1) << (d - k) for k in range(d + 1))


def _fmt_counts(c: Counter) -> str:
    return "{" + ", ".join(f"d={fmt_half(d)}: {n}" for d, n in sorted(c.items())) + "}"


def conjugation_check(L: Loop | Multicurve) -> Report:
    """delta-graded conjugation symmetry: r_X vs r_{X^-1} and i_n(i1,i2) vs i_n(i3,i4)."""
    M = as_multicurve(L)
    counts = _delta_counts(M)
    rep = Report("conjugation symmetry (delta-graded)")
    seen = set()
    for key in sorted(counts, key=str):
        if key in seen or key[0] == "other":
            continue
        if key[0] == "rational":
            partner = key[:2] + (_inverse_divisor(key[2]),)
            label = f"r({key[1]}) local system {f2.pformat(key[2])}"
        else:
            rest = tuple(sorted({1, 2, 3, 4} - set(key[3])))
            partner = key[:3] + (rest,)
            label = f"i{key[1]}({key[2]};{key[3][0]},{key[3][1]})"
        seen |= {key, partner}
        a, b = counts.get(key, Counter()), counts.get(partner, Counter())
        rep.add(label, a == b, f"{_fmt_counts(a)} vs {_fmt_counts(b)}")
    return rep


def mutation_report(L: Loop | Multicurve, closures: Iterable[Slope | str],
                    axes: Sequence[str] = ("x", "y", "z")) -> Report:
    """Compare delta-specialized pairings of L and its mutants with rational closures."""
    from .curves import rational

    M = as_multicurve(L)
    rep = Report("mutation invariance (delta-graded, up to overall shift)")
    for s in closures:
        R = rational(s)
        base = pair(M, R).mor.delta_specialized()
        for ax in axes:
            other = pair(mutate(M, ax), R).mor.delta_specialized()
            ok = base.same_up_to_shift(other)
            rep.add(f"{ax}  {Slope.parse(s)}", ok, f"rank {base.total} vs {other.total}")
    return rep


def closures_up_to(n: int) -> list[Slope]:
    from math import gcd

    out = {Slope(p, q) for p in range(-n, n + 1) for q in range(0, n + 1)
           if (p, q) != (0, 0) and gcd(p, q) == 1}
    return sorted(out)
