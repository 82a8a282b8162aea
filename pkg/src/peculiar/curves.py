"""Immersed multicurves on the 4-punctured sphere.

Geometry lives in the cover R^2 minus Z^2.  Lattice points carry puncture
classes by parity: 3 at (even, even), 2 at (odd, even), 4 at (even, odd)
and 1 at (odd, odd).  Unit edges are lifts of the four arcs: ``a`` on
vertical lines of odd x, ``c`` on vertical lines of even x, ``b`` on
horizontal lines of even y and ``d`` on horizontal lines of odd y.  The
unit square with lower-left corner (i, j) is a front face (p-labels) when
i + j is even and a back face (q-labels) otherwise.

A loop is stored as a cyclic word: position k sits on a site and carries
the label of the arrow from position k to position k + 1.  The local system
X sits on the segment leaving position 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import f2
from .algebra import (
    FULL,
    MIRROR,
    Basis,
    Relabel,
    m4,
    relabel_automorphism,
    site_name,
)
from .complexes import Complex, Gen, direct_sum
from .gradings import TRIVIAL, Lattice, Vec, bigrading, vadd, vsub

ZERO5: Vec = (Fraction(0),) * 5


class CurveError(ValueError):
    pass


# --------------------------------------------------------------------------
# segment labels


def seg_label(s: int, t: int, face: str) -> Basis:
    """Label of the arrow from site s to site t across a face ('p' or 'q')."""
    if s == t:
        raise CurveError("a segment must connect distinct arcs")
    if face == "p":
        return Basis("p", m4(t + 1), (s - t) % 4)
    if face == "q":
        return Basis("q", t, (t - s) % 4)
    raise CurveError(f"bad face {face!r}")


def reverse_label(b: Basis) -> Basis:
    """The label of the same elementary segment traversed backwards."""
    return seg_label(b.left, b.right, b.kind)


# --------------------------------------------------------------------------
# slopes


@dataclass(frozen=True, order=True)
class Slope:
    """Reduced p/q in QP^1; 1/0 allowed."""

    p: int
    q: int

    def __post_init__(self) -> None:
        p, q = self.p, self.q
        if p == 0 and q == 0:
            raise CurveError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @staticmethod
    def parse(text: str | "Slope") -> "Slope":
        if isinstance(text, Slope):
            return text
        try:
            a, b = str(text).strip().split("/")
            return Slope(int(a), int(b))
        except ValueError as exc:
            raise CurveError(f"bad slope {text!r}; expected p/q") from exc

    @property
    def direction(self) -> tuple[int, int]:
        return (self.q, self.p)

    def act(self, mat) -> "Slope":
        (a, b), (c, d) = mat
        x, y = self.direction
        return Slope(c * x + d * y, a * x + b * y)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def puncture_class(x: int, y: int) -> int:
    return {(0, 0): 3, (1, 0): 2, (0, 1): 4, (1, 1): 1}[(x % 2, y % 2)]


# --------------------------------------------------------------------------
# loops


Word = tuple[tuple[int, Basis], ...]


@dataclass(frozen=True)
class Loop:
    word: Word
    X: f2.Mat = ((1,),)
    anchor: Vec = ZERO5

    def __post_init__(self) -> None:
        word = tuple((int(s), b) for s, b in self.word)
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "X", f2.as_mat(self.X))
        object.__setattr__(self, "anchor", tuple(Fraction(x) for x in self.anchor))
        n = len(word)
        if n < 2 or n % 2:
            raise CurveError(f"a loop word needs an even length >= 2, got {n}")
        for k, (s, b) in enumerate(word):
            t = word[(k + 1) % n][0]
            if b.kind not in "pq" or any(b.u):
                raise CurveError(f"segment {b} is not a p- or q-path")
            if b.right != s or b.left != t:
                raise CurveError(f"segment {b} at position {k} does not run {site_name(s)}->{site_name(t)}")
            if not 1 <= b.length <= 3:
                raise CurveError(f"segment {b} does not connect distinct arcs")
            if b.kind == word[(k + 1) % n][1].kind:
                raise CurveError(f"consecutive segments at position {k + 1} lie in the same face")
        if not f2.is_invertible(self.X):
            raise CurveError("local system must be invertible")
        if len(self.anchor) != 5:
            raise CurveError("anchor is a (delta, A1..A4) vector")

    # basic data -----------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def dim(self) -> int:
        return len(self.X)

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.word)

    @property
    def labels(self) -> tuple[Basis, ...]:
        return tuple(b for _, b in self.word)

    def key(self) -> tuple:
        return tuple((s, b.kind, b.start, b.length) for s, b in self.word)

    def is_primitive(self) -> bool:
        return primitive_period(self.key()) == self.n

    # gradings -------------------------------------------------------------
    @cached_property
    def position_gradings(self) -> tuple[Vec, ...]:
        out = [self.anchor]
        for _, b in self.word[:-1]:
            out.append(step_grading(out[-1], b))
        return tuple(out)

    @cached_property
    def closure(self) -> Vec:
        """Grading discrepancy after one full turn (zero when gradings close up)."""
        last = step_grading(self.position_gradings[-1], self.word[-1][1])
        return vsub(last, self.anchor)

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice.of([self.closure])

    @property
    def delta_closed(self) -> bool:
        return self.closure[0] == 0

    # transformations ------------------------------------------------------
    def rotated(self, k: int) -> "Loop":
        """Start the word at position k (monodromy is transported)."""
        k %= self.n
        if k == 0:
            return self
        # monodromy based at the new start is conjugate to X, so X is kept
        word = self.word[k:] + self.word[:k]
        return Loop(word, self.X, self.position_gradings[k])

    def reversed(self) -> "Loop":
        """Opposite orientation, based at the same position; X is inverted."""
        n = self.n
        sites = self.sites
        word = []
        for k in range(n):
            i = (-k) % n
            j = (i - 1) % n
            word.append((sites[i], reverse_label(self.word[j][1])))
        # the segment carrying X is now the one arriving at position 0: move it
        rev = Loop(tuple(word), f2.identity(self.dim), self.anchor)
        Xi = f2.inverse(self.X)
        # monodromy of the reversed loop based at position 0 is X^-1
        return replace(rev, X=Xi)

    def with_anchor(self, anchor: Sequence) -> "Loop":
        return replace(self, anchor=tuple(Fraction(x) for x in anchor))

    def shifted(self, g: Sequence) -> "Loop":
        return self.with_anchor(vadd(self.anchor, g))

    def __str__(self) -> str:
        from .textio import format_loop

        return format_loop(self)


def step_grading(g: Vec, b: Basis) -> Vec:
    """Grading of the target of an arrow labelled b leaving a generator graded g."""
    return vsub(vadd(g, bigrading(1, (0, 0, 0, 0))), bigrading(b.delta, b.alex))


def primitive_period(seq: Sequence) -> int:
    n = len(seq)
    for d in range(1, n + 1):
        if n % d == 0 and all(seq[i] == seq[i % d] for i in range(n)):
            return d
    return n


@dataclass(frozen=True)
class Multicurve:
    loops: tuple[Loop, ...] = ()
    extra: Lattice = TRIVIAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "loops", tuple(self.loops))

    @property
    def lattice(self) -> Lattice:
        lat = self.extra
        for L in self.loops:
            lat = lat.join(L.lattice)
        return lat

    def __iter__(self):
        return iter(self.loops)

    def __len__(self) -> int:
        return len(self.loops)

    def __add__(self, other: "Multicurve | Loop") -> "Multicurve":
        if isinstance(other, Loop):
            other = Multicurve((other,))
        return Multicurve(self.loops + other.loops, self.extra.join(other.extra))

    def canonical(self) -> "Multicurve":
        return canonicalize(self)

    def __str__(self) -> str:
        from .textio import format_multicurve

        return format_multicurve(self)


def as_multicurve(L: Loop | Multicurve) -> Multicurve:
    return L if isinstance(L, Multicurve) else Multicurve((L,))


# --------------------------------------------------------------------------
# the functor Pi


def pi(L: Loop | Multicurve, *, extra: Lattice | None = None) -> Complex:
    """The peculiar module of a loop or multicurve, over the full algebra."""
    if isinstance(L, Multicurve):
        if not L.loops:
            return Complex(FULL, (), lattice=L.lattice)
        parts = [pi(x) for x in L.loops]
        if len(parts) == 1:
            M = parts[0]
        else:
            M = direct_sum(*parts)
        return M.evolve(lattice=M.lattice.join(L.lattice).join(extra or TRIVIAL))
    n, m = L.n, L.dim
    grades = L.position_gradings
    names = [f"{site_name(s)}{k}" for k, s in enumerate(L.sites)]
    gens = [Gen(names[k], s, g[0], g[1:], m) for k, (s, g) in enumerate(zip(L.sites, grades))]
    arrows = []
    eye = f2.identity(m)
    for k, (_, b) in enumerate(L.word):
        j = (k + 1) % n
        fwd = L.X if k == 0 else eye
        bwd = f2.inverse(L.X) if k == 0 else eye
        arrows.append((names[k], names[j], b, fwd))
        arrows.append((names[j], names[k], reverse_label(b), bwd))
    lat = L.lattice.join(extra or TRIVIAL)
    return Complex(FULL, tuple(gens), tuple(arrows), lattice=lat)


# --------------------------------------------------------------------------
# polylines in the cover and reading them back as words

Point = tuple[Fraction, Fraction]
Edge = tuple[str, int, int]  # ('v', x, j) for x fixed, y in (j, j+1); ('h', y, i) likewise


def _edge_site(e: Edge) -> int:
    kind, k, _ = e
    if kind == "v":
        return 1 if k % 2 else 3
    return 2 if k % 2 == 0 else 4


def _shift_edge(e: Edge, P: tuple[int, int]) -> Edge:
    kind, k, j = e
    if kind == "v":
        return ("v", k + P[0], j + P[1])
    return ("h", k + P[1], j + P[0])


def _square_face(sq: tuple[int, int]) -> str:
    return "p" if (sq[0] + sq[1]) % 2 == 0 else "q"


def _square_edges(sq: tuple[int, int]) -> list[Edge]:
    i, j = sq
    return [("v", i, j), ("v", i + 1, j), ("h", j, i), ("h", j + 1, i)]


def _floor(x: Fraction) -> int:
    return math.floor(x)


@dataclass
class _Crossing:
    edge: Edge
    enter: tuple[int, int]
    key: tuple[int, Fraction]
    ident: int = 0


def _segment_crossings(A: Point, B: Point, seg: int) -> list[_Crossing]:
    (ax, ay), (bx, by) = A, B
    hits: list[tuple[Fraction, _Crossing]] = []
    if ax != bx:
        lo, hi = sorted((ax, bx))
        for k in range(_floor(lo) + 1, math.ceil(hi)):
            t = (k - ax) / (bx - ax)
            y = ay + t * (by - ay)
            if y.denominator == 1:
                raise CurveError("polyline meets a lattice point")
            j = _floor(y)
            enter = (k, j) if bx > ax else (k - 1, j)
            hits.append((t, _Crossing(("v", k, j), enter, (seg, t))))
    if ay != by:
        lo, hi = sorted((ay, by))
        for k in range(_floor(lo) + 1, math.ceil(hi)):
            t = (k - ay) / (by - ay)
            x = ax + t * (bx - ax)
            if x.denominator == 1:
                raise CurveError("polyline meets a lattice point")
            i = _floor(x)
            enter = (i, k) if by > ay else (i, k - 1)
            hits.append((t, _Crossing(("h", k, i), enter, (seg, t))))
    hits.sort(key=lambda h: h[0])
    for (t1, _), (t2, _) in zip(hits, hits[1:]):
        if t1 == t2:
            raise CurveError("polyline passes through a lattice point")
    return [c for _, c in hits]


@dataclass(frozen=True)
class Reading:
    """A reduced crossing sequence of a periodic polyline."""

    sites: tuple[int, ...]
    faces: tuple[str, ...]
    edges: tuple[Edge, ...]
    keys: tuple[tuple[int, Fraction], ...]
    marker: int  # index of the segment holding the local system
    period: tuple[int, int]

    @property
    def word(self) -> Word:
        n = len(self.sites)
        return tuple((self.sites[k], seg_label(self.sites[k], self.sites[(k + 1) % n], self.faces[k]))
                     for k in range(n))


def read_polyline(verts: Sequence[Point], period: tuple[int, int], marker: int = 0) -> Reading:
    """Crossings of a periodic polyline with the arc lifts, U-turns removed.

    ``verts`` covers one period; vertex k + len(verts) is vertex k shifted by
    ``period``.  The local system sits at vertex ``marker``.
    """
    m = len(verts)
    pts = [tuple(Fraction(c) for c in v) for v in verts]
    P = (int(period[0]), int(period[1]))
    ring = pts + [(pts[0][0] + P[0], pts[0][1] + P[1])]
    raw: list[_Crossing] = []
    mark_after: int | None = None  # ident of the crossing just before the marker
    for s in range(m):
        if s == marker:
            mark_after = raw[-1].ident if raw else None
        for c in _segment_crossings(ring[s], ring[s + 1], s):
            c.ident = len(raw)
            raw.append(c)
    if not raw:
        raise CurveError("the curve is null-homotopic or peripheral (no crossings)")
    # linear U-turn cancellation
    stack: list[_Crossing] = []
    mark = mark_after
    for c in raw:
        if stack and stack[-1].edge == c.edge:
            prev = stack.pop()
            if mark in (prev.ident, c.ident):
                mark = stack[-1].ident if stack else None
            continue
        stack.append(c)
    last_id = raw[-1].ident
    if mark == last_id:
        mark = None
    # cyclic cancellation: last crossing against the next copy of the first
    while len(stack) >= 2 and stack[-1].edge == _shift_edge(stack[0].edge, P):
        first, lastc = stack[0], stack[-1]
        stack = stack[1:-1]
        if mark in (first.ident, lastc.ident) or (stack and mark == stack[-1].ident):
            mark = None
    if len(stack) < 2:
        raise CurveError("the curve is null-homotopic or peripheral")
    ids = [c.ident for c in stack]
    if mark is not None and mark not in ids:
        raise CurveError("lost track of the local system marker")
    seg = len(stack) - 1 if mark is None or mark == ids[-1] else ids.index(mark)
    n = len(stack)
    faces = []
    for k, c in enumerate(stack):
        nxt = stack[(k + 1) % n].edge if k + 1 < n else _shift_edge(stack[0].edge, P)
        if nxt not in _square_edges(c.enter):
            raise CurveError("inconsistent crossing sequence")
        faces.append(_square_face(c.enter))
    return Reading(tuple(_edge_site(c.edge) for c in stack), tuple(faces),
                   tuple(c.edge for c in stack), tuple(c.key for c in stack), seg, P)


def _loop_from_reading(r: Reading, X: f2.Mat) -> Loop:
    n = len(r.sites)
    k = (r.marker) % n
    word = r.word
    return Loop(word[k:] + word[:k], X)


# --------------------------------------------------------------------------
# constructors

_GENERIC = (Fraction(1, 1000003), Fraction(1, 1000003 * 1009))


def _nudge(pt: Point) -> Point:
    x, y = pt
    if x.denominator == 1:
        x += _GENERIC[0]
    if y.denominator == 1:
        y += _GENERIC[1]
    return (x, y)


def _rational_polyline(s: Slope) -> tuple[list[Point], tuple[int, int]]:
    q, p = s.direction
    if q != 0:
        x0 = Fraction(1, 7) + _GENERIC[0]
        y0 = (Fraction(1, 2) + p * x0) / q
    else:
        x0 = Fraction(-1, 2 * p)
        y0 = Fraction(1, 7) + _GENERIC[1]
    return [_nudge((x0, y0))], (2 * q, 2 * p)


def rational(slope: Slope | str, X: f2.Mat | None = None) -> Loop:
    """The embedded curve lifting to lines of the given slope."""
    s = Slope.parse(slope)
    verts, P = _rational_polyline(s)
    X = f2.identity(1) if X is None else f2.as_mat(X)
    L = canonical_loop(_loop_from_reading(read_polyline(verts, P), f2.identity(1)))
    return replace(L, X=X)


def irrational_pairs(slope: Slope | str) -> list[tuple[int, int]]:
    """Ordered puncture pairs (i1, i2) lying on consecutive points of a slope line."""
    s = Slope.parse(slope)
    u = s.direction
    out = []
    for v0 in ((0, 0), (1, 0), (0, 1), (1, 1)):
        out.append((puncture_class(*v0), puncture_class(v0[0] + u[0], v0[1] + u[1])))
    return out


def _irrational_polyline(n: int, s: Slope, pair: tuple[int, int]):
    u = s.direction
    v0 = next((v for v in ((0, 0), (1, 0), (0, 1), (1, 1))
                if (puncture_class(*v), puncture_class(v[0] + u[0], v[1] + u[1])) == tuple(pair)), None)
    if v0 is None:
        raise CurveError(f"punctures {pair} do not lie consecutively on a line of slope {s}")
    nrm = (-u[1], u[0])
    eta = Fraction(1, 1009 * (abs(u[0]) + abs(u[1]) + 1))
    t0 = Fraction(1, 2) - Fraction(1, 10007)
    t1 = Fraction(1, 2) + Fraction(1, 10009)

    def at(t: Fraction, side: int) -> Point:
        return _nudge((v0[0] + t * u[0] + side * eta * nrm[0], v0[1] + t * u[1] + side * eta * nrm[1]))

    verts = [at(t0, -1), at(t1, 1), at(2 * n + t0, 1), at(2 * n + t1, -1)]
    P = (4 * n * u[0], 4 * n * u[1])
    return verts, P


def irrational(n: int, slope: Slope | str, pair: Sequence[int]) -> Loop:
    """The immersed curve running along a slope line through punctures ``pair``."""
    if n < 1:
        raise CurveError("irrational curves need n >= 1")
    s = Slope.parse(slope)
    pair = tuple(int(x) for x in pair)
    try:
        verts, P = _irrational_polyline(n, s, pair)
    except CurveError:
        verts, P = _irrational_polyline(n, s, pair[::-1])
    return canonical_loop(_loop_from_reading(read_polyline(verts, P), f2.identity(1)))


def b_curve(n: int) -> Loop:
    return irrational(n, Slope(0, 1), (2, 3))


def d_curve(n: int) -> Loop:
    return irrational(n, Slope(0, 1), (4, 1))


def no_wrapping(L: Loop) -> bool:
    """True when Pi(L) has no consecutive arrows labelled p_i, q_i (or q_i, p_i)."""
    n = L.n
    for k in range(n):
        a = L.word[k - 1][1]
        b = L.word[k][1]
        for first, second in ((a, b), (reverse_label(b), reverse_label(a))):
            if (first.length == second.length == 1 and first.kind != second.kind
                    and first.start == second.start):
                return False
    return True


# --------------------------------------------------------------------------
# lifts


@dataclass(frozen=True)
class LiftWalk:
    edges: tuple[Edge, ...]
    squares: tuple[tuple[int, int], ...]
    delta: tuple[int, int]
    closes_by: str  # 'translation' or 'rotation'
    linear: bool

    @property
    def direction(self) -> tuple[int, int] | None:
        if self.delta == (0, 0):
            return None
        g = math.gcd(*self.delta)
        return (self.delta[0] // g, self.delta[1] // g)


_START_EDGE = {1: ("v", 1, 0), 2: ("h", 0, 0), 3: ("v", 0, 0), 4: ("h", 1, 0)}


def _adjacent_squares(e: Edge) -> list[tuple[int, int]]:
    kind, k, j = e
    if kind == "v":
        return [(k - 1, j), (k, j)]
    return [(j, k - 1), (j, k)]


def _walk(L: Loop, steps: int) -> tuple[list[Edge], list[tuple[int, int]]]:
    e = _START_EDGE[L.sites[0]]
    edges, squares = [e], []
    for k in range(steps):
        _, b = L.word[k % L.n]
        target = L.sites[(k + 1) % L.n]
        sq = next(s for s in _adjacent_squares(e) if _square_face(s) == b.kind)
        nxt = [x for x in _square_edges(sq) if _edge_site(x) == target and x != e]
        if len(nxt) != 1:
            raise CurveError("lift walk is ambiguous")
        squares.append(sq)
        e = nxt[0]
        edges.append(e)
    return edges, squares


def lift(L: Loop) -> LiftWalk:
    """Face-by-face walk of one period through the cover."""
    edges, squares = _walk(L, L.n)
    e0, en = edges[0], edges[-1]
    if e0[0] != en[0]:
        raise CurveError("lift does not close up")
    d1, d2 = en[1] - e0[1], en[2] - e0[2]
    if e0[0] == "v":
        delta = (d1, d2)
    else:
        delta = (d2, d1)
    if d1 % 2 == 0 and d2 % 2 == 0:
        closes = "translation"
    else:
        closes = "rotation"
        delta = (0, 0)
    linear = _is_linear(L, squares, delta)
    return LiftWalk(tuple(edges), tuple(squares), delta, closes, linear)


def _is_linear(L: Loop, squares, delta) -> bool:
    if delta == (0, 0):
        return False
    try:
        return classify(L)[0] != "other"
    except CurveError:
        return False


def _center(sq: tuple[int, int]) -> Point:
    return (Fraction(sq[0]) + Fraction(1, 2) + _GENERIC[0], Fraction(sq[1]) + Fraction(1, 2) + _GENERIC[1])


def _polyline_of(L: Loop) -> tuple[list[Point], tuple[int, int], int]:
    """A polyline through square centres realizing the loop; returns (verts, period, fold)."""
    edges, squares = _walk(L, L.n)
    e0, en = edges[0], edges[-1]
    d1, d2 = en[1] - e0[1], en[2] - e0[2]
    if d1 % 2 == 0 and d2 % 2 == 0:
        P = (d1, d2) if e0[0] == "v" else (d2, d1)
        return [_center(s) for s in squares], P, 1
    # closes by a rotation: go around twice, building the second half by symmetry
    if e0[0] == "v":
        w2 = (e0[1] + en[1], e0[2] + en[2] + 1)
    else:
        w2 = (e0[2] + en[2] + 1, e0[1] + en[1])
    first = [_center(s) for s in squares]
    second = [(w2[0] - x, w2[1] - y) for x, y in first]
    return first + second, (0, 0), 2


# --------------------------------------------------------------------------
# affine maps and twists

Affine = tuple[tuple[tuple[int, int], tuple[int, int]], tuple[int, int]]


def affine_apply(f: Affine, v: Point) -> Point:
    (a, b), (c, d) = f[0]
    return (a * v[0] + b * v[1] + f[1][0], c * v[0] + d * v[1] + f[1][1])


def affine_compose(f: Affine, g: Affine) -> Affine:
    """f after g."""
    (a, b), (c, d) = f[0]
    (e, ff), (g_, h) = g[0]
    lin = ((a * e + b * g_, a * ff + b * h), (c * e + d * g_, c * ff + d * h))
    t = affine_apply((f[0], (0, 0)), g[1])
    return (lin, (int(t[0]) + f[1][0], int(t[1]) + f[1][1]))


def affine_inverse(f: Affine) -> Affine:
    (a, b), (c, d) = f[0]
    det = a * d - b * c
    if det not in (1, -1):
        raise CurveError("affine map is not invertible over Z")
    lin = ((d * det, -b * det), (-c * det, a * det))
    t = affine_apply((lin, (0, 0)), f[1])
    return (lin, (-int(t[0]), -int(t[1])))


def in_deck_group(f: Affine) -> bool:
    lin, t = f
    if lin == ((1, 0), (0, 1)) or lin == ((-1, 0), (0, -1)):
        return t[0] % 2 == 0 and t[1] % 2 == 0
    return False


def same_mapping_class(f: Affine, g: Affine) -> bool:
    return in_deck_group(affine_compose(f, affine_inverse(g)))


def puncture_permutation(f: Affine) -> tuple[int, int, int, int]:
    """Image of punctures 1..4 under f."""
    reps = {3: (0, 0), 2: (1, 0), 4: (0, 1), 1: (1, 1)}
    out = []
    for k in range(1, 5):
        x, y = affine_apply(f, reps[k])
        out.append(puncture_class(int(x), int(y)))
    return tuple(out)  # type: ignore[return-value]


# rotation taking site k to site k+1
RHO: Affine = (((0, 1), (-1, 0)), (0, 1))
# handedness of the half-twist along c realized by the Dehn-twist bimodule
TWIST_SIGN = 1
_T_C: Affine = (((1, 0), (TWIST_SIGN, 1)), (0, 1))


def _rho_power(k: int) -> Affine:
    f: Affine = (((1, 0), (0, 1)), (0, 0))
    for _ in range(k % 4):
        f = affine_compose(RHO, f)
    return f


def arc_twist(arc: int, power: int = 1) -> Affine:
    """The half-twist along arc ``arc`` (1..4), or its inverse for power=-1."""
    r = _rho_power(arc - 3)
    f = affine_compose(r, affine_compose(_T_C, affine_inverse(r)))
    return f if power == 1 else affine_inverse(f)


TAU1: Affine = (((1, 1), (0, 1)), (0, 0))
TAU2: Affine = (((1, 0), (1, 1)), (0, 0))


def _letter_map(tok: str) -> Affine:
    tok = tok.strip()
    base, _, exp = tok.partition("^")
    power = int(exp) if exp else 1
    if base in ("t1", "tau1"):
        f = TAU1
    elif base in ("t2", "tau2"):
        f = TAU2
    elif base in ("ta", "tb", "tc", "td"):
        f = arc_twist("abcd".index(base[1]) + 1)
    else:
        raise CurveError(f"unknown twist letter {tok!r}")
    g: Affine = (((1, 0), (0, 1)), (0, 0))
    step = f if power > 0 else affine_inverse(f)
    for _ in range(abs(power)):
        g = affine_compose(step, g)
    return g


def parse_twist_word(word: str | Sequence[str]) -> list[str]:
    if isinstance(word, str):
        toks = [t for t in word.replace("*", " ").replace(",", " ").split() if t]
    else:
        toks = list(word)
    for t in toks:
        _letter_map(t)
    return toks


def twist_matrix(word: str | Sequence[str]) -> Affine:
    """Affine map of a twist word; the rightmost letter acts first."""
    f: Affine = (((1, 0), (0, 1)), (0, 0))
    for tok in parse_twist_word(word):
        f = affine_compose(f, _letter_map(tok))
    return f


def _elementary(tok: str) -> list[tuple[int, int]]:
    """Express a letter as a product of arc half-twists (arc, +-1), rightmost first."""
    tok = tok.strip()
    base, _, exp = tok.partition("^")
    power = int(exp) if exp else 1
    target = _letter_map(base)
    for arc in range(1, 5):
        for sgn in (1, -1):
            if same_mapping_class(arc_twist(arc, sgn), target):
                return [(arc, sgn if power > 0 else -sgn)] * abs(power)
    raise CurveError(f"letter {tok!r} is not a single half-twist")


def apply_affine(L: Loop, f: Affine) -> Loop:
    """Transport a loop by an affine map of the cover and re-read it (no gradings)."""
    verts, P, fold = _polyline_of(L)
    new = [_nudge(affine_apply(f, v)) for v in verts]
    P2 = affine_apply((f[0], (0, 0)), P)
    r = read_polyline(new, (int(P2[0]), int(P2[1])))
    X = L.X
    word = r.word
    n = len(word)
    k = r.marker % n
    word = word[k:] + word[:k]
    if fold == 2:
        half = primitive_period(tuple((s, b) for s, b in word))
        if n % 2 or half > n // 2:
            raise CurveError("twisted loop lost its symmetry")
        word = word[: n // 2]
    return Loop(word, X)


def _half_twist(L: Loop, arc: int, sgn: int) -> Loop:
    """One half-twist with grading transport through a preserved intersection."""
    f = arc_twist(arc, sgn)
    verts, P, fold = _polyline_of(L)
    old = read_polyline(verts, P)
    new_pts = [affine_apply(f, v) for v in verts]
    P2 = affine_apply((f[0], (0, 0)), P)
    new = read_polyline(new_pts, (int(P2[0]), int(P2[1])))
    word = new.word
    n = len(word)
    # positions of the old reading: old reading starts at the marker segment
    n_old = len(old.sites)
    old_shift = old.marker % n_old
    old_pos = {key: (k - old_shift) % n_old for k, key in enumerate(old.keys)}
    grades = L.position_gradings
    perm = puncture_permutation(f)
    half = [Fraction(0)] * 4
    half[arc - 1] = half[m4(arc + 1) - 1] = Fraction(1, 2)
    anchor_pos = None
    # crossings off the arc shift by +half, crossings on the arc by -half
    kept = sorted((new.sites[k] == arc, k) for k, key in enumerate(new.keys) if key in old_pos)
    if kept:
        on_arc, k = kept[0]
        # old position in L's indexing (fold=2 words repeat)
        g = grades[old_pos[new.keys[k]] % L.n]
        A = [Fraction(0)] * 4
        for i in range(4):
            A[perm[i] - 1] = g[1 + i]
        s = -sgn if on_arc else sgn
        A = [a + s * h for a, h in zip(A, half)]
        anchor_pos = (k, (g[0],) + tuple(A))
    k0 = new.marker % n
    word = word[k0:] + word[:k0]
    if fold == 2:
        word = word[: n // 2]
    out = Loop(word, L.X)
    if anchor_pos is None:
        return _half_twist_fixed(L, out, arc, sgn, perm)
    k, g = anchor_pos
    pos = (k - k0) % n % out.n
    # propagate back from position pos to position 0
    gr = out.with_anchor(ZERO5).position_gradings
    return out.with_anchor(vsub(g, gr[pos]))


def _half_twist_fixed(L: Loop, out: Loop, arc: int, sgn: int, perm) -> Loop:
    """Grading transport when the twisted loop has the same word up to rotation."""
    okey = out.key()
    n = L.n
    for src in (L, L.reversed()):
        key = src.key()
        r = next((r for r in range(n) if key[r:] + key[:r] == okey), None)
        if r is None:
            continue
        for j in range(n):
            if src.sites[(j + r) % n] == arc:
                continue
            g = src.position_gradings[(j + r) % n]
            A = [Fraction(0)] * 4
            for i in range(4):
                A[perm[i] - 1] = g[1 + i]
            A[arc - 1] += sgn * Fraction(1, 2)
            A[m4(arc + 1) - 1] += sgn * Fraction(1, 2)
            gr = out.with_anchor(ZERO5).position_gradings
            return out.with_anchor(vsub((g[0],) + tuple(A), gr[j]))
    raise CurveError("no intersection survives the half-twist to carry the grading")


def twist(L: Loop | Multicurve, word: str | Sequence[str]) -> Loop | Multicurve:
    """Act by a word in t1, t2 (and inverses, e.g. ``t1^-1``); rightmost acts first."""
    if isinstance(L, Multicurve):
        return Multicurve(tuple(twist(x, word) for x in L.loops), L.extra)
    toks = parse_twist_word(word)
    for tok in reversed(toks):
        for arc, sgn in _elementary(tok):
            L = _half_twist(L, arc, sgn)
    return L


def half_twist(L: Loop | Multicurve, arc: int = 3, power: int = 1) -> Loop | Multicurve:
    """The half-twist along one arc (the geometric counterpart of the Dehn-twist bimodule)."""
    if isinstance(L, Multicurve):
        return Multicurve(tuple(half_twist(x, arc, power) for x in L.loops), L.extra)
    sgn = 1 if power > 0 else -1
    for _ in range(abs(power)):
        L = _half_twist(L, arc, sgn)
    return L


# --------------------------------------------------------------------------
# relabelling: mutation and mirror


def relabel_loop(L: Loop, r: Relabel) -> Loop:
    word = []
    for s, b in L.word:
        word.append((r.site(s), r.basis(b)))
    anchor = (L.anchor[0],) + tuple(r.alex(L.anchor[1:]))
    return Loop(tuple(word), L.X, anchor)


def mutate(L: Loop | Multicurve, axis: str) -> Loop | Multicurve:
    r = relabel_automorphism("mut_" + axis if len(axis) == 1 else axis)
    if isinstance(L, Multicurve):
        return Multicurve(tuple(relabel_loop(x, r) for x in L.loops), L.extra.map(
            lambda v: (v[0],) + tuple(r.alex(v[1:]))))
    return relabel_loop(L, r)


def mirror(L: Loop | Multicurve) -> Loop | Multicurve:
    if isinstance(L, Multicurve):
        return Multicurve(tuple(relabel_loop(x, MIRROR) for x in L.loops), L.extra.map(
            lambda v: (v[0],) + tuple(MIRROR.alex(v[1:]))))
    return relabel_loop(L, MIRROR)


def relabel_complex(M: Complex, r: Relabel) -> Complex:
    """Push a module forward along a relabelling automorphism."""
    gens = tuple(replace(g, idem=r.site(g.idem), alex=r.alex(g.alex)) for g in M.gens)
    arrows = tuple((s, d, r.basis(b), m) for s, d, b, m in M.arrows)
    lat = M.lattice.map(lambda v: (v[0],) + tuple(r.alex(v[1:])))
    return Complex(r.image_alg(M.alg), gens, arrows, matching=M.matching, lattice=lat, letters=M.letters)


# --------------------------------------------------------------------------
# canonical forms


def _rcf_key(X: f2.Mat) -> tuple:
    return f2.invariant_factors(X)


def canonical_loop(L: Loop, lattice: Lattice | None = None) -> Loop:
    """Least rotation over both orientations, RCF local system, reduced anchor."""
    lat = (lattice or TRIVIAL).join(L.lattice)
    best = None
    for cand in (L, L.reversed()):
        keys = cand.key()
        n = cand.n
        for k in range(n):
            rot = keys[k:] + keys[:k]
            if best is None or rot < best[0]:
                best = (rot, [(cand, k)])
            elif rot == best[0]:
                best[1].append((cand, k))
    assert best is not None
    options = []
    for cand, k in best[1]:
        X = cand.X
        anchor = cand.position_gradings[k]
        options.append((_rcf_key(X), lat.reduce(anchor), cand, k))
    options.sort(key=lambda o: (o[0], o[1]))
    facs, anchor, cand, k = options[0]
    word = cand.word[k:] + cand.word[:k]
    X = f2.rational_canonical(cand.X) if cand.dim > 1 else cand.X
    return Loop(word, X, anchor)


def canonicalize(L: Loop | Multicurve) -> Loop | Multicurve:
    """Canonical representative; multicurves bundle equal curves into one local system."""
    if isinstance(L, Loop):
        return canonical_loop(L)
    lat = L.lattice
    groups: dict[tuple, list[f2.Mat]] = {}
    words: dict[tuple, Word] = {}
    for x in L.loops:
        c = canonical_loop(x, lat)
        key = (c.key(), lat.reduce(c.anchor))
        groups.setdefault(key, []).append(c.X)
        words[key] = c.word
    loops = []
    for key in sorted(groups):
        X = f2.block_diag(groups[key])
        X = f2.rational_canonical(X) if len(X) > 1 else X
        loops.append(Loop(words[key], X, key[1]))
    return Multicurve(tuple(loops), lat)


def equal(a: Loop | Multicurve, b: Loop | Multicurve) -> bool:
    A, B = as_multicurve(a), as_multicurve(b)
    lat = A.lattice.join(B.lattice)
    ca = canonicalize(Multicurve(A.loops, lat))
    cb = canonicalize(Multicurve(B.loops, lat))
    return ca.loops == cb.loops


def equal_up_to_shift(a: Loop | Multicurve, b: Loop | Multicurve) -> Vec | None:
    """An overall shift s with a + s == b, or None."""
    A, B = as_multicurve(a), as_multicurve(b)
    if len(A) != len(B) or not A.loops:
        return None if len(A) != len(B) else ZERO5
    lat = A.lattice.join(B.lattice)
    ca = canonicalize(Multicurve(A.loops, lat))
    cb = canonicalize(Multicurve(B.loops, lat))
    if sorted(x.key() for x in ca.loops) != sorted(x.key() for x in cb.loops):
        return None
    first = ca.loops[0]
    for y in cb.loops:
        if y.key() != first.key():
            continue
        s = vsub(y.anchor, first.anchor)
        shifted = Multicurve(tuple(x.shifted(s) for x in A.loops), lat)
        if equal(shifted, Multicurve(B.loops, lat)):
            return s
    return None


# --------------------------------------------------------------------------
# classification


def _to_horizontal(direction: tuple[int, int]) -> list[str]:
    """A word in t1, t2 mapping the primitive direction to (1, 0) up to sign."""
    x, y = direction
    word: list[str] = []
    # Euclid with shears: t1 = (x+y, y), t2 = (x, x+y)
    guard = 0
    while y != 0:
        guard += 1
        if guard > 200:
            raise CurveError("slope reduction did not terminate")
        if x == 0:
            # (0, y) -> t1 -> (y, y) -> t2^-1 -> (y, 0)
            x, y = x + y, y
            word.insert(0, "t1")
            continue
        if abs(y) >= abs(x):
            k = -(y // x)
            # apply t2^k: (x, y) -> (x, y + k x)
            y = y + k * x
            word[:0] = ["t2" if k > 0 else "t2^-1"] * abs(k)
        else:
            k = -(x // y)
            x = x + k * y
            word[:0] = ["t1" if k > 0 else "t1^-1"] * abs(k)
    return word


def classify(L: Loop) -> tuple:
    """('rational', slope) / ('irrational', n, slope, pair) / ('other',)."""
    if not no_wrapping(L):
        return ("other",)
    try:
        walk_edges, squares = _walk(L, L.n)
    except CurveError:
        return ("other",)
    e0, en = walk_edges[0], walk_edges[-1]
    d1, d2 = en[1] - e0[1], en[2] - e0[2]
    if d1 % 2 or d2 % 2:
        return ("other",)
    delta = (d1, d2) if e0[0] == "v" else (d2, d1)
    if delta == (0, 0):
        return ("other",)
    g = math.gcd(*delta)
    prim = (delta[0] // g, delta[1] // g)
    slope = Slope(prim[1], prim[0])
    word = _to_horizontal(prim)
    bare = Loop(L.word, f2.identity(1))
    try:
        flat = apply_affine(bare, twist_matrix(word)) if word else bare
    except CurveError:
        return ("other",)
    key = canonical_loop(flat).key()
    if key == canonical_loop(rational("0/1")).key():
        return ("rational", slope)
    if (flat.n - 2) % 4 == 0 and flat.n >= 6:
        n = (flat.n - 2) // 4
        f = twist_matrix(word)
        finv = affine_inverse(f)
        for cand, pts in ((b_curve(n), ((1, 0), (0, 0))), (d_curve(n), ((0, 1), (1, 1)))):
            if canonical_loop(cand).key() == key:
                pair = tuple(sorted(puncture_class(*map(int, affine_apply(finv, p))) for p in pts))
                return ("irrational", n, slope, pair)
    return ("other",)


# --------------------------------------------------------------------------
# recognition


def recognize(M: Complex) -> Multicurve:
    """Read a loop-form complex back as a multicurve with gradings."""
    from .simplify import decompose, loop_form_defects

    bad = loop_form_defects(M)
    if bad:
        raise CurveError("module is not in loop form: " + "; ".join(bad[:5]))
    loops = []
    for comp in decompose(M):
        loops.append(_recognize_component(comp))
    return canonicalize(Multicurve(tuple(loops), M.lattice))


def _recognize_component(M: Complex) -> Loop:
    segs: dict[tuple[str, str], list] = {}
    for s, d, b, m in M.arrows:
        segs.setdefault((s, b.kind), []).append((d, s, d, b, m))
        segs.setdefault((d, b.kind), []).append((s, s, d, b, m))
    start = min(g.name for g in M.gens)
    order = [start]
    steps = []  # (forward label, forward matrix)
    cur, kind = start, "p"
    while True:
        options = segs[(cur, kind)]
        other = options[0][0]
        nxt_site = M.gen(other).idem
        label = seg_label(M.gen(cur).idem, nxt_site, kind)
        mats = [(s, d, b, m) for _, s, d, b, m in options if {s, d} == {cur, other}]
        fwd = [(b, m) for s, d, b, m in mats if s == cur and d == other and b == label]
        bwd = [(b, m) for s, d, b, m in mats if s == other and d == cur and b == reverse_label(label)]
        if fwd:
            mat = fwd[0][1]
        elif bwd:
            mat = f2.inverse(bwd[0][1])
        else:
            raise CurveError(f"segment {cur} - {other} does not match a curve segment")
        if fwd and bwd and not f2.is_zero(f2.matadd(f2.matmul(bwd[0][1], fwd[0][1]),
                                                    f2.identity(len(fwd[0][1])))):
            raise CurveError(f"segment {cur} - {other} has non-inverse matrices")
        steps.append((label, mat))
        cur = other
        kind = "q" if kind == "p" else "p"
        if cur == start and kind == "p":
            break
        order.append(cur)
        if len(order) > 2 * len(M.gens) + 2:
            raise CurveError("cycle walk did not close")
    n = len(steps)
    sites = [M.gen(x).idem for x in order]
    word = tuple((sites[k], steps[k][0]) for k in range(n))
    keyseq = tuple((s, b.kind, b.start, b.length) for s, b in word)
    per = primitive_period(keyseq)
    dim = M.gen(start).dim
    reps = n // per
    if reps == 1:
        X = f2.identity(dim)
        for _, m in steps:
            X = f2.matmul(m, X)
    else:
        blocks = []
        for r in range(reps):
            T = f2.identity(dim)
            for _, m in steps[r * per:(r + 1) * per]:
                T = f2.matmul(m, T)
            blocks.append(T)
        big = [[0] * (dim * reps) for _ in range(dim * reps)]
        for r, T in enumerate(blocks):
            rr_ = (r + 1) % reps
            for i in range(dim):
                for j in range(dim):
                    big[rr_ * dim + i][r * dim + j] = T[i][j]
        X = f2.as_mat(big)
        word = word[:per]
    g0 = M.gen(start)
    anchor = g0.grading
    return Loop(word, X, anchor)


# --------------------------------------------------------------------------
# absolute gradings


def delta_vertical(L: Loop) -> Fraction | None:
    """The common delta of intersections with a and c, if defined."""
    vals = {g[0] for s, g in zip(L.sites, L.position_gradings) if s in (1, 3)}
    return vals.pop() if len(vals) == 1 else None


def delta_horizontal(L: Loop) -> Fraction | None:
    vals = {g[0] for s, g in zip(L.sites, L.position_gradings) if s in (2, 4)}
    return vals.pop() if len(vals) == 1 else None


def reference_delta(L: Loop) -> Fraction:
    """delta_vert for slopes other than 1/0, delta_horiz otherwise."""
    dv = delta_vertical(L)
    if dv is not None:
        return dv
    dh = delta_horizontal(L)
    if dh is None:
        raise CurveError("loop is not linear enough to carry a reference delta grading")
    return dh


def _reference_anchor(L: Loop) -> Vec | None:
    """Absolute gradings of the horizontal reference curves."""
    cls = classify(L)
    if cls[0] == "rational" and cls[1] == Slope(0, 1):
        for k, s in enumerate(L.sites):
            if s == 1:
                return _anchor_from(L, k, bigrading(0, (0, 0, 0, 0)))
    if cls[0] == "irrational" and cls[2] == Slope(0, 1):
        n = cls[1]
        if cls[3] == (2, 3):
            # the b-intersection whose p-segment runs to a
            for k, (s, b) in enumerate(L.word):
                prev = L.word[(k - 1) % L.n][1]
                dest = b.left if b.kind == "p" else prev.right
                if s == 2 and dest == 1:
                    return _anchor_from(L, k, bigrading(Fraction(-1, 2), (0, n, n, 0)))
        if cls[3] == (1, 4):
            for k, (s, b) in enumerate(L.word):
                prev = L.word[(k - 1) % L.n][1]
                dest = b.left if b.kind == "p" else prev.right
                if s == 4 and dest == 3:
                    return _anchor_from(L, k, bigrading(Fraction(-1, 2), (n, 0, 0, n)))
    return None


def _anchor_from(L: Loop, k: int, g: Vec) -> Vec:
    gr = L.with_anchor(ZERO5).position_gradings
    return vsub(g, gr[k])


def assign_absolute_gradings(L: Loop | Multicurve) -> Loop | Multicurve:
    """Place each component in the reference grading of its curve type.

    Horizontal rational and irrational curves get the fixed reference gradings;
    every other linear curve is shifted so that its reference delta is 0.
    """
    if isinstance(L, Multicurve):
        return Multicurve(tuple(assign_absolute_gradings(x) for x in L.loops), L.extra)
    fig = _reference_anchor(L)
    if fig is not None:
        return L.with_anchor(fig)
    d = reference_delta(L)
    return L.with_anchor((L.anchor[0] - d,) + tuple(L.anchor[1:]))
