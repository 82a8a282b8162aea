"""Curved type D structures over the algebras of :mod:`peculiar.algebra`.

Convention: an arrow ``x -> y`` labelled ``a`` means ``d(x) = y (x) a`` with
``left(a) = idem(y)`` and ``right(a) = idem(x)``.  Composites put the later
label on the left, so d^2 from x to z is the sum of ``a(y->z) * a(x->y)``.
Each arrow also carries an F2 matrix of shape ``dim(y) x dim(x)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from . import f2
from .algebra import (
    FULL,
    MINUS,
    Alg,
    Basis,
    Matching,
    allowed,
    basis_paths,
    curvature_element,
    mul,
    u_monomials,
)
from .gradings import TRIVIAL, Lattice, Vec, bigrading, vadd, vneg, vsub

ZERO4 = (Fraction(0),) * 4


# --------------------------------------------------------------------------
# letter gradings


@dataclass(frozen=True)
class Letters:
    """How algebra letters contribute to the Alexander grading.

    Letter ``i`` (and ``U_i``) contributes ``sign * e_{perm[i-1]}``.  The
    standard convention is ``sign=1``, identity permutation; the grading
    operators rr and rr34 change it.
    """

    sign: int = 1
    perm: tuple[int, int, int, int] = (1, 2, 3, 4)

    def alex(self, b: Basis) -> tuple[Fraction, ...]:
        raw = b.alex
        out = [Fraction(0)] * 4
        for k in range(4):
            out[self.perm[k] - 1] += self.sign * raw[k]
        return tuple(out)

    def grade(self, b: Basis) -> Vec:
        return bigrading(b.delta, self.alex(b))

    def then(self, sign: int = 1, perm: tuple[int, ...] = (1, 2, 3, 4)) -> "Letters":
        return Letters(self.sign * sign, tuple(perm[p - 1] for p in self.perm))  # type: ignore[arg-type]


STANDARD = Letters()


def permute_vec(a, perm) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * 4
    for k in range(4):
        out[perm[k] - 1] = Fraction(a[k])
    return tuple(out)


# --------------------------------------------------------------------------
# generators and complexes


@dataclass(frozen=True, order=True)
class Gen:
    name: str
    idem: int
    delta: Fraction = Fraction(0)
    alex: tuple[Fraction, ...] = ZERO4
    dim: int = 1

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("generator fibres must have dim >= 1")
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "alex", tuple(Fraction(x) for x in self.alex))
        if len(self.alex) != 4:
            raise ValueError("Alexander vectors have four entries")

    @property
    def grading(self) -> Vec:
        return bigrading(self.delta, self.alex)

    def shifted(self, g: Vec) -> "Gen":
        return replace(self, delta=self.delta + g[0], alex=tuple(a + b for a, b in zip(self.alex, g[1:])))


Key = tuple[str, str, Basis]


class GradingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Complex:
    """A curved type D structure with matrix-valued arrows."""

    alg: Alg
    gens: tuple[Gen, ...]
    arrows: tuple[tuple[str, str, Basis, f2.Mat], ...] = ()
    matching: Matching | None = None
    lattice: Lattice = TRIVIAL
    letters: Letters = STANDARD
    check: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        gens = tuple(sorted(self.gens, key=lambda g: g.name))
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        object.__setattr__(self, "gens", gens)
        acc: dict[Key, f2.Mat] = {}
        byname = {g.name: g for g in gens}
        for src, dst, b, m in self.arrows:
            if src not in byname or dst not in byname:
                raise ValueError(f"arrow {src}->{dst} refers to an unknown generator")
            if not allowed(b, self.alg):
                raise ValueError(f"label {b} does not live in {self.alg}")
            s, d = byname[src], byname[dst]
            if b.left != d.idem or b.right != s.idem:
                raise ValueError(f"label {b} does not fit {src}({s.idem})->{dst}({d.idem})")
            m = f2.as_mat(m)
            if f2.shape(m) != (d.dim, s.dim):
                raise ValueError(f"matrix on {src}->{dst} has shape {f2.shape(m)}")
            key = (src, dst, b)
            acc[key] = f2.matadd(acc[key], m) if key in acc else m
        arrows = tuple(sorted((k[0], k[1], k[2], m) for k, m in acc.items() if not f2.is_zero(m)))
        object.__setattr__(self, "arrows", arrows)
        if self.check:
            for src, dst, b, _ in arrows:
                bad = self.incoherence(byname[src], byname[dst], b)
                if bad is not None:
                    raise GradingError(f"arrow {src}->{dst} [{b}] breaks grading coherence by {bad}")

    # accessors ------------------------------------------------------------
    @cached_property
    def by_name(self) -> dict[str, Gen]:
        return {g.name: g for g in self.gens}

    def gen(self, name: str) -> Gen:
        return self.by_name[name]

    @cached_property
    def out_map(self) -> dict[str, list[tuple[str, Basis, f2.Mat]]]:
        out: dict[str, list] = defaultdict(list)
        for s, d, b, m in self.arrows:
            out[s].append((d, b, m))
        return out

    @cached_property
    def in_map(self) -> dict[str, list[tuple[str, Basis, f2.Mat]]]:
        out: dict[str, list] = defaultdict(list)
        for s, d, b, m in self.arrows:
            out[d].append((s, b, m))
        return out

    @cached_property
    def arrow_dict(self) -> dict[Key, f2.Mat]:
        return {(s, d, b): m for s, d, b, m in self.arrows}

    @property
    def curvature(self):
        if self.alg.kind == "minus":
            return curvature_element(MINUS, self.matching)
        return curvature_element(self.alg)

    @property
    def rank(self) -> int:
        return sum(g.dim for g in self.gens)

    def grade_of(self, b: Basis) -> Vec:
        return self.letters.grade(b)

    def incoherence(self, src: Gen, dst: Gen, b: Basis) -> Vec | None:
        """Grading defect of an arrow, or None if it is coherent."""
        lhs = vadd(vsub(dst.grading, src.grading), self.grade_of(b))
        target = bigrading(1, ZERO4)
        if self.lattice.equal(lhs, target):
            return None
        return vsub(lhs, target)

    def key(self, g: Gen | Vec) -> Vec:
        """Canonical bigrading of a generator (or raw grading) modulo the lattice."""
        v = g.grading if isinstance(g, Gen) else g
        return self.lattice.reduce(v)

    def evolve(self, **kw) -> "Complex":
        return replace(self, **kw)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return (self.alg, self.gens, self.arrows, self.matching, self.lattice, self.letters) == (
            other.alg, other.gens, other.arrows, other.matching, other.lattice, other.letters)

    def __hash__(self) -> int:
        return hash((self.alg, self.gens, self.arrows))

    def __repr__(self) -> str:
        return f"Complex({self.alg}, {len(self.gens)} gens, {len(self.arrows)} arrows)"


def make(alg: Alg, gens: Iterable[Gen], arrows: Iterable, **kw) -> Complex:
    """Build a complex; arrow matrices default to the identity."""
    gens = tuple(gens)
    dims = {g.name: g.dim for g in gens}
    full = []
    for arr in arrows:
        if len(arr) == 3:
            s, d, b = arr
            if dims[s] != dims[d]:
                raise ValueError("identity default needs equal fibre dimensions")
            m = f2.identity(dims[s])
        else:
            s, d, b, m = arr
        full.append((s, d, b, m))
    return Complex(alg, gens, tuple(full), **kw)


# --------------------------------------------------------------------------
# d^2


@dataclass(frozen=True)
class D2Report:
    ok: bool
    src: str | None = None
    dst: str | None = None
    term: Basis | None = None
    matrix: f2.Mat | None = None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "d^2 ok"
        return f"d^2 violation {self.src} -> {self.dst}: {self.term} with matrix {f2.format_mat(self.matrix)}"


def compose_terms(first: Iterable[tuple[str, str, Basis, f2.Mat]],
                  second_out: Mapping[str, list[tuple[str, Basis, f2.Mat]]],
                  alg: Alg) -> dict[Key, f2.Mat]:
    """Sum of second∘first over matching middle generators."""
    acc: dict[Key, f2.Mat] = {}
    for s, mid, a, ma in first:
        for d, b, mb in second_out.get(mid, ()):
            c = mul(alg, b, a)
            if c is None:
                continue
            m = f2.matmul(mb, ma)
            key = (s, d, c)
            acc[key] = f2.matadd(acc[key], m) if key in acc else m
    return acc


def d_squared(M: Complex) -> dict[Key, f2.Mat]:
    return compose_terms(M.arrows, M.out_map, M.alg)


def check_d2(M: Complex) -> D2Report:
    """Verify d^2 = 1 (x) curvature entrywise."""
    acc = d_squared(M)
    curv = M.curvature
    for g in M.gens:
        for b in curv.terms:
            if b.left == g.idem and b.right == g.idem:
                key = (g.name, g.name, b)
                eye = f2.identity(g.dim)
                acc[key] = f2.matadd(acc[key], eye) if key in acc else eye
    for key in sorted(acc):
        m = acc[key]
        if not f2.is_zero(m):
            return D2Report(False, key[0], key[1], key[2], m)
    return D2Report(True)


# --------------------------------------------------------------------------
# simple transforms


def apply_quotient(M: Complex, i: int, j: int) -> Complex:
    """Image under the quotient functor killing p_i and q_j."""
    from .algebra import quotient

    if M.alg.kind not in ("full", "quot"):
        raise ValueError("quotients are taken from the full algebra")
    alg = quotient(i, j)
    arrows = tuple(a for a in M.arrows if allowed(a[2], alg))
    return M.evolve(alg=alg, arrows=arrows, matching=M.matching)


def transform_alex(M: Complex, sign: int = 1, perm=(1, 2, 3, 4)) -> Complex:
    """Apply a signed coordinate permutation to every Alexander grading."""

    def f(v):
        return (Fraction(v[0]),) + tuple(sign * x for x in permute_vec(v[1:], perm))

    gens = tuple(replace(g, alex=f(g.grading)[1:]) for g in M.gens)
    return M.evolve(gens=gens, lattice=M.lattice.map(f), letters=M.letters.then(sign, perm))


def rr(M: Complex) -> Complex:
    """Negate all Alexander gradings."""
    return transform_alex(M, -1)


def rr34(M: Complex) -> Complex:
    """Swap the third and fourth Alexander entries."""
    return transform_alex(M, 1, (1, 2, 4, 3))


def shift(M: Complex, delta=0, alex=ZERO4) -> Complex:
    g = bigrading(delta, alex)
    return M.evolve(gens=tuple(x.shifted(g) for x in M.gens))


def rename(M: Complex, f) -> Complex:
    gens = tuple(replace(g, name=f(g.name)) for g in M.gens)
    arrows = tuple((f(s), f(d), b, m) for s, d, b, m in M.arrows)
    return M.evolve(gens=gens, arrows=arrows)


def direct_sum(*Ms: Complex, prefix: bool = True) -> Complex:
    if not Ms:
        raise ValueError("direct_sum needs at least one summand")
    alg = Ms[0].alg
    letters = Ms[0].letters
    lat = Ms[0].lattice
    for N in Ms[1:]:
        if N.alg != alg or N.letters != letters:
            raise ValueError("summands must share algebra and grading conventions")
        lat = lat.join(N.lattice)
    gens, arrows = [], []
    for k, N in enumerate(Ms):
        f = (lambda n, k=k: f"{k}_{n}") if prefix else (lambda n: n)
        gens += [replace(g, name=f(g.name)) for g in N.gens]
        arrows += [(f(s), f(d), b, m) for s, d, b, m in N.arrows]
    matching = Ms[0].matching if all(N.matching == Ms[0].matching for N in Ms) else None
    return Complex(alg, tuple(gens), tuple(arrows), matching=matching, lattice=lat, letters=letters)


def tensor_V(M: Complex, color: int = 0, *, suffix=("+", "-")) -> Complex:
    """Tensor with the two-dimensional space V_t for the colour t = t_{color+1}.

    The two copies sit in the same delta-grading and in colour gradings t^{+1}
    and t^{-1}.  In generalized Alexander coordinates the shift is
    +-(e_i - e_o)/2 for the colour's ends (i, o).
    """
    if M.matching is None:
        raise ValueError("tensor_V needs a matching to know the colour")
    i, o = M.matching.pairs[color]
    half = [Fraction(0)] * 4
    half[i - 1] += Fraction(1, 2)
    half[o - 1] -= Fraction(1, 2)
    half_l = tuple(M.letters.sign * x for x in permute_vec(half, M.letters.perm))
    up = (Fraction(0),) + half_l
    gens, arrows = [], []
    for sfx, sgn in zip(suffix, (1, -1)):
        v = up if sgn == 1 else vneg(up)
        gens += [replace(g, name=g.name + sfx).shifted(v) for g in M.gens]
        arrows += [(s + sfx, d + sfx, b, m) for s, d, b, m in M.arrows]
    return M.evolve(gens=tuple(gens), arrows=tuple(arrows))


# --------------------------------------------------------------------------
# morphism complexes


@dataclass(frozen=True)
class MorComplex:
    basis: tuple[tuple[str, str, Basis, int, int], ...]
    degrees: tuple[Fraction, ...]
    alex: tuple[Vec | None, ...]
    images: tuple[int, ...]  # bitsets over basis indices
    max_len: int
    complete_below: Fraction  # degrees d <= this are exact

    def d_squared_zero(self) -> bool:
        index = self.images
        for v in range(len(self.basis)):
            img = index[v]
            acc = 0
            while img:
                low = img & -img
                acc ^= index[low.bit_length() - 1]
                img ^= low
            if acc:
                return False
        return True


def _mor_label_candidates(alg: Alg, max_len: int, left: int, right: int) -> list[Basis]:
    return basis_paths(alg, max_len, left=left, right=right)


def mor_complex(M: Complex, N: Complex, max_len: int = 8, *, with_alex: bool = False) -> MorComplex:
    """Morphisms M -> N with labels of length <= max_len, D(f) = dN f + f dM."""
    if M.alg != N.alg:
        raise ValueError("mor_complex needs modules over the same algebra")
    if M.alg.kind == "minus":
        raise ValueError("morphism complexes are only built over U-free algebras")
    if M.curvature != N.curvature:
        raise ValueError("curvature mismatch")
    if not (M.lattice.delta_free() and N.lattice.delta_free()):
        raise GradingError("delta gradings must close up to form morphism degrees")
    lat = M.lattice.join(N.lattice)
    basis: list[tuple[str, str, Basis, int, int]] = []
    for x in M.gens:
        for y in N.gens:
            for b in _mor_label_candidates(M.alg, max_len, y.idem, x.idem):
                for i in range(y.dim):
                    for j in range(x.dim):
                        basis.append((x.name, y.name, b, i, j))
    index = {v: k for k, v in enumerate(basis)}
    degrees = []
    alexes = []
    for x, y, b, _, _ in basis:
        gx, gy = M.gen(x), N.gen(y)
        degrees.append(gy.delta - gx.delta + b.delta)
        if with_alex:
            alexes.append(lat.reduce(vadd(vsub(gy.grading, gx.grading), M.letters.grade(b))))
        else:
            alexes.append(None)
    images = []
    for x, y, b, i, j in basis:
        img = 0
        for z, c, C in N.out_map.get(y, ()):
            prod = mul(M.alg, c, b)
            if prod is None:
                continue
            for k in range(len(C)):
                if C[k][i]:
                    t = index.get((x, z, prod, k, j))
                    if t is not None:
                        img ^= 1 << t
        for w, a, A in M.in_map.get(x, ()):
            prod = mul(M.alg, b, a)
            if prod is None:
                continue
            for l in range(len(A[0])):
                if A[j][l]:
                    t = index.get((w, y, prod, i, l))
                    if t is not None:
                        img ^= 1 << t
        images.append(img)
    spread = [N.gen(y).delta - M.gen(x).delta for x in M.by_name for y in N.by_name] or [0]
    complete = Fraction(max_len, 2) - 1 + min(spread)
    return MorComplex(tuple(basis), tuple(degrees), tuple(alexes), tuple(images), max_len, complete)


def homology(C: MorComplex, *, complete_only: bool = True) -> dict:
    """Ranks of homology per grading (delta, or (delta, Alexander))."""
    groups: dict = defaultdict(list)
    for k, (d, a) in enumerate(zip(C.degrees, C.alex)):
        groups[(d, a)].append(k)
    # rank of D restricted to each grading group
    ranks = {}
    for g, idx in groups.items():
        ranks[g] = f2.rank_rows([C.images[k] for k in idx])
    out = {}
    for g, idx in groups.items():
        d, a = g
        if complete_only and d > C.complete_below:
            continue
        # incoming differential comes from the group of degree d-1 with the same Alexander grading
        prev = (d - 1, a)
        r_in = ranks.get(prev, 0)
        h = len(idx) - ranks[g] - r_in
        if h:
            out[d if a is None else (d, a)] = h
    return dict(sorted(out.items(), key=lambda kv: str(kv[0]) if not isinstance(kv[0], Fraction) else (kv[0],)))


def mor_homology(M: Complex, N: Complex, *, with_alex: bool = False, start: int = 8,
                 step: int = 4, limit: int = 48) -> dict:
    """Homology of Mor(M, N) with an adaptively growing length cap.

    The cap grows until enlarging it adds no homology in newly exact degrees.
    """
    if not M.gens or not N.gens:
        return {}
    L = start
    prev = homology(mor_complex(M, N, L, with_alex=with_alex))
    while L < limit:
        L += step
        cur = homology(mor_complex(M, N, L, with_alex=with_alex))
        if cur == prev:
            return cur
        prev = cur
    raise RuntimeError(f"morphism homology did not stabilise below length {limit}")


def total_rank(h: Mapping) -> int:
    return sum(h.values())


# --------------------------------------------------------------------------
# AD bimodules and the box tensor product


@dataclass(frozen=True, order=True)
class BiGen:
    name: str
    a_idem: int
    d_idem: int
    delta: Fraction = Fraction(0)
    alex: tuple[Fraction, ...] = ZERO4

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "alex", tuple(Fraction(x) for x in self.alex))

    @property
    def grading(self) -> Vec:
        return bigrading(self.delta, self.alex)


Action = tuple[str, tuple[Basis, ...], str, Basis]


@dataclass(frozen=True, eq=False)
class ADBimodule:
    """Strictly unital type AD bimodule with finitely many actions.

    An action ``(src, (a1, ..., ak), dst, b)`` reads: feeding the inputs
    a1, ..., ak (a1 first, i.e. the arrow nearest to the module generator)
    into src yields dst (x) b.  ``b`` lives in the D-side algebra; the
    idempotent of dst's D-side stands for the output 1.
    """

    name: str
    a_alg: Alg
    d_alg: Alg
    gens: tuple[BiGen, ...]
    actions: tuple[Action, ...]
    a_letters: Letters = STANDARD
    max_input_len: int = 2

    def __post_init__(self) -> None:
        gens = tuple(sorted(self.gens))
        object.__setattr__(self, "gens", gens)
        byname = {g.name: g for g in gens}
        acc: set[Action] = set()
        for src, ins, dst, b in self.actions:
            if src not in byname or dst not in byname:
                raise ValueError(f"action {src}->{dst} refers to an unknown generator")
            s, d = byname[src], byname[dst]
            if len(ins) > self.max_input_len:
                raise ValueError("action exceeds max_input_len")
            right = s.a_idem
            for a in ins:
                if a.is_idempotent:
                    raise ValueError("strictly unital: no idempotent inputs are recorded")
                if not allowed(a, self.a_alg):
                    raise ValueError(f"input {a} does not live in {self.a_alg}")
                if a.right != right:
                    raise ValueError(f"input sequence {ins} is not composable at {src}")
                right = a.left
            if right != d.a_idem:
                raise ValueError(f"inputs of {src}->{dst} end in the wrong idempotent")
            if not allowed(b, self.d_alg) or b.left != d.d_idem or b.right != s.d_idem:
                raise ValueError(f"output {b} does not fit {src}->{dst}")
            acc ^= {(src, tuple(ins), dst, b)}
        object.__setattr__(self, "actions", tuple(sorted(acc)))

    def _key(self) -> tuple:
        return (self.name, self.a_alg, self.d_alg, self.gens, self.actions, self.a_letters,
                self.max_input_len)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ADBimodule):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @cached_property
    def by_name(self) -> dict[str, BiGen]:
        return {g.name: g for g in self.gens}

    @cached_property
    def table(self) -> dict[tuple[str, tuple[Basis, ...]], list[tuple[str, Basis]]]:
        out: dict = defaultdict(list)
        for s, ins, d, b in self.actions:
            out[(s, ins)].append((d, b))
        return out

    @cached_property
    def prefixes(self) -> set[tuple[str, tuple[Basis, ...]]]:
        out = set()
        for s, ins, _, _ in self.actions:
            for k in range(len(ins) + 1):
                out.add((s, ins[:k]))
        return out

    def act(self, src: str, ins: tuple[Basis, ...]) -> list[tuple[str, Basis]]:
        """Actions including strict unitality for a single idempotent input."""
        if len(ins) == 1 and ins[0].is_idempotent:
            g = self.by_name[src]
            if ins[0].start != g.a_idem:
                return []
            return [(src, Basis("i", g.d_idem))]
        if any(a.is_idempotent for a in ins):
            return []
        return self.table.get((src, ins), [])

    def action_incoherence(self, act: Action) -> Vec | None:
        s, ins, d, b = act
        src, dst = self.by_name[s], self.by_name[d]
        expect = src.grading
        for a in ins:
            expect = vadd(expect, self.a_letters.grade(a))
        expect = vadd(expect, bigrading(1 - len(ins), ZERO4))
        expect = vsub(expect, STANDARD.grade(b))
        diff = vsub(dst.grading, expect)
        return None if TRIVIAL.equal(diff, (0,) * 5) else diff


def validate_ad(B: ADBimodule, length: int | None = None) -> list[str]:
    """Check the AD structure relations on every composable input sequence.

    Returns a list of human readable violations (empty when all hold).
    """
    length = B.max_input_len + 1 if length is None else length
    problems: list[str] = []
    for act in B.actions:
        bad = B.action_incoherence(act)
        if bad is not None:
            problems.append(f"grading: {act[0]} {fmt_inputs(act[1])} -> {act[2]} {act[3]} off by {bad}")
    inputs = [b for b in basis_paths(B.a_alg, 8, idempotents=False)]
    by_right: dict[int, list[Basis]] = defaultdict(list)
    for a in inputs:
        by_right[a.right].append(a)

    def sequences(start: int, n: int):
        if n == 0:
            yield ()
            return
        for a in by_right[start]:
            for rest in sequences(a.left, n - 1):
                yield (a,) + rest

    for g in B.gens:
        for n in range(length + 1):
            for seq in sequences(g.a_idem, n):
                acc: dict[tuple[str, Basis], int] = defaultdict(int)
                for j in range(n + 1):
                    for y1, b1 in B.act(g.name, seq[:j]) if j else B.table.get((g.name, ()), []):
                        rest = seq[j:]
                        outs = B.act(y1, rest) if rest else B.table.get((y1, ()), [])
                        for y2, b2 in outs:
                            prod = mul(B.d_alg, b2, b1)
                            if prod is not None:
                                acc[(y2, prod)] ^= 1
                for i in range(n - 1):
                    merged = mul(B.a_alg, seq[i + 1], seq[i])
                    if merged is None:
                        continue
                    new = seq[:i] + (merged,) + seq[i + 2:]
                    for y2, b2 in B.act(g.name, new):
                        acc[(y2, b2)] ^= 1
                bad = sorted(k for k, v in acc.items() if v)
                if bad:
                    problems.append(f"relation at {g.name} inputs {fmt_inputs(seq)}: "
                                    + ", ".join(f"{y}[{b}]" for y, b in bad))
    return problems


def fmt_inputs(ins: Iterable[Basis]) -> str:
    ins = list(ins)
    return ",".join(str(a) for a in ins) if ins else "-"


def box_tensor(M: Complex, B: ADBimodule, *, sep: str = ".") -> Complex:
    """M box-tensor B, a type D structure over B's D-side algebra."""
    if M.alg != B.a_alg:
        raise ValueError(f"algebra mismatch: module over {M.alg}, bimodule expects {B.a_alg}")
    if M.letters != B.a_letters:
        raise GradingError(f"module Alexander convention {M.letters} differs from the bimodule's {B.a_letters}")
    gens = []
    for x in M.gens:
        for y in B.gens:
            if x.idem == y.a_idem:
                g = vadd(x.grading, y.grading)
                gens.append(Gen(f"{x.name}{sep}{y.name}", y.d_idem, g[0], g[1:], x.dim))
    names = {(g.name) for g in gens}
    arrows: list[tuple[str, str, Basis, f2.Mat]] = []
    K = B.max_input_len
    for x in M.gens:
        for y in B.gens:
            if x.idem != y.a_idem:
                continue
            src = f"{x.name}{sep}{y.name}"
            for y2, b in B.table.get((y.name, ()), []):
                arrows.append((src, f"{x.name}{sep}{y2}", b, f2.identity(x.dim)))
            stack = [(x.name, (), f2.identity(x.dim))]
            while stack:
                cur, ins, mat = stack.pop()
                for nxt, a, m in M.out_map.get(cur, ()):
                    new_ins = ins + (a,)
                    new_mat = f2.matmul(m, mat)
                    if a.is_idempotent:
                        if not ins:
                            for y2, b in B.act(y.name, new_ins):
                                arrows.append((src, f"{nxt}{sep}{y2}", b, new_mat))
                        continue
                    if (y.name, new_ins) not in B.prefixes:
                        continue
                    for y2, b in B.table.get((y.name, new_ins), []):
                        arrows.append((src, f"{nxt}{sep}{y2}", b, new_mat))
                    if len(new_ins) < K:
                        stack.append((nxt, new_ins, new_mat))
    for s, d, _, _ in arrows:
        assert s in names and d in names
    return Complex(B.d_alg, tuple(gens), tuple(arrows), matching=None, lattice=M.lattice,
                   letters=STANDARD)


# --------------------------------------------------------------------------
# extension over the minus algebra


@dataclass(frozen=True)
class Extension:
    ok: bool
    complex: Complex | None = None
    added: tuple[tuple[str, str, Basis, f2.Mat], ...] = ()
    certificate: tuple | None = None
    # every d^2 term left over by the failing linear solve (certificate is the least)
    residual: tuple = ()

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            lines = ["extension found"] + [f"  {s} -> {d}: {b}" for s, d, b, _ in self.added]
            return "\n".join(lines)
        if self.certificate is None:
            return "no extension: search budget exhausted"
        s, d, b, i, j = self.certificate
        lines = [f"no extension: uncancellable d^2 term {s} -> {d}: {b} (entry {i},{j})"]
        lines += [f"  residual {t[0]} -> {t[1]}: {t[2]}" for t in self.residual[1:]]
        return "\n".join(lines)


def _colour_lattice(M: Complex, P: Matching) -> Lattice:
    vecs = []
    for i, o in P.pairs:
        v = [Fraction(0)] * 4
        v[i - 1] += 1
        v[o - 1] += 1
        w = permute_vec(v, M.letters.perm)
        vecs.append((Fraction(0),) + tuple(M.letters.sign * x for x in w))
    return M.lattice.extend(vecs)


def extend_over_minus(M: Complex, P: Matching, u_bound: int = 1, *, require=None,
                      trace=None) -> Extension:
    """Search for U-labelled arrows that lift M to the minus algebra.

    The d^2 = curvature equation is solved modulo U-degree > u_bound.  Work
    goes degree by degree in total U-degree: each degree is a linear system
    over F2, and its solution space is walked deterministically (fewest
    kernel moves first) until the higher degrees can be solved as well.
    ``require``, a predicate on the list of added arrows, makes the walk
    skip extensions it rejects.
    """
    if M.alg != FULL:
        raise ValueError("extension starts from a module over the full algebra")
    rep = check_d2(M)
    if not rep:
        raise ValueError(f"input does not satisfy d^2 = curvature: {rep}")
    lat = _colour_lattice(M, P)
    base = Complex(MINUS, M.gens, M.arrows, matching=P, lattice=lat, letters=M.letters, check=False)
    curv = curvature_element(MINUS, P)
    def square(arrs) -> dict[Key, f2.Mat]:
        out_map: dict[str, list] = defaultdict(list)
        for s, d, b, m in arrs:
            out_map[s].append((d, b, m))
        acc = compose_terms(arrs, out_map, MINUS)
        for g in M.gens:
            for b in curv.terms:
                if b.left == g.idem and b.right == g.idem:
                    key = (g.name, g.name, b)
                    eye = f2.identity(g.dim)
                    acc[key] = f2.matadd(acc[key], eye) if key in acc else eye
        return {k: v for k, v in acc.items() if not f2.is_zero(v)}

    gens = {g.name: g for g in M.gens}

    def unknowns_of(k: int) -> list[tuple[str, str, Basis, int, int]]:
        """U-degree-k labels between graded-compatible generator pairs."""
        out = []
        for x in M.gens:
            for y in M.gens:
                for u in u_monomials(k):
                    if sum(u) != k:
                        continue
                    ell2 = 2 * (1 - (y.delta - x.delta) - sum(u))
                    if ell2 < 0 or ell2.denominator != 1:
                        continue
                    ell = int(ell2)
                    if ell == 0:
                        cands = [Basis("i", x.idem, 0, u)] if x.idem == y.idem else []
                    else:
                        cands = [Basis(t, s, ell, u) for t in "pq" for s in range(1, 5)]
                    for b in cands:
                        if b.left != y.idem or b.right != x.idem:
                            continue
                        if base.incoherence(x, y, b) is not None:
                            continue
                        out.extend((x.name, y.name, b, i, j) for i in range(y.dim) for j in range(x.dim))
        return out

    def system(arrs, k: int, unknowns):
        """Target bits (the degree-k error of d^2) and the image of each unknown."""
        out_map: dict[str, list] = defaultdict(list)
        in_map: dict[str, list] = defaultdict(list)
        for s, d, b, m in arrs:
            out_map[s].append((d, b, m))
            in_map[d].append((s, b, m))
        eq_index: dict = {}

        def eq_id(key):
            if key not in eq_index:
                eq_index[key] = len(eq_index)
            return eq_index[key]

        target = 0
        for (s, d, b), m in square(arrs).items():
            if b.udeg != k:
                continue
            for i, row in enumerate(m):
                for j, v in enumerate(row):
                    if v:
                        target ^= 1 << eq_id((s, d, b, i, j))
        cols = []
        for (x, y, b, i, j) in unknowns:
            img = 0
            # only arrows of U-degree 0 pair linearly with a degree-k unknown
            for z, c, C in out_map.get(y, ()):
                prod = mul(MINUS, c, b)
                if prod is None or prod.udeg != k:
                    continue
                for r in range(len(C)):
                    if C[r][i]:
                        img ^= 1 << eq_id((x, z, prod, r, j))
            for w, a, A in in_map.get(x, ()):
                prod = mul(MINUS, b, a)
                if prod is None or prod.udeg != k:
                    continue
                for c in range(len(A[0])):
                    if A[j][c]:
                        img ^= 1 << eq_id((w, y, prod, i, c))
            cols.append(img)
        return target, cols, {v: key for key, v in eq_index.items()}

    def materialize(unknowns, order, sol):
        chosen: dict[Key, list[list[int]]] = {}
        for pos, t in enumerate(order):
            if sol >> pos & 1:
                x, y, b, i, j = unknowns[t]
                if (x, y, b) not in chosen:
                    chosen[(x, y, b)] = [[0] * gens[x].dim for _ in range(gens[y].dim)]
                chosen[(x, y, b)][i][j] ^= 1
        return [(x, y, b, f2.as_mat(m)) for (x, y, b), m in sorted(chosen.items())
                if not f2.is_zero(f2.as_mat(m))]

    failures: list[tuple] = []
    budget = [4096]

    def search(arrs, k: int):
        if k > u_bound:
            final = {key: m for key, m in square(arrs).items() if key[2].udeg <= u_bound}
            if not final:
                if require is not None and not require(arrs[len(base.arrows):]):
                    return None
                return arrs
            key = min(final)
            m = final[key]
            i, j = next((i, j) for i, row in enumerate(m) for j, v in enumerate(row) if v)
            failures.append(((key[0], key[1], key[2], i, j),))
            return None
        unknowns = unknowns_of(k)
        # squares of degree-k arrows only matter from degree 2k on
        target, cols, inv = system(arrs, k, unknowns)
        order = list(range(len(cols)))[::-1]
        rows = [cols[t] for t in order]
        sol = f2.solve_rows(rows, target)
        if sol is None:
            residual = _residual(cols, target)
            cands = sorted(inv[t] for t in range(residual.bit_length()) if residual >> t & 1)
            failures.append(tuple(cands))
            return None
        kernel = f2.kernel_rows(rows)
        # walk the solution space: fewest kernel moves first, deterministic order
        for r in range(len(kernel) + 1):
            for combo in combinations(range(len(kernel)), r):
                if budget[0] <= 0:
                    return None
                budget[0] -= 1
                s = sol
                for c in combo:
                    s ^= kernel[c]
                new = materialize(unknowns, order, s)
                if trace:
                    for x, y, b, _ in new:
                        trace(f"extend: degree {k} add {x} -> {y} [{b}]")
                found = search(arrs + new, k + 1)
                if found is not None:
                    return found
            if k == u_bound and require is None:
                break  # the top degree is already solved; any choice passes
        return None

    result = search(list(base.arrows), 1)
    if result is None:
        terms = failures[0] if failures else ()
        return Extension(False, certificate=terms[0] if terms else None, residual=terms)
    added = tuple(a for a in result[len(base.arrows):])
    ext = Complex(MINUS, M.gens, tuple(result), matching=P, lattice=lat, letters=M.letters)
    return Extension(True, ext, added)


def _residual(cols: list[int], target: int) -> int:
    basis: dict[int, int] = {}
    for v in cols:
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                break
    v = target
    changed = True
    while changed:
        changed = False
        for top in sorted(basis, reverse=True):
            if v >> top & 1:
                v ^= basis[top]
                changed = True
    return v
