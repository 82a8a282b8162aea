"""Path algebras over F2 on four idempotents.

Three algebras share one basis type:

* ``FULL``: generated by p1..p4, q1..q4 with p_i q_i = q_i p_i = 0;
* ``quotient(i, j)``: the full algebra with p_i = 0 = q_j;
* ``MINUS``: the full relations replaced by p_i q_i = U_i and q_i p_i = U_i
  (times the appropriate idempotent), U_i central.

Products are written left to right: ``p1 * p2 == p12``.  A basis path
``p(i, l)`` is p_i p_{i+1} ... and ``q(i, l)`` is q_i q_{i-1} ...; indices
live in 1..4 and wrap around.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator

SITES = "abcd"
ZERO_U = (0, 0, 0, 0)


def m4(k: int) -> int:
    """Reduce an index into 1..4."""
    return (k - 1) % 4 + 1


def site_name(idem: int) -> str:
    return SITES[idem - 1]


def site_index(name: str) -> int:
    return SITES.index(name) + 1


# --------------------------------------------------------------------------
# algebra tags


@dataclass(frozen=True)
class Alg:
    kind: str  # "full" | "quot" | "minus"
    i: int = 0
    j: int = 0

    def __str__(self) -> str:
        if self.kind == "quot":
            return f"quot{self.i}{self.j}"
        return self.kind

    @staticmethod
    def parse(text: str) -> "Alg":
        text = text.strip()
        if text in ("full", "minus"):
            return Alg(text)
        m = re.fullmatch(r"quot\(?(\d),?(\d)\)?", text)
        if not m:
            raise ValueError(f"unknown algebra tag {text!r}")
        return quotient(int(m.group(1)), int(m.group(2)))


FULL = Alg("full")
MINUS = Alg("minus")


def quotient(i: int, j: int) -> Alg:
    if not (1 <= i <= 4 and 1 <= j <= 4):
        raise ValueError("quotient indices must lie in 1..4")
    return Alg("quot", i, j)


# --------------------------------------------------------------------------
# basis


@dataclass(frozen=True, order=True)
class Basis:
    """Standard basis element: an idempotent or a p/q path, times U^u."""

    kind: str  # "i", "p" or "q"
    start: int
    length: int = 0
    u: tuple[int, int, int, int] = ZERO_U

    def __post_init__(self) -> None:
        if self.kind not in ("i", "p", "q"):
            raise ValueError(f"bad basis kind {self.kind!r}")
        if not 1 <= self.start <= 4:
            raise ValueError("basis start must lie in 1..4")
        if (self.kind == "i") != (self.length == 0) or self.length < 0:
            raise ValueError("idempotents have length 0, paths length >= 1")

    # endpoints -----------------------------------------------------------
    @property
    def left(self) -> int:
        if self.kind == "p":
            return m4(self.start - 1)
        return self.start

    @property
    def right(self) -> int:
        if self.kind == "p":
            return m4(self.start + self.length - 1)
        if self.kind == "q":
            return m4(self.start - self.length)
        return self.start

    @property
    def letters(self) -> tuple[int, ...]:
        if self.kind == "p":
            return tuple(m4(self.start + k) for k in range(self.length))
        if self.kind == "q":
            return tuple(m4(self.start - k) for k in range(self.length))
        return ()

    @property
    def is_idempotent(self) -> bool:
        return self.kind == "i" and not any(self.u)

    @property
    def udeg(self) -> int:
        return sum(self.u)

    def strip_u(self) -> "Basis":
        return Basis(self.kind, self.start, self.length)

    # gradings ------------------------------------------------------------
    @property
    def delta(self) -> Fraction:
        return Fraction(self.length, 2) + sum(self.u)

    @property
    def alex(self) -> tuple[int, int, int, int]:
        vec = [2 * x for x in self.u]
        for k in self.letters:
            vec[k - 1] += 1
        return tuple(vec)  # type: ignore[return-value]

    def __str__(self) -> str:
        return format_basis(self)


def idem(s: int) -> Basis:
    return Basis("i", m4(s))


def p(*idx: int) -> Basis:
    """p(1, 2) is p1 p2; p(3) is p3."""
    return _path("p", idx)


def q(*idx: int) -> Basis:
    """q(3, 2) is q3 q2."""
    return _path("q", idx)


def _path(kind: str, idx: Iterable[int]) -> Basis:
    idx = [m4(k) for k in idx]
    if not idx:
        raise ValueError("empty path")
    step = 1 if kind == "p" else -1
    for a, b in zip(idx, idx[1:]):
        if b != m4(a + step):
            raise ValueError(f"{kind}-letters {idx} are not consecutive")
    return Basis(kind, idx[0], len(idx))


def allowed(b: Basis, alg: Alg) -> bool:
    if alg.kind != "minus" and any(b.u):
        return False
    if alg.kind == "quot":
        if b.kind == "p" and alg.i in b.letters:
            return False
        if b.kind == "q" and alg.j in b.letters:
            return False
    return True


def _add_u(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, int, int, int]:
    return tuple(x + y for x, y in zip(a, b))  # type: ignore[return-value]


@lru_cache(maxsize=None)
def mul_basis(x: Basis, y: Basis, minus: bool) -> Basis | None:
    """Product of two basis elements; None stands for zero."""
    if x.right != y.left:
        return None
    u = _add_u(x.u, y.u)
    if x.kind == "i":
        return Basis(y.kind, y.start, y.length, u)
    if y.kind == "i":
        return Basis(x.kind, x.start, x.length, u)
    if x.kind == y.kind:
        return Basis(x.kind, x.start, x.length + y.length, u)
    if not minus:
        return None
    # cancel the adjacent letters pairwise into U's
    xl, yl = list(x.letters), list(y.letters)
    uu = list(u)
    while xl and yl:
        k = xl.pop()
        assert k == yl[0]
        yl.pop(0)
        uu[k - 1] += 1
    ut = tuple(uu)
    if xl:
        return Basis(x.kind, x.start, len(xl), ut)  # type: ignore[arg-type]
    if yl:
        return Basis(y.kind, yl[0], len(yl), ut)  # type: ignore[arg-type]
    return Basis("i", x.left, 0, ut)  # type: ignore[arg-type]


# --------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class Elt:
    """An F2 linear combination of basis elements in a fixed algebra."""

    alg: Alg
    terms: frozenset[Basis] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for b in self.terms:
            if not allowed(b, self.alg):
                raise ValueError(f"{b} does not live in {self.alg}")

    @staticmethod
    def of(alg: Alg, *basis: Basis) -> "Elt":
        acc: set[Basis] = set()
        for b in basis:
            acc ^= {b}
        return Elt(alg, frozenset(acc))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Basis]:
        return iter(sorted(self.terms))

    def _check(self, other: "Elt") -> None:
        if self.alg != other.alg:
            raise TypeError(f"algebra mismatch: {self.alg} vs {other.alg}")

    def __add__(self, other: "Elt") -> "Elt":
        self._check(other)
        return Elt(self.alg, self.terms ^ other.terms)

    def __mul__(self, other: "Elt") -> "Elt":
        self._check(other)
        return Elt(self.alg, frozenset(_mul_terms(self.terms, other.terms, self.alg)))

    def grading(self) -> tuple[Fraction, tuple[int, ...]] | None:
        """The common bigrading of a homogeneous element, else None."""
        grades = {(b.delta, alex_key(b.alex)) for b in self.terms}
        if len(grades) != 1:
            return None
        b = min(self.terms)
        return b.delta, b.alex

    def __str__(self) -> str:
        return format_elt(self)


def _mul_terms(xs: Iterable[Basis], ys: Iterable[Basis], alg: Alg) -> set[Basis]:
    out: set[Basis] = set()
    minus = alg.kind == "minus"
    ys = list(ys)
    for x in xs:
        for y in ys:
            z = mul_basis(x, y, minus)
            if z is not None and allowed(z, alg):
                out ^= {z}
    return out


def multiply(x: Elt, y: Elt) -> Elt:
    return x * y


def mul(alg: Alg, x: Basis, y: Basis) -> Basis | None:
    z = mul_basis(x, y, alg.kind == "minus")
    if z is None or not allowed(z, alg):
        return None
    return z


def unit(alg: Alg) -> Elt:
    return Elt(alg, frozenset(idem(s) for s in range(1, 5)))


# --------------------------------------------------------------------------
# gradings


def grade(b: Basis) -> tuple[Fraction, tuple[int, ...]]:
    return b.delta, b.alex


def alex_key(vec: Iterable) -> tuple:
    """Canonical representative modulo the diagonal: minimum entry zero."""
    v = tuple(Fraction(x) for x in vec)
    lo = min(v)
    return tuple(x - lo for x in v)


# --------------------------------------------------------------------------
# matchings and curvature


@dataclass(frozen=True)
class Matching:
    """Ordered matching ((i1, o1), (i2, o2)) of the tangle ends."""

    pairs: tuple[tuple[int, int], tuple[int, int]]
    colors: tuple[str, str] = ("t1", "t2")

    def __post_init__(self) -> None:
        ends = sorted(k for pr in self.pairs for k in pr)
        if ends != [1, 2, 3, 4]:
            raise ValueError(f"not a matching of the four ends: {self.pairs}")

    @staticmethod
    def parse(text: str) -> "Matching":
        nums = [int(c) for c in re.findall(r"\d", text)]
        if len(nums) != 4:
            raise ValueError(f"bad matching {text!r}")
        return Matching(((nums[0], nums[1]), (nums[2], nums[3])))

    def color_of(self, end: int) -> int:
        return 0 if end in self.pairs[0] else 1

    def colored(self, vec: Iterable) -> tuple:
        """Push a generalized Alexander vector to the per-colour gradings."""
        v = list(vec)
        out = [Fraction(0), Fraction(0)]
        for k, (i, o) in enumerate(self.pairs):
            out[k] += Fraction(v[i - 1]) - Fraction(v[o - 1])
        if self.colors[0] == self.colors[1]:
            return (out[0] + out[1],)
        return tuple(out)

    def __str__(self) -> str:
        return "{" + ",".join("{%d,%d}" % pr for pr in self.pairs) + "}"


def p4_elt(alg: Alg) -> Elt:
    return Elt.of(alg, *[b for b in (Basis("p", s, 4) for s in range(1, 5)) if allowed(b, alg)])


def q4_elt(alg: Alg) -> Elt:
    return Elt.of(alg, *[b for b in (Basis("q", s, 4) for s in range(1, 5)) if allowed(b, alg)])


def curvature_element(alg: Alg, matching: Matching | None = None) -> Elt:
    """p^4 + q^4, plus U_i1 U_o1 + U_i2 U_o2 over the minus algebra."""
    if alg.kind == "minus":
        if matching is None:
            raise ValueError("the minus algebra needs a matching")
    elif matching is not None:
        raise ValueError("a matching only enters the curvature over the minus algebra")
    out = p4_elt(alg) + q4_elt(alg)
    if alg.kind == "minus":
        for i, o in matching.pairs:
            u = [0, 0, 0, 0]
            u[i - 1] += 1
            u[o - 1] += 1
            out = out + Elt.of(alg, *[Basis("i", s, 0, tuple(u)) for s in range(1, 5)])
    return out


# --------------------------------------------------------------------------
# enumeration


def basis_paths(alg: Alg, max_len: int, *, right: int | None = None,
                left: int | None = None, idempotents: bool = True) -> list[Basis]:
    """All U-free basis elements of length <= max_len, optionally by endpoints."""
    out = []
    for s in range(1, 5):
        cands = []
        if idempotents:
            cands.append(Basis("i", s))
        for ell in range(1, max_len + 1):
            cands += [Basis("p", s, ell), Basis("q", s, ell)]
        for b in cands:
            if not allowed(b, alg):
                continue
            if right is not None and b.right != right:
                continue
            if left is not None and b.left != left:
                continue
            out.append(b)
    return sorted(out)


def u_monomials(max_deg: int) -> list[tuple[int, int, int, int]]:
    out = []
    for a in range(max_deg + 1):
        for b in range(max_deg + 1 - a):
            for c in range(max_deg + 1 - a - b):
                for d in range(max_deg + 1 - a - b - c):
                    out.append((a, b, c, d))
    return sorted(out, key=lambda u: (sum(u), u))


def to_full(b: Basis) -> Basis | None:
    """The epimorphism minus -> full: kill every U."""
    return None if any(b.u) else b


# --------------------------------------------------------------------------
# symmetries


@dataclass(frozen=True)
class Relabel:
    """Automorphism induced by a permutation sigma of the tangle ends.

    Orientation preserving permutations (cyclic shifts) keep p and q;
    orientation reversing ones swap them.
    """

    sigma: tuple[int, int, int, int]  # images of 1..4
    swap: bool

    def end(self, i: int) -> int:
        return self.sigma[i - 1]

    def site(self, s: int) -> int:
        return m4(self.end(s) - 1) if self.swap else m4(self.end(m4(s + 1)) - 1)

    def basis(self, b: Basis) -> Basis:
        u = [0, 0, 0, 0]
        for k, e in enumerate(b.u):
            u[self.end(k + 1) - 1] = e
        ut = tuple(u)
        if b.kind == "i":
            return Basis("i", self.site(b.start), 0, ut)  # type: ignore[arg-type]
        kind = b.kind
        if self.swap:
            kind = "q" if kind == "p" else "p"
        return Basis(kind, self.end(b.start), b.length, ut)  # type: ignore[arg-type]

    def elt(self, x: Elt, alg: Alg | None = None) -> Elt:
        return Elt.of(alg or self.image_alg(x.alg), *[self.basis(b) for b in x.terms])

    def image_alg(self, alg: Alg) -> Alg:
        if alg.kind != "quot":
            return alg
        if self.swap:
            # p_i = 0 becomes q_sigma(i) = 0
            return quotient(self.end(alg.j), self.end(alg.i))
        return quotient(self.end(alg.i), self.end(alg.j))

    def alex(self, vec: Iterable) -> tuple:
        v = list(vec)
        out = [Fraction(0)] * 4
        for k in range(4):
            out[self.end(k + 1) - 1] = Fraction(v[k])
        return tuple(out)

    def inverse(self) -> "Relabel":
        inv = [0] * 4
        for k in range(4):
            inv[self.sigma[k] - 1] = k + 1
        return Relabel(tuple(inv), self.swap)  # type: ignore[arg-type]

    def then(self, other: "Relabel") -> "Relabel":
        """First self, then other."""
        return Relabel(tuple(other.end(self.end(k)) for k in range(1, 5)),  # type: ignore[arg-type]
                       self.swap != other.swap)


def cyclic(k: int) -> Relabel:
    return Relabel(tuple(m4(i + k) for i in range(1, 5)), False)  # type: ignore[arg-type]


MUT_X = Relabel((2, 1, 4, 3), True)
MUT_Y = Relabel((4, 3, 2, 1), True)
MUT_Z = cyclic(2)
MIRROR = Relabel((4, 3, 2, 1), True)


def relabel_automorphism(kind: str | tuple) -> Relabel:
    if isinstance(kind, tuple):
        name, k = kind
        if name != "cyclic":
            raise ValueError(kind)
        return cyclic(k)
    table = {"mut_x": MUT_X, "mut_y": MUT_Y, "mut_z": MUT_Z, "x": MUT_X, "y": MUT_Y,
             "z": MUT_Z, "mirror": MIRROR}
    if kind.startswith("cyclic"):
        return cyclic(int(kind[len("cyclic"):].strip("()") or 1))
    return table[kind]


# --------------------------------------------------------------------------
# text notation


_TOKEN = re.compile(r"^(?:(?P<umono>(?:U[1-4](?:\^\d+)?\*?)+)\*?)?(?P<core>[pq][1-4]+|i[1-4])?$")


def parse_basis(text: str) -> Basis:
    text = text.strip().replace(" ", "").replace(".", "*")
    m = _TOKEN.match(text)
    if not m or not text:
        raise ValueError(f"cannot parse algebra term {text!r}")
    u = [0, 0, 0, 0]
    if m.group("umono"):
        for k, e in re.findall(r"U([1-4])(?:\^(\d+))?", m.group("umono")):
            u[int(k) - 1] += int(e or 1)
    core = m.group("core")
    if core is None:
        raise ValueError(f"U-monomial {text!r} needs an idempotent, e.g. U2*i3")
    if core[0] == "i":
        base = Basis("i", int(core[1]))
    else:
        base = _path(core[0], [int(c) for c in core[1:]])
    return Basis(base.kind, base.start, base.length, tuple(u))  # type: ignore[arg-type]


def parse_elt(text: str, alg: Alg = FULL) -> Elt:
    text = text.strip()
    if text == "0":
        return Elt(alg)
    parts = [t for t in text.split("+")]
    if any(not t.strip() for t in parts):
        raise ValueError(f"cannot parse algebra element {text!r}")
    return Elt.of(alg, *[parse_basis(t) for t in parts])


def format_basis(b: Basis) -> str:
    if b.kind == "i":
        core = f"i{b.start}"
    else:
        core = b.kind + "".join(str(k) for k in b.letters)
    mono = "*".join(f"U{k + 1}" + (f"^{e}" if e > 1 else "") for k, e in enumerate(b.u) if e)
    return f"{mono}*{core}" if mono else core


def format_elt(x: Elt) -> str:
    if not x.terms:
        return "0"
    return "+".join(format_basis(b) for b in sorted(x.terms))


def elt_map(f: Callable[[Basis], Basis | None], x: Elt, alg: Alg) -> Elt:
    return Elt.of(alg, *[y for y in (f(b) for b in x.terms) if y is not None])
