"""Bigradings (delta, Alexander) and their relation lattices.

A bigrading is a 5-vector ``(delta, A1, A2, A3, A4)`` of half-integers.
Alexander vectors are always taken modulo the diagonal; a module may carry
extra relations (from loops whose gradings only close up modulo a vector).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
DIAG: Vec = (Fraction(0), Fraction(1), Fraction(1), Fraction(1), Fraction(1))


def vec(*xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


def bigrading(delta, alex: Sequence) -> Vec:
    return (Fraction(delta),) + tuple(Fraction(a) for a in alex)


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


def vadd(a: Sequence, b: Sequence) -> Vec:
    return tuple(_frac(x + y) for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> Vec:
    return tuple(_frac(x - y) for x, y in zip(a, b))


def vneg(a: Sequence) -> Vec:
    return tuple(-Fraction(x) for x in a)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def _hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of an integer matrix (zero rows dropped)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    out: list[list[int]] = []
    for col in range(ncols):
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                f = r[col] // piv[col]
                r2 = [x - f * y for x, y in zip(r, piv)]
                (nxt if r2[col] else rest).append(r2)
            live = nxt
        if live:
            piv = live[0]
            if piv[col] < 0:
                piv = [-x for x in piv]
            out.append(piv)
        rows = [r for r in rest if any(r)]
    for i, r in enumerate(out):
        c = next(k for k, x in enumerate(r) if x)
        for j in range(i):
            f = out[j][c] // r[c]
            out[j] = [x - f * y for x, y in zip(out[j], r)]
    return out


@dataclass(frozen=True)
class Lattice:
    """Subgroup of relations among bigradings; always contains the diagonal."""

    gens: tuple[Vec, ...] = ()

    @staticmethod
    def of(vectors: Iterable[Sequence]) -> "Lattice":
        vs = {tuple(Fraction(x) for x in v) for v in vectors}
        vs = {v for v in vs if not is_zero(v)}
        lat = Lattice(tuple(sorted(vs)))
        # store a reduced generating set so equal lattices compare equal
        return Lattice(tuple(tuple(Fraction(x, 2) for x in row) for row in lat._basis
                             if tuple(Fraction(x, 2) for x in row) != DIAG))

    @cached_property
    def _basis(self) -> list[list[int]]:
        rows = [[int(2 * x) for x in DIAG]]
        for v in self.gens:
            if any((2 * x).denominator != 1 for x in v):
                raise ValueError(f"relation {v} is not half-integral")
            rows.append([int(2 * x) for x in v])
        return _hnf(rows)

    def join(self, other: "Lattice") -> "Lattice":
        return Lattice.of(self.gens + other.gens)

    def extend(self, vectors: Iterable[Sequence]) -> "Lattice":
        return Lattice.of(self.gens + tuple(tuple(Fraction(x) for x in v) for v in vectors))

    def map(self, f) -> "Lattice":
        return Lattice.of(f(v) for v in self.gens)

    @property
    def trivial(self) -> bool:
        return not self.gens

    @cached_property
    def _memo(self) -> dict:
        return {}

    @cached_property
    def _pivots(self) -> list[tuple[int, list[int]]]:
        return [(next(k for k, x in enumerate(row) if x), row) for row in self._basis]

    def reduce(self, v: Sequence) -> Vec:
        """Canonical representative of v modulo the lattice.

        The Alexander part is finally shifted so that its minimum is zero.
        """
        key = tuple(v)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        w = []
        for x in key:
            x = _frac(x)
            if x.denominator not in (1, 2):
                raise ValueError(f"grading {v} is not half-integral")
            w.append(x.numerator * (2 // x.denominator))
        for c, row in self._pivots:
            f = w[c] // row[c]
            if f:
                w = [x - f * y for x, y in zip(w, row)]
        lo = min(w[1:])
        out = (Fraction(w[0], 2),) + tuple(Fraction(x - lo, 2) for x in w[1:])
        self._memo[key] = out
        return out

    def equal(self, a: Sequence, b: Sequence) -> bool:
        return self.reduce(a) == self.reduce(b)

    def contains(self, v: Sequence) -> bool:
        return self.equal(v, (0,) * len(v))

    def delta_free(self) -> bool:
        """True when no relation touches the delta coordinate."""
        return all(row[0] == 0 for row in self._basis)


TRIVIAL = Lattice()


def fmt_half(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_half(text: str) -> Fraction:
    return Fraction(text.strip())


def fmt_alex(a: Sequence) -> str:
    return "[" + ",".join(fmt_half(x) for x in a) + "]"


def parse_alex(text: str) -> tuple[Fraction, ...]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"Alexander vector must be bracketed: {text!r}")
    parts = [p for p in body[1:-1].split(",")]
    if len(parts) != 4:
        raise ValueError(f"Alexander vector needs four entries: {text!r}")
    return tuple(Fraction(p.strip()) for p in parts)
