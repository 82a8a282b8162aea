"""Homotopy-preserving simplification of curved complexes."""

from __future__ import annotations

import os
import sys
from collections import defaultdict
from typing import Callable

from . import f2
from .algebra import Basis, mul
from .complexes import Complex, GradingError, Key


class SimplifyError(RuntimeError):
    pass


def _tracer(trace: Callable[[str], None] | bool | None) -> Callable[[str], None] | None:
    if callable(trace):
        return trace
    if trace or os.environ.get("PECULIAR_TRACE") == "1":
        return lambda msg: print(msg, file=sys.stderr)
    return None


def _rebuild(M: Complex, gens, acc: dict[Key, f2.Mat]) -> Complex:
    arrows = tuple((s, d, b, m) for (s, d, b), m in acc.items() if not f2.is_zero(m))
    return M.evolve(gens=tuple(gens), arrows=arrows)


def _add(acc: dict[Key, f2.Mat], key: Key, m: f2.Mat) -> None:
    acc[key] = f2.matadd(acc[key], m) if key in acc else m


def cancel(M: Complex, src: str, dst: str, label: Basis | None = None, *, trace=None) -> Complex:
    """Cancel an invertible idempotent arrow src -> dst (Gaussian elimination)."""
    if src == dst:
        raise SimplifyError("cannot cancel an arrow from a generator to itself")
    comps = [(b, m) for (s, d, b), m in M.arrow_dict.items() if s == src and d == dst]
    idem = [(b, m) for b, m in comps if b.kind == "i" and not any(b.u)]
    if label is not None:
        idem = [(b, m) for b, m in idem if b == label]
    if not idem:
        raise SimplifyError(f"no idempotent arrow {src} -> {dst}")
    if len(comps) != 1:
        raise SimplifyError(f"component {src} -> {dst} is not a pure idempotent")
    _, A = idem[0]
    try:
        Ainv = f2.inverse(A)
    except ValueError as exc:
        raise SimplifyError(f"arrow {src} -> {dst} has a singular matrix") from exc
    tr = _tracer(trace)
    if tr:
        tr(f"cancel {src} -> {dst}")
    acc: dict[Key, f2.Mat] = {}
    for s, d, b, m in M.arrows:
        if s in (src, dst) or d in (src, dst):
            continue
        _add(acc, (s, d, b), m)
    ins = [(w, a, W) for w, a, W in M.in_map.get(dst, ()) if w not in (src, dst)]
    outs = [(z, c, Z) for z, c, Z in M.out_map.get(src, ()) if z not in (src, dst)]
    for w, a, W in ins:
        for z, c, Z in outs:
            prod = mul(M.alg, c, a)
            if prod is None:
                continue
            _add(acc, (w, z, prod), f2.matmul(Z, f2.matmul(Ainv, W)))
    gens = [g for g in M.gens if g.name not in (src, dst)]
    return _rebuild(M, gens, acc)


def identity_arrows(M: Complex) -> list[tuple[str, str, Basis]]:
    out = []
    for s, d, b, m in M.arrows:
        if s != d and b.kind == "i" and not any(b.u) and f2.is_invertible(m):
            out.append((s, d, b))
    return sorted(out)


def reduce(M: Complex, *, trace=None) -> Complex:
    """Cancel identity components until none remain."""
    while True:
        cands = identity_arrows(M)
        done = False
        for s, d, b in cands:
            try:
                M = cancel(M, s, d, b, trace=trace)
                done = True
                break
            except SimplifyError:
                continue
        if not done:
            return M


def is_reduced(M: Complex) -> bool:
    return not any(b.kind == "i" and not any(b.u) for _, _, b, _ in M.arrows)


def clean_up(M: Complex, src: str, dst: str, h: Basis, H: f2.Mat | None = None,
             *, trace=None) -> Complex:
    """Base change by 1 + h with h: src -> dst labelled h (matrix H)."""
    if src == dst:
        raise SimplifyError("h must connect distinct generators")
    x, y = M.gen(src), M.gen(dst)
    if h.left != y.idem or h.right != x.idem:
        raise SimplifyError(f"label {h} does not fit {src} -> {dst}")
    if H is None:
        H = f2.identity(x.dim)
    H = f2.as_mat(H)
    if f2.shape(H) != (y.dim, x.dim):
        raise SimplifyError("matrix of h has the wrong shape")
    lhs = M.incoherence(x, y, h)
    # h must preserve gradings: its defect against a differential is exactly -1 in delta
    if lhs is None or not M.lattice.equal(lhs, (-1, 0, 0, 0, 0)):
        raise GradingError(f"h = {h} on {src} -> {dst} is not a homogeneous degree-0 map")
    # h d h = 0
    for z, c, C in M.out_map.get(dst, ()):
        if z != src:
            continue
        prod = mul(M.alg, h, c)
        prod = mul(M.alg, prod, h) if prod is not None else None
        if prod is not None and not f2.is_zero(f2.matmul(H, f2.matmul(C, H))):
            raise SimplifyError(f"h d h != 0: {h}*{c}*{h} survives")
    tr = _tracer(trace)
    if tr:
        tr(f"clean-up {src} -> {dst} [{h}]")
    acc: dict[Key, f2.Mat] = {}
    for s, d, b, m in M.arrows:
        _add(acc, (s, d, b), m)
    # h after d: w -> src then h
    for w, a, A in M.in_map.get(src, ()):
        prod = mul(M.alg, h, a)
        if prod is not None:
            _add(acc, (w, dst, prod), f2.matmul(H, A))
    # d after h: h then dst -> z
    for z, c, C in M.out_map.get(dst, ()):
        prod = mul(M.alg, c, h)
        if prod is not None:
            _add(acc, (src, z, prod), f2.matmul(C, H))
    return _rebuild(M, M.gens, acc)


# --------------------------------------------------------------------------
# loop form


def _kind(b: Basis) -> str:
    return b.kind


def segments(M: Complex) -> dict[tuple[frozenset, str], list[tuple[str, str, Basis, f2.Mat]]]:
    """Group arrows into undirected segments by endpoints and letter type."""
    out: dict = defaultdict(list)
    for s, d, b, m in M.arrows:
        out[(frozenset((s, d)), b.kind)].append((s, d, b, m))
    return out


def loop_form_defects(M: Complex) -> list[str]:
    problems = []
    if not is_reduced(M):
        problems.append("not reduced")
    segs = segments(M)
    count: dict[tuple[str, str], int] = defaultdict(int)
    full = M.alg.kind == "full"
    for (ends, kind), arrs in segs.items():
        if len(ends) == 1:
            problems.append(f"self-arrow at {next(iter(ends))}")
            continue
        if kind == "i":
            continue
        for g in ends:
            count[(g, kind)] += 1
        if full:
            ok = len(arrs) == 2 and arrs[0][0] != arrs[1][0]
            if ok:
                (s1, d1, b1, m1), (s2, d2, b2, m2) = arrs
                prod = mul(M.alg, b2, b1)
                ok = prod is not None and prod.length == 4 and f2.is_zero(
                    f2.matadd(f2.matmul(m2, m1), f2.identity(len(m2))))
            if not ok:
                problems.append(f"segment {sorted(ends)} ({kind}) is not a complementary pair")
        elif len(arrs) != 1:
            problems.append(f"segment {sorted(ends)} ({kind}) has {len(arrs)} arrows")
    for g in M.gens:
        for kind in "pq":
            if count[(g.name, kind)] != 1:
                problems.append(f"{g.name} meets {count[(g.name, kind)]} {kind}-segments")
    return problems


def is_loop_form(M: Complex) -> bool:
    return not loop_form_defects(M)


def _push_candidates(M: Complex):
    """Pairs of parallel same-type arrows at a generator, shortest push first."""
    cands = []
    for g in M.gens:
        outs = sorted(M.out_map.get(g.name, ()))
        for i, (y, a, A) in enumerate(outs):
            for z, c, C in outs:
                if z in (y, g.name) or y == g.name or a.kind != c.kind or a.kind == "i":
                    continue
                if c.length <= a.length:
                    continue
                # c = a' * a with a' from y to z
                rest = Basis(c.kind, c.start, c.length - a.length) if c.kind == "p" else None
                if c.kind == "q":
                    rest = Basis("q", c.start, c.length - a.length)
                if rest is None or mul(M.alg, rest, a) != c or not f2.is_invertible(A):
                    continue
                if rest.right != M.gen(y).idem or rest.left != M.gen(z).idem:
                    continue
                H = f2.matmul(C, f2.inverse(A))
                cands.append(((c.length, g.name, "out", str(c), str(a)), y, z, rest, H))
        ins = sorted(M.in_map.get(g.name, ()))
        for y, a, A in ins:
            for z, c, C in ins:
                if z in (y, g.name) or y == g.name or a.kind != c.kind or a.kind == "i":
                    continue
                if c.length <= a.length:
                    continue
                # c = a * a'' with a'' from z to y
                tail = _right_factor(c, c.length - a.length)
                if tail is None or mul(M.alg, a, tail) != c or not f2.is_invertible(A):
                    continue
                if tail.right != M.gen(z).idem or tail.left != M.gen(y).idem:
                    continue
                H = f2.matmul(f2.inverse(A), C)
                cands.append(((c.length, g.name, "in", str(c), str(a)), z, y, tail, H))
    cands.sort(key=lambda t: (-t[0][0],) + t[0][1:])
    return cands


def _right_factor(c: Basis, ell: int) -> Basis | None:
    """The last ``ell`` letters of a path, as a path."""
    if ell <= 0 or ell >= c.length:
        return None
    letters = c.letters[c.length - ell:]
    return Basis(c.kind, letters[0], ell)


def to_loop_form(M: Complex, *, trace=None, cap: int | None = None) -> Complex:
    """Reduce, then push arrows until every generator meets one p- and one q-segment."""
    M = reduce(M, trace=trace)
    n = max(len(M.gens), 1)
    cap = 10 * n * n if cap is None else cap
    moves = 0
    seen = set()
    while not is_loop_form(M):
        if moves >= cap:
            raise SimplifyError("arrow pushing hit the iteration cap:\n" + "\n".join(loop_form_defects(M)))
        progressed = False
        for _, s, d, h, H in _push_candidates(M):
            try:
                N = clean_up(M, s, d, h, H, trace=trace)
            except (SimplifyError, GradingError):
                continue
            sig = N.arrows
            if sig in seen:
                continue
            seen.add(sig)
            M = reduce(N, trace=trace)
            progressed = True
            break
        moves += 1
        if not progressed:
            raise SimplifyError("no admissible arrow push left:\n" + "\n".join(loop_form_defects(M)))
    return M


def decompose(M: Complex) -> list[Complex]:
    """Connected components of the arrow graph."""
    parent = {g.name: g.name for g in M.gens}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s, d, _, _ in M.arrows:
        ra, rb = find(s), find(d)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[str, list] = defaultdict(list)
    for g in M.gens:
        groups[find(g.name)].append(g)
    out = []
    for root in sorted(groups):
        names = {g.name for g in groups[root]}
        arrows = tuple(a for a in M.arrows if a[0] in names)
        out.append(M.evolve(gens=tuple(groups[root]), arrows=arrows))
    return out
