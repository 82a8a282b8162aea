"""Line-based text formats for modules, bimodules and multicurves.

All three formats are whitespace separated, one record per line, with ``#``
comments.  Printing is deterministic and ``parse(format(x)) == x``.

Module::

    module quot31
    curvature 0
    lattice (0,0,2,0,0,2)
    gen a0 a 0 [0,0,0,0] dim=2
    arr a0 c1 p41 10,01

Bimodule::

    bimodule dehn-twist quot43 quot34
    letters -1 1,2,4,3
    maxlen 1
    gen aA a a 0 [0,0,1/2,1/2]
    act cD q4 dD i4

Multicurve::

    lattice (0,0,2,0,0,2)
    loop X=x^2+x+1 at=0;[0,0,0,0] a:p41 c:q14
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable

from . import f2
from .algebra import Alg, Matching, format_basis, format_elt, parse_basis, site_index, site_name
from .complexes import ADBimodule, BiGen, Complex, Gen, Letters, STANDARD
from .gradings import Lattice, fmt_alex, fmt_half, parse_alex

if TYPE_CHECKING:
    from .curves import Loop, Multicurve


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


def _records(text: str) -> Iterable[tuple[int, str, list[tuple[int, str]]]]:
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]
        if toks:
            yield ln, raw, toks


def _site(tok: str) -> int:
    if tok in ("a", "b", "c", "d"):
        return site_index(tok)
    k = int(tok)
    if not 1 <= k <= 4:
        raise ValueError(f"site {tok!r} out of range")
    return k


def _fmt_vec(v) -> str:
    return "(" + ",".join(fmt_half(x) for x in v) + ")"


def _parse_vec(tok: str) -> tuple[Fraction, ...]:
    body = tok.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"expected a parenthesized vector, got {tok!r}")
    parts = body[1:-1].split(",")
    if len(parts) != 5:
        raise ValueError("lattice vectors have five entries")
    return tuple(Fraction(x) for x in parts)


def _fmt_lattice(lat: Lattice) -> str | None:
    if lat.trivial:
        return None
    return "lattice " + " ".join(_fmt_vec(v) for v in lat.gens)


def _fmt_letters(lt: Letters) -> str | None:
    if lt == STANDARD:
        return None
    return f"letters {lt.sign} " + ",".join(str(k) for k in lt.perm)


def _parse_letters(toks: list[tuple[int, str]]) -> Letters:
    sign = int(toks[0][1])
    perm = tuple(int(x) for x in toks[1][1].split(","))
    if sign not in (1, -1) or sorted(perm) != [1, 2, 3, 4]:
        raise ValueError("letters needs a sign and a permutation of 1..4")
    return Letters(sign, perm)  # type: ignore[arg-type]


# --------------------------------------------------------------------------
# modules


def format_module(M: Complex) -> str:
    lines = [f"module {M.alg}", f"curvature {format_elt(M.curvature)}"]
    if M.matching is not None:
        lines.append(f"matching {M.matching}")
    for extra in (_fmt_lattice(M.lattice), _fmt_letters(M.letters)):
        if extra:
            lines.append(extra)
    for g in M.gens:
        dim = f" dim={g.dim}" if g.dim != 1 else ""
        lines.append(f"gen {g.name} {site_name(g.idem)} {fmt_half(g.delta)} {fmt_alex(g.alex)}{dim}")
    dims = {g.name: g.dim for g in M.gens}
    for s, d, b, m in M.arrows:
        mat = "" if dims[s] == dims[d] == 1 else " " + f2.format_mat(m)
        lines.append(f"arr {s} {d} {format_basis(b)}{mat}")
    return "\n".join(lines) + "\n"


def canonical_text(M: Complex, extra: Iterable = ()) -> str:
    """Rendering that depends only on the isomorphism type of a graded module.

    Gradings are reduced modulo the module's lattice (plus ``extra``) and
    generators are renamed site+k in order of (site, reduced grading,
    neighbourhood).  Two modules whose generators are told apart by these
    keys render identically iff they are isomorphic by that renaming.
    """
    lat = M.lattice.extend(extra) if extra else M.lattice
    red = {g.name: lat.reduce(g.grading) for g in M.gens}
    nbhd: dict[str, list] = {g.name: [] for g in M.gens}
    for s, d, b, _ in M.arrows:
        nbhd[s].append(("out", format_basis(b), red[d]))
        nbhd[d].append(("in", format_basis(b), red[s]))
    byidem = {g.name: g.idem for g in M.gens}
    order = sorted(M.gens, key=lambda g: (g.idem, red[g.name], g.dim, sorted(nbhd[g.name])))
    names, seen = {}, {}
    for g in order:
        k = seen.get(g.idem, 0)
        seen[g.idem] = k + 1
        names[g.name] = f"{site_name(g.idem)}{k}"
    lines = [f"module {M.alg}"]
    if not lat.trivial:
        lines.append(_fmt_lattice(lat))
    for g in order:
        r = red[g.name]
        dim = f" dim={g.dim}" if g.dim != 1 else ""
        lines.append(f"gen {names[g.name]} {site_name(byidem[g.name])} {fmt_half(r[0])} {fmt_alex(r[1:])}{dim}")
    dims = {g.name: g.dim for g in M.gens}
    arrs = []
    for s, d, b, m in M.arrows:
        mat = "" if dims[s] == dims[d] == 1 else " " + f2.format_mat(m)
        arrs.append(f"arr {names[s]} {names[d]} {format_basis(b)}{mat}")
    return "\n".join(lines + sorted(arrs)) + "\n"


def parse_module(text: str) -> Complex:
    alg = None
    matching = None
    lattice = Lattice()
    letters = STANDARD
    gens: list[Gen] = []
    arrows = []
    for ln, _, toks in _records(text):
        head, col = toks[0][1], toks[0][0]
        try:
            if head == "module":
                alg = Alg.parse(toks[1][1])
            elif head == "curvature":
                pass  # derived from the algebra and matching
            elif head == "matching":
                matching = Matching.parse(" ".join(t for _, t in toks[1:]))
            elif head == "lattice":
                lattice = Lattice.of(_parse_vec(t) for _, t in toks[1:])
            elif head == "letters":
                letters = _parse_letters(toks[1:])
            elif head == "gen":
                if len(toks) not in (5, 6):
                    raise ValueError("gen <name> <site> <delta> <A4> [dim=k]")
                dim = 1
                if len(toks) == 6:
                    key, _, val = toks[5][1].partition("=")
                    if key != "dim":
                        raise ValueError(f"unknown generator option {toks[5][1]!r}")
                    dim = int(val)
                gens.append(Gen(toks[1][1], _site(toks[2][1]), Fraction(toks[3][1]),
                                parse_alex(toks[4][1]), dim))
            elif head == "arr":
                if len(toks) not in (4, 5):
                    raise ValueError("arr <src> <dst> <label> [matrix]")
                for pos, t in ((toks[3][0], toks[3][1]),):
                    col = pos
                    b = parse_basis(t)
                m = f2.parse_mat(toks[4][1]) if len(toks) == 5 else None
                arrows.append((toks[1][1], toks[2][1], b, m))
            else:
                raise ValueError(f"unknown record {head!r}")
        except (ValueError, IndexError) as exc:
            raise ParseError(str(exc) or "truncated record", ln, col) from None
    if alg is None:
        raise ParseError("missing 'module <algebra>' header", 1)
    dims = {g.name: g.dim for g in gens}
    full = []
    for s, d, b, m in arrows:
        if s not in dims or d not in dims:
            raise ParseError(f"arrow {s}->{d} names an unknown generator", 1)
        full.append((s, d, b, m if m is not None else f2.identity(dims[s])))
    return Complex(alg, tuple(gens), tuple(full), matching=matching, lattice=lattice, letters=letters)


# --------------------------------------------------------------------------
# bimodules


def format_bimodule(B: ADBimodule) -> str:
    lines = [f"bimodule {B.name} {B.a_alg} {B.d_alg}"]
    lt = _fmt_letters(B.a_letters)
    if lt:
        lines.append(lt)
    lines.append(f"maxlen {B.max_input_len}")
    for g in B.gens:
        lines.append(f"gen {g.name} {site_name(g.a_idem)} {site_name(g.d_idem)} "
                     f"{fmt_half(g.delta)} {fmt_alex(g.alex)}")
    for s, ins, d, b in B.actions:
        seq = ",".join(format_basis(a) for a in ins) if ins else "-"
        lines.append(f"act {s} {seq} {d} {format_basis(b)}")
    return "\n".join(lines) + "\n"


def parse_bimodule(text: str) -> ADBimodule:
    header = None
    letters = STANDARD
    maxlen = None
    gens: list[BiGen] = []
    acts = []
    for ln, _, toks in _records(text):
        head, col = toks[0][1], toks[0][0]
        try:
            if head == "bimodule":
                header = (toks[1][1], Alg.parse(toks[2][1]), Alg.parse(toks[3][1]))
            elif head == "letters":
                letters = _parse_letters(toks[1:])
            elif head == "maxlen":
                maxlen = int(toks[1][1])
            elif head == "gen":
                if len(toks) != 6:
                    raise ValueError("gen <name> <a-site> <d-site> <delta> <A4>")
                gens.append(BiGen(toks[1][1], _site(toks[2][1]), _site(toks[3][1]),
                                  Fraction(toks[4][1]), parse_alex(toks[5][1])))
            elif head == "act":
                if len(toks) != 5:
                    raise ValueError("act <src> <inputs|-> <dst> <output>")
                col = toks[2][0]
                seq = () if toks[2][1] == "-" else tuple(parse_basis(t) for t in toks[2][1].split(","))
                col = toks[4][0]
                acts.append((toks[1][1], seq, toks[3][1], parse_basis(toks[4][1])))
            else:
                raise ValueError(f"unknown record {head!r}")
        except (ValueError, IndexError) as exc:
            raise ParseError(str(exc) or "truncated record", ln, col) from None
    if header is None:
        raise ParseError("missing 'bimodule <name> <A-alg> <D-alg>' header", 1)
    name, a_alg, d_alg = header
    if maxlen is None:
        maxlen = max((len(a[1]) for a in acts), default=0)
    try:
        return ADBimodule(name, a_alg, d_alg, tuple(gens), tuple(acts), letters, maxlen)
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


# --------------------------------------------------------------------------
# curves


def _fmt_X(X: f2.Mat) -> str | None:
    if X == f2.identity(1):
        return None
    facs = f2.invariant_factors(X)
    if len(facs) == 1 and f2.companion(facs[0]) == X:
        return "X=" + f2.pformat(facs[0]).replace(" ", "")
    return "X=[" + f2.format_mat(X) + "]"


def _parse_X(tok: str) -> f2.Mat:
    body = tok[2:]
    if body.startswith("["):
        return f2.parse_mat(body)
    poly = f2.pparse(body)
    if f2.pdeg(poly) < 1 or not poly & 1:
        raise ValueError(f"local system polynomial {body!r} must have degree >= 1 and nonzero constant term")
    return f2.companion(poly)


def format_loop(L: "Loop") -> str:
    parts = ["loop"]
    x = _fmt_X(L.X)
    if x:
        parts.append(x)
    if any(L.anchor):
        parts.append(f"at={fmt_half(L.anchor[0])};{fmt_alex(L.anchor[1:])}")
    parts += [f"{site_name(s)}:{format_basis(b)}" for s, b in L.word]
    return " ".join(parts)


def format_multicurve(L: "Multicurve") -> str:
    lines = []
    lt = _fmt_lattice(L.extra)
    if lt:
        lines.append(lt)
    lines += [format_loop(x) for x in L.loops]
    return "\n".join(lines) + "\n"


def parse_loop_tokens(toks: list[tuple[int, str]], ln: int = 1) -> "Loop":
    from .curves import CurveError, Loop

    X = f2.identity(1)
    anchor = (0,) * 5
    word = []
    col = toks[0][0]
    try:
        for col, t in toks[1:]:
            if t.startswith("X="):
                X = _parse_X(t)
            elif t.startswith("at="):
                d, _, a = t[3:].partition(";")
                anchor = (Fraction(d),) + parse_alex(a)
            else:
                site, _, seg = t.partition(":")
                if not seg:
                    raise ValueError(f"expected <site>:<segment>, got {t!r}")
                b = parse_basis(seg)
                if b.right != _site(site):
                    raise ValueError(f"segment {seg} does not start at site {site}")
                word.append((_site(site), b))
        col = toks[0][0]
        return Loop(tuple(word), X, anchor)
    except (ValueError, CurveError) as exc:
        raise ParseError(str(exc), ln, col) from None


def parse_multicurve(text: str) -> "Multicurve":
    from .curves import Multicurve

    loops = []
    extra = Lattice()
    for ln, _, toks in _records(text):
        head = toks[0][1]
        if head == "loop":
            loops.append(parse_loop_tokens(toks, ln))
        elif head == "lattice":
            try:
                extra = Lattice.of(_parse_vec(t) for _, t in toks[1:])
            except ValueError as exc:
                raise ParseError(str(exc), ln, toks[1][0] if len(toks) > 1 else 1) from None
        else:
            raise ParseError(f"unknown record {head!r}", ln, toks[0][0])
    return Multicurve(tuple(loops), extra)


def parse_loop(text: str) -> "Loop":
    M = parse_multicurve(text)
    if len(M.loops) != 1:
        raise ParseError(f"expected one loop, found {len(M.loops)}", 1)
    return M.loops[0]


def sniff(text: str) -> str:
    """Which of the three formats a text is in: 'module', 'bimodule' or 'curve'."""
    for _, _, toks in _records(text):
        head = toks[0][1]
        if head in ("module", "bimodule"):
            return head
        if head in ("loop", "lattice"):
            continue
        break
    return "curve"
