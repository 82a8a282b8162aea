"""Hand transcription of the slope 0/1 module pictures.

Builds the quotient modules of b_n, d_n and r_X directly from the pictured
generator/arrow patterns (no curve machinery) and writes their canonical
text to this directory.  Run as a script to regenerate the golden files.
"""

from __future__ import annotations

from pathlib import Path

from peculiar import f2
from peculiar.algebra import parse_basis, quotient
from peculiar.complexes import Complex, Gen
from peculiar.textio import canonical_text

OUT = Path(__file__).resolve().parents[2] / "src" / "peculiar" / "golden"
H = "1/2"

# r_X: the pictured gradings only agree modulo this relation
RX_EXTRA = [(0, 0, 1, 1, 0)]
RX_MATRICES = {
    "rX_1": [[1]],
    "rX_2": [[0, 1], [1, 1]],
    "rX_3": [[0, 0, 1], [1, 0, 1], [0, 1, 0]],
}


def _arr(s, d, lab):
    return (s, d, parse_basis(lab), [[1]])


def b_picture(n: int) -> Complex:
    g = [Gen("bT", 2, -1 / 2, (0, n, n, 0)),
         Gen("bB", 2, 1 / 2, (0, -n, -n, 0))]
    arrows = []
    for k in range(n):
        g.append(Gen(f"aL{k}", 1, 0, (0, n - 1 - 2 * k, n - 2 * k, 0)))
        g.append(Gen(f"cL{k}", 3, 0, (0, n - 2 - 2 * k, n - 1 - 2 * k, 0)))
        g.append(Gen(f"aR{k}", 1, 0, (0, 1 - n + 2 * k, -n + 2 * k, 0)))
        g.append(Gen(f"cR{k}", 3, 0, (0, 2 - n + 2 * k, 1 - n + 2 * k, 0)))
        arrows.append(_arr(f"aL{k}", f"cL{k}", "q32"))
        arrows.append(_arr(f"aR{k}", f"cR{k}", "p41"))
        if k + 1 < n:
            arrows.append(_arr(f"aL{k + 1}", f"cL{k}", "p41"))
            arrows.append(_arr(f"aR{k + 1}", f"cR{k}", "q32"))
    arrows += [_arr("bT", "aL0", "p2"), _arr("bT", f"cR{n - 1}", "q3"),
               _arr("aR0", "bB", "q2"), _arr("bB", f"cL{n - 1}", "p412")]
    return Complex(quotient(3, 1), tuple(g), tuple(arrows))


def d_picture(n: int) -> Complex:
    g = [Gen("dT", 4, 1 / 2, (-n, 0, 0, -n)), Gen("dB", 4, -1 / 2, (n, 0, 0, n))]
    arrows = []
    for k in range(n):
        g.append(Gen(f"cL{k}", 3, 0, (n - 2 * k, 0, 0, n - 1 - 2 * k)))
        g.append(Gen(f"aL{k}", 1, 0, (n - 1 - 2 * k, 0, 0, n - 2 - 2 * k)))
        g.append(Gen(f"cR{k}", 3, 0, (-n + 2 * k, 0, 0, 1 - n + 2 * k)))
        g.append(Gen(f"aR{k}", 1, 0, (1 - n + 2 * k, 0, 0, 2 - n + 2 * k)))
        arrows.append(_arr(f"cL{k}", f"aL{k}", "q14"))
        arrows.append(_arr(f"cR{k}", f"aR{k}", "p23"))
        if k + 1 < n:
            arrows.append(_arr(f"cL{k + 1}", f"aL{k}", "p23"))
            arrows.append(_arr(f"cR{k + 1}", f"aR{k}", "q14"))
    arrows += [_arr("dT", f"aL{n - 1}", "p234"), _arr("dB", "cL0", "p4"),
               _arr("cR0", "dT", "q4"), _arr("dB", f"aR{n - 1}", "q1")]
    return Complex(quotient(1, 3), tuple(g), tuple(arrows))


def r_picture(X) -> Complex:
    m = len(X)
    g = (Gen("a", 1, 0, (0, 0, 0, 0), m), Gen("c", 3, 0, (0, 0, 0, 0), m))
    arrows = (("a", "c", parse_basis("p41"), X), ("a", "c", parse_basis("q32"), f2.identity(m)))
    return Complex(quotient(3, 1), g, arrows, check=False)


def pictures() -> dict[str, str]:
    out = {}
    for n in (1, 2, 3):
        out[f"b{n}"] = canonical_text(b_picture(n))
        out[f"d{n}"] = canonical_text(d_picture(n))
    for name, X in RX_MATRICES.items():
        out[name] = canonical_text(r_picture(X), RX_EXTRA)
    return out


if __name__ == "__main__":
    for name, text in pictures().items():
        (OUT / f"{name}.txt").write_text(text)
