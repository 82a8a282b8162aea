"""Linear algebra over F2.

Small square matrices (local systems, differential coefficients) are stored
as tuples of row tuples so that they hash.  Large sparse systems use rows
packed into Python ints.  Polynomials over F2 are ints: bit k is the
coefficient of x^k.
"""

from __future__ import annotations

import numpy as np

Mat = tuple[tuple[int, ...], ...]


# --------------------------------------------------------------------------
# small dense matrices


def as_mat(rows) -> Mat:
    arr = np.asarray(rows, dtype=np.int64) % 2
    if arr.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return tuple(tuple(int(v) for v in row) for row in arr)


def to_array(m: Mat) -> np.ndarray:
    return np.array(m, dtype=np.uint8).reshape(len(m), len(m[0]) if m else 0)


def identity(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Mat:
    return tuple((0,) * c for _ in range(r))


def shape(m: Mat) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def matmul(a: Mat, b: Mat) -> Mat:
    if shape(a)[1] != shape(b)[0]:
        raise ValueError(f"shape mismatch {shape(a)} @ {shape(b)}")
    prod = (to_array(a).astype(np.int64) @ to_array(b).astype(np.int64)) % 2
    return tuple(tuple(int(v) for v in row) for row in prod.reshape(shape(a)[0], shape(b)[1]))


def matadd(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x ^ y for x, y in zip(r, s)) for r, s in zip(a, b))


def is_zero(m: Mat) -> bool:
    return not any(any(r) for r in m)


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else m


def rank(m: Mat) -> int:
    return rank_rows([_pack(r) for r in m])


def _pack(row) -> int:
    v = 0
    for k, bit in enumerate(row):
        if bit:
            v |= 1 << k
    return v


def inverse(m: Mat) -> Mat:
    n = len(m)
    rows = [_pack(r) | (1 << (n + i)) for i, r in enumerate(m)]
    for col in range(n):
        piv = next((k for k in range(col, n) if rows[k] >> col & 1), None)
        if piv is None:
            raise ValueError("matrix is not invertible over F2")
        rows[col], rows[piv] = rows[piv], rows[col]
        for k in range(n):
            if k != col and rows[k] >> col & 1:
                rows[k] ^= rows[col]
    return tuple(tuple(rows[i] >> (n + j) & 1 for j in range(n)) for i in range(n))


def is_invertible(m: Mat) -> bool:
    return len(m) == shape(m)[1] and rank(m) == len(m)


def random_invertible(n: int, rng: np.random.Generator) -> Mat:
    while True:
        m = as_mat(rng.integers(0, 2, size=(n, n)))
        if is_invertible(m):
            return m


def format_mat(m: Mat) -> str:
    return ",".join("".join(str(v) for v in row) for row in m)


def parse_mat(text: str) -> Mat:
    rows = [r for r in text.strip().strip("[]").split(",") if r]
    if not rows or any(set(r) - {"0", "1"} for r in rows):
        raise ValueError(f"bad bit matrix {text!r}")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"ragged bit matrix {text!r}")
    return tuple(tuple(int(c) for c in r) for r in rows)


# --------------------------------------------------------------------------
# large sparse systems as int bitsets


def rank_rows(rows) -> int:
    """Rank of a list of int-packed rows (xor basis)."""
    basis: dict[int, int] = {}
    r = 0
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                r += 1
                break
    return r


def solve_rows(rows: list[int], target: int) -> int | None:
    """Find a subset (bitmask over rows) whose xor equals target.

    Preference goes to combinations using low-index rows: elimination keeps
    the first pivot seen for each leading bit.
    """
    basis: dict[int, tuple[int, int]] = {}
    for idx, v in enumerate(rows):
        comb = 1 << idx
        while v:
            top = v.bit_length() - 1
            if top in basis:
                bv, bc = basis[top]
                v ^= bv
                comb ^= bc
            else:
                basis[top] = (v, comb)
                break
    comb = 0
    v = target
    while v:
        top = v.bit_length() - 1
        if top not in basis:
            return None
        bv, bc = basis[top]
        v ^= bv
        comb ^= bc
    return comb


def kernel_rows(rows: list[int]) -> list[int]:
    """Bitmasks over rows spanning the subsets whose xor vanishes."""
    basis: dict[int, tuple[int, int]] = {}
    out = []
    for idx, v in enumerate(rows):
        comb = 1 << idx
        while v:
            top = v.bit_length() - 1
            if top in basis:
                bv, bc = basis[top]
                v ^= bv
                comb ^= bc
            else:
                basis[top] = (v, comb)
                break
        if not v:
            out.append(comb)
    return out


# --------------------------------------------------------------------------
# polynomials over F2


def pdeg(a: int) -> int:
    return a.bit_length() - 1


def pmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def pdivmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = pdeg(b)
    while a and pdeg(a) >= db:
        s = pdeg(a) - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, pdivmod(a, b)[1]
    return a


def pformat(a: int) -> str:
    if a == 0:
        return "0"
    terms = []
    for k in range(pdeg(a), -1, -1):
        if a >> k & 1:
            terms.append("1" if k == 0 else ("x" if k == 1 else f"x^{k}"))
    return "+".join(terms)


def pparse(text: str) -> int:
    out = 0
    for t in text.replace(" ", "").split("+"):
        if t == "1":
            out ^= 1
        elif t == "x":
            out ^= 2
        elif t.startswith("x^"):
            out ^= 1 << int(t[2:])
        elif t == "0":
            continue
        else:
            raise ValueError(f"bad polynomial term {t!r}")
    return out


def invariant_factors(m: Mat) -> tuple[int, ...]:
    """Non-unit invariant factors of x*I - m, each dividing the next."""
    n = len(m)
    if n == 0:
        return ()
    a = [[(2 if i == j else 0) ^ m[i][j] for j in range(n)] for i in range(n)]
    diag: list[int] = []
    for t in range(n):
        while True:
            # move an entry of least degree to (t, t)
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if a[i][j] and (best is None or pdeg(a[i][j]) < pdeg(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                diag.extend([0] * (n - t))
                break
            i, j = best
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, n):
                if a[i][t]:
                    qt, _ = pdivmod(a[i][t], piv)
                    a[i] = [x ^ pmul(qt, y) for x, y in zip(a[i], a[t])]
                    dirty |= a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    qt, _ = pdivmod(a[t][j], piv)
                    for row in a:
                        row[j] ^= pmul(qt, row[t])
                    dirty |= a[t][j] != 0
            if dirty:
                continue
            # divisibility of the remaining block by the pivot
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if pdivmod(a[i][j], piv)[1]), None)
            if bad is None:
                diag.append(piv)
                break
            a[t] = [x ^ y for x, y in zip(a[t], a[bad[0]])]
        if len(diag) == n:
            break
    # normalize: over F2 every nonzero polynomial is monic
    diag = sorted(diag, key=lambda d: (pdeg(d), d))
    # re-chain through gcd/lcm to guarantee divisibility
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            g = pgcd(diag[i], diag[j])
            lcm = pdivmod(pmul(diag[i], diag[j]), g)[0]
            diag[i], diag[j] = g, lcm
    return tuple(d for d in diag if d != 1)


def companion(poly: int) -> Mat:
    d = pdeg(poly)
    rows = [[0] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = 1
    for i in range(d):
        rows[i][d - 1] = poly >> i & 1
    return tuple(tuple(r) for r in rows)


def block_diag(blocks) -> Mat:
    blocks = list(blocks)
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return tuple(tuple(r) for r in out)


def rational_canonical(m: Mat) -> Mat:
    return block_diag(companion(f) for f in invariant_factors(m))


def similar(a: Mat, b: Mat) -> bool:
    return len(a) == len(b) and invariant_factors(a) == invariant_factors(b)


def pfactor(a: int) -> list[int]:
    """Irreducible factors of a nonzero polynomial, with multiplicity, ascending."""
    if a == 0:
        raise ValueError("cannot factor the zero polynomial")
    out = []
    f = 2
    while pdeg(a) >= 1 and pdeg(f) * 2 <= pdeg(a):
        qt, r = pdivmod(a, f)
        if r == 0:
            out.append(f)
            a = qt
        else:
            f += 1
    if pdeg(a) >= 1:
        out.append(a)
    return sorted(out, key=lambda g: (pdeg(g), g))


def elementary_divisors(m: Mat) -> tuple[int, ...]:
    """Prime-power elementary divisors of x*I - m, sorted."""
    out = []
    for f in invariant_factors(m):
        facs = pfactor(f)
        for g in sorted(set(facs)):
            e = facs.count(g)
            h = 1
            for _ in range(e):
                h = pmul(h, g)
            out.append(h)
    return tuple(sorted(out, key=lambda g: (pdeg(g), g)))
