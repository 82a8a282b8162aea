"""F2 linear algebra and polynomials, checked against brute force."""

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from peculiar import f2


def all_vectors(n):
    return [tuple(v) for v in itertools.product((0, 1), repeat=n)]


def brute_rank(m):
    # size of the row space, by enumerating all combinations
    rows = [tuple(r) for r in m]
    span = {tuple(0 for _ in rows[0])} if rows else {()}
    for r in rows:
        span |= {tuple(a ^ b for a, b in zip(s, r)) for s in span}
    return len(span).bit_length() - 1


def brute_divides(a, b):
    return f2.pdivmod(b, a)[1] == 0


def brute_irreducible(f):
    d = f2.pdeg(f)
    return d >= 1 and not any(f2.pdivmod(f, g)[1] == 0 for g in range(2, 1 << d) if f2.pdeg(g) >= 1)


def brute_similar(a, b):
    n = len(a)
    for cols in itertools.product(all_vectors(n), repeat=n):
        P = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
        if f2.is_invertible(P) and f2.matmul(P, a) == f2.matmul(b, P):
            return True
    return False


mats = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n))


@given(mats)
def test_rank_matches_span_size(m):
    assert f2.rank(f2.as_mat(m)) == brute_rank(m)


@given(mats)
def test_inverse_when_invertible(m):
    M = f2.as_mat(m)
    if f2.is_invertible(M):
        assert f2.matmul(M, f2.inverse(M)) == f2.identity(len(m))
    else:
        with pytest.raises(ValueError):
            f2.inverse(M)


def test_matrix_text_round_trip():
    M = ((0, 1, 1), (1, 0, 1), (0, 0, 1))
    assert f2.parse_mat(f2.format_mat(M)) == M
    with pytest.raises(ValueError):
        f2.parse_mat("01,1")


@given(st.integers(1, 255), st.integers(1, 255))
def test_polynomial_division_identity(a, b):
    q, r = f2.pdivmod(a, b)
    assert f2.pmul(q, b) ^ r == a
    assert r == 0 or f2.pdeg(r) < f2.pdeg(b)


@given(st.integers(2, 1023))
def test_factoring_multiplies_back_to_irreducibles(a):
    facs = f2.pfactor(a)
    prod = 1
    for g in facs:
        assert brute_irreducible(g)
        prod = f2.pmul(prod, g)
    assert prod == a


def test_polynomial_text():
    assert f2.pformat(0b111) == "x^2+x+1"
    assert f2.pparse("x^3+x+1") == 0b1011


def test_companion_has_its_polynomial_as_invariant_factor():
    for poly in (0b11, 0b111, 0b1011, 0b10011, 0b101):
        assert f2.invariant_factors(f2.companion(poly)) == (poly,)


@given(st.integers(1, 3).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=n * n, max_size=n * n)))
def test_invariant_factors_divide_and_multiply_to_charpoly(bits):
    n = int(len(bits) ** 0.5)
    M = tuple(tuple(bits[i * n:(i + 1) * n]) for i in range(n))
    fs = f2.invariant_factors(M)
    for a, b in zip(fs, fs[1:]):
        assert brute_divides(a, b)
    prod = 1
    for g in fs:
        prod = f2.pmul(prod, g)
    assert f2.pdeg(prod) == n


def test_similarity_agrees_with_brute_force_on_2x2():
    all2 = [((a, b), (c, d)) for a, b, c, d in itertools.product((0, 1), repeat=4)]
    for A in all2:
        for B in all2:
            assert f2.similar(A, B) == brute_similar(A, B), (A, B)


def test_rational_canonical_form_is_similar():
    rng = np.random.default_rng(5)
    for _ in range(20):
        M = f2.as_mat(rng.integers(0, 2, size=(3, 3)))
        R = f2.rational_canonical(M)
        assert brute_similar(M, R)


def test_solve_and_kernel_rows():
    rows = [0b011, 0b110, 0b101]
    sol = f2.solve_rows(rows, 0b101)
    acc = 0
    for k, r in enumerate(rows):
        if sol >> k & 1:
            acc ^= r
    assert acc == 0b101
    # the three rows sum to zero
    assert f2.kernel_rows(rows) == [0b111]
    assert f2.solve_rows([0b01], 0b10) is None
