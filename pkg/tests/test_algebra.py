"""Path algebras: products against a word-rewriting model of the quiver."""

import pytest
from hypothesis import given, strategies as st

from peculiar.algebra import (FULL, MINUS, Basis, Elt, Matching, basis_paths, curvature_element, cyclic,
                              format_basis, mul, p, parse_basis, q, quotient, relabel_automorphism)

# Oracle: a basis element is a word of letters ('p', i) / ('q', i) plus a
# U-vector.  p_i runs from site i-1 to i, q_i from i to i-1.  Products
# concatenate; adjacent p_i q_i or q_i p_i is zero in the full algebra and
# U_i in the minus algebra.


def letters(b):
    return [(b.kind, k) for k in b.letters]


def ends(word, site):
    if not word:
        return site, site
    kind, k = word[0]
    left = (k - 2) % 4 + 1 if kind == "p" else k
    kind, k = word[-1]
    right = k if kind == "p" else (k - 2) % 4 + 1
    return left, right


def oracle_mul(x, y, minus):
    wx, wy = letters(x), letters(y)
    if ends(wx, x.start)[1] != ends(wy, y.start)[0]:
        return None
    u = [a + b for a, b in zip(x.u, y.u)]
    word = []
    for lt in wx + wy:
        if word and word[-1][1] == lt[1] and word[-1][0] != lt[0]:
            if not minus:
                return None
            word.pop()
            u[lt[1] - 1] += 1
            continue
        word.append(lt)
    left = ends(wx, x.start)[0]
    return ("".join(k for k, _ in word[:1]), tuple(i for _, i in word), left, tuple(u))


def as_oracle(b):
    if b is None:
        return None
    return (b.kind if b.kind != "i" else "", b.letters, b.left, b.u)


def basis_strategy(minus=False):
    core = st.one_of(
        st.builds(lambda s: Basis("i", s), st.integers(1, 4)),
        st.builds(lambda k, s, l: Basis(k, s, l), st.sampled_from("pq"), st.integers(1, 4), st.integers(1, 6)))
    if not minus:
        return core
    us = st.tuples(*[st.integers(0, 2)] * 4)
    return st.builds(lambda b, u: Basis(b.kind, b.start, b.length, u), core, us)


@given(basis_strategy(), basis_strategy())
def test_full_products_match_word_model(x, y):
    assert as_oracle(mul(FULL, x, y)) == oracle_mul(x, y, False)


@given(basis_strategy(True), basis_strategy(True))
def test_minus_products_match_word_model(x, y):
    assert as_oracle(mul(MINUS, x, y)) == oracle_mul(x, y, True)


@given(basis_strategy(True), basis_strategy(True), basis_strategy(True))
def test_minus_product_is_associative(x, y, z):
    def m(a, b):
        return None if a is None or b is None else mul(MINUS, a, b)
    assert m(m(x, y), z) == m(x, m(y, z))


def test_named_products():
    assert mul(FULL, p(1), p(2)) == p(1, 2)
    assert mul(FULL, p(4), q(4)) is None
    assert format_basis(mul(MINUS, p(4), q(4))) == "U4*i3"
    assert mul(quotient(3, 1), p(2), p(3)) is None


def test_parse_and_format_are_inverse():
    for b in basis_paths(FULL, 5):
        assert parse_basis(format_basis(b)) == b
    assert parse_basis("U2^2*U3*p41") == Basis("p", 4, 2, (0, 2, 1, 0))
    with pytest.raises(ValueError):
        parse_basis("p13")


def test_gradings_of_generators():
    # delta(p_i) = 1/2 and A(p_i) = e_i; U_i has delta 1 and A 2 e_i
    assert p(3).delta == q(3).delta == 0.5
    assert p(3).alex == (0, 0, 1, 0)
    U = parse_basis("U2*i1")
    assert U.delta == 1 and U.alex == (0, 2, 0, 0)


def test_quotient_kills_the_named_letters():
    A = quotient(3, 1)
    names = {format_basis(b) for b in basis_paths(A, 1, idempotents=False)}
    assert "p3" not in names and "q1" not in names
    assert {"p1", "p2", "p4", "q2", "q3", "q4"} <= names


def test_curvature_elements():
    assert len(curvature_element(FULL).terms) == 8
    P = Matching(((1, 4), (2, 3)))
    c = curvature_element(MINUS, P)
    assert parse_basis("U1*U4*i2") in c.terms and parse_basis("U2*U3*i4") in c.terms
    with pytest.raises(ValueError):
        curvature_element(MINUS)


@pytest.mark.parametrize("kind", ["mut_x", "mut_y", "mut_z"])
def test_mutations_are_involutions_fixing_curvature(kind):
    r = relabel_automorphism(kind)
    for b in basis_paths(FULL, 4):
        assert r.basis(r.basis(b)) == b
        assert r.basis(b).delta == b.delta
    assert r.elt(curvature_element(FULL), FULL) == curvature_element(FULL)


def test_cyclic_shift_has_order_four():
    r = cyclic(1)
    assert r.basis(Basis("i", 1)) == Basis("i", 2)
    for b in basis_paths(FULL, 3):
        x = b
        for _ in range(4):
            x = r.basis(x)
        assert x == b


@given(basis_strategy(), basis_strategy())
def test_relabelling_is_multiplicative(x, y):
    for r in (cyclic(1), relabel_automorphism("mut_x")):
        xy = mul(FULL, x, y)
        img = mul(FULL, r.basis(x), r.basis(y))
        assert img == (None if xy is None else r.basis(xy))


def test_element_arithmetic():
    a = Elt.of(FULL, p(1), q(2))
    assert not (a + a)
    assert (a * Elt.of(FULL, p(2))).terms == {p(1, 2)}
