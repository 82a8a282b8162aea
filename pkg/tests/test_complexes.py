"""Curved complexes: d^2, transforms, Mor homology and the minus extension."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from peculiar import f2
from peculiar.algebra import FULL, Matching, p, parse_basis, q, quotient
from peculiar.complexes import (Gen, GradingError, apply_quotient, check_d2, d_squared, direct_sum, extend_over_minus,
                                make, mor_complex, homology, mor_homology, rr, rr34, shift, tensor_V)
from peculiar.curves import b_curve, pi, rational
from peculiar.datasets import even_segment_curve, generated_family
from peculiar.gradings import Lattice

P14 = Matching(((1, 4), (2, 3)))


def r01(drop=None):
    arrows = [("a", "c", p(4, 1)), ("a", "c", q(3, 2)), ("c", "a", p(2, 3)), ("c", "a", q(1, 4))]
    arrows = [a for a in arrows if a[2] != drop]
    gens = [Gen("a", 1), Gen("c", 3, 0, (-1, 0, 0, -1))]
    return make(FULL, gens, arrows, lattice=Lattice.of([(0, 2, 0, 0, 2)]))


def test_hand_built_slope_zero_module_is_curved():
    assert check_d2(r01())


def test_deleting_a_label_breaks_d2():
    rep = check_d2(r01(drop=q(1, 4)))
    assert not rep
    assert {rep.src, rep.dst} <= {"a", "c"}


def test_single_generator_over_quotient_has_zero_curvature():
    M = make(quotient(3, 1), [Gen("x", 2)], [])
    assert check_d2(M)


def test_incoherent_arrow_is_rejected():
    with pytest.raises(GradingError):
        make(FULL, [Gen("a", 1), Gen("c", 3)], [("a", "c", p(4, 1))])


def test_label_endpoints_are_checked():
    with pytest.raises(ValueError):
        make(FULL, [Gen("a", 1), Gen("b", 2, Fraction(-1, 2))], [("a", "b", p(4, 1))], check=False)


def test_quotient_of_slope_zero():
    Q = apply_quotient(r01(), 3, 1)
    assert sorted(str(b) for _, _, b, _ in Q.arrows) == ["p41", "q32"]
    assert check_d2(Q)


def test_quotient_leaves_modules_without_those_letters_alone():
    M = make(FULL, [Gen("a", 1), Gen("b", 2, Fraction(-1, 2), (0, 1, 0, 0))], [("b", "a", p(2))])
    assert apply_quotient(M, 3, 1).arrows == M.arrows


def test_alexander_transforms():
    M = make(FULL, [Gen("x", 1, 0, (0, 1, 1, 0))], [])
    assert rr(M).gens[0].alex == (0, -1, -1, 0)
    N = r01()
    assert rr(rr(N)) == N
    assert rr34(rr34(N)) == N


def test_tensor_V_doubles_and_keeps_delta():
    M = pi(b_curve(1)).evolve(matching=P14)
    T = tensor_V(M)
    assert T.rank == 2 * M.rank
    assert check_d2(T)
    TT = tensor_V(T)
    # each factor moves the colour grading by one in either direction
    g = M.gens[0].name
    cols = sorted(P14.colored(TT.gen(g + s).alex)[0] - P14.colored(M.gen(g).alex)[0]
                  for s in ("++", "+-", "-+", "--"))
    assert cols == [-2, 0, 0, 2]
    assert {TT.gen(g + s).delta for s in ("++", "+-", "-+", "--")} == {M.gen(g).delta}


def test_direct_sum_and_shift():
    M = r01()
    S = direct_sum(M, shift(M, 1))
    assert S.rank == 4 and check_d2(S)


# ---------------------------------------------------------------------------
# Mor homology


def dense_total(C):
    """Total homology by one dense rank computation (ignores gradings)."""
    n = len(C.basis)
    rows = [[(C.images[k] >> t) & 1 for t in range(n)] for k in range(n)]
    r = f2.rank(f2.as_mat(rows)) if n else 0
    return n - 2 * r


def test_mor_complex_squares_to_zero_and_grading_split_is_exact():
    M, N = pi(rational("0/1")), pi(rational("1/2"))
    C = mor_complex(M, N, 6)
    assert C.d_squared_zero()
    assert sum(homology(C, complete_only=False).values()) == dense_total(C)


def test_named_mor_ranks():
    assert sum(mor_homology(pi(rational("0/1")), pi(rational("1/0"))).values()) == 2
    assert sum(mor_homology(pi(rational("0/1")), pi(rational("0/1"))).values()) == 2
    empty = make(FULL, [], [])
    assert mor_homology(empty, pi(rational("0/1"))) == {}


FAMILY = [L for _, L in generated_family(max_slope=2, max_n=1, n_random=0)]


@given(st.sampled_from(FAMILY), st.sampled_from(FAMILY))
def test_mor_rank_is_symmetric(A, B):
    ab = sum(mor_homology(pi(A), pi(B)).values())
    ba = sum(mor_homology(pi(B), pi(A)).values())
    assert ab == ba


# ---------------------------------------------------------------------------
# extension to the minus algebra


def test_bare_generators_are_not_curved():
    M = make(FULL, [Gen("x", 1), Gen("y", 3)], [])
    assert not check_d2(M)


def test_bn_extends_with_degree_one_idempotent_arrows():
    for n in (1, 2):
        ext = extend_over_minus(pi(b_curve(n)), P14)
        assert ext
        assert all(b.kind == "i" and b.udeg == 1 for _, _, b, _ in ext.added)
        assert parse_basis("U2*i3") in {b for _, _, b, _ in ext.added}
        assert high_degree_defects(ext.complex)


def high_degree_defects(C):
    """d^2 + curvature, with every surviving entry required to have U-degree above one."""
    acc = d_squared(C)
    for g in C.gens:
        for b in C.curvature.terms:
            if b.left == g.idem and b.right == g.idem:
                key = (g.name, g.name, b)
                acc[key] = f2.matadd(acc[key], f2.identity(g.dim)) if key in acc else f2.identity(g.dim)
    return all(k[2].udeg > 1 for k, m in acc.items() if not f2.is_zero(m))


def test_even_segment_has_a_certificate():
    ext = extend_over_minus(pi(even_segment_curve()), P14)
    assert not ext
    s, d, b, i, j = ext.certificate
    assert ext.residual[0][:3] == (s, d, b)
    assert "no extension" in str(ext)


def test_extension_rejects_non_curved_input():
    with pytest.raises(ValueError):
        extend_over_minus(r01(drop=p(4, 1)), P14)
