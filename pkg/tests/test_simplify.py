"""Cancellation, clean-up and loop form."""

import pytest
from hypothesis import given, settings, strategies as st

from peculiar.algebra import FULL, Basis, p
from peculiar.complexes import Gen, GradingError, check_d2, make, mor_homology
from peculiar.curves import b_curve, pi, rational
from peculiar.datasets import generated_family
from peculiar.selftest import clean_up_moves
from peculiar.simplify import (SimplifyError, cancel, clean_up, decompose, is_loop_form, is_reduced,
                               loop_form_defects, reduce, to_loop_form)

PROBES = [pi(rational(s)) for s in ("0/1", "1/0", "1/1", "1/2")]


def ranks(M):
    return [sum(mor_homology(P, M).values()) for P in PROBES]


def test_cancelling_a_lone_identity_leaves_nothing():
    M = make(FULL, [Gen("x", 1), Gen("y", 1, 1)], [("x", "y", Basis("i", 1))])
    assert cancel(M, "x", "y").rank == 0


def test_zigzag_composite():
    gens = [Gen("w", 3), Gen("x", 2), Gen("y", 2), Gen("z", 1)]
    arrows = [("w", "y", p(3)), ("x", "y", Basis("i", 2)), ("x", "z", p(2))]
    M = make(FULL, gens, arrows, check=False)
    N = cancel(M, "x", "y")
    assert [g.name for g in N.gens] == ["w", "z"]
    assert [(s, d, str(b)) for s, d, b, _ in N.arrows] == [("w", "z", "p23")]


def test_cancel_refuses_non_idempotent_arrows():
    M = pi(rational("0/1"))
    s, d, _, _ = M.arrows[0]
    with pytest.raises(SimplifyError):
        cancel(M, s, d)


def doubled(M):
    """Add a contractible curved pair to M so that reduce has something to do."""
    gens = list(M.gens) + [Gen("zz0", 1, 5), Gen("zz1", 1, 6)]
    arrows = list(M.arrows) + [("zz0", "zz1", Basis("i", 1), ((1,),))]
    arrows += [("zz1", "zz0", b, ((1,),)) for b in M.curvature.terms if b.left == b.right == 1]
    return M.evolve(gens=tuple(gens), arrows=tuple(arrows))


@pytest.mark.parametrize("s", ["0/1", "2/1", "1/3"])
def test_reduce_preserves_mor_ranks(s):
    M = pi(rational(s))
    D = doubled(M)
    assert check_d2(D) and not is_reduced(D)
    R = reduce(D)
    assert is_reduced(R) and R.rank == M.rank
    assert ranks(R) == ranks(M)


FAMILY = [L for _, L in generated_family(max_slope=3, max_n=2, n_random=0)]
MOVABLE = [L for L in FAMILY if clean_up_moves(pi(L))]


@settings(max_examples=15)
@given(st.sampled_from(MOVABLE), st.randoms(use_true_random=False))
def test_clean_up_preserves_d2_and_mor_ranks(L, rnd):
    M = pi(L)
    s, d, h = rnd.choice(clean_up_moves(M))
    N = clean_up(M, s, d, h)
    assert check_d2(N)
    assert ranks(N) == ranks(M)
    assert is_loop_form(to_loop_form(N))


def test_clean_up_rejects_inhomogeneous_maps():
    M = pi(rational("0/1"))
    s, d, b, _ = next(a for a in M.arrows if a[2] == p(4, 1))
    # a map parallel to a differential is off by one in delta
    with pytest.raises(GradingError):
        clean_up(M, s, d, b)


def test_loop_form_is_a_fixed_point():
    M = pi(b_curve(2))
    assert is_loop_form(M) and loop_form_defects(M) == []
    assert to_loop_form(M) == M


def test_decompose_splits_sums():
    from peculiar.complexes import direct_sum
    A, B = pi(rational("0/1")), pi(b_curve(1))
    parts = decompose(direct_sum(A, B))
    assert sorted(P.rank for P in parts) == [A.rank, B.rank]
