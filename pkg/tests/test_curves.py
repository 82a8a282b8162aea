"""Loops, classification, twists and relabellings."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from peculiar import f2
from peculiar.curves import (CurveError, Loop, Slope, as_multicurve, b_curve, canonicalize, classify, d_curve,
                             equal, equal_up_to_shift, lift, mirror, mutate, no_wrapping, pi, rational,
                             recognize, twist)
from peculiar.datasets import even_segment_curve, generated_family, pretzel_2m3
from peculiar.algebra import p
from peculiar.simplify import to_loop_form

# how t1, t2 move the direction vector (q, p) of a slope
SL2 = {"t1": np.array([[1, 1], [0, 1]]), "t2": np.array([[1, 0], [1, 1]])}


def slope_image(s: Slope, word: list[str]) -> Slope:
    v = np.array([s.q, s.p])
    for tok in reversed(word):
        name, _, inv = tok.partition("^")
        m = SL2[name]
        if inv:
            m = np.round(np.linalg.inv(m)).astype(int)
        v = m @ v
    return Slope(int(v[1]), int(v[0]))


def test_classify_examples():
    assert classify(rational("1/2")) == ("rational", Slope(1, 2))
    kind, n, s, pair = classify(b_curve(3))
    assert (kind, n, s) == ("irrational", 3, Slope(0, 1))
    assert classify(d_curve(1))[:2] == ("irrational", 1)
    assert classify(even_segment_curve()) == ("other",)


def test_irrational_period():
    for n in (1, 2, 3):
        assert b_curve(n).n == 4 * n + 2


def test_word_validation():
    with pytest.raises(CurveError):
        Loop(((1, p(2)), (2, p(3))))  # same face twice
    with pytest.raises(CurveError):
        Loop(((1, p(2)),))


def test_rotation_and_reversal_are_canonicalised():
    L = rational("2/5")
    assert canonicalize(L.rotated(3)) == canonicalize(L)
    assert canonicalize(L.reversed()) == canonicalize(L)


def test_reversal_inverts_local_system():
    X = ((0, 1), (1, 1))
    L = rational("0/1", X)
    assert L.reversed().X == f2.inverse(X)
    assert L.reversed().reversed() == L


def test_similar_local_systems_agree():
    X, Y = ((0, 1), (1, 1)), ((1, 1), (1, 0))
    assert equal(rational("1/1", X), rational("1/1", Y))
    assert not equal(rational("1/1", X), rational("1/1", ((1, 0), (0, 1))))


@pytest.mark.parametrize("word,start,end", [("t2", "0/1", "1/1"), ("t1", "1/0", "1/1"),
                                            ("t1^-1", "1/0", "-1/1")])
def test_named_twists(word, start, end):
    assert classify(twist(rational(start), word)) == ("rational", Slope.parse(end))


WORDS = st.lists(st.sampled_from(["t1", "t2", "t1^-1", "t2^-1"]), min_size=1, max_size=4)
SLOPES = st.sampled_from(["0/1", "1/0", "1/1", "1/2", "-2/3", "3/1"])


@given(SLOPES, WORDS)
def test_twists_act_on_slopes_through_sl2(s, word):
    out = classify(twist(rational(s), " ".join(word)))
    assert out == ("rational", slope_image(Slope.parse(s), word))


@given(st.sampled_from([b_curve(1), d_curve(2), rational("2/3")]), st.sampled_from(["t1", "t2"]))
def test_twist_then_inverse(L, w):
    assert equal(twist(twist(L, w), w + "^-1"), L)


@given(SLOPES, st.sampled_from("xyz"))
def test_mutation_keeps_rational_curves_rational(s, axis):
    assert classify(mutate(rational(s), axis))[0] == "rational"


@given(st.sampled_from([b_curve(2), d_curve(1), rational("1/3"), even_segment_curve()]))
def test_mirror_is_an_involution(L):
    assert equal(mirror(mirror(L)), L)


def test_pretzel_components():
    P = pretzel_2m3()
    assert sorted(classify(L) for L in P) == [
        ("irrational", 1, Slope(0, 1), (1, 4)),
        ("irrational", 1, Slope(0, 1), (2, 3)),
        ("rational", Slope(1, 2)),
    ]


def test_lift_of_rational_curve_is_linear():
    w = lift(rational("1/2"))
    d = w.direction
    assert d is not None and Fraction(d[1], d[0]) == Fraction(1, 2)


def test_wrapping_detection():
    assert no_wrapping(b_curve(2))


FAMILY = [L for _, L in generated_family(max_slope=3, max_n=2, n_random=10)]


@given(st.sampled_from(FAMILY))
def test_recognize_inverts_pi(L):
    assert recognize(pi(L)) == canonicalize(as_multicurve(L))
    assert recognize(to_loop_form(pi(L))) == canonicalize(as_multicurve(L))


def test_equal_up_to_shift_finds_the_shift():
    L = b_curve(1)
    g = (Fraction(1), Fraction(0), Fraction(1), Fraction(0), Fraction(0))
    s = equal_up_to_shift(L, L.shifted(g))
    assert s is not None
