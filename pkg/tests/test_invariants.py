"""Poincaré polynomials, pairing and the symmetry reports."""

import pytest
from hypothesis import given, strategies as st

from peculiar.algebra import Matching
from peculiar.curves import Slope, as_multicurve, b_curve, rational
from peculiar.datasets import pretzel_2m3
from peculiar.invariants import (PoincarePolynomial, V, closures_up_to, conjugation_check, count,
                                 glued_components, mutation_report, pair, parse_poincare, poincare,
                                 stabilize)

M14 = Matching(((1, 4), (2, 3)))
HALVES = st.fractions(min_value=-4, max_value=4, max_denominator=2)
POLYS = st.dictionaries(st.tuples(HALVES, st.tuples(HALVES, HALVES)), st.integers(1, 5), max_size=5).map(
    PoincarePolynomial)


@given(POLYS)
def test_poincare_text_round_trip(P):
    assert parse_poincare(str(P)) == P


@given(POLYS, POLYS, POLYS)
def test_poincare_ring_laws(P, Q, R):
    assert P * (Q + R) == P * Q + P * R
    assert (P * Q).total == P.total * Q.total


def test_V_squared():
    W = V(0) * V(0)
    assert W.terms == {(0, (-2, 0)): 1, (0, (0, 0)): 2, (0, (2, 0)): 1}


def test_parse_rejects_unknown_variables():
    with pytest.raises(ValueError):
        parse_poincare("d s^2 : 1")


def test_counts_of_pretzel_components():
    P = pretzel_2m3()
    assert count(P, rational("1/2"), M14).total == 1
    assert count(P, rational("0/1"), M14).total == 0
    assert count(P, b_curve(1), M14).total == 1


def det(a: Slope, b: Slope) -> int:
    return abs(a.p * b.q - a.q * b.p)


SLOPES = st.tuples(st.integers(-4, 4), st.integers(0, 4)).filter(lambda t: t != (0, 0)).map(lambda t: Slope(*t))


@given(SLOPES, SLOPES)
def test_rational_pairing_counts_intersections(a, b):
    expect = 2 * det(a, b) if a != b else 2
    got = pair(rational(a), rational(b)).mor.total
    assert got == expect
    assert pair(rational(b), rational(a)).mor.total == got


def test_pairing_of_empty_curve_is_zero():
    from peculiar.curves import Multicurve
    assert pair(Multicurve(()), rational("0/1")).mor.total == 0


def test_glued_components_for_trivial_closures():
    assert glued_components(M14, M14) == 2
    assert glued_components(Matching(((1, 2), (3, 4))), Matching(((1, 3), (2, 4)))) == 1


def test_stabilization_multiplies_by_V():
    L = as_multicurve(rational("1/2"))
    base = poincare(L, rational("1/2"), M14)
    S = stabilize(L, (1, 2))
    assert poincare(S, rational("1/2"), M14) == base * V(0) * V(1) * V(1)
    assert stabilize(S, (1, 0)).counts == (2, 2)
    with pytest.raises(ValueError):
        stabilize(L, (-1, 0))


def test_stabilized_pairing_doubles_rank():
    a, b = rational("0/1"), rational("1/0")
    assert pair(stabilize(a, (1, 0)), b).mor.total == 2 * pair(a, b).mor.total


def test_conjugation_report_on_pretzel_is_balanced():
    rep = conjugation_check(pretzel_2m3())
    assert rep.ok
    assert "PASS" in str(rep)


def test_conjugation_report_catches_a_missing_partner():
    rep = conjugation_check(as_multicurve(b_curve(1)))
    assert not rep.ok


def test_mutation_report():
    rep = mutation_report(pretzel_2m3(), closures_up_to(1))
    assert rep.ok and len(rep.rows) == 3 * len(closures_up_to(1))


def test_closures_up_to_one():
    assert [str(s) for s in closures_up_to(1)] == ["-1/1", "0/1", "1/0", "1/1"]
