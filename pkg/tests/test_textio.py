"""Text formats: printing then parsing is the identity, and errors carry positions."""

import pytest
from hypothesis import given, strategies as st

from peculiar.bimodules import dehn_twist, half_identity
from peculiar.complexes import tensor_V
from peculiar.algebra import Matching
from peculiar.curves import as_multicurve, b_curve, canonicalize, pi, rational
from peculiar.datasets import generated_family, pretzel_2m3
from peculiar.textio import (ParseError, format_bimodule, format_module, format_multicurve, parse_bimodule,
                             parse_module, parse_multicurve, sniff)

FAMILY = [L for _, L in generated_family(max_slope=3, max_n=2, n_random=10, max_dim=3)]


@given(st.sampled_from(FAMILY))
def test_module_round_trip(L):
    M = pi(L)
    assert parse_module(format_module(M)) == M
    assert format_module(parse_module(format_module(M))) == format_module(M)


def test_module_with_matching_and_dimensions():
    M = tensor_V(pi(b_curve(1)).evolve(matching=Matching(((1, 4), (2, 3)))))
    assert parse_module(format_module(M)) == M


@given(st.sampled_from(FAMILY))
def test_multicurve_round_trip(L):
    C = canonicalize(as_multicurve(L))
    assert parse_multicurve(format_multicurve(C)) == C


def test_pretzel_round_trip():
    P = pretzel_2m3()
    assert parse_multicurve(format_multicurve(P)) == P


@pytest.mark.parametrize("B", [dehn_twist(3), dehn_twist(1), half_identity(3, 1)], ids=lambda B: B.name)
def test_bimodule_round_trip(B):
    assert parse_bimodule(format_bimodule(B)) == B


def test_sniff():
    assert sniff(format_module(pi(rational("0/1")))) == "module"
    assert sniff(format_bimodule(dehn_twist())) == "bimodule"
    assert sniff(format_multicurve(as_multicurve(rational("0/1")))) == "curve"


def test_error_positions():
    text = "module full\ncurvature 0\ngen a a 0 [0,0,0,0]\narr a a p9\n"
    with pytest.raises(ParseError) as exc:
        parse_module(text)
    assert exc.value.line == 4
    assert exc.value.col == text.splitlines()[3].index("p9") + 1


def test_bad_loop_segment_is_reported():
    with pytest.raises(ParseError) as exc:
        parse_multicurve("# header\nloop a:p41 c:q99\n")
    assert exc.value.line == 2
