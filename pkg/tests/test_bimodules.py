"""The Dehn twist and half identity bimodules."""

import pytest

from peculiar.algebra import cyclic
from peculiar.bimodules import (MissingTranscription, SEGMENTS_AT_C, conjugation_bimodule, dehn_twist,
                                half_identity, segment_action, twist_module)
from peculiar.complexes import validate_ad
from peculiar.curves import b_curve, classify, half_twist, pi, rational, recognize, equal_up_to_shift

# Box products with elementary segments at c, copied from the hand computation.
# Arrows are (source, label, target) on D-side idempotents; labels are written
# with indices in drawing order, i.e. reversed relative to this library.
BY_HAND = {
    ("b", "p3"): [("B", "1", "B"), ("B", "q3", "C"), ("D", "p4", "C")],
    ("a", "p32"): [("B", "p2", "A"), ("B", "q3", "C"), ("D", "p4", "C")],
    ("d", "p321"): [("B", "p21", "D"), ("B", "q3", "C"), ("D", "p4", "C")],
    ("d", "q4"): [("D", "1", "D"), ("D", "p4", "C"), ("B", "q3", "C")],
    ("a", "q41"): [("D", "q1", "A"), ("D", "p4", "C"), ("B", "q3", "C")],
    ("b", "q412"): [("D", "q12", "B"), ("D", "p4", "C"), ("B", "q3", "C")],
}


def flip(label: str) -> str:
    return label if label == "1" else label[0] + label[1:][::-1]


@pytest.mark.parametrize("key", sorted(BY_HAND))
def test_segment_action_matches_hand_computation(key):
    target, drawn = key
    got = segment_action(target, flip(drawn))
    got = sorted((s[1], lab, d[1]) for s, lab, d in got)
    want = sorted((s, flip(lab), d) for s, lab, d in BY_HAND[key])
    assert got == want


def test_segments_cover_all_six_arrows_at_c():
    assert sorted(SEGMENTS_AT_C) == sorted((t, flip(lab)) for t, lab in BY_HAND)


@pytest.mark.parametrize("arc", [1, 2, 3, 4])
def test_twists_satisfy_ad_relations(arc):
    assert validate_ad(dehn_twist(arc), 3) == []


@pytest.mark.parametrize("ij", [(3, 1), (4, 2), (1, 3), (2, 4)])
def test_half_identities_satisfy_ad_relations(ij):
    assert validate_ad(half_identity(*ij), 3) == []


def test_half_identity_needs_opposite_arcs():
    with pytest.raises(ValueError):
        half_identity(1, 2)


def test_relabelled_twists_have_the_same_shape():
    ref = dehn_twist(3)
    for arc in (1, 2, 4):
        B = dehn_twist(arc)
        assert len(B.gens) == len(ref.gens) and len(B.actions) == len(ref.actions)
        assert B.a_alg == cyclic(arc - 3).image_alg(ref.a_alg)


def test_twist_on_a_single_curve():
    L = rational("1/2")
    out = recognize(twist_module(pi(L), 3))
    assert equal_up_to_shift(out, half_twist(L, 3)) is not None


@pytest.mark.parametrize("arc", [1, 2, 3, 4])
def test_twist_keeps_irrational_type(arc):
    out = recognize(twist_module(pi(b_curve(1)), arc))
    assert classify(out.loops[0])[:2] == ("irrational", 1)


def test_conjugation_is_unavailable():
    with pytest.raises(MissingTranscription):
        conjugation_bimodule()
