from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from peculiar.gradings import DIAG, Lattice, fmt_alex, parse_alex, vadd, vsub

half = st.integers(-8, 8).map(lambda k: Fraction(k, 2))
vec5 = st.tuples(*[half] * 5)
relations = st.lists(st.tuples(*[st.integers(-2, 2)] * 5), max_size=2)


@given(relations, vec5, vec5)
def test_reduce_is_a_class_function(rels, v, w):
    lat = Lattice.of(rels)
    r = lat.reduce(v)
    assert lat.reduce(r) == r
    for rel in list(rels) + [DIAG]:
        assert lat.reduce(vadd(v, rel)) == r
        assert lat.reduce(vsub(v, [3 * x for x in rel])) == r
    # differences of representatives lie in the lattice exactly when the classes agree
    assert lat.equal(v, w) == lat.contains(vsub(v, w))


def test_trivial_lattice_only_kills_the_diagonal():
    lat = Lattice()
    assert lat.equal((0, 1, 1, 1, 1), (0, 0, 0, 0, 0))
    assert not lat.equal((1, 0, 0, 0, 0), (0, 0, 0, 0, 0))
    assert lat.reduce((0, 3, 2, 5, 2)) == (0, 1, 0, 3, 0)


def test_equal_lattices_compare_equal():
    a = Lattice.of([(0, 2, 0, 0, 2), (0, 0, 2, 2, 0)])
    b = Lattice.of([(0, 2, 2, 2, 2), (0, 0, 2, 2, 0)])
    assert a == b


def test_non_half_integral_rejected():
    with pytest.raises(ValueError):
        Lattice().reduce((Fraction(1, 3), 0, 0, 0, 0))


def test_alex_text():
    v = (Fraction(1, 2), 0, -1, 2)
    assert parse_alex(fmt_alex(v)) == tuple(Fraction(x) for x in v)
