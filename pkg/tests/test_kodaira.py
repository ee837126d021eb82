import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from k3lat.kodaira import (
    FiberInstance,
    component_group_order,
    contribution,
    euler_number,
    fiber_from_root,
    format_fibers,
    pair_contribution,
    parse_fiber,
    parse_fibers,
    parse_frame,
)

import oracles

ALL_FIBERS = (
    [FiberInstance("I", n) for n in range(0, 10)]
    + [FiberInstance("I*", n) for n in range(0, 6)]
    + [FiberInstance(k) for k in ("II", "III", "IV", "IV*", "III*", "II*")]
)


@pytest.mark.parametrize(
    "tok, euler, order",
    [("I0", 0, 1), ("I1", 1, 1), ("I6", 6, 6), ("I0*", 6, 4), ("I4*", 10, 4), ("II", 2, 1), ("III", 3, 2),
     ("IV", 4, 3), ("IV*", 8, 3), ("III*", 9, 2), ("II*", 10, 1)],
)
def test_tables(tok, euler, order):
    f = parse_fiber(tok)
    assert euler_number(f) == euler
    assert component_group_order(f) == order


def test_parse_multiplicities_and_round_trip():
    fibers = parse_fibers("I2*x2, I2x4")
    assert len(fibers) == 6
    assert format_fibers(fibers) == "I2*,I2*,I2,I2,I2,I2"
    assert parse_fibers(format_fibers(fibers)) == fibers
    assert parse_fibers("") == []


@pytest.mark.parametrize("bad", ["I", "Q3", "I2**", "IV*x"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_fibers(bad)


def test_parse_frame():
    frame = parse_frame("A7+8A1")
    assert frame[0] == FiberInstance("I", 8)
    assert frame[1:] == [FiberInstance("I", 2)] * 8
    assert parse_frame("D6+E7") == [FiberInstance("I*", 2), FiberInstance("III*")]
    assert fiber_from_root("E6") == FiberInstance("IV*")
    with pytest.raises(ValueError):
        fiber_from_root("D3")


def test_invalid_component_labels():
    with pytest.raises(ValueError, match="invalid component"):
        FiberInstance("I", 4).label(4)
    with pytest.raises(ValueError, match="invalid component"):
        FiberInstance("I*", 1).label("nowhere")
    assert FiberInstance("I*", 1).label("far") == "far1"


@pytest.mark.parametrize("f", ALL_FIBERS, ids=str)
def test_component_group_is_a_group(f):
    labels = f.labels
    assert len(labels) == component_group_order(f)
    for a, b, c in itertools.product(labels, repeat=3):
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
    for a in labels:
        assert f.add(a, f.zero) == a
        assert f.add(a, f.neg(a)) == f.zero
        assert component_group_order(f) % f.order_of(a) == 0


@pytest.mark.parametrize("n, cyclic", [(0, False), (1, True), (2, False), (3, True)])
def test_star_group_shape(n, cyclic):
    f = FiberInstance("I*", n)
    has_order_four = any(f.order_of(c) == 4 for c in f.labels)
    assert has_order_four is cyclic


@pytest.mark.parametrize("f", [x for x in ALL_FIBERS if x.root_type], ids=str)
def test_local_terms_are_inverse_cartan_entries(f):
    inv = oracles.cartan_inverse(f.root_type)
    simple = [c for c in f.labels if c != f.zero]
    for a, b in itertools.product(simple, repeat=2):
        i = oracles.simple_node(f.kind, f.n, a)
        j = oracles.simple_node(f.kind, f.n, b)
        assert pair_contribution(f, a, b) == Fraction(int(inv[i, j].p), int(inv[i, j].q))


@pytest.mark.parametrize(
    "tok, comp, value",
    [("I8", 4, Fraction(2)), ("I2", 1, Fraction(1, 2)), ("I4*", "far1", Fraction(2)), ("I0*", "near", Fraction(1)),
     ("IV*", 1, Fraction(4, 3)), ("III*", 1, Fraction(3, 2)), ("I3", 0, Fraction(0))],
)
def test_contribution_values(tok, comp, value):
    assert contribution(parse_fiber(tok), comp) == value


def test_star_far_far_distinct():
    for n in range(6):
        assert pair_contribution(FiberInstance("I*", n), "far1", "far2") == Fraction(n + 2, 4)


def test_canonical_collapses_symmetric_labels():
    assert FiberInstance("I", 6).canonical(5) == 1
    assert FiberInstance("I*", 2).canonical("far2") == "far1"
    assert FiberInstance("I*", 0).canonical("far2") == "near"


def test_additive_types_take_no_index():
    with pytest.raises(ValueError):
        FiberInstance("IV", 2)


def _exponent(f):
    return max(f.order_of(c) for c in f.labels)


@given(st.sampled_from(ALL_FIBERS), st.data())
def test_contribution_bounds_and_denominators(f, data):
    """Local terms sit in [0, 2 + n/4] with denominator dividing 4 times the group exponent."""
    c1 = data.draw(st.sampled_from(f.labels))
    c2 = data.draw(st.sampled_from(f.labels))
    v = pair_contribution(f, c1, c2)
    assert 0 <= v <= 2 + Fraction(f.n, 4)
    assert (4 * _exponent(f)) % v.denominator == 0
    assert v == pair_contribution(f, c2, c1)
    assert contribution(f, c1) == pair_contribution(f, c1, c1)


@given(st.integers(1, 30), st.data())
def test_i_n_contribution_symmetric(n, data):
    f = FiberInstance("I", n)
    a = data.draw(st.integers(0, n - 1))
    assert contribution(f, a) == contribution(f, (n - a) % n)
