import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from k3lat.fibrations import (
    NEG_INF,
    FibrationData,
    euler_check,
    format_kodaira_dimension,
    kodaira_dimension,
    plurigenus,
    quotient_canonical_square,
)


@pytest.mark.parametrize(
    "mult, expected",
    [((3, 3), [0, 1, 2, 1, 2, 3]), ((2, 3), [0, 1, 1, 1, 1, 2])],
)
def test_plurigenera_examples(mult, expected):
    fd = FibrationData(1, multiple_fibers=mult)
    assert [plurigenus(fd, n) for n in range(1, 7)] == expected


def test_plurigenus_floor_sum_by_hand():
    # chi=1, m=(3,3), n=5: -5 + 2*floor(10/3) = 1, so P_5 = 2
    assert plurigenus(FibrationData(1, multiple_fibers=(3, 3)), 5) == 2


def test_plurigenus_rejects_nonpositive_index():
    with pytest.raises(ValueError):
        plurigenus(FibrationData(2), 0)


@pytest.mark.parametrize(
    "chi, mult, kd",
    [(2, (), 0), (2, (2,), 1), (1, (), NEG_INF), (1, (2,), NEG_INF), (1, (2, 2), 0), (1, (2, 3), 1), (3, (), 1)],
)
def test_kodaira_dimension(chi, mult, kd):
    assert kodaira_dimension(FibrationData(chi, multiple_fibers=mult)) == kd


def test_format_kodaira_dimension():
    assert format_kodaira_dimension(NEG_INF) == "-inf"
    assert format_kodaira_dimension(1) == "1"


@given(st.integers(1, 3), st.lists(st.integers(2, 7), max_size=4), st.integers(1, 30))
def test_plurigenus_nonnegative_and_monotone_in_multiples(chi, mult, n):
    """P_n is never negative and P_{kn} >= P_n once the canonical degree is nonnegative."""
    fd = FibrationData(chi, multiple_fibers=tuple(mult))
    p = plurigenus(fd, n)
    assert p >= 0
    if fd.canonical_degree >= 0:
        assert plurigenus(fd, 2 * n) >= p


@given(st.integers(1, 3), st.lists(st.integers(2, 7), max_size=4))
def test_kodaira_dimension_matches_growth(chi, mult):
    fd = FibrationData(chi, multiple_fibers=tuple(mult))
    L = math.lcm(1, *mult)
    values = [plurigenus(fd, n) for n in range(1, 6 * L + 1)]
    kd = kodaira_dimension(fd)
    if kd == 1:
        assert values[-1] > values[L - 1]
    elif kd == 0:
        assert max(values) == 1
    else:
        assert max(values) == 0


def test_euler_deficit_and_complete():
    assert str(euler_check(FibrationData(2, "I0*,I0*,I4,I2,I2,I2"))) == "deficit 2"
    res = euler_check(FibrationData(2, "I2*,I1*,I4,I2,I2,I1"), declared_complete=True)
    assert res.total == 24 and res.ok and str(res) == "ok"


def test_euler_mismatch_when_declared_complete():
    res = euler_check(FibrationData(2, "I0*,I0*,I4,I2,I2,I2"), declared_complete=True)
    assert not res.ok
    assert "mismatch" in str(res)


def test_euler_overfull():
    with pytest.raises(ValueError, match="overfull"):
        euler_check(FibrationData(1, "II*,II*"))


def test_json_round_trip():
    fd = FibrationData(2, "I3,I2x10,I1", (2,))
    assert FibrationData.from_json(fd.to_json()) == fd
    assert fd.canonical_degree == Fraction(1, 2)


def test_invalid_multiplicity():
    with pytest.raises(ValueError):
        FibrationData(1, multiple_fibers=(1,))


@pytest.mark.parametrize("ks2, expected", [(4, 2), (2, 1), (0, 0)])
def test_quotient_canonical_square_exact(ks2, expected):
    assert quotient_canonical_square(ks2, True).exact == expected


def test_quotient_canonical_square_bound_and_parity():
    q = quotient_canonical_square(3, False)
    assert q.exact is None and q.bound == Fraction(3, 2)
    assert str(q) == "K_T^2 < 3/2"
    with pytest.raises(ValueError):
        quotient_canonical_square(3, True)


@given(st.integers(1, 3), st.lists(st.integers(2, 6), max_size=3), st.integers(1, 20))
def test_plurigenera_grow_linearly_with_period(chi, mult, n):
    fd = FibrationData(chi, multiple_fibers=tuple(mult))
    L = math.lcm(1, *mult)
    if fd.canonical_degree >= 0:
        big = n + 5 * L
        assert plurigenus(fd, big + L) - plurigenus(fd, big) == L * fd.canonical_degree


@given(st.integers(1, 30))
def test_k3_plurigenera_are_one(n):
    assert plurigenus(FibrationData(2), n) == 1


@given(st.lists(st.sampled_from(["I1", "I2", "I3", "I0*", "IV*", "II"]), max_size=8))
def test_euler_deficit_nonnegative_or_error(tokens):
    fd = FibrationData(2, ",".join(tokens))
    try:
        res = euler_check(fd)
    except ValueError:
        return
    assert res.deficit >= 0
