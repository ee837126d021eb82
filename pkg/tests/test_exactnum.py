import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import prime

from k3lat.exactnum import (
    CONFIDENCE_MARGIN,
    PlaneLattice,
    ResidueSystem,
    crt_combine,
    fmt_rat,
    gauss_reduce,
    rat,
    rational_reconstruct,
)

import oracles


def norm(v):
    return v[0] ** 2 + v[1] ** 2


def test_rat_and_format():
    assert rat("5/12") == Fraction(5, 12)
    assert rat(Fraction(-4, 6)) == Fraction(-2, 3)
    assert fmt_rat(Fraction(96)) == "96"
    assert fmt_rat(Fraction(-2, 4)) == "-1/2"
    with pytest.raises(TypeError):
        rat(0.5)


def test_residue_system_normalizes_and_rejects_duplicates():
    sys_ = ResidueSystem([(5, -1), (7, 10)])
    assert sys_.entries == ((5, 4), (7, 3))
    with pytest.raises(ValueError, match="duplicate prime 5"):
        ResidueSystem([(5, 1), (5, 2)])
    with pytest.raises(ValueError):
        ResidueSystem([(1, 0)])


def test_singular_plane_lattice():
    with pytest.raises(ValueError, match="singular lattice"):
        PlaneLattice(((1, 2), (2, 4)))


def test_gauss_reduce_identity():
    red = gauss_reduce(PlaneLattice(((1, 0), (0, 1))))
    assert sorted(map(norm, red.basis)) == [1, 1]


def test_gauss_reduce_matches_brute_force_shortest():
    # oracle: (5,0),(3,1) has minimum norm 5, attained by (-2,1) and (1,2) up to sign
    n, w = oracles.shortest_vector_brute((5, 0), (3, 1))
    assert (n, abs(w[0]), abs(w[1])) == (5, 2, 1)
    red = gauss_reduce(PlaneLattice(((5, 0), (3, 1))))
    assert norm(red.basis[0]) == n
    assert sorted(map(norm, red.basis)) == [5, 5]


def test_gauss_reduce_difference_of_generators():
    red = gauss_reduce(PlaneLattice(((100, 1), (99, 1))))
    assert (1, 0) in red.basis or (-1, 0) in red.basis


def _in_lattice(v, basis):
    (a, b), (c, d) = basis
    det = a * d - b * c
    x = v[0] * d - v[1] * c
    y = -v[0] * b + v[1] * a
    return x % det == 0 and y % det == 0


@given(st.tuples(*[st.integers(-200, 200)] * 4))
def test_gauss_reduce_same_lattice_and_minimal(vals):
    a, b, c, d = vals
    if a * d - b * c == 0:
        return
    lat = PlaneLattice(((a, b), (c, d)))
    red = gauss_reduce(lat)
    assert abs(red.det) == abs(lat.det)
    for v in lat.basis:
        assert _in_lattice(v, red.basis)
    u, w = red.basis
    # reduced: |2 u.w| <= |u|^2 <= |w|^2
    assert norm(u) <= norm(w)
    assert abs(2 * (u[0] * w[0] + u[1] * w[1])) <= norm(u)


@pytest.mark.parametrize(
    "entries, expected",
    [([(3, 2), (5, 3)], (15, 8)), ([(7, 0)], (7, 0)), ([(3, 1), (5, 1), (7, 1)], (105, 1))],
)
def test_crt_examples(entries, expected):
    assert crt_combine(ResidueSystem(entries)) == expected


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23]), min_size=1, max_size=6, unique=True), st.data())
def test_crt_recovers_residues(primes, data):
    entries = [(p, data.draw(st.integers(0, p - 1))) for p in primes]
    n, x = crt_combine(ResidueSystem(entries))
    assert n == math.prod(primes)
    assert all(x % p == a for p, a in entries)


def test_reconstruct_constant_residues_with_explicit_margin():
    # 7 has norm^2 50; with two primes near 100 the default margin is too strict
    sys_ = ResidueSystem([(101, 7), (103, 7)])
    assert rational_reconstruct(sys_) is None
    assert rational_reconstruct(sys_, margin=4) == 7


def test_reconstruct_one_half_matches_oracle():
    entries = [(5, 3), (7, 4), (11, 6), (13, 7), (17, 9)]
    assert oracles.fractions_matching(entries) == {Fraction(1, 2)}
    assert rational_reconstruct(ResidueSystem(entries)) == Fraction(1, 2)


def test_reconstruct_inconsistent_residues_gives_no_answer():
    entries = [(5, 3), (7, 5), (11, 6), (13, 7), (17, 9)]
    assert oracles.fractions_matching(entries) == set()
    assert rational_reconstruct(ResidueSystem(entries)) is None


def test_single_prime_never_confident():
    assert rational_reconstruct(ResidueSystem([(5, 2)])) is None
    assert rational_reconstruct(ResidueSystem([(10007, 1)])) is None


def test_margin_is_tunable():
    entries = [(1009, 1), (1013, 1)]
    assert rational_reconstruct(ResidueSystem(entries), margin=0) == 1
    assert rational_reconstruct(ResidueSystem(entries), margin=40) is None


def test_default_margin_value():
    assert CONFIDENCE_MARGIN == 10


@settings(max_examples=200)
@given(st.integers(-300, 300), st.integers(1, 300), st.lists(st.integers(30, 200), min_size=3, max_size=5, unique=True))
def test_planted_fraction_recovered(b, c, idx):
    primes = [prime(i) for i in idx]
    n = math.prod(primes)
    if math.gcd(c, n) != 1:
        return
    f = Fraction(b, c)
    if (f.numerator ** 2 + f.denominator ** 2) << CONFIDENCE_MARGIN > n:
        return
    entries = [(p, f.numerator * pow(f.denominator, -1, p) % p) for p in primes]
    assert rational_reconstruct(ResidueSystem(entries)) == f


def test_random_planted_batch_small():
    rng = random.Random(7)
    primes = [1009, 1013, 1019, 1021, 1031]
    for _ in range(50):
        f = Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000))
        entries = [(p, f.numerator * pow(f.denominator, -1, p) % p) for p in primes]
        assert rational_reconstruct(ResidueSystem(entries)) == f
