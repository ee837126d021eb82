"""Exact rational/modular helpers: plane lattice reduction, CRT, rational reconstruction.

Rationals are plain :class:`fractions.Fraction` values, which already keep
themselves in lowest terms with a positive denominator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

Rat = Fraction

CONFIDENCE_MARGIN = 10


def rat(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"5/12"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("refusing to build an exact rational from a float")
    return Fraction(x)


def fmt_rat(x) -> str:
    x = rat(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ResidueSystem:
    """Residues ``a_i mod p_i`` for pairwise distinct moduli."""

    entries: Tuple[Tuple[int, int], ...]

    def __init__(self, entries: Iterable[Sequence[int]]):
        normed = []
        seen = set()
        for p, a in entries:
            p, a = int(p), int(a)
            if p < 2:
                raise ValueError(f"modulus must be > 1, got {p}")
            if p in seen:
                raise ValueError(f"duplicate prime {p}")
            seen.add(p)
            normed.append((p, a % p))
        object.__setattr__(self, "entries", tuple(normed))

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    @property
    def modulus(self) -> int:
        return math.prod(self.primes)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class PlaneLattice:
    basis: Tuple[Tuple[int, int], Tuple[int, int]]

    def __init__(self, basis):
        (a, b), (c, d) = basis
        u, v = (int(a), int(b)), (int(c), int(d))
        if u[0] * v[1] - u[1] * v[0] == 0:
            raise ValueError("singular lattice")
        object.__setattr__(self, "basis", (u, v))

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.basis
        return a * d - b * c


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def _round_div(num: int, den: int) -> int:
    # nearest integer to num/den, exact
    q, r = divmod(2 * num + den, 2 * den)
    return q


def gauss_reduce(lat: PlaneLattice) -> PlaneLattice:
    """Lagrange-Gauss reduction of a rank-2 integer lattice.

    The first output vector is a shortest nonzero vector; the second is
    shortest among vectors independent of the first.
    """
    u, v = lat.basis
    if _dot(u, u) > _dot(v, v):
        u, v = v, u
    while True:
        m = _round_div(_dot(u, v), _dot(u, u))
        v = (v[0] - m * u[0], v[1] - m * u[1])
        if _dot(v, v) >= _dot(u, u):
            return PlaneLattice((u, v))
        u, v = v, u


def crt_combine(sys: ResidueSystem) -> Tuple[int, int]:
    """Return ``(modulus, residue)`` agreeing with every entry of ``sys``."""
    n, x = 1, 0
    for p, a in sys.entries:
        g = math.gcd(n, p)
        if g != 1:
            raise ValueError(f"moduli {n} and {p} are not coprime")
        # x + n*k = a mod p
        k = ((a - x) * pow(n, -1, p)) % p
        x += n * k
        n *= p
    return n, x % n


def rational_reconstruct(sys: ResidueSystem, margin: int = CONFIDENCE_MARGIN) -> Optional[Fraction]:
    """Guess the fraction ``b/c`` reducing to every ``a_i mod p_i``.

    Builds ``M = {(b, c) : b = c*a_i mod p_i for all i}``, which has basis
    ``(N, 0), (A, 1)`` where ``A`` is the CRT lift and ``N`` the product of
    the moduli, and reads ``b/c`` off its shortest vector.

    Returns ``None`` ("no confident answer") when fewer than two moduli are
    given, when the shortest vector has ``norm^2 > N / 2**margin``, or when
    its ``c`` coordinate is not a unit modulo every ``p_i``.
    """
    if len(sys) < 2:
        return None
    n, a = crt_combine(sys)
    red = gauss_reduce(PlaneLattice(((n, 0), (a, 1))))
    b, c = red.basis[0]
    if c == 0 or math.gcd(c, n) != 1:
        return None
    if (b * b + c * c) << margin > n:
        return None
    return Fraction(b, c)
