"""Global checks on genus-1 fibrations over the projective line.

Euler-number bookkeeping, plurigenera from the canonical bundle formula
with multiple fibres, Kodaira dimension, and the canonical square of the
quotient by an involution.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .kodaira import FiberInstance, euler_number, format_fibers, parse_fibers

NEG_INF = -math.inf


@dataclass(frozen=True)
class FibrationData:
    chi: int
    fibers: Tuple[FiberInstance, ...] = ()
    multiple_fibers: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.chi < 1:
            raise ValueError("chi must be positive")
        fibers = self.fibers
        if isinstance(fibers, str):
            fibers = parse_fibers(fibers)
        object.__setattr__(self, "fibers", tuple(fibers))
        mult = tuple(int(m) for m in self.multiple_fibers)
        if any(m < 2 for m in mult):
            raise ValueError("multiple-fibre multiplicities must be >= 2")
        object.__setattr__(self, "multiple_fibers", mult)

    @classmethod
    def from_json(cls, data) -> "FibrationData":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data.get("chi", 2)), data.get("fibers", ""), tuple(data.get("multiple", ())))

    def to_json(self) -> dict:
        return {"chi": self.chi, "fibers": format_fibers(self.fibers), "multiple": list(self.multiple_fibers)}

    @property
    def canonical_degree(self) -> Fraction:
        """Degree of the Q-divisor ``chi - 2 + sum (m-1)/m`` on the base."""
        return self.chi - 2 + sum((Fraction(m - 1, m) for m in self.multiple_fibers), Fraction(0))


@dataclass(frozen=True)
class EulerResult:
    total: int
    expected: int
    complete: bool

    @property
    def deficit(self) -> int:
        return self.expected - self.total

    @property
    def ok(self) -> bool:
        return self.deficit == 0 if self.complete else True

    def __str__(self):
        if self.complete:
            return "ok" if self.ok else f"mismatch: sum {self.total} != {self.expected}"
        return "ok" if self.deficit == 0 else f"deficit {self.deficit}"


def euler_check(fd: FibrationData, declared_complete: bool = False) -> EulerResult:
    """Compare the fibre Euler numbers with ``12 chi``.

    For an incomplete list the deficit is the number of ``I_1`` fibres
    still missing.
    """
    total = sum(euler_number(f) for f in fd.fibers)
    expected = 12 * fd.chi
    if total > expected:
        raise ValueError(f"overfull configuration: Euler sum {total} > {expected}")
    return EulerResult(total, expected, declared_complete)


def plurigenus(fd: FibrationData, n: int) -> int:
    """``h^0(nK)`` from ``nK = n(chi-2)F + sum n(m_i - 1)F_i``."""
    if n <= 0:
        raise ValueError("plurigenus index must be positive")
    deg = n * (fd.chi - 2) + sum(n * (m - 1) // m for m in fd.multiple_fibers)
    return max(0, deg + 1)


def probe_bound(fd: FibrationData) -> int:
    return 12 * math.lcm(1, *fd.multiple_fibers)


def kodaira_dimension(fd: FibrationData) -> Union[int, float]:
    """Returns ``-inf``, 0 or 1.

    Positive canonical degree gives linear growth (1).  Otherwise
    plurigenera are probed for ``n <= 12 * lcm(m_i)``: all zero means
    ``-inf``, bounded by one means 0.
    """
    if fd.canonical_degree > 0:
        return 1
    values = [plurigenus(fd, n) for n in range(1, probe_bound(fd) + 1)]
    if not any(values):
        return NEG_INF
    return 0


def format_kodaira_dimension(kd) -> str:
    return "-inf" if kd == NEG_INF else str(kd)


@dataclass(frozen=True)
class QuotientK2:
    exact: Optional[int]
    bound: Optional[Fraction] = None

    def __str__(self):
        if self.exact is not None:
            return str(self.exact)
        b = self.bound
        b = str(b.numerator) if b.denominator == 1 else f"{b.numerator}/{b.denominator}"
        return f"K_T^2 < {b}"


def quotient_canonical_square(ks2: int, fixed_points_canonical: bool) -> QuotientK2:
    """Canonical square of ``T = S/involution`` given ``K_S^2``.

    When the fixed points impose no correction on the canonical class, it
    is a pullback along a degree-2 map, so its square halves exactly.
    Otherwise only the strict upper bound ``K_T^2 < K_S^2 / 2`` is returned.
    """
    ks2 = int(ks2)
    if fixed_points_canonical:
        if ks2 % 2:
            raise ValueError("K_S^2 must be even when the fixed points are canonical")
        return QuotientK2(ks2 // 2)
    return QuotientK2(None, Fraction(ks2, 2))
