"""Singular points of projective schemes over small prime fields.

Points are enumerated over F_p by brute force on normalized
representatives (first nonzero coordinate 1), singularity is the rank drop
of the Jacobian matrix, and matching singular points across primes are
lifted to rational candidates by CRT and lattice reconstruction.  Every
candidate is then checked exactly over the rationals.
"""
from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import isprime

from .exactnum import CONFIDENCE_MARGIN, ResidueSystem, fmt_rat, rational_reconstruct

Poly = Dict[Tuple[int, ...], int]

DEFAULT_BUDGET = 10**8
CHUNK = 1 << 18
_PREFERRED = ("x", "y", "z", "w")


def _var_key(name: str):
    m = re.fullmatch(r"([A-Za-z_]+)(\d+)", name)
    if m:
        return (1, m.group(1), int(m.group(2)))
    if name in _PREFERRED:
        return (0, _PREFERRED.index(name), 0)
    return (2, name, 0)


def parse_polys(texts: Sequence[str], variables: Optional[Sequence[str]] = None) -> Tuple[List[str], List[Poly]]:
    """Parse polynomial strings (``^`` allowed for powers) into exponent dictionaries.

    Variables default to those occurring, ordered ``x, y, z, w`` first and
    indexed names such as ``x0, x1`` numerically.
    """
    exprs = [sympy.sympify(t.replace("^", "**")) for t in texts]
    if variables is None:
        names = sorted({str(s) for e in exprs for s in e.free_symbols}, key=_var_key)
    else:
        names = list(variables)
    syms = sympy.symbols(names) if names else ()
    if len(names) == 1:
        syms = (syms,)
    polys = []
    for t, e in zip(texts, exprs):
        extra = {str(s) for s in e.free_symbols} - set(names)
        if extra:
            raise ValueError(f"unknown variables {sorted(extra)} in {t!r}")
        p = sympy.Poly(e, *syms) if syms else sympy.Poly(e, sympy.Symbol("_unused"))
        poly: Poly = {}
        for mon, c in p.terms():
            if not c.is_integer:
                raise ValueError(f"non-integer coefficient {c} in {t!r}")
            mon = tuple(mon) if syms else ()
            poly[mon] = int(c)
        polys.append(poly)
    return names, polys


def format_poly(poly: Poly, names: Sequence[str]) -> str:
    if not poly:
        return "0"
    terms = []
    for mon, c in sorted(poly.items(), reverse=True):
        vars_ = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, mon) if e)
        terms.append(f"{c}*{vars_}" if vars_ else str(c))
    return " + ".join(terms)


@dataclass(frozen=True)
class ProjScheme:
    num_vars: int
    polys: Tuple[Tuple[Tuple[Tuple[int, ...], int], ...], ...]
    declared_dim: int
    names: Tuple[str, ...] = ()

    def __init__(self, num_vars: int, polys: Iterable[Poly], declared_dim: int, names: Sequence[str] = ()):
        if num_vars < 2:
            raise ValueError("need at least 2 homogeneous coordinates")
        if not 0 <= declared_dim < num_vars - 1:
            raise ValueError("declared dimension must satisfy 0 <= dim < num_vars - 1")
        frozen = []
        for poly in polys:
            items = tuple(sorted((tuple(m), int(c)) for m, c in dict(poly).items() if c))
            degrees = {sum(m) for m, _ in items}
            if any(len(m) != num_vars for m, _ in items):
                raise ValueError("monomial length does not match the number of variables")
            if len(degrees) > 1:
                raise ValueError("polynomials must be homogeneous")
            frozen.append(items)
        names = tuple(names) or tuple(f"x{i}" for i in range(num_vars))
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "polys", tuple(frozen))
        object.__setattr__(self, "declared_dim", declared_dim)
        object.__setattr__(self, "names", names)

    @classmethod
    def from_strings(cls, texts: Sequence[str], declared_dim: int, variables: Optional[Sequence[str]] = None,
                     num_vars: Optional[int] = None) -> "ProjScheme":
        names, polys = parse_polys(texts, variables)
        if num_vars is not None and num_vars != len(names):
            if num_vars < len(names):
                raise ValueError("num_vars is smaller than the number of variables used")
            pad = num_vars - len(names)
            fresh = (f"x{i}" for i in range(num_vars + len(names)) if f"x{i}" not in names)
            names = list(names) + [next(fresh) for _ in range(pad)]
            polys = [{m + (0,) * pad: c for m, c in p.items()} for p in polys]
        if not names:
            raise ValueError("give num_vars for a polynomial list without variables")
        polys = [{m if m else (0,) * len(names): c for m, c in p.items()} for p in polys]
        return cls(len(names), polys, declared_dim, names)

    @property
    def codim(self) -> int:
        return self.num_vars - 1 - self.declared_dim

    def partials(self) -> List[List[Tuple[Tuple[Tuple[int, ...], int], ...]]]:
        out = []
        for poly in self.polys:
            row = []
            for j in range(self.num_vars):
                d = []
                for m, c in poly:
                    if m[j]:
                        mm = list(m)
                        mm[j] -= 1
                        d.append((tuple(mm), c * m[j]))
                row.append(tuple(d))
            out.append(row)
        return out


@dataclass(frozen=True, order=True)
class ModPoint:
    prime: int
    coords: Tuple[int, ...]

    def __str__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"


# --- evaluation --------------------------------------------------------------

def _eval_mod(poly, coords: np.ndarray, p: int) -> np.ndarray:
    """Evaluate a polynomial at many points at once (coords has shape (n, m))."""
    n, m = coords.shape
    acc = np.zeros(m, dtype=np.int64)
    for mon, c in poly:
        term = np.full(m, c % p, dtype=np.int64)
        for j, e in enumerate(mon):
            for _ in range(e):
                term = (term * coords[j]) % p
        acc = (acc + term) % p
    return acc


def _eval_point_mod(poly, pt: Sequence[int], p: int) -> int:
    total = 0
    for mon, c in poly:
        term = c
        for x, e in zip(pt, mon):
            term = term * pow(x, e, p) % p
        total += term
    return total % p


def _rank_mod(rows: List[List[int]], p: int) -> int:
    a = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(a[0]) if a else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], -1, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for r in range(len(a)):
            if r != rank and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def _rank_exact(rows: List[List[Fraction]]) -> int:
    a = [list(r) for r in rows]
    rank, ncols = 0, len(a[0]) if a else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rank + 1, len(a)):
            if a[r][col]:
                f = a[r][col] / a[rank][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def _check_prime(S: ProjScheme, p: int, budget: int):
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if p ** S.num_vars > budget:
        raise ValueError(f"enumeration too large: {p}^{S.num_vars} exceeds budget {budget}")


def enumerate_points(S: ProjScheme, p: int, budget: int = DEFAULT_BUDGET) -> List[ModPoint]:
    """All F_p-points of ``S`` as normalized representatives, sorted lexicographically."""
    _check_prime(S, p, budget)
    n = S.num_vars
    found: List[Tuple[int, ...]] = []
    for k in range(n):
        free = n - k - 1
        total = p**free
        for start in range(0, total, CHUNK):
            idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
            coords = np.zeros((n, idx.size), dtype=np.int64)
            coords[k] = 1
            rest = idx
            for j in range(n - 1, k, -1):
                coords[j] = rest % p
                rest = rest // p
            mask = np.ones(idx.size, dtype=bool)
            for poly in S.polys:
                mask &= _eval_mod(poly, coords, p) == 0
            for col in np.nonzero(mask)[0]:
                found.append(tuple(int(x) for x in coords[:, col]))
    found.sort()
    return [ModPoint(p, c) for c in found]


def is_singular_mod(S: ProjScheme, pt: Sequence[int], p: int, partials=None) -> bool:
    partials = partials if partials is not None else S.partials()
    rows = [[_eval_point_mod(d, pt, p) for d in row] for row in partials]
    return (_rank_mod(rows, p) if rows else 0) < S.codim


def singular_points(S: ProjScheme, p: int, budget: int = DEFAULT_BUDGET) -> List[ModPoint]:
    """Points where the Jacobian matrix has rank below the codimension."""
    partials = S.partials()
    out = [pt for pt in enumerate_points(S, p, budget) if is_singular_mod(S, pt.coords, p, partials)]
    for pt in out:
        assert all(_eval_point_mod(poly, pt.coords, p) == 0 for poly in S.polys)
    return out


def count_points_sequence(S: ProjScheme, primes: Sequence[int], budget: int = DEFAULT_BUDGET) -> List[Tuple[int, int]]:
    results = _map_primes(lambda p: len(enumerate_points(S, p, budget)), primes)
    return list(zip(primes, results))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("K3LAT_THREADS", "1")))
    except ValueError:
        return 1


def _map_primes(fn, primes: Sequence[int]) -> list:
    # results are returned in input order whatever the thread count
    workers = min(_threads(), max(1, len(primes)))
    if workers == 1:
        return [fn(p) for p in primes]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, primes))


# --- exact checks ------------------------------------------------------------

def _eval_exact(poly, pt: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for mon, c in poly:
        term = Fraction(c)
        for x, e in zip(pt, mon):
            term *= x**e
        total += term
    return total


def on_scheme(S: ProjScheme, pt: Sequence[Fraction]) -> bool:
    return all(_eval_exact(poly, pt) == 0 for poly in S.polys)


def is_singular_exact(S: ProjScheme, pt: Sequence[Fraction]) -> bool:
    rows = [[_eval_exact(d, pt) for d in row] for row in S.partials()]
    return (_rank_exact(rows) if rows else 0) < S.codim


# --- collation ---------------------------------------------------------------

@dataclass
class Candidate:
    point: Optional[Tuple[Fraction, ...]]
    verified: bool
    primes: Tuple[int, ...]
    note: str = ""
    split: Dict[str, Tuple[int, ...]] = field(default_factory=dict)

    def point_str(self) -> str:
        if self.point is None:
            return "-"
        return "(" + " : ".join(fmt_rat(x) for x in self.point) + ")"

    def to_json(self) -> dict:
        return {
            "point": None if self.point is None else [fmt_rat(x) for x in self.point],
            "verified": self.verified,
            "primes": list(self.primes),
            "note": self.note,
            "split": {k: list(v) for k, v in self.split.items()},
        }


def _zero_pattern(pt: ModPoint) -> Tuple[bool, ...]:
    return tuple(c == 0 for c in pt.coords)


def _reconstruct_family(S: ProjScheme, fam: Dict[int, ModPoint], margin: int) -> Candidate:
    primes = tuple(sorted(fam))
    n = S.num_vars
    common = [i for i in range(n) if all(fam[p].coords[i] for p in primes)]
    if not common:
        return Candidate(None, False, primes, "no coordinate is nonzero at every prime")
    i = common[-1]
    point = []
    for j in range(n):
        if j == i:
            point.append(Fraction(1))  # dehomogenizing coordinate, exact by construction
            continue
        entries = []
        for p in primes:
            c = fam[p].coords
            entries.append((p, c[j] * pow(c[i], -1, p) % p))
        if all(a == 0 for _, a in entries):
            point.append(Fraction(0))
            continue
        val = rational_reconstruct(ResidueSystem(entries), margin)
        if val is None:
            return Candidate(None, False, primes, f"no confident answer for coordinate {S.names[j]}")
        point.append(val)
    point = tuple(point)
    ok = on_scheme(S, point) and is_singular_exact(S, point)
    return Candidate(point, ok, primes, "verified" if ok else "candidate fails the exact check")


def collate_and_reconstruct(
    S: ProjScheme,
    runs: Sequence[Tuple[int, Sequence]],
    strategy: str = "unique",
    margin: int = CONFIDENCE_MARGIN,
) -> List[Candidate]:
    """Match singular points across primes and lift them to rational points.

    ``strategy="unique"`` treats all singular points at a prime as one
    family; ``"coordinate_zero_pattern"`` groups them by which coordinates
    vanish.  A family with exactly one point at every prime is
    reconstructed.  A family whose point count varies with the prime is
    reported as likely defined over a quadratic field, with the prime
    split.  Several points at every prime cannot be matched and raise.
    """
    if strategy not in ("unique", "coordinate_zero_pattern"):
        raise ValueError(f"unknown matching strategy {strategy!r}")
    runs = sorted((int(p), [pt if isinstance(pt, ModPoint) else ModPoint(int(p), tuple(pt)) for pt in pts]) for p, pts in runs)
    primes = [p for p, _ in runs]
    if len(set(primes)) != len(primes):
        raise ValueError("duplicate prime in runs")
    if len(primes) < 2:
        raise ValueError("need singular-point data for at least 2 primes")
    families: Dict[Tuple, Dict[int, List[ModPoint]]] = {}
    for p, pts in runs:
        for pt in pts:
            key = () if strategy == "unique" else _zero_pattern(pt)
            families.setdefault(key, {}).setdefault(p, []).append(pt)
    out: List[Candidate] = []
    ambiguous = []
    for key in sorted(families):
        fam = families[key]
        counts = {p: len(fam.get(p, [])) for p in primes}
        if len(set(counts.values())) > 1:
            split = {}
            for p, c in counts.items():
                split.setdefault(f"{c} point(s)", []).append(p)
            out.append(Candidate(None, False, tuple(p for p in primes if counts[p]),
                                 "likely quadratic field of definition",
                                 {k: tuple(v) for k, v in sorted(split.items())}))
            continue
        k = next(iter(counts.values()))
        if k == 1:
            out.append(_reconstruct_family(S, {p: pts[0] for p, pts in fam.items()}, margin))
        else:
            ambiguous.append(f"{k} candidates per prime with zero pattern {key}" if key else f"{k} singular points at every prime")
    if ambiguous:
        raise ValueError("ambiguous matching: " + "; ".join(ambiguous))
    return out


@dataclass
class HuntReport:
    runs: List[Tuple[int, List[ModPoint]]]
    skipped: Dict[int, str]
    candidates: List[Candidate]


def bad_prime_reason(S: ProjScheme, p: int, point_count: Optional[int] = None) -> Optional[str]:
    for i, poly in enumerate(S.polys):
        if poly and all(c % p == 0 for _, c in poly):
            return f"polynomial {i} vanishes identically mod {p}"
    if point_count is not None:
        scale = sum(p**k for k in range(S.declared_dim + 1))
        if point_count > 3 * scale:
            return f"{point_count} points exceeds 3x the expected {scale}"
    return None


def hunt(S: ProjScheme, primes: Sequence[int], strategy: str = "unique", margin: int = CONFIDENCE_MARGIN,
         budget: int = DEFAULT_BUDGET) -> HuntReport:
    """Enumerate singular points at each good prime, then collate."""

    def one(p):
        reason = bad_prime_reason(S, p)
        if reason:
            return reason, []
        pts = enumerate_points(S, p, budget)
        reason = bad_prime_reason(S, p, len(pts))
        if reason:
            return reason, []
        partials = S.partials()
        return None, [pt for pt in pts if is_singular_mod(S, pt.coords, p, partials)]

    results = _map_primes(one, list(primes))
    runs, skipped = [], {}
    for p, (reason, pts) in zip(primes, results):
        if reason:
            skipped[p] = reason
        else:
            runs.append((p, pts))
    cands = collate_and_reconstruct(S, runs, strategy, margin) if len(runs) >= 2 else []
    return HuntReport(runs, skipped, cands)
