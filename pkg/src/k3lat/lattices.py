"""Quadratic lattices given by rational Gram matrices.

Covers determinant, the two scalings ``L(r)`` (form scaled by r) and ``rL``
(vectors scaled by r), index-d overlattices obtained by adjoining ``v/d``,
square classes, and the local-obstruction set of a ternary form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence, Tuple

from sympy import factorint

from .exactnum import fmt_rat, rat

Matrix = Tuple[Tuple[Fraction, ...], ...]

INF = "inf"


def _as_matrix(rows) -> Matrix:
    return tuple(tuple(rat(x) for x in row) for row in rows)


def det(m: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    a = [[rat(x) for x in row] for row in m]
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                row_r, row_c = a[r], a[col]
                for k in range(col, n):
                    row_r[k] -= f * row_c[k]
    return sign * result


def matmul(a, b):
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0])))
        for i in range(len(a))
    )


def transpose(a):
    return tuple(zip(*a))


@dataclass(frozen=True)
class GramLattice:
    gram: Matrix

    def __init__(self, gram):
        g = _as_matrix(gram)
        n = len(g)
        if n == 0:
            raise ValueError("rank-0 lattices are not supported")
        if any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        if det(g) == 0:
            raise ValueError("degenerate Gram matrix")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.gram for x in row)

    def is_even(self) -> bool:
        return self.is_integral() and all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def signature(self) -> Tuple[int, int]:
        diag = diagonalize(self.gram)
        return sum(1 for x in diag if x > 0), sum(1 for x in diag if x < 0)

    def direct_sum(self, other: "GramLattice") -> "GramLattice":
        n, m = self.rank, other.rank
        rows = [list(r) + [0] * m for r in self.gram] + [[0] * n + list(r) for r in other.gram]
        return GramLattice(rows)

    __add__ = direct_sum

    def to_json(self) -> list:
        return [[fmt_rat(x) for x in row] for row in self.gram]

    @classmethod
    def from_json(cls, data) -> "GramLattice":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data)


# --- standard lattices -------------------------------------------------------

def diag_lattice(*entries) -> GramLattice:
    n = len(entries)
    return GramLattice([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def U() -> GramLattice:
    return GramLattice([[0, 1], [1, 0]])


def _from_edges(n: int, edges) -> GramLattice:
    g = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in edges:
        g[i][j] = g[j][i] = -1
    return GramLattice(g)


def A(n: int) -> GramLattice:
    return _from_edges(n, [(i, i + 1) for i in range(n - 1)])


def D(n: int) -> GramLattice:
    # chain 0-1-...-(n-2), extra node n-1 hanging off n-3
    if n < 4:
        raise ValueError("D_n needs n >= 4")
    edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    return _from_edges(n, edges)


def E(n: int) -> GramLattice:
    # chain 0-1-...-(n-2), node n-1 attached to node 2
    if n not in (6, 7, 8):
        raise ValueError("E_n needs n in {6, 7, 8}")
    edges = [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]
    return _from_edges(n, edges)


def root_lattice(name: str) -> GramLattice:
    kind, n = name[0].upper(), int(name[1:])
    return {"A": A, "D": D, "E": E}[kind](n)


# --- operations --------------------------------------------------------------

def disc(L: GramLattice) -> Fraction:
    return det(L.gram)


def twist(L: GramLattice, r) -> GramLattice:
    """``L(r)``: same group, pairing multiplied by ``r``."""
    r = rat(r)
    if r == 0:
        raise ValueError("twist factor must be nonzero")
    return GramLattice([[r * x for x in row] for row in L.gram])


def scale_vectors(L: GramLattice, r) -> GramLattice:
    """``rL``: the lattice of vectors ``r*v``; its Gram matrix is ``r^2`` times L's."""
    r = rat(r)
    if r == 0:
        raise ValueError("scale factor must be nonzero")
    return GramLattice([[r * r * x for x in row] for row in L.gram])


def _hnf_rows(rows: List[List[int]]) -> List[List[int]]:
    """Row-style Hermite normal form; returns the nonzero rows."""
    a = [list(r) for r in rows]
    m, n = len(a), len(a[0])
    top = 0
    for col in range(n):
        if top == m:
            break
        while True:
            nz = [r for r in range(top, m) if a[r][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda r: abs(a[r][col]))
            a[top], a[piv] = a[piv], a[top]
            clean = True
            for r in range(top + 1, m):
                q = a[r][col] // a[top][col]
                if q:
                    a[r] = [x - q * y for x, y in zip(a[r], a[top])]
                clean = clean and a[r][col] == 0
            if clean:
                break
        if a[top][col] == 0:
            continue
        if a[top][col] < 0:
            a[top] = [-x for x in a[top]]
        for r in range(top):
            q = a[r][col] // a[top][col]
            a[r] = [x - q * y for x, y in zip(a[r], a[top])]
        top += 1
    return [r for r in a if any(r)]


def adjoin_fraction(L: GramLattice, v: Sequence[int], d: int, require: Optional[str] = None) -> GramLattice:
    """Overlattice generated by ``L`` and ``v/d`` (``v`` in L-coordinates).

    ``require`` may be ``"integral"`` or ``"even"``; the overlattice is
    rejected with ``"non-integral overlattice"`` when it fails that check.
    The vector must be primitive modulo ``d`` (gcd of its content with ``d``
    equal to 1), so the index is exactly ``d`` and the discriminant drops by
    ``d**2``.
    """
    if require not in (None, "integral", "even"):
        raise ValueError(f"unknown integrality requirement {require!r}")
    v = [int(x) for x in v]
    d = int(d)
    if d < 2:
        raise ValueError("d must be >= 2")
    if len(v) != L.rank:
        raise ValueError("vector length does not match lattice rank")
    content = math.gcd(*v) if any(v) else 0
    if math.gcd(content, d) != 1:
        raise ValueError("vector already divisible")
    n = L.rank
    gens = [[d if i == j else 0 for j in range(n)] for i in range(n)] + [v]
    basis = _hnf_rows(gens)
    assert len(basis) == n
    B = tuple(tuple(Fraction(x, d) for x in row) for row in basis)
    gram = matmul(matmul(B, L.gram), transpose(B))
    out = GramLattice(gram)
    if require == "integral" and not out.is_integral():
        raise ValueError("non-integral overlattice")
    if require == "even" and not out.is_even():
        raise ValueError("non-integral overlattice")
    return out


@dataclass(frozen=True)
class SquareClass:
    sign: int
    squarefree_part: int

    def __str__(self):
        return f"{'-' if self.sign < 0 else '+'}{self.squarefree_part}"


def squarefree_part(n: int) -> int:
    n = abs(int(n))
    out = 1
    for p, e in factorint(n).items():
        if e % 2:
            out *= p
    return out


def square_class(x) -> SquareClass:
    x = rat(x)
    if x == 0:
        raise ValueError("zero has no square class")
    return SquareClass(1 if x > 0 else -1, squarefree_part(x.numerator * x.denominator))


def diagonalize(gram) -> List[Fraction]:
    """Diagonal entries of a rational congruence diagonalization.

    Pivots on the first nonzero diagonal entry; when the remaining diagonal
    is zero, adds the partner row/column of a nonzero off-diagonal entry to
    create one.
    """
    a = [[rat(x) for x in row] for row in gram]
    n = len(a)
    out = []
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                out.extend(Fraction(0) for _ in range(k, n))
                return out
            i, j = pair
            # e_i <- e_i + e_j: new a_ii = 2 a_ij
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            piv = i
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            for row in a:
                row[k], row[piv] = row[piv], row[k]
        p = a[k][k]
        out.append(p)
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for t in range(k, n):
                    a[i][t] -= f * a[k][t]
        for i in range(k + 1, n):
            a[k][i] = a[i][k] = Fraction(0)
    return out


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _split_p(x: int, p: int) -> Tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def hilbert_symbol(a: int, b: int, p) -> int:
    """Hilbert symbol ``(a, b)_p`` for nonzero integers; ``p`` a prime or ``"inf"``."""
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    if p == INF:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split_p(a, p)
    beta, v = _split_p(b, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    s = (-1) ** (alpha * beta * ((p - 1) // 2))
    return s * _legendre(u, p) ** beta * _legendre(v, p) ** alpha


def _to_squarefree_int(x: Fraction) -> int:
    n = x.numerator * x.denominator
    return (1 if n > 0 else -1) * squarefree_part(n)


def conic_invariant(L: GramLattice) -> FrozenSet:
    """Places where the conic ``(x, x)_L = 0`` has no local point.

    Diagonalize to ``a x^2 + b y^2 + c z^2``; the conic is locally soluble
    at ``v`` exactly when ``(-a c, -b c)_v = 1``.
    """
    if L.rank != 3:
        raise ValueError("conic invariant needs a rank-3 form")
    a, b, c = (_to_squarefree_int(x) for x in diagonalize(L.gram))
    h1, h2 = _to_squarefree_int(Fraction(-a * c)), _to_squarefree_int(Fraction(-b * c))
    places = [INF, 2] + sorted(set(factorint(abs(a * b * c))) - {2})
    return frozenset(v for v in places if hilbert_symbol(h1, h2, v) == -1)
