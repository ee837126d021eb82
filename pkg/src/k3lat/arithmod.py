"""Atkin-Lehner matrices on oldform spaces and isogeny-class diameters."""
from __future__ import annotations

import heapq
import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from sympy import factorint

Matrix = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class OldformSpace:
    """Span of ``a_{P^i} f`` for ``0 <= i <= d``.

    ``p`` is the norm of ``P``, ``w`` the (even) weight and ``s`` the
    Atkin-Lehner sign of the newform ``f`` at ``P``.
    """

    newform_label: str
    p: int
    w: int
    d: int
    s: int = 1

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be >= 2")
        if self.w <= 0 or self.w % 2:
            raise ValueError("weight must be a positive even integer")
        if self.d < 0:
            raise ValueError("d must be >= 0")
        if self.s not in (1, -1):
            raise ValueError("Atkin-Lehner sign must be +1 or -1")
        if len(factorint(self.p)) != 1:
            warnings.warn(f"p = {self.p} is not a prime power", stacklevel=2)

    @property
    def dimension(self) -> int:
        return self.d + 1


def al_matrix(sp: OldformSpace) -> Matrix:
    """Matrix of ``w_P`` in the basis ``(a_{P^0} f, ..., a_{P^d} f)``.

    Column ``i`` is the image of ``a_{P^i} f``, namely
    ``s * p^((d - 2i) w / 2) * a_{P^(d-i)} f``.
    """
    n = sp.d + 1
    half = sp.w // 2
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        m[sp.d - i][i] = sp.s * Fraction(sp.p) ** ((sp.d - 2 * i) * half)
    return tuple(tuple(row) for row in m)


def _square(m: Matrix) -> Matrix:
    n = len(m)
    return tuple(tuple(sum((m[i][k] * m[k][j] for k in range(n)), Fraction(0)) for j in range(n)) for i in range(n))


def al_involution_check(sp: OldformSpace) -> bool:
    m = al_matrix(sp)
    n = len(m)
    return _square(m) == tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class IsogenyClassGraph:
    vertices: Tuple[str, ...]
    edges: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.vertices:
            raise ValueError("isogeny class needs at least one curve")
        edges = []
        for i, j, deg in self.edges:
            i, j, deg = int(i), int(j), int(deg)
            if not (0 <= i < len(self.vertices) and 0 <= j < len(self.vertices)):
                raise ValueError(f"edge ({i}, {j}) refers to a missing vertex")
            if deg < 2:
                raise ValueError("isogeny degrees must be >= 2")
            if i != j:  # self-loops never shorten a path
                edges.append((i, j, deg))
        object.__setattr__(self, "edges", tuple(edges))

    @classmethod
    def from_json(cls, data) -> "IsogenyClassGraph":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data["vertices"]), tuple(tuple(e) for e in data.get("edges", ())))

    def index(self, v) -> int:
        if isinstance(v, int):
            if not 0 <= v < len(self.vertices):
                raise ValueError(f"no vertex {v}")
            return v
        try:
            return self.vertices.index(v)
        except ValueError:
            raise ValueError(f"no vertex {v!r}") from None

    def adjacency(self) -> Dict[int, List[Tuple[int, int]]]:
        adj: Dict[int, List[Tuple[int, int]]] = {i: [] for i in range(len(self.vertices))}
        for i, j, deg in self.edges:
            adj[i].append((j, deg))
            adj[j].append((i, deg))
        return adj


def _degrees_from(g: IsogenyClassGraph, src: int) -> Dict[int, int]:
    # Dijkstra with multiplicative weights: products of degrees >= 2 grow monotonically
    adj = g.adjacency()
    best = {src: 1}
    heap = [(1, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > best.get(u, d):
            continue
        for v, deg in adj[u]:
            nd = d * deg
            if nd < best.get(v, nd + 1):
                best[v] = nd
                heapq.heappush(heap, (nd, v))
    return best


def min_isogeny_degree(g: IsogenyClassGraph, i, j) -> int:
    """Smallest product of edge degrees over paths from ``i`` to ``j``."""
    a, b = g.index(i), g.index(j)
    best = _degrees_from(g, a)
    if b not in best:
        raise ValueError(f"{g.vertices[a]} and {g.vertices[b]} are not connected")
    return best[b]


def diameter(g: IsogenyClassGraph) -> int:
    out = 1
    for a in range(len(g.vertices)):
        best = _degrees_from(g, a)
        if len(best) != len(g.vertices):
            raise ValueError("isogeny graph is disconnected")
        out = max(out, max(best.values()))
    return out
