"""Invariant-level validation of chains of finite maps between K3 surfaces.

Each node records what is known about a surface's Picard lattice and
transcendental lattice; each move is a typed map whose effect on those
invariants is constrained.  Validators never guess: a rule that needs a
missing field answers ``"insufficient data"``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from sympy import factorint, isprime

from .exactnum import fmt_rat, rat
from .lattices import GramLattice, SquareClass, conic_invariant, disc, square_class, twist

B2 = {"k3": 22, "abelian": 6}
MOVE_KINDS = ("isogeny", "jacobian", "q_jacobian", "kummer_quotient", "twist_base_change")

OK = "ok"
VIOLATION = "violation"
INSUFFICIENT = "insufficient data"


@dataclass(frozen=True)
class CorrNode:
    name: str
    picard_rank: int
    picard_disc: Optional[Fraction] = None
    transcendental: Optional[GramLattice] = None
    rational_sublattice_rank: Optional[int] = None
    surface: str = "k3"

    def __post_init__(self):
        if self.surface not in B2:
            raise ValueError(f"unknown surface type {self.surface!r}")
        top = B2[self.surface] - 2
        if not 1 <= self.picard_rank <= top:
            raise ValueError(f"{self.name}: Picard rank must lie in [1, {top}]")
        if self.picard_disc is not None:
            d = rat(self.picard_disc)
            if d == 0:
                raise ValueError(f"{self.name}: Picard discriminant must be nonzero")
            object.__setattr__(self, "picard_disc", d)
        T = self.transcendental
        if T is not None:
            if not isinstance(T, GramLattice):
                T = GramLattice(T)
                object.__setattr__(self, "transcendental", T)
            if self.picard_rank + T.rank != B2[self.surface]:
                raise ValueError(f"{self.name}: Picard rank + rank(T) must equal {B2[self.surface]}")
        r = self.rational_sublattice_rank
        if r is not None and not 0 <= r <= self.picard_rank:
            raise ValueError(f"{self.name}: rational sublattice rank out of range")

    @property
    def abs_disc(self) -> Optional[Fraction]:
        return None if self.picard_disc is None else abs(self.picard_disc)

    @classmethod
    def from_json(cls, data: dict) -> "CorrNode":
        T = data.get("transcendental")
        return cls(
            name=data["name"],
            picard_rank=int(data["picard_rank"]),
            picard_disc=None if data.get("picard_disc") is None else rat(data["picard_disc"]),
            transcendental=None if T is None else GramLattice.from_json(T),
            rational_sublattice_rank=data.get("rational_sublattice_rank"),
            surface=data.get("surface", "k3"),
        )

    def to_json(self) -> dict:
        out = {"name": self.name, "picard_rank": self.picard_rank, "surface": self.surface}
        if self.picard_disc is not None:
            out["picard_disc"] = fmt_rat(self.picard_disc)
        if self.transcendental is not None:
            out["transcendental"] = self.transcendental.to_json()
        if self.rational_sublattice_rank is not None:
            out["rational_sublattice_rank"] = self.rational_sublattice_rank
        return out


@dataclass(frozen=True)
class CorrMove:
    """A map ``source -> target``.

    ``param`` is the prime of an isogeny or the index ``d`` of a Jacobian
    move.  ``inverse`` marks a move written against the direction of the
    map (e.g. a Kummer surface listed before its abelian surface), so the
    rule is applied with source and target swapped.
    """

    kind: str
    source: CorrNode
    target: CorrNode
    param: Optional[int] = None
    inverse: bool = False

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")
        if self.kind == "isogeny" and (self.param is None or not isprime(int(self.param))):
            raise ValueError("isogeny moves need a prime degree")
        if self.kind == "jacobian" and (self.param is None or int(self.param) < 2):
            raise ValueError("jacobian moves need d >= 2")

    def label(self) -> str:
        p = "" if self.param is None else f"({self.param})"
        inv = "^-1" if self.inverse else ""
        return f"{self.kind}{p}{inv}"


@dataclass(frozen=True)
class MoveResult:
    status: str
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OK

    def __str__(self):
        return self.status if not self.message else f"{self.status}: {self.message}"


def _p_exponent(x: Fraction, p: int) -> Optional[int]:
    """``j`` with ``x = p**j``, or None."""
    num, den = x.numerator, x.denominator
    fn, fd = factorint(num), factorint(den)
    if set(fn) - {p} or set(fd) - {p}:
        return None
    return fn.get(p, 0) - fd.get(p, 0)


def validate_move(m: CorrMove) -> MoveResult:
    src, tgt = (m.target, m.source) if m.inverse else (m.source, m.target)
    if m.kind == "kummer_quotient":
        return _validate_kummer(src, tgt)
    if src.surface != "k3" or tgt.surface != "k3":
        return MoveResult(VIOLATION, f"{m.kind} moves connect K3 surfaces")
    if src.picard_rank != tgt.picard_rank:
        return MoveResult(VIOLATION, f"Picard rank changed {src.picard_rank} -> {tgt.picard_rank}")
    if src.picard_disc is None or tgt.picard_disc is None:
        return MoveResult(INSUFFICIENT, "Picard discriminant missing")
    ds, dt = src.abs_disc, tgt.abs_disc
    if m.kind == "isogeny":
        p = int(m.param)
        j = _p_exponent(dt / ds, p)
        if j is None:
            return MoveResult(VIOLATION, f"discriminant ratio {fmt_rat(dt / ds)} is not a power of {p}")
        bound = B2["k3"] - src.picard_rank
        if abs(j) > bound:
            return MoveResult(VIOLATION, f"exponent {j} exceeds rank(T) = {bound}")
        if src.picard_rank % 2 == 0 and j % 2:
            return MoveResult(VIOLATION, f"odd exponent {j} at even Picard rank changes the square class")
        return MoveResult(OK)
    if m.kind == "jacobian":
        d = int(m.param)
        expected = ds / (d * d)
        if dt != expected:
            return MoveResult(VIOLATION, f"expected {fmt_rat(expected)}, got {fmt_rat(dt)}")
        return MoveResult(OK)
    if m.kind == "q_jacobian":
        if dt != ds:
            return MoveResult(VIOLATION, f"expected {fmt_rat(ds)}, got {fmt_rat(dt)}")
        rs, rt = src.rational_sublattice_rank, tgt.rational_sublattice_rank
        if rs is not None and rt is not None and rt <= rs:
            return MoveResult(VIOLATION, f"rational sublattice rank must increase ({rs} -> {rt})")
        return MoveResult(OK)
    # twist_base_change
    if dt != ds:
        return MoveResult(VIOLATION, f"expected {fmt_rat(ds)}, got {fmt_rat(dt)}")
    return MoveResult(OK)


def _validate_kummer(src: CorrNode, tgt: CorrNode) -> MoveResult:
    if src.transcendental is None or tgt.transcendental is None:
        return MoveResult(INSUFFICIENT, "transcendental lattice missing")
    if tgt.surface != "k3":
        return MoveResult(VIOLATION, "the quotient must be a K3 surface")
    if src.surface == "abelian" and tgt.picard_rank != src.picard_rank + 16:
        return MoveResult(VIOLATION, f"Picard rank should be {src.picard_rank + 16}")
    expected = twist(src.transcendental, 2)
    if tgt.transcendental.gram != expected.gram:
        return MoveResult(VIOLATION, f"expected T = {expected.to_json()}")
    if tgt.picard_disc is not None and abs(tgt.picard_disc) != abs(disc(expected)):
        return MoveResult(VIOLATION, f"expected {fmt_rat(abs(disc(expected)))}, got {fmt_rat(tgt.abs_disc)}")
    return MoveResult(OK)


@dataclass
class ChainReport:
    results: List[MoveResult] = field(default_factory=list)
    labels: List[str] = field(default_factory=list)
    degree_class: SquareClass = SquareClass(1, 1)
    first_violation: Optional[int] = None
    disc_ratio: Optional[Fraction] = None
    square_class_ok: Optional[bool] = None
    conic_ok: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return self.first_violation is None and all(r.ok for r in self.results)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "moves": [{"move": l, "status": r.status, "message": r.message} for l, r in zip(self.labels, self.results)],
            "degree_class": str(self.degree_class),
            "first_violation": self.first_violation,
            "disc_ratio": None if self.disc_ratio is None else fmt_rat(self.disc_ratio),
            "square_class_ok": self.square_class_ok,
            "conic_ok": self.conic_ok,
        }


def _degree(m: CorrMove) -> int:
    if m.kind == "isogeny":
        return int(m.param)
    if m.kind == "jacobian":
        return int(m.param) ** 2
    if m.kind == "kummer_quotient":
        return 2
    return 1


def chain_report(moves: Sequence[CorrMove]) -> ChainReport:
    """Validate a path of moves and the end-to-end invariants.

    The degree is tracked only up to squares.  The end-to-end checks
    compare the first and last K3 nodes on the path: when the chain is
    accepted and they have equal even Picard rank, their
    discriminant square classes must agree; for rank-19 ends with known
    transcendental lattices the conic invariants must agree too.
    """
    for a, b in zip(moves, moves[1:]):
        if a.target.name != b.source.name:
            raise ValueError(f"broken path: {a.target.name} -> {b.source.name}")
    rep = ChainReport()
    deg = 1
    for i, m in enumerate(moves):
        r = validate_move(m)
        rep.results.append(r)
        rep.labels.append(f"{m.source.name} -> {m.target.name}: {m.label()}")
        if r.status == VIOLATION and rep.first_violation is None:
            rep.first_violation = i
        deg *= _degree(m)
    rep.degree_class = square_class(deg)
    if not moves:
        rep.disc_ratio = Fraction(1)
        return rep
    k3 = [n for n in [moves[0].source] + [m.target for m in moves] if n.surface == "k3"]
    if not k3:
        return rep
    start, end = k3[0], k3[-1]
    if start.picard_disc is not None and end.picard_disc is not None:
        rep.disc_ratio = end.abs_disc / start.abs_disc
    if rep.ok and start.surface == end.surface == "k3" and start.picard_rank == end.picard_rank:
        if start.picard_rank % 2 == 0 and rep.disc_ratio is not None:
            rep.square_class_ok = square_class(start.abs_disc) == square_class(end.abs_disc)
        if start.picard_rank == 19 and start.transcendental is not None and end.transcendental is not None:
            rep.conic_ok = conic_invariant(start.transcendental) == conic_invariant(end.transcendental)
    if rep.square_class_ok is False and rep.first_violation is None:
        rep.first_violation = len(moves) - 1
    return rep


def _smooth(n: int, bound: int) -> bool:
    return all(p <= bound for p in factorint(n))


def smooth_diameter_check(disc_value, diameter: int, smooth_bound: int) -> bool:
    """True iff ``|disc| / diameter`` factors over primes ``<= smooth_bound``."""
    d = abs(rat(disc_value))
    if d == 0 or diameter < 1 or smooth_bound < 2:
        raise ValueError("discriminant, diameter and smoothness bound must be positive")
    q = d / diameter
    return _smooth(q.numerator, smooth_bound) and _smooth(q.denominator, smooth_bound)


def load_chain(data) -> List[CorrMove]:
    """Chain file: ``{"nodes": [...], "moves": [{"kind", "source", "target", "param", "inverse"}]}``."""
    if isinstance(data, str):
        data = json.loads(data)
    nodes: Dict[str, CorrNode] = {}
    for nd in data.get("nodes", []):
        node = CorrNode.from_json(nd)
        if node.name in nodes:
            raise ValueError(f"duplicate node {node.name!r}")
        nodes[node.name] = node
    moves = []
    for mv in data.get("moves", []):
        for end in ("source", "target"):
            if mv[end] not in nodes:
                raise ValueError(f"unknown node {mv[end]!r}")
        moves.append(
            CorrMove(mv["kind"], nodes[mv["source"]], nodes[mv["target"]], mv.get("param"), bool(mv.get("inverse", False)))
        )
    return moves
