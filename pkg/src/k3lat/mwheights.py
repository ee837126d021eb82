"""Height pairing on Mordell-Weil groups and exhaustive contact-pattern searches.

A section is described by the fibre components it meets (``contacts``) and
its intersection number ``e`` with the zero section.  Its height is

    2*chi + 2*e - sum_v contr_v(contact_v)

and the Neron-Severi determinant follows from the component-group orders,
the Mordell-Weil Gram determinant and the torsion order.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .exactnum import fmt_rat, rat
from .kodaira import (
    FiberInstance,
    component_group_order,
    contribution,
    euler_number,
    format_fibers,
    pair_contribution,
    parse_fibers,
)
from .lattices import det

DEFAULT_E_MAX = 3


@dataclass(frozen=True)
class SectionContact:
    contacts: Tuple
    e: int = 0

    def __post_init__(self):
        object.__setattr__(self, "contacts", tuple(self.contacts))
        if self.e < 0:
            raise ValueError("P.O must be >= 0")

    def __str__(self):
        return f"({', '.join(str(c) for c in self.contacts)}; e={self.e})"

    def to_json(self) -> dict:
        return {"contacts": [c for c in self.contacts], "e": self.e}


@dataclass(frozen=True)
class SurfaceConfig:
    chi: int
    fibers: Tuple[FiberInstance, ...]
    sections: Tuple[SectionContact, ...] = ()
    torsion: Tuple[int, ...] = ()  # invariant factors, e.g. (2, 2)
    torsion_sections: Optional[Tuple[SectionContact, ...]] = None
    mw_gram: Optional[Tuple[Tuple[Fraction, ...], ...]] = None

    def __post_init__(self):
        if self.chi < 1:
            raise ValueError("chi must be positive")
        fibers = tuple(parse_fibers(self.fibers) if isinstance(self.fibers, str) else self.fibers)
        object.__setattr__(self, "fibers", fibers)
        total = sum(euler_number(f) for f in fibers)
        if total > 12 * self.chi:
            raise ValueError(f"overfull configuration: Euler sum {total} > {12 * self.chi}")
        tors = (self.torsion,) if isinstance(self.torsion, int) else tuple(self.torsion)
        tors = tuple(t for t in tors if t != 1)
        if any(t < 1 for t in tors):
            raise ValueError("torsion invariants must be positive")
        object.__setattr__(self, "torsion", tors)
        order = self.torsion_order
        if order > 1 and math.prod(component_group_order(f) for f in fibers) % order:
            raise ValueError(f"torsion of order {order} cannot embed in the component groups")
        object.__setattr__(self, "sections", tuple(self._check(s) for s in self.sections))
        if self.torsion_sections is not None:
            ts = tuple(self._check(s) for s in self.torsion_sections)
            for t in ts:
                if height(self, t) != 0:
                    raise ValueError(f"torsion section {t} has nonzero height")
            object.__setattr__(self, "torsion_sections", ts)
        if self.mw_gram is not None:
            object.__setattr__(self, "mw_gram", tuple(tuple(rat(x) for x in row) for row in self.mw_gram))

    def _check(self, s: SectionContact) -> SectionContact:
        if len(s.contacts) != len(self.fibers):
            raise ValueError(f"section has {len(s.contacts)} contacts for {len(self.fibers)} fibres")
        return SectionContact(tuple(f.label(c) for f, c in zip(self.fibers, s.contacts)), s.e)

    @property
    def torsion_order(self) -> int:
        return math.prod(self.torsion)

    def section(self, contacts, e=0) -> SectionContact:
        return self._check(SectionContact(tuple(contacts), e))

    def zero_contacts(self) -> Tuple:
        return tuple(f.zero for f in self.fibers)

    @classmethod
    def from_json(cls, data) -> "SurfaceConfig":
        if isinstance(data, str):
            data = json.loads(data)
        sections = tuple(SectionContact(tuple(s["contacts"]), s.get("e", 0)) for s in data.get("sections", ()))
        ts = data.get("torsion_sections")
        if ts is not None:
            ts = tuple(SectionContact(tuple(s["contacts"]), s.get("e", 0)) for s in ts)
        return cls(
            chi=int(data.get("chi", 2)),
            fibers=parse_fibers(data.get("fibers", "")),
            sections=sections,
            torsion=data.get("torsion", 1),
            torsion_sections=ts,
            mw_gram=data.get("mw_gram"),
        )

    def to_json(self) -> dict:
        out = OrderedDict(chi=self.chi, fibers=format_fibers(self.fibers))
        out["torsion"] = list(self.torsion) if len(self.torsion) != 1 else self.torsion[0]
        if not self.torsion:
            out["torsion"] = 1
        if self.mw_gram is not None:
            out["mw_gram"] = [[fmt_rat(x) for x in row] for row in self.mw_gram]
        if self.sections:
            out["sections"] = [s.to_json() for s in self.sections]
        if self.torsion_sections is not None:
            out["torsion_sections"] = [s.to_json() for s in self.torsion_sections]
        return dict(out)


def contribution_sum(cfg: SurfaceConfig, contacts: Sequence) -> Fraction:
    return sum((contribution(f, c) for f, c in zip(cfg.fibers, contacts)), Fraction(0))


def height(cfg: SurfaceConfig, s: SectionContact) -> Fraction:
    s = cfg._check(s)
    return 2 * cfg.chi + 2 * s.e - contribution_sum(cfg, s.contacts)


def pairing(cfg: SurfaceConfig, s: SectionContact, t: SectionContact, st: Optional[int] = None) -> Fraction:
    """Height pairing ``<s, t>``.

    ``st`` is the intersection number ``s.t``.  On the diagonal (``s == t``
    and ``st`` omitted) the self-intersection ``-chi`` is used, so the
    result equals :func:`height`.
    """
    s, t = cfg._check(s), cfg._check(t)
    if st is None:
        if s != t:
            raise ValueError("st is required for distinct sections")
        st = -cfg.chi
    elif s != t and st < 0:
        raise ValueError("s.t must be >= 0 for distinct sections")
    local = sum((pair_contribution(f, a, b) for f, a, b in zip(cfg.fibers, s.contacts, t.contacts)), Fraction(0))
    return cfg.chi + s.e + t.e - st - local


def ns_determinant(cfg: SurfaceConfig, mw_gram=None) -> Fraction:
    """|disc NS| = prod(component orders) * det(MW Gram) / |torsion|^2."""
    if mw_gram is None:
        mw_gram = cfg.mw_gram if cfg.mw_gram is not None else ()
    prod = math.prod(component_group_order(f) for f in cfg.fibers)
    return prod * det(mw_gram) / Fraction(cfg.torsion_order) ** 2


# --- searches ----------------------------------------------------------------

def _slots(cfg: SurfaceConfig, reduce: bool):
    """Search slots: (positions, options) with options = [(labels, contribution sum)].

    With ``reduce`` identical fibres are grouped and labels replaced by
    automorphism-orbit representatives, so each option is a multiset.
    """
    slots = []
    if reduce:
        groups: Dict[FiberInstance, List[int]] = OrderedDict()
        for i, f in enumerate(cfg.fibers):
            groups.setdefault(f, []).append(i)
        for f, pos in groups.items():
            reps = sorted({f.canonical(c) for c in f.labels}, key=f.label_index, reverse=True)
            opts = []
            for combo in itertools.combinations_with_replacement(reps, len(pos)):
                opts.append((combo, sum((contribution(f, c) for c in combo), Fraction(0))))
            slots.append((pos, opts))
    else:
        for i, f in enumerate(cfg.fibers):
            slots.append(([i], [((c,), contribution(f, c)) for c in f.labels]))
    return slots


def _enumerate_sums(slots, need: Fraction):
    maxes = [max(s for _, s in opts) for _, opts in slots]
    tail = [Fraction(0)] * (len(slots) + 1)
    for i in range(len(slots) - 1, -1, -1):
        tail[i] = tail[i + 1] + maxes[i]

    def rec(i, acc, chosen):
        if i == len(slots):
            if acc == need:
                yield list(chosen)
            return
        for labels, s in slots[i][1]:
            tot = acc + s
            if tot > need or tot + tail[i + 1] < need:
                continue
            chosen.append(labels)
            yield from rec(i + 1, tot, chosen)
            chosen.pop()

    yield from rec(0, Fraction(0), [])


def _sort_key(cfg: SurfaceConfig, s: SectionContact):
    return (s.e, tuple(-f.label_index(c) for f, c in zip(cfg.fibers, s.contacts)))


def solve_contacts(cfg: SurfaceConfig, target, e_max: int = DEFAULT_E_MAX, reduce: bool = True) -> List[SectionContact]:
    """All contact patterns with height exactly ``target`` and ``0 <= e <= e_max``.

    With ``reduce`` (the default) patterns are reported once per orbit of the
    fibre automorphisms (``a <-> n-a`` etc.) and permutations of identical
    fibres.
    """
    target = rat(target)
    slots = _slots(cfg, reduce)
    out = []
    for e in range(e_max + 1):
        need = 2 * cfg.chi + 2 * e - target
        if need < 0:
            continue
        for chosen in _enumerate_sums(slots, need):
            contacts = [None] * len(cfg.fibers)
            for (pos, _), labels in zip(slots, chosen):
                for i, c in zip(pos, labels):
                    contacts[i] = c
            out.append(SectionContact(tuple(contacts), e))
    out.sort(key=lambda s: _sort_key(cfg, s))
    for s in out:
        assert height(cfg, s) == target
    return out


def torsion_candidates(cfg: SurfaceConfig, reduce: bool = True) -> List[SectionContact]:
    """Contact patterns of height 0 disjoint from the zero section."""
    return solve_contacts(cfg, 0, e_max=0, reduce=reduce)


def add_contacts(cfg: SurfaceConfig, a: Sequence, b: Sequence) -> Tuple:
    return tuple(f.add(x, y) for f, x, y in zip(cfg.fibers, a, b))


def _order(cfg: SurfaceConfig, v: Sequence) -> int:
    return math.lcm(*(f.order_of(c) for f, c in zip(cfg.fibers, v))) if v else 1


def check_torsion_spec(invariants: Sequence[int]) -> Tuple[int, ...]:
    inv = tuple(int(t) for t in invariants if int(t) != 1)
    if any(t < 1 for t in inv):
        raise ValueError(f"nonsensical torsion spec {list(invariants)}: factors must be positive")
    if len(inv) > 2:
        raise ValueError(f"nonsensical torsion spec {list(invariants)}: at most two invariant factors")
    if len(inv) == 2 and inv[1] % inv[0]:
        raise ValueError(f"nonsensical torsion spec {list(invariants)}: first factor must divide the second")
    return inv


def torsion_groups(cfg: SurfaceConfig, invariants: Sequence[int]) -> List[FrozenSet[Tuple]]:
    """Subgroups of label vectors of the given type whose nonzero members are torsion candidates."""
    inv = check_torsion_spec(invariants)
    zero = cfg.zero_contacts()
    if not inv:
        return [frozenset([zero])]
    cands = {s.contacts for s in torsion_candidates(cfg, reduce=False)}
    by_order: Dict[int, List[Tuple]] = {}
    for v in cands:
        by_order.setdefault(_order(cfg, v), []).append(v)

    def multiples(g, n):
        out, acc = [zero], zero
        for _ in range(n - 1):
            acc = add_contacts(cfg, acc, g)
            out.append(acc)
        return out

    groups = set()
    if len(inv) == 1:
        for g in by_order.get(inv[0], []):
            elems = multiples(g, inv[0])
            if all(x in cands for x in elems[1:]):
                groups.add(frozenset(elems))
    else:
        n1, n2 = inv
        for g2 in by_order.get(n2, []):
            c2 = multiples(g2, n2)
            if not all(x in cands for x in c2[1:]):
                continue
            for g1 in by_order.get(n1, []):
                elems = {add_contacts(cfg, x, y) for x in multiples(g1, n1) for y in c2}
                if len(elems) == n1 * n2 and all(x in cands for x in elems if x != zero):
                    groups.add(frozenset(elems))
    key = lambda G: sorted(tuple(f.label_index(c) for f, c in zip(cfg.fibers, v)) for v in G)
    return sorted(groups, key=key)


def translate_height_ok(cfg: SurfaceConfig, contacts: Sequence, h: Fraction) -> Optional[int]:
    """The ``e' >= 0`` giving the pattern height ``h``, or None if there is none."""
    twice_e = h + contribution_sum(cfg, contacts) - 2 * cfg.chi
    if twice_e < 0 or twice_e.denominator != 1 or twice_e.numerator % 2:
        return None
    return twice_e.numerator // 2


@dataclass
class DiscVerdict:
    candidate: Fraction
    feasible: bool
    required_height: Optional[Fraction] = None
    patterns: List[SectionContact] = field(default_factory=list)
    certificate: List[str] = field(default_factory=list)
    witness: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "candidate": fmt_rat(self.candidate),
            "feasible": self.feasible,
            "required_height": None if self.required_height is None else fmt_rat(self.required_height),
            "patterns": [s.to_json() for s in self.patterns],
            "certificate": list(self.certificate),
            "witness": self.witness,
        }


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(c) for c in v) + ")"


def exclude_discriminant(
    fibers: Sequence[FiberInstance],
    rank: int,
    torsion: Sequence[int],
    candidates: Iterable,
    chi: int = 2,
    e_max: int = DEFAULT_E_MAX,
) -> List[DiscVerdict]:
    """Decide, per candidate |disc NS|, whether a frame admits it.

    For rank 1 the generator height ``h`` is forced by the determinant
    formula.  Every contact pattern of height ``h`` is then tested against
    every torsion subgroup of the requested type: each torsion translate
    ``s + t`` (componentwise label addition) must again reach height ``h``
    for some ``P.O = e' >= 0``.  A candidate is infeasible when no
    (pattern, subgroup) pair survives; the certificate records why.
    """
    inv = check_torsion_spec(torsion)
    if rank not in (0, 1):
        raise ValueError("only Mordell-Weil rank 0 or 1 frames are supported")
    cfg = SurfaceConfig(chi=chi, fibers=tuple(fibers), torsion=inv)
    prod = math.prod(component_group_order(f) for f in cfg.fibers)
    tors = cfg.torsion_order
    groups = torsion_groups(cfg, inv)
    out = []
    for cand in candidates:
        D = abs(rat(cand))
        if not groups:
            out.append(DiscVerdict(D, False, certificate=[f"no torsion subgroup of type {list(inv)} among height-0 patterns"]))
            continue
        if rank == 0:
            base = Fraction(prod, tors * tors)
            ok = D == base
            cert = [] if ok else [f"rank 0 forces |disc| = {fmt_rat(base)}"]
            out.append(DiscVerdict(D, ok, certificate=cert, witness=f"|disc| = {fmt_rat(base)}" if ok else None))
            continue
        h = D * tors * tors / prod
        verdict = DiscVerdict(D, False, required_height=h)
        verdict.certificate.append(f"|disc| = {prod} * h / {tors}^2 = {fmt_rat(D)} forces h = {fmt_rat(h)}")
        pats = solve_contacts(cfg, h, e_max=e_max, reduce=True)
        verdict.patterns = pats
        if not pats:
            verdict.certificate.append(f"no contact pattern reaches height {fmt_rat(h)} with e <= {e_max}")
            out.append(verdict)
            continue
        for s in pats:
            failures = []
            for G in groups:
                bad = None
                for t in sorted(G, key=lambda v: tuple(f.label_index(c) for f, c in zip(cfg.fibers, v))):
                    if t == cfg.zero_contacts():
                        continue
                    moved = add_contacts(cfg, s.contacts, t)
                    if translate_height_ok(cfg, moved, h) is None:
                        bad = (t, moved)
                        break
                if bad is None:
                    verdict.feasible = True
                    gens = sorted(_fmt_vec(v) for v in G if v != cfg.zero_contacts())
                    verdict.witness = f"s = {s} with torsion {{{', '.join(gens)}}}"
                    break
                failures.append(bad)
            if verdict.feasible:
                break
            t, moved = failures[0]
            reach = 2 * cfg.chi - contribution_sum(cfg, moved)
            verdict.certificate.append(
                f"s = {s}: fails for all {len(groups)} torsion subgroups; e.g. s + t with t = {_fmt_vec(t)} "
                f"meets {_fmt_vec(moved)}, height {fmt_rat(reach)} + 2e' never equals {fmt_rat(h)}"
            )
        out.append(verdict)
    return out


def integral_height_check(cfg: SurfaceConfig) -> bool:
    """True iff every achievable height ``2chi + 2e - sum contr`` is an integer."""
    fracs = {Fraction(0)}
    for f in cfg.fibers:
        parts = {contribution(f, c) % 1 for c in f.labels}
        fracs = {(a + b) % 1 for a in fracs for b in parts}
    return fracs == {Fraction(0)}
