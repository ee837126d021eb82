"""Kodaira fibre types: Euler numbers, component groups, local height terms.

Component labels name the simple (multiplicity-one) components, which are
exactly the elements of the component group:

* ``I_n``: an integer mod n, 0 being the component met by the zero section;
* ``I*_n``: one of ``"0"``, ``"near"``, ``"far1"``, ``"far2"``;
* ``III``, ``III*``: 0 or 1; ``IV``, ``IV*``: 0, 1 or 2;
* ``I_0``, ``I_1``, ``II``, ``II*``: only 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

Label = Union[int, str]

ADDITIVE = ("II", "III", "IV", "IV*", "III*", "II*")
STAR_LABELS = ("0", "near", "far1", "far2")

_EULER = {"II": 2, "III": 3, "IV": 4, "IV*": 8, "III*": 9, "II*": 10}
_GROUP = {"II": 1, "III": 2, "IV": 3, "IV*": 3, "III*": 2, "II*": 1}
_ROOTS = {"III": "A1", "IV": "A2", "IV*": "E6", "III*": "E7", "II*": "E8"}

# ends of the long arms of E6/E7 meet the simple components
_DIAG = {"III": Fraction(1, 2), "IV": Fraction(2, 3), "IV*": Fraction(4, 3), "III*": Fraction(3, 2)}
_OFF = {"IV": Fraction(1, 3), "IV*": Fraction(2, 3)}


@dataclass(frozen=True, order=True)
class FiberInstance:
    kind: str  # "I", "I*", or one of ADDITIVE
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("I", "I*") + ADDITIVE:
            raise ValueError(f"unknown fibre kind {self.kind!r}")
        if self.n < 0:
            raise ValueError("fibre index must be >= 0")
        if self.kind in ADDITIVE and self.n:
            raise ValueError(f"{self.kind} takes no index")

    def __str__(self):
        if self.kind == "I":
            return f"I{self.n}"
        if self.kind == "I*":
            return f"I{self.n}*"
        return self.kind

    @property
    def labels(self) -> Tuple[Label, ...]:
        if self.kind == "I":
            return tuple(range(max(self.n, 1)))
        if self.kind == "I*":
            return STAR_LABELS
        return tuple(range(_GROUP[self.kind]))

    @property
    def zero(self) -> Label:
        return "0" if self.kind == "I*" else 0

    @property
    def reducible(self) -> bool:
        return bool(self.root_type)

    def label(self, c) -> Label:
        """Validate and normalize a component label."""
        if self.kind == "I*":
            c = str(c).strip()
            if c == "far":
                c = "far1"
            if c not in STAR_LABELS:
                raise ValueError(f"invalid component {c!r} for {self}")
            return c
        try:
            c = int(c)
        except (TypeError, ValueError):
            raise ValueError(f"invalid component {c!r} for {self}") from None
        if c not in self.labels:
            raise ValueError(f"invalid component {c!r} for {self}")
        return c

    def label_index(self, c) -> int:
        return self.labels.index(self.label(c))

    # --- component group ---------------------------------------------------

    def _star_vec(self, c):
        i = STAR_LABELS.index(c)
        if self.n % 2:
            return (0, 2, 1, 3)[i]  # Z/4: far1 generates, near = 2*far1
        return ((0, 0), (1, 1), (1, 0), (0, 1))[i]

    def _star_label(self, v):
        for c in STAR_LABELS:
            if self._star_vec(c) == v:
                return c
        raise AssertionError(v)

    def add(self, c1, c2) -> Label:
        c1, c2 = self.label(c1), self.label(c2)
        if self.kind == "I*":
            a, b = self._star_vec(c1), self._star_vec(c2)
            if self.n % 2:
                return self._star_label((a + b) % 4)
            return self._star_label(((a[0] + b[0]) % 2, (a[1] + b[1]) % 2))
        return (c1 + c2) % len(self.labels)

    def neg(self, c) -> Label:
        c = self.label(c)
        if self.kind == "I*":
            if self.n % 2:
                return self._star_label((-self._star_vec(c)) % 4)
            return c
        return (-c) % len(self.labels)

    def order_of(self, c) -> int:
        c = self.label(c)
        k, acc = 1, c
        while acc != self.zero:
            acc = self.add(acc, c)
            k += 1
        return k

    def canonical(self, c) -> Label:
        """Representative of ``c`` under the fibre's diagram automorphisms."""
        c = self.label(c)
        if self.kind == "I*":
            if c == "far2" or (self.n == 0 and c in ("far1", "far2")):
                return "near" if self.n == 0 else "far1"
            return c
        if self.kind in ("I", "IV", "IV*"):
            m = len(self.labels)
            return min(c, (m - c) % m)
        return c

    @property
    def root_type(self) -> str:
        if self.kind == "I":
            return f"A{self.n - 1}" if self.n >= 2 else ""
        if self.kind == "I*":
            return f"D{self.n + 4}"
        return _ROOTS.get(self.kind, "")


def euler_number(f: FiberInstance) -> int:
    if f.kind == "I":
        return f.n
    if f.kind == "I*":
        return f.n + 6
    return _EULER[f.kind]


def component_group_order(f: FiberInstance) -> int:
    if f.kind == "I":
        return max(f.n, 1)
    if f.kind == "I*":
        return 4
    return _GROUP[f.kind]


def contribution(f: FiberInstance, c) -> Fraction:
    """Local correction term for a section meeting component ``c``."""
    return pair_contribution(f, c, c)


def pair_contribution(f: FiberInstance, c1, c2) -> Fraction:
    """Local correction term in the pairing of sections meeting ``c1``, ``c2``."""
    c1, c2 = f.label(c1), f.label(c2)
    if c1 == f.zero or c2 == f.zero:
        return Fraction(0)
    if f.kind == "I":
        a, b = sorted((c1, c2))
        return Fraction(a * (f.n - b), f.n)
    if f.kind == "I*":
        if c1 == c2 == "near":
            return Fraction(1)
        if "near" in (c1, c2):
            return Fraction(1, 2)
        if c1 == c2:
            return 1 + Fraction(f.n, 4)
        return Fraction(f.n + 2, 4)
    if c1 == c2:
        return _DIAG[f.kind]
    return _OFF[f.kind]


# --- parsing -----------------------------------------------------------------

_ROOT_RE = re.compile(r"^(\d*)([ADE])(\d+)(?:x(\d+))?$", re.IGNORECASE)


def parse_fiber(tok: str) -> FiberInstance:
    fibers = _parse_token(tok)
    if len(fibers) != 1:
        raise ValueError(f"expected a single fibre, got {tok!r}")
    return fibers[0]


def _parse_token(tok: str) -> List[FiberInstance]:
    t = tok.strip().replace(" ", "")
    m = re.match(r"^(.*?)(?:x(\d+))?$", t, re.IGNORECASE)
    body, mult = m.group(1), int(m.group(2) or 1)
    b = body.upper()
    if b in ADDITIVE:
        f = FiberInstance(b)
    else:
        mm = re.match(r"^I(\d+)(\*?)$", b)
        if not mm:
            raise ValueError(f"cannot parse fibre {tok!r}")
        f = FiberInstance("I*" if mm.group(2) else "I", int(mm.group(1)))
    return [f] * mult


def parse_fibers(text: str) -> List[FiberInstance]:
    """Parse ``"I0*,I0*,I6,I3,I2,I1"`` or ``"I2*x2,I2x4"`` into fibres."""
    if isinstance(text, (list, tuple)):
        return [f if isinstance(f, FiberInstance) else _parse_token(f)[0] for f in text]
    text = text.strip()
    if not text:
        return []
    out: List[FiberInstance] = []
    for tok in text.split(","):
        if tok.strip():
            out.extend(_parse_token(tok))
    return out


def fiber_from_root(name: str) -> FiberInstance:
    kind, n = name[0].upper(), int(name[1:])
    if kind == "A":
        if n < 1:
            raise ValueError("A_n needs n >= 1")
        return FiberInstance("I", n + 1)
    if kind == "D":
        if n < 4:
            raise ValueError("D_n needs n >= 4")
        return FiberInstance("I*", n - 4)
    if kind == "E" and n in (6, 7, 8):
        return FiberInstance({6: "IV*", 7: "III*", 8: "II*"}[n])
    raise ValueError(f"unknown root type {name!r}")


def parse_frame(text: str) -> List[FiberInstance]:
    """Parse a root-lattice frame such as ``"A7+8A1"`` or ``"D6+D4x2+A1x2"``.

    ``A_n`` is read as ``I_{n+1}``, ``D_n`` as ``I*_{n-4}`` and ``E_6,7,8`` as
    ``IV*, III*, II*``.  Falls back to the fibre-list syntax when the text
    contains commas.
    """
    if "," in text:
        return parse_fibers(text)
    out: List[FiberInstance] = []
    for tok in text.replace(" ", "").split("+"):
        m = _ROOT_RE.match(tok)
        if not m:
            raise ValueError(f"cannot parse frame component {tok!r}")
        mult = int(m.group(1) or 1) * int(m.group(4) or 1)
        out.extend([fiber_from_root(m.group(2) + m.group(3))] * mult)
    return out


def format_fibers(fibers: Sequence[FiberInstance]) -> str:
    return ",".join(str(f) for f in fibers)
