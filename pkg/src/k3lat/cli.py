"""Command-line front end: ``k3lat <subcommand> [options]``.

Exit codes: 0 success, 1 input error, 2 a validation found a violation,
64 unknown subcommand.  Rationals are printed as ``p/q``.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence

from . import arithmod, corrgraph, exactnum, fibrations, kodaira, lattices, mwheights, pointhunt
from .exactnum import fmt_rat, rat

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2, 64


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


# --- input helpers -----------------------------------------------------------

def golden_dir() -> Path:
    return Path(str(resources.files("k3lat") / "golden"))


def resolve_config(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    g = golden_dir() / name
    if g.exists():
        return g
    if not name.endswith(".json") and (golden_dir() / f"{name}.json").exists():
        return golden_dir() / f"{name}.json"
    raise InputError(f"config not found: {name}")


def load_json(name: str):
    try:
        return json.loads(resolve_config(name).read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{name}: invalid JSON ({e})") from None


def parse_list(text: Optional[str], conv=str) -> list:
    if text is None or not str(text).strip():
        return []
    return [conv(t.strip()) for t in str(text).split(",") if t.strip()]


def parse_int_range(text: str) -> List[int]:
    """``"1..6"``, ``"3"`` or ``"1,2,5"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def parse_matrix(text: str) -> list:
    """``"3/2,0;0,3/4"`` (rows separated by ``;``) or a JSON array."""
    text = text.strip()
    if text.startswith("["):
        return json.loads(text)
    if not text:
        return []
    return [[t.strip() for t in row.split(",")] for row in text.split(";")]


def parse_residues(text: str) -> exactnum.ResidueSystem:
    entries = []
    for tok in parse_list(text):
        p, a = tok.split(":")
        entries.append((int(p), int(a)))
    return exactnum.ResidueSystem(entries)


def surface_from_args(args) -> mwheights.SurfaceConfig:
    data = load_json(args.config) if getattr(args, "config", None) else {}
    data = dict(data)
    if getattr(args, "frame", None):
        data["fibers"] = kodaira.format_fibers(kodaira.parse_frame(args.frame))
    if getattr(args, "fibers", None):
        data["fibers"] = args.fibers
    if getattr(args, "chi", None) is not None:
        data["chi"] = args.chi
    if getattr(args, "torsion", None):
        data["torsion"] = parse_list(args.torsion, int)
    if getattr(args, "mw_gram", None):
        data["mw_gram"] = parse_matrix(args.mw_gram)
    if "fibers" not in data:
        raise InputError("give --fibers, --frame or --config")
    return mwheights.SurfaceConfig.from_json(data)


def section_from(cfg, contacts: Optional[str], e: Optional[int], index: int, label: str):
    if contacts is not None:
        return cfg.section(parse_list(contacts), e or 0)
    if len(cfg.sections) > index:
        s = cfg.sections[index]
        return s if e is None else mwheights.SectionContact(s.contacts, e)
    raise InputError(f"give {label} or a config with sections")


def fibration_from_args(args) -> fibrations.FibrationData:
    data = dict(load_json(args.config)) if getattr(args, "config", None) else {}
    if getattr(args, "chi", None) is not None:
        data["chi"] = args.chi
    if getattr(args, "fibers", None) is not None:
        data["fibers"] = args.fibers
    if getattr(args, "multiple", None) is not None:
        data["multiple"] = parse_list(args.multiple, int)
    return fibrations.FibrationData.from_json(data)


def lattice_from_args(args) -> lattices.GramLattice:
    if args.gram:
        return lattices.GramLattice(parse_matrix(args.gram))
    if args.named:
        return named_lattice(args.named)
    if args.config:
        return lattices.GramLattice.from_json(load_json(args.config))
    raise InputError("give --gram, --named or --config")


def named_lattice(text: str) -> lattices.GramLattice:
    """Direct sums such as ``"U+A2+<6>"`` or ``"2U+E8"``."""
    out = None
    for tok in text.replace(" ", "").split("+"):
        mult = 1
        i = 0
        while i < len(tok) and tok[i].isdigit():
            i += 1
        if i and i < len(tok):
            mult, tok = int(tok[:i]), tok[i:]
        if tok.upper() == "U":
            piece = lattices.U()
        elif tok.startswith("<") and tok.endswith(">"):
            piece = lattices.diag_lattice(rat(tok[1:-1]))
        else:
            piece = lattices.root_lattice(tok)
        for _ in range(mult):
            out = piece if out is None else out + piece
    if out is None:
        raise InputError("empty lattice name")
    return out


def scheme_from_args(args) -> pointhunt.ProjScheme:
    if args.scheme:
        data = load_json(args.scheme)
        return pointhunt.ProjScheme.from_strings(
            data.get("polys", []), int(data.get("dim", 0)), data.get("variables"), data.get("num_vars")
        )
    variables = parse_list(args.vars) if args.vars else None
    if args.dim is None:
        raise InputError("give --dim")
    return pointhunt.ProjScheme.from_strings(args.poly or [], args.dim, variables, args.num_vars)


# --- output ------------------------------------------------------------------

class Output:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: List[str] = []
        self.data = None

    def emit(self, human: str, data=None):
        self.lines.append(human)
        if data is not None:
            self.data = data

    def flush(self, stream):
        if self.as_json:
            stream.write(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        else:
            for line in self.lines:
                stream.write(line + "\n")


def fmt_matrix(m) -> str:
    return "\n".join(" ".join(fmt_rat(x) for x in row) for row in m)


def fmt_places(places) -> str:
    items = sorted(places, key=lambda v: (v == lattices.INF, v if v != lattices.INF else 0))
    return "{" + ", ".join(str(v) for v in items) + "}"


# --- commands ----------------------------------------------------------------

def cmd_height(args, out):
    cfg = surface_from_args(args)
    s = section_from(cfg, args.contacts, args.e, args.section, "--contacts")
    h = mwheights.height(cfg, s)
    out.emit(fmt_rat(h), {"section": s.to_json(), "height": fmt_rat(h)})


def cmd_pairing(args, out):
    cfg = surface_from_args(args)
    s = section_from(cfg, args.s, args.se, 0, "--s")
    t = section_from(cfg, args.t, args.te, 1 if args.t is None and len(cfg.sections) > 1 else 0, "--t")
    st = args.st
    if st is None and args.config:
        st = load_json(args.config).get("section_product")
    v = mwheights.pairing(cfg, s, t, st)
    out.emit(fmt_rat(v), {"s": s.to_json(), "t": t.to_json(), "st": st, "pairing": fmt_rat(v)})


def cmd_nsdet(args, out):
    cfg = surface_from_args(args)
    d = mwheights.ns_determinant(cfg)
    out.emit(fmt_rat(d), {"nsdet": fmt_rat(d), "torsion": cfg.torsion_order, "fibers": kodaira.format_fibers(cfg.fibers)})


def cmd_solve_contacts(args, out):
    cfg = surface_from_args(args)
    pats = mwheights.solve_contacts(cfg, rat(args.target), e_max=args.e_max, reduce=not args.no_reduce)
    for s in pats:
        out.emit(str(s))
    if not pats:
        out.emit("no patterns")
    out.emit(f"{len(pats)} pattern(s)", {"target": args.target, "patterns": [s.to_json() for s in pats]})


def cmd_torsion(args, out):
    cfg = surface_from_args(args)
    cands = mwheights.torsion_candidates(cfg, reduce=not args.no_reduce)
    for s in cands:
        out.emit(str(s))
    data = {"candidates": [s.to_json() for s in cands]}
    if args.group:
        groups = mwheights.torsion_groups(mwheights.SurfaceConfig(cfg.chi, cfg.fibers), parse_list(args.group, int))
        out.emit(f"{len(groups)} subgroup(s) of type {args.group}")
        data["groups"] = [sorted([list(v) for v in G], key=str) for G in groups]
    out.emit(f"{len(cands)} candidate(s)", data)


def cmd_exclude_disc(args, out):
    data = dict(load_json(args.config)) if args.config else {}
    frame = args.frame or data.get("frame") or data.get("fibers")
    if not frame:
        raise InputError("give --frame")
    fibers = kodaira.parse_frame(frame)
    rank = args.rank if args.rank is not None else int(data.get("rank", 1))
    torsion = parse_list(args.torsion, int) if args.torsion else data.get("torsion", [])
    cands = parse_list(args.candidates) if args.candidates else data.get("candidates", [])
    chi = args.chi if args.chi is not None else int(data.get("chi", 2))
    verdicts = mwheights.exclude_discriminant(fibers, rank, torsion, cands, chi=chi, e_max=args.e_max)
    for v in verdicts:
        status = "feasible" if v.feasible else "infeasible"
        out.emit(f"{fmt_rat(v.candidate)}: {status}")
        for c in v.certificate:
            out.emit(f"  {c}")
        if v.witness:
            out.emit(f"  witness: {v.witness}")
    out.emit("", {"frame": frame, "verdicts": [v.to_json() for v in verdicts]})
    out.lines.pop()


def cmd_euler(args, out):
    fd = fibration_from_args(args)
    complete = args.complete or (bool(load_json(args.config).get("complete")) if args.config else False)
    r = fibrations.euler_check(fd, complete)
    out.emit(str(r), {"sum": r.total, "expected": r.expected, "deficit": r.deficit, "ok": r.ok, "complete": complete})
    return EXIT_OK if r.ok else EXIT_VIOLATION


def cmd_plurigenus(args, out):
    fd = fibration_from_args(args)
    ns = parse_int_range(args.n)
    vals = [fibrations.plurigenus(fd, n) for n in ns]
    out.emit(" ".join(str(v) for v in vals), {"n": ns, "h0": vals})


def cmd_kodaira_dim(args, out):
    fd = fibration_from_args(args)
    kd = fibrations.kodaira_dimension(fd)
    s = fibrations.format_kodaira_dimension(kd)
    out.emit(s, {"kodaira_dimension": s, "canonical_degree": fmt_rat(fd.canonical_degree)})


def cmd_quotient_k2(args, out):
    r = fibrations.quotient_canonical_square(args.ks2, not args.non_canonical)
    out.emit(str(r), {"exact": r.exact, "bound": None if r.bound is None else fmt_rat(r.bound)})


def _load_moves(args):
    return corrgraph.load_chain(load_json(args.chain))


def cmd_corr_validate(args, out):
    moves = _load_moves(args)
    results = [corrgraph.validate_move(m) for m in moves]
    rows = []
    for m, r in zip(moves, results):
        out.emit(f"{m.source.name} -> {m.target.name}  {m.label()}  {r}")
        rows.append({"source": m.source.name, "target": m.target.name, "move": m.label(), "status": r.status, "message": r.message})
    out.emit("", rows)
    out.lines.pop()
    return EXIT_VIOLATION if any(r.status == corrgraph.VIOLATION for r in results) else EXIT_OK


def cmd_corr_chain(args, out):
    rep = corrgraph.chain_report(_load_moves(args))
    for label, r in zip(rep.labels, rep.results):
        out.emit(f"{label}  {r}")
    out.emit(f"degree class: {rep.degree_class}")
    if rep.disc_ratio is not None:
        out.emit(f"|disc| ratio: {fmt_rat(rep.disc_ratio)}")
    if rep.square_class_ok is not None:
        out.emit(f"square class preserved: {rep.square_class_ok}")
    if rep.conic_ok is not None:
        out.emit(f"conic invariant preserved: {rep.conic_ok}")
    out.emit("ok" if rep.ok else f"violation at move {rep.first_violation}", rep.to_json())
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_smooth_diameter(args, out):
    ok = corrgraph.smooth_diameter_check(rat(args.disc), args.diameter, args.bound)
    s = "consistent" if ok else "inconsistent"
    out.emit(s, {"consistent": ok})
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_al_matrix(args, out):
    sp = arithmod.OldformSpace(args.label, args.p, args.w, args.d, args.s)
    m = arithmod.al_matrix(sp)
    inv = arithmod.al_involution_check(sp)
    out.emit(fmt_matrix(m))
    out.emit(f"involution: {inv}", {"matrix": [[fmt_rat(x) for x in row] for row in m], "involution": inv})


def cmd_diameter(args, out):
    g = arithmod.IsogenyClassGraph.from_json(load_json(args.graph))
    if args.pair:
        i, j = parse_list(args.pair)
        i, j = (int(i) if i.isdigit() else i), (int(j) if j.isdigit() else j)
        d = arithmod.min_isogeny_degree(g, i, j)
        out.emit(str(d), {"min_degree": d})
    else:
        d = arithmod.diameter(g)
        out.emit(str(d), {"diameter": d})


def cmd_crt(args, out):
    n, x = exactnum.crt_combine(parse_residues(args.residues))
    out.emit(f"{x} mod {n}", {"modulus": n, "residue": x})


def cmd_reconstruct(args, out):
    r = exactnum.rational_reconstruct(parse_residues(args.residues), args.margin)
    s = "no confident answer" if r is None else fmt_rat(r)
    out.emit(s, {"value": None if r is None else fmt_rat(r)})


def cmd_hunt(args, out):
    S = scheme_from_args(args)
    rep = pointhunt.hunt(S, parse_list(args.primes, int), args.strategy, args.margin)
    for p, reason in sorted(rep.skipped.items()):
        out.emit(f"p={p}: skipped ({reason})")
    for p, pts in rep.runs:
        out.emit(f"p={p}: {len(pts)} singular: " + " ".join(str(pt) for pt in pts))
    for c in rep.candidates:
        extra = "" if not c.split else " " + "; ".join(f"{k}: {list(v)}" for k, v in c.split.items())
        out.emit(f"candidate {c.point_str()} verified={c.verified} ({c.note}){extra}")
    out.emit("", {
        "skipped": {str(p): r for p, r in sorted(rep.skipped.items())},
        "runs": [{"prime": p, "points": [list(pt.coords) for pt in pts]} for p, pts in rep.runs],
        "candidates": [c.to_json() for c in rep.candidates],
    })
    out.lines.pop()


def cmd_count_points(args, out):
    S = scheme_from_args(args)
    seq = pointhunt.count_points_sequence(S, parse_list(args.primes, int))
    for p, c in seq:
        out.emit(f"{p} {c}")
    out.emit("", [[p, c] for p, c in seq])
    out.lines.pop()


def cmd_lattice(args, out):
    op = args.op
    if op == "square-class":
        if args.x is None:
            raise InputError("give --x")
        sc = lattices.square_class(rat(args.x))
        out.emit(f"({sc.sign}, {sc.squarefree_part})", {"sign": sc.sign, "squarefree_part": sc.squarefree_part})
        return
    L = lattice_from_args(args)
    if op == "disc":
        d = lattices.disc(L)
        sig = L.signature()
        out.emit(f"det {fmt_rat(d)} |det| {fmt_rat(abs(d))} signature ({sig[0]},{sig[1]})",
                 {"det": fmt_rat(d), "abs_det": fmt_rat(abs(d)), "signature": list(sig)})
        return
    if op == "conic":
        places = lattices.conic_invariant(L)
        out.emit(fmt_places(places), {"places": [str(v) for v in sorted(places, key=str)]})
        return
    if op in ("twist", "scale"):
        if args.r is None:
            raise InputError("give --r")
        M = lattices.twist(L, rat(args.r)) if op == "twist" else lattices.scale_vectors(L, rat(args.r))
    elif op == "adjoin":
        if args.v is None or args.d is None:
            raise InputError("give --v and --d")
        M = lattices.adjoin_fraction(L, parse_list(args.v, int), args.d, args.require)
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown lattice operation {op}")
    d = lattices.disc(M)
    out.emit(fmt_matrix(M.gram))
    out.emit(f"det {fmt_rat(d)} |det| {fmt_rat(abs(d))}", {"gram": M.to_json(), "det": fmt_rat(d)})


# --- parser ------------------------------------------------------------------

def _add_surface_flags(p, frame=True):
    p.add_argument("--config", help="SurfaceConfig JSON (path or golden-corpus name)")
    p.add_argument("--fibers", help='fibre list, e.g. "I0*,I0*,I6,I3,I2,I1" or "I2*x2,I2x4"')
    if frame:
        p.add_argument("--frame", help='root-lattice frame, e.g. "A7+8A1"')
    p.add_argument("--chi", type=int)
    p.add_argument("--torsion", help="torsion invariant factors, e.g. 2 or 2,2")


def _add_scheme_flags(p):
    p.add_argument("--poly", action="append", help="homogeneous polynomial (repeatable)")
    p.add_argument("--vars", help="comma-separated variable names")
    p.add_argument("--num-vars", type=int)
    p.add_argument("--dim", type=int, help="declared dimension")
    p.add_argument("--scheme", help='scheme JSON: {"polys": [...], "variables": [...], "dim": d}')
    p.add_argument("--primes", required=True, help="comma-separated primes")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    parser = _Parser(prog="k3lat", description="Exact lattice and elliptic-fibration computations.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    p = add("height", cmd_height, "height of a section from its contact pattern")
    _add_surface_flags(p)
    p.add_argument("--contacts", help='component met in each fibre, e.g. "near,near,2,0,0,0"')
    p.add_argument("--e", type=int, help="intersection with the zero section")
    p.add_argument("--section", type=int, default=0, help="index into the config's sections")

    p = add("pairing", cmd_pairing, "height pairing of two sections")
    _add_surface_flags(p)
    p.add_argument("--s")
    p.add_argument("--se", type=int)
    p.add_argument("--t")
    p.add_argument("--te", type=int)
    p.add_argument("--st", type=int, help="intersection number s.t (omit on the diagonal)")

    p = add("nsdet", cmd_nsdet, "Neron-Severi determinant from fibres, MW Gram matrix and torsion")
    _add_surface_flags(p)
    p.add_argument("--mw-gram", help='rows separated by ";", e.g. "3/2,0;0,3/4"')

    p = add("solve-contacts", cmd_solve_contacts, "all contact patterns of a given height")
    _add_surface_flags(p)
    p.add_argument("--target", required=True)
    p.add_argument("--e-max", type=int, default=mwheights.DEFAULT_E_MAX)
    p.add_argument("--no-reduce", action="store_true", help="disable symmetry reduction")

    p = add("torsion", cmd_torsion, "height-0 contact patterns disjoint from the zero section")
    _add_surface_flags(p)
    p.add_argument("--no-reduce", action="store_true")
    p.add_argument("--group", help="also count subgroups of this type, e.g. 2,2")

    p = add("exclude-disc", cmd_exclude_disc, "decide which Picard discriminants a rank-1 frame admits")
    p.add_argument("--config")
    p.add_argument("--frame")
    p.add_argument("--rank", type=int)
    p.add_argument("--torsion")
    p.add_argument("--candidates")
    p.add_argument("--chi", type=int)
    p.add_argument("--e-max", type=int, default=mwheights.DEFAULT_E_MAX)

    for name, func, help_ in (
        ("euler", cmd_euler, "Euler-number check against 12 chi"),
        ("plurigenus", cmd_plurigenus, "plurigenera h0(nK) over P^1 with multiple fibres"),
        ("kodaira-dim", cmd_kodaira_dim,
         "Kodaira dimension; with nonpositive canonical degree, plurigenera are probed for n <= 12*lcm(m_i)"),
    ):
        p = add(name, func, help_)
        p.add_argument("--config")
        p.add_argument("--chi", type=int)
        p.add_argument("--fibers")
        p.add_argument("--multiple", help="multiple-fibre multiplicities, e.g. 2,3")
        if name == "euler":
            p.add_argument("--complete", action="store_true", help="the fibre list is complete")
        if name == "plurigenus":
            p.add_argument("--n", default="1..6", help='indices, e.g. "1..6" or "1,2,12"')

    p = add("quotient-k2", cmd_quotient_k2, "K^2 of the quotient by an involution")
    p.add_argument("--ks2", type=int, required=True)
    p.add_argument("--non-canonical", action="store_true", help="fixed points do not preserve the canonical class")

    for name, func, help_ in (
        ("corr-validate", cmd_corr_validate, "validate each move of a chain file"),
        ("corr-chain", cmd_corr_chain, "validate a chain of moves end to end"),
    ):
        p = add(name, func, help_)
        p.add_argument("--chain", required=True, help="chain JSON (path or golden-corpus name)")

    p = add("smooth-diameter", cmd_smooth_diameter, "is |disc|/diameter smooth?")
    p.add_argument("--disc", required=True)
    p.add_argument("--diameter", type=int, required=True)
    p.add_argument("--bound", type=int, default=5)

    p = add("al-matrix", cmd_al_matrix, "Atkin-Lehner matrix on an oldform space")
    p.add_argument("--label", default="f")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=int, default=1)

    p = add("diameter", cmd_diameter, "isogeny-class diameter (or one distance with --pair)")
    p.add_argument("--graph", required=True)
    p.add_argument("--pair", help="two vertices, e.g. a1,a3")

    p = add("crt", cmd_crt, "combine residues p:a,...")
    p.add_argument("--residues", required=True, help='e.g. "3:2,5:3"')

    p = add("reconstruct", cmd_reconstruct, "rational reconstruction from residues p:a,...")
    p.add_argument("--residues", required=True)
    p.add_argument("--margin", type=int, default=exactnum.CONFIDENCE_MARGIN)

    p = add("hunt", cmd_hunt, "singular points mod p and rational reconstruction")
    _add_scheme_flags(p)
    p.add_argument("--strategy", default="unique", choices=["unique", "coordinate_zero_pattern"])
    p.add_argument("--margin", type=int, default=exactnum.CONFIDENCE_MARGIN)

    p = add("count-points", cmd_count_points, "number of F_p-points per prime")
    _add_scheme_flags(p)

    p = add("lattice", cmd_lattice, "Gram-matrix lattice operations")
    p.add_argument("op", choices=["disc", "twist", "scale", "adjoin", "square-class", "conic"])
    p.add_argument("--gram", help='rows separated by ";", e.g. "2,-1;-1,2"')
    p.add_argument("--named", help='e.g. "U+A2", "2U+<6>", "E8"')
    p.add_argument("--config", help="Gram matrix JSON")
    p.add_argument("--r")
    p.add_argument("--v")
    p.add_argument("--d", type=int)
    p.add_argument("--require", choices=["integral", "even"])
    p.add_argument("--x")
    return parser


COMMANDS = (
    "height", "pairing", "nsdet", "solve-contacts", "torsion", "exclude-disc", "euler", "plurigenus",
    "kodaira-dim", "quotient-k2", "corr-validate", "corr-chain", "smooth-diameter", "al-matrix", "diameter",
    "crt", "reconstruct", "hunt", "count-points", "lattice",
)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    if not argv or (not argv[0].startswith("-") and argv[0] not in COMMANDS):
        parser.print_usage(stderr)
        if argv:
            stderr.write(f"k3lat: unknown subcommand {argv[0]!r}\n")
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except InputError as e:
        stderr.write(f"k3lat: error: {e}\n")
        return EXIT_INPUT
    except SystemExit as e:  # --help
        return int(e.code or 0)
    if not getattr(args, "func", None):
        parser.print_usage(stderr)
        return EXIT_USAGE
    out = Output(getattr(args, "json", False))
    try:
        code = args.func(args, out)
    except (InputError, ValueError, KeyError, TypeError, ZeroDivisionError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        stderr.write(f"k3lat: error: {msg}\n")
        return EXIT_INPUT
    out.flush(stdout)
    return code if code is not None else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
