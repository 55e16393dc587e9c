"""Command line entry point: ``biref`` (or ``python -m biref``).

Exit codes: 0 success, 1 a theorem/oracle mismatch, 2 invalid input.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass

from . import io
from .algebra import MAX_Q, NONSQUARE, SQUARE, class_of_minus_one, field_make
from .classify import classify
from .errors import AnisotropicSmallSpace, BirefError, GroupTooLarge, InputError, TheoremViolation
from .linalg import MAX_DIM
from .ortho import BlockSpec, build_from_specs, orthogonal_decompose, random_element, random_isometry, rprofile_example
from .oracle import (
    DEFAULT_CENTRALIZER_DIM_CAP,
    DEFAULT_GROUP_CAP,
    SUITES,
    closure,
    element_certificate,
    property_suite,
    verify_table,
)
from .space import BilinearSpace, witt_index

DEFAULT_MATRIX = [(q, n, d) for q in (3, 5) for n in (2, 3, 4) for d in ("square", "nonsquare")] + [
    (3, 5, "square"),
    (3, 5, "nonsquare"),
]


@dataclass
class Caps:
    group: int = DEFAULT_GROUP_CAP
    cdim: int = DEFAULT_CENTRALIZER_DIM_CAP
    q: int = MAX_Q
    dim: int = MAX_DIM

    @classmethod
    def parse(cls, text: str | None) -> "Caps":
        caps = cls()
        if not text:
            return caps
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in caps.__dataclass_fields__:
                raise InputError(f"unknown cap {key!r}")
            v = int(val)
            if v <= 0:
                raise InputError("caps must be positive")
            setattr(caps, key, v)
        return caps


class Mismatch(Exception):
    """Raised to turn a completed but failing run into exit code 1."""

    def __init__(self, report):
        self.report = report


# ---------------------------------------------------------------- helpers


def _emit(args, report: dict) -> None:
    report = {"seed": args.seed, **report}
    if args.out:
        io.dump(report, args.out)
    if args.json or not args.out:
        if args.json:
            io.dump(report)
        else:
            _print_summary(report)


def _print_summary(report: dict, indent: str = "") -> None:
    for k, v in report.items():
        if isinstance(v, dict):
            print(f"{indent}{k}:")
            _print_summary(v, indent + "  ")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            print(f"{indent}{k}: {len(v)} entries")
        else:
            print(f"{indent}{k}: {v}")


def _check_caps(caps: Caps, S: BilinearSpace) -> None:
    if S.field.q > caps.q:
        raise InputError(f"q = {S.field.q} exceeds cap {caps.q}")
    if S.dim > caps.dim:
        raise InputError(f"dim = {S.dim} exceeds cap {caps.dim}")


def _load_pair(args):
    S = io.space_from_json(io.load(args.space))
    _check_caps(args.caps, S)
    phi = io.element_from_json(S, io.load(args.element))
    return S, phi


def _field_from_args(args):
    modulus = [int(c) for c in args.modulus.split(",")] if getattr(args, "modulus", None) else None
    p, k = args.q, 1
    for cand in range(2, args.q + 1):
        if args.q % cand == 0:
            p = cand
            break
    while p**k < args.q:
        k += 1
    if p**k != args.q:
        raise InputError(f"{args.q} is not a prime power")
    return field_make(p, k, modulus)


def _in_omega_flag(args):
    return None if args.in_omega is None else args.in_omega == "true"


# ---------------------------------------------------------------- commands


def cmd_classify(args) -> int:
    S, phi = _load_pair(args)
    assume = _in_omega_flag(args)
    if assume is None and witt_index(S) == 0 and phi.det == 1:
        raise InputError("Witt index 0: pass --in-omega true|false (Omega is not det/spinor-defined here)")
    v = classify(phi, assume_in_omega=assume, witness=args.witness)
    _emit(args, {"verdict": v.to_json()})
    return 0


def cmd_decompose(args) -> int:
    S, phi = _load_pair(args)
    summary = orthogonal_decompose(phi)
    report = {
        "elementary_divisors": phi.elementary_divisors().to_json(),
        "decomposition": summary.to_json(),
    }
    if args.bases:
        report["bases"] = [io.mat_to_json(S.field, s.basis) for s in summary.summands]
    _emit(args, report)
    return 0


def _write_pair(args, S, phi, extra=None) -> None:
    report = {"space": io.space_to_json(S), "element": io.element_to_json(phi)}
    if extra:
        report.update(extra)
    if args.prefix:
        io.dump({"seed": args.seed, **io.space_to_json(S)}, f"{args.prefix}space.json")
        io.dump({"seed": args.seed, **io.element_to_json(phi)}, f"{args.prefix}element.json")
    _emit(args, report)


def cmd_gen_block(args) -> int:
    F = _field_from_args(args)
    if args.spec:
        obj = io.load(args.spec)
        specs = obj if isinstance(obj, list) else [obj]
    else:
        specs = [
            {
                "block": args.block,
                "eps": args.eps,
                "t": args.t,
                "disc": args.disc,
                "m": args.m,
                "p": [int(c) for c in args.p.split(",")] if args.p else None,
                "d": args.d,
            }
        ]
    S, phi = build_from_specs(F, [BlockSpec.from_json(s) for s in specs])
    _write_pair(args, S, phi, {"blocks": [BlockSpec.from_json(s).to_json() for s in specs]})
    return 0


def cmd_gen_random(args) -> int:
    S = io.space_from_json(io.load(args.space))
    _check_caps(args.caps, S)
    rng = random.Random(args.seed)
    if args.group == "O":
        phi = random_isometry(S, rng, args.reflections)
    else:
        pairs = None if args.reflections is None else max(1, args.reflections // 2)
        phi = random_element(S, args.group, rng, pairs)
    report = {"element": io.element_to_json(phi)}
    if args.prefix:
        io.dump({"seed": args.seed, **io.element_to_json(phi)}, f"{args.prefix}element.json")
    _emit(args, report)
    return 0


def cmd_gen_rprofile(args) -> int:
    S, phi = rprofile_example(args.q)
    _write_pair(args, S, phi)
    return 0


def cmd_oracle_exhaustive(args) -> int:
    S = io.space_from_json(io.load(args.space))
    _check_caps(args.caps, S)
    T = closure(S, cap=args.caps.group)
    rep = verify_table(T).to_json()
    _emit(args, {"table": rep})
    return 0 if rep["status"] == "match" else 1


def cmd_oracle_element(args) -> int:
    S, phi = _load_pair(args)
    assume = _in_omega_flag(args)
    cert = element_certificate(phi, cap_dim=args.caps.cdim, in_omega_known=assume)
    if assume is None and witt_index(S) == 0 and phi.det == 1:
        raise InputError("Witt index 0: pass --in-omega true|false")
    v = classify(phi, assume_in_omega=assume)
    pred = {k: getattr(v, k) for k in ("biref_O", "biref_SO", "biref_Omega", "reversible_Omega")}
    match = pred == cert.flags()
    _emit(args, {"certificate": cert.to_json(), "classify": pred, "match": match})
    return 0 if match else 1


def _parse_cell(text: str):
    fields = dict(part.split("=", 1) for part in text.split(","))
    try:
        q, n, disc = int(fields["q"]), int(fields["dim"]), fields.get("disc", "square")
    except (KeyError, ValueError) as e:
        raise InputError(f"bad cell {text!r}; expected q=..,dim=..,disc=..") from e
    return q, n, disc


def _disc_class(F, disc: str):
    d = disc.strip().lower()
    if d in ("square", "+", "+1", "1"):
        return SQUARE
    if d in ("nonsquare", "non-square"):
        return NONSQUARE
    if d in ("-", "-1"):
        return class_of_minus_one(F)
    raise InputError(f"bad discriminant {disc!r}")


def run_cell(q: int, n: int, disc: str, cap: int) -> dict:
    F = field_make(q)
    cls = _disc_class(F, disc)
    S = BilinearSpace.standard(F, n, cls)
    try:
        T = closure(S, cap=cap)
    except GroupTooLarge as e:
        return {"q": q, "dim": n, "disc": cls.name.lower(), "status": "skipped", "reason": str(e)}
    rep = verify_table(T).to_json()
    rep["class_count"] = len(rep["classes"])
    return rep


def cmd_verify(args) -> int:
    cells = [_parse_cell(c) for c in args.cell] if args.cell else ([] if args.suite else DEFAULT_MATRIX)
    report = {"cells": [], "suites": []}
    failed = False
    for q, n, disc in cells:
        rep = run_cell(q, n, disc, args.caps.group)
        if not args.full:
            rep = {k: v for k, v in rep.items() if k != "classes"}
        report["cells"].append(rep)
        failed |= rep["status"] == "mismatch"
    names = list(SUITES) if "all" in (args.suite or []) else (args.suite or [])
    for name in names:
        rep = property_suite(name)
        report["suites"].append(rep)
        failed |= rep["violations"] > 0
    report["status"] = "mismatch" if failed else "match"
    if args.json or args.out:
        _emit(args, report)
    if not args.json:
        for c in report["cells"]:
            print(
                f"q={c['q']} dim={c['dim']} disc={c['disc']}: {c['status']}"
                + (f" (|O|={c['order']}, |Omega|={c['omega_order']}, classes={c['class_count']})" if "order" in c else "")
            )
        for s in report["suites"]:
            print(f"suite {s['suite']}: {s['instances']} instances, {s['violations']} violations")
        print(report["status"])
    return 1 if failed else 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    def globals_parser(top: bool) -> argparse.ArgumentParser:
        # subcommand copies must not reset values given before the subcommand
        dflt = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--seed", type=int, default=dflt(0), help="seed for every random choice (recorded in reports)")
        g.add_argument("--caps", type=Caps.parse, default=dflt(Caps()), help="e.g. group=2000000,cdim=24,q=81,dim=12")
        g.add_argument("--out", default=dflt(None), help="write the JSON report to this file")
        g.add_argument("--json", action="store_true", default=dflt(False), help="print the JSON report on stdout")
        return g

    common = globals_parser(False)
    ap = argparse.ArgumentParser(prog="biref", description=__doc__.splitlines()[0], parents=[globals_parser(True)])
    sub = ap.add_subparsers(dest="command", required=True)

    def pair_args(p):
        p.add_argument("--space", required=True)
        p.add_argument("--element", required=True)
        p.add_argument("--in-omega", choices=("true", "false"), help="Omega membership on Witt-index-0 spaces")

    p = sub.add_parser("classify", parents=[common], help="full verdict for one isometry")
    pair_args(p)
    p.add_argument("--witness", action="store_true", help="search involutions sigma, tau in Omega with phi = sigma tau")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("decompose", parents=[common], help="orthogonal decomposition into indecomposables")
    pair_args(p)
    p.add_argument("--bases", action="store_true")
    p.set_defaults(func=cmd_decompose)

    gen = sub.add_parser("gen", help="generate spaces and elements").add_subparsers(dest="kind", required=True)
    p = gen.add_parser("block", parents=[common], help="canonical indecomposable block(s)")
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--modulus")
    p.add_argument("--spec", help="JSON file with one block spec or a list of them")
    p.add_argument("--block", choices=("type2pm", "type1", "type2", "type3"), default="type2pm")
    p.add_argument("--eps", type=int, default=1)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--disc", default="square")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--p", help="polynomial coefficients, constant first, e.g. 1,0,1")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--prefix", help="also write <prefix>space.json and <prefix>element.json")
    p.set_defaults(func=cmd_gen_block)

    p = gen.add_parser("random", parents=[common], help="random element from reflections")
    p.add_argument("--space", required=True)
    p.add_argument("--reflections", type=int)
    p.add_argument("--group", choices=("O", "SO", "Omega"), default="O")
    p.add_argument("--prefix")
    p.set_defaults(func=cmd_gen_random)

    p = gen.add_parser("rprofile", parents=[common], help="reversible but not bireflectional witness")
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--prefix")
    p.set_defaults(func=cmd_gen_rprofile)

    orc = sub.add_parser("oracle", help="brute-force ground truth").add_subparsers(dest="kind", required=True)
    p = orc.add_parser("exhaustive", parents=[common], help="enumerate O(V) and compare every class")
    p.add_argument("--space", required=True)
    p.set_defaults(func=cmd_oracle_exhaustive)
    p = orc.add_parser("element", parents=[common], help="centraliser-coset certificate for one element")
    pair_args(p)
    p.set_defaults(func=cmd_oracle_element)

    p = sub.add_parser("verify", parents=[common], help="agreement matrix and property suites")
    p.add_argument("--cell", action="append", help="q=3,dim=4,disc=-1 (repeatable)")
    p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)} or 'all' (repeatable)")
    p.add_argument("--full", action="store_true", help="include per-class rows in the report")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except TheoremViolation as e:
        print(f"mismatch: {e}", file=sys.stderr)
        return 1
    except (InputError, AnisotropicSmallSpace) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except BirefError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
