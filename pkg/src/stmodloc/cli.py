"""Command-line interface: ``stmodloc <command> ...``.

Exit codes: 0 verified, 1 a check failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import ff
from .algebra import CoproductKind, GroupAlgebra, Split
from .modules import (
    BUDGET_ENV,
    MAX_BUDGET,
    KGModule,
    ModuleError,
    omega_n,
    trivial_module,
)
from .resolutions import (
    ResolutionError,
    build_canonical_sequence,
    corrupt_sequence,
    minimal_resolution,
    rank2_omega_iso,
    tensor_resolution,
    tensor_window_check,
    verify_exact,
    verify_resolution_laws,
)
from .tate import (
    TateError,
    endo_ring_table,
    localization_ring_view,
    locality_decay_check,
    support_report,
    tate_dim,
    z_point_module,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    algebra: GroupAlgebra | None = None
    n: int = 1
    N: int = 1
    fmt: str = "json"
    budget: int | None = None
    D: int = 1

    def __post_init__(self):
        for name in ("n", "N", "D"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        if self.budget is not None and not 1 <= self.budget <= MAX_BUDGET:
            raise InputError(f"budget must lie in [1, {MAX_BUDGET}]")
        if self.fmt not in ("json", "text"):
            raise InputError("format must be json or text")


def parse_algebra(text: str | None, p: int | None = None) -> GroupAlgebra:
    """Accept '{"p": 2, "exponents": [2, 2]}' or an exponent list '[2, 2]' with --p."""
    if text is None:
        raise InputError("an algebra is required")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"algebra is not valid JSON: {exc}") from None
    try:
        if isinstance(obj, dict):
            if p is not None and int(obj["p"]) != p:
                raise InputError("--p disagrees with the algebra's p")
            return GroupAlgebra.from_json(obj)
        if isinstance(obj, list):
            if p is None:
                raise InputError("an exponent list needs --p")
            return GroupAlgebra(p, tuple(int(e) for e in obj))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed algebra: {exc}") from None
    raise InputError("algebra must be an object or an exponent list")


def load_module(path: str) -> KGModule:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read module file {path}: {exc}") from None
    try:
        return KGModule.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed module file: {exc}") from None


# commands: each returns (exit code, report)

def cmd_resolve(args) -> tuple[int, dict]:
    A = parse_algebra(args.algebra, args.p)
    target = load_module(args.module) if args.module else trivial_module(A)
    if target.algebra != A:
        raise InputError("module is over a different algebra")
    P = minimal_resolution(A, target, args.length)
    out = P.to_json() if args.full else {"algebra": A.to_json(), "betti": P.betti}
    out.update({"minimal": P.minimal, "exact": P.is_exact()})
    return (EXIT_OK if P.minimal and P.is_exact() else EXIT_FAIL), out


def cmd_omega(args) -> tuple[int, dict]:
    if args.module:
        M = load_module(args.module)
    else:
        M = trivial_module(parse_algebra(args.algebra, args.p))
    W = omega_n(M, args.n)
    return EXIT_OK, {"n": args.n, "dim": W.dim, "module": W.to_json()}


def _verify_canon(args):
    H = parse_algebra(args.H, args.p)
    P = minimal_resolution(H, length=2 * args.n)
    seq = build_canonical_sequence(P, args.n, Split.extend(H))
    if args.corrupt:
        seq = corrupt_sequence(seq)
    rep = verify_exact(seq)
    return rep.passed, rep.to_json()


def _verify_rank2(args):
    if args.p is None:
        raise InputError("rank2-iso needs --p")
    rep = rank2_omega_iso(args.p, args.n)
    return rep.passed, rep.to_json()


def _verify_laws(args):
    H = parse_algebra(args.H, args.p)
    rep = verify_resolution_laws(H, args.n)
    return rep.passed, rep.to_json()


def _verify_window(args):
    H = parse_algebra(args.H, args.p)
    P = minimal_resolution(H, length=2 * args.n - 1)
    rep = tensor_window_check(P, args.n)
    return rep.passed, rep.to_json()


def _verify_locality(args):
    H = parse_algebra(args.H, args.p)
    split = Split.extend(H)
    P = minimal_resolution(H, length=2 * (args.n + args.m_max) - 1)
    T = trivial_module(split.G) if args.control else z_point_module(split)
    rep = locality_decay_check(T, P, args.n, args.m_max, split)
    out = rep.to_json()
    out["T"] = "trivial" if args.control else "z-point"
    # the control is expected not to decay
    ok = (not rep.passed) if args.control else rep.passed
    return ok, out


CHECKS = {
    "canon-seq": _verify_canon,
    "rank2-iso": _verify_rank2,
    "lemma31": _verify_laws,
    "tensor-window": _verify_window,
    "locality-decay": _verify_locality,
}


def cmd_verify(args) -> tuple[int, dict]:
    if args.corrupt and args.check != "canon-seq":
        raise InputError("--corrupt is only available for canon-seq")
    ok, report = CHECKS[args.check](args)
    report = {"check": args.check, "result": "pass" if ok else "fail", "report": report}
    return (EXIT_OK if ok else EXIT_FAIL), report


def cmd_tate(args) -> tuple[int, dict]:
    H = parse_algebra(args.H, args.p)
    P = minimal_resolution(H, length=args.N + 1)
    rows = []
    ok = True
    for d in range(-args.N, args.N + 1):
        homology = tate_dim(H, d, resolution=P)
        betti = tate_dim(H, d, method="betti", resolution=P)
        ok &= homology == betti
        rows.append({"degree": d, "dim": homology, "betti_route": betti})
    dual = all(tate_dim(H, -n, resolution=P) == tate_dim(H, n - 1, resolution=P)
               for n in range(1, args.N + 1))
    table = endo_ring_table(H, args.N)
    out = {"H": H.to_json(), "N": args.N, "dims": rows, "duality": dual,
           "products": table.to_json()["products"]}
    return (EXIT_OK if ok and dual else EXIT_FAIL), out


def cmd_endo(args) -> tuple[int, dict]:
    H = parse_algebra(args.H, args.p)
    resolution = None
    if args.coproduct != "none":
        P = minimal_resolution(H, length=args.N)
        resolution = tensor_resolution(P, P, CoproductKind(args.coproduct))
    table = endo_ring_table(H, args.N, resolution)
    out = table.to_json()
    if H.ngens == 1:
        out["localization"] = localization_ring_view(H, args.N, table).to_json()
        ok = out["localization"]["match"]
    else:
        ok = True
    return (EXIT_OK if ok else EXIT_FAIL), out


def cmd_support(args) -> tuple[int, list]:
    M = load_module(args.module)
    rep = support_report(M, args.D, module_id=os.path.basename(args.module))
    return EXIT_OK, rep.to_json()


COMMANDS = {
    "resolve": cmd_resolve,
    "omega": cmd_omega,
    "verify": cmd_verify,
    "tate": cmd_tate,
    "endo": cmd_endo,
    "support": cmd_support,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stmodloc", description=__doc__.splitlines()[0])
    ap.add_argument("--format", dest="fmt", choices=["json", "text"], default="json")
    ap.add_argument("--budget", type=int, default=None,
                    help=f"stable-iso enumeration budget (also {BUDGET_ENV})")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, *, alg="--H"):
        sp.add_argument("--format", dest="fmt", choices=["json", "text"], default=argparse.SUPPRESS)
        sp.add_argument("--budget", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--p", type=int, default=None)
        if alg:
            sp.add_argument(alg, dest="H" if alg == "--H" else "algebra", default=None)

    sp = sub.add_parser("resolve", help="minimal resolution and Betti numbers")
    common(sp, alg="--algebra")
    sp.add_argument("--module", default=None)
    sp.add_argument("--length", type=int, default=6)
    sp.add_argument("--full", action="store_true", help="include the boundary matrices")

    sp = sub.add_parser("omega", help="Omega^n of a module (negative n allowed)")
    common(sp, alg="--algebra")
    sp.add_argument("--module", default=None)
    sp.add_argument("--n", type=int, default=1)

    sp = sub.add_parser("verify", help="run a verification check")
    sp.add_argument("check", choices=sorted(CHECKS))
    common(sp)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m-max", dest="m_max", type=int, default=4)
    sp.add_argument("--control", action="store_true", help="use T = k (expected not to decay)")
    sp.add_argument("--corrupt", action="store_true", help="perturb theta before checking (canon-seq only)")

    sp = sub.add_parser("tate", help="Tate cohomology dimensions and products")
    common(sp)
    sp.add_argument("--N", type=int, default=6)

    sp = sub.add_parser("endo", help="endomorphism ring table of k")
    common(sp)
    sp.add_argument("--N", type=int, default=6)
    sp.add_argument("--coproduct", choices=["none", "group_like", "primitive"], default="none",
                    help="compute products on P (x) P built with this coproduct")

    sp = sub.add_parser("support", help="freeness along pi-points")
    common(sp, alg=None)
    sp.add_argument("--module", required=True)
    sp.add_argument("--D", type=int, default=1)
    return ap


def _text(obj, prefix="") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{prefix}{k}:")
                lines.extend(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v)}")
        return lines
    if isinstance(obj, list):
        lines = []
        for v in obj:
            lines.append(f"{prefix}- {json.dumps(v, separators=(', ', ': '))}")
        return lines
    return [f"{prefix}{json.dumps(obj)}"]


def _flat(v) -> bool:
    items = v.values() if isinstance(v, dict) else v
    return all(not isinstance(x, (dict, list)) for x in items)


def render(report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    return "\n".join(_text(report))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        # omega takes any integer n; everything else needs positive bounds
        n = args.n if args.command == "verify" else 1
        RunConfig(args.command, None, n, getattr(args, "N", 1), args.fmt, args.budget,
                  getattr(args, "D", 1))
        if getattr(args, "length", 1) < 1:
            raise InputError("length must be positive")
        if getattr(args, "m_max", 0) < 0:
            raise InputError("m-max must be nonnegative")
        if args.budget is not None:
            os.environ[BUDGET_ENV] = str(args.budget)
        code, report = COMMANDS[args.command](args)
    except (InputError, ValueError, ff.ModulusError, ModuleError, ResolutionError,
            TateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(render(report, args.fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
