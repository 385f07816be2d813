"""Command line interface: ``spinorsurf groups|analyze|reconstruct|verify``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .analysis import DEFAULT_CASES, FAULTS, VerifySuiteConfig, analyze, verify
from .catalog import catalog_names, default_grid, get_entry
from .errors import SpinorSurfError
from .io import (
    group_tables,
    immersion_to_json,
    read_json,
    report_to_json,
    spinor_from_json,
    spinor_to_json,
    write_json,
)
from .lie import GroupElement, get_group, group_exp
from .reconstruct import integrate_frame
from .spinor import SpinorField, Z_from_spinor

GROUPS = ("nil", "sl2", "sol")


def _params(items):
    out = {}
    for it in items or []:
        key, sep, val = it.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected key=value, got {it!r}")
        out[key] = float(val)
    return out


def _cmd_groups(args):
    write_json(group_tables(args.group), "-")
    return 0


def _cmd_analyze(args):
    entry = get_entry(args.surface)
    if get_group(args.group) is not entry.group:
        print(f"error: {args.surface} is a {entry.group.name.value} surface", file=sys.stderr)
        return 2
    umin, umax, vmin, vmax = entry.domain
    extent = (
        umin if args.umin is None else args.umin,
        umax if args.umax is None else args.umax,
        vmin if args.vmin is None else args.vmin,
        vmax if args.vmax is None else args.vmax,
    )
    grid = default_grid(args.surface, args.nu, args.nv or args.nu, extent)
    params = _params(args.param)
    rep = analyze(args.surface, args.group, grid, params=params or None, fault=args.fault,
                  keep_fields=args.dump_fields or bool(args.spinor_out))
    write_json(report_to_json(rep, dump_fields=args.dump_fields), args.report)
    if args.spinor_out:
        s = SpinorField(np.stack([rep.fields["psi1"], rep.fields["psi2"]]))
        write_json(spinor_to_json(entry.group, grid, s, rep.meanH), args.spinor_out)
    return 0


def _origin(spec, group):
    if spec == "identity":
        return GroupElement.identity(group)
    if spec.startswith("exp:"):
        coords = [float(x) for x in spec[4:].split(",")]
        if len(coords) != 3:
            raise ValueError("origin exp: needs three algebra coordinates")
        return group_exp(group, coords)
    raise ValueError(f"unknown origin {spec!r}; use 'identity' or 'exp:a,b,c'")


def _cmd_reconstruct(args):
    group, grid, s, _ = spinor_from_json(read_json(args.input))
    if args.group and get_group(args.group) is not group:
        print(f"error: input spinor belongs to {group.name.value}", file=sys.stderr)
        return 2
    zf = Z_from_spinor(s)
    res = integrate_frame(zf, group, grid, origin=_origin(args.origin, group),
                          path_order=args.path_order)
    write_json(immersion_to_json(res.immersion, grid, res.winding), args.out)
    print(f"holonomy {res.holonomy_norm:.3e}", file=sys.stderr)
    return 0


def _cmd_verify(args):
    try:
        levels = tuple(int(x) for x in args.levels.split(",") if x.strip())
    except ValueError:
        print(f"error: bad --levels {args.levels!r}", file=sys.stderr)
        return 2
    cases = DEFAULT_CASES
    if args.surfaces:
        wanted = [x.strip() for x in args.surfaces.split(",")]
        for w in wanted:
            get_entry(w)
        cases = tuple(c for c in DEFAULT_CASES if c.surface in wanted)
    cfg = VerifySuiteConfig(levels=levels, cases=cases, fault=args.fault, csv_path=args.csv,
                            json_path=args.json, workers=args.workers)
    res = verify(cfg)
    if "error" in res.summary:
        print(f"error: {res.summary['error']}", file=sys.stderr)
    for label, c in res.summary["cases"].items():
        bad = [x["name"] for x in c["checks"] if not x["pass"]]
        status = "PASS" if c["pass"] else "FAIL " + ", ".join(bad)
        print(f"{label:28s} {status}")
    return res.exit_code


def build_parser():
    p = argparse.ArgumentParser(prog="spinorsurf", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("groups", help="group tables")
    gs = g.add_subparsers(dest="action", required=True)
    show = gs.add_parser("show", help="print connection and curvature tables as JSON")
    show.add_argument("group", choices=GROUPS)
    show.set_defaults(func=_cmd_groups)

    a = sub.add_parser("analyze", help="analyze one catalog surface")
    a.add_argument("--group", required=True, choices=GROUPS)
    a.add_argument("--surface", required=True, choices=catalog_names())
    a.add_argument("--nu", type=int, default=64)
    a.add_argument("--nv", type=int)
    for k in ("umin", "umax", "vmin", "vmax"):
        a.add_argument(f"--{k}", type=float)
    a.add_argument("--param", action="append", metavar="KEY=VALUE", help="surface parameter")
    a.add_argument("--fault", choices=FAULTS, help="inject a deliberate error")
    a.add_argument("--dump-fields", action="store_true")
    a.add_argument("--spinor-out", metavar="PATH", help="also write spinor.json")
    a.add_argument("--report", default="-", help="report path (default stdout)")
    a.set_defaults(func=_cmd_analyze)

    r = sub.add_parser("reconstruct", help="integrate an immersion from spinor.json")
    r.add_argument("--input", required=True)
    r.add_argument("--group", choices=GROUPS)
    r.add_argument("--origin", default="identity", help="'identity' or 'exp:a,b,c'")
    r.add_argument("--path-order", default="rowMajor", choices=("rowMajor", "columnMajor"))
    r.add_argument("--out", default="-")
    r.set_defaults(func=_cmd_reconstruct)

    v = sub.add_parser("verify", help="refinement study over the catalog")
    v.add_argument("--levels", default="32,64,128")
    v.add_argument("--csv")
    v.add_argument("--json")
    v.add_argument("--surfaces", help="comma-separated subset of catalog names")
    v.add_argument("--fault", choices=FAULTS)
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpinorSurfError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
