"""Command-line surface.

Subcommands: `mesh gen`, `thresholds`, `invariant`, `seminorm`,
`verify scaling`, `verify bmo`.  Exit codes: 0 all checks pass, 1 any
check fails, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .geometry import build_sphere_mesh
from .harness import (ConfigError, ExperimentConfig, emit_report,
                      format_report_text, run_bmo_probe, run_scaling)
from .invariants import hardt_riviere
from .linking import gauss_linking_oracle
from .maps import parse_map_spec
from .registry import beta0, catalogue, lookup
from .seminorms import bmo_seminorm, holder_seminorm, sobolev_seminorm


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quanthom")
    sub = ap.add_subparsers(dest="command", required=True)

    mesh = sub.add_parser("mesh", help="mesh utilities")
    mesh_sub = mesh.add_subparsers(dest="mesh_command", required=True)
    gen = mesh_sub.add_parser("gen", help="generate a sphere mesh")
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--level", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--quad-order", type=int, default=4)

    th = sub.add_parser("thresholds", help="exact thresholds and exponents")
    th.add_argument("--all", action="store_true")
    th.add_argument("--structure")
    th.add_argument("--M0", type=int)
    th.add_argument("--Mi", default="")
    th.add_argument("--beta")
    th.add_argument("--json", action="store_true")

    inv = sub.add_parser("invariant", help="evaluate an invariant")
    inv.add_argument("--map", required=True, dest="map_spec")
    inv.add_argument("--structure", required=True)
    inv.add_argument("--level", type=int, required=True)
    inv.add_argument("--oracle", action="store_true")
    inv.add_argument("--json-out")

    sem = sub.add_parser("seminorm", help="estimate a seminorm")
    sem.add_argument("--map", required=True, dest="map_spec")
    sem.add_argument("--kind", choices=["sobolev", "holder", "bmo"],
                     required=True)
    sem.add_argument("--beta", type=float, default=0.5)
    sem.add_argument("--p", type=float)
    sem.add_argument("--samples", type=int, default=200_000)
    sem.add_argument("--seed", type=int, default=0)
    sem.add_argument("--method", default="auto")
    sem.add_argument("--json-out")

    ver = sub.add_parser("verify", help="run verification experiments")
    ver_sub = ver.add_subparsers(dest="verify_command", required=True)
    for name in ("scaling", "bmo"):
        v = ver_sub.add_parser(name)
        v.add_argument("--config", required=True)
    return ap


def _print_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _cmd_mesh(args) -> int:
    mesh = build_sphere_mesh(args.dim, args.level, quad_order=args.quad_order)
    mesh.save(args.out)
    print(f"wrote S^{args.dim} level {args.level}: "
          f"{mesh.n_simplices(0)} vertices, "
          f"{mesh.n_simplices(mesh.dim)} top simplices -> {args.out}")
    return 0


def _threshold_row(entry) -> dict:
    r = entry.report
    return {
        "name": entry.name, "N": r.N, "L": r.L,
        "beta0": str(r.published_beta0) if r.published_beta0 is not None else None,
        "beta0_computed": str(r.beta0) if r.beta0 is not None else None,
        "alpha_star": [str(a) if a is not None else None
                       for a in r.per_term_alpha],
        "theorem_beta0": str(r.theorem_beta0),
        "exponent": f"{r.exponent_numerator}/beta",
        "evaluable": entry.evaluable,
        "note": entry.note,
    }


def _cmd_thresholds(args) -> int:
    if args.M0 is not None:
        Ms = [int(x) for x in args.Mi.split(",") if x.strip()] if args.Mi else []
        b0, astar = beta0(args.M0, Ms)
        N = args.M0 + sum(Ms) - len(Ms)    # degree sum rule: sum M_i = N + L
        out = {"M0": args.M0, "Mi": Ms, "beta0": str(b0),
               "alpha_star": str(astar), "N": N,
               "exponent": f"{N + len(Ms)}/beta"}
        if args.json:
            _print_json(out)
        else:
            print(f"beta0 = {b0}  (alpha* = {astar}), exponent "
                  f"{out['exponent']}")
        return 0
    entries = (list(catalogue().values()) if args.all or not args.structure
               else [lookup(args.structure)])
    rows = [_threshold_row(e) for e in entries]
    if args.beta:
        b = Fraction(args.beta)
        for row, e in zip(rows, entries):
            row["exponent_at_beta"] = str(e.report.exponent(b))
    if args.json:
        _print_json(rows)
    else:
        hdr = f"{'structure':14s} {'N':>2} {'L':>2} {'beta0':>6} {'thm':>5} " \
              f"{'exponent':>9} {'evaluable':>9}"
        print(hdr)
        print("-" * len(hdr))
        for row in rows:
            print(f"{row['name']:14s} {row['N']:>2} {row['L']:>2} "
                  f"{row['beta0'] or '-':>6} {row['theorem_beta0']:>5} "
                  f"{row['exponent']:>9} {str(row['evaluable']):>9}")
    return 0


def _cmd_invariant(args) -> int:
    entry = lookup(args.structure)
    f = parse_map_spec(args.map_spec)
    mesh = build_sphere_mesh(entry.structure.domain_dim, args.level)
    res = hardt_riviere(f, entry.structure, mesh)
    out = res.as_dict()
    out["map"] = args.map_spec
    out["structure"] = entry.name
    if args.oracle:
        if f.domain_dim == 3 and f.target.kind == "sphere" and f.target.dim == 2:
            p = np.array([0.3, 0.4, np.sqrt(1 - 0.25)])
            q = -p
            link = gauss_linking_oracle(f, p / np.linalg.norm(p),
                                        q / np.linalg.norm(q))
            out["oracle"] = {"linking": link.value, "rounded": link.rounded}
        elif f.domain_dim == 1:
            from .invariants import winding_number_oracle
            out["oracle"] = {"winding": winding_number_oracle(f)}
    _print_json(out, args.json_out)
    return 0


def _cmd_seminorm(args) -> int:
    f = parse_map_spec(args.map_spec)
    if args.kind == "sobolev":
        p = args.p if args.p else f.domain_dim / args.beta
        est = sobolev_seminorm(f, args.beta, p, samples=args.samples,
                               seed=args.seed, method=args.method)
    elif args.kind == "holder":
        est = holder_seminorm(f, args.beta, samples=args.samples,
                              seed=args.seed)
    else:
        est = bmo_seminorm(f, seed=args.seed)
    out = est.as_dict()
    out["map"] = args.map_spec
    out["kind"] = args.kind
    _print_json(out, args.json_out)
    return 0


def _cmd_verify(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    report = run_scaling(config) if args.verify_command == "scaling" \
        else run_bmo_probe(config)
    for fmt in ("json", "csv", "text"):
        if fmt in config.outputs:
            emit_report(report, fmt, config.outputs[fmt])
    print(format_report_text(report), end="")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "mesh":
            return _cmd_mesh(args)
        if args.command == "thresholds":
            return _cmd_thresholds(args)
        if args.command == "invariant":
            return _cmd_invariant(args)
        if args.command == "seminorm":
            return _cmd_seminorm(args)
        if args.command == "verify":
            return _cmd_verify(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
