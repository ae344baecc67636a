"""quilt-lab command line interface.

Subcommands: meander {count,verify,classes}, curvature, quilt {validate,
verify-bijection,determinant,winding-labels}, mating {simulate,calibrate},
fields {rotate,kirchhoff,partition-identity}, verify-all.

Exit codes: 0 success, 1 verification failure, 2 usage error.  All numeric
reports carry provenance (version, seed, parameters); JSON output is
canonical (sorted keys, fixed float formatting) so reruns with the same
seed are byte-identical.  The environment variable QUILTLAB_SEED overrides
--seed everywhere.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import fields as fl
from . import mating as mt
from . import meander as me
from . import quilt as qt
from . import quilt_enum as qe
from . import quilt_winding as qw
from . import curvature as cv
from .errors import QuiltLabError
from ._verify import run_verify_all

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _provenance(args, **extra):
    out = {"version": __version__}
    for key in ("seed", "size", "gamma", "eps", "steps", "grid", "samples",
                "budget", "n", "angle", "charges"):
        if hasattr(args, key):
            out[key] = getattr(args, key)
    out.update(extra)
    return out


def _emit(args, payload):
    text = json.dumps(payload, sort_keys=True, indent=2, default=_jsonify) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonify(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, frozenset):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


# --- meander ---------------------------------------------------------------------


def cmd_meander_count(args):
    if args.method == "pairs":
        count = len(me.enumerate_meanders(args.size))
    else:
        count = me.count_meanders_transfer_matrix(args.size)
    _emit(args, {"provenance": _provenance(args), "count": count,
                 "method": args.method})
    return EXIT_OK


def cmd_meander_verify(args):
    report = me.verify_factorization(args.size)
    payload = report.as_dict()
    payload["provenance"] = _provenance(args)
    _emit(args, payload)
    classes = len(report.classes)
    print(
        f"{report.total_meanders} meanders, {classes} theta-classes, "
        "factorization OK",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_meander_classes(args):
    report = me.verify_factorization(args.size)
    payload = report.as_dict()
    payload["provenance"] = _provenance(args)
    _emit(args, payload)
    return EXIT_OK


# --- curvature -------------------------------------------------------------------


def cmd_curvature(args):
    pts = []
    with open(args.infile) as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            x, y = ln.split(",")
            pts.append((float(x), float(y)))
    curve = cv.PolygonalCurve(vertices=tuple(pts), closed=args.closed)
    total = cv.total_turning(curve)
    _emit(args, {
        "provenance": _provenance(args),
        "turning_radians": total,
        "turning_pi_units": total / math.pi,
        "closed": args.closed,
    })
    return EXIT_OK


# --- quilt -----------------------------------------------------------------------


def _load_template(path):
    with open(path) as fh:
        return qt.template_from_text(fh.read())


def cmd_quilt_validate(args):
    t = _load_template(args.infile)
    if t.face_order is None:
        t = qt.with_face_order(t)
    report = qt.validate_template(t)
    _emit(args, {
        "provenance": _provenance(args),
        "n": report.n,
        "passed": report.passed,
        "conditions": [
            {"name": c.name, "passed": c.passed, "offending_face": c.offending_face}
            for c in report.conditions
        ],
    })
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_quilt_determinant(args):
    t = _load_template(args.infile)
    report = qt.side_length_map_determinant(qt.with_face_order(t))
    _emit(args, {
        "provenance": _provenance(args),
        "det": report.det,
        "det_float": report.det_float,
        "left_tree_size": report.left_tree_size,
        "bijection_ok": report.bijection_ok,
        "triangular_ok": report.triangular_ok,
    })
    return EXIT_OK if report.unit else EXIT_FAIL


def _subtemplate_from_file(path, hole_ids):
    """Rebuild a MarkedSubtemplate by reducing a parent template file."""
    t = qt.with_face_order(_load_template(path))
    marked = sorted(set(range(t.map.n_faces)) - set(int(x) for x in hole_ids))
    return qt.mark_subtemplate(t, marked)


def cmd_quilt_verify_bijection(args):
    tsub = _subtemplate_from_file(args.infile, args.holes.split(","))
    report = qe.verify_product_bijection(
        tsub, args.budget, constructive=not args.no_compose
    )
    _emit(args, {
        "provenance": _provenance(args),
        "fillings": report.n_fillings,
        "factor_sizes": list(report.factor_sizes),
        "injective": report.injective,
        "surjective": report.surjective,
        "composed_checked": report.composed_checked,
    })
    return EXIT_OK


def cmd_quilt_winding_labels(args):
    tsub = _subtemplate_from_file(args.infile, args.holes.split(","))
    fills = qe.enumerate_fillings(tsub, args.budget)
    if len(fills) < 2:
        print("need at least two fillings", file=sys.stderr)
        return EXIT_FAIL
    geom = qw.embed_subtemplate(tsub)
    worst = 0.0
    labels = None
    for other in fills[1:]:
        rep = qw.winding_labels(tsub, fills[0], other, geom=geom)
        worst = max(worst, rep.max_difference)
        labels = rep.labels_a
    _emit(args, {
        "provenance": _provenance(args),
        "fillings": len(fills),
        "max_difference": worst,
        "labels_pi_units": {str(k): v / math.pi for k, v in sorted(labels.items())},
    })
    return EXIT_OK if worst <= qw.LABEL_TOL else EXIT_FAIL


# --- mating ----------------------------------------------------------------------


def cmd_mating_simulate(args):
    p = mt.mot_params(args.gamma, args.eps, args.steps, args.seed)
    res = mt.simulate_discretized_disk(p)
    t = res.quilt.template
    payload = {
        "params": {
            "gamma": p.gamma, "epsilon": p.epsilon, "steps": p.steps,
            "seed": p.seed, "variance": p.variance, "correlation": p.correlation,
        },
        "cells": [[float(x) for x in row] for row in res.cells.interior],
        "init": [res.cells.l0_plus, res.cells.r0_minus, res.cells.r0_plus],
        "end": [res.cells.l_end_minus, res.cells.r_end_minus],
        "quilt": {
            "template": qt.template_to_text(t),
            "next": list(t.map.next_dart),
            "twin": [d ^ 1 for d in range(t.map.n_darts)],
            "lengths": list(res.quilt.lengths),
        },
        "provenance": dict(res.provenance, version=__version__),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_mating_calibrate(args):
    p = mt.mot_params(args.gamma, args.eps, args.steps, args.seed)
    rep = mt.calibrate_covariance(p, n_steps=args.samples)
    lines = ["quantity,target,empirical"]
    lines.append(f"var_L,{rep.target[0]!r},{rep.empirical[0]!r}")
    lines.append(f"var_R,{rep.target[0]!r},{rep.empirical[1]!r}")
    lines.append(f"cov_LR,{rep.target[1]!r},{rep.empirical[2]!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if rep.max_rel_dev < 0.05 else EXIT_FAIL


# --- fields ----------------------------------------------------------------------


def cmd_fields_rotate(args):
    charges = [float(x) for x in args.charges.split(",")]
    n = args.n
    if len(charges) != n:
        raise QuiltLabError(f"expected {n} charges")
    if n == 2:
        c, s = math.cos(args.angle), math.sin(args.angle)
        a = np.array([[c, -s], [s, c]])
    else:
        rng = np.random.default_rng(args.seed)
        a = fl.random_orthogonal(n, rng)
    report = fl.rotation_independence_test(
        args.grid, a, args.samples, args.seed, charges=charges
    )
    _emit(args, {
        "provenance": _provenance(args),
        "max_cross_z": report.max_cross_z,
        "max_marginal_dev_stderr": report.max_marginal_dev_stderr,
        "charge_sum_before": report.charge_sum_before,
        "charge_sum_after": report.charge_sum_after,
        "charge_sum_drift": report.charge_sum_drift,
    })
    ok = (report.max_cross_z < 4.0 and report.max_marginal_dev_stderr < 5.0
          and report.charge_sum_drift < 1e-12)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_fields_kirchhoff(args):
    with open(args.graph) as fh:
        g = fl.load_graph(fh.read())
    count = fl.spanning_tree_count(g)
    _emit(args, {"provenance": _provenance(args), "spanning_trees": count})
    return EXIT_OK


def cmd_fields_partition_identity(args):
    g = fl.grid_graph(args.grid)
    rep = fl.gaussian_partition_identity(g)
    _emit(args, {
        "provenance": _provenance(args),
        "interior_vertices": rep.interior_count,
        "det_exact": rep.det_exact,
        "residual": rep.residual,
    })
    return EXIT_OK if rep.residual < 1e-10 else EXIT_FAIL


# --- verify-all --------------------------------------------------------------------


def cmd_verify_all(args):
    report = run_verify_all(
        seed=args.seed, budget=args.budget, inject_fault=args.inject_fault
    )
    _emit(args, report)
    failures = [c for c in report["checks"] if c["status"] == "fail"]
    for c in report["checks"]:
        print(f"[{c['status'].upper():>5}] {c['name']}", file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="quilt-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=2)

    def add_out(p):
        p.add_argument("--out", default=None)

    p_me = sub.add_parser("meander", help="meander enumeration and verification")
    me_sub = p_me.add_subparsers(dest="subcommand", required=True)
    p = me_sub.add_parser("count")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--method", choices=("pairs", "transfer"), default="pairs")
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_meander_count)
    p = me_sub.add_parser("verify")
    p.add_argument("--size", type=int, required=True)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_meander_verify)
    p = me_sub.add_parser("classes")
    p.add_argument("--size", type=int, required=True)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_meander_classes)

    p = sub.add_parser("curvature", help="total turning of a CSV polyline")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--closed", action="store_true")
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_curvature)

    p_q = sub.add_parser("quilt", help="template validation and factorization")
    q_sub = p_q.add_subparsers(dest="subcommand", required=True)
    p = q_sub.add_parser("validate")
    p.add_argument("--in", dest="infile", required=True)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_quilt_validate)
    p = q_sub.add_parser("determinant")
    p.add_argument("--in", dest="infile", required=True)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_quilt_determinant)
    p = q_sub.add_parser("verify-bijection")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--holes", required=True,
                   help="comma-separated face ids to carve out as holes")
    p.add_argument("--budget", type=int, default=2)
    p.add_argument("--no-compose", action="store_true")
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_quilt_verify_bijection)
    p = q_sub.add_parser("winding-labels")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--holes", required=True)
    p.add_argument("--budget", type=int, default=2)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_quilt_winding_labels)

    p_mt = sub.add_parser("mating", help="mating-of-trees simulator")
    mt_sub = p_mt.add_subparsers(dest="subcommand", required=True)
    p = mt_sub.add_parser("simulate")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=64)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_mating_simulate)
    p = mt_sub.add_parser("calibrate")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--samples", type=int, default=10_000)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_mating_calibrate)

    p_f = sub.add_parser("fields", help="field rotation and lattice identities")
    f_sub = p_f.add_subparsers(dest="subcommand", required=True)
    p = f_sub.add_parser("rotate")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--charges", default="1,1")
    p.add_argument("--angle", type=float, default=math.pi / 4)
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--samples", type=int, default=10_000)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_fields_rotate)
    p = f_sub.add_parser("kirchhoff")
    p.add_argument("--graph", required=True)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_fields_kirchhoff)
    p = f_sub.add_parser("partition-identity")
    p.add_argument("--grid", type=int, default=4)
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_fields_partition_identity)

    p = sub.add_parser("verify-all", help="run the acceptance checks")
    p.add_argument("--budget", type=float, default=None,
                   help="time budget in seconds (0 skips everything)")
    p.add_argument("--inject-fault", default=None,
                   help="test hook: corrupt a named check (e.g. 'determinant')")
    add_seed(p); add_out(p)
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    # argparse mistakes "-2,1" for a flag; fuse value onto --charges
    argv = list(argv)
    for i in range(len(argv) - 1):
        if argv[i] == "--charges":
            argv[i : i + 2] = [f"--charges={argv[i + 1]}"]
            break
    try:
        args = parser.parse_args(argv)
        if getattr(args, "size", None) is not None and args.size < 1:
            parser.error("--size must be >= 1")
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code) if exc.code else EXIT_OK
    seed_env = os.environ.get("QUILTLAB_SEED")
    if seed_env is not None and hasattr(args, "seed"):
        args.seed = int(seed_env)
    try:
        return args.func(args)
    except QuiltLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
