"""Command-line interface: check, curvature, canonicalize, catalog, verify-paper.

Exit codes: 0 success, 1 negative verdict, 2 input error, 3 indeterminate.
"""
import argparse
import dataclasses
import json
import logging
import sys

import numpy as np

from curvlie import __version__
from curvlie.algebra_core import (DEFAULT_TOLERANCES, IndeterminateError, LieAlgebraError,
                                  LieInputError, PreconditionError)
from curvlie.canonical import classify
from curvlie.catalog import (catalog_grid, catalog_instantiate, families, family_spec, make_form)
from curvlie.documents import SCHEMA_VERSION, AlgebraDocument, RunConfig
from curvlie.extension import snc_test_auto
from curvlie.geometry import curvature_report, is_einstein, is_locally_symmetric, nabla_r, scalar_curvature
from curvlie.verify import CRITERIA, all_hard_passed, run_criteria

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INDETERMINATE = 3


def _plain(value):
    """JSON-ready copy of numpy arrays, complex numbers and nested containers."""
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _matrix_text(m, indent="    "):
    return "\n".join(indent + " ".join(f"{v: .6f}" for v in row) for row in np.atleast_2d(m))


def _complex_text(z):
    if abs(z.imag) <= 1e-12:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def emit(config, command, payload, lines, out=None):
    """Write the result of one command in the configured format."""
    out = out or sys.stdout
    if config.output_format == "json":
        record = {"schema": SCHEMA_VERSION, "command": command}
        record.update(_plain(payload))
        out.write(json.dumps(record, indent=2, sort_keys=True))
        out.write("\n")
    else:
        out.write("\n".join(lines))
        out.write("\n")


def cmd_check(args, config):
    doc = AlgebraDocument.load(args.path)
    tol = config.tolerances
    metric = doc.metric_algebra(tol)
    alg = metric.alg
    derived = alg.derived_subalgebra(tol)
    verdict = snc_test_auto(metric, tol)
    payload = {
        "dim": alg.dim,
        "jacobi_defect": alg.jacobi_defect(),
        "solvable": alg.is_solvable(tol),
        "nilpotent": alg.is_nilpotent(tol),
        "derived_dims": [s.dim for s in alg.derived_series(tol)],
        "lower_central_dims": [s.dim for s in alg.lower_central_series(tol)],
        "derived_dim": derived.dim,
        "snc": verdict.is_snc,
        "reason": verdict.reason,
        "witness_A": verdict.witness_A,
        "spectrum": verdict.eigenvalues,
    }
    lines = [
        f"dimension:          {alg.dim}",
        f"Jacobi defect:      {payload['jacobi_defect']:.3g}",
        f"solvable:           {payload['solvable']}",
        f"nilpotent:          {payload['nilpotent']}",
        f"derived series:     {payload['derived_dims']}",
        f"lower central:      {payload['lower_central_dims']}",
        f"SNC:                {verdict.is_snc} ({verdict.reason})",
    ]
    if verdict.witness_A is not None:
        lines.append("witness A:          " + " ".join(f"{v:.6g}" for v in verdict.witness_A))
    if verdict.eigenvalues:
        lines.append("spectrum:           " + ", ".join(_complex_text(z) for z in verdict.eigenvalues))
    emit(config, "check", payload, lines)
    return EXIT_OK if verdict.is_snc else EXIT_NEGATIVE


def _vector_table(title, label, table, pairs):
    lines = [title]
    lines += [f"    {label(*key)} = " + " ".join(f"{v:.6g}" for v in table[key] + 0.0)
              for key in pairs if np.any(table[key])]
    return lines


def cmd_curvature(args, config):
    doc = AlgebraDocument.load(args.path)
    report = curvature_report(doc.metric_algebra(config.tolerances), config.tolerances)
    payload = dataclasses.asdict(report)
    n = report.u.shape[0]
    lines = _vector_table("U(e_i, e_j):", lambda i, j: f"U(e{i + 1}, e{j + 1})", report.u,
                          [(i, j) for i in range(n) for j in range(i, n)])
    lines += _vector_table("connection (orthonormal frame):",
                           lambda i, j: f"nabla_e{i + 1} e{j + 1}", report.gamma,
                           [(i, j) for i in range(n) for j in range(n)])
    lines += ["Ricci tensor (orthonormal frame):", _matrix_text(report.ricci),
              f"scalar curvature:   {report.scalar:.9g}",
              "Einstein:           " + ("no" if report.einstein is None else f"lambda = {report.einstein:.9g}"),
              f"locally symmetric:  {report.symmetric_space}",
              f"|nabla R|:          {report.nabla_r_norm:.3g}"]
    if report.constant_curvature is not None:
        lines.append(f"constant curvature: {report.constant_curvature:.9g}")
    if report.label is not None:
        lines.append(f"symmetric space:    {report.label}")
    if args.full:
        lines += _vector_table("R(e_i, e_j) e_k:",
                               lambda i, j, k: f"R(e{i + 1}, e{j + 1}) e{k + 1}", report.riemann,
                               [(i, j, k) for i in range(n) for j in range(i + 1, n)
                                for k in range(n)])
    emit(config, "curvature", payload, lines)
    return EXIT_OK


def cmd_canonicalize(args, config):
    doc = AlgebraDocument.load(args.path)
    form = classify(doc.metric_algebra(config.tolerances), config.tolerances)
    payload = {
        "family": form.family,
        "params": form.params,
        "nil_type": form.nil_type,
        "scale": form.scale,
        "trail": [{"stage": step.stage, "direction": step.direction, "p": step.p.m}
                  for step in form.trail],
    }
    lines = [f"family:   {form.family}",
             "params:   " + (", ".join(f"{k}={v:.9g}" for k, v in form.params.items()) or "none"),
             f"nilpotent type: {form.nil_type}",
             f"scale:    {form.scale:.9g}",
             "trail:"]
    for step in form.trail:
        lines.append(f"  {step.stage} ({step.direction})")
        if args.matrices:
            lines.append(_matrix_text(step.p.m))
    emit(config, "canonicalize", payload, lines)
    return EXIT_OK


def _grid_values(spec, values):
    grid = [()]
    for _ in spec.params:
        grid = [t + (v,) for t in grid for v in values]
    return [make_form(spec.tag, *t) for t in grid if spec.in_range(*t)]


def _instance_summary(f, tol):
    g = catalog_instantiate(f, tol)
    _, norm = nabla_r(g)
    return {
        "name": f.label(),
        "document": AlgebraDocument.from_form(f).to_dict(),
        "scalar": scalar_curvature(g, tol),
        "einstein": is_einstein(g, tol),
        "symmetric": is_locally_symmetric(g, tol),
        "nabla_r_norm": norm,
    }


def cmd_catalog(args, config):
    if args.dim not in (4, 5):
        raise LieInputError(f"the catalog covers dimensions 4 and 5, got {args.dim}")
    tags = families(args.dim)
    if args.family is not None:
        if args.family not in tags:
            family_spec(args.family)
            raise LieInputError(f"{args.family} is not a {args.dim}-dimensional family")
        tags = [args.family]
    entries, lines = [], []
    for tag in tags:
        spec = family_spec(tag)
        entry = {"family": tag, "nil_type": spec.nil_type, "params": list(spec.params),
                 "realizable": spec.realizable, "note": spec.note}
        line = f"{tag:5s} {spec.nil_type}  ({', '.join(spec.params) or '-'})"
        if not spec.realizable:
            line += "  not realizable"
        if spec.note:
            line += f"  [{spec.note}]"
        lines.append(line)
        if args.family is not None and spec.realizable:
            grid = (_grid_values(spec, args.grid) if args.grid
                    else catalog_grid(tag, args.points))
            entry["instances"] = [_instance_summary(f, config.tolerances) for f in grid]
            for inst in entry["instances"]:
                einstein = "" if inst["einstein"] is None else f"  Einstein {inst['einstein']:.6g}"
                lines.append(f"    {inst['name']}: scalar {inst['scalar']:.6g}{einstein}"
                             f"{'  symmetric' if inst['symmetric'] else ''}")
        entries.append(entry)
    emit(config, "catalog", {"dim": args.dim, "families": entries}, lines)
    return EXIT_OK


def cmd_verify_paper(args, config):
    results = run_criteria(args.criteria, config.tolerances, config.seed, config.workers)
    hard = [r for r in results if not r.advisory]
    advisory = [r for r in results if r.advisory]
    passed = all_hard_passed(results)
    lines = []
    for r in hard:
        status = "PASS" if r.passed else ("FAIL" if r.hard else "WARN")
        lines.append(f"[{status}] {r.cid}. {r.title}: max deviation {r.deviation:.3g} "
                     f"over {r.checked} checks")
        lines += [f"       {d}" for d in r.detail]
    if advisory:
        lines.append("advisory:")
        for r in advisory:
            lines.append(f"[{'match' if r.passed else 'differs'}] {r.cid}. {r.title}: "
                         f"deviation {r.deviation:.3g}")
            lines += [f"       {d}" for d in r.detail]
    lines.append("all hard criteria pass" if passed else "hard criteria failed")
    emit(config, "verify-paper", {"passed": passed, "criteria": [r.to_dict() for r in hard],
                                  "advisory": [r.to_dict() for r in advisory]}, lines)
    return EXIT_OK if passed else EXIT_NEGATIVE


def _values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="curvlie",
        description="Curvature, SNC test and classification of low-dimensional metric Lie algebras.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--tol-struct", type=float, default=None,
                        help=f"structural tolerance [default = {DEFAULT_TOLERANCES.tol_struct}]")
    parser.add_argument("--tol-eig", type=float, default=None,
                        help=f"eigenvalue guard band [default = {DEFAULT_TOLERANCES.tol_eig}]")
    parser.add_argument("--tol-curv", type=float, default=None,
                        help=f"curvature tolerance [default = {DEFAULT_TOLERANCES.tol_curv}]")
    parser.add_argument("--seed", type=int, default=None,
                        help="sampling seed; falls back to $CURVLIE_SEED, then 0")
    parser.add_argument("--format", dest="output_format", choices=("human", "json"), default="human")
    parser.add_argument("--verbose", "-v", action="store_true", help="log numerical decisions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate an algebra document and run the SNC test")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("curvature", help="connection, Ricci tensor and symmetry flags")
    p.add_argument("path")
    p.add_argument("--full", action="store_true", help="also print the nonzero Riemann tensor entries")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("canonicalize", help="identify the catalog family of an SNC-algebra")
    p.add_argument("path")
    p.add_argument("--matrices", action="store_true", help="print the change-of-basis matrices")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("catalog", help="list the families of one dimension")
    p.add_argument("dim", type=int)
    p.add_argument("--family", help="enumerate instances of this family")
    p.add_argument("--grid", type=_values, help="parameter values, e.g. 0.5,1,2")
    p.add_argument("--points", type=int, default=5, help="grid points per parameter [default = 5]")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify-paper", help="run the reproduction suite")
    p.add_argument("--criteria", nargs="+", choices=sorted(CRITERIA), help="only these criteria")
    p.add_argument("--workers", type=int, default=None, help="worker processes [default = CPU count]")
    p.set_defaults(func=cmd_verify_paper)
    return parser


def run_config(args, environ=None):
    overrides = {k: v for k, v in (("tol_struct", args.tol_struct), ("tol_eig", args.tol_eig),
                                   ("tol_curv", args.tol_curv)) if v is not None}
    tolerances = dataclasses.replace(DEFAULT_TOLERANCES, **overrides)
    return RunConfig.from_env(environ, tolerances=tolerances, seed=args.seed,
                              output_format=args.output_format,
                              workers=getattr(args, "workers", None))


def main(argv=None, environ=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        config = run_config(args, environ)
        return args.func(args, config)
    except IndeterminateError as e:
        logger.error("indeterminate: %s", e)
        for candidate in e.candidates:
            logger.error("  candidate: %s", candidate)
        return EXIT_INDETERMINATE
    except PreconditionError as e:
        logger.error("%s", e)
        return EXIT_NEGATIVE
    except LieInputError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_INPUT
    except LieAlgebraError:
        logger.exception("computation failed")
        return EXIT_INPUT
    except Exception:
        logger.exception("unexpected error")
        return EXIT_INPUT
