"""Command-line front end: JSON in, JSON/CSV out, with an audit trail.

Subcommands cover validation, monodromy, classification, deformation
flows, gauge surgery, the classical solution families, and parameter
strata.  Exit codes: 0 success, 1 domain failure (a computation refused
or a check exceeded its tolerance), 2 usage error (bad arguments or
malformed input files).

Every run appends one JSON line to the audit log (``--audit``, default
``garnier-lab-audit.jsonl``) recording the command, argument vector,
SHA-256 of every input file, the tolerances in force and the library
versions.  Output files themselves contain no timestamps, so identical
inputs and tolerances reproduce identical outputs; all numeric report
fields are accompanied by the tolerance under which they were computed.
``GARNIER_LAB_THREADS`` caps internal parallelism.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import GarnierLabError
from .classical import (
    _advance,
    _pvi_flow_rhs,
    _pvi_params,
    _slope_from_momentum,
    chazy_solution,
    export_solution,
    forbidden_solution,
    lauricella_locus_flow,
    reducible_riccati_solution,
    riccati_type_solution,
)
from .fuchsian import FuchsianSystem, validate
from .garnier import (
    GarnierState,
    classify_parameters,
    garnier_flow,
    kappa,
    pvi_from_theta,
    symmetry_T,
)
from .gauge import (
    extend_with_identity_pole,
    extend_with_trivial_infinity,
    reduce_identity_pole,
    reduce_infinity,
    triangularize_reducible,
)
from .monodromy import (
    IntegratorOptions,
    MonodromyData,
    check_relations,
    classify_group,
    compute_monodromy,
    connection_matrices,
)
from .schlesinger import DeformationPath, flow, verify_isomonodromy
from .serialize import SerializeError, from_jsonable, load, to_jsonable

__all__ = ["main"]

_VERSION = "0.1.0"


class UsageError(Exception):
    """Bad command usage detected after argparse (exit code 2)."""


# ---------------------------------------------------------------------------
# small helpers


def _c(value) -> list:
    z = complex(value)
    return [z.real, z.imag]


def _parse_complex(values, name: str) -> complex:
    if len(values) == 1:
        return complex(values[0], 0.0)
    if len(values) == 2:
        return complex(values[0], values[1])
    raise UsageError(f"{name} takes one real or two (re im) values")


def _load_as(path, cls, what: str):
    obj = load(path)
    if not isinstance(obj, cls):
        raise UsageError(f"{path}: expected a {what} document, "
                         f"got {type(obj).__name__}")
    return obj


def _opts(tol: float) -> IntegratorOptions:
    return IntegratorOptions(rtol=tol, atol=tol * 1e-2)


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=1, sort_keys=True)
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n")
    else:
        print(text)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def _append_audit(args, command: str, inputs, tolerances: dict) -> None:
    record = {
        "time": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "argv": list(getattr(args, "_argv", [])),
        "inputs": {str(p): _sha256(p) for p in inputs},
        "tolerances": {k: float(v) for k, v in tolerances.items()},
        "versions": {
            "garnier-lab": _VERSION,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": "%d.%d.%d" % sys.version_info[:3],
        },
    }
    path = Path(args.audit)
    with path.open("a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# subcommand handlers (each returns the process exit code)


def _cmd_validate(args) -> int:
    system = _load_as(args.system, FuchsianSystem, "fuchsian-v1")
    violations = validate(system, tol=args.tol)
    doc = {
        "command": "validate",
        "tolerances": {"tol": args.tol},
        "violations": [
            {"name": v.name, "magnitude": float(v.magnitude),
             "detail": v.detail}
            for v in violations
        ],
    }
    _append_audit(args, "validate", [args.system], {"tol": args.tol})
    _emit(doc, args)
    return 0 if not violations else 1


def _cmd_monodromy(args) -> int:
    system = _load_as(args.system, FuchsianSystem, "fuchsian-v1")
    opts = _opts(args.tol)
    data = compute_monodromy(system, opts=opts, frame=args.frame)
    if args.connections:
        data = connection_matrices(data)
    relations = check_relations(data)
    doc = to_jsonable(data)
    doc["relations"] = {
        "cyclic": float(relations["cyclic"]),
        "eigen": [float(v) for v in relations["eigen"]],
        "inf_consistency": float(relations["inf_consistency"]),
    }
    doc["tolerances"] = {"rtol": opts.rtol, "atol": opts.atol}
    _append_audit(args, "monodromy", [args.system],
                  {"rtol": opts.rtol, "atol": opts.atol})
    _emit(doc, args)
    return 0


def _cmd_classify(args) -> int:
    obj = load(args.input)
    mono_tolerances = {}
    if isinstance(obj, FuchsianSystem):
        opts = _opts(args.mono_tol)
        data = compute_monodromy(obj, opts=opts)
        mono_tolerances = {"rtol": opts.rtol, "atol": opts.atol}
    elif isinstance(obj, MonodromyData):
        data = obj
    else:
        raise UsageError(f"{args.input}: expected a fuchsian-v1 or "
                         f"monodromy-v1 document, got {type(obj).__name__}")
    result = classify_group(data, tol=args.tol)
    doc = {
        "command": "classify",
        "l": int(result.l),
        "scalar_indices": [int(i) for i in result.scalar_indices],
        "scalar_inf": bool(result.scalar_inf),
        "reducible": bool(result.reducible),
        "invariant_vector": (None if result.invariant_vector is None
                             else [_c(v) for v in result.invariant_vector]),
        "residual": float(result.residual),
        "tolerances": {"tol": args.tol, **mono_tolerances},
    }
    _append_audit(args, "classify", [args.input],
                  {"tol": args.tol, **mono_tolerances})
    _emit(doc, args)
    return 0


def _cmd_deform(args) -> int:
    system = _load_as(args.system, FuchsianSystem, "fuchsian-v1")
    path = _load_as(args.path, DeformationPath, "path-v1")
    opts = _opts(args.tol)
    final = flow(system, path, opts=opts)
    doc = to_jsonable(final)
    info = {"tolerances": {"rtol": opts.rtol, "atol": opts.atol}}
    code = 0
    if args.verify:
        defect = verify_isomonodromy(system, final, opts=opts)
        info["isomonodromy_defect"] = float(defect)
        info["defect_tol"] = args.verify_tol
        if defect > args.verify_tol:
            code = 1
    doc["deformation"] = info
    tols = {"rtol": opts.rtol, "atol": opts.atol}
    if args.verify:
        tols["defect_tol"] = args.verify_tol
    _append_audit(args, "deform", [args.system, args.path], tols)
    _emit(doc, args)
    return code


def _cmd_garnier_flow(args) -> int:
    state = _load_as(args.state, GarnierState, "garnier-v1")
    path = _load_as(args.path, DeformationPath, "path-v1")
    opts = _opts(args.tol)
    final = garnier_flow(state, path, opts=opts)
    doc = to_jsonable(final)
    doc["flow"] = {
        "kappa": _c(kappa(final.theta, final.theta_inf)),
        "tolerances": {"rtol": opts.rtol, "atol": opts.atol},
    }
    _append_audit(args, "garnier-flow", [args.state, args.path],
                  {"rtol": opts.rtol, "atol": opts.atol})
    _emit(doc, args)
    return 0


def _cmd_reduce(args) -> int:
    system = _load_as(args.system, FuchsianSystem, "fuchsian-v1")
    opts = _opts(args.tol)
    trail: list = []
    if args.infinity is not None:
        out = reduce_infinity(system, args.infinity, opts=opts, audit=trail)
        which = {"infinity": args.infinity}
    else:
        out = reduce_identity_pole(system, args.pole, opts=opts, audit=trail)
        which = {"pole": args.pole}
    doc = to_jsonable(out)
    doc["gauge"] = {"trail": trail, "target": which,
                    "tolerances": {"rtol": opts.rtol, "atol": opts.atol}}
    _append_audit(args, "reduce", [args.system],
                  {"rtol": opts.rtol, "atol": opts.atol})
    _emit(doc, args)
    return 0


def _cmd_extend(args) -> int:
    system = _load_as(args.system, FuchsianSystem, "fuchsian-v1")
    trail: list = []
    if args.infinity is not None:
        z0 = _parse_complex(args.infinity, "--infinity")
        out = extend_with_trivial_infinity(system, z0,
                                           family_param=args.family_param,
                                           audit=trail)
        target = {"infinity": _c(z0)}
    else:
        u_new = _parse_complex(args.at, "--at")
        out = extend_with_identity_pole(system, u_new,
                                        family_param=args.family_param,
                                        audit=trail)
        target = {"pole": _c(u_new)}
    doc = to_jsonable(out)
    doc["gauge"] = {"trail": trail, "target": target,
                    "family_param": args.family_param}
    _append_audit(args, "extend", [args.system], {})
    _emit(doc, args)
    return 0


def _cmd_triangularize(args) -> int:
    system = _load_as(args.system, FuchsianSystem, "fuchsian-v1")
    opts = _opts(args.mono_tol)
    trail: list = []
    out = triangularize_reducible(system, opts=opts, audit=trail,
                                  tol=args.tol)
    lower = max(float(abs(a[1, 0])) for a in out.residues)
    doc = to_jsonable(out)
    doc["triangular"] = {
        "max_lower_entry": lower,
        "trail": trail,
        "tolerances": {"tol": args.tol, "rtol": opts.rtol, "atol": opts.atol},
    }
    _append_audit(args, "triangularize", [args.system],
                  {"tol": args.tol, "rtol": opts.rtol, "atol": opts.atol})
    _emit(doc, args)
    return 0


def _write_locus_csv(path: Path, locus) -> int:
    n_nu = locus.states[0].nu.size
    head = ["t"]
    for i in range(n_nu):
        head += [f"nu{i}_re", f"nu{i}_im"]
    for i in range(n_nu):
        head += [f"rho{i}_re", f"rho{i}_im"]
    with path.open("w") as fh:
        fh.write(",".join(head) + "\n")
        for t, state in zip(locus.ts, locus.states):
            cells = [float(t)]
            for v in state.nu:
                cells += [v.real, v.imag]
            for v in state.rho:
                cells += [v.real, v.imag]
            fh.write(",".join(f"{v:.17g}" for v in cells) + "\n")
    return len(locus.ts)


def _cmd_classical(args) -> int:
    family = args.family.replace("-", "_")
    theta = tuple(args.theta)
    out_dir = Path(args.out_dir)
    x_samples = args.samples if args.samples else None

    if family == "lauricella":
        if args.path is None:
            raise UsageError("--family lauricella requires --path")
        path = _load_as(args.path, DeformationPath, "path-v1")
        eps = args.eps if args.eps else [-1] * len(theta)
        if not args.nu_init:
            raise UsageError("--family lauricella requires --nu-init "
                             "(initial root positions, away from the poles)")
        nu_init = args.nu_init
        locus = lauricella_locus_flow(theta, eps, path, nu_init,
                                      opts=_opts(args.tol),
                                      rho_tol=args.rho_tol)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = args.stem or "lauricella_locus"
        csv_path = out_dir / f"{stem}.csv"
        count = _write_locus_csv(csv_path, locus)
        header = {
            "format": "lauricella-locus-v1",
            "family": "lauricella_locus",
            "theta": [_c(t) for t in theta],
            "eps": [int(e) for e in eps],
            "theta_inf": _c(locus.states[0].theta_inf),
            "kappa": _c(locus.kappa),
            "rho_max": float(locus.rho_max),
            "tolerances": {"rho_tol": args.rho_tol, "rtol": args.tol},
            "samples": count,
            "csv": csv_path.name,
        }
        json_path = out_dir / f"{stem}.json"
        json_path.write_text(json.dumps(header, indent=2, sort_keys=True)
                             + "\n")
        summary = {"command": "classical", "family": "lauricella_locus",
                   "files": [str(json_path), str(csv_path)],
                   "rho_max": float(locus.rho_max),
                   "tolerances": {"rho_tol": args.rho_tol}}
        _append_audit(args, "classical", [args.path],
                      {"rho_tol": args.rho_tol, "rtol": args.tol})
        _emit(summary, args)
        return 0

    if family == "reducible_riccati":
        sol = reducible_riccati_solution(theta, mix=args.mix,
                                         x_samples=x_samples)
    elif family in ("chazy", "generalized_chazy"):
        u = args.u_choice or [0.0]
        if len(u) == 4:
            u_choice = (complex(u[0], u[1]), complex(u[2], u[3]))
        else:
            u_choice = _parse_complex(u, "--u-choice")
        sol = chazy_solution(theta, u_choice=u_choice, x_samples=x_samples,
                             theta_inf=(args.theta_inf if args.theta_inf
                                        is not None else -1.0),
                             branch=args.branch, certify=args.certify)
    elif family == "riccati_type":
        f_init = _parse_complex(args.f_init, "--f-init")
        sol = riccati_type_solution(theta, f_init, x_samples=x_samples,
                                    theta_inf=(args.theta_inf
                                               if args.theta_inf is not None
                                               else 2.0))
    elif family == "forbidden":
        if args.theta_inf is None:
            raise UsageError("--family forbidden requires --theta-inf")
        sol = forbidden_solution(theta, args.theta_inf, x_samples=x_samples)
    else:
        raise UsageError(f"unknown family {args.family!r}")

    json_path, csv_path = export_solution(sol, out_dir, stem=args.stem)
    summary = {
        "command": "classical",
        "family": sol.family,
        "files": [str(json_path), str(csv_path)],
        "samples": int(sol.x.size),
        "residual_max": float(np.max(sol.residuals)),
        "tolerances": {"tol": sol.tolerance,
                       **{k: float(v)
                          for k, v in sol.aux_tolerances.items()}},
    }
    _append_audit(args, "classical", [], {"tol": sol.tolerance})
    _emit(summary, args)
    return 0


def _cmd_verify_pvi(args) -> int:
    data_path = Path(args.data)
    if data_path.suffix == ".json":
        try:
            doc = json.loads(data_path.read_text())
        except json.JSONDecodeError as exc:
            raise SerializeError(f"{data_path}: not valid JSON ({exc})")
        if doc.get("format") != "classical-v1":
            raise UsageError(f"{data_path}: not a classical-v1 header")
        csv_path = data_path.parent / doc["csv"]
        pdoc = doc["parameters"]
        theta = tuple(complex(a, b) for a, b in pdoc["theta"])
        theta_inf = complex(*pdoc["theta_inf"])
    else:
        csv_path = data_path
        if args.theta is None or args.theta_inf is None:
            raise UsageError(
                "CSV input requires --theta and --theta-inf (or pass the "
                "classical-v1 JSON header, which records them)")
        theta = tuple(complex(t, 0.0) for t in args.theta)
        theta_inf = complex(args.theta_inf, 0.0)

    with Path(csv_path).open() as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) < 2:
        raise GarnierLabError(
            "verification needs at least two samples to propagate between")
    xs = np.array([complex(float(r["x_re"]), float(r["x_im"])) for r in rows])
    ys = np.array([complex(float(r["y_re"]), float(r["y_im"])) for r in rows])
    ps = np.array([complex(float(r["p_re"]), float(r["p_im"])) for r in rows])

    params = _pvi_params(theta, theta_inf)
    rhs = _pvi_flow_rhs(params)
    slopes = np.array([_slope_from_momentum(y, p, x, theta)
                       for x, y, p in zip(xs, ys, ps)])

    defects, skipped = [], []
    for i in range(len(rows) - 1):
        state = np.array([ys[i], slopes[i]])
        try:
            out = _advance(rhs, xs[i], xs[i + 1], state,
                           args.rtol, args.rtol * 1e-2, args.clearance)
        except GarnierLabError as exc:
            skipped.append({"leg": i, "reason": str(exc)})
            continue
        d_y = abs(out[0] - ys[i + 1]) / max(1.0, abs(ys[i + 1]))
        d_s = abs(out[1] - slopes[i + 1]) / max(1.0, abs(slopes[i + 1]))
        defects.append(max(float(d_y), float(d_s)))

    if not defects:
        raise GarnierLabError("no leg of the sample path could be "
                              "propagated; nothing was verified")
    worst = max(defects)
    verified = worst < args.tol
    doc = {
        "command": "verify-pvi",
        "rows": len(rows),
        "legs": len(defects),
        "skipped_legs": skipped,
        "max_propagation_defect": worst,
        "verified": bool(verified),
        "tolerances": {"tol": args.tol, "rtol": args.rtol,
                       "clearance": args.clearance},
    }
    _append_audit(args, "verify-pvi", [data_path],
                  {"tol": args.tol, "rtol": args.rtol})
    _emit(doc, args)
    return 0 if verified else 1


def _cmd_symmetry(args) -> int:
    state = _load_as(args.state, GarnierState, "garnier-v1")
    alias = {"one": "one", "n+2": "one",
             "infinity": "infinity", "n+3": "infinity"}
    if args.which in alias:
        which = alias[args.which]
    else:
        try:
            which = int(args.which)
        except ValueError:
            raise UsageError("--which takes a moving-pole index, "
                             "'one' (alias n+2) or 'infinity' (alias n+3)")
    out = symmetry_T(state, which)
    doc = to_jsonable(out)
    doc["symmetry"] = {"which": str(args.which)}
    _append_audit(args, "symmetry", [args.state], {})
    _emit(doc, args)
    return 0


def _cmd_strata(args) -> int:
    if args.b is not None:
        b = tuple(args.b)
    else:
        if args.theta is None or args.theta_inf is None:
            raise UsageError("strata needs either --b or both --theta "
                             "and --theta-inf")
        if len(args.theta) != 3:
            raise UsageError("--theta must give the three finite labels "
                             "of a length-one system")
        b = pvi_from_theta(tuple(args.theta), args.theta_inf).b
    result = classify_parameters(b, int_tol=args.int_tol)
    doc = {
        "command": "strata",
        "b": [_c(v) for v in b],
        "witnesses": [
            {"coefficients": [int(c) for c in combo],
             "integer": int(value), "defect": float(defect)}
            for combo, value, defect in result.witnesses
        ],
        "rank": int(result.rank),
        "in_m": bool(result.in_m),
        "in_p": bool(result.in_p),
        "in_l": bool(result.in_l),
        "in_d": bool(result.in_d),
        "tolerances": {"int_tol": args.int_tol},
    }
    _append_audit(args, "strata", [], {"int_tol": args.int_tol})
    _emit(doc, args)
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="garnier-lab",
        description="Monodromy, deformation and classical-solution toolkit "
                    "for rank-2 linear systems.",
        epilog="GARNIER_LAB_THREADS caps internal parallelism; every run "
               "appends one line to the audit log.")
    parser.add_argument("--audit", default="garnier-lab-audit.jsonl",
                        help="audit log path (JSON lines, appended)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(func=handler)
        p.add_argument("-o", "--output",
                       help="write the JSON report here instead of stdout")
        return p

    p = add("validate", _cmd_validate, help="check a system's invariants")
    p.add_argument("system")
    p.add_argument("--tol", type=float, default=1e-8)

    p = add("monodromy", _cmd_monodromy,
            help="compute monodromy data for a system")
    p.add_argument("system")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="integration rtol (atol is tol/100)")
    p.add_argument("--frame", choices=("infinity", "base"),
                   default="infinity")
    p.add_argument("--connections", action="store_true",
                   help="also compute connection matrices")

    p = add("classify", _cmd_classify,
            help="classify the monodromy group (smaller/reducible)")
    p.add_argument("input", help="fuchsian-v1 or monodromy-v1 JSON")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--mono-tol", type=float, default=1e-10)

    p = add("deform", _cmd_deform,
            help="isomonodromic flow of a system along a pole path")
    p.add_argument("system")
    p.add_argument("--path", required=True, help="path-v1 JSON")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--verify", action="store_true",
                   help="compare monodromy before and after")
    p.add_argument("--verify-tol", type=float, default=1e-5)

    p = add("garnier-flow", _cmd_garnier_flow,
            help="Hamiltonian flow of a state along a pole path")
    p.add_argument("state", help="garnier-v1 JSON")
    p.add_argument("--path", required=True, help="path-v1 JSON")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("reduce", _cmd_reduce,
            help="remove a trivial-monodromy singularity")
    p.add_argument("system")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pole", type=int, help="index of the pole to remove")
    g.add_argument("--infinity", type=int,
                   help="pole index absorbing the point at infinity")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("extend", _cmd_extend,
            help="add a trivial-monodromy singularity")
    p.add_argument("system")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--at", type=float, nargs="+", metavar="RE [IM]",
                   help="location of the new pole")
    g.add_argument("--infinity", type=float, nargs="+", metavar="RE [IM]",
                   help="finite point the current infinity moves to")
    p.add_argument("--family-param", type=float, default=0.0,
                   help="coordinate on the one-parameter family of "
                        "extensions")

    p = add("triangularize", _cmd_triangularize,
            help="conjugate a reducible-monodromy system to triangular form")
    p.add_argument("system")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="reducibility detection tolerance")
    p.add_argument("--mono-tol", type=float, default=1e-10)

    p = add("classical", _cmd_classical,
            help="generate and export a verified classical solution family")
    p.add_argument("--family", required=True,
                   choices=("reducible-riccati", "chazy", "generalized-chazy",
                            "riccati-type", "forbidden", "lauricella"))
    p.add_argument("--theta", type=float, nargs="+", required=True)
    p.add_argument("--theta-inf", type=float, default=None)
    p.add_argument("--samples", type=float, nargs="+",
                   help="sample locations on the real axis")
    p.add_argument("--mix", type=float, default=0.0,
                   help="reducible-riccati: mixture of the two kernel "
                        "solutions")
    p.add_argument("--u-choice", type=float, nargs="+",
                   help="chazy: branch anchor shift, one/two floats for a "
                        "scalar or four for a pair")
    p.add_argument("--branch", type=int, default=0,
                   help="chazy: which root of the momentum quartic")
    p.add_argument("--certify", action="store_true",
                   help="chazy: also certify via the linear system's "
                        "monodromy")
    p.add_argument("--f-init", type=float, nargs="+", default=[0.5],
                   help="riccati-type: initial value of the first-order "
                        "carrier")
    p.add_argument("--eps", type=int, nargs="+",
                   help="lauricella: orientation signs (+1/-1 per label)")
    p.add_argument("--path", help="lauricella: path-v1 JSON for the poles")
    p.add_argument("--nu-init", type=float, nargs="+",
                   help="lauricella: initial root positions")
    p.add_argument("--rho-tol", type=float, default=1e-8)
    p.add_argument("--tol", type=float, default=1e-10,
                   help="lauricella: integration rtol")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--stem")

    p = add("verify-pvi", _cmd_verify_pvi,
            help="independently re-verify exported (x, y, p) samples by "
                 "propagating the nonlinear flow between them")
    p.add_argument("data", help="classical-v1 JSON header or sample CSV")
    p.add_argument("--theta", type=float, nargs=3)
    p.add_argument("--theta-inf", type=float)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--rtol", type=float, default=1e-12)
    p.add_argument("--clearance", type=float, default=1e-3)

    p = add("symmetry", _cmd_symmetry,
            help="apply a birational symmetry to a state")
    p.add_argument("state", help="garnier-v1 JSON")
    p.add_argument("--which", required=True,
                   help="moving-pole index, 'one' (alias n+2) or "
                        "'infinity' (alias n+3)")

    p = add("strata", _cmd_strata,
            help="locate parameters among the classical strata")
    p.add_argument("--b", type=float, nargs="+",
                   help="parameter vector (n+3 entries)")
    p.add_argument("--theta", type=float, nargs="+",
                   help="finite exponent labels (length-one systems)")
    p.add_argument("--theta-inf", type=float)
    p.add_argument("--int-tol", type=float, default=1e-9)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args._argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SerializeError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except GarnierLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
