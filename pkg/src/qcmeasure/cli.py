"""Command-line front end.

Every subcommand reads a family document and writes one JSON report::

    qcmeasure check family.json
    qcmeasure qcm family.json --s 2 --mesh 0.015625
    qcmeasure ovm family.json --horizon 40 --csv profile.csv
    qcmeasure desync base.json --out family.json

Exit codes: 0 when the analysis completed (whatever the verdict), 1 on
usage or I/O errors, 2 when the document fails to parse or validate.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .classify import classify
from .errors import (AnalysisError, DegenerateMeasure, DocumentSyntaxError, NotApplicable,
                     ValidationError)
from .families import desync_family, desync_qcm_bound, vertex_family, vertex_qcm_bound
from .measures import ovm_empirical, qcm, transient_bound
from .model import MatrixFamily, SystemSpec, parse_and_validate, parse_norm
from .reachability import qc_check
from .robustness import qcm_perturbation_check

logger = logging.getLogger("qcmeasure")

COMMANDS = ("check", "qcm", "ovm", "bound", "classify", "desync", "vertex", "perturb")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent, _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        text = format(x, ".17g")
        if "e" not in text and "." not in text and "n" not in text:
            text += ".0"
        return text
    if isinstance(obj, Fraction):
        return to_json(float(obj), indent, _level)
    return json.dumps(str(obj))


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("file", help="family document (JSON)")
    common.add_argument("--s", type=int, help="reach horizon for qcm_s (default N)")
    common.add_argument("--depth", type=int, help="product depth for classification (default 3N)")
    common.add_argument("--horizon", type=int, help="overshoot search horizon")
    common.add_argument("--mesh", type=float, help="sphere grid pitch, e.g. 0.03125")
    common.add_argument("--norm", choices=("l1", "linf"), help="override the document norm")
    common.add_argument("--seed", type=int, default=0, help="seed for diagnostic random probes")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--csv", help="write the overshoot profile as CSV")

    parser = _Parser(prog="qcmeasure", description="Quasi-controllability and transient "
                     "overshoot analysis of discrete-time switched linear systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="decide quasi-controllability")
    sub.add_parser("qcm", parents=[common], help="bracket the quasi-controllability measure")
    sub.add_parser("ovm", parents=[common], help="largest product norm up to a horizon")
    sub.add_parser("bound", parents=[common], help="certified bound ovm <= 1/qcm")
    sub.add_parser("classify", parents=[common], help="stability trichotomy with certificate")
    sub.add_parser("desync", parents=[common], help="desynchronized family of a base matrix")
    sub.add_parser("vertex", parents=[common], help="vertex family of a base matrix")
    p = sub.add_parser("perturb", parents=[common], help="qcm_s perturbation experiment")
    p.add_argument("--delta", help="JSON file with one delta matrix per member")
    p.add_argument("--scale", type=float, default=1e-3,
                   help="entrywise size of seeded random deltas when --delta is absent")
    p.add_argument("--probes", type=int, default=50)
    return parser


def _load_spec(args, text: str, warnings: list) -> SystemSpec:
    spec = parse_and_validate(text, warnings)
    changes = {}
    if args.norm:
        changes["norm"] = parse_norm(args.norm)
    if args.s is not None:
        changes["horizon_s"] = args.s
    if args.depth is not None:
        changes["product_depth"] = args.depth
    if args.mesh is not None:
        if not (math.isfinite(args.mesh) and args.mesh > 0):
            raise ValidationError("--mesh must be positive")
        changes["sphere_mesh"] = Fraction(args.mesh)
    return spec.with_params(**changes) if changes else spec


def _base_matrix(text: str, warnings: list) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"invalid JSON: {exc}") from None
    if isinstance(doc, dict) and "matrix" in doc:
        A = np.array(doc["matrix"], dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError(f"'matrix' must be square, got shape {A.shape}")
        return A
    spec = parse_and_validate(text, warnings)
    if spec.family.size > 1:
        warnings.append("document has several matrices; using the first as the base matrix")
    return np.array(spec.family[0])


def _witness(v) -> list:
    return [] if v.witness is None else v.witness.T.tolist()


def _run_command(args, text: str, warnings: list):
    cmd = args.command
    if cmd in ("desync", "vertex"):
        A = _base_matrix(text, warnings)
        build, bound_fn = (desync_family, desync_qcm_bound) if cmd == "desync" \
            else (vertex_family, vertex_qcm_bound)
        fam = build(A)
        norm = parse_norm(args.norm or "l1")
        if cmd == "vertex" and fam.dimension == 2 and \
                np.all(np.abs(np.linalg.eigvals(fam[0]).imag) <= 1e-12):
            warnings.append("for N = 2 the vertex family is {V, -V}; V has a real eigenvector, "
                            "so the family is not quasi-controllable and the bound does not apply")
        results = {"family": fam.to_document(norm), "bound": bound_fn(A).as_dict()}
        return {"dimension": fam.dimension, "base_matrix": A.tolist(), "norm": norm.value}, results

    spec = _load_spec(args, text, warnings)
    f = spec.family
    params = spec.describe()
    if args.csv and cmd != "ovm":
        warnings.append("--csv applies to the ovm command only; ignored")

    if cmd == "check":
        v = qc_check(f, spec, seed=args.seed)
        results = {"status": v.status.value, "witness": _witness(v),
                   "certified_lower": v.certified_lower, "evidence": v.evidence}
    elif cmd == "qcm":
        est = qcm(f, spec.horizon_s, spec.norm, spec.sphere_mesh,
                  dedup_tol=spec.tolerances.dedup_tol)
        results = est.as_dict()
    elif cmd == "ovm":
        horizon = args.horizon if args.horizon is not None else spec.product_depth
        params["horizon"] = horizon
        o = ovm_empirical(f, horizon, spec.norm, dedup_tol=spec.tolerances.dedup_tol)
        results = o.as_dict()
        if args.csv:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "max_norm", "word"])
                for t, value, word in o.profile:
                    w.writerow([t, format(value, ".17g"), " ".join(str(i) for i in word)])
    elif cmd == "bound":
        horizon = args.horizon if args.horizon is not None else spec.product_depth
        params["horizon"] = horizon
        try:
            results = {"applicable": True, **transient_bound(f, spec, ovm_horizon=horizon).as_dict()}
        except (NotApplicable, DegenerateMeasure) as exc:
            results = {"applicable": False, "reason": str(exc), "error": type(exc).__name__}
    elif cmd == "classify":
        results = classify(f, spec).as_dict()
    elif cmd == "perturb":
        if args.delta:
            with open(args.delta, encoding="utf-8") as fh:
                raw = json.load(fh)
            if isinstance(raw, dict) and "matrices" in raw:
                raw = [m["rows"] for m in raw["matrices"]]
            deltas = np.array(raw, dtype=float)
        else:
            rng = np.random.default_rng(args.seed)
            deltas = rng.uniform(-args.scale, args.scale, size=(f.size, f.dimension, f.dimension))
            params["scale"] = args.scale
        params["probes"] = args.probes
        rep = qcm_perturbation_check(f, deltas, spec.horizon_s, spec.norm, args.probes,
                                     mesh=spec.sphere_mesh, seed=args.seed)
        results = {"deltas": deltas.tolist(), **rep.as_dict()}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown command {cmd}")
    return params, results


def run(argv=None) -> int:
    """Entry point; returns the process exit code."""
    logging.basicConfig(level=logging.ERROR, format="%(levelname)s: %(message)s")
    threads = os.environ.get("ANALYZER_THREADS")
    if threads:
        try:
            import numba
            numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
        except (ImportError, ValueError):
            print(f"warning: ignoring ANALYZER_THREADS={threads!r}", file=sys.stderr)
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    started = time.perf_counter()
    try:
        with open(args.file, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return 1
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        print(f"validation error: document is not UTF-8: {exc}", file=sys.stderr)
        return 2
    warnings: list = []
    try:
        params, results = _run_command(args, text, warnings)
    except (DocumentSyntaxError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AnalysisError as exc:
        print(f"analysis error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    report = {
        "command": args.command,
        "input_digest": "sha256:" + hashlib.sha256(raw).hexdigest(),
        "parameters": params,
        "results": results,
        "warnings": warnings,
        "wall_time_ms": int(round(1000 * (time.perf_counter() - started))),
    }
    text_out = to_json(report) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text_out)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text_out)
    return 0


def main() -> None:
    sys.exit(run())
