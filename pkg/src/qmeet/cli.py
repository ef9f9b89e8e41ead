"""Command-line front end.

    qmeet decide  problem.json [--format json] [--trace] [--oracle-check]
    qmeet batch   problems.json
    qmeet oracle  problem.json [--seed 7]
    qmeet certify problem.json verdict.json

Exit codes: 0 INTERSECT, 1 DISJOINT, 2 UNDECIDED, 64 usage error,
65 data error. ``certify`` exits 0 when the certificate re-validates and 1
when it is rejected.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .certificates import validate_report
from .decision import TOL_ENV, ToleranceConfig, Verdict, VerdictTag, decide
from .linalg import scale_of
from .oracle import sample_min
from .quadform import Quadratic

PROBLEM_SCHEMA = "qmeet/1"
EXIT_USAGE = 64
EXIT_DATA = 65
TOLERANCE_FIELDS = ("relTol", "decisionTol", "zeroTol", "witnessTol", "certTol")


class ProblemError(ValueError):
    """Malformed problem data; the message names the offending field."""


class UsageError(Exception):
    pass


@dataclass
class Problem:
    f1: Quadratic
    f2: Quadratic
    id: Optional[str] = None
    tolerance: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def _matrix(value, where: str) -> np.ndarray:
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ProblemError(f"{where}: expected an array of numeric rows") from None
    if M.size == 0 and M.ndim <= 2:
        return np.zeros((0, 0))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ProblemError(f"{where}: expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ProblemError(f"{where}: entries must be finite")
    return M


def _quadratic(doc, where: str, plain: bool, warnings: list) -> Quadratic:
    if not isinstance(doc, dict):
        raise ProblemError(f"{where}: expected an object with fields A, a, a0")
    for key in ("A", "a", "a0"):
        if key not in doc:
            raise ProblemError(f"{where}.{key}: missing")
    A = _matrix(doc["A"], f"{where}.A")
    try:
        a = np.array(doc["a"], dtype=float).reshape(-1)
        a0 = float(doc["a0"])
    except (TypeError, ValueError):
        raise ProblemError(f"{where}: a must be a numeric vector and a0 a number") from None
    if a.shape[0] != A.shape[0]:
        raise ProblemError(f"{where}.a: length {a.shape[0]} does not match {A.shape[0]}x{A.shape[0]} matrix")
    if not (np.all(np.isfinite(a)) and math.isfinite(a0)):
        raise ProblemError(f"{where}: coefficients must be finite")
    asym = float(np.max(np.abs(A - A.T), initial=0.0))
    if asym > 1e-12 * scale_of(A):
        warnings.append(f"{where}.A is not symmetric (max deviation {asym:.3g}); symmetrized")
    A = 0.5 * (A + A.T)
    if plain:
        return Quadratic.from_plain(A, a, a0)
    return Quadratic(A, a, a0)


def load_problem(doc) -> Problem:
    """Build a :class:`Problem` from a decoded ``qmeet/1`` document."""
    if not isinstance(doc, dict):
        raise ProblemError("problem: expected a JSON object")
    schema = doc.get("schema", PROBLEM_SCHEMA)
    if schema != PROBLEM_SCHEMA:
        raise ProblemError(f"schema: expected {PROBLEM_SCHEMA!r}, got {schema!r}")
    convention = doc.get("convention", "factor2")
    if convention not in ("factor2", "plain"):
        raise ProblemError(f"convention: expected 'factor2' or 'plain', got {convention!r}")
    warnings: list = []
    f1 = _quadratic(doc.get("f1"), "f1", convention == "plain", warnings)
    f2 = _quadratic(doc.get("f2"), "f2", convention == "plain", warnings)
    if f1.dim != f2.dim:
        raise ProblemError(f"f2: dimension {f2.dim} differs from f1 dimension {f1.dim}")
    if f1.dim == 0:
        raise ProblemError("f1.A: dimension must be at least 1")
    tol = doc.get("tolerance") or {}
    if not isinstance(tol, dict):
        raise ProblemError("tolerance: expected an object")
    for key, val in tol.items():
        if key not in TOLERANCE_FIELDS:
            raise ProblemError(f"tolerance.{key}: unknown field")
        if not isinstance(val, (int, float)) or not val > 0:
            raise ProblemError(f"tolerance.{key}: expected a positive number")
    pid = doc.get("id")
    return Problem(f1, f2, None if pid is None else str(pid), dict(tol), warnings)


def problem_to_dict(f1: Quadratic, f2: Quadratic, pid: Optional[str] = None) -> dict:
    doc = {"schema": PROBLEM_SCHEMA, "convention": "factor2", "f1": f1.to_dict(), "f2": f2.to_dict()}
    if pid is not None:
        doc["id"] = pid
    return doc


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _config(args, problem: Optional[Problem] = None) -> ToleranceConfig:
    # defaults < QMEET_TOL < problem file < --tol
    try:
        cfg = ToleranceConfig.from_env()
    except ValueError as exc:
        raise UsageError(f"invalid ${TOL_ENV}: {exc}") from None
    if problem is not None and problem.tolerance:
        cfg = replace(cfg, **{k: float(v) for k, v in problem.tolerance.items()})
    if args.tol is not None:
        if not (args.tol > 0 and math.isfinite(args.tol)):
            raise UsageError("--tol must be a positive number")
        cfg = replace(cfg, decisionTol=args.tol)
    return cfg


def _json_safe(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def _oracle_check(p: Problem, verdict: Verdict, seed: int) -> dict:
    rep = sample_min(p.f1, p.f2, nSamples=100_000, seed=seed)
    s = max(p.f1.scale, p.f2.scale)
    conflict = verdict.tag is VerdictTag.DISJOINT and rep.bestValue <= 1e-10 * s
    return {**rep.to_dict(), "consistent": not conflict}


def _report(p: Problem, args, cfg: ToleranceConfig) -> tuple[dict, Verdict]:
    verdict = decide(p.f1, p.f2, cfg, seed=args.seed)
    out = verdict.to_dict(include_trace=args.trace)
    if p.id is not None:
        out["id"] = p.id
    if p.warnings:
        out["warnings"] = list(p.warnings)
    if args.oracle_check:
        out["oracle"] = _oracle_check(p, verdict, args.seed)
    return _json_safe(out), verdict


def _format_text(out: dict) -> str:
    lines = []
    if out.get("id") is not None:
        lines.append(f"id: {out['id']}")
    lines.append(f"verdict: {out['verdict']}")
    if out.get("po4Value") is not None:
        lines.append(f"quartic value: {out['po4Value']}")
    if out.get("witness") is not None:
        lines.append("witness: " + " ".join(f"{x:.12g}" for x in out["witness"]))
    cert = out.get("certificate")
    if cert:
        extra = f" ({cert['case']})" if "case" in cert else ""
        lines.append(f"certificate: {cert['type']}{extra}")
    for w in out.get("warnings", []):
        lines.append(f"warning: {w}")
    if "oracle" in out:
        o = out["oracle"]
        lines.append(f"oracle: best {o['bestValue']:.6g}, consistent={o['consistent']}")
    for step in out.get("trace", []):
        lines.append(f"  - {step}")
    return "\n".join(lines)


def _emit(out, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(out, indent=2))
    elif isinstance(out, list):
        print("\n\n".join(_format_text(o) for o in out))
    else:
        print(_format_text(out))


def cmd_decide(args) -> int:
    p = load_problem(_read_json(args.file))
    for w in p.warnings:
        print(f"warning: {w}", file=sys.stderr)
    out, verdict = _report(p, args, _config(args, p))
    _emit(out, args.format)
    return verdict.tag.exit_code


def cmd_batch(args) -> int:
    doc = _read_json(args.file)
    items = doc.get("instances") if isinstance(doc, dict) else doc
    if not isinstance(items, list):
        raise ProblemError("batch: expected a JSON array or an object with an 'instances' array")
    _config(args)  # surface usage errors before any work

    def run_one(k_item):
        k, item = k_item
        try:
            p = load_problem(item)
            if p.id is None:
                p.id = str(k)
            return _report(p, args, _config(args, p))[0]
        except ProblemError as exc:
            return {"id": str(k), "error": f"instances[{k}].{exc}"}

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(run_one, enumerate(items)))
    if args.format == "json":
        _emit(results, "json")
    else:
        print("\n".join(f"{r['id']}: {r.get('verdict', 'ERROR ' + r.get('error', ''))}" for r in results))
    return EXIT_DATA if any("error" in r for r in results) else 0


def cmd_oracle(args) -> int:
    p = load_problem(_read_json(args.file))
    rep = sample_min(p.f1, p.f2, nSamples=args.samples, seed=args.seed)
    out = _json_safe(rep.to_dict())
    if args.format == "json":
        print(json.dumps(out, indent=2))
    else:
        print(f"best value: {out['bestValue']:.6g}")
        print("best point: " + " ".join(f"{x:.9g}" for x in out["bestPoint"]))
        print(f"samples: {out['samples']}  box: {out['box']}  on boundary: {out['onBoundary']}")
    return 0


def cmd_certify(args) -> int:
    p = load_problem(_read_json(args.file))
    report = _read_json(args.certificate)
    if not isinstance(report, dict):
        raise ProblemError(f"{args.certificate}: expected a verdict object")
    cfg = _config(args, p)
    why = validate_report(p.f1, p.f2, report, cfg.certTol, cfg.witnessTol, cfg.zeroTol)
    if args.format == "json":
        print(json.dumps({"valid": why is None, "reason": why}, indent=2))
    else:
        print("certificate valid" if why is None else f"certificate rejected: {why}")
    return 0 if why is None else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help=f"decision tolerance for the quartic value (overrides ${TOL_ENV})")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--oracle-check", action="store_true",
                        help="append a sampling cross-check to the verdict")
    common.add_argument("--trace", action="store_true", help="include the pipeline trace")

    parser = _Parser(prog="qmeet", description="Decide whether two quadric surfaces intersect.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("decide", parents=[common], help="decide one problem")
    p.add_argument("file")
    p.set_defaults(func=cmd_decide)
    p = sub.add_parser("batch", parents=[common], help="decide an array of problems")
    p.add_argument("file")
    p.add_argument("--jobs", type=int, default=min(4, os.cpu_count() or 1))
    p.set_defaults(func=cmd_batch)
    p = sub.add_parser("oracle", parents=[common], help="sampling estimate of inf f1^2 + f2^2")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.set_defaults(func=cmd_oracle)
    p = sub.add_parser("certify", parents=[common], help="re-validate an emitted verdict")
    p.add_argument("file")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_certify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qmeet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProblemError as exc:
        print(f"qmeet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())
