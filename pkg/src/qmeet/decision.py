"""Decide whether ``{f1 = 0}`` and ``{f2 = 0}`` intersect.

Pipeline: trivial and one-sided functions first, then the value ``v`` of
``inf f1^2 + f2^2``. A positive ``v`` proves disjointness; when ``v = 0`` the
surfaces are disjoint exactly when one separates the other, or when one of the
sign-combined programs ``inf{s_i f_i : s_j f_j <= 0}`` has value zero without
attaining it.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import linalg
from .canonical import restrict_affine
from .certificates import (CERT_SCHEMA, check_certificate, check_witness, restricted_pair)
from .duals import Method, ProgramResult, dual_value, qp1eqc_value, qp1qc_value
from .linalg import REL_TOL
from .oracle import descend_to_intersection, sample_min
from .quadform import (Quadratic, SignTag, _check_same_dim, attains_zero, critical_value,
                       sign_profile)
from .separation import is_scalar_multiple, mutual_separation
from .sprocedure import po4_value_indep

TOL_ENV = "QMEET_TOL"


@dataclass(frozen=True)
class ToleranceConfig:
    relTol: float = REL_TOL
    decisionTol: float = 1e-7  # v above this (times scale^2) counts as positive
    zeroTol: float = 1e-6  # program values within this of zero count as zero
    witnessTol: float = 1e-7
    certTol: float = 1e-8

    @classmethod
    def from_env(cls, tol: Optional[float] = None) -> "ToleranceConfig":
        """Defaults, with ``decisionTol`` taken from ``QMEET_TOL`` or ``tol`` (which wins)."""
        cfg = cls()
        env = os.environ.get(TOL_ENV)
        if env is not None and env.strip():
            cfg = replace(cfg, decisionTol=_positive(float(env), TOL_ENV))
        if tol is not None:
            cfg = replace(cfg, decisionTol=_positive(float(tol), "tol"))
        return cfg


def _positive(x: float, what: str) -> float:
    if not (x > 0.0 and math.isfinite(x)):
        raise ValueError(f"{what} must be a positive finite number, got {x}")
    return x


class VerdictTag(str, enum.Enum):
    INTERSECT = "INTERSECT"
    DISJOINT = "DISJOINT"
    UNDECIDED = "UNDECIDED"

    @property
    def exit_code(self) -> int:
        return {"INTERSECT": 0, "DISJOINT": 1, "UNDECIDED": 2}[self.value]


@dataclass
class Verdict:
    tag: VerdictTag
    witness: Optional[np.ndarray] = None
    certificate: Optional[dict] = None
    tolerance: float = 1e-7
    trace: list = field(default_factory=list)
    po4Value: Optional[float] = None
    programs: Optional[list] = None

    def to_dict(self, include_trace: bool = False) -> dict:
        out = {
            "schema": CERT_SCHEMA,
            "verdict": self.tag.value,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "certificate": self.certificate,
            "po4Value": self.po4Value,
            "tolerance": self.tolerance,
        }
        if include_trace:
            out["trace"] = list(self.trace)
        return out


# ---------------------------------------------------------------------------
# single-surface tests

def quadratic_attains_zero(q: Quadratic, rel_tol: float = REL_TOL,
                           tol: Optional[float] = None) -> tuple[bool, Optional[np.ndarray]]:
    """Whether ``0`` is a value of ``q``; see :func:`qmeet.quadform.attains_zero`."""
    return attains_zero(q, rel_tol, tol)


def _is_zero(q: Quadratic, rel_tol: float) -> bool:
    return max(float(np.max(np.abs(q.matA), initial=0.0)), float(np.max(np.abs(q.vecA), initial=0.0)),
               abs(q.scalarA)) <= rel_tol


def one_sided_branch(f1: Quadratic, f2: Quadratic, cfg: Optional[ToleranceConfig] = None,
                     index: int = 1) -> Verdict:
    """Verdict when ``f1`` never changes sign.

    ``{f1 = 0}`` is then empty or the affine set ``x0 + range(Z)`` with
    ``x0 = -A1^+ a`` and ``Z`` a null-space basis of ``A1``, so the question
    becomes whether ``f2`` restricted to that set takes the value zero.
    ``index`` labels ``f1`` in the certificate (1 or 2).
    """
    cfg = cfg or ToleranceConfig()
    _check_same_dim(f1, f2)
    prof = sign_profile(f1, cfg.relTol)
    if prof.tag is SignTag.TWO_SIDED:
        raise ValueError("one_sided_branch needs a function that does not change sign")
    sign = -1 if prof.tag is SignTag.NONPOS else 1
    f = -f1 if sign < 0 else f1
    trace = [f"f{index} is one-sided ({prof.tag.value})"]
    cv, x0 = critical_value(f, cfg.relTol)
    tol = cfg.certTol * f.scale
    if cv > tol:
        trace.append(f"min of {'+' if sign > 0 else '-'}f{index} is {cv:.6g} > 0: surface empty")
        cert = {"type": "OneSidedEmpty", "index": index, "sign": sign, "theta": cv}
        return Verdict(VerdictTag.DISJOINT, None, cert, cfg.decisionTol, trace)
    Z = linalg.sym_eigen(f.matA, cfg.relTol).null_basis() if f.dim else np.zeros((0, 0))
    r = restrict_affine(f2, x0, Z)
    trace.append(f"surface of f{index} is an affine set of dimension {Z.shape[1]}")
    hit, w = attains_zero(r, cfg.relTol, cfg.certTol * f2.scale)
    if hit:
        trace.append("restricted quadratic attains zero")
        return Verdict(VerdictTag.INTERSECT, x0 + Z @ w, None, cfg.decisionTol, trace)
    trace.append("restricted quadratic never vanishes")
    cert = {"type": "AffineReduction", "index": index, "sign": sign, "x0": x0.tolist(),
            "basis": Z.tolist(), "C": r.matA.tolist(), "c": r.vecA.tolist(), "c0": r.scalarA}
    return Verdict(VerdictTag.DISJOINT, None, cert, cfg.decisionTol, trace)


# ---------------------------------------------------------------------------
# the quartic value

def po4_value(f1: Quadratic, f2: Quadratic, rel_tol: float = REL_TOL,
              slack: float = 1e-12) -> tuple[float, dict]:
    """``inf f1^2 + f2^2`` with a transcript that certifies its lower bound."""
    _check_same_dim(f1, f2)
    if f1.is_affine(rel_tol) and f2.is_affine(rel_tol):
        return _po4_affine(f1, f2, rel_tol)
    t21 = is_scalar_multiple(f2.matA, f1.matA, rel_tol)
    t12 = is_scalar_multiple(f1.matA, f2.matA, rel_tol)
    if t21 is None and t12 is None:
        c = po4_value_indep(f1, f2, rel_tol)
        return c.value, {"case": "independent", "gamma": c.gamma, "alpha": c.alpha,
                         "beta": c.beta, "clamped": c.clamped}
    use_first = t21 is not None and (t12 is None or np.linalg.norm(f1.matA) >= np.linalg.norm(f2.matA))
    base, other, t, idx = (f1, f2, t21, 1) if use_first else (f2, f1, t12, 2)
    obj_r, con_r, _, _ = restricted_pair(base, other, t)
    res = qp1eqc_value(obj_r, con_r, rel_tol)
    value = max(0.0, res.value) if math.isfinite(res.value) else res.value
    transcript = {"case": "dependent", "base": idx, "t": t, "method": res.method.value,
                  "lambda": None, "gamma": 0.0}
    if res.method is Method.DUAL_SCAN and res.multiplier is not None:
        lam = float(res.multiplier)
        gamma = dual_value(obj_r, con_r, lam, rel_tol)
        if math.isfinite(gamma):
            transcript["lambda"] = lam
            transcript["gamma"] = max(0.0, gamma - slack * max(1.0, abs(gamma)))
    return value, transcript


def _po4_affine(f1: Quadratic, f2: Quadratic, rel_tol: float) -> tuple[float, dict]:
    # f_i = c_i'x + d_i: least squares on the stacked affine map
    C = np.vstack([2.0 * f1.vecA, 2.0 * f2.vecA])
    d = np.array([f1.scalarA, f2.scalarA])
    if C.shape[1]:
        x = -np.linalg.lstsq(C, d, rcond=None)[0]
        r = d + C @ x
    else:
        r = d
    # residual component orthogonal to the column space of C
    U = linalg.null_basis(C.T, rel_tol) if C.shape[1] else np.eye(2)
    r = U @ (U.T @ r)
    gap = float(r @ r)
    y = r / np.sqrt(gap) if gap > 0.0 else np.zeros(2)
    return gap, {"case": "affine", "y": y.tolist(), "gamma": gap}


# ---------------------------------------------------------------------------
# the programs inf{s_i f_i : s_j f_j <= 0}

def sign_programs(f1: Quadratic, f2: Quadratic, rel_tol: float = REL_TOL) -> list[dict]:
    fs = (f1, f2)
    out = []
    for i, j in ((1, 2), (2, 1)):
        for si in (1, -1):
            for sj in (1, -1):
                res = qp1qc_value(si * fs[i - 1], sj * fs[j - 1], rel_tol)
                out.append({"objective": i, "objSign": si, "constraint": j, "conSign": sj,
                            "result": res})
    return out


def _program_entry(p: dict) -> dict:
    res: ProgramResult = p["result"]
    return {"objective": p["objective"], "objSign": p["objSign"], "constraint": p["constraint"],
            "conSign": p["conSign"], "value": res.value, "attained": res.attained,
            "multiplier": res.multiplier, "method": res.method.value}


def _describe(p: dict) -> str:
    sgn = {1: "", -1: "-"}
    return (f"inf{{{sgn[p['objSign']]}f{p['objective']} : "
            f"{sgn[p['conSign']]}f{p['constraint']} <= 0}}")


# ---------------------------------------------------------------------------

def _witness_starts(f1: Quadratic, f2: Quadratic, rng: np.random.Generator, extra=(), count: int = 12):
    n = f1.dim
    starts = [np.asarray(x, dtype=float) for x in extra if x is not None]
    starts.append(np.zeros(n))
    for f in (f1, f2):
        _, x0 = critical_value(f)
        if x0 is not None:
            starts.append(x0)
    starts.extend(rng.uniform(-3.0, 3.0, size=(count, n)))
    return starts


def _search_witness(f1, f2, starts, cfg, strict: bool) -> Optional[np.ndarray]:
    s = max(f1.scale, f2.scale)
    thr = (1e-10 * s) ** 2 if strict else (0.1 * cfg.witnessTol * s) ** 2
    for x in starts:
        w = descend_to_intersection(f1, f2, x, threshold=thr)
        if w is not None and check_witness(f1, f2, w, cfg.witnessTol) is None:
            return w
    return None


def decide(f1: Quadratic, f2: Quadratic, cfg: Optional[ToleranceConfig] = None,
           seed: int = 0, fast_witness: bool = True, report_value: bool = True) -> Verdict:
    """Decide whether the two quadric surfaces meet.

    DISJOINT verdicts carry a certificate and INTERSECT verdicts a witness
    when one is found; both are re-checked by :mod:`qmeet.certificates`
    before returning, and a failed check downgrades the verdict to UNDECIDED.
    ``report_value`` also computes ``v`` on branches that do not need it.
    """
    cfg = cfg or ToleranceConfig.from_env()
    _check_same_dim(f1, f2)
    v = _decide(f1, f2, cfg, seed, fast_witness, report_value)
    return _validated(f1, f2, v, cfg)


def _validated(f1, f2, v: Verdict, cfg: ToleranceConfig) -> Verdict:
    if v.tag is VerdictTag.DISJOINT:
        why = check_certificate(f1, f2, v.certificate, cfg.certTol, cfg.zeroTol)
        if why is not None:
            v.trace.append(f"certificate rejected: {why}")
            v.tag = VerdictTag.UNDECIDED
        else:
            v.trace.append(f"{v.certificate['type']} certificate re-validated")
    elif v.tag is VerdictTag.INTERSECT and v.witness is not None:
        why = check_witness(f1, f2, v.witness, cfg.witnessTol)
        if why is not None:
            v.trace.append(f"witness rejected: {why}")
            v.tag = VerdictTag.UNDECIDED
        else:
            v.trace.append("witness re-validated")
    return v


def _decide(f1: Quadratic, f2: Quadratic, cfg: ToleranceConfig, seed: int,
            fast_witness: bool, report_value: bool) -> Verdict:
    trace: list = []
    fs = (f1, f2)

    def done(tag, witness=None, cert=None, **kw) -> Verdict:
        return Verdict(tag, witness, cert, cfg.decisionTol, trace, **kw)

    # (0) an identically zero function leaves only the other surface
    for i in (0, 1):
        if _is_zero(fs[i], cfg.relTol):
            g = fs[1 - i]
            trace.append(f"f{i + 1} is identically zero")
            if _is_zero(g, cfg.relTol):
                return done(VerdictTag.INTERSECT, np.zeros(f1.dim))
            hit, w = attains_zero(g, cfg.relTol, cfg.certTol * g.scale)
            if hit:
                return done(VerdictTag.INTERSECT, w)
            sub = one_sided_branch(g, fs[i], cfg, index=2 - i)
            trace.extend(sub.trace)
            return done(sub.tag, sub.witness, sub.certificate)

    # (1) one-sided functions reduce to an affine question
    profiles = [sign_profile(f, cfg.relTol) for f in fs]
    for i in (0, 1):
        if profiles[i].tag is not SignTag.TWO_SIDED:
            sub = one_sided_branch(fs[i], fs[1 - i], cfg, index=i + 1)
            trace.extend(sub.trace)
            value = po4_value(f1, f2, cfg.relTol)[0] if report_value else None
            return done(sub.tag, sub.witness, sub.certificate, po4Value=value)
    trace.append("both functions take both signs")

    rng = np.random.default_rng(seed)
    extra = [p.witnessNeg for p in profiles] + [p.witnessPos for p in profiles]
    if fast_witness:
        w = _search_witness(f1, f2, _witness_starts(f1, f2, rng, extra, count=4), cfg, strict=True)
        if w is not None:
            trace.append("local descent reached a common zero")
            return done(VerdictTag.INTERSECT, w)

    # (2)-(3) the quartic value
    value, transcript = po4_value(f1, f2, cfg.relTol)
    s = max(f1.scale, f2.scale)
    trace.append(f"v = inf f1^2 + f2^2 = {value:.6g} ({transcript['case']} Hessians)")
    if value > cfg.decisionTol * s * s:
        trace.append("v > 0: surfaces are disjoint")
        if value < 10.0 * cfg.decisionTol * s * s:
            trace.append("v is near the decision threshold")
        cert = {"type": "PositiveGap", **transcript}
        return done(VerdictTag.DISJOINT, None, cert, po4Value=value)

    # (4a) separation
    sep = mutual_separation(f1, f2, cfg.relTol)
    if sep is not None:
        (i, j), c = sep
        trace.append(f"{{f{i}=0}} separates {{f{j}=0}}")
        cert = {"type": "Separation", "i": i, "j": j, **c.to_dict()}
        return done(VerdictTag.DISJOINT, None, cert, po4Value=value)
    trace.append("no separation")

    # (4b) the sign-combined programs
    progs = sign_programs(f1, f2, cfg.relTol)
    entries = [_program_entry(p) for p in progs]
    zero = [p for p in progs if abs(p["result"].value) <= cfg.zeroTol * s]
    for p in zero:
        trace.append(f"{_describe(p)} = 0 ({'attained' if p['result'].attained else 'unattained'})")
    attained = [p for p in zero if p["result"].attained]
    if zero and not attained:
        cert = {"type": "UnattainedZero", "programs": [_program_entry(p) for p in zero]}
        return done(VerdictTag.DISJOINT, None, cert, po4Value=value, programs=entries)
    if attained:
        if len(attained) < len(zero):
            trace.append("zero-valued programs disagree on attainment")
        start = attained[0]["result"].witness
        w = start if check_witness(f1, f2, start, cfg.witnessTol) is None else \
            _search_witness(f1, f2, [start], cfg, strict=False)
        if w is None:
            trace.append("attained program gave no usable witness")
        return done(VerdictTag.INTERSECT, w, po4Value=value, programs=entries)

    trace.append("no program has value zero: surfaces intersect")
    extra += [p["result"].witness for p in progs]
    w = _search_witness(f1, f2, _witness_starts(f1, f2, rng, extra, count=32), cfg, strict=False)
    if w is None:
        # the meeting point may lie outside the start box: fall back to sampling
        best = sample_min(f1, f2, nSamples=100_000, seed=seed).bestPoint
        w = _search_witness(f1, f2, [best], cfg, strict=False)
        if w is not None:
            trace.append("sampling oracle located the witness")
    if w is None:
        trace.append("witness search failed")
    return done(VerdictTag.INTERSECT, w, po4Value=value, programs=entries)
