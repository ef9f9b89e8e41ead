"""Quadratic programs with one quadratic constraint, solved through their dual.

``d(lam) = inf_x f(x) + lam*g(x)`` is concave in ``lam``. Under two-sided
constraints the S-lemma (inequality) and its equality version make
``sup d`` exact, so each program reduces to a one-dimensional concave
maximization plus a closed-form attainment test at the maximizer.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .canonical import hyperplane_frame, restrict_affine
from .linalg import REL_TOL, PsdInterval
from .quadform import (Quadratic, SignTag, _check_same_dim, attains_nonpositive, attains_zero,
                       critical_value, drop_below, sign_profile)


class Method(str, enum.Enum):
    AFFINE_ELIM = "AFFINE_ELIM"
    ONE_SIDED_REDUCTION = "ONE_SIDED_REDUCTION"
    DUAL_SCAN = "DUAL_SCAN"
    UNCONSTRAINED = "UNCONSTRAINED"


@dataclass
class ProgramResult:
    value: float
    attained: bool
    witness: Optional[np.ndarray]
    method: Method
    multiplier: Optional[float] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "value": _num(self.value),
            "attained": self.attained,
            "witness": None if self.witness is None else self.witness.tolist(),
            "method": self.method.value,
            "multiplier": self.multiplier,
        }


def _num(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass(frozen=True)
class DualScan:
    f: Quadratic
    g: Quadratic
    interval: PsdInterval
    argmaxLambda: Optional[float]
    value: float
    hitCap: bool = False

    def dAt(self, lam: float) -> float:
        return dual_value(self.f, self.g, lam)


def unconstrained_inf(f: Quadratic, rel_tol: float = REL_TOL) -> ProgramResult:
    """``inf f`` over all of ``R^n``."""
    if f.dim:
        sd = linalg.sym_eigen(f.matA, rel_tol)
        if sd.eigenvalues[0] < -sd.rankTol:
            return ProgramResult(-math.inf, False, None, Method.UNCONSTRAINED)
    cv, x0 = critical_value(f, rel_tol)
    if cv is None:
        return ProgramResult(-math.inf, False, None, Method.UNCONSTRAINED)
    return ProgramResult(cv, True, x0, Method.UNCONSTRAINED)


def dual_value(f: Quadratic, g: Quadratic, lam: float, rel_tol: float = REL_TOL) -> float:
    """``inf_x f(x) + lam*g(x)`` (possibly ``-inf``)."""
    return unconstrained_inf(f + lam * g, rel_tol).value


def _common_null_restriction(f: Quadratic, g: Quadratic, rel_tol: float):
    """Constraint that the common null space puts on ``lam``.

    Along directions killed by both matrices the Lagrangian is linear, so it
    is bounded only where ``a + lam*b`` is orthogonal to them. Returns
    ``None`` (no restriction), ``math.nan`` (never bounded), or the single
    admissible ``lam``.
    """
    if f.dim == 0:
        return None
    N0 = linalg.null_basis(np.vstack([f.matA, g.matA]), rel_tol)
    if N0.shape[1] == 0:
        return None
    u, w = N0.T @ f.vecA, N0.T @ g.vecA
    tol = rel_tol * max(f.scale, g.scale)
    if np.linalg.norm(w) <= tol:
        return None if np.linalg.norm(u) <= tol else math.nan
    lam0 = -float(w @ u) / float(w @ w)
    if np.linalg.norm(u + lam0 * w) > tol * (1.0 + abs(lam0)):
        return math.nan
    return lam0


def dual_scan(f: Quadratic, g: Quadratic, lo: float = -math.inf, hi: float = math.inf,
              rel_tol: float = REL_TOL) -> DualScan:
    """Maximize ``d(lam)`` over ``[lo, hi]`` intersected with its PSD interval."""
    interval = linalg.psd_interval(f.matA, g.matA, rel_tol).intersect(lo, hi)
    if interval.empty:
        return DualScan(f, g, interval, None, -math.inf)
    fixed = _common_null_restriction(f, g, rel_tol)
    if fixed is not None:
        if math.isnan(fixed):
            return DualScan(f, g, interval, None, -math.inf)
        lam0 = fixed
        Q = f.matA + lam0 * g.matA
        inside = lo <= lam0 <= hi and (
            interval.contains(lam0) or linalg.lambda_min(Q) >= -linalg.spectral_cutoff(np.linalg.eigvalsh(Q), rel_tol))
        if not inside:
            return DualScan(f, g, interval, None, -math.inf)
        return DualScan(f, g, PsdInterval(lam0, lam0, False), lam0, dual_value(f, g, lam0, rel_tol))
    if interval.is_point:
        lam = interval.lo
        return DualScan(f, g, interval, lam, dual_value(f, g, lam, rel_tol))
    lam, val, capped = linalg.maximize_concave(lambda t: dual_value(f, g, t, rel_tol),
                                               interval.lo, interval.hi)
    lam, val = _polish(f, g, lam, val, interval, rel_tol)
    # maxima at a kink on the boundary are located more sharply by the endpoint itself
    for end in (interval.lo, interval.hi):
        if math.isfinite(end):
            v_end = dual_value(f, g, end, rel_tol)
            if v_end > val:
                lam, val = end, v_end
    return DualScan(f, g, interval, lam, val, capped)


def _polish(f: Quadratic, g: Quadratic, lam: float, val: float, interval: PsdInterval,
            rel_tol: float) -> tuple[float, float]:
    """Sharpen a smooth interior maximizer by bisecting on the slope of ``d``.

    Where the Lagrangian minimizer ``x(lam)`` is unique up to the common null
    space, ``d'(lam) = g(x(lam))``; golden-section alone only pins ``lam`` to
    about the square root of machine precision.
    """
    if not math.isfinite(val):
        return lam, val
    width = 1e-6 * (1.0 + abs(lam))
    a = max(interval.lo, lam - width)
    b = min(interval.hi, lam + width)
    if a == interval.lo:
        a = a + 0.5 * (lam - a)
    if b == interval.hi:
        b = b - 0.5 * (b - lam)
    if not a < b:
        return lam, val

    def slope(t: float) -> float:
        L = f + t * g
        x = -linalg.pinv_solve(L.matA, L.vecA, rel_tol)
        return g(x)

    sa, sb = slope(a), slope(b)
    if not (sa > 0.0 > sb):
        return lam, val
    for _ in range(100):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if slope(mid) > 0.0:
            a = mid
        else:
            b = mid
    best = 0.5 * (a + b)
    v = dual_value(f, g, best, rel_tol)
    if v >= val - 1e-14 * (1.0 + abs(val)):
        return best, v
    return lam, val


# Relative size below which Lagrangian eigenvalues and restricted coefficients
# count as zero in attainment tests: the multiplier is only known to about
# this accuracy, and an error there tilts the null space by as much.
NULL_TOL = 1e-7


def lagrangian_minimizers(L: Quadratic, rel_tol: float = REL_TOL):
    """Particular minimizer ``xp`` and null basis ``N`` of a PSD Lagrangian."""
    if L.dim == 0:
        return np.zeros(0), np.zeros((0, 0))
    sd = linalg.sym_eigen(L.matA, rel_tol)
    ev, Q = sd.eigenvalues, sd.eigenvectors
    cut = max(sd.rankTol, NULL_TOL * max(1.0, float(np.max(np.abs(ev)))))
    keep = np.abs(ev) > cut
    R = Q[:, keep]
    xp = -(R / ev[keep]) @ (R.T @ L.vecA)
    return xp, Q[:, ~keep]


def restricted_constraint(g: Quadratic, xp: np.ndarray, N: np.ndarray) -> Quadratic:
    return drop_below(restrict_affine(g, xp, N), NULL_TOL * g.scale)


def qp1eqc_value(f: Quadratic, g: Quadratic, rel_tol: float = REL_TOL,
                 zero_tol: float = 1e-9) -> ProgramResult:
    """``inf f(x)`` subject to ``g(x) = 0``."""
    _check_same_dim(f, g)
    tol = rel_tol * max(f.scale, g.scale)
    if g.is_affine(rel_tol):
        b, b0 = 2.0 * g.vecA, g.scalarA
        if np.linalg.norm(b) <= tol:
            if abs(b0) > tol:
                return ProgramResult(math.inf, False, None, Method.AFFINE_ELIM)
            res = unconstrained_inf(f, rel_tol)
            res.method = Method.AFFINE_ELIM
            return res
        y0, V = hyperplane_frame(b, b0, rel_tol)
        res = unconstrained_inf(restrict_affine(f, y0, V), rel_tol)
        witness = None if res.witness is None else y0 + V @ res.witness
        return ProgramResult(res.value, res.attained, witness, Method.AFFINE_ELIM)

    prof = sign_profile(g, rel_tol)
    if prof.tag in (SignTag.NONNEG, SignTag.NONPOS):
        gg = g if prof.tag is SignTag.NONNEG else -g
        cv, x0 = critical_value(gg, rel_tol)
        if cv is None or cv > zero_tol * gg.scale:
            return ProgramResult(math.inf, False, None, Method.ONE_SIDED_REDUCTION)
        Z = linalg.sym_eigen(gg.matA, rel_tol).null_basis()
        res = unconstrained_inf(restrict_affine(f, x0, Z), rel_tol)
        witness = None if res.witness is None else x0 + Z @ res.witness
        return ProgramResult(res.value, res.attained, witness, Method.ONE_SIDED_REDUCTION)

    scan = dual_scan(f, g, rel_tol=rel_tol)
    if not math.isfinite(scan.value):
        return ProgramResult(scan.value, False, None, Method.DUAL_SCAN, scan.argmaxLambda)
    xp, N = lagrangian_minimizers(f + scan.argmaxLambda * g, rel_tol)
    hit, w = attains_zero(restricted_constraint(g, xp, N), rel_tol, zero_tol * g.scale)
    witness = None if not hit else xp + N @ w
    res = ProgramResult(scan.value, hit and not scan.hitCap, witness, Method.DUAL_SCAN, scan.argmaxLambda)
    if scan.hitCap:
        res.notes.append("multiplier search reached its cap")
    return res


def qp1qc_value(f: Quadratic, g: Quadratic, rel_tol: float = REL_TOL,
                zero_tol: float = 1e-9) -> ProgramResult:
    """``inf f(x)`` subject to ``g(x) <= 0``."""
    _check_same_dim(f, g)
    prof = sign_profile(g, rel_tol)
    if prof.tag is SignTag.NONNEG:
        return qp1eqc_value(f, g, rel_tol, zero_tol)
    if prof.tag in (SignTag.NONPOS, SignTag.ZERO):
        return unconstrained_inf(f, rel_tol)

    scan = dual_scan(f, g, 0.0, math.inf, rel_tol)
    if not math.isfinite(scan.value):
        return ProgramResult(scan.value, False, None, Method.DUAL_SCAN, scan.argmaxLambda)
    mu = scan.argmaxLambda
    xp, N = lagrangian_minimizers(f + mu * g, rel_tol)
    g_r = restricted_constraint(g, xp, N)
    if mu > rel_tol:
        # complementarity: an optimal point sits on g = 0
        hit, w = attains_zero(g_r, rel_tol, zero_tol * g.scale)
    else:
        hit, w = attains_nonpositive(g_r, rel_tol, zero_tol * g.scale)
    witness = None if not hit else xp + N @ w
    res = ProgramResult(scan.value, hit and not scan.hitCap, witness, Method.DUAL_SCAN, mu)
    if scan.hitCap:
        res.notes.append("multiplier search reached its cap")
    return res
