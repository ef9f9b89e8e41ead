"""Independent re-validation of verdict certificates.

Every check here uses eigen-decompositions, pseudoinverses and the closed-form
range test of a single quadratic; none of the solvers (dual scans, the
two-multiplier search, sampling) is invoked.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from . import linalg
from .canonical import restrict_affine
from .linalg import REL_TOL
from .quadform import Quadratic, attains_nonpositive, attains_zero, critical_value, drop_below

CERT_SCHEMA = "qmeet-cert/1"
DEFAULT_CERT_TOL = 1e-8
DEFAULT_WITNESS_TOL = 1e-7
DEFAULT_ZERO_TOL = 1e-6  # program values this close to zero count as zero
NULL_TOL = 1e-7  # resolution of a stored multiplier, see qmeet.duals


class CertificateError(ValueError):
    pass


def _psd_with_range(q: Quadratic, tol: float, rel_tol: float = REL_TOL) -> Optional[float]:
    """Minimum of ``q`` when its Hessian is PSD (to ``tol``) and ``a`` is in range, else None."""
    if q.dim:
        lo = linalg.lambda_min(q.matA)
        if lo < -tol * max(1.0, linalg.inf_norm(q.matA)):
            return None
    cv, _ = critical_value(q, rel_tol)
    return cv


def _minimizer_set(L: Quadratic):
    # minimizers of a PSD quadratic: xp + span(N), eigenvalues below NULL_TOL treated as zero
    if L.dim == 0:
        return np.zeros(0), np.zeros((0, 0))
    ev, Q = np.linalg.eigh(L.matA)
    flat = np.abs(ev) <= NULL_TOL * max(1.0, float(np.max(np.abs(ev))))
    R = Q[:, ~flat]
    return -(R / ev[~flat]) @ (R.T @ L.vecA), Q[:, flat]


def lmi_matrix(f1: Quadratic, f2: Quadratic, gamma: float, alpha: float, beta: float) -> np.ndarray:
    n = f1.dim
    M = np.zeros((n + 3, n + 3))
    M[0, 0] = M[1, 1] = 1.0
    M[0, -1] = M[-1, 0] = -alpha / 2.0
    M[1, -1] = M[-1, 1] = -beta / 2.0
    M[2:-1, 2:-1] = alpha * f1.matA + beta * f2.matA
    w = alpha * f1.vecA + beta * f2.vecA
    M[2:-1, -1] = M[-1, 2:-1] = w
    M[-1, -1] = alpha * f1.scalarA + beta * f2.scalarA - gamma
    return M


def lift_dependent(base: Quadratic, other: Quadratic, t: float):
    """Lifted form of ``inf base^2 + other^2`` when ``other.matA = t*base.matA``.

    Variables ``y = (x, z1, z2)``; returns the objective ``z1^2 + z2^2``, the
    constraint ``base(x) - z1 = 0`` and the hyperplane ``h'y + h0 = 0``
    encoding ``z2 = other(x)``.
    """
    n = base.dim
    obj_A = np.zeros((n + 2, n + 2))
    obj_A[n, n] = obj_A[n + 1, n + 1] = 1.0
    obj = Quadratic(obj_A, np.zeros(n + 2), 0.0)
    con_A = np.zeros((n + 2, n + 2))
    con_A[:n, :n] = base.matA
    con = Quadratic(con_A, np.concatenate([base.vecA, [-0.5, 0.0]]), base.scalarA)
    h = np.concatenate([2.0 * (other.vecA - t * base.vecA), [t, -1.0]])
    h0 = other.scalarA - t * base.scalarA
    return obj, con, h, h0


def restricted_pair(base: Quadratic, other: Quadratic, t: float):
    """The lifted objective and constraint on the hyperplane, plus its frame."""
    obj, con, h, h0 = lift_dependent(base, other, t)
    y0 = -(h0 / float(h @ h)) * h
    V = linalg.null_basis(h)
    return restrict_affine(obj, y0, V), restrict_affine(con, y0, V), y0, V


def _signed(fs, index: int, sign: int) -> Quadratic:
    if index not in (1, 2) or sign not in (1, -1):
        raise CertificateError("index must be 1 or 2 and sign must be +1 or -1")
    return fs[index - 1] if sign == 1 else -fs[index - 1]


# ---------------------------------------------------------------------------
# per-type checks; each returns None on success or a reason string

def _check_positive_gap(f1, f2, cert, tol, zero_tol):
    s = max(f1.scale, f2.scale)
    gamma = float(cert["gamma"])
    if not gamma > tol * s * s:
        return f"gamma={gamma:.3e} is not positive beyond tolerance"
    case = cert.get("case")
    if case == "independent":
        M = lmi_matrix(f1, f2, gamma, float(cert["alpha"]), float(cert["beta"]))
        lo = linalg.lambda_min(M)
        if lo < -tol * max(1.0, linalg.inf_norm(M)):
            return f"LMI matrix has eigenvalue {lo:.3e}"
        return None
    if case == "dependent":
        fs = (f1, f2)
        base = fs[int(cert["base"]) - 1]
        other = fs[2 - int(cert["base"])]
        t = float(cert["t"])
        if np.max(np.abs(other.matA - t * base.matA), initial=0.0) > tol * s * max(1.0, abs(t)):
            return "Hessians are not related by the stated multiple"
        obj_r, con_r, _, _ = restricted_pair(base, other, t)
        low = _psd_with_range(obj_r + float(cert["lambda"]) * con_r, tol)
        if low is None or low < gamma - tol * s * s:
            return "dual multiplier does not certify the lower bound"
        return None
    if case == "affine":
        if not (f1.is_affine() and f2.is_affine()):
            return "affine certificate for non-affine functions"
        y = np.asarray(cert["y"], dtype=float)
        if abs(np.linalg.norm(y) - 1.0) > 1e-9:
            return "combination vector is not a unit vector"
        grad = y[0] * f1.vecA + y[1] * f2.vecA
        if np.linalg.norm(grad) > tol * s:
            return "combination does not cancel the linear parts"
        if (y[0] * f1.scalarA + y[1] * f2.scalarA) ** 2 < gamma - tol * s * s:
            return "combination constant is too small"
        return None
    return f"unknown PositiveGap case {case!r}"


def _check_separation(f1, f2, cert, tol, zero_tol):
    fs = (f1, f2)
    i, j = int(cert["i"]), int(cert["j"])
    if {i, j} != {1, 2}:
        return "separation indices must be (1,2) or (2,1)"
    g, f = fs[i - 1], fs[j - 1]
    lam = float(cert["lambda"])
    s = max(f.scale, g.scale)
    ell = g - lam * f
    if np.max(np.abs(ell.matA), initial=0.0) > tol * s * max(1.0, abs(lam)):
        return "separating function is not affine after subtracting the multiple"
    nu, nu0 = 2.0 * ell.vecA, ell.scalarA
    if np.linalg.norm(nu) <= tol * s:
        return "separating hyperplane has zero normal"
    F = -f if cert.get("signFlipped") else f
    sd = linalg.sym_eigen(F.matA)
    neg, _, _ = sd.inertia()
    if neg != 1:
        return f"oriented quadric has {neg} negative eigenvalues, expected 1"
    cv, _ = critical_value(F)
    if cv is None or cv <= tol * F.scale:
        return "oriented quadric has no positive critical value"
    if not linalg.in_range(F.matA, nu):
        return "hyperplane normal leaves the range of the Hessian"
    if abs(sd.eigenvectors[:, 0] @ nu) <= tol * (1.0 + np.linalg.norm(nu)):
        return "hyperplane is parallel to the negative direction"
    y0 = -(nu0 / float(nu @ nu)) * nu
    restricted = restrict_affine(F, y0, linalg.null_basis(nu))
    low = _psd_with_range(restricted, tol)
    if low is None or low <= tol * F.scale:
        return "quadric meets the separating hyperplane"
    return None


def _check_unattained(f1, f2, cert, tol, zero_tol):
    progs = cert.get("programs") or []
    if not progs:
        return "no zero-valued program listed"
    fs = (f1, f2)
    for p in progs:
        obj = _signed(fs, int(p["objective"]), int(p["objSign"]))
        con = _signed(fs, int(p["constraint"]), int(p["conSign"]))
        mu = float(p["multiplier"])
        if mu < 0.0:
            return "negative multiplier"
        L = obj + mu * con
        s = max(obj.scale, con.scale) * max(1.0, mu)
        low = _psd_with_range(L, tol)
        if low is None or abs(low) > zero_tol * s:
            return "multiplier does not certify the zero value"
        # every optimal point minimizes L; check none of them is feasible with value 0
        xp, N = _minimizer_set(L)
        g_r = drop_below(restrict_affine(con, xp, N), NULL_TOL * con.scale)
        if mu > tol:
            hit, _ = attains_zero(g_r, tol=tol * con.scale)
        else:
            hit, _ = attains_nonpositive(g_r, tol=tol * con.scale)
        if hit:
            return "program attains its zero value"
    return None


def _check_one_sided_empty(f1, f2, cert, tol, zero_tol):
    f = _signed((f1, f2), int(cert["index"]), int(cert["sign"]))
    low = _psd_with_range(f, tol)
    if low is None or low <= tol * f.scale:
        return "surface is not certified empty"
    return None


def _check_affine_reduction(f1, f2, cert, tol, zero_tol):
    i = int(cert["index"])
    f = _signed((f1, f2), i, int(cert["sign"]))
    g = (f1, f2)[2 - i]
    low = _psd_with_range(f, tol)
    if low is None:
        return "reducing function is not one-sided"
    if low > tol * f.scale:
        return None  # its surface is empty anyway
    if low < -tol * f.scale:
        return "reducing function takes negative values"
    x0 = -linalg.pinv_solve(f.matA, f.vecA)
    Z = linalg.sym_eigen(f.matA).null_basis()
    hit, _ = attains_zero(restrict_affine(g, x0, Z), tol=tol * g.scale)
    if hit:
        return "restricted quadratic attains zero"
    return None


_CHECKS = {
    "PositiveGap": _check_positive_gap,
    "Separation": _check_separation,
    "UnattainedZero": _check_unattained,
    "OneSidedEmpty": _check_one_sided_empty,
    "AffineReduction": _check_affine_reduction,
}


def check_witness(f1: Quadratic, f2: Quadratic, w, tol: float = DEFAULT_WITNESS_TOL) -> Optional[str]:
    w = np.asarray(w, dtype=float)
    if w.shape != (f1.dim,):
        return "witness has the wrong length"
    s = max(f1.scale, f2.scale)
    r = max(abs(f1(w)), abs(f2(w)))
    if not r <= tol * s:
        return f"witness residual {r:.3e} exceeds {tol * s:.3e}"
    return None


def check_certificate(f1: Quadratic, f2: Quadratic, cert: dict, tol: float = DEFAULT_CERT_TOL,
                      zero_tol: float = DEFAULT_ZERO_TOL) -> Optional[str]:
    """None when the DISJOINT certificate re-validates, else the reason it fails."""
    kind = cert.get("type") if isinstance(cert, dict) else None
    if kind not in _CHECKS:
        return f"unknown certificate type {kind!r}"
    try:
        return _CHECKS[kind](f1, f2, cert, tol, zero_tol)
    except (KeyError, TypeError, ValueError) as exc:
        return f"malformed certificate: {exc}"


def validate_report(f1: Quadratic, f2: Quadratic, report: dict, cert_tol: float = DEFAULT_CERT_TOL,
                    witness_tol: float = DEFAULT_WITNESS_TOL,
                    zero_tol: float = DEFAULT_ZERO_TOL) -> Optional[str]:
    """Re-check an emitted verdict document (``qmeet-cert/1``)."""
    if report.get("schema") != CERT_SCHEMA:
        return f"expected schema {CERT_SCHEMA!r}"
    tag = report.get("verdict")
    if tag == "DISJOINT":
        return check_certificate(f1, f2, report.get("certificate"), cert_tol, zero_tol)
    if tag == "INTERSECT":
        w = report.get("witness")
        if w is None:
            return "INTERSECT verdict carries no witness"
        return check_witness(f1, f2, w, witness_tol)
    return f"verdict {tag!r} has nothing to validate"
