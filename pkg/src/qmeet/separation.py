"""Separation of one quadratic level set by another.

``{g=0}`` separates ``{f=0}`` when ``{f=0}`` splits into two nonempty pieces
on which ``g`` has strictly opposite signs. For two quadratics this reduces
to an affine ``g`` (after subtracting a multiple of ``f``), and for an affine
``g`` to a closed-form test on ``f`` restricted to the hyperplane ``{g=0}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .canonical import CanonicalForm, FormTag, canonicalize, restrict_to_hyperplane
from .linalg import REL_TOL
from .quadform import Quadratic, critical_value


@dataclass(frozen=True)
class SeparationCertificate:
    lam: float
    nu: np.ndarray
    nu0: float
    canon: CanonicalForm
    signFlipped: bool
    restrictedMin: float
    coeffs: np.ndarray  # g's linear coefficients in the canonical basis

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "nu": self.nu.tolist(),
            "nu0": self.nu0,
            "signFlipped": self.signFlipped,
            "restrictedMin": self.restrictedMin,
            "theta": self.canon.theta,
            "k": self.canon.k,
            "m": self.canon.m,
            "delta": self.canon.delta,
            "basis": self.canon.P.tolist(),
            "shift": self.canon.q.tolist(),
            "coeffs": self.coeffs.tolist(),
        }


def is_scalar_multiple(B, A, tol: float = REL_TOL) -> Optional[float]:
    """``lam`` with ``B = lam*A`` (least squares, residual-checked), else None."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    scale = linalg.scale_of(A, B)
    aa = float(np.sum(A * A))
    if aa <= (tol * scale) ** 2:
        return 0.0 if float(np.max(np.abs(B), initial=0.0)) <= tol * scale else None
    lam = float(np.sum(A * B)) / aa
    if float(np.max(np.abs(B - lam * A), initial=0.0)) <= tol * scale * max(1.0, abs(lam)):
        return lam
    return None


def strict_min(q: Quadratic, rel_tol: float = REL_TOL) -> Optional[float]:
    """Infimum of ``q`` when ``q`` is bounded below, else None."""
    if q.dim:
        sd = linalg.sym_eigen(q.matA, rel_tol)
        if sd.eigenvalues[0] < -sd.rankTol:
            return None
    cv, _ = critical_value(q, rel_tol)
    return cv


def _oriented_check(nu: np.ndarray, nu0: float, f: Quadratic, flipped: bool, strict: bool,
                    rel_tol: float) -> Optional[SeparationCertificate]:
    tol = rel_tol * max(f.scale, 1.0)
    sd = linalg.sym_eigen(f.matA, rel_tol)
    neg, _, _ = sd.inertia()
    if neg != 1:
        return None
    cv, _ = critical_value(f, rel_tol)
    if cv is None:
        return None
    if (strict and cv <= tol) or (not strict and cv < -tol):
        return None
    # g may only involve coordinates of the range of A
    if not linalg.in_range(f.matA, nu, rel_tol):
        return None
    canon = canonicalize(f, rel_tol)
    coeffs = canon.P.T @ nu
    if abs(coeffs[0]) <= rel_tol * (1.0 + np.linalg.norm(nu)):
        return None
    restricted = restrict_to_hyperplane(f, nu, nu0, rel_tol)
    low = strict_min(restricted, rel_tol)
    if low is None:
        return None
    if (strict and low <= tol) or (not strict and low < -tol):
        return None
    return SeparationCertificate(0.0, np.asarray(nu, dtype=float), float(nu0), canon, flipped, float(low), coeffs)


def affine_separates_quadric(nu, nu0: float, f: Quadratic,
                             rel_tol: float = REL_TOL) -> Optional[SeparationCertificate]:
    """Certificate that ``{nu'x + nu0 = 0}`` separates ``{f = 0}``, else None.

    Tries ``f`` first and then ``-f``.
    """
    nu = np.asarray(nu, dtype=float).reshape(-1)
    if np.linalg.norm(nu) <= rel_tol * max(1.0, abs(nu0)):
        raise ValueError("affine function has zero gradient")
    cert = _oriented_check(nu, nu0, f, False, True, rel_tol)
    if cert is None:
        cert = _oriented_check(nu, nu0, -f, True, True, rel_tol)
    return cert


def separates(g: Quadratic, f: Quadratic, rel_tol: float = REL_TOL) -> Optional[SeparationCertificate]:
    """Certificate that ``{g=0}`` separates ``{f=0}``, else None."""
    lam = is_scalar_multiple(g.matA, f.matA, rel_tol)
    if lam is None:
        return None
    ell = g - lam * f
    nu = 2.0 * ell.vecA
    if np.linalg.norm(nu) <= rel_tol * max(g.scale, f.scale):
        return None
    cert = affine_separates_quadric(nu, ell.scalarA, f, rel_tol)
    if cert is None:
        return None
    return SeparationCertificate(lam, cert.nu, cert.nu0, cert.canon, cert.signFlipped,
                                 cert.restrictedMin, cert.coeffs)


def separates_strict_sublevel(g: Quadratic, f: Quadratic, rel_tol: float = REL_TOL) -> bool:
    """Whether the hyperplane ``{g=0}`` separates ``{f<0}``; ``g`` must be affine."""
    if not g.is_affine(rel_tol):
        return False
    nu = 2.0 * g.vecA
    if np.linalg.norm(nu) <= rel_tol * g.scale:
        return False
    return _oriented_check(nu, g.scalarA, f, False, False, rel_tol) is not None


def mutual_separation(f1: Quadratic, f2: Quadratic,
                      rel_tol: float = REL_TOL) -> Optional[tuple[tuple[int, int], SeparationCertificate]]:
    """``((i, j), cert)`` when ``{f_i=0}`` separates ``{f_j=0}``."""
    cert = separates(f1, f2, rel_tol)
    if cert is not None:
        return (1, 2), cert
    cert = separates(f2, f1, rel_tol)
    if cert is not None:
        return (2, 1), cert
    return None
