"""Canonical forms of a single quadratic and restrictions to affine subspaces.

The five shapes, in the variable ``z`` after ``x = Pz + q``:

    F1  -z1^2 - ... - zk^2 + delta*(z_{k+1}^2 + ... + zm^2) + theta     theta >= 0
    F2  -z1^2 - ... - zk^2 + delta*(z_{k+1}^2 + ... + zm^2) - theta'    theta' > 0
    F3  -z1^2 - ... - zk^2 + delta*(z_{k+1}^2 + ... + zm^2) + z_{m+1}
    F4   z1^2 + ... + zm^2 + delta*z_{m+1} + c'
    F5   delta*z1 + c'
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import REL_TOL
from .quadform import Quadratic


class ConstantQuadraticError(ValueError):
    pass


class FormTag(str, enum.Enum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    F5 = "F5"


@dataclass(frozen=True)
class CanonicalForm:
    formTag: FormTag
    k: int
    m: int
    delta: int
    theta: float = 0.0
    thetaPrime: float = 0.0
    cPrime: float = 0.0
    P: np.ndarray = None
    q: np.ndarray = None

    def expression(self, z) -> float:
        """Value of the canonical polynomial at ``z``."""
        z = np.asarray(z, dtype=float)
        k, m, d = self.k, self.m, self.delta
        tag = self.formTag
        if tag in (FormTag.F1, FormTag.F2, FormTag.F3):
            val = -np.sum(z[:k] ** 2) + d * np.sum(z[k:m] ** 2)
            if tag is FormTag.F1:
                return float(val + self.theta)
            if tag is FormTag.F2:
                return float(val - self.thetaPrime)
            return float(val + z[m])
        if tag is FormTag.F4:
            val = np.sum(z[:m] ** 2) + self.cPrime
            return float(val + (d * z[m] if d else 0.0))
        return float(d * z[0] + self.cPrime)

    def as_quadratic(self, n: int) -> Quadratic:
        """The canonical polynomial as a :class:`Quadratic` in ``z``."""
        A = np.zeros((n, n))
        a = np.zeros(n)
        c = 0.0
        k, m, d = self.k, self.m, self.delta
        tag = self.formTag
        if tag in (FormTag.F1, FormTag.F2, FormTag.F3):
            A[np.arange(k), np.arange(k)] = -1.0
            A[np.arange(k, m), np.arange(k, m)] = float(d)
            if tag is FormTag.F1:
                c = self.theta
            elif tag is FormTag.F2:
                c = -self.thetaPrime
            else:
                a[m] = 0.5
        elif tag is FormTag.F4:
            A[np.arange(m), np.arange(m)] = 1.0
            if d:
                a[m] = 0.5
            c = self.cPrime
        else:
            a[0] = 0.5 * d
            c = self.cPrime
        return Quadratic(A, a, c)


def _lift_column(v: np.ndarray) -> np.ndarray:
    # column p with 2 v'p = 1
    return v / (2.0 * float(v @ v))


def canonicalize(f: Quadratic, rel_tol: float = REL_TOL) -> CanonicalForm:
    """Reduce a non-constant quadratic to one of the five canonical shapes."""
    n = f.dim
    sd = linalg.sym_eigen(f.matA, rel_tol) if n else None
    a = f.vecA
    if n == 0 or sd.rank == 0:
        if np.linalg.norm(a) <= rel_tol * f.scale:
            raise ConstantQuadraticError("quadratic is constant")
        # F5: z1 = 2a'x + a0 - c'
        rest = linalg.null_basis(a, rel_tol)
        P = np.column_stack([_lift_column(a), rest])
        return CanonicalForm(FormTag.F5, 0, 0, 1, cPrime=f.scalarA, P=P, q=np.zeros(n))

    ev, Q = sd.eigenvalues, sd.eigenvectors
    t = sd.rankTol
    neg = np.where(ev < -t)[0]
    pos = np.where(ev > t)[0]
    zer = np.where(np.abs(ev) <= t)[0]
    k, p = len(neg), len(pos)
    order = np.concatenate([neg, pos])
    R = Q[:, order] / np.sqrt(np.abs(ev[order]))
    N = Q[:, zer]
    a_null = N @ (N.T @ a)
    x0 = -linalg.pinv_solve(f.matA, a, rel_tol)
    f_x0 = f(x0)
    has_bare = np.linalg.norm(a_null) > rel_tol * (1.0 + np.linalg.norm(a))

    if has_bare:
        lead = _lift_column(a_null)
        others = N @ linalg.null_basis(N.T @ a_null, rel_tol) if N.shape[1] > 1 else np.zeros((n, 0))
        P = np.column_stack([R, lead, others])
        shift = x0 - f_x0 * lead
    else:
        P = np.column_stack([R, N])
        shift = x0
        crit = float(f.scalarA + a @ x0)

    if k >= 1:
        delta = 1 if p else 0
        m = k + p
        if has_bare:
            return CanonicalForm(FormTag.F3, k, m, delta, P=P, q=shift)
        if crit >= 0.0:
            return CanonicalForm(FormTag.F1, k, m, delta, theta=crit, P=P, q=shift)
        return CanonicalForm(FormTag.F2, k, m, delta, thetaPrime=-crit, P=P, q=shift)
    if has_bare:
        return CanonicalForm(FormTag.F4, 0, p, 1, cPrime=0.0, P=P, q=shift)
    return CanonicalForm(FormTag.F4, 0, p, 0, cPrime=crit, P=P, q=shift)


def restrict_affine(f: Quadratic, x0, Z) -> Quadratic:
    """``w -> f(x0 + Zw)`` for a basis ``Z`` of directions."""
    return f.compose_affine(np.asarray(Z, dtype=float).reshape(f.dim, -1), x0)


def hyperplane_frame(h, h0: float, rel_tol: float = REL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Point ``-h0 h/|h|^2`` and orthonormal basis of ``{y : h'y + h0 = 0}``."""
    h = np.asarray(h, dtype=float).reshape(-1)
    hh = float(h @ h)
    if hh <= (rel_tol * max(1.0, abs(h0))) ** 2:
        raise ValueError("hyperplane normal vector is zero")
    return -(h0 / hh) * h, linalg.null_basis(h, rel_tol)


def restrict_to_hyperplane(f: Quadratic, h, h0: float, rel_tol: float = REL_TOL) -> Quadratic:
    y0, V = hyperplane_frame(h, h0, rel_tol)
    return restrict_affine(f, y0, V)
