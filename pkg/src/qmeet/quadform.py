"""Quadratic functions ``f(x) = x'Ax + 2a'x + a0`` and their sign behaviour."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .linalg import REL_TOL


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Quadratic:
    """``x'Ax + 2a'x + a0`` with ``A`` symmetric.

    The linear coefficient is stored with the factor-2 convention; use
    :meth:`from_plain` for functions written as ``x'Ax + c'x + a0``.
    """

    matA: np.ndarray
    vecA: np.ndarray
    scalarA: float

    def __post_init__(self):
        A = linalg.as_symmetric(self.matA) if np.size(self.matA) else np.zeros((0, 0))
        a = np.asarray(self.vecA, dtype=float).reshape(-1)
        if A.shape[0] != a.shape[0]:
            raise DimensionError(f"matrix is {A.shape[0]}x{A.shape[0]} but vector has length {a.shape[0]}")
        A.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "matA", A)
        object.__setattr__(self, "vecA", a)
        object.__setattr__(self, "scalarA", float(self.scalarA))

    @classmethod
    def from_plain(cls, A, c, a0) -> "Quadratic":
        return cls(A, 0.5 * np.asarray(c, dtype=float), a0)

    @classmethod
    def affine(cls, c, c0) -> "Quadratic":
        """The affine function ``c'x + c0``."""
        c = np.asarray(c, dtype=float).reshape(-1)
        return cls(np.zeros((c.size, c.size)), 0.5 * c, c0)

    @property
    def dim(self) -> int:
        return int(self.vecA.shape[0])

    @property
    def scale(self) -> float:
        """Largest absolute coefficient, floored at one."""
        return max(1.0, float(np.max(np.abs(self.matA), initial=0.0)),
                   float(np.max(np.abs(self.vecA), initial=0.0)), abs(self.scalarA))

    def __call__(self, x) -> float:
        return eval_quadratic(self, x)

    def __neg__(self) -> "Quadratic":
        return Quadratic(-self.matA, -self.vecA, -self.scalarA)

    def __mul__(self, c: float) -> "Quadratic":
        return Quadratic(c * self.matA, c * self.vecA, c * self.scalarA)

    __rmul__ = __mul__

    def __add__(self, other: "Quadratic") -> "Quadratic":
        _check_same_dim(self, other)
        return Quadratic(self.matA + other.matA, self.vecA + other.vecA, self.scalarA + other.scalarA)

    def __sub__(self, other: "Quadratic") -> "Quadratic":
        return self + (-other)

    def compose_affine(self, P, q) -> "Quadratic":
        """The function ``z -> f(Pz + q)``."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        q = np.asarray(q, dtype=float).reshape(-1)
        if P.shape[0] != self.dim or q.size != self.dim:
            raise DimensionError("affine map does not match the quadratic's dimension")
        A, a = self.matA, self.vecA
        return Quadratic(P.T @ A @ P, P.T @ (A @ q + a), self(q))

    def gradient(self, x) -> np.ndarray:
        return 2.0 * (self.matA @ x + self.vecA)

    def is_affine(self, rel_tol: float = REL_TOL) -> bool:
        return float(np.max(np.abs(self.matA), initial=0.0)) <= rel_tol * self.scale

    def to_dict(self) -> dict:
        return {"A": self.matA.tolist(), "a": self.vecA.tolist(), "a0": self.scalarA}


def _check_same_dim(*qs: Quadratic) -> None:
    if len({q.dim for q in qs}) > 1:
        raise DimensionError(f"dimension mismatch: {[q.dim for q in qs]}")


def eval_quadratic(q: Quadratic, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != q.dim:
        raise DimensionError(f"point has length {x.size}, quadratic has dimension {q.dim}")
    return float(x @ q.matA @ x + 2.0 * q.vecA @ x + q.scalarA)


def eval_many(q: Quadratic, X) -> np.ndarray:
    """Vectorised evaluation on the rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.einsum("ij,jk,ik->i", X, q.matA, X) + 2.0 * X @ q.vecA + q.scalarA


def joint_value(f1: Quadratic, f2: Quadratic, x) -> tuple[float, float]:
    _check_same_dim(f1, f2)
    return eval_quadratic(f1, x), eval_quadratic(f2, x)


# ---------------------------------------------------------------------------
# sign classification

class SignTag(str, enum.Enum):
    TWO_SIDED = "TWO_SIDED"
    NONNEG = "NONNEG"
    NONPOS = "NONPOS"
    ZERO = "ZERO"

    def mirrored(self) -> "SignTag":
        return {SignTag.NONNEG: SignTag.NONPOS, SignTag.NONPOS: SignTag.NONNEG}.get(self, self)


@dataclass(frozen=True)
class SignProfile:
    tag: SignTag
    witnessNeg: Optional[np.ndarray] = None
    witnessPos: Optional[np.ndarray] = None
    globalMin: Optional[float] = None
    minAttained: bool = False


def critical_value(q: Quadratic, rel_tol: float = REL_TOL) -> tuple[Optional[float], Optional[np.ndarray]]:
    """``a0 - a'A^+a`` and the point ``-A^+a`` when ``a`` lies in the range of ``A``."""
    if q.dim == 0:
        return q.scalarA, np.zeros(0)
    if not linalg.in_range(q.matA, q.vecA, rel_tol):
        return None, None
    x0 = -linalg.pinv_solve(q.matA, q.vecA, rel_tol)
    return float(q.scalarA + q.vecA @ x0), x0


def is_nonneg(q: Quadratic, rel_tol: float = REL_TOL, tol: Optional[float] = None) -> bool:
    """``f >= 0`` everywhere: ``A`` PSD, ``a`` in range, ``a0 - a'A^+a >= 0``."""
    tol = rel_tol * q.scale if tol is None else tol
    if q.dim:
        sd = linalg.sym_eigen(q.matA, rel_tol)
        if sd.eigenvalues[0] < -sd.rankTol:
            return False
    cv, _ = critical_value(q, rel_tol)
    return cv is not None and cv >= -tol


def _push_until(q: Quadratic, base: np.ndarray, direction: np.ndarray) -> Optional[np.ndarray]:
    # f(base + t*direction) should decrease without bound; double t until negative.
    # Directions that are only flat to tolerance may turn back up: give up then.
    t = 1.0
    prev = q(base)
    for _ in range(200):
        x = base + t * direction
        val = q(x)
        if val < 0.0:
            return x
        if not np.isfinite(val) or val >= prev:
            return None
        prev = val
        t *= 2.0
    return None


def negative_point(q: Quadratic, rel_tol: float = REL_TOL) -> Optional[np.ndarray]:
    """A point with ``f < 0``, or None when ``f`` is nonnegative (to tolerance)."""
    if q.dim == 0:
        return np.zeros(0) if q.scalarA < -rel_tol * q.scale else None
    sd = linalg.sym_eigen(q.matA, rel_tol)
    if sd.eigenvalues[0] < -sd.rankTol:
        v = sd.eigenvectors[:, 0]
        # orient v downhill so the values decrease monotonically along it
        return _push_until(q, np.zeros(q.dim), -v if q.vecA @ v > 0.0 else v)
    Z = sd.null_basis()
    slope = Z @ (Z.T @ q.vecA)
    if np.linalg.norm(slope) > rel_tol * (1.0 + np.linalg.norm(q.vecA)):
        x = _push_until(q, np.zeros(q.dim), -slope)
        if x is not None:
            return x
    x0 = -linalg.pinv_solve(q.matA, q.vecA, rel_tol)
    if q(x0) < -rel_tol * q.scale:
        return x0
    return None


def sign_profile(q: Quadratic, rel_tol: float = REL_TOL) -> SignProfile:
    neg = negative_point(q, rel_tol)
    pos = negative_point(-q, rel_tol)
    if neg is not None and pos is not None:
        return SignProfile(SignTag.TWO_SIDED, neg, pos)
    if neg is None and pos is None:
        return SignProfile(SignTag.ZERO, None, None, 0.0, True)
    if neg is None:
        cv, _ = critical_value(q, rel_tol)
        return SignProfile(SignTag.NONNEG, None, pos, cv, cv is not None)
    return SignProfile(SignTag.NONPOS, neg, None)


def _bisect_root(q: Quadratic, neg: np.ndarray, pos: np.ndarray) -> np.ndarray:
    lo, hi = neg, pos
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = q(mid)
        if val == 0.0 or np.array_equal(mid, lo) or np.array_equal(mid, hi):
            return mid
        if val < 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(q(lo)) <= abs(q(hi)) else hi


def attains_zero(q: Quadratic, rel_tol: float = REL_TOL,
                 tol: Optional[float] = None) -> tuple[bool, Optional[np.ndarray]]:
    """Decide whether ``0`` lies in ``q(R^m)``, with a witness when it does.

    The range of a quadratic is an interval: two-sided functions hit zero on
    any segment joining a negative and a positive point, one-sided ones only
    at their extremum.
    """
    tol = rel_tol * q.scale if tol is None else tol
    if q.dim == 0:
        return (abs(q.scalarA) <= tol), (np.zeros(0) if abs(q.scalarA) <= tol else None)
    neg = negative_point(q, rel_tol)
    pos = negative_point(-q, rel_tol)
    if neg is not None and pos is not None:
        return True, _bisect_root(q, neg, pos)
    if neg is None and pos is None:
        return True, np.zeros(q.dim)
    side = q if neg is None else -q
    cv, x0 = critical_value(side, rel_tol)
    if cv is not None and abs(cv) <= tol:
        return True, x0
    return False, None


def drop_below(q: Quadratic, tol: float) -> Quadratic:
    """``q`` with curvatures and flat-direction slopes of size ``<= tol`` set to zero.

    Used on restrictions built from a numerically computed null space, whose
    small tilt shows up as spurious coefficients of about that size.
    """
    if q.dim == 0:
        return q
    ev, Q = np.linalg.eigh(q.matA)
    ev = np.where(np.abs(ev) <= tol, 0.0, ev)
    b = Q.T @ q.vecA
    b = np.where((ev == 0.0) & (np.abs(b) <= tol), 0.0, b)
    return Quadratic((Q * ev) @ Q.T, Q @ b, q.scalarA)


def attains_nonpositive(q: Quadratic, rel_tol: float = REL_TOL,
                        tol: Optional[float] = None) -> tuple[bool, Optional[np.ndarray]]:
    """Whether ``q(w) <= 0`` for some ``w`` (up to ``tol``), with a witness."""
    tol = rel_tol * q.scale if tol is None else tol
    if q.dim == 0:
        return (q.scalarA <= tol), (np.zeros(0) if q.scalarA <= tol else None)
    neg = negative_point(q, rel_tol)
    if neg is not None:
        return True, neg
    cv, x0 = critical_value(q, rel_tol)
    if cv is not None and cv <= tol:
        return True, x0
    return False, None
