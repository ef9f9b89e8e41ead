"""Dense symmetric linear algebra used throughout the package.

Every rank decision goes through :func:`spectral_cutoff`, so that range and
null-space membership is judged the same way in every module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

REL_TOL = 1e-10
SYMMETRY_TOL = 1e-12
#: Largest |lambda| explored when a pencil interval is unbounded.
LAMBDA_CAP = 1e8


class NotSymmetricError(ValueError):
    pass


def as_symmetric(A, tol: float = SYMMETRY_TOL) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros((0, 0))
    if A.shape[0] != A.shape[1]:
        raise NotSymmetricError(f"matrix is not square: shape {A.shape}")
    if np.max(np.abs(A - A.T)) > tol * max(1.0, np.max(np.abs(A))):
        raise NotSymmetricError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def inf_norm(A) -> float:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(np.atleast_2d(A)), axis=1)))


def scale_of(*mats) -> float:
    return max([1.0] + [inf_norm(M) for M in mats])


def spectral_cutoff(eigenvalues, rel_tol: float = REL_TOL) -> float:
    """Magnitude below which an eigenvalue counts as zero."""
    ev = np.asarray(eigenvalues, dtype=float)
    top = float(np.max(np.abs(ev))) if ev.size else 0.0
    return rel_tol * max(1.0, top)


@dataclass(frozen=True)
class SpectralDecomp:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rankTol: float

    @property
    def rank(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues) > self.rankTol))

    def range_basis(self) -> np.ndarray:
        return self.eigenvectors[:, np.abs(self.eigenvalues) > self.rankTol]

    def null_basis(self) -> np.ndarray:
        return self.eigenvectors[:, np.abs(self.eigenvalues) <= self.rankTol]

    def inertia(self) -> tuple[int, int, int]:
        """(negatives, zeros, positives) under the spectral cutoff."""
        ev, t = self.eigenvalues, self.rankTol
        return int(np.sum(ev < -t)), int(np.sum(np.abs(ev) <= t)), int(np.sum(ev > t))


def sym_eigen(A, rel_tol: float = REL_TOL) -> SpectralDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    A = as_symmetric(A)
    if A.shape[0] == 0:
        return SpectralDecomp(np.zeros(0), np.zeros((0, 0)), 0.0)
    w, Q = np.linalg.eigh(A)
    return SpectralDecomp(w, Q, spectral_cutoff(w, rel_tol))


def jacobi_eigen(A, tol: float = 1e-14, max_sweeps: int = 60) -> SpectralDecomp:
    """Cyclic Jacobi eigensolver with a fixed (row-major) sweep order.

    Slower than LAPACK but fully deterministic and dependency free; used to
    cross-check :func:`sym_eigen`.
    """
    A = as_symmetric(A).copy()
    n = A.shape[0]
    V = np.eye(n)
    norm = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    w, V = w[order], V[:, order]
    return SpectralDecomp(w, V, spectral_cutoff(w, REL_TOL))


def lambda_min(A) -> float:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return math.inf
    return float(np.linalg.eigvalsh(A)[0])


def pinv(A, rel_tol: float = REL_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric matrix."""
    sd = sym_eigen(A, rel_tol)
    keep = np.abs(sd.eigenvalues) > sd.rankTol
    Q = sd.eigenvectors[:, keep]
    return (Q / sd.eigenvalues[keep]) @ Q.T


def pinv_solve(A, b, rel_tol: float = REL_TOL) -> np.ndarray:
    """``A^+ b`` computed in eigen-coordinates.

    Projecting ``b`` first keeps rounding in the eigenvectors from being
    amplified by small retained eigenvalues, which forming ``A^+`` would do.
    """
    sd = sym_eigen(A, rel_tol)
    keep = np.abs(sd.eigenvalues) > sd.rankTol
    Q = sd.eigenvectors[:, keep]
    return (Q / sd.eigenvalues[keep]) @ (Q.T @ np.asarray(b, dtype=float))


def null_basis(M, rel_tol: float = REL_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of a matrix or row vector."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[None, :]
    n = M.shape[1]
    if M.size == 0:
        return np.eye(n)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    cut = rel_tol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return Vt[rank:].T.copy()


def range_residual(A, v, rel_tol: float = REL_TOL) -> float:
    """Norm of the part of ``v`` lying outside the range of symmetric ``A``."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    Z = sym_eigen(A, rel_tol).null_basis()
    return float(np.linalg.norm(Z.T @ v))


def in_range(A, v, rel_tol: float = REL_TOL) -> bool:
    v = np.asarray(v, dtype=float)
    return range_residual(A, v, rel_tol) <= rel_tol * (1.0 + float(np.linalg.norm(v)))


# ---------------------------------------------------------------------------
# one-dimensional searches

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(fun: Callable[[float], float], lo: float, hi: float,
                       maxiter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal ``fun`` on ``[lo, hi]``; endpoints are candidates too."""
    f_lo, f_hi = fun(lo), fun(hi)
    if hi - lo <= 0.0:
        return lo, f_lo
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(maxiter):
        if b - a <= 4 * np.finfo(float).eps * max(1.0, abs(a), abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    # endpoints win ties so that boundary optima are reported exactly
    for x, fx in ((lo, f_lo), (hi, f_hi)):
        if fx >= best_f - 1e-15 * (1.0 + abs(best_f)) and fx > -math.inf:
            best_x, best_f = x, fx
    return best_x, best_f


def maximize_concave(fun: Callable[[float], float], lo: float = -math.inf,
                     hi: float = math.inf, cap: float = LAMBDA_CAP) -> tuple[float, float, bool]:
    """Maximize an extended-real concave function on a possibly unbounded interval.

    Unbounded sides are explored by geometric expansion until the value stops
    increasing. Returns ``(argmax, max, hit_cap)``.
    """
    if math.isfinite(lo) and math.isfinite(hi):
        x, fx = golden_section_max(fun, lo, hi)
        return x, fx, False

    if math.isfinite(lo):
        anchor = lo
    elif math.isfinite(hi):
        anchor = hi
    else:
        anchor = 0.0
    f_anchor = fun(anchor)
    hit_cap = False

    def expand(direction: float, limit: float) -> tuple[float, float, bool]:
        # returns (inner, outer, improved)
        step = max(1.0, abs(anchor))
        prev, f_prev = anchor, f_anchor
        prevprev = anchor
        improved = False
        while True:
            x = anchor + direction * step
            if direction > 0 and x > limit:
                x = limit
            if direction < 0 and x < limit:
                x = limit
            fx = fun(x)
            if not fx > f_prev:
                return prevprev, x, improved
            improved = True
            if abs(x - anchor) >= cap or x == limit:
                return prev, x, True
            prevprev, prev, f_prev = prev, x, fx
            step *= 2.0

    bracket = None
    left, right = lo, hi
    if not math.isfinite(hi):
        inner, outer, improved = expand(+1.0, hi)
        if improved:
            bracket = (inner, outer)
            hit_cap = abs(outer - anchor) >= cap
        right = outer
    if bracket is None and not math.isfinite(lo):
        inner, outer, improved = expand(-1.0, lo)
        if improved:
            bracket = (outer, inner)
            hit_cap = abs(outer - anchor) >= cap
        left = outer
    if bracket is None:
        left = anchor if not math.isfinite(left) else left
        right = anchor if not math.isfinite(right) else right
        bracket = (left, right)
    left, right = bracket
    x, fx = golden_section_max(fun, min(left, right), max(left, right))
    return x, fx, hit_cap


# ---------------------------------------------------------------------------
# PSD intervals of matrix pencils

@dataclass(frozen=True)
class PsdInterval:
    lo: float
    hi: float
    empty: bool

    def contains(self, lam: float) -> bool:
        return (not self.empty) and self.lo <= lam <= self.hi

    def intersect(self, lo: float, hi: float) -> "PsdInterval":
        if self.empty:
            return self
        a, b = max(self.lo, lo), min(self.hi, hi)
        if a > b:
            return PsdInterval(math.nan, math.nan, True)
        return PsdInterval(a, b, False)

    @property
    def is_point(self) -> bool:
        return (not self.empty) and self.lo == self.hi


EMPTY_INTERVAL = PsdInterval(math.nan, math.nan, True)


def _bisect_boundary(pred: Callable[[float], bool], good: float, bad: float) -> float:
    """Last point on the ``good`` side of a monotone predicate."""
    for _ in range(200):
        if abs(good - bad) <= 2 * np.finfo(float).eps * max(1.0, abs(good)):
            break
        mid = 0.5 * (good + bad)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def psd_interval(A, B, rel_tol: float = REL_TOL) -> PsdInterval:
    """The closed interval ``{lam : A + lam*B is PSD}``.

    When the best attainable minimum eigenvalue is negative but within the
    cutoff band the interval degenerates to the single maximizing point.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.size == 0:
        return PsdInterval(-math.inf, math.inf, False)
    scale = scale_of(A, B)
    band = rel_tol * scale
    # a common null space keeps lambda_min at zero up to rounding for every
    # lam, which would make the sign tests below arbitrary: project it out
    N0 = null_basis(np.vstack([A, B]), rel_tol)
    if N0.shape[1] == A.shape[0]:
        return PsdInterval(-math.inf, math.inf, False)
    if N0.shape[1]:
        W = null_basis(N0.T, rel_tol)
        A, B = W.T @ A @ W, W.T @ B @ W

    def phi(lam: float) -> float:
        return float(np.linalg.eigvalsh(A + lam * B)[0])

    eb = np.linalg.eigvalsh(B)
    ea = np.linalg.eigvalsh(A)
    cut_b = spectral_cutoff(eb, rel_tol)
    bmin, bmax = float(eb[0]), float(eb[-1])
    if max(abs(bmin), abs(bmax)) <= cut_b:
        if ea[0] >= -band:
            return PsdInterval(-math.inf, math.inf, False)
        return EMPTY_INTERVAL

    amax = max(0.0, float(ea[-1]))
    right = amax / (-bmin) if bmin < -cut_b else math.inf
    left = -amax / bmax if bmax > cut_b else -math.inf

    if math.isfinite(left) and math.isfinite(right):
        lam_star, phi_star = golden_section_max(phi, left, right)
    elif math.isinf(right):
        # phi is nondecreasing up to the cutoff band
        lam_star = max(1.0, abs(left))
        phi_star = phi(lam_star)
        while phi_star < 0.0 and lam_star < LAMBDA_CAP:
            lam_star *= 2.0
            phi_star = phi(lam_star)
    else:
        lam_star = -max(1.0, abs(right))
        phi_star = phi(lam_star)
        while phi_star < 0.0 and -lam_star < LAMBDA_CAP:
            lam_star *= 2.0
            phi_star = phi(lam_star)

    if phi_star < -band:
        return EMPTY_INTERVAL
    if phi_star < 0.0:
        return PsdInterval(lam_star, lam_star, False)

    def ok(lam: float) -> bool:
        return phi(lam) >= 0.0

    lo = -math.inf if math.isinf(left) else _bisect_boundary(ok, lam_star, left)
    hi = math.inf if math.isinf(right) else _bisect_boundary(ok, lam_star, right)
    return PsdInterval(lo, hi, False)
