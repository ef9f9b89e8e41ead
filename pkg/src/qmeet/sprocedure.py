"""The two-constraint S-procedure for ``v = inf f1(x)^2 + f2(x)^2``.

With linearly independent Hessians the joint range ``{(f1(x), f2(x))}`` is
convex, and ``v`` is the largest ``gamma`` for which

    M(gamma, alpha, beta) =
        [ I_2          0                   -(alpha, beta)'/2       ]
        [ 0            alpha*A1 + beta*A2   alpha*a + beta*b        ]
        [ -(alpha,beta)/2  (alpha*a+beta*b)'  alpha*a0 + beta*b0 - gamma ]

is positive semidefinite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import linalg
from .duals import _common_null_restriction, dual_value
from .linalg import REL_TOL
from .quadform import Quadratic, _check_same_dim, eval_many
from .separation import is_scalar_multiple


class DependentHessiansError(ValueError):
    pass


@dataclass(frozen=True)
class LmiPoint:
    gamma: float
    alpha: float
    beta: float
    M: np.ndarray
    minEig: float

    def feasible(self, tol: float = 1e-8) -> bool:
        return self.minEig >= -tol * max(1.0, linalg.inf_norm(self.M))


@dataclass(frozen=True)
class Po4Certificate:
    value: float
    gamma: float
    alpha: float
    beta: float
    clamped: bool = False


def assemble_M(f1: Quadratic, f2: Quadratic, gamma: float, alpha: float, beta: float) -> LmiPoint:
    _check_same_dim(f1, f2)
    n = f1.dim
    M = np.zeros((n + 3, n + 3))
    M[0, 0] = M[1, 1] = 1.0
    M[0, -1] = M[-1, 0] = -alpha / 2.0
    M[1, -1] = M[-1, 1] = -beta / 2.0
    M[2:-1, 2:-1] = alpha * f1.matA + beta * f2.matA
    w = alpha * f1.vecA + beta * f2.vecA
    M[2:-1, -1] = w
    M[-1, 2:-1] = w
    M[-1, -1] = alpha * f1.scalarA + beta * f2.scalarA - gamma
    return LmiPoint(gamma, alpha, beta, M, linalg.lambda_min(M))


def gamma_max(f1: Quadratic, f2: Quadratic, alpha: float, beta: float,
              rel_tol: float = REL_TOL) -> float:
    """Largest ``gamma`` keeping ``M`` PSD at fixed multipliers (Schur complement)."""
    L = alpha * f1 + beta * f2
    inner = dual_value(L, 0.0 * L, 0.0, rel_tol)
    return inner - (alpha * alpha + beta * beta) / 4.0


# Every nonzero (alpha, beta) direction meets one of these four unit lines
# at a parameter in [-1, 1].
_LINES = (
    (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
    (np.array([-1.0, 0.0]), np.array([0.0, 1.0])),
    (np.array([0.0, 1.0]), np.array([1.0, 0.0])),
    (np.array([0.0, -1.0]), np.array([1.0, 0.0])),
)


def _segment_best(f1: Quadratic, f2: Quadratic, base: np.ndarray, step: np.ndarray,
                  rel_tol: float) -> tuple[float, np.ndarray]:
    """Best ``inf(p1 f1 + p2 f2) / |p|`` over ``p = base + t*step``, ``|t| <= 1``."""
    F = base[0] * f1 + base[1] * f2
    G = step[0] * f1 + step[1] * f2
    interval = linalg.psd_interval(F.matA, G.matA, rel_tol).intersect(-1.0, 1.0)
    if interval.empty:
        return -math.inf, base
    fixed = _common_null_restriction(F, G, rel_tol)
    if fixed is not None:
        if math.isnan(fixed) or not (-1.0 <= fixed <= 1.0):
            return -math.inf, base
        lo = hi = fixed
    else:
        lo, hi = interval.lo, interval.hi

    def h(t: float) -> float:
        return dual_value(F, G, t, rel_tol)

    def norm(t: float) -> float:
        return float(np.hypot(1.0, t))

    t, ht = linalg.golden_section_max(h, lo, hi)
    if not ht > 0.0:
        return ht / norm(t) if math.isfinite(ht) else -math.inf, base + t * step
    # Dinkelbach iterations on the ratio h/|p|
    ratio = ht / norm(t)
    for _ in range(60):
        t_new, _ = linalg.golden_section_max(lambda s: h(s) - ratio * norm(s), lo, hi)
        r_new = h(t_new) / norm(t_new)
        if r_new <= ratio * (1.0 + 1e-15):
            break
        t, ratio = t_new, r_new
    return ratio, base + t * step


def po4_value_indep(f1: Quadratic, f2: Quadratic, rel_tol: float = REL_TOL,
                    slack: float = 1e-12) -> Po4Certificate:
    """``inf f1^2 + f2^2`` for linearly independent Hessians, with an LMI certificate.

    ``sup_gamma`` over the LMI equals ``max(0, c)^2`` where ``c`` is the best
    value of ``inf_x(u1 f1 + u2 f2)`` over unit directions ``u``; the search
    runs along four lines covering all directions.
    """
    _check_same_dim(f1, f2)
    if (is_scalar_multiple(f2.matA, f1.matA, rel_tol) is not None
            or is_scalar_multiple(f1.matA, f2.matA, rel_tol) is not None):
        raise DependentHessiansError("Hessians are linearly dependent")
    best, best_p = -math.inf, np.array([1.0, 0.0])
    for base, step in _LINES:
        c, p = _segment_best(f1, f2, base, step, rel_tol)
        if c > best:
            best, best_p = c, p
    if best <= 0.0:
        # no direction gives a positive lower bound: only gamma = 0 is certified
        return Po4Certificate(0.0, 0.0, 0.0, 0.0)
    u = best_p / np.linalg.norm(best_p)
    alpha, beta = 2.0 * best * u
    gamma = gamma_max(f1, f2, alpha, beta, rel_tol) - slack * max(1.0, best * best)
    clamped = bool(gamma < 0.0)
    return Po4Certificate(float(best * best), float(max(0.0, gamma)), float(alpha), float(beta), clamped)


def check_g1_sampled(f1: Quadratic, f2: Quadratic, gamma: float,
                     sampler: Union[np.ndarray, Callable[[], np.ndarray]], tol: float = 1e-12) -> bool:
    """Sampled falsification of ``f1(x)^2 + f2(x)^2 >= gamma``.

    ``sampler`` is an ``(N, n)`` array of points or a callable producing one.
    Returns False as soon as a sample violates the bound.
    """
    X = sampler() if callable(sampler) else np.asarray(sampler, dtype=float)
    vals = eval_many(f1, X) ** 2 + eval_many(f2, X) ** 2
    return bool(np.all(vals >= gamma - tol))
