"""Brute-force reference for ``inf f1(x)^2 + f2(x)^2``.

Grid and uniform sampling followed by a coordinate-descent polish, plus a
Levenberg-Marquardt descent onto the intersection. Used for cross-checks and
best-effort witness search; nothing here is trusted without validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .quadform import Quadratic, _check_same_dim, eval_many

GRID_POINTS = 4096
CHUNK = 65536


@dataclass(frozen=True)
class OracleReport:
    bestValue: float
    bestPoint: np.ndarray
    samples: int
    box: tuple[float, float]
    descentConverged: bool
    onBoundary: bool = False  # the first box's best point touched its boundary
    sampledValue: float = np.inf  # raw sampling minimum before polishing

    def to_dict(self) -> dict:
        return {
            "bestValue": self.bestValue,
            "bestPoint": self.bestPoint.tolist(),
            "samples": self.samples,
            "box": list(self.box),
            "descentConverged": self.descentConverged,
            "onBoundary": self.onBoundary,
        }


def quartic(f1: Quadratic, f2: Quadratic, X) -> np.ndarray:
    return eval_many(f1, X) ** 2 + eval_many(f2, X) ** 2


def _grid(n: int, lo: float, hi: float) -> np.ndarray:
    side = max(2, int(round(GRID_POINTS ** (1.0 / n))))
    while side ** n > GRID_POINTS and side > 2:
        side -= 1
    axis = np.linspace(lo, hi, side)
    return np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)


def _record_points(f1: Quadratic, f2: Quadratic, n: int, lo: float, hi: float,
                   nSamples: int, rng: np.random.Generator) -> tuple[list, float]:
    """Points where the running minimum improves, over grid then uniform stream.

    Record points of a prefix of the stream are a prefix of the records of
    any longer stream, which keeps the polished minimum monotone in ``nSamples``.
    """
    G = _grid(n, lo, hi)
    vals = quartic(f1, f2, G)
    i = int(np.argmin(vals))
    records = [G[i]]
    running = float(vals[i])
    done = 0
    while done < nSamples:
        m = min(CHUNK, nSamples - done)
        X = rng.uniform(lo, hi, size=(m, n))
        v = quartic(f1, f2, X)
        acc = np.minimum.accumulate(v)
        prev = np.concatenate([[running], acc[:-1]])
        for j in np.nonzero(acc < np.minimum(prev, running))[0]:
            records.append(X[j])
        running = min(running, float(acc[-1]))
        done += m
    return records, running


def coordinate_polish(f1: Quadratic, f2: Quadratic, x: np.ndarray, lo: float, hi: float,
                      steps: int = 500) -> tuple[np.ndarray, float, bool]:
    """Compass search with a shrinking step, clipped to the box."""
    x = np.array(x, dtype=float)
    n = x.size
    best = float(quartic(f1, f2, x)[0])
    h = 0.05 * (hi - lo)
    moves = np.vstack([np.eye(n), -np.eye(n)])
    for _ in range(steps):
        cand = np.clip(x + h * moves, lo, hi)
        vals = quartic(f1, f2, cand)
        j = int(np.argmin(vals))
        if vals[j] < best:
            x, best = cand[j], float(vals[j])
        else:
            h *= 0.5
            if h < 1e-15 * (hi - lo):
                return x, best, True
    return x, best, False


def _sample_box(f1, f2, n, lo, hi, nSamples, seed):
    rng = np.random.default_rng(seed)
    records, raw = _record_points(f1, f2, n, lo, hi, nSamples, rng)
    best_x, best_v, conv = records[-1], float(quartic(f1, f2, records[-1])[0]), False
    for x in records:
        px, pv, pc = coordinate_polish(f1, f2, x, lo, hi)
        if pv < best_v or (pv == best_v and pc and not conv):
            best_x, best_v, conv = px, pv, pc
    return best_x, best_v, conv, raw


def sample_min(f1: Quadratic, f2: Quadratic, box: Optional[tuple[float, float]] = None,
               nSamples: int = 100_000, seed: int = 0, expand: bool = True) -> OracleReport:
    """Sampled minimum of ``f1^2 + f2^2`` over the cube ``box^n``.

    When the best point lands on the boundary of the box the search is
    repeated once on a box four times wider (disable with ``expand=False``).
    """
    _check_same_dim(f1, f2)
    n = f1.dim
    lo, hi = (-10.0, 10.0) if box is None else (float(box[0]), float(box[1]))
    if not lo < hi:
        raise ValueError("empty sampling box")
    if n == 0:
        v = f1.scalarA ** 2 + f2.scalarA ** 2
        return OracleReport(v, np.zeros(0), 1, (lo, hi), True, False, v)

    def on_edge(x, a, b):
        return bool(np.any(np.minimum(x - a, b - x) <= 1e-3 * (b - a)))

    x, v, conv, raw = _sample_box(f1, f2, n, lo, hi, nSamples, seed)
    total = nSamples + GRID_POINTS
    edge = on_edge(x, lo, hi)
    if edge and expand:
        mid, half = 0.5 * (lo + hi), 2.0 * (hi - lo)
        lo2, hi2 = mid - half, mid + half
        x2, v2, conv2, raw2 = _sample_box(f1, f2, n, lo2, hi2, nSamples, seed + 1)
        total *= 2
        raw = min(raw, raw2)
        if v2 < v:
            x, v, conv = x2, v2, conv2
        lo, hi = lo2, hi2
    value = float(quartic(f1, f2, x)[0])
    return OracleReport(value, x, total, (lo, hi), conv, edge, raw)


def descend_to_intersection(f1: Quadratic, f2: Quadratic, start, max_iter: int = 200,
                            threshold: Optional[float] = None,
                            norm_bound: Optional[float] = None) -> Optional[np.ndarray]:
    """Levenberg-Marquardt on ``(f1, f2) = 0`` from ``start``.

    Returns the point once ``f1^2 + f2^2`` drops below ``threshold``
    (default ``1e-14*scale``). Iterates leaving the ball of radius
    ``norm_bound`` are abandoned, so surfaces that only meet at infinity
    yield None.
    """
    _check_same_dim(f1, f2)
    x = np.array(start, dtype=float).reshape(-1)
    scale = max(f1.scale, f2.scale)
    threshold = 1e-14 * scale if threshold is None else threshold
    bound = 100.0 * max(1.0, float(np.linalg.norm(x))) if norm_bound is None else norm_bound

    def resid(p):
        return np.array([f1(p), f2(p)])

    r = resid(x)
    cost = float(r @ r)
    mu = 1e-3
    for _ in range(max_iter):
        if cost <= threshold:
            return x
        J = np.vstack([f1.gradient(x), f2.gradient(x)])
        JJ = J @ J.T
        accepted = False
        for _ in range(30):
            try:
                step = -J.T @ np.linalg.solve(JJ + mu * max(1.0, np.trace(JJ)) * np.eye(2), r)
            except np.linalg.LinAlgError:
                mu *= 10.0
                continue
            cand = x + step
            rc = resid(cand)
            cc = float(rc @ rc)
            if cc < cost:
                x, r, cost = cand, rc, cc
                mu = max(mu / 10.0, 1e-15)
                accepted = True
                break
            mu *= 10.0
        if not accepted or np.linalg.norm(x) > bound:
            break
    return x if cost <= threshold and np.linalg.norm(x) <= bound else None


def descend_from_many(f1: Quadratic, f2: Quadratic, starts: Sequence, **kw) -> Optional[np.ndarray]:
    for s in starts:
        w = descend_to_intersection(f1, f2, s, **kw)
        if w is not None:
            return w
    return None
