"""Named problem instances and random generators shared by the tests."""
import numpy as np

from qmeet.quadform import Quadratic


def plain(A, c, a0) -> Quadratic:
    return Quadratic.from_plain(np.array(A, dtype=float), np.array(c, dtype=float), a0)


# f1 = x^2, f2 = xy - 1
DOUBLE_LINE_HYPERBOLA = (plain([[1, 0], [0, 0]], [0, 0], 0), plain([[0, 0.5], [0.5, 0]], [0, 0], -1))
# f1 = x1, f2 = -x1^2 + x2^2 + 1
LINE_BETWEEN_BRANCHES = (plain([[0, 0], [0, 0]], [1, 0], 0), plain([[-1, 0], [0, 1]], [0, 0], 1))
# f1 = x1, f2 = x1 x2 - 1
ASYMPTOTE_HYPERBOLA = (plain([[0, 0], [0, 0]], [1, 0], 0), plain([[0, 0.5], [0.5, 0]], [0, 0], -1))
# f1 = x1^2 + x1 x2 - 1, f2 = x1 x2 - 1
ASYMPTOTIC_PAIR = (plain([[1, 0.5], [0.5, 0]], [0, 0], -1), plain([[0, 0.5], [0.5, 0]], [0, 0], -1))
# concentric circles of radius 1 and 2
CIRCLES = (plain(np.eye(2), [0, 0], -1), plain(np.eye(2), [0, 0], -4))
# f1 = x1, f2 = x2
CROSSING_LINES = (plain(np.zeros((2, 2)), [1, 0], 0), plain(np.zeros((2, 2)), [0, 1], 0))


def random_quadratic(rng, n: int, kind: str = "general") -> Quadratic:
    A = rng.uniform(-3, 3, (n, n))
    A = 0.5 * (A + A.T)
    a, a0 = rng.uniform(-3, 3, n), rng.uniform(-3, 3)
    if kind == "affine":
        A = np.zeros((n, n))
    elif kind == "psd":
        B = rng.uniform(-3, 3, (n, n))
        A = B @ B.T / 3
    elif kind == "rank1":
        v = rng.uniform(-3, 3, n)
        A = np.outer(v, v) / 3
    return Quadratic(A, a, a0)


KINDS = ("affine", "psd", "rank1", "general", "general")


def random_pair(rng, max_dim: int = 4):
    """A random pair mixing affine, semidefinite, rank-one, general and dependent Hessians."""
    n = int(rng.integers(1, max_dim + 1))
    f1 = random_quadratic(rng, n, KINDS[rng.integers(len(KINDS))])
    f2 = random_quadratic(rng, n, KINDS[rng.integers(len(KINDS))])
    if rng.random() < 0.2:
        f2 = Quadratic(rng.uniform(-2, 2) * f1.matA, f2.vecA, f2.scalarA)
    return f1, f2


def random_affine_map(rng, n: int):
    """Well-conditioned invertible ``x = Pz + q``."""
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    P = Q * rng.uniform(0.5, 2.0, n)
    return P, rng.uniform(-2, 2, n)
