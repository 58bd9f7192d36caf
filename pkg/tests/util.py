"""Shared helpers for the test suite."""

import numpy as np

from oucausal import OuModel


def demo_triangular(A=(1.0, 2.0, 3.0), diag=(-1.0, -2.0, -1.5),
                    upper=(0.5, 0.3, 0.7), x0=(0.0, 0.0, 0.0)) -> OuModel:
    """3-dimensional model with upper-triangular B, negative diagonal, sigma = I."""
    b12, b13, b23 = upper
    b = [[diag[0], b12, b13], [0.0, diag[1], b23], [0.0, 0.0, diag[2]]]
    return OuModel(p=3, d=3, x0=list(x0), A=list(A), B=b, sigma=np.eye(3))


def gershgorin_stable(rng: np.random.Generator, p: int, scale: float = 1.0) -> np.ndarray:
    """Random matrix shifted so every Gershgorin disc lies in Re z <= -1."""
    r = rng.uniform(-scale, scale, (p, p))
    return r - (1.0 + np.max(np.sum(np.abs(r), axis=1))) * np.eye(p)


def diag_dominant(rng: np.random.Generator, p: int, scale: float = 2.0) -> np.ndarray:
    """Random matrix made strictly row diagonally dominant with negative diagonal.

    Every principal submatrix inherits the dominance, hence is invertible.
    """
    b = rng.uniform(-scale, scale, (p, p))
    b[np.arange(p), np.arange(p)] -= 0.5 + np.sum(np.abs(b), axis=1)
    return b


def random_triangular(rng: np.random.Generator, coincident: bool = False) -> np.ndarray:
    """Random upper-triangular 3x3 with diagonal in [-3, -0.1]."""
    diag = rng.uniform(-3.0, -0.1, 3)
    if coincident:
        diag[:] = diag[0]
    b = np.zeros((3, 3))
    b[np.triu_indices(3, 1)] = rng.uniform(-2.0, 2.0, 3)
    b[np.arange(3), np.arange(3)] = diag
    return b
