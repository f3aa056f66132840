"""Euclidean reduction of the triangular Wasserstein distance.

The squared distance between two triangular fuzzy numbers is a quadratic
form ``z.T @ Q @ z`` in the difference ``z = (dc, dl, dr)`` of their
(center, left spread, right spread) triples.  ``Q`` is symmetric positive
definite, so it has a symmetric square root ``T`` with ``T.T @ T == Q``;
mapping every triple through ``T`` turns the fuzzy distance into the
plain Euclidean distance between crisp 3p-vectors.  Any crisp clustering
method can then run on the transformed data, and its prototypes map back
through the inverse of ``T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fuzzy import FuzzyVector

__all__ = [
    "DISTANCE_FORM",
    "ANALYTIC_EIGENVALUES",
    "QuadraticForm3",
    "build_transform",
    "transform_vector",
    "inverse_transform_vector",
    "transform_array",
    "inverse_transform_array",
]

DISTANCE_FORM = np.array([
    [1.0, -0.25, 0.25],
    [-0.25, 1.0 / 9.0, -1.0 / 18.0],
    [0.25, -1.0 / 18.0, 1.0 / 9.0],
])
DISTANCE_FORM.setflags(write=False)

# Exact spectrum of the distance form, descending.
ANALYTIC_EIGENVALUES = np.array([
    (7.0 + math.sqrt(43.0)) / 12.0,
    1.0 / 18.0,
    (7.0 - math.sqrt(43.0)) / 12.0,
])
ANALYTIC_EIGENVALUES.setflags(write=False)

_VALIDATION_TOL = 1e-12


@dataclass(frozen=True)
class QuadraticForm3:
    """The distance form with its spectrum, square root and inverse root.

    Construction validates everything against the known analytic values;
    a failure means the eigen-solve went wrong, which cannot happen for
    this fixed, well-conditioned 3x3 matrix.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray  # descending
    root: np.ndarray         # symmetric square root T
    inverse_root: np.ndarray

    def __post_init__(self) -> None:
        for name in ("matrix", "eigenvalues", "root", "inverse_root"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.matrix.shape != (3, 3) or not np.array_equal(self.matrix, DISTANCE_FORM):
            raise ValueError("matrix must be the fixed triangular distance form")
        if self.eigenvalues.shape != (3,):
            raise ValueError("expected exactly three eigenvalues")
        if np.max(np.abs(self.eigenvalues - ANALYTIC_EIGENVALUES)) > _VALIDATION_TOL:
            raise ArithmeticError("eigenvalues disagree with the analytic spectrum")
        if self.eigenvalues[-1] <= 0.0:
            raise ArithmeticError("distance form must be positive definite")
        if np.max(np.abs(self.root.T @ self.root - self.matrix)) > _VALIDATION_TOL:
            raise ArithmeticError("square root does not reproduce the form")
        if np.max(np.abs(self.inverse_root @ self.root - np.eye(3))) > _VALIDATION_TOL:
            raise ArithmeticError("inverse square root is not an inverse")


def build_transform() -> QuadraticForm3:
    """Eigen-factor the distance form and assemble ``T`` and its inverse.

    Deterministic and input-free.  Eigenvector signs are irrelevant since
    only the symmetric products are exposed.
    """
    spectrum, basis = np.linalg.eigh(DISTANCE_FORM)  # ascending
    scale = np.sqrt(spectrum)
    return QuadraticForm3(
        matrix=DISTANCE_FORM,
        eigenvalues=spectrum[::-1],
        root=(basis * scale) @ basis.T,
        inverse_root=(basis / scale) @ basis.T,
    )


def transform_array(values, form: QuadraticForm3) -> np.ndarray:
    """Apply ``T`` to every (c, l, r) block along the trailing axis."""
    arr = np.asarray(values, dtype=float)
    if arr.shape[-1] == 0 or arr.shape[-1] % 3 != 0:
        raise ValueError(
            f"trailing dimension must be a positive multiple of 3, got {arr.shape[-1]}")
    blocks = arr.reshape(*arr.shape[:-1], -1, 3)
    return (blocks @ form.root.T).reshape(arr.shape)


def inverse_transform_array(values, form: QuadraticForm3) -> np.ndarray:
    """Apply the inverse of ``T`` to every block along the trailing axis."""
    arr = np.asarray(values, dtype=float)
    if arr.shape[-1] == 0 or arr.shape[-1] % 3 != 0:
        raise ValueError(
            f"trailing dimension must be a positive multiple of 3, got {arr.shape[-1]}")
    blocks = arr.reshape(*arr.shape[:-1], -1, 3)
    return (blocks @ form.inverse_root.T).reshape(arr.shape)


def transform_vector(x: FuzzyVector, form: QuadraticForm3) -> np.ndarray:
    """Crisp 3p-vector whose Euclidean geometry matches the fuzzy distance."""
    return transform_array(x.to_array(), form)


def inverse_transform_vector(values, form: QuadraticForm3) -> FuzzyVector:
    """Map a transformed 3p-vector back to a fuzzy vector.

    A round trip through ``T`` can leave spreads a few ulp below zero;
    such sub-roundoff negatives are snapped to exact zero before domain
    validation.  Anything materially negative still raises, because the
    crisp vector then does not correspond to a fuzzy vector at all.
    """
    flat = np.asarray(values, dtype=float).ravel()
    if flat.size == 0 or flat.size % 3 != 0:
        raise ValueError(
            f"flat length must be a positive multiple of 3, got {flat.size}")
    blocks = flat.reshape(-1, 3) @ form.inverse_root.T
    spreads = blocks[:, 1:]
    noise = -1e-12 * max(1.0, float(np.max(np.abs(blocks))))
    spreads[(spreads < 0.0) & (spreads >= noise)] = 0.0
    return FuzzyVector.from_array(blocks)
