"""Helpers for complex 2x2 matrices.

Matrices are plain ``(2, 2)`` complex numpy arrays throughout the package.
The norm used everywhere is the maximum absolute entry, so tolerances compose
additively under matrix sums.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import GarnierLabError

TWO_PI_I = 2j * np.pi

IDENTITY = np.eye(2, dtype=complex)


class Mat2Error(GarnierLabError):
    pass


def mat2(a11, a12, a21, a22) -> np.ndarray:
    """Build a 2x2 complex matrix from its entries, row major."""
    return np.array([[a11, a12], [a21, a22]], dtype=complex)


def asmat(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (2, 2):
        raise Mat2Error(f"expected a 2x2 matrix, got shape {a.shape}")
    return a


def norm(m) -> float:
    """Maximum absolute entry."""
    return float(np.max(np.abs(np.asarray(m))))


def inv(m) -> np.ndarray:
    m = asmat(m)
    d = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(d) == 0.0:
        raise Mat2Error("matrix is singular")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex) / d


def eigenvalues(m) -> tuple[complex, complex]:
    """Roots of the characteristic polynomial, stable quadratic formula.

    Returns ``(l1, l2)`` with ``l1`` the root ``(tr + s)/2`` for the principal
    square root ``s`` of the discriminant.  No ordering beyond that is implied.
    """
    m = asmat(m)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    s = np.sqrt(complex(tr * tr - 4.0 * det))
    l1 = 0.5 * (tr + s)
    # recover the small root from the product when possible
    if abs(l1) > 0.0:
        l2 = det / l1 if abs(tr * tr - 4.0 * det) > 0 else 0.5 * (tr - s)
    else:
        l2 = 0.5 * (tr - s)
    return complex(l1), complex(l2)


@dataclass(frozen=True)
class EigJordan:
    """Eigen decomposition ``m = transform @ jordan @ inverse(transform)``.

    ``jordan`` is diagonal when ``diagonalizable`` and a single Jordan block
    otherwise.  For defective matrices the off-diagonal entry of ``jordan`` is
    ``2*pi*i`` under the "monodromy" convention and ``1`` under "residue";
    the transform columns absorb the difference.
    """

    eigenvalues: tuple[complex, complex]
    transform: np.ndarray
    jordan: np.ndarray
    diagonalizable: bool


def _kernel_vector(m, lam) -> np.ndarray:
    """A unit kernel vector of ``m - lam*I`` for an exact eigenvalue ``lam``."""
    b = asmat(m) - lam * IDENTITY
    # rank-one matrix: kernel from the larger row
    r0 = np.array([b[0, 1], -b[0, 0]])
    r1 = np.array([b[1, 1], -b[1, 0]])
    v = r0 if norm(r0) >= norm(r1) else r1
    nv = np.linalg.norm(v)
    if nv == 0.0:
        # m is scalar, any vector works
        return np.array([1.0, 0.0], dtype=complex)
    v = v / nv
    # deterministic phase: largest component real positive
    i = int(np.argmax(np.abs(v)))
    v = v * (abs(v[i]) / v[i])
    return v


def eig_jordan(m, tol: float = 1e-9, convention: str = "monodromy") -> EigJordan:
    """Eigenvalues plus a (generalized) eigenvector frame.

    Near-equal eigenvalues (within ``tol * (1 + norm(m))``) are treated as a
    single eigenvalue; the matrix is then either scalar or a Jordan block.
    """
    if convention not in ("monodromy", "residue"):
        raise Mat2Error(f"unknown convention {convention!r}")
    m = asmat(m)
    scale = 1.0 + norm(m)
    l1, l2 = eigenvalues(m)
    if abs(l1 - l2) < tol * scale:
        lam = 0.5 * (l1 + l2)
        b = m - lam * IDENTITY
        if norm(b) <= tol * scale:
            # scalar matrix
            jordan = np.diag([lam, lam]).astype(complex)
            return EigJordan((lam, lam), IDENTITY.copy(), jordan, True)
        beta = TWO_PI_I if convention == "monodromy" else 1.0 + 0.0j
        # image of (m - lam) spans the kernel; pick w with the larger image
        w_candidates = [np.array([1.0, 0.0], dtype=complex),
                        np.array([0.0, 1.0], dtype=complex)]
        imgs = [b @ w for w in w_candidates]
        j = int(np.argmax([norm(g) for g in imgs]))
        w = w_candidates[j]
        img = imgs[j]
        if norm(img) <= tol * tol * scale:
            raise Mat2Error("defective eigenvector extraction failed")
        v = img / beta
        t = np.column_stack([v, w])
        d = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
        if abs(d) < 1e-14 * (norm(t) ** 2 + 1e-300):
            raise Mat2Error("ill-conditioned Jordan decomposition")
        jordan = np.array([[lam, beta], [0.0, lam]], dtype=complex)
        return EigJordan((lam, lam), t, jordan, False)
    v1 = _kernel_vector(m, l1)
    v2 = _kernel_vector(m, l2)
    t = np.column_stack([v1, v2])
    d = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
    if abs(d) < 1e-12:
        raise Mat2Error("ill-conditioned eigenvector matrix")
    jordan = np.diag([l1, l2]).astype(complex)
    return EigJordan((l1, l2), t, jordan, True)


def scalar_class(m, tol: float = 1e-8) -> str:
    """Classify ``m`` as ``'plus'`` (close to +I), ``'minus'`` (close to -I)
    or ``'none'``."""
    m = asmat(m)
    if norm(m - IDENTITY) < tol:
        return "plus"
    if norm(m + IDENTITY) < tol:
        return "minus"
    return "none"


def match_order(values: tuple[complex, complex], target: complex,
                tol: float = np.inf) -> tuple[int, int]:
    """Index permutation putting the value closest to ``target`` first."""
    d0 = abs(values[0] - target)
    d1 = abs(values[1] - target)
    perm = (0, 1) if d0 <= d1 else (1, 0)
    if min(d0, d1) > tol:
        raise Mat2Error(
            f"no eigenvalue near {target}: got {values[0]:.6g}, {values[1]:.6g}")
    return perm


def diagonalizer(m, first_eigenvalue: complex, tol: float = 1e-8) -> np.ndarray:
    """Invertible ``g`` with ``inv(g) @ m @ g`` diagonal and the eigenvalue
    nearest ``first_eigenvalue`` in the (1,1) slot.

    Raises for defective input.  Columns are unit vectors with a
    deterministic phase, so repeated calls agree exactly.
    """
    ej = eig_jordan(m, convention="residue")
    if not ej.diagonalizable:
        raise Mat2Error("matrix is not diagonalizable")
    perm = match_order(ej.eigenvalues, first_eigenvalue)
    g = ej.transform[:, list(perm)]
    if abs(np.linalg.det(g)) < 1e-12:
        raise Mat2Error("ill-conditioned eigenvector matrix")
    return g
