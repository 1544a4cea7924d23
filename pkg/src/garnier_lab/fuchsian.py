"""Rank-2 Fuchsian systems with a normalized residue at infinity.

A system is the data of ``n + 2`` finite poles ``u_k``, residue matrices
``A_k`` with eigenvalues ``+theta_k/2`` and ``-theta_k/2``, and exponent
``theta_inf`` at infinity.  The residue at infinity, ``-sum(A_k)``, is
required to equal ``diag(theta_inf/2, -theta_inf/2)`` when ``theta_inf != 0``
and ``[[0, 1], [0, 0]]`` when ``theta_inf == 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import GarnierLabError
from .mat2 import asmat, eigenvalues, norm


class FuchsianError(GarnierLabError):
    pass


class DegenerateCoordinatesError(FuchsianError):
    """Spectral coordinates are not defined for this system."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FuchsianSystem:
    """Container for the poles, residues and exponent labels.

    ``residues`` has shape ``(n+2, 2, 2)``; ``poles`` and ``theta`` have
    shape ``(n+2,)``.  Instances are immutable; use :func:`dataclasses.replace`
    style helpers (`with_residues` etc.) to derive new systems.
    """

    poles: np.ndarray
    residues: np.ndarray
    theta: np.ndarray
    theta_inf: complex

    def __post_init__(self):
        poles = _freeze(np.asarray(self.poles, dtype=complex).reshape(-1))
        theta = _freeze(np.asarray(self.theta, dtype=complex).reshape(-1))
        residues = _freeze(np.asarray(self.residues, dtype=complex))
        if residues.shape != (poles.size, 2, 2):
            raise FuchsianError(
                f"residues shape {residues.shape} does not match {poles.size} poles")
        if theta.size != poles.size:
            raise FuchsianError("theta length does not match pole count")
        if poles.size < 2:
            # n = 0 (two finite poles) is below the deformation range but is
            # the natural home of hypergeometric-class reduction outputs
            raise FuchsianError("need at least two finite poles")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", residues)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "theta_inf", complex(self.theta_inf))

    @property
    def n(self) -> int:
        return self.poles.size - 2

    @property
    def npoles(self) -> int:
        return self.poles.size

    @property
    def a_inf(self) -> np.ndarray:
        """Residue at infinity, ``-sum(A_k)``."""
        return -self.residues.sum(axis=0)

    def a_inf_normal(self) -> np.ndarray:
        """The value ``a_inf`` is required to take."""
        if self.theta_inf == 0:
            return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        h = self.theta_inf / 2.0
        return np.diag([h, -h]).astype(complex)

    def scale(self) -> float:
        """Typical magnitude used to make tolerances relative."""
        return max(1.0, float(np.max(np.abs(self.poles))),
                   max(norm(a) for a in self.residues))

    def with_residues(self, residues) -> "FuchsianSystem":
        return replace(self, residues=np.asarray(residues, dtype=complex))

    def with_theta(self, theta=None, theta_inf=None) -> "FuchsianSystem":
        kw = {}
        if theta is not None:
            kw["theta"] = np.asarray(theta, dtype=complex)
        if theta_inf is not None:
            kw["theta_inf"] = complex(theta_inf)
        return replace(self, **kw)

    def with_poles(self, poles) -> "FuchsianSystem":
        return replace(self, poles=np.asarray(poles, dtype=complex))

    def drop_pole(self, k: int) -> "FuchsianSystem":
        keep = [i for i in range(self.npoles) if i != k]
        return FuchsianSystem(self.poles[keep], self.residues[keep],
                              self.theta[keep], self.theta_inf)

    def conjugated(self, g) -> "FuchsianSystem":
        """Apply a constant gauge: every residue becomes ``inv(g) A g``."""
        g = asmat(g)
        gi = np.linalg.inv(g)
        return self.with_residues(np.array([gi @ a @ g for a in self.residues]))


@dataclass(frozen=True)
class Violation:
    name: str
    magnitude: float
    detail: str

    def __str__(self):  # pragma: no cover - cosmetic
        return f"{self.name}: {self.detail} (magnitude {self.magnitude:.3e})"


def validate(sys: FuchsianSystem, tol: float = 1e-8) -> list[Violation]:
    """Check the normal-form constraints; returns a list of violations.

    An empty list means the system is in normal form within ``tol`` (scaled
    by the typical magnitude of the data).
    """
    out: list[Violation] = []
    scale = sys.scale()
    m = sys.npoles
    for i in range(m):
        for j in range(i + 1, m):
            d = abs(sys.poles[i] - sys.poles[j])
            if d < tol * scale:
                out.append(Violation(
                    "pole-collision", d,
                    f"poles {i} and {j} coincide within tolerance"))
    for k in range(m):
        l1, l2 = eigenvalues(sys.residues[k])
        want = sys.theta[k] / 2.0
        err = min(abs(l1 - want) + abs(l2 + want), abs(l1 + want) + abs(l2 - want))
        if err > tol * scale:
            out.append(Violation(
                "residue-spectrum", float(err),
                f"residue {k} eigenvalues {l1:.6g}, {l2:.6g} do not match "
                f"+-theta/2 = +-{want:.6g}"))
    gap = norm(sys.a_inf - sys.a_inf_normal())
    if gap > tol * scale:
        out.append(Violation(
            "infinity-normal-form", float(gap),
            "residue at infinity differs from its normal form"))
    return out


def require_valid(sys: FuchsianSystem, tol: float = 1e-8):
    v = validate(sys, tol)
    if v:
        raise FuchsianError(
            "system is not in normal form: " + "; ".join(str(x) for x in v))


def rhs_at(sys: FuchsianSystem, lam: complex) -> np.ndarray:
    """Value of the connection matrix ``sum_k A_k / (lam - u_k)``."""
    d = lam - sys.poles
    if np.min(np.abs(d)) == 0.0:
        raise FuchsianError(f"evaluation point {lam} is a pole")
    return np.tensordot(1.0 / d, sys.residues, axes=(0, 0))


@dataclass(frozen=True)
class GarnierCoordinates:
    """Zeros ``nu`` of the (1,2) entry of the connection, with conjugate
    values ``rho``; both sorted by (real, imaginary) part of ``nu``."""

    nu: tuple[complex, ...]
    rho: tuple[complex, ...]


def upper_entry_numerator(sys: FuchsianSystem) -> np.ndarray:
    """Coefficients of the polynomial ``sum_k A_k[0,1] * prod_{l != k}(lam - u_l)``.

    Returned highest degree first, length ``n + 2`` (degree ``n + 1`` slot
    included; it vanishes for systems in normal form).
    """
    m = sys.npoles
    acc = np.zeros(m, dtype=complex)
    for k in range(m):
        others = np.delete(sys.poles, k)
        acc += sys.residues[k][0, 1] * np.poly(others)
    return acc


def garnier_coordinates(sys: FuchsianSystem, tol: float = 1e-8) -> GarnierCoordinates:
    """Spectral coordinates of a normal-form system.

    The ``nu_i`` are the ``n`` roots of the numerator of the (1,2) entry of
    the connection; ``rho_i = sum_k (A_k[0,0] + theta_k/2) / (nu_i - u_k)``.
    Both are invariant under diagonal conjugation of the residues.
    """
    scale = sys.scale()
    coeff = upper_entry_numerator(sys)
    # leading slot must vanish in normal form; drop it explicitly
    if abs(coeff[0]) > tol * scale:
        raise DegenerateCoordinatesError(
            "the (1,2) entries do not sum to zero; system not in normal form")
    coeff = coeff[1:]
    if norm(coeff) <= tol * scale:
        raise DegenerateCoordinatesError(
            "the (1,2) entry of the connection vanishes identically "
            "(reducible lower-triangular system)")
    if abs(coeff[0]) < tol * max(1.0, norm(coeff)):
        raise DegenerateCoordinatesError(
            "degree drop: fewer coordinates than deformation parameters")
    nu = np.roots(coeff)
    if nu.size != sys.n:
        raise DegenerateCoordinatesError(
            f"expected {sys.n} coordinates, found {nu.size}")
    prox = np.min(np.abs(nu[:, None] - sys.poles[None, :]))
    if prox < 1e-10 * scale:
        raise DegenerateCoordinatesError(
            "a coordinate collides with a pole; rho is singular there")
    nu = sorted((complex(z) for z in nu), key=lambda z: (z.real, z.imag))
    diag_plus = sys.residues[:, 0, 0] + sys.theta / 2.0
    rho = [complex(np.sum(diag_plus / (z - sys.poles))) for z in nu]
    return GarnierCoordinates(tuple(nu), tuple(rho))


def default_poles(m: int) -> np.ndarray:
    """Pole layout used when a caller does not care: movable poles at
    2, 3, ... followed by the fixed pair 0, 1."""
    n = m - 2
    return np.array([2.0 + j for j in range(n)] + [0.0, 1.0], dtype=complex)


def build_triangular_family(theta: Sequence[complex], eps: Sequence[int],
                            theta_inf: complex, upper=None,
                            poles=None) -> FuchsianSystem:
    """Upper-triangular system with residues ``[[e_k th_k/2, b_k], [0, -e_k th_k/2]]``.

    The signs ``eps`` and exponents must satisfy
    ``theta_inf + sum(eps_k * theta_k) = 0`` so that the diagonal part of the
    residue at infinity matches ``diag(theta_inf/2, -theta_inf/2)``; the
    optional ``upper`` entries must sum to zero so the off-diagonal part
    cancels.  Exponent labels are stored as ``-eps_k * theta_k`` so that the
    (1,1) entries equal ``-theta_k/2`` (the labeling in which the conjugate
    coordinates ``rho`` vanish identically).
    """
    theta = np.asarray(theta, dtype=complex).reshape(-1)
    eps = np.asarray(eps, dtype=int).reshape(-1)
    m = theta.size
    if eps.size != m:
        raise FuchsianError("eps length does not match theta")
    if not np.all(np.abs(eps) == 1):
        raise FuchsianError("eps entries must be +1 or -1")
    mismatch = abs(theta_inf + np.sum(eps * theta))
    if mismatch > 1e-10 * (1.0 + abs(theta_inf)):
        raise FuchsianError(
            "triangular family needs theta_inf = -sum(eps*theta); "
            f"mismatch {mismatch:.3e}")
    if upper is None:
        upper = np.zeros(m, dtype=complex)
    else:
        upper = np.asarray(upper, dtype=complex).reshape(-1)
        if upper.size != m:
            raise FuchsianError("upper length does not match theta")
        if abs(upper.sum()) > 1e-10 * (1.0 + norm(upper)):
            raise FuchsianError("upper entries must sum to zero")
    if poles is None:
        poles = default_poles(m)
    res = np.zeros((m, 2, 2), dtype=complex)
    for k in range(m):
        h = eps[k] * theta[k] / 2.0
        res[k] = [[h, upper[k]], [0.0, -h]]
    # label so that the (1,1) entry is -theta_label/2
    labels = -eps * theta
    return FuchsianSystem(poles, res, labels, complex(theta_inf))


def random_system(n: int, rng: np.random.Generator, spread: float = 1.2,
                  min_sep: float = 0.3, complex_theta: bool = False) -> FuchsianSystem:
    """Random validated system with poles ``(u_1..u_n, 0, 1)``.

    Residues at the first ``n+1`` poles are random conjugates of
    ``diag(theta/2, -theta/2)``; the last residue closes the sum so the
    residue at infinity is exactly diagonal.  Its exponent label is derived
    from its spectrum.  Resamples until the derived exponent is safely
    non-integer and everything is well conditioned.
    """
    for _ in range(200):
        fixed = np.array([0.0, 1.0], dtype=complex)
        mov = []
        ok = True
        for _ in range(n):
            for _ in range(50):
                z = complex(rng.uniform(-spread, spread),
                            rng.uniform(-spread, spread))
                if np.min(np.abs(np.concatenate([fixed, np.array(mov or [3.0])])
                                 - z)) > min_sep and abs(z) > min_sep:
                    mov.append(z)
                    break
            else:
                ok = False
        if not ok:
            continue
        poles = np.array(mov + [0.0, 1.0], dtype=complex)
        m = n + 2
        theta = rng.uniform(0.25, 0.85, size=m).astype(complex)
        if complex_theta:
            theta = theta + 1j * rng.uniform(-0.2, 0.2, size=m)
        theta_inf = complex(rng.uniform(0.3, 1.6))
        res = np.zeros((m, 2, 2), dtype=complex)
        for k in range(m - 1):
            while True:
                s = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                if abs(np.linalg.det(s)) > 0.4:
                    break
            j = np.diag([theta[k] / 2.0, -theta[k] / 2.0])
            res[k] = s @ j @ np.linalg.inv(s)
        a_inf = np.diag([theta_inf / 2.0, -theta_inf / 2.0])
        res[m - 1] = -a_inf - res[: m - 1].sum(axis=0)
        l1, l2 = eigenvalues(res[m - 1])
        if abs(l1 + l2) > 1e-10 or abs(l1 - l2) < 0.1:
            continue
        th_last = 2.0 * l1
        # avoid integer resonances of every exponent (0 included)
        labels = np.concatenate([theta[: m - 1], [th_last], [theta_inf]])
        dist = np.abs(labels.real - np.round(labels.real)) + np.abs(labels.imag)
        if np.min(dist) < 0.05:
            continue
        theta[m - 1] = th_last
        sys = FuchsianSystem(poles, res, theta, theta_inf)
        if not validate(sys, 1e-9):
            return sys
    raise FuchsianError("failed to sample a well conditioned random system")
