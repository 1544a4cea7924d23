"""Monodromy of rank-2 Fuchsian systems.

The fundamental solution normalized at infinity is continued along a basis of
pole loops anchored at a common base point far from every pole.  Loops are
polylines plus a small circle: descend from the base point to a staging line,
run parallel to the cut direction up to the target pole, walk once around it
counterclockwise and retrace.  The loop around infinity is the big circle
through the base point traversed clockwise.

Branch data at resonant exponents (integer ``theta``) is produced by the
printed resonance recursions; the stored value for infinity always comes from
the normalization series itself so the monodromy relations hold exactly.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import GarnierLabError
from .fuchsian import FuchsianSystem, require_valid
from .mat2 import (IDENTITY, TWO_PI_I, asmat, diagonalizer, eig_jordan,
                   eigenvalues, inv, norm, scalar_class)


class MonodromyError(GarnierLabError):
    pass


INT_TOL = 1e-8


def integer_exponent(theta: complex, tol: float = INT_TOL):
    """Round ``theta`` to an integer when it is within ``tol`` of one,
    else return None."""
    r = round(theta.real)
    if abs(theta.real - r) <= tol and abs(theta.imag) <= tol:
        return int(r)
    return None


def thread_count() -> int:
    raw = os.environ.get("GARNIER_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "DOP853"
    series_tol: float = 1e-14
    max_terms: int = 200


def cut_log(lam: complex, eta: float) -> complex:
    """Logarithm with the branch cut along the ray of direction ``eta``."""
    shift = eta - np.pi
    return complex(np.log(lam * np.exp(-1j * shift)) + 1j * shift)


def moment(sys: FuchsianSystem, l: int) -> np.ndarray:
    """Weighted residue sum ``sum_k A_k u_k**l``."""
    w = sys.poles ** l
    return np.tensordot(w, sys.residues, axes=(0, 0))


# ---------------------------------------------------------------------------
# normalization at infinity

def infinity_series(sys: FuchsianSystem, terms: int):
    """Coefficients ``Phi_m`` of the series part of the normalized solution,
    together with the resonance matrix at infinity.

    Solves the order-by-order commutator equations for
    ``(1 + sum Phi_m lam**-m) * lam**-A_inf * lam**-R_inf``.  At a positive
    integer ``|theta_inf| = p`` the obstruction at order ``p`` defines the
    single off-diagonal entry of ``R_inf``; the free entry of ``Phi_p`` is
    set to zero.
    """
    ti = sys.theta_inf
    p = integer_exponent(ti)
    if p is not None and p == 0 and ti != 0:
        p = None
    fs = [moment(sys, l) for l in range(terms + 1)]
    phis = [IDENTITY.copy()]
    r_inf = np.zeros((2, 2), dtype=complex)
    nilpotent = (ti == 0)
    for m in range(1, terms + 1):
        s = np.zeros((2, 2), dtype=complex)
        for k in range(1, m + 1):
            s += fs[k] @ phis[m - k]
        if p is not None and p != 0 and m > abs(p):
            s = s + phis[m - abs(p)] @ r_inf
        x = np.zeros((2, 2), dtype=complex)
        if nilpotent:
            # residue at infinity is the nilpotent [[0,1],[0,0]]
            x[1, 0] = -s[1, 0] / m
            x[0, 0] = (x[1, 0] - s[0, 0]) / m
            x[1, 1] = -(s[1, 1] + x[1, 0]) / m
            x[0, 1] = (x[1, 1] - x[0, 0] - s[0, 1]) / m
        else:
            x[0, 0] = -s[0, 0] / m
            x[1, 1] = -s[1, 1] / m
            if p is not None and m == abs(p):
                if p > 0:
                    r_inf[0, 1] = -s[0, 1]
                    x[0, 1] = 0.0
                    x[1, 0] = -s[1, 0] / (ti + m)
                else:
                    r_inf[1, 0] = -s[1, 0]
                    x[1, 0] = 0.0
                    x[0, 1] = s[0, 1] / (ti - m)
            else:
                x[0, 1] = s[0, 1] / (ti - m)
                x[1, 0] = -s[1, 0] / (ti + m)
        phis.append(x)
    return phis, r_inf


def normalized_value(sys: FuchsianSystem, lam: complex, eta: float,
                     opts: IntegratorOptions = IntegratorOptions()):
    """Value at ``lam`` of the solution normalized at infinity, with the
    logarithm branch cut along direction ``eta``.

    Returns ``(value, r_inf, n_terms)``.  ``lam`` must be far outside the
    poles for the series to converge.
    """
    radius = abs(lam)
    scale = float(np.max(np.abs(sys.poles)))
    if radius < 2.0 * max(scale, 1e-6):
        raise MonodromyError(
            f"normalization point |{lam:.3g}| is too close to the poles")
    ratio = scale / radius if scale > 0 else 0.0
    phis, r_inf = infinity_series(sys, opts.max_terms)
    acc = np.zeros((2, 2), dtype=complex)
    power = 1.0 + 0.0j
    n_used = opts.max_terms
    for m, phi in enumerate(phis):
        term = phi * power
        acc += term
        if m >= 3 and norm(term) < opts.series_tol and ratio < 0.75:
            n_used = m
            break
        power /= lam
    else:
        if norm(phis[-1]) * abs(power) > 1e-10:
            raise MonodromyError(
                "normalization series did not converge; move the base point "
                "further out or raise max_terms")
    lg = cut_log(lam, eta)
    ti = sys.theta_inf
    if ti == 0:
        exp_a = IDENTITY - lg * np.array([[0.0, 1.0], [0.0, 0.0]])
    else:
        exp_a = np.diag([np.exp(-0.5 * ti * lg), np.exp(0.5 * ti * lg)])
    exp_r = IDENTITY - lg * r_inf  # r_inf is nilpotent
    return acc @ exp_a @ exp_r, r_inf, n_used


# ---------------------------------------------------------------------------
# loop geometry

@dataclass(frozen=True)
class LoopBasis:
    """Geometry of the pole loops.

    ``eta`` is the cut direction (angle); poles are approached from the
    opposite side along rails parallel to ``eta``.  ``order`` lists pole
    indices sorted by their coordinate transverse to ``eta``; composing the
    loops in that traversal order gives the inverse of the clockwise loop
    around infinity.
    """

    base_point: complex
    eta: float
    order: tuple[int, ...]
    radii: tuple[float, ...]
    staging: float

    @classmethod
    def auto(cls, poles: Sequence[complex], eta: float | None = None,
             base_factor: float = 12.0) -> "LoopBasis":
        poles = np.asarray(poles, dtype=complex).reshape(-1)
        m = poles.size
        scale = max(1.0, float(np.max(np.abs(poles))))
        diffs = np.abs(poles[:, None] - poles[None, :]) + np.eye(m) * 1e18
        sep = float(diffs.min())
        if sep <= 0.0:
            raise MonodromyError("coincident poles")
        radii = tuple(float(diffs[j].min()) / 3.0 for j in range(m))

        def transverse_gap(angle: float) -> float:
            perp = np.exp(1j * (angle - np.pi / 2.0))
            proj = (poles * np.conj(perp)).real
            d = np.abs(proj[:, None] - proj[None, :]) + np.eye(m) * 1e18
            return float(d.min())

        if eta is None:
            golden = 2.399963229728653
            best, best_gap = np.pi / 2.0, -1.0
            for k in range(96):
                cand = np.pi / 2.0 + k * golden
                g = transverse_gap(cand)
                if g > best_gap:
                    best, best_gap = cand, g
                if g >= 0.45 * sep:
                    break
            eta = float(best % (2.0 * np.pi))
            if best_gap < 1e-3 * sep:
                raise MonodromyError("could not separate poles transversally")
        else:
            eta = float(eta)
            if transverse_gap(eta) < 1e-6 * sep:
                raise MonodromyError(
                    "requested cut direction stacks poles onto one rail")
        hat = np.exp(1j * eta)
        along = (poles * np.conj(hat)).real
        perp = np.exp(1j * (eta - np.pi / 2.0))
        proj = (poles * np.conj(perp)).real
        order = tuple(int(i) for i in np.argsort(proj, kind="stable"))
        staging = float(along.min() - 0.8 * scale - max(radii))
        base = -base_factor * scale * hat
        return cls(complex(base), eta, order, radii, staging)

    # each segment is ("line", z0, z1) or ("arc", center, radius, a0, a1)
    def loop_segments(self, poles, j: int):
        poles = np.asarray(poles, dtype=complex).reshape(-1)
        u = poles[j]
        hat = np.exp(1j * self.eta)
        r = self.radii[j]
        foot = u + (self.staging - (u * np.conj(hat)).real) * hat
        entry = u - r * hat
        a0 = self.eta + np.pi
        return [
            ("line", self.base_point, foot),
            ("line", foot, entry),
            ("arc", u, r, a0, a0 + 2.0 * np.pi),
            ("line", entry, foot),
            ("line", foot, self.base_point),
        ]

    def infinity_segments(self):
        b = self.base_point
        a0 = self.eta + np.pi
        return [("arc", 0.0, abs(b), a0, a0 - 2.0 * np.pi)]


def shared_basis(poles0, poles1, base_factor: float = 12.0):
    """Loop bases for two pole configurations sharing base point, cut
    direction and staging line, so their monodromy frames coincide.

    The cut direction is chosen to separate the union of both configurations
    transversally, which keeps corresponding loops in matching homotopy
    classes for moderate pole motion.
    """
    poles0 = np.asarray(poles0, dtype=complex).reshape(-1)
    poles1 = np.asarray(poles1, dtype=complex).reshape(-1)
    union = [complex(z) for z in poles0]
    for z in poles1:
        if min(abs(z - w) for w in union) > 1e-9:
            union.append(complex(z))
    u = LoopBasis.auto(np.asarray(union), base_factor=base_factor)
    b0 = LoopBasis.auto(poles0, eta=u.eta)
    b1 = LoopBasis.auto(poles1, eta=u.eta)
    staging = min(u.staging, b0.staging, b1.staging)
    b0 = replace(b0, base_point=u.base_point, staging=staging)
    b1 = replace(b1, base_point=u.base_point, staging=staging)
    return b0, b1


def _segment_param(seg):
    kind = seg[0]
    if kind == "line":
        _, z0, z1 = seg
        dz = z1 - z0
        return (lambda t: z0 + t * dz), (lambda t: dz)
    _, c, r, a0, a1 = seg
    da = a1 - a0

    def pos(t):
        return c + r * np.exp(1j * (a0 + t * da))

    def vel(t):
        return 1j * da * r * np.exp(1j * (a0 + t * da))

    return pos, vel


def integrate_path(sys: FuchsianSystem, segments, y0: np.ndarray,
                   opts: IntegratorOptions = IntegratorOptions()) -> np.ndarray:
    """Continue the 2x2 solution with value ``y0`` along the segments."""
    poles = sys.poles
    residues = sys.residues
    y = np.asarray(y0, dtype=complex).reshape(4)
    for seg in segments:
        pos, vel = _segment_param(seg)

        def rhs(t, yv):
            z = pos(t)
            a = np.tensordot(1.0 / (z - poles), residues, axes=(0, 0))
            return (vel(t) * (a @ yv.reshape(2, 2))).reshape(4)

        sol = solve_ivp(rhs, (0.0, 1.0), y, method=opts.method,
                        rtol=opts.rtol, atol=opts.atol, dense_output=False)
        if not sol.success:
            raise MonodromyError(f"path integration failed: {sol.message}")
        y = sol.y[:, -1]
    return y.reshape(2, 2)


# ---------------------------------------------------------------------------
# monodromy data

@dataclass(frozen=True)
class MonodromyData:
    """Monodromy matrices in a common frame, one per finite pole plus the
    clockwise loop around infinity, with resonance and connection data."""

    matrices: tuple[np.ndarray, ...]
    m_inf: np.ndarray
    r_poles: tuple[np.ndarray, ...]
    r_inf: np.ndarray
    connections: tuple[np.ndarray, ...] | None
    basis: LoopBasis
    theta: tuple[complex, ...]
    theta_inf: complex
    frame: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def npoles(self) -> int:
        return len(self.matrices)


def compute_monodromy(sys: FuchsianSystem, basis: LoopBasis | None = None,
                      opts: IntegratorOptions = IntegratorOptions(),
                      frame: str = "infinity") -> MonodromyData:
    """Monodromy matrices of every pole loop and of the loop around infinity.

    ``frame='infinity'`` (the default) continues the solution normalized at
    infinity and requires the system in normal form; ``frame='base'`` uses
    the solution equal to the identity at the base point and applies to any
    configuration of residues.
    """
    if frame not in ("infinity", "base"):
        raise MonodromyError(f"unknown frame {frame!r}")
    if basis is None:
        basis = LoopBasis.auto(sys.poles)
    if frame == "infinity":
        require_valid(sys)
        phi0, r_inf_series, _ = normalized_value(sys, basis.base_point,
                                                 basis.eta, opts)
    else:
        # base frame makes no use of the normal form at infinity
        phi0 = IDENTITY.copy()
        r_inf_series = np.zeros((2, 2), dtype=complex)
    phi0_inv = inv(phi0)

    jobs = [basis.loop_segments(sys.poles, j) for j in range(sys.npoles)]
    jobs.append(basis.infinity_segments())

    def run(segs):
        return phi0_inv @ integrate_path(sys, segs, phi0, opts)

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(s) for s in jobs]
    mats = tuple(results[:-1])
    m_inf = results[-1]

    r_poles = []
    for k in range(sys.npoles):
        p = integer_exponent(sys.theta[k])
        if p is None or p == 0:
            r_poles.append(np.zeros((2, 2), dtype=complex))
        else:
            r_poles.append(r_matrix_pole(sys, k))
    return MonodromyData(mats, m_inf, tuple(r_poles), r_inf_series, None,
                         basis, tuple(complex(t) for t in sys.theta),
                         complex(sys.theta_inf), frame)


def ordered_product(data: MonodromyData) -> np.ndarray:
    """Product of the finite-pole matrices that inverts the loop around
    infinity: loops taken in descending transverse order, first-traversed
    factor rightmost."""
    p = IDENTITY.copy()
    for j in reversed(data.basis.order):
        p = data.matrices[j] @ p
    return p


def check_relations(data: MonodromyData) -> dict:
    """Residuals of the defining relations of the monodromy data.

    ``cyclic``: the ordered product against the loop around infinity.
    ``eigen``: per-pole eigenvalue mismatch with ``exp(+-i pi theta)``.
    ``inf_consistency``: the loop around infinity against the exponential of
    the residue and resonance data at infinity (conjugation-free in the
    infinity frame, trace-only in the base frame).
    """
    prod = ordered_product(data)
    cyclic = norm(data.m_inf @ prod - IDENTITY)
    eigen = []
    for m, th in zip(data.matrices, data.theta):
        l1, l2 = eigenvalues(m)
        e = np.exp(1j * np.pi * th)
        err = min(abs(l1 - e) + abs(l2 - 1.0 / e),
                  abs(l2 - e) + abs(l1 - 1.0 / e))
        eigen.append(float(err))
    model = expected_m_inf(data.theta_inf, data.r_inf)
    if data.frame == "infinity":
        inf_res = norm(data.m_inf - model)
    else:
        inf_res = abs(np.trace(data.m_inf) - np.trace(model))
    return {"cyclic": float(cyclic), "eigen": eigen,
            "inf_consistency": float(inf_res)}


def expected_m_inf(theta_inf: complex, r_inf) -> np.ndarray:
    """The matrix ``exp(2 pi i A_inf) exp(2 pi i R_inf)`` in normal form."""
    if theta_inf == 0:
        exp_a = IDENTITY + TWO_PI_I * np.array([[0.0, 1.0], [0.0, 0.0]])
    else:
        e = np.exp(1j * np.pi * theta_inf)
        exp_a = np.diag([e, 1.0 / e])
    return exp_a @ (IDENTITY + TWO_PI_I * np.asarray(r_inf))


# ---------------------------------------------------------------------------
# resonance recursions

def r_matrix_infinity(sys: FuchsianSystem) -> np.ndarray:
    """Resonance matrix at infinity for integer ``theta_inf = +-p``, p > 0,
    by the moment recursion."""
    p = integer_exponent(sys.theta_inf)
    if p is None or p == 0:
        raise MonodromyError(
            "resonance matrix at infinity needs a nonzero integer theta_inf")
    ti = float(p)
    q = abs(p)
    fs = [moment(sys, l) for l in range(q + 1)]
    gs = {0: IDENTITY.copy()}
    for l in range(1, q):
        s = fs[l].copy()
        for k in range(1, l):
            s += gs[l - k] @ fs[k]
        g = np.zeros((2, 2), dtype=complex)
        g[0, 0] = s[0, 0] / l
        g[1, 1] = s[1, 1] / l
        g[0, 1] = s[0, 1] / (l - ti)
        g[1, 0] = s[1, 0] / (l + ti)
        gs[l] = g
    s = fs[q].copy()
    for k in range(1, q):
        s += gs[q - k] @ fs[k]
    r = np.zeros((2, 2), dtype=complex)
    if p > 0:
        r[0, 1] = -s[0, 1]
    else:
        r[1, 0] = -s[1, 0]
    return r


def local_expansion_moments(sys: FuchsianSystem, k: int, upto: int):
    """Taylor coefficients at pole ``k`` of the connection with the polar
    part removed: ``c_l = sum_{j != k} (-1)**(l-1) A_j / (u_k - u_j)**l``."""
    out = []
    u = sys.poles[k]
    for l in range(1, upto + 1):
        c = np.zeros((2, 2), dtype=complex)
        sign = (-1.0) ** (l - 1)
        for j in range(sys.npoles):
            if j == k:
                continue
            c += sign * sys.residues[j] / (u - sys.poles[j]) ** l
        out.append(c)
    return out


def r_matrix_pole(sys: FuchsianSystem, k: int) -> np.ndarray:
    """Resonance matrix at pole ``k`` for integer ``theta_k = +-p``, p > 0.

    Computed in the eigenframe of the residue; the continuation multiplier
    around the pole is ``exp(2 pi i J_k) exp(2 pi i R_k)`` with
    ``J_k = diag(theta_k/2, -theta_k/2)``.
    """
    p = integer_exponent(sys.theta[k])
    if p is None or p == 0:
        raise MonodromyError(
            f"resonance matrix at pole {k} needs a nonzero integer exponent")
    th = float(p)
    q = abs(p)
    g = diagonalizer(sys.residues[k], th / 2.0)
    gi = inv(g)
    cs = local_expansion_moments(sys, k, q)
    hats = [gi @ c @ g for c in cs]
    hs = {}
    for l in range(1, q):
        s = hats[l - 1].copy()
        for m in range(1, l):
            s += hats[l - m - 1] @ hs[m]
        h = np.zeros((2, 2), dtype=complex)
        h[0, 0] = s[0, 0] / l
        h[1, 1] = s[1, 1] / l
        h[0, 1] = s[0, 1] / (l - th)
        h[1, 0] = s[1, 0] / (l + th)
        hs[l] = h
    s = hats[q - 1].copy()
    for m in range(1, q):
        s += hats[q - m - 1] @ hs[m]
    r = np.zeros((2, 2), dtype=complex)
    if p > 0:
        r[0, 1] = s[0, 1]
    else:
        r[1, 0] = s[1, 0]
    return r


# ---------------------------------------------------------------------------
# connection matrices and group classification

def connection_matrices(data: MonodromyData, tol: float = 1e-8) -> MonodromyData:
    """Fill in matrices ``C_k`` with
    ``M_k = inv(C_k) exp(2 pi i J_k) exp(2 pi i R_k) C_k``.

    Raises when some ``M_k`` is scalar (the connection matrix is then not
    unique: the pole is apparent and carries no local data).
    """
    cs = []
    for k, m in enumerate(data.matrices):
        th = data.theta[k]
        sc = scalar_class(m, tol)
        if sc != "none":
            raise MonodromyError(
                f"monodromy at pole {k} is scalar ({sc}); connection matrix "
                "is not unique there")
        p = integer_exponent(th)
        if p is None or p == 0:
            e = np.exp(1j * np.pi * th)
            t = diagonalizer(m, e, tol)
            cs.append(inv(t))
            continue
        # integer exponent and non-scalar monodromy force a Jordan block;
        # the eigenvalue splitting of a perturbed defective matrix is of
        # order sqrt(error), so detect with a loose tolerance
        ej = eig_jordan(m, tol=1e-4, convention="monodromy")
        if ej.diagonalizable:
            raise MonodromyError(
                f"monodromy at pole {k} is diagonalizable with integer "
                "exponent but not scalar; data is inconsistent")
        mu = ej.eigenvalues[0]
        r = data.r_poles[k]
        if p > 0:
            r_entry = r[0, 1]
            if abs(r_entry) < 1e-14:
                raise MonodromyError(
                    f"resonance entry at pole {k} vanishes but the monodromy "
                    "is not scalar; data is inconsistent")
            d = np.diag([mu * r_entry, 1.0]).astype(complex)
            cs.append(d @ inv(ej.transform))
        else:
            r_entry = r[1, 0]
            if abs(r_entry) < 1e-14:
                raise MonodromyError(
                    f"resonance entry at pole {k} vanishes but the monodromy "
                    "is not scalar; data is inconsistent")
            sigma = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
            d = np.diag([1.0, mu * r_entry]).astype(complex)
            cs.append(d @ sigma @ inv(ej.transform))
    residual = 0.0
    for k, (m, c) in enumerate(zip(data.matrices, cs)):
        model = local_multiplier(data.theta[k], data.r_poles[k])
        residual = max(residual, norm(inv(c) @ model @ c - m))
    out = replace(data, connections=tuple(cs))
    out.diagnostics["connection_residual"] = residual
    return out


def local_multiplier(theta: complex, r) -> np.ndarray:
    """Continuation multiplier ``exp(2 pi i J) exp(2 pi i R)`` at a pole."""
    if theta == 0:
        exp_j = IDENTITY.copy()
    else:
        e = np.exp(1j * np.pi * theta)
        exp_j = np.diag([e, 1.0 / e])
    return exp_j @ (IDENTITY + TWO_PI_I * np.asarray(r, dtype=complex))


@dataclass(frozen=True)
class GroupClassification:
    scalar_indices: frozenset
    scalar_inf: bool
    l: int
    reducible: bool
    invariant_vector: np.ndarray | None
    residual: float


def classify_group(data: MonodromyData, tol: float = 1e-6) -> GroupClassification:
    """Detect scalar generators and a common invariant line.

    ``l`` counts the finite-pole generators that are scalar (each can be
    removed by a rational gauge).  ``reducible`` reports a common eigenvector
    of all generators; for a fully scalar tuple the group is trivially
    reducible with residual zero.
    """
    scal = frozenset(k for k, m in enumerate(data.matrices)
                     if scalar_class(m, tol) != "none")
    scal_inf = scalar_class(data.m_inf, tol) != "none"
    non_scalar = [m for k, m in enumerate(data.matrices) if k not in scal]
    if not non_scalar:
        v = np.array([1.0, 0.0], dtype=complex)
        return GroupClassification(scal, scal_inf, len(scal), True, v, 0.0)
    candidates = []
    for m in non_scalar:
        ej = eig_jordan(m, tol=1e-4, convention="monodromy")
        candidates.append(ej.transform[:, 0] / np.linalg.norm(ej.transform[:, 0]))
        if ej.diagonalizable:
            candidates.append(ej.transform[:, 1]
                              / np.linalg.norm(ej.transform[:, 1]))

    def residual_of(v):
        r = 0.0
        for m in data.matrices:
            mv = m @ v
            mu = np.vdot(v, mv)
            r = max(r, float(np.linalg.norm(mv - mu * v)))
        return r

    best_v = min(candidates, key=residual_of)
    best_v = refine_invariant_vector(non_scalar, best_v)
    best_res = residual_of(best_v)
    reducible = best_res < tol
    return GroupClassification(scal, scal_inf, len(scal), reducible,
                               best_v if reducible else None, float(best_res))


def refine_invariant_vector(mats, v0, iters: int = 4) -> np.ndarray:
    """Sharpen a common-eigenvector candidate.

    Stacks the deflated generators ``M_j - mu_j`` and takes the smallest
    right singular vector; the intersection of the eigenlines is well
    conditioned even when each defective eigenvector alone is not.
    """
    v = np.asarray(v0, dtype=complex)
    v = v / np.linalg.norm(v)
    for _ in range(iters):
        rows = []
        for m in mats:
            mu = np.vdot(v, m @ v)
            rows.append(m - mu * IDENTITY)
        stack = np.vstack(rows)
        _, _, vh = np.linalg.svd(stack)
        v = vh[-1].conj()
        v = v / np.linalg.norm(v)
    i = int(np.argmax(np.abs(v)))
    return v * (abs(v[i]) / v[i])
