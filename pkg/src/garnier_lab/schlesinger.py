"""Isomonodromic deformation of the residue matrices.

Moving the poles along a path while transporting the residues by

    dA_i/dt = sum_{j != i} (du_j/dt - du_i/dt) [A_i, A_j] / (u_i - u_j)

keeps the monodromy of the system constant.  The residue spectra and the
residue at infinity are first integrals, so the exponent labels travel
unchanged.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import GarnierLabError
from .fuchsian import FuchsianSystem
from .monodromy import (IntegratorOptions, LoopBasis, compute_monodromy,
                        integer_exponent, norm, shared_basis)


class FlowError(GarnierLabError):
    pass


@dataclass(frozen=True)
class DeformationPath:
    """Piecewise linear pole motion.

    ``waypoints`` is a sequence of pole tuples, all of the same length; the
    path is traversed at uniform parameter speed per segment with t in
    [0, 1].  ``clearance`` is the smallest pairwise pole distance the path
    is allowed to reach.
    """

    waypoints: tuple[tuple[complex, ...], ...]
    clearance: float = 0.05

    def __post_init__(self):
        wps = tuple(tuple(complex(z) for z in w) for w in self.waypoints)
        if len(wps) < 2:
            raise FlowError("a path needs at least two waypoints")
        width = len(wps[0])
        if any(len(w) != width for w in wps):
            raise FlowError("waypoints have inconsistent lengths")
        object.__setattr__(self, "waypoints", wps)

    @property
    def nsegments(self) -> int:
        return len(self.waypoints) - 1

    @property
    def npoles(self) -> int:
        return len(self.waypoints[0])

    def moving_indices(self) -> tuple[int, ...]:
        first = np.asarray(self.waypoints[0])
        out = []
        for j in range(self.npoles):
            if any(abs(w[j] - first[j]) > 0.0 for w in self.waypoints[1:]):
                out.append(j)
        return tuple(out)

    def length(self) -> float:
        total = 0.0
        for a, b in zip(self.waypoints[:-1], self.waypoints[1:]):
            total += float(np.max(np.abs(np.asarray(b) - np.asarray(a))))
        return total

    def segment(self, t: float):
        """Segment index and local parameter for global ``t`` in [0, 1]."""
        t = min(max(t, 0.0), 1.0)
        s = t * self.nsegments
        i = min(int(s), self.nsegments - 1)
        return i, s - i

    def poles_at(self, t: float) -> np.ndarray:
        i, s = self.segment(t)
        a = np.asarray(self.waypoints[i], dtype=complex)
        b = np.asarray(self.waypoints[i + 1], dtype=complex)
        return a + s * (b - a)

    def min_separation(self) -> float:
        """Exact minimum over the path of the pairwise pole distances."""
        best = np.inf
        m = self.npoles
        for a, b in zip(self.waypoints[:-1], self.waypoints[1:]):
            a = np.asarray(a, dtype=complex)
            v = np.asarray(b, dtype=complex) - a
            for i in range(m):
                for j in range(i + 1, m):
                    d0 = a[i] - a[j]
                    dv = v[i] - v[j]
                    nv = abs(dv) ** 2
                    ts = 0.0 if nv == 0.0 else -np.real(d0 * np.conj(dv)) / nv
                    ts = min(max(ts, 0.0), 1.0)
                    best = min(best, abs(d0 + ts * dv))
        return float(best)

    def require_clear(self):
        sep = self.min_separation()
        if sep < self.clearance:
            raise FlowError(
                f"path clearance violated: poles approach within {sep:.3e} "
                f"< {self.clearance:.3e}")


def schlesinger_rhs(poles, residues, velocities) -> np.ndarray:
    """Time derivative of every residue for pole velocities ``du/dt``."""
    poles = np.asarray(poles, dtype=complex)
    residues = np.asarray(residues, dtype=complex)
    velocities = np.asarray(velocities, dtype=complex)
    m = poles.size
    out = np.zeros_like(residues)
    for i in range(m):
        acc = np.zeros((2, 2), dtype=complex)
        for j in range(m):
            if j == i:
                continue
            w = (velocities[j] - velocities[i]) / (poles[i] - poles[j])
            if w != 0.0:
                acc += w * (residues[i] @ residues[j]
                            - residues[j] @ residues[i])
        out[i] = acc
    return out


def flow(sys: FuchsianSystem, path: DeformationPath,
         opts: IntegratorOptions = IntegratorOptions(), n_samples: int = 0):
    """Transport the system along the path.

    Returns the final system, or ``(final, samples)`` when ``n_samples > 0``
    with ``samples`` a list of ``(t, FuchsianSystem)`` pairs.  A path of zero
    length returns the input unchanged.
    """
    if path.npoles != sys.npoles:
        raise FlowError("path width does not match the number of poles")
    start_gap = float(np.max(np.abs(np.asarray(path.waypoints[0], dtype=complex)
                                    - sys.poles)))
    if start_gap > 1e-9 * sys.scale():
        raise FlowError("path does not start at the system's poles")
    path.require_clear()
    if any(integer_exponent(t) is not None for t in sys.theta):
        warnings.warn(
            "integer exponent present: the deformation family may be "
            "non-unique at this configuration", stacklevel=2)
    if path.length() == 0.0:
        return (sys, [(0.0, sys), (1.0, sys)]) if n_samples > 0 else sys

    want_ts = list(np.linspace(0.0, 1.0, n_samples)) if n_samples > 0 else []
    samples = []
    y = sys.residues.reshape(-1).astype(complex)
    m = sys.npoles
    for i in range(path.nsegments):
        a = np.asarray(path.waypoints[i], dtype=complex)
        b = np.asarray(path.waypoints[i + 1], dtype=complex)
        v = b - a

        def rhs(s, yv):
            res = yv.reshape(m, 2, 2)
            return schlesinger_rhs(a + s * v, res, v).reshape(-1)

        seg_ts = sorted(t * path.nsegments - i for t in want_ts
                        if i <= t * path.nsegments <= i + 1)
        sol = solve_ivp(rhs, (0.0, 1.0), y, method=opts.method, rtol=opts.rtol,
                        atol=opts.atol, dense_output=bool(seg_ts))
        if not sol.success:
            t_reach = (i + sol.t[-1]) / path.nsegments
            raise FlowError(
                "deformation aborted (likely a singular configuration) near "
                f"t = {t_reach:.6f}, poles {path.poles_at(t_reach)}")
        for s in seg_ts:
            res = sol.sol(min(s, 1.0)).reshape(m, 2, 2)
            t_glob = (i + s) / path.nsegments
            samples.append((t_glob, FuchsianSystem(
                a + min(s, 1.0) * v, res, sys.theta, sys.theta_inf)))
        y = sol.y[:, -1]

    final = FuchsianSystem(np.asarray(path.waypoints[-1], dtype=complex),
                           y.reshape(m, 2, 2), sys.theta, sys.theta_inf)
    if n_samples > 0:
        return final, samples
    return final


def verify_isomonodromy(sys_before: FuchsianSystem, sys_after: FuchsianSystem,
                        basis: LoopBasis | None = None,
                        opts: IntegratorOptions = IntegratorOptions()) -> float:
    """Largest entrywise deviation between the monodromy data of two systems,
    computed in a shared loop frame (same base point, cut direction and
    staging line for both).

    Both systems are continued in the frame normalized at infinity, which is
    unique for non-integer ``theta_inf``, so matrices compare directly.  The
    comparison is meaningful when the motion between the two configurations
    does not braid a pole across another pole's approach rail; a common cut
    direction separating the union of both pole sets is chosen to that end.
    """
    if basis is not None:
        b0 = b1 = basis
    else:
        b0, b1 = shared_basis(sys_before.poles, sys_after.poles)
    d0 = compute_monodromy(sys_before, b0, opts)
    d1 = compute_monodromy(sys_after, b1, opts)
    worst = norm(d0.m_inf - d1.m_inf)
    for a, b in zip(d0.matrices, d1.matrices):
        worst = max(worst, norm(a - b))
    return float(worst)
