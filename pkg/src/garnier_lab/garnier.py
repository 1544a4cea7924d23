"""Hamiltonian form of the deformation flow in pole/root coordinates.

The moving-pole system is equivalent, on the open locus where the upper-right
numerator has simple roots, to a coupled Hamiltonian system in the root
coordinates (nu, rho) produced by :func:`garnier_lab.fuchsian.garnier_coordinates`.
This module implements that Hamiltonian, its exact gradients, the flow driven
by a pole path, the discrete symmetries that permute the distinguished poles,
and the scalar (n = 1) reduction to the standard sixth Painleve equation with
its parameter-space classification.

Conventions:

* states carry the full pole tuple; only the first ``n`` poles may move, and
  the symmetry maps additionally require the normalized chart where the two
  anchor poles sit at 0 and 1;
* ``rho`` is the momentum conjugate to ``nu`` with the sign fixed by
  ``rho_k = sum_m (A_m[0,0] + theta_m/2)/(nu_k - u_m)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment

from . import GarnierLabError
from .fuchsian import FuchsianSystem, garnier_coordinates
from .monodromy import IntegratorOptions
from .schlesinger import DeformationPath, FlowError

__all__ = [
    "GarnierError",
    "GarnierState",
    "state_from_system",
    "kappa",
    "hamiltonian",
    "hamiltonian_gradients",
    "garnier_flow",
    "track_roots",
    "symmetry_T",
    "PviParameters",
    "pvi_from_theta",
    "pvi_residual",
    "okamoto_w",
    "ParameterClassification",
    "classify_parameters",
]


class GarnierError(GarnierLabError):
    """Raised for invalid states or degenerate root configurations."""


_COLLISION_TOL = 1e-11


@dataclass(frozen=True)
class GarnierState:
    """Root coordinates plus the pole/exponent data the Hamiltonian needs.

    ``nu`` and ``rho`` have length n; ``poles`` and ``theta`` have length
    n + 2 (the last two entries are the anchor poles, normally 0 and 1).
    """

    nu: np.ndarray
    rho: np.ndarray
    poles: np.ndarray
    theta: np.ndarray
    theta_inf: complex

    def __post_init__(self) -> None:
        nu = np.asarray(self.nu, dtype=complex).copy()
        rho = np.asarray(self.rho, dtype=complex).copy()
        poles = np.asarray(self.poles, dtype=complex).copy()
        theta = np.asarray(self.theta, dtype=complex).copy()
        if nu.ndim != 1 or rho.shape != nu.shape:
            raise GarnierError("nu and rho must be 1-d arrays of equal length")
        if poles.ndim != 1 or poles.shape[0] != nu.shape[0] + 2:
            raise GarnierError("poles must have length n + 2")
        if theta.shape != poles.shape:
            raise GarnierError("theta must have the same length as poles")
        for arr in (nu, rho, poles, theta):
            arr.flags.writeable = False
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "theta_inf", complex(self.theta_inf))

    @property
    def n(self) -> int:
        return self.nu.shape[0]

    def with_coordinates(self, nu: np.ndarray, rho: np.ndarray) -> "GarnierState":
        return GarnierState(nu, rho, self.poles, self.theta, self.theta_inf)

    def require_normalized(self, tol: float = 1e-10) -> None:
        """Error unless the two anchor poles sit at 0 and 1."""
        if abs(self.poles[-2]) > tol or abs(self.poles[-1] - 1.0) > tol:
            raise GarnierError(
                "operation requires the anchor poles at 0 and 1, got "
                f"{self.poles[-2]} and {self.poles[-1]}"
            )


def state_from_system(sys: FuchsianSystem, tol: float = 1e-8) -> GarnierState:
    """Read off the root coordinates of a system and package them as a state."""
    coords = garnier_coordinates(sys, tol=tol)
    return GarnierState(coords.nu, coords.rho, sys.poles, sys.theta, sys.theta_inf)


def kappa(theta: Sequence[complex], theta_inf: complex) -> complex:
    """Constant term of the per-root energy.

    The (theta_inf - 1)^2 form is forced by consistency with the moving-pole
    flow: the root of the upper-right numerator satisfies the scalar equation
    whose leading parameter is (theta_inf - 1)^2 / 2, and the zero-momentum
    locus of triangular systems (theta_inf = sum theta) must be invariant,
    which pins the sign of the shift.  See tests for the numerical check.
    """
    total = complex(np.sum(np.asarray(theta, dtype=complex)))
    return 0.25 * ((total - 1.0) ** 2 - (complex(theta_inf) - 1.0) ** 2)


def _check_separation(state: GarnierState) -> None:
    nu = state.nu
    diff_pole = np.abs(nu[:, None] - state.poles[None, :])
    if diff_pole.min() < _COLLISION_TOL:
        raise GarnierError("a root collided with a pole")
    if state.n > 1:
        diff = np.abs(nu[:, None] - nu[None, :])
        np.fill_diagonal(diff, np.inf)
        if diff.min() < _COLLISION_TOL:
            raise GarnierError("two roots collided")


def _energy_pieces(state: GarnierState, i: int, kappa_value: complex):
    """Per-root weights and energies for the flow in direction of pole i."""
    nu, rho, u = state.nu, state.rho, state.poles
    n = state.n
    theta = state.theta

    # W_{ik}: product formula, assembled from pairwise differences.
    lam_at_ui = np.prod(u[i] - nu)
    tp_i = np.prod(np.delete(u[i] - u, i))

    t_at_nu = np.prod(nu[:, None] - u[None, :], axis=1)
    if n > 1:
        pair = nu[:, None] - nu[None, :]
        np.fill_diagonal(pair, 1.0)
        lamp = np.prod(pair, axis=1)
    else:
        lamp = np.ones(1, dtype=complex)

    w = lam_at_ui * t_at_nu / (tp_i * (nu - u[i]) * lamp)

    delta = np.zeros(u.shape[0], dtype=complex)
    delta[i] = 1.0
    g = np.sum((theta - delta)[None, :] / (nu[:, None] - u[None, :]), axis=1)
    g2 = np.sum((theta - delta)[None, :] / (nu[:, None] - u[None, :]) ** 2, axis=1)

    anchor = 1.0 / ((nu - u[-2]) * (nu - u[-1]))
    energy = rho**2 - g * rho + kappa_value * anchor
    return w, g, g2, anchor, energy


def hamiltonian(state: GarnierState, i: int, kappa_value: complex | None = None) -> complex:
    """Value of the Hamiltonian generating motion of pole ``i`` (0-based, < n)."""
    if not 0 <= i < state.n:
        raise GarnierError(f"moving pole index {i} out of range for n={state.n}")
    _check_separation(state)
    if kappa_value is None:
        kappa_value = kappa(state.theta, state.theta_inf)
    w, _, _, _, energy = _energy_pieces(state, i, kappa_value)
    return complex(-np.sum(w * energy))


def hamiltonian_gradients(
    state: GarnierState, i: int, kappa_value: complex | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Exact (dK/dnu, dK/drho) for the Hamiltonian of moving pole ``i``."""
    if not 0 <= i < state.n:
        raise GarnierError(f"moving pole index {i} out of range for n={state.n}")
    _check_separation(state)
    if kappa_value is None:
        kappa_value = kappa(state.theta, state.theta_inf)
    nu, rho, u = state.nu, state.rho, state.poles
    n = state.n
    w, g, g2, anchor, energy = _energy_pieces(state, i, kappa_value)

    d_rho = -w * (2.0 * rho - g)

    # dW_{ik}/dnu_j splits into the k != j part (only Lambda(u_i) and
    # Lambda'(nu_k) see nu_j) and the k = j part, where the u_i factors cancel.
    d_nu = np.zeros(n, dtype=complex)
    we = w * energy
    for j in range(n):
        cross = 0.0 + 0.0j
        for k in range(n):
            if k == j:
                continue
            cross += we[k] * (1.0 / (nu[k] - nu[j]) - 1.0 / (u[i] - nu[j]))
        own_log = np.sum(1.0 / (nu[j] - u))
        if n > 1:
            own_log -= np.sum(1.0 / (nu[j] - np.delete(nu, j)))
        d_energy = g2[j] * rho[j] - kappa_value * anchor[j] * (
            1.0 / (nu[j] - u[-2]) + 1.0 / (nu[j] - u[-1])
        )
        d_nu[j] = -cross - we[j] * own_log - w[j] * d_energy
    return d_nu, d_rho


def garnier_flow(
    state: GarnierState,
    path: DeformationPath,
    opts: IntegratorOptions = IntegratorOptions(),
    n_samples: int = 0,
    kappa_value: complex | None = None,
):
    """Integrate the Hamiltonian flow of (nu, rho) along a pole path.

    ``path`` holds full pole tuples (length n + 2); only the first n entries
    may move.  Returns the final state, or (final, samples) with
    ``samples = [(t, GarnierState), ...]`` when ``n_samples > 0``.
    """
    n = state.n
    wps = np.asarray(path.waypoints, dtype=complex)
    if wps.shape[1] != n + 2:
        raise FlowError(
            f"path width {wps.shape[1]} does not match state (n + 2 = {n + 2})"
        )
    if np.max(np.abs(wps[0] - state.poles)) > 1e-9 * max(
        1.0, float(np.max(np.abs(state.poles)))
    ):
        raise FlowError("path does not start at the state's pole configuration")
    moving = path.moving_indices()
    if any(m >= n for m in moving):
        raise FlowError("anchor poles (last two) must stay fixed along the path")
    path.require_clear()
    if kappa_value is None:
        kappa_value = kappa(state.theta, state.theta_inf)

    if path.length() == 0.0:
        if n_samples > 0:
            return state, [(0.0, state)]
        return state

    def pack(nu: np.ndarray, rho: np.ndarray) -> np.ndarray:
        return np.concatenate([nu, rho])

    def unpack(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return y[:n], y[n:]

    nu, rho = state.nu.copy(), state.rho.copy()
    samples: list[tuple[float, GarnierState]] = []
    n_seg = wps.shape[0] - 1
    want = (
        np.linspace(0.0, 1.0, n_samples) if n_samples > 0 else np.empty(0)
    )

    for s in range(n_seg):
        start, end = wps[s], wps[s + 1]
        vel = end - start

        def rhs(t: float, y: np.ndarray) -> np.ndarray:
            cur_nu, cur_rho = unpack(y)
            cur = GarnierState(
                cur_nu, cur_rho, start + t * vel, state.theta, state.theta_inf
            )
            d_nu_t = np.zeros(n, dtype=complex)
            d_rho_t = np.zeros(n, dtype=complex)
            for idx in moving:
                d_nu, d_rho = hamiltonian_gradients(cur, idx, kappa_value)
                d_nu_t += vel[idx] * d_rho
                d_rho_t -= vel[idx] * d_nu
            return pack(d_nu_t, d_rho_t)

        seg_times = [
            float(t * n_seg - s)
            for t in want
            if s <= t * n_seg <= s + 1 and not (s > 0 and t * n_seg == s)
        ]
        try:
            sol = solve_ivp(
                rhs,
                (0.0, 1.0),
                pack(nu, rho),
                method=opts.method,
                rtol=opts.rtol,
                atol=opts.atol,
                dense_output=bool(seg_times),
            )
        except GarnierError as exc:
            raise FlowError(f"root flow degenerated on segment {s}: {exc}") from exc
        if not sol.success:
            raise FlowError(f"root flow failed on segment {s}: {sol.message}")
        for t_loc in seg_times:
            y_loc = sol.sol(t_loc)
            nu_s, rho_s = unpack(y_loc)
            samples.append(
                (
                    (s + t_loc) / n_seg,
                    GarnierState(
                        nu_s, rho_s, start + t_loc * vel, state.theta, state.theta_inf
                    ),
                )
            )
        nu, rho = unpack(sol.y[:, -1])

    final = GarnierState(nu, rho, wps[-1], state.theta, state.theta_inf)
    if n_samples > 0:
        return final, samples
    return final


def track_roots(reference: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Reorder ``values`` to follow ``reference`` by nearest-distance matching."""
    ref = np.asarray(reference, dtype=complex)
    val = np.asarray(values, dtype=complex)
    if ref.shape != val.shape or ref.ndim != 1:
        raise GarnierError("track_roots needs two 1-d arrays of equal length")
    cost = np.abs(ref[:, None] - val[None, :])
    rows, cols = linear_sum_assignment(cost)
    out = np.empty_like(val)
    out[rows] = val[cols]
    return out


def symmetry_T(state: GarnierState, which: int | str) -> GarnierState:
    """Discrete symmetry exchanging a distinguished pole with an anchor.

    ``which``:

    * an int j in [0, n): the affine map sending pole j to 0 (the anchors
      must sit at 0 and 1), exchanging theta_j with the 0-anchor's theta;
    * ``"one"``: the map 1 - lambda, exchanging the two anchors;
    * ``"infinity"``: the map lambda/(lambda - 1), exchanging the 1-anchor
      with infinity (thetas shift by 1 across that exchange).

    All three are involutions on states.
    """
    state.require_normalized()
    nu, rho, u, theta = state.nu, state.rho, state.poles, state.theta
    n = state.n

    if isinstance(which, int):
        if not 0 <= which < n:
            raise GarnierError(f"pole index {which} out of range for n={n}")
        d = u[which] - 1.0
        if abs(d) < 1e-12 or abs(u[which]) < 1e-12:
            raise GarnierError("pole swap is singular when the pole sits at 0 or 1")
        new_nu = (u[which] - nu) / d
        new_rho = -d * rho
        new_u = u.copy()
        new_u[:n] = (u[which] - u[:n]) / d
        new_u[which] = u[which] / d
        new_u[-2], new_u[-1] = 0.0, 1.0
        new_theta = theta.copy()
        new_theta[which], new_theta[-2] = theta[-2], theta[which]
        return GarnierState(new_nu, new_rho, new_u, new_theta, state.theta_inf)

    if which == "one":
        new_u = u.copy()
        new_u[:n] = 1.0 - u[:n]
        new_theta = theta.copy()
        new_theta[-2], new_theta[-1] = theta[-1], theta[-2]
        return GarnierState(1.0 - nu, -rho, new_u, new_theta, state.theta_inf)

    if which == "infinity":
        if np.min(np.abs(nu - 1.0)) < 1e-12 or np.min(np.abs(u[:n] - 1.0)) < 1e-12:
            raise GarnierError("infinity swap is singular at lambda = 1")
        # Constant fixed by flow equivariance (see tests): with the exponent
        # exchange theta_[-1] -> theta_inf - 1, theta_inf -> theta_[-1] + 1,
        # the momentum correction must use (sum of all exponents - 2)/2.
        c = (np.sum(theta) + state.theta_inf - 2.0) / 2.0
        new_nu = nu / (nu - 1.0)
        new_rho = -((nu - 1.0) ** 2) * rho + c * (nu - 1.0)
        new_u = u.copy()
        new_u[:n] = u[:n] / (u[:n] - 1.0)
        new_theta = theta.copy()
        new_theta[-1] = state.theta_inf - 1.0
        new_theta_inf = theta[-1] + 1.0
        return GarnierState(new_nu, new_rho, new_u, new_theta, new_theta_inf)

    raise GarnierError(f"unknown symmetry {which!r}")


@dataclass(frozen=True)
class PviParameters:
    """Parameters of the scalar second-order equation for n = 1."""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    b: tuple[complex, complex, complex, complex]


def pvi_from_theta(theta: Sequence[complex], theta_inf: complex) -> PviParameters:
    """Map (theta_1, theta_2, theta_3, theta_inf) to scalar-equation parameters.

    Pole labels: theta_1 at the moving pole x, theta_2 at 0, theta_3 at 1.
    """
    t = [complex(v) for v in theta]
    if len(t) != 3:
        raise GarnierError("pvi parameters need exactly three finite exponents")
    ti = complex(theta_inf)
    alpha = (ti - 1.0) ** 2 / 2.0
    beta = -(t[1] ** 2) / 2.0
    gamma = t[2] ** 2 / 2.0
    delta = (1.0 - t[0] ** 2) / 2.0
    # The shift coordinates pair the exponents at the fixed poles 0 and 1
    # (b_1, b_2) and the moving-pole exponent with theta_inf (b_3, b_4).
    # This binding is what makes the involution shifts in okamoto_w carry the
    # residue of the matching pole: b1 + b2 sits at y = 0, b3 + b4 + 1 at
    # y = x, b1 - b2 at y = 1.
    b = (
        (t[1] + t[2]) / 2.0,
        (t[1] - t[2]) / 2.0,
        (t[0] + ti) / 2.0 - 1.0,
        (t[0] - ti) / 2.0,
    )
    return PviParameters(alpha, beta, gamma, delta, b)


def pvi_residual(
    x: np.ndarray,
    y: np.ndarray,
    y1: np.ndarray,
    y2: np.ndarray,
    params: PviParameters,
) -> np.ndarray:
    """Pointwise defect of samples (x, y, y', y'') in the scalar equation."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    y1 = np.asarray(y1, dtype=complex)
    y2 = np.asarray(y2, dtype=complex)
    lhs = y2
    rhs = (
        0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - x)) * y1**2
        - (1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y - x)) * y1
        + y * (y - 1.0) * (y - x) / (x**2 * (x - 1.0) ** 2)
        * (
            params.alpha
            + params.beta * x / y**2
            + params.gamma * (x - 1.0) / (y - 1.0) ** 2
            + params.delta * x * (x - 1.0) / (y - x) ** 2
        )
    )
    return np.abs(lhs - rhs)


def okamoto_w(
    y: complex, p: complex, x: complex, b: Sequence[complex], which: int
) -> tuple[complex, complex, tuple[complex, complex, complex, complex]]:
    """Birational involutions on (y, p, b) used to move between parameter strata.

    ``which`` selects the generator (0, 1, 3 or 4); the remaining generator of
    the full symmetry group does not act on (y, p) by a function of this form
    and is rejected.
    """
    b1, b2, b3, b4 = (complex(v) for v in b)
    y, p, x = complex(y), complex(p), complex(x)
    if which == 0:
        return y, p - (b3 + b4 + 1.0) / (y - x), (b1, b2, -1.0 - b4, -1.0 - b3)
    if which == 1:
        return y, p - (b1 - b2) / (y - 1.0), (b2, b1, b3, b4)
    if which == 3:
        return y, p, (b1, b2, b4, b3)
    if which == 4:
        return y, p - (b1 + b2) / y, (-b2, -b1, b3, b4)
    if which == 2:
        raise GarnierError(
            "generator 2 is not a pointwise map of (y, p); apply it at the "
            "level of parameter classification instead"
        )
    raise GarnierError(f"unknown involution index {which}")


@dataclass(frozen=True)
class ParameterClassification:
    """Which special parameter strata a b-tuple belongs to.

    ``witnesses`` lists the (root, nearest_integer, distance) triples whose
    pairing with b is within tolerance of an integer; ``rank`` is the rank of
    the witness root set.
    """

    witnesses: tuple[tuple[tuple[int, int, int, int], int, float], ...]
    rank: int
    in_m: bool
    in_p: bool
    in_l: bool
    in_d: bool


_ROOT_VECTORS: list[tuple[int, int, int, int]] = []
for _i in range(4):
    for _j in range(_i + 1, 4):
        for _s in (1, -1):
            v = [0, 0, 0, 0]
            v[_i], v[_j] = 1, _s
            _ROOT_VECTORS.append(tuple(v))


def classify_parameters(
    b: Sequence[complex], int_tol: float = 1e-9
) -> ParameterClassification:
    """Detect integer pairings of b with the length-root system of rank four."""
    bv = np.asarray([complex(v) for v in b])
    if bv.shape != (4,):
        raise GarnierError("classification needs a 4-tuple b")
    witnesses = []
    vecs = []
    for root in _ROOT_VECTORS:
        val = complex(np.dot(np.asarray(root, dtype=float), bv))
        nearest = round(val.real)
        dist = abs(val - nearest)
        if dist <= int_tol:
            witnesses.append((root, int(nearest), float(dist)))
            vecs.append(root)
    rank = int(np.linalg.matrix_rank(np.asarray(vecs, dtype=float))) if vecs else 0
    return ParameterClassification(
        witnesses=tuple(witnesses),
        rank=rank,
        in_m=rank >= 1,
        in_p=rank >= 2,
        in_l=rank >= 3,
        in_d=rank >= 4,
    )
