"""Explicit solution families of the scalar moving-pole equation.

Every family in this module is verified sample by sample against the scalar
second-order equation (plus a family-specific side constraint) before it is
handed back.  The families:

* ``reducible_riccati_solution``  the one-parameter family attached to
  reducible monodromy, on the locus ``theta_inf = -(t1 + t2 + t3)``, built
  from closed-form solutions of a Gauss-type linear equation;
* ``chazy_solution``              the degenerate-local-monodromy family
  normalized to ``theta_inf = -1``, cut out by a quartic momentum relation
  (``chazy_constraint``) and constructed by flowing along that locus;
* ``riccati_type_solution``       the quadratic first-order family
  normalized to ``theta_inf = 2``;
* ``forbidden_solution``          the constant branches attached to a
  trivial local monodromy matrix;
* ``lauricella_locus_flow``       the zero-momentum invariant locus of the
  Hamiltonian flow in any number of moving poles.

Exponent labels for the scalar families are always ordered ``(t1, t2, t3)``
with ``t1`` at the pole 0, ``t2`` at the moving pole ``x`` and ``t3`` at 1.

Solutions are exported as a JSON header plus a CSV sample table; export is
refused when the verification residuals exceed the family tolerance.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import GarnierLabError
from .fuchsian import FuchsianSystem, build_triangular_family
from .garnier import (
    GarnierState,
    PviParameters,
    garnier_flow,
    kappa,
    pvi_from_theta,
    pvi_residual,
)
from .monodromy import IntegratorOptions, compute_monodromy, thread_count
from .schlesinger import DeformationPath

__all__ = [
    "ClassicalError",
    "ClassicalSolution",
    "HypergeometricSamples",
    "LocusFlow",
    "FAMILY_TOLERANCES",
    "hypergeometric_series",
    "solve_hypergeometric",
    "pvi_momentum",
    "reducible_riccati_solution",
    "associated_triangular_system",
    "associated_fuchsian_system",
    "chazy_solution",
    "chazy_constraint",
    "riccati_type_solution",
    "forbidden_solution",
    "lauricella_locus_flow",
    "export_solution",
]


class ClassicalError(GarnierLabError):
    pass


FAMILY_TOLERANCES = {
    "reducible_riccati": 1e-8,
    "generalized_chazy": 1e-6,
    "riccati_type": 1e-6,
    "forbidden": 1e-12,
    "lauricella_locus": 1e-8,
}

_FIXED_SINGULAR = (0.0, 1.0)


# ---------------------------------------------------------------------------
# solution container and export


@dataclass(frozen=True)
class ClassicalSolution:
    """A verified member of one of the explicit families, sampled along a path.

    ``residuals`` holds the per-sample defect in the scalar second-order
    equation; ``aux_residuals`` holds the family-specific side checks (the
    first-order equation, the momentum constraint, ...) with their own
    tolerances in ``aux_tolerances``.  ``dropped`` lists ``(index, x, reason)``
    for requested samples that had to be discarded (movable poles, samples on
    the coordinate singularities of the residual formula).
    """

    family: str
    parameters: dict
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    residuals: np.ndarray
    tolerance: float
    aux_residuals: dict = field(default_factory=dict)
    aux_tolerances: dict = field(default_factory=dict)
    dropped: tuple = ()

    def __post_init__(self):
        for name in ("x", "y", "p"):
            arr = np.asarray(getattr(self, name), dtype=complex).reshape(-1)
            object.__setattr__(self, name, arr)
        res = np.asarray(self.residuals, dtype=float).reshape(-1)
        object.__setattr__(self, "residuals", res)
        if not (self.x.size == self.y.size == self.p.size == res.size):
            raise ClassicalError("sample columns have inconsistent lengths")

    @property
    def residual_summary(self) -> dict:
        out = {
            "max": float(np.max(self.residuals)) if self.residuals.size else np.inf,
            "median": float(np.median(self.residuals)) if self.residuals.size else np.inf,
        }
        for key, val in self.aux_residuals.items():
            out[key] = float(val)
        return out

    @property
    def verified(self) -> bool:
        if self.residuals.size == 0:
            return False
        if float(np.max(self.residuals)) > self.tolerance:
            return False
        for key, val in self.aux_residuals.items():
            if float(val) > self.aux_tolerances.get(key, self.tolerance):
                return False
        return True


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.complexfloating,)):
        v = complex(value)
        return [v.real, v.imag]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def export_solution(sol: ClassicalSolution, directory, stem: str | None = None):
    """Write ``<stem>.json`` (header) and ``<stem>.csv`` (samples).

    Refuses to write anything when the solution fails its verification
    tolerances: unverified constructions are not exportable artifacts.
    Returns the two paths written.
    """
    if sol.residuals.size == 0:
        raise ClassicalError("refusing export: the solution has no samples")
    if not sol.verified:
        raise ClassicalError(
            "refusing export: residual summary "
            f"{sol.residual_summary} exceeds tolerance {sol.tolerance:g}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or sol.family
    json_path = directory / f"{stem}.json"
    csv_path = directory / f"{stem}.csv"
    header = {
        "format": "classical-v1",
        "family": sol.family,
        "parameters": _jsonable(sol.parameters),
        "tolerance": sol.tolerance,
        "aux_tolerances": _jsonable(sol.aux_tolerances),
        "residual_summary": _jsonable(sol.residual_summary),
        "samples": int(sol.x.size),
        "dropped": [
            {"index": int(i), "x": _jsonable(complex(z)), "reason": str(r)}
            for i, z, r in sol.dropped
        ],
        "csv": csv_path.name,
    }
    json_path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    with csv_path.open("w") as fh:
        fh.write("x_re,x_im,y_re,y_im,p_re,p_im,residual\n")
        for x, y, p, r in zip(sol.x, sol.y, sol.p, sol.residuals):
            cells = (x.real, x.imag, y.real, y.imag, p.real, p.imag, r)
            fh.write(",".join(f"{v:.17g}" for v in cells) + "\n")
    return json_path, csv_path


# ---------------------------------------------------------------------------
# linear building block: the Gauss equation along paths


def hypergeometric_series(a, b, c, x, terms: int = 80):
    """Partial sum of the Gauss series and its derivative at ``x``.

    Plain power-series evaluation, intended for base points well inside the
    unit disk; the continuation machinery takes over from there.
    """
    a, b, c, x = complex(a), complex(b), complex(c), complex(x)
    if abs(c.imag) < 1e-12 and abs(c.real - round(c.real)) < 1e-12 and round(c.real) <= 0:
        raise ClassicalError(
            f"series undefined: lower parameter {c} is a nonpositive integer")
    if abs(x) > 0.6:
        raise ClassicalError(
            f"series evaluation at |x| = {abs(x):.3f} > 0.6 would not converge "
            "reliably; start the path closer to the origin or pass init=")
    coeff = 1.0 + 0j
    val = coeff
    dval = 0.0 + 0j
    xpow = 1.0 + 0j  # x**(k-1) when the loop body runs for k
    for k in range(1, terms + 1):
        coeff *= (a + k - 1.0) * (b + k - 1.0) / ((c + k - 1.0) * k)
        dval += k * coeff * xpow
        xpow *= x
        val += coeff * xpow
    return val, dval


def _gauss_rhs(a, b, c):
    """First-order form of the Gauss equation for the state ``(u, u')``."""
    def rhs(x, s):
        u, du = s
        ddu = (((a + b + 1.0) * x - c) * du + a * b * u) / (x * (1.0 - x))
        return np.array([du, ddu], dtype=complex)
    return rhs


def _raw_rhs(q1: Callable, q0: Callable):
    def rhs(x, s):
        u, du = s
        return np.array([du, q1(x) * du + q0(x) * u], dtype=complex)
    return rhs


def _segment_distance(z0: complex, z1: complex, s: complex) -> float:
    d = z1 - z0
    nn = abs(d) ** 2
    if nn == 0.0:
        return abs(s - z0)
    t = (np.conj(d) * (s - z0)).real / nn
    t = min(max(t, 0.0), 1.0)
    return abs(z0 + t * d - s)


def _check_segment(z0: complex, z1: complex, clearance: float):
    for s in _FIXED_SINGULAR:
        dist = _segment_distance(z0, z1, s)
        if dist < clearance:
            raise ClassicalError(
                f"integration path passes within {dist:.2e} of the fixed "
                f"singular point {s:g} (clearance {clearance:g})")


def _advance(rhs, z0: complex, z1: complex, state, rtol, atol, clearance):
    """Continue a state of ``ds/dx = rhs(x, s)`` along the segment z0 -> z1."""
    if z0 == z1:
        return np.asarray(state, dtype=complex)
    _check_segment(z0, z1, clearance)
    dz = z1 - z0

    def rhs_t(t, s):
        return rhs(z0 + t * dz, s) * dz

    sol = solve_ivp(rhs_t, (0.0, 1.0), np.asarray(state, dtype=complex),
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise ClassicalError(
            f"linear continuation failed between {z0} and {z1}: {sol.message}")
    return sol.y[:, -1]


def _chain(rhs, points, state, rtol, atol, clearance):
    """States at every point of a piecewise-linear route, including the start."""
    out = [np.asarray(state, dtype=complex)]
    for z0, z1 in zip(points[:-1], points[1:]):
        out.append(_advance(rhs, z0, z1, out[-1], rtol, atol, clearance))
    return out


@dataclass(frozen=True)
class HypergeometricSamples:
    """Values ``(u, u', u'')`` of a continued solution at the path waypoints."""

    x: np.ndarray
    u: np.ndarray
    du: np.ndarray
    ddu: np.ndarray


def solve_hypergeometric(coeffs, x_path, init=None, *, rtol: float = 1e-12,
                         atol: float = 1e-14, series_terms: int = 80,
                         clearance: float = 1e-3) -> HypergeometricSamples:
    """Continue a solution of a Gauss-type equation along a waypoint path.

    ``coeffs`` is either the parameter triple ``(a, b, c)`` or a pair of
    callables ``(q1, q0)`` defining ``u'' = q1(x) u' + q0(x) u``.  ``init``
    gives ``(u, u')`` at the first waypoint; when omitted (parameter-triple
    form only) the principal series solution is summed at the first waypoint,
    which must lie within radius 0.5 of the origin.  The second derivative
    in the output is recomputed from the equation itself.
    """
    pts = [complex(z) for z in x_path]
    if len(pts) < 1:
        raise ClassicalError("x_path must contain at least one point")
    triple = None
    if len(coeffs) == 3 and not any(callable(f) for f in coeffs):
        a, b, c = (complex(v) for v in coeffs)
        triple = (a, b, c)
        rhs = _gauss_rhs(a, b, c)
    elif len(coeffs) == 2 and all(callable(f) for f in coeffs):
        rhs = _raw_rhs(*coeffs)
    else:
        raise ClassicalError(
            "coeffs must be (a, b, c) numbers or (q1, q0) callables")
    if init is None:
        if triple is None:
            raise ClassicalError("raw coefficient form requires init=(u, u')")
        if abs(pts[0]) > 0.5:
            raise ClassicalError(
                "series initialization needs the path to start within "
                "|x| <= 0.5; pass init=(u, u') instead")
        u0, du0 = hypergeometric_series(*triple, pts[0], series_terms)
    else:
        u0, du0 = (complex(v) for v in init)
    states = _chain(rhs, pts, np.array([u0, du0], dtype=complex),
                    rtol, atol, clearance)
    xs = np.asarray(pts, dtype=complex)
    us = np.array([s[0] for s in states])
    dus = np.array([s[1] for s in states])
    ddus = np.array([rhs(x, s)[1] for x, s in zip(xs, states)])
    return HypergeometricSamples(xs, us, dus, ddus)


# ---------------------------------------------------------------------------
# shared helpers for the scalar families


def _pvi_params(theta, theta_inf) -> PviParameters:
    """Scalar-equation parameters from family labels (t1 at 0, t2 at x, t3 at 1).

    The scalar module orders its exponents moving-pole first, so the first
    two labels swap places.
    """
    t1, t2, t3 = (complex(v) for v in theta)
    return pvi_from_theta((t2, t1, t3), theta_inf)


def pvi_momentum(y, dy, x, theta):
    """Conjugate momentum reconstructed from a solution value and slope.

    ``theta`` lists the exponents at the poles 0, x, 1.  On the zero-momentum
    locus this collapses to the pure partial-fraction sum
    ``t1/y + t2/(y-x) + t3/(y-1)`` carried by the reducible family.
    """
    t1, t2, t3 = (complex(v) for v in theta)
    y = np.asarray(y, dtype=complex)
    dy = np.asarray(dy, dtype=complex)
    x = np.asarray(x, dtype=complex)
    prod = y * (y - 1.0) * (y - x)
    return 0.5 * (x * (x - 1.0) * dy / prod - 1.0 / (y - x)
                  + t1 / y + t2 / (y - x) + t3 / (y - 1.0))


def _degenerate_reason(x: complex, y: complex) -> str | None:
    """Reason a sample cannot enter the residual checks, or None if it can."""
    if not np.isfinite(y.real) or not np.isfinite(y.imag) or abs(y) > 1e8:
        return "movable pole: the solution value diverges here"
    scale = max(1.0, abs(y))
    if abs(y) < 1e-8 * scale:
        return "solution value at the singular chart point 0"
    if abs(y - 1.0) < 1e-8 * scale:
        return "solution value at the singular chart point 1"
    if abs(y - x) < 1e-8 * scale:
        return "solution collides with the moving pole"
    return None


def _map_samples(fn, items):
    workers = thread_count()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def _quotient_jet(nv, n1, n2, dv, d1, d2):
    """Value and two derivatives of N/D from total derivatives of N and D."""
    y = nv / dv
    y1 = (n1 - y * d1) / dv
    y2 = (n2 - y * d2 - 2.0 * y1 * d1) / dv
    return y, y1, y2


def _default_samples():
    return np.linspace(0.15, 0.85, 20).astype(complex)


# ---------------------------------------------------------------------------
# reducible-monodromy family


def reducible_riccati_solution(theta, mix=0.0, x_samples=None, *,
                               base_point: complex = 0.1,
                               rtol: float = 1e-12, atol: float = 1e-14,
                               series_terms: int = 80,
                               clearance: float = 1e-3) -> ClassicalSolution:
    """One-parameter solvable family on the locus ``theta_inf = -(t1+t2+t3)``.

    The solution is carried by a logarithmic derivative of
    ``u = u_base + mix * u_second`` where the two ``u``'s span the solution
    space of the associated Gauss equation: ``y`` and both of its derivatives
    come out in closed form, so the first-order defect and the second-order
    defect are exact side-by-side checks rather than one being derived from
    the other.
    """
    t1, t2, t3 = (complex(v) for v in theta)
    total = t1 + t2 + t3
    if abs(1.0 + total) < 1e-10:
        raise ClassicalError(
            "family degenerates when 1 + t1 + t2 + t3 = 0 (the denominator "
            "of the solution formula vanishes identically)")
    theta_inf = -total
    a, b, c = 1.0 + t2, 2.0 + total, 2.0 + t1 + t2
    if x_samples is None:
        x_samples = _default_samples()
    pts = [complex(z) for z in x_samples]

    zb = complex(base_point)
    u1, du1 = hypergeometric_series(a, b, c, zb, series_terms)
    # second spanning solution: the shifted-exponent branch x^(1-c) * series
    a2, b2, c2 = a - c + 1.0, b - c + 1.0, 2.0 - c
    g, dg = hypergeometric_series(a2, b2, c2, zb, series_terms)
    pw = zb ** (1.0 - c)
    u2 = pw * g
    du2 = (1.0 - c) * zb ** (-c) * g + pw * dg
    wronskian = u1 * du2 - u2 * du1
    if abs(wronskian) < 1e-12 * (abs(u1) + abs(u2)) * (abs(du1) + abs(du2) + 1.0):
        raise ClassicalError(
            "the two base solutions are not independent at the base point; "
            "the exponent configuration is degenerate")
    nu = complex(mix)
    state0 = np.array([u1 + nu * u2, du1 + nu * du2], dtype=complex)

    rhs = _gauss_rhs(a, b, c)
    states = _chain(rhs, [zb] + pts, state0, rtol, atol, clearance)[1:]

    params = _pvi_params((t1, t2, t3), theta_inf)
    c0 = 1.0 + total
    apb1 = a + b + 1.0
    kept, dropped = [], []
    for idx, (x, s) in enumerate(zip(pts, states)):
        u, du = s
        if abs(u) < 1e-12 * (abs(u) + abs(du)):
            dropped.append((idx, x, "movable pole: u vanishes"))
            continue
        v = du / u
        w = (((apb1) * x - c) * v + a * b) / (x * (1.0 - x))  # u''/u
        dv = w - v * v
        dw = ((apb1 * v + (apb1 * x - c) * dv) - w * (1.0 - 2.0 * x)) / (x - x * x)
        ddv = dw - 2.0 * v * dv
        c1 = (1.0 + t1 + t2) - (1.0 + t2) * x
        y = (c1 - (x * x - x) * v) / c0
        dy = (-(1.0 + t2) - (2.0 * x - 1.0) * v - (x * x - x) * dv) / c0
        ddy = (-2.0 * v - 2.0 * (2.0 * x - 1.0) * dv - (x * x - x) * ddv) / c0
        reason = _degenerate_reason(x, y)
        if reason is not None:
            dropped.append((idx, x, reason))
            continue
        ric_rhs = ((1.0 + total) * y * y
                   - ((1.0 + t1 + t2) + (t1 + t3) * x) * y) / (x * (x - 1.0)) \
            + t1 / (x - 1.0)
        ric_res = abs(dy - ric_rhs)
        p = t1 / y + t2 / (y - x) + t3 / (y - 1.0)
        res = float(pvi_residual(x, y, dy, ddy, params))
        kept.append((x, y, p, res, ric_res))

    if not kept:
        raise ClassicalError(
            "every requested sample was degenerate; choose other sample "
            "points or another mixing parameter")
    xs, ys, ps, res, ric = (np.array(col) for col in zip(*kept))
    tol = FAMILY_TOLERANCES["reducible_riccati"]
    return ClassicalSolution(
        family="reducible_riccati",
        parameters={
            "theta": [t1, t2, t3],
            "theta_inf": theta_inf,
            "mix": nu,
            "hypergeometric": [a, b, c],
            "base_point": zb,
        },
        x=xs, y=ys, p=ps, residuals=np.abs(res),
        tolerance=tol,
        aux_residuals={"first_order_max": float(np.max(ric))},
        aux_tolerances={"first_order_max": tol},
        dropped=tuple(dropped),
    )


def associated_triangular_system(sol: ClassicalSolution,
                                 index: int = 0) -> FuchsianSystem:
    """Upper-triangular linear system attached to a reducible-family sample.

    The returned system has poles ``(x, 0, 1)``, exponent signs aligned with
    the family and its single spectral coordinate placed at ``y``; its
    monodromy group is reducible, which is the linear-side certificate for
    the family.
    """
    if sol.family != "reducible_riccati":
        raise ClassicalError(
            "only the reducible family carries a triangular linear system")
    t1, t2, t3 = (complex(v) for v in sol.parameters["theta"])
    x = complex(sol.x[index])
    y = complex(sol.y[index])
    theta_inf = complex(sol.parameters["theta_inf"])
    poles = np.array([x, 0.0, 1.0], dtype=complex)
    # upper entries: sum zero and the spectral coordinate at y
    rows = np.array([
        [1.0, 1.0, 1.0],
        [y * (y - 1.0), (y - x) * (y - 1.0), (y - x) * y],
    ], dtype=complex)
    _, _, vh = np.linalg.svd(rows)
    upper = vh[-1].conj()
    return build_triangular_family((t2, t1, t3), (1, 1, 1), theta_inf,
                                   upper=upper, poles=poles)


# ---------------------------------------------------------------------------
# degenerate-local-monodromy family and its momentum constraint


def _chazy_coefficients(y, x, theta, theta_inf):
    """Coefficients (degree 4 down to 0) of the momentum quartic.

    Vectorized over ``y`` and ``x``; the five returned arrays share the
    broadcast shape of the inputs.
    """
    t1, t2, t3 = (complex(v) for v in theta)
    ti = complex(theta_inf)
    y = np.asarray(y, dtype=complex)
    x = np.asarray(x, dtype=complex)
    prod = y * (y - 1.0) * (y - x)
    ssum = t1 * (y - 1.0) * (y - x) + t2 * y * (y - 1.0) + t3 * y * (y - x)
    lin = t1 * (y - 1.0 - x) + t2 * (y + x - 1.0) + t3 * (y + 1.0 - x)
    tsum = t1 + t2 + t3
    b2 = 8.0 * (-prod * (3.0 * y - 1.0 - x) * ti ** 2
                + (y - 1.0) * (y - x) * (3.0 * y * y - 3.0 * y + 2.0 * x
                                         - 3.0 * y * x) * t1 * t1
                + y * (y - 1.0) * (3.0 * y * y - 3.0 * y + x - x * x) * t2 * t2
                + y * (y - x) * (3.0 * y * y - 1.0 + x - 3.0 * y * x) * t3 * t3
                + 6.0 * prod * (t1 * t2 * (y - 1.0) + t1 * t3 * (y - x)
                                + y * t2 * t3))
    b3 = -8.0 * (2.0 * prod * ti ** 3
                 - (3.0 * y - 1.0 - x) * ssum * ti ** 2
                 + lin * tsum * ssum)
    b4 = (tsum - ti) * ((3.0 * y * y - 2.0 * y - 1.0 + 2.0 * x - 2.0 * y * x
                         - x * x) * ti ** 3
                        + ((6.0 * y - 1.0 - 5.0 * y * y - 6.0 * x + 6.0 * y * x
                            - x * x) * t1
                           + (6.0 * y - 1.0 - 5.0 * y * y + 2.0 * x
                              - 2.0 * y * x - x * x) * t2
                           + (2.0 * x - 2.0 * y - 1.0 - 5.0 * y * y
                              + 6.0 * y * x - x * x) * t3) * ti ** 2
                        + (ti + tsum) * lin * lin)
    shape = np.broadcast(y, x).shape
    ones = np.ones(shape, dtype=complex)
    return (16.0 * prod ** 2 * ones, -32.0 * prod * ssum * ones,
            b2 * ones, b3 * ones, b4 * ones)


def chazy_constraint(y, p, x, theta, theta_inf=-1.0,
                     relative: bool = True) -> float:
    """Momentum compatibility quartic of the degenerate family.

    A degree-four polynomial in the momentum ``p`` with coefficients
    polynomial in ``(y, x)`` and the exponents; the leading coefficient is
    ``16 P(y)^2`` with ``P(y) = y (y-1) (y-x)``.  The relation expresses the
    absence of logarithms in the local solution at infinity when the
    exponent there degenerates to ``theta_inf = -1``, and it vanishes
    identically along the degenerate family.  With ``relative=True`` the
    absolute value is normalized by the largest monomial so the result is a
    dimensionless defect.
    """
    p = np.asarray(p, dtype=complex)
    c4, c3, c2, c1, c0 = _chazy_coefficients(y, x, theta, theta_inf)
    terms = np.array([
        c4 * p ** 4,
        c3 * p ** 3,
        c2 * p ** 2,
        c1 * p,
        c0 * np.ones_like(p),
    ])
    value = np.abs(terms.sum(axis=0))
    if relative:
        scale = np.maximum(1.0, np.max(np.abs(terms), axis=0))
        value = value / scale
    return value if value.shape else float(value)


def _pvi_flow_rhs(params: PviParameters):
    """First-order form of the scalar second-order equation for ``(y, y')``."""
    al, be, ga, de = params.alpha, params.beta, params.gamma, params.delta

    def rhs(x, s):
        y, dy = s
        ddy = (0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - x)) * dy * dy
               - (1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y - x)) * dy
               + y * (y - 1.0) * (y - x) / (x * x * (x - 1.0) ** 2)
               * (al + be * x / (y * y) + ga * (x - 1.0) / (y - 1.0) ** 2
                  + de * x * (x - 1.0) / (y - x) ** 2))
        return np.array([dy, ddy], dtype=complex)

    return rhs


def _slope_from_momentum(y, p, x, theta):
    """Inverse of :func:`pvi_momentum`: the slope ``y'`` from ``(y, p)``."""
    t1, t2, t3 = (complex(v) for v in theta)
    prod = y * (y - 1.0) * (y - x)
    return prod / (x * (x - 1.0)) * (2.0 * p + 1.0 / (y - x) - t1 / y
                                     - t2 / (y - x) - t3 / (y - 1.0))


def associated_fuchsian_system(y, p, x, theta, theta_inf) -> FuchsianSystem:
    """The linear system with poles ``(0, x, 1)`` carrying spectral data ``(y, p)``.

    The construction places the zero of the upper-right entry of the matrix
    function ``sum_k A_k / (lam - u_k)`` at ``y``, matches the
    partial-fraction expansion of the momentum on the diagonal, fills the
    lower-left entries from the exponent determinants and fixes the one
    remaining diagonal degree of freedom by the residue at infinity.  For
    generic data the result is the unique such system in the gauge where the
    upper-right entries sum to zero with unit leading behaviour.
    """
    y, p, x = complex(y), complex(p), complex(x)
    ti = complex(theta_inf)
    th = np.asarray([complex(v) for v in theta], dtype=complex)
    us = np.array([0.0, x, 1.0], dtype=complex)
    if min(abs(y - u) for u in us) < 1e-12 * max(1.0, abs(y)):
        raise ClassicalError(
            "spectral value sits on a pole of the linear system")
    w = np.array([(us[k] - y)
                  / np.prod([us[k] - us[m] for m in range(3) if m != k])
                  for k in range(3)], dtype=complex)
    d = np.array([(y - us[0]) * (us[1] - us[2]),
                  (y - us[1]) * (us[2] - us[0]),
                  (y - us[2]) * (us[0] - us[1])], dtype=complex)
    pt = p - np.sum(th / (2.0 * (y - us)))
    rows = np.array([[1.0, 1.0], [1.0 / (y - us[0]), 1.0 / (y - us[1])]],
                    dtype=complex)
    z01 = np.linalg.solve(rows, np.array([-ti / 2.0, pt], dtype=complex))
    z_part = np.array([z01[0], z01[1], 0.0], dtype=complex)
    # the diagonal entries compatible with (y, p) form a line z_part + t*d;
    # the off-diagonal normalization at infinity is linear in t along the
    # line (its quadratic part cancels identically), so one division fixes t
    qb = -2.0 * np.sum(z_part * d / w)
    qc = np.sum((th * th / 4.0 - z_part * z_part) / w)
    if abs(qb) < 1e-13 * max(1.0, abs(qc)):
        raise ClassicalError(
            "degenerate spectral data: the compatibility line misses the "
            "normalization at infinity")
    z = z_part - (qc / qb) * d
    v = (th * th / 4.0 - z * z) / w
    res = np.array([[[z[k], w[k]], [v[k], -z[k]]] for k in range(3)])
    return FuchsianSystem(poles=us, residues=res, theta=th, theta_inf=ti)


_CHAZY_ANCHOR = 0.31 + 0.27j


def chazy_solution(theta, u_choice=0.0, x_samples=None, *, theta_inf=-1.0,
                   base_point: complex = 0.1, branch: int = 0,
                   certify: bool = False, rtol: float = 1e-12,
                   atol: float = 1e-14, clearance: float = 1e-3,
                   stencil: float = 5e-3) -> ClassicalSolution:
    """Degenerate-local-monodromy family normalized to ``theta_inf = -1``.

    The family is exactly the locus where the momentum satisfies the quartic
    relation measured by :func:`chazy_constraint`.  A member is constructed
    by solving the quartic at ``base_point`` and integrating the
    second-order flow to the requested samples; because the flow itself is
    the generic one, the invariance of the quartic along the trajectory
    (reported as ``constraint_max``) is an independent certificate that the
    trajectory stays on the family.

    ``u_choice`` selects the family member through the base value of the
    solution: a scalar shifts the reference anchor by that amount, a pair
    ``(u, u')`` shifts it by the ratio ``u/u'``.  ``branch`` picks one of
    the four momentum roots at the base point (sorted by real part, then
    imaginary part).  With ``certify=True`` the linear system carrying the
    base sample is built via :func:`associated_fuchsian_system` and the
    distance of its monodromy at infinity from ``-1`` is reported as
    ``monodromy_defect``.

    Samples where the solution value degenerates, or that the flow cannot
    reach (movable poles en route), are dropped and reported in ``dropped``.
    Derivatives are measured on a five-point stencil of the continued flow.
    """
    ti = complex(theta_inf)
    if abs(ti + 1.0) > 1e-12:
        if abs(ti - 1.0) < 1e-12:
            raise ClassicalError(
                "theta_inf = 1 does not carry this family: the degenerate "
                "monodromy forces the constant solution at infinity "
                "(a forbidden branch)")
        raise ClassicalError(
            "this family is constructed in the theta_inf = -1 normalization; "
            "move other odd exponents there with the exponent-shift maps")
    t1, t2, t3 = (complex(v) for v in theta)
    # second-order linear carrier of the family, kept as metadata
    c = 1.0 - t3
    apb = 1.0 - t1 - t3
    a = (apb + t2) / 2.0
    b = (apb - t2) / 2.0
    if x_samples is None:
        x_samples = _default_samples()
    pts = [complex(z) for z in x_samples]

    zb = complex(base_point)
    if np.ndim(u_choice) == 0:
        shift = complex(u_choice)
        choice_record = shift
    else:
        u0, du0 = (complex(v) for v in u_choice)
        if abs(du0) < 1e-12 * (abs(u0) + abs(du0)):
            raise ClassicalError("u' = 0: the carrier ratio u/u' diverges")
        shift = u0 / du0
        choice_record = [u0, du0]
    y0 = _CHAZY_ANCHOR + shift
    reason = _degenerate_reason(zb, y0)
    if reason is not None:
        raise ClassicalError(f"base value unusable: {reason}")
    coeffs = [complex(cv)
              for cv in _chazy_coefficients(y0, zb, (t1, t2, t3), ti)]
    roots = np.roots(coeffs)
    if roots.size != 4:
        raise ClassicalError(
            "the momentum quartic degenerated at the base point")
    order = np.lexsort((roots.imag.round(9), roots.real.round(9)))
    p0 = complex(roots[order][int(branch) % 4])
    dy0 = complex(_slope_from_momentum(y0, p0, zb, (t1, t2, t3)))

    params = _pvi_params((t1, t2, t3), ti)
    rhs = _pvi_flow_rhs(params)

    # follow the flow through the sample list, recovering after failed legs
    states = []
    xg, sg = zb, np.array([y0, dy0], dtype=complex)
    for x1 in pts:
        try:
            s1 = _advance(rhs, xg, x1, sg, rtol, atol, clearance)
            if not np.all(np.isfinite(s1.view(float))):
                raise ClassicalError("flow left the finite chart")
        except ClassicalError as exc:
            states.append(("lost", str(exc)))
            continue
        states.append(("ok", s1))
        xg, sg = x1, s1

    def one_sample(item):
        idx, x, tag, payload = item
        if tag == "lost":
            return ("drop", idx, x, f"flow continuation failed: {payload}")
        s = payload
        yc = complex(s[0])
        reason = _degenerate_reason(x, yc)
        if reason is not None:
            return ("drop", idx, x, reason)
        # resolve fast segments: the stencil must track the local variation
        h = stencil * min(1.0, abs(x), abs(x - 1.0)) / (1.0 + abs(complex(s[1])))
        try:
            yvals = []
            for k in (-2, -1, 0, 1, 2):
                sk = s if k == 0 else _advance(rhs, x, x + k * h, s,
                                               1e-13, 1e-16, 1e-12)
                yvals.append(complex(sk[0]))
        except ClassicalError as exc:
            return ("drop", idx, x, f"stencil left the chart: {exc}")
        ym2, ym1, y0s, yp1, yp2 = yvals
        dy = (ym2 - 8.0 * ym1 + 8.0 * yp1 - yp2) / (12.0 * h)
        ddy = (-ym2 + 16.0 * ym1 - 30.0 * y0s + 16.0 * yp1 - yp2) \
            / (12.0 * h * h)
        p = complex(pvi_momentum(y0s, dy, x, (t1, t2, t3)))
        res = float(pvi_residual(x, y0s, dy, ddy, params))
        con = float(chazy_constraint(y0s, p, x, (t1, t2, t3), ti))
        return ("keep", idx, x, y0s, p, res, con)

    items = [(i, x, tag, payload)
             for i, (x, (tag, payload)) in enumerate(zip(pts, states))]
    results = _map_samples(one_sample, items)
    kept = [r[2:] for r in results if r[0] == "keep"]
    dropped = tuple(r[1:] for r in results if r[0] == "drop")
    if not kept:
        raise ClassicalError(
            "every requested sample was degenerate or unreachable; the "
            "chosen base data may sit too close to a forbidden branch")
    xs, ys, ps, res, cons = (np.array(col) for col in zip(*kept))
    tol = FAMILY_TOLERANCES["generalized_chazy"]
    aux = {"constraint_max": float(np.max(cons))}
    aux_tol = {"constraint_max": tol}
    if certify:
        system = associated_fuchsian_system(y0, p0, zb, (t1, t2, t3), ti)
        data = compute_monodromy(
            system, frame="base",
            opts=IntegratorOptions(rtol=1e-11, atol=1e-13))
        aux["monodromy_defect"] = float(
            np.max(np.abs(data.m_inf + np.eye(2))))
        aux_tol["monodromy_defect"] = 1e-6
    return ClassicalSolution(
        family="generalized_chazy",
        parameters={
            "theta": [t1, t2, t3],
            "theta_inf": ti,
            "u_choice": choice_record,
            "branch": int(branch),
            "hypergeometric": [a, b, c],
            "base_point": zb,
            "base_value": y0,
            "base_momentum": p0,
        },
        x=xs, y=ys, p=ps, residuals=np.abs(res),
        tolerance=tol,
        aux_residuals=aux,
        aux_tolerances=aux_tol,
        dropped=dropped,
    )


# ---------------------------------------------------------------------------
# quadratic first-order family at theta_inf = 2


def _rt_rhs_f(t1, t2, t3):
    A = t3 - t2 - t1
    B = t1 + t2 + t3 + 2.0
    C = t1 - t2 - t3

    def rhs(x, s):
        f = s[0]
        G = ((f - 1.0) * (f - x) * A + f * (f - 1.0) * B + f * (f - x) * C)
        return np.array([G / (2.0 * x * (x - 1.0))], dtype=complex)
    return rhs


def _rt_rhs_w(t1, t2, t3):
    A = t3 - t2 - t1
    B = t1 + t2 + t3 + 2.0
    C = t1 - t2 - t3

    def rhs(x, s):
        w = s[0]
        H = -((1.0 - w) * (1.0 - x * w) * A + (1.0 - w) * B + (1.0 - x * w) * C)
        return np.array([H / (2.0 * x * (x - 1.0))], dtype=complex)
    return rhs


_CHART_SWITCH = 3.0


def _rt_advance(t1, t2, t3, z0, z1, value, chart, rtol, atol, clearance):
    """Continue the first-order solution across one segment with chart swaps.

    ``chart`` is "f" or "w" (w = 1/f); the integration switches chart
    whenever the active variable leaves the disk of radius 3, so movable
    poles of f are crossed in the w chart and zeros in the f chart.
    """
    _check_segment(z0, z1, clearance)
    dz = z1 - z0
    if dz == 0:
        return value, chart
    rhs_f = _rt_rhs_f(t1, t2, t3)
    rhs_w = _rt_rhs_w(t1, t2, t3)
    t0 = 0.0
    for _ in range(60):
        rhs = rhs_f if chart == "f" else rhs_w

        def rhs_t(t, s):
            return rhs(z0 + t * dz, s) * dz

        def leave(t, s):
            return abs(s[0]) - _CHART_SWITCH
        leave.terminal = True
        leave.direction = 1.0

        sol = solve_ivp(rhs_t, (t0, 1.0), np.array([value], dtype=complex),
                        method="DOP853", rtol=rtol, atol=atol, events=leave)
        if not sol.success:
            raise ClassicalError(
                f"first-order continuation failed near x = {z0 + sol.t[-1] * dz}: "
                f"{sol.message}")
        if sol.status == 1 and sol.t_events[0].size:
            t0 = float(sol.t_events[0][0])
            value = complex(sol.y_events[0][0][0])
            if value == 0:
                raise ClassicalError("chart swap hit an exact zero")
            value = 1.0 / value
            chart = "w" if chart == "f" else "f"
            continue
        return complex(sol.y[0, -1]), chart
    raise ClassicalError(
        "too many chart swaps on one segment; the solution oscillates "
        "between zero and infinity faster than the integrator can follow")


def _rt_jet(value, chart, x, t1, t2, t3):
    """Solution value y with two derivatives, from the first-order state."""
    tsum = t1 + t2 + t3
    A = t3 - t2 - t1
    B = tsum + 2.0
    C = t1 - t2 - t3
    alpha = (-t1 + t2 + t3) - x * tsum
    beta = -t1 + t2 - t3
    gamma = t1 + t2 - t3
    if chart == "f":
        f = value
        G = (f - 1.0) * (f - x) * A + f * (f - 1.0) * B + f * (f - x) * C
        Gf = (2.0 * f - 1.0 - x) * A + (2.0 * f - 1.0) * B + (2.0 * f - x) * C
        Gx = -(f - 1.0) * A - f * C
        f1 = G / (2.0 * x * (x - 1.0))
        f2 = (Gf * f1 + Gx) / (2.0 * x * (x - 1.0)) \
            - G * (2.0 * x - 1.0) / (2.0 * (x * (x - 1.0)) ** 2)
        N = f * f * alpha + 2.0 * t1 * x * f
        Nf = 2.0 * alpha * f + 2.0 * t1 * x
        Nx = -tsum * f * f + 2.0 * t1 * f
        Nff, Nfx, Nxx = 2.0 * alpha, -2.0 * tsum * f + 2.0 * t1, 0.0
        D = beta * f * f + 2.0 * (t3 - t2 * x) * f + gamma * x
        Df = 2.0 * beta * f + 2.0 * (t3 - t2 * x)
        Dx = -2.0 * t2 * f + gamma
        Dff, Dfx, Dxx = 2.0 * beta, -2.0 * t2, 0.0
        var1, var2 = f1, f2
    else:
        w = value
        H = -((1.0 - w) * (1.0 - x * w) * A + (1.0 - w) * B + (1.0 - x * w) * C)
        Hw = (1.0 - x * w) * A + x * (1.0 - w) * A + B + x * C
        Hx = (1.0 - w) * w * A + w * C
        w1 = H / (2.0 * x * (x - 1.0))
        w2 = (Hw * w1 + Hx) / (2.0 * x * (x - 1.0)) \
            - H * (2.0 * x - 1.0) / (2.0 * (x * (x - 1.0)) ** 2)
        N = alpha + 2.0 * t1 * x * w
        Nf = 2.0 * t1 * x
        Nx = -tsum + 2.0 * t1 * w
        Nff, Nfx, Nxx = 0.0, 2.0 * t1, 0.0
        D = beta + 2.0 * (t3 - t2 * x) * w + gamma * x * w * w
        Df = 2.0 * (t3 - t2 * x) + 2.0 * gamma * x * w
        Dx = -2.0 * t2 * w + gamma * w * w
        Dff, Dfx, Dxx = 2.0 * gamma * x, -2.0 * t2 + 2.0 * gamma * w, 0.0
        var1, var2 = w1, w2
    n1 = Nf * var1 + Nx
    n2 = Nff * var1 * var1 + 2.0 * Nfx * var1 + Nf * var2 + Nxx
    d1 = Df * var1 + Dx
    d2 = Dff * var1 * var1 + 2.0 * Dfx * var1 + Df * var2 + Dxx
    if abs(D) < 1e-12 * (abs(N) + 1.0):
        return None
    y, y1, y2 = _quotient_jet(N, n1, n2, D, d1, d2)
    return y, y1, y2, var1, var2


def _riccati_type_constraint(y, p, x, theta):
    """Relative defect of the momentum quadratic carried by this family."""
    t1, t2, t3 = (complex(v) for v in theta)
    y, p, x = complex(y), complex(p), complex(x)
    prod = y * (y - 1.0) * (y - x)
    ssum = t1 * (y - 1.0) * (y - x) + t2 * y * (y - 1.0) + t3 * y * (y - x)
    lin = t1 * (y - 1.0 - x) + t2 * (y + x - 1.0) + t3 * (y + 1.0 - x)
    terms = (prod * p * p, -ssum * p, (t1 + t2 + t3) / 4.0 * lin)
    scale = max(1.0, *(abs(t) for t in terms))
    return abs(sum(terms)) / scale


def riccati_type_solution(theta, f_init, x_samples=None, *, theta_inf=2.0,
                          rtol: float = 1e-12, atol: float = 1e-14,
                          clearance: float = 1e-3,
                          stencil: float = 5e-3) -> ClassicalSolution:
    """Quadratic first-order family in the ``theta_inf = 2`` normalization.

    ``f_init`` is the value of the underlying first-order solution at the
    first sample point.  Movable poles of ``f`` are crossed by switching to
    the reciprocal chart.  The first-order defect of the carrier is measured
    on an independent five-point stencil and reported alongside the
    second-order defect of ``y``; the quadratic momentum relation the family
    satisfies is reported as ``momentum_constraint``.
    """
    ti = complex(theta_inf)
    if abs(ti - 1.0) < 1e-12:
        raise ClassicalError(
            "theta_inf = 1 carries no member of this family: the degenerate "
            "monodromy at infinity forces the constant solution there "
            "(a forbidden branch)")
    if abs(ti - 2.0) > 1e-12:
        raise ClassicalError(
            "this family is constructed in the theta_inf = 2 normalization; "
            "use the exponent-shift maps to move an even exponent there")
    t1, t2, t3 = (complex(v) for v in theta)
    if x_samples is None:
        x_samples = _default_samples()
    pts = [complex(z) for z in x_samples]
    value = complex(f_init)
    chart = "f"
    if abs(value) > _CHART_SWITCH:
        value, chart = 1.0 / value, "w"

    states = [(value, chart)]
    for z0, z1 in zip(pts[:-1], pts[1:]):
        value, chart = _rt_advance(t1, t2, t3, z0, z1, value, chart,
                                   rtol, atol, clearance)
        states.append((value, chart))

    params = _pvi_params((t1, t2, t3), ti)
    rhs_f = _rt_rhs_f(t1, t2, t3)
    rhs_w = _rt_rhs_w(t1, t2, t3)

    def one_sample(item):
        idx, x, value, chart = item
        jet = _rt_jet(value, chart, x, t1, t2, t3)
        if jet is None:
            return ("drop", idx, x, "movable pole of the solution")
        y, y1, y2, var1, _ = jet
        reason = _degenerate_reason(x, y)
        if reason is not None:
            return ("drop", idx, x, reason)
        # independent slope check of the first-order carrier
        h = stencil * min(1.0, abs(x), abs(x - 1.0))
        rhs = rhs_f if chart == "f" else rhs_w
        vals = []
        for k in (-2, -1, 1, 2):
            vk = _advance(rhs, x, x + k * h, np.array([value], dtype=complex),
                          1e-13, 1e-16, 1e-12)[0]
            vals.append(vk)
        slope = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)
        carrier_res = abs(slope - var1) / max(1.0, abs(var1))
        p = complex(pvi_momentum(y, y1, x, (t1, t2, t3)))
        quad = float(_riccati_type_constraint(y, p, x, (t1, t2, t3)))
        res = float(pvi_residual(x, y, y1, y2, params))
        return ("keep", idx, x, y, p, res, carrier_res, quad)

    results = _map_samples(one_sample, [(i, x, v, ch) for i, (x, (v, ch))
                                        in enumerate(zip(pts, states))])
    kept = [r[2:] for r in results if r[0] == "keep"]
    dropped = tuple(r[1:] for r in results if r[0] == "drop")
    if not kept:
        raise ClassicalError("every requested sample was degenerate")
    xs, ys, ps, res, carrier, quad = (np.array(col) for col in zip(*kept))
    tol = FAMILY_TOLERANCES["riccati_type"]
    return ClassicalSolution(
        family="riccati_type",
        parameters={
            "theta": [t1, t2, t3],
            "theta_inf": ti,
            "f_init": complex(f_init),
        },
        x=xs, y=ys, p=ps, residuals=np.abs(res),
        tolerance=tol,
        aux_residuals={"first_order_max": float(np.max(np.abs(carrier))),
                       "momentum_constraint": float(np.max(quad))},
        aux_tolerances={"first_order_max": 1e-8,
                        "momentum_constraint": 1e-8},
        dropped=dropped,
    )


# ---------------------------------------------------------------------------
# constant branches


def forbidden_solution(theta, theta_inf, x_samples=None) -> ClassicalSolution:
    """Constant solution attached to a trivial local monodromy matrix.

    Realized for a vanishing finite exponent (constant value at the matching
    pole) or ``theta_inf = 1`` (constant at infinity).  The defect vanishes
    identically on these branches while the numeric residual formula is
    singular there, so the residual column is zero by construction and the
    momentum column is not meaningful (the conjugate chart degenerates); it
    is filled with zeros.
    """
    t = [complex(v) for v in theta]
    ti = complex(theta_inf)
    if x_samples is None:
        x_samples = _default_samples()
    xs = np.asarray([complex(z) for z in x_samples])
    branches = []
    if abs(t[0]) < 1e-12:
        branches.append(("zero", np.zeros_like(xs)))
    if abs(t[1]) < 1e-12:
        branches.append(("moving_pole", xs.copy()))
    if abs(t[2]) < 1e-12:
        branches.append(("one", np.ones_like(xs)))
    if abs(ti - 1.0) < 1e-12:
        branches.append(("infinity", np.full_like(xs, np.inf)))
    if not branches:
        raise ClassicalError(
            "no constant branch: requires a vanishing finite exponent or "
            "theta_inf = 1")
    name, ys = branches[0]
    return ClassicalSolution(
        family="forbidden",
        parameters={
            "theta": t,
            "theta_inf": ti,
            "branch": name,
            "alternatives": [n for n, _ in branches[1:]],
        },
        x=xs, y=ys, p=np.zeros_like(xs),
        residuals=np.zeros(xs.size),
        tolerance=FAMILY_TOLERANCES["forbidden"],
    )


# ---------------------------------------------------------------------------
# zero-momentum locus of the Hamiltonian flow


@dataclass(frozen=True)
class LocusFlow:
    """Sampled trajectory on the zero-momentum locus.

    ``states`` are the sampled states along the path (parameter values in
    ``ts``); ``rho_max`` is the largest momentum magnitude seen anywhere on
    the trajectory, which certifies that the locus was preserved.
    """

    states: tuple[GarnierState, ...]
    ts: tuple[float, ...]
    rho_max: float
    kappa: complex


def lauricella_locus_flow(theta, eps, u_path, nu_init, *,
                          opts: IntegratorOptions = IntegratorOptions(),
                          n_samples: int = 30,
                          rho_tol: float = 1e-8) -> LocusFlow:
    """Flow of the zero-momentum invariant locus along a pole path.

    ``theta`` are the exponent labels of the state; ``eps`` is the sign
    pattern relating them to the reduced-monodromy orientation, fixing
    ``theta_inf = -sum(eps * theta)``.  The locus exists only where the
    energy constant vanishes, which for the uniform orientation
    ``eps = (-1, ..., -1)`` means ``theta_inf = sum(theta)``; any other
    combination is rejected unless it happens to satisfy the constraint.
    The momenta start at zero and are checked to stay below ``rho_tol``
    along the whole trajectory.
    """
    theta = np.asarray(theta, dtype=complex).reshape(-1)
    eps = np.asarray(eps, dtype=int).reshape(-1)
    if eps.shape != theta.shape:
        raise ClassicalError("eps must have one sign per exponent")
    if not np.all(np.abs(eps) == 1):
        raise ClassicalError("eps entries must be +1 or -1")
    theta_inf = -complex(np.sum(eps * theta))
    kap = kappa(theta, theta_inf)
    if abs(kap) > 1e-9:
        raise ClassicalError(
            "zero-momentum locus requires a vanishing energy constant; "
            f"these labels give {kap:.6g} (theta_inf = {theta_inf:.6g})")
    if isinstance(u_path, DeformationPath):
        path = u_path
    else:
        path = DeformationPath(tuple(tuple(complex(z) for z in w)
                                     for w in u_path))
    poles0 = np.asarray(path.waypoints[0], dtype=complex)
    if poles0.size != theta.size:
        raise ClassicalError("path width does not match the number of labels")
    nu0 = np.asarray(nu_init, dtype=complex).reshape(-1)
    if nu0.size != poles0.size - 2:
        raise ClassicalError(
            f"nu_init must have length {poles0.size - 2} for this path")
    state = GarnierState(nu0, np.zeros_like(nu0), poles0, theta, theta_inf)
    _, samples = garnier_flow(state, path, opts=opts,
                              n_samples=max(int(n_samples), 2))
    rho_max = max(float(np.max(np.abs(s.rho))) for _, s in samples)
    if rho_max > rho_tol:
        raise ClassicalError(
            "zero-momentum invariance broke down along the path: "
            f"max |rho| = {rho_max:.3e} > {rho_tol:g}")
    return LocusFlow(
        states=tuple(s for _, s in samples),
        ts=tuple(float(t) for t, _ in samples),
        rho_max=rho_max,
        kappa=kap,
    )
