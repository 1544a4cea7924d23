"""Rational gauge transformations and reduction pipelines.

Exponent shifts by even integers, pole/infinity swaps, removal of singular
points with scalar monodromy, insertion of extra poles carrying trivial
monodromy, and triangularization of systems whose monodromy group is
reducible.  Every operation is pure: it takes a validated
:class:`~garnier_lab.fuchsian.FuchsianSystem` and returns a new one.  Pass a
list as ``audit`` to collect JSON-serializable step records.

Sign conventions used throughout: the residue at infinity of a normalized
system is ``diag(theta_inf/2, -theta_inf/2)``, and an exponent shift
``theta_inf -> theta_inf + 2N`` is realized by a polynomial gauge whose
determinant is a nonzero constant, so monodromy matrices are conjugated by
constants and all their traces are preserved.
"""
from __future__ import annotations

import numpy as np

from . import GarnierLabError
from .fuchsian import FuchsianSystem, require_valid
from .mat2 import IDENTITY, Mat2Error, asmat, diagonalizer, eig_jordan, inv, norm, \
    scalar_class
from .monodromy import IntegratorOptions, classify_group, compute_monodromy, \
    integer_exponent, refine_invariant_vector

SIGMA = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

INT_TOL = 1e-9


class GaugeError(GarnierLabError):
    pass


def _cnum(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _record(audit, op, before: FuchsianSystem, after: FuchsianSystem, **params):
    if audit is None:
        return
    clean = {}
    for key, val in params.items():
        if isinstance(val, (complex, np.complexfloating)):
            clean[key] = _cnum(val)
        elif isinstance(val, (np.integer,)):
            clean[key] = int(val)
        elif isinstance(val, (np.floating,)):
            clean[key] = float(val)
        else:
            clean[key] = val
    audit.append({
        "op": op,
        "params": clean,
        "theta_before": [_cnum(t) for t in before.theta],
        "theta_inf_before": _cnum(before.theta_inf),
        "theta_after": [_cnum(t) for t in after.theta],
        "theta_inf_after": _cnum(after.theta_inf),
    })


def _near(x, target, scale=1.0) -> bool:
    return abs(complex(x) - target) < INT_TOL * (1.0 + abs(target) + scale)


def translate(sys: FuchsianSystem, delta: complex) -> FuchsianSystem:
    """Shift every pole by ``delta``; residues and exponents are unchanged."""
    return sys.with_poles(sys.poles + complex(delta))


def flip_theta_label(sys: FuchsianSystem, j="inf") -> FuchsianSystem:
    """Flip the sign of one exponent label.

    At a finite pole this is pure relabeling (the eigenvalue pair of the
    residue is symmetric).  At infinity the normal form pins the label, so the
    flip is realized by conjugation with ``[[0,1],[1,0]]``, which swaps the
    diagonal of the residue at infinity.
    """
    if j == "inf":
        if _near(sys.theta_inf, 0.0):
            raise GaugeError("cannot flip the exponent at infinity when it is "
                             "zero (nilpotent normal form has no sign)")
        out = sys.conjugated(SIGMA).with_theta(theta_inf=-sys.theta_inf)
        return out
    theta = np.array(sys.theta, dtype=complex)
    theta[j] = -theta[j]
    return sys.with_theta(theta=theta)


def normalize_infinity(sys: FuchsianSystem) -> FuchsianSystem:
    """Constant conjugation restoring the exact normal form at infinity.

    Useful for systems assembled from transformed residues, where the residue
    at infinity is diagonalizable (or nilpotent for ``theta_inf = 0``) but not
    yet exactly in normal form.
    """
    a = sys.a_inf
    if _near(sys.theta_inf, 0.0, scale=norm(a)):
        ej = eig_jordan(a, tol=1e-6, convention="residue")
        if ej.diagonalizable:
            raise GaugeError("residue at infinity is diagonalizable; cannot "
                             "reach the nilpotent normal form")
        g = ej.transform
    else:
        try:
            g = diagonalizer(a, sys.theta_inf / 2.0)
        except Mat2Error as exc:
            raise GaugeError(f"cannot normalize at infinity: {exc}") from exc
    return sys.conjugated(g)


def normalize_diagonal_orbit(sys: FuchsianSystem) -> FuchsianSystem:
    """Deterministic representative of the diagonal-conjugation orbit.

    Rescales by ``diag(d, 1)`` so that the largest-modulus (1,2) residue entry
    becomes exactly 1 (falling back to the (2,1) entries for lower-triangular
    systems).  Systems with ``theta_inf = 0`` are returned unchanged: their
    nilpotent normal form at infinity already fixes the diagonal freedom.
    """
    if _near(sys.theta_inf, 0.0):
        return sys
    scale = sys.scale()
    a12 = sys.residues[:, 0, 1]
    i = int(np.argmax(np.abs(a12)))
    if abs(a12[i]) > 1e-12 * scale:
        d = complex(a12[i])
    else:
        a21 = sys.residues[:, 1, 0]
        j = int(np.argmax(np.abs(a21)))
        if abs(a21[j]) <= 1e-12 * scale:
            return sys
        d = 1.0 / complex(a21[j])
    return sys.conjugated(np.diag([d, 1.0]).astype(complex))


# ---------------------------------------------------------------------------
# exponent shifts

def _moment(residues, positions, row, col, power) -> complex:
    return complex(np.sum(residues[:, row, col] * positions ** power))


def _shift_inf_up(sys: FuchsianSystem, N: int, a: complex,
                  audit=None) -> FuchsianSystem:
    """theta_inf -> theta_inf + 2N for N >= 1 via the polynomial gauge whose
    (1,2) entry is the free constant ``a``."""
    if N < 1:
        raise GaugeError("internal: _shift_inf_up needs N >= 1")
    if a == 0:
        raise GaugeError("free gauge entry a must be nonzero")
    ti = sys.theta_inf
    scale = sys.scale()
    for f in (-2.0, -float(N), -2.0 * N):
        if _near(ti, f):
            raise GaugeError(f"shift precondition fails: theta_inf = {ti:g} "
                             f"is a forbidden value for N = {N}")
    u = sys.poles
    res = sys.residues
    s21 = _moment(res, u, 1, 0, N)
    if abs(s21) < 1e-12 * scale ** (N + 1):
        raise GaugeError("gauge-singular shift: the (2,1) moment "
                        f"sum(A21 * u^{N}) vanishes (residues triangular?)")
    s22 = _moment(res, u, 1, 1, N)
    s21_2 = _moment(res, u, 1, 0, 2 * N)
    if _near(ti, 0.0):
        g11c = s22 / N - s21_2 / (2.0 * s21) - s21 / (2.0 * N ** 2)
    else:
        g11c = 2.0 * s22 / (ti + 2 * N) \
            - (ti + N) * s21_2 / ((ti + 2 * N) * s21)
    g21 = -s21 / (ti + N)
    new_res = np.empty_like(res)
    for k in range(sys.npoles):
        gk = np.array([[u[k] ** N + g11c, a], [g21, 0.0]], dtype=complex)
        new_res[k] = inv(gk) @ res[k] @ gk
    out = FuchsianSystem(u, new_res, sys.theta, ti + 2 * N)
    out = normalize_infinity(out)
    require_valid(out, tol=1e-6)
    _record(audit, "shift_theta_inf", sys, out, N=N, a=a)
    return out


def _shift_inf_down(sys: FuchsianSystem, N: int, a: complex,
                    audit=None) -> FuchsianSystem:
    """theta_inf -> theta_inf - 2N for N >= 1 (mirror of the up shift)."""
    if N < 1:
        raise GaugeError("internal: _shift_inf_down needs N >= 1")
    ti = sys.theta_inf
    for f in (2.0, float(N), 2.0 * N):
        if _near(ti, f):
            raise GaugeError(f"shift precondition fails: theta_inf = {ti:g} "
                             f"is a forbidden value for N = {N}")
    if _near(ti, 0.0):
        # the flip is unavailable at a nilpotent infinity; shift up first and
        # flip the resulting label (same exponent pair, mirrored orientation)
        return flip_theta_label(_shift_inf_up(sys, N, a, audit), "inf")
    out = flip_theta_label(sys, "inf")
    out = _shift_inf_up(out, N, a, audit)
    return flip_theta_label(out, "inf")


def _shift_at(sys: FuchsianSystem, j, M: int, a: complex,
              audit=None) -> FuchsianSystem:
    """theta_j -> theta_j + 2M at a finite pole or at infinity (M != 0)."""
    if M == 0:
        return sys
    if j == "inf":
        if M > 0:
            return _shift_inf_up(sys, M, a, audit)
        return _shift_inf_down(sys, -M, a, audit)
    swapped = mobius_swap(sys, j, audit=audit)
    shifted = _shift_at(swapped, "inf", M, a, audit)
    back = mobius_swap(shifted, j, audit=audit)
    back = translate(back, sys.poles[j])
    dev = float(np.max(np.abs(back.poles - sys.poles)))
    if dev > 1e-8 * sys.scale():
        raise GaugeError(f"pole positions drifted by {dev:.3e} in the "
                         "swap-shift-swap sandwich")
    return back.with_poles(sys.poles)


def shift_theta_inf(sys: FuchsianSystem, N: int, a: complex = 1.0,
                    audit=None) -> FuchsianSystem:
    """Shift the exponent at infinity: ``theta_inf -> theta_inf + 2N``.

    ``a`` is the free constant entry of the gauge; it moves the output along
    its diagonal-conjugation orbit and drops out of all monodromy traces.
    Raises when the shift moment vanishes (gauge-singular, e.g. on
    upper-triangular systems) or a forbidden exponent value is hit.
    """
    require_valid(sys)
    N = int(N)
    if N == 0:
        return sys
    return _shift_at(sys, "inf", N, a, audit)


def shift_theta_down(sys: FuchsianSystem, j, N: int,
                     audit=None) -> FuchsianSystem:
    """Shift one exponent down: ``theta_j -> theta_j - 2N``.

    ``j`` is a finite pole index or ``"inf"``.  Finite-pole shifts are
    realized by swapping the pole with infinity, shifting there, and swapping
    back; pole positions are restored exactly.
    """
    require_valid(sys)
    N = int(N)
    if N == 0:
        return sys
    th = sys.theta_inf if j == "inf" else sys.theta[j]
    for f in (2.0, float(N), 2.0 * N):
        if _near(th, f):
            raise GaugeError(f"down-shift precondition fails: theta = {th:g} "
                             f"forbidden for N = {N}")
    out = _shift_at(sys, j, -N, 1.0, audit)
    _record(audit, "shift_theta_down", sys, out, j=(j if j == "inf" else int(j)),
            N=N)
    return out


# ---------------------------------------------------------------------------
# pole <-> infinity swap

def mobius_swap(sys: FuchsianSystem, k: int, audit=None) -> FuchsianSystem:
    """Exchange the finite pole ``u_k`` with infinity via ``1/(lambda-u_k)``.

    The new system has poles ``{0} U {1/(u_l-u_k)}``; slot ``k`` (now at 0)
    carries the old residue at infinity conjugated into the diagonalizing
    frame of ``A_k``, and the exponents at slot ``k`` and infinity exchange.
    Raises for a defective ``A_k`` (logarithmic pole), which no swap frame
    can normalize to diagonal form.
    """
    require_valid(sys)
    k = int(k)
    a_k = sys.residues[k]
    try:
        g = diagonalizer(a_k, sys.theta[k] / 2.0)
    except Mat2Error as exc:
        raise GaugeError(
            f"residue at pole {k} is defective or degenerate; the swap needs "
            f"a diagonalizable residue ({exc})") from exc
    gi = inv(g)
    d = sys.poles - sys.poles[k]
    new_poles = np.empty_like(sys.poles)
    new_res = np.empty_like(sys.residues)
    new_theta = np.array(sys.theta, dtype=complex)
    for l in range(sys.npoles):
        if l == k:
            new_poles[l] = 0.0
            new_res[l] = gi @ sys.a_inf @ g
        else:
            new_poles[l] = 1.0 / d[l]
            new_res[l] = gi @ sys.residues[l] @ g
    new_theta[k] = sys.theta_inf
    out = FuchsianSystem(new_poles, new_res, new_theta, sys.theta[k])
    require_valid(out, tol=1e-6)
    _record(audit, "mobius_swap", sys, out, k=k)
    return out


# ---------------------------------------------------------------------------
# removal and insertion of scalar-monodromy singularities

class _SingularKill(GaugeError):
    pass


def _kill_infinity(positions, mats, orientation: str):
    """Gauge away a pole at infinity with exponent -2 (``orientation='main'``,
    residue ``diag(-1,1)``) or +2 (``'mirror'``, residue ``diag(1,-1)``).

    ``mats`` are the finite residues.  Returns the transformed residues,
    whose sum must vanish (regular infinity); a nonvanishing sum means the
    quadratic compatibility constraint of the reduction is violated.
    """
    positions = np.asarray(positions, dtype=complex)
    mats = np.asarray(mats, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(positions))),
                max(norm(m) for m in mats))
    if orientation == "main":
        s = _moment(mats, positions, 1, 0, 1)
        if abs(s) < 1e-10 * scale ** 2:
            raise _SingularKill("vanishing (2,1) moment")
        c_resid = abs(_moment(mats, positions, 1, 0, 2)
                      + s * (_moment(mats, positions, 1, 1, 1)
                             - _moment(mats, positions, 0, 0, 1)))

        def gauge(p):
            return np.array([[p + 1.0, 1.0], [s, 0.0]], dtype=complex)
    elif orientation == "mirror":
        s = _moment(mats, positions, 0, 1, 1)
        if abs(s) < 1e-10 * scale ** 2:
            raise _SingularKill("vanishing (1,2) moment")
        c_resid = abs(_moment(mats, positions, 0, 1, 2)
                      + s * (_moment(mats, positions, 0, 0, 1)
                             - _moment(mats, positions, 1, 1, 1)))

        def gauge(p):
            return np.array([[0.0, s], [1.0, p + 1.0]], dtype=complex)
    else:
        raise ValueError(orientation)
    new = np.empty_like(mats)
    for l in range(mats.shape[0]):
        gl = gauge(positions[l])
        new[l] = inv(gl) @ mats[l] @ gl
    rem = norm(new.sum(axis=0))
    if rem > 1e-5 * scale:
        raise GaugeError(
            "inconsistent input: removing the pole at infinity leaves a "
            f"residue of size {rem:.3e} (quadratic constraint residual "
            f"{c_resid:.3e}); the monodromy at this singularity cannot be "
            "scalar")
    return new


def _renormalize_slot(mat, theta_label):
    """Frame bringing a residue carrying exponent ``theta_label`` to normal
    form when moved to infinity (diagonal, or nilpotent for label 0)."""
    if _near(theta_label, 0.0, scale=norm(mat)):
        ej = eig_jordan(mat, tol=1e-6, convention="residue")
        if ej.diagonalizable:
            raise GaugeError("slot residue with exponent 0 is diagonalizable; "
                             "nothing to renormalize (degenerate input)")
        return ej.transform
    try:
        return diagonalizer(mat, complex(theta_label) / 2.0)
    except Mat2Error as exc:
        raise GaugeError(f"cannot renormalize swapped slot: {exc}") from exc


def reduce_identity_pole(sys: FuchsianSystem, k: int,
                         opts: IntegratorOptions | None = None,
                         audit=None) -> FuchsianSystem:
    """Remove the pole ``u_k`` when its monodromy matrix is ``+1``.

    Pipeline: normalize ``theta_k`` to ``-2`` by exponent shifts, swap the
    pole with infinity, gauge away the resulting exponent ``-2`` pole at
    infinity with a degree-one singular gauge, and swap back.  The output has
    one fewer finite pole and the same monodromy group, generated by the
    remaining (nontrivial) matrices.  All-upper-triangular inputs route
    through the mirrored normalization ``theta_k = +2``.

    A monodromy matrix equal to ``-1`` is rejected: flattening it to ``+1``
    needs a square-root twist that lives in the symmetry group of the
    Hamiltonian form, not in the rational gauge toolkit.

    For several trivial poles, iterate in ascending pole index; each pass
    removes one pole.
    """
    require_valid(sys)
    k = int(k)
    if opts is None:
        opts = IntegratorOptions()
    data = compute_monodromy(sys, opts=opts)
    cls = scalar_class(data.matrices[k], tol=1e-5)
    if cls == "minus":
        raise GaugeError(
            f"monodromy at pole {k} is -1; reduction needs the half-period "
            "symmetry twist applied to the Hamiltonian form first, which is "
            "outside the rational gauge toolkit")
    if cls != "plus":
        dev = norm(data.matrices[k] - IDENTITY)
        raise GaugeError(f"not reducible at pole {k}: monodromy deviates from "
                         f"identity by {dev:.3e}")
    p = integer_exponent(sys.theta[k], tol=1e-7)
    if p is None or p % 2 != 0 or p == 0:
        raise GaugeError(
            f"inconsistent input: trivial monodromy at pole {k} forces a "
            f"nonzero even integer exponent, got {sys.theta[k]:g}")
    half = p // 2

    def _route(target):
        # bring theta_k to the target value in {-2, +2} and swap to infinity
        sign = target // 2
        if half == sign:
            work = sys
        elif half == -sign:
            work = flip_theta_label(sys, k)
        else:
            work = shift_theta_down(sys, k, half - sign, audit=audit)
        return mobius_swap(work, k, audit=audit)

    try:
        swapped = _route(-2)
        killed = _kill_infinity(swapped.poles, swapped.residues, "main")
    except _SingularKill:
        swapped = _route(+2)
        killed = _kill_infinity(swapped.poles, swapped.residues, "mirror")

    gg = _renormalize_slot(killed[k], sys.theta_inf)
    ggi = inv(gg)
    keep = [l for l in range(sys.npoles) if l != k]
    res = np.array([ggi @ killed[l] @ gg for l in keep])
    out = FuchsianSystem(sys.poles[keep], res, sys.theta[keep], sys.theta_inf)
    require_valid(out, tol=1e-6)
    _record(audit, "reduce_identity_pole", sys, out, k=k)
    return out


def extend_with_identity_pole(sys: FuchsianSystem, u_new: complex,
                              family_param: complex = 0.0,
                              audit=None) -> FuchsianSystem:
    """Insert a pole at ``u_new`` with exponent ``-2`` and trivial monodromy.

    Inverse of :func:`reduce_identity_pole`.  The construction moves the
    frame so that ``u_new`` corresponds to infinity, applies a degree-one
    singular gauge creating an exponent ``-2`` there, and moves back.  The
    one-parameter freedom of the construction is exposed as ``family_param``
    (a unipotent frame rotation applied before the singular gauge); varying
    it changes residues but no monodromy trace.  The new pole is inserted at
    slot 0.
    """
    require_valid(sys)
    u_new = complex(u_new)
    scale = sys.scale()
    if np.min(np.abs(sys.poles - u_new)) < 1e-9 * scale:
        raise GaugeError("new pole collides with an existing one")
    # frame centered at u_new: mu = 1/(lambda - u_new); existing poles move to
    # 1/(u_l - u_new), the old infinity lands at 0 with its residue unchanged,
    # and infinity becomes regular
    d = sys.poles - u_new
    positions = np.concatenate([[0.0 + 0.0j], 1.0 / d])
    mats = np.concatenate([[sys.a_inf], sys.residues])
    gfam = np.array([[1.0, 0.0], [complex(family_param), 1.0]], dtype=complex)
    gfam_i = inv(gfam)
    mats = np.array([gfam_i @ m @ gfam for m in mats])

    q = _moment(mats, positions, 0, 1, 1)
    if abs(q) < 1e-12 * scale:
        raise GaugeError("gauge-singular extension: the (1,2) moment "
                         "vanishes; perturb family_param")
    a = -_moment(mats, positions, 1, 0, 1)
    if abs(a) < 1e-12 * scale:
        raise GaugeError("gauge-singular extension: the (2,1) moment "
                         "vanishes; perturb family_param")
    w = 0.5 * (_moment(mats, positions, 0, 0, 1)
               - _moment(mats, positions, 1, 1, 1)
               - _moment(mats, positions, 0, 1, 2) / q)
    new = np.empty_like(mats)
    for l in range(mats.shape[0]):
        gl = np.array([[positions[l] + w, q], [a, 0.0]], dtype=complex)
        new[l] = inv(gl) @ mats[l] @ gl
    b_inf = -new.sum(axis=0)
    ev = np.linalg.eigvals(b_inf)
    if max(abs(ev[0] + 1.0), abs(ev[1] - 1.0)) > 1e-6 * scale and \
       max(abs(ev[0] - 1.0), abs(ev[1] + 1.0)) > 1e-6 * scale:
        raise GaugeError("extension gauge failed to create an exponent -2 at "
                         f"infinity (eigenvalues {ev})")
    # back to the original variable: mu-poles 1/d return to the original
    # pole positions, mu = 0 returns to infinity, and the new pole at
    # infinity of the mu-frame lands at u_new
    gg = _renormalize_slot(new[0], sys.theta_inf)
    ggi = inv(gg)
    out_poles = np.concatenate([[u_new], sys.poles])
    out_res = np.empty((sys.npoles + 1, 2, 2), dtype=complex)
    out_res[0] = ggi @ b_inf @ gg
    for l in range(sys.npoles):
        out_res[l + 1] = ggi @ new[l + 1] @ gg
    out_theta = np.concatenate([[-2.0 + 0.0j], sys.theta])
    out = FuchsianSystem(out_poles, out_res, out_theta, sys.theta_inf)
    require_valid(out, tol=1e-6)
    _record(audit, "extend_with_identity_pole", sys, out, u_new=u_new,
            family_param=family_param)
    return out


def reduce_infinity(sys: FuchsianSystem, k: int,
                    opts: IntegratorOptions | None = None,
                    audit=None) -> FuchsianSystem:
    """Remove the singularity at infinity when its monodromy is ``+1``.

    The exponent at infinity must be an even integer (the scalar monodromy
    obstruction); it is normalized to ``-2`` by shifts, the pole at infinity
    is gauged away, and the chosen finite pole ``k`` (whose monodromy must
    not be scalar) is swapped out to infinity.  The output poles sit at
    ``1/(u_l - u_k)``; the monodromy group is generated by conjugates of the
    original finite-pole matrices.

    ``M_inf = -1`` is rejected for the same reason as in
    :func:`reduce_identity_pole`.
    """
    require_valid(sys)
    k = int(k)
    if opts is None:
        opts = IntegratorOptions()
    data = compute_monodromy(sys, opts=opts)
    cls = scalar_class(data.m_inf, tol=1e-5)
    if cls == "minus":
        raise GaugeError(
            "monodromy at infinity is -1; apply the half-period symmetry "
            "twist to the Hamiltonian form first (outside the rational "
            "gauge toolkit)")
    if cls != "plus":
        dev = norm(data.m_inf - IDENTITY)
        raise GaugeError("monodromy at infinity deviates from identity by "
                         f"{dev:.3e}; nothing to reduce")
    if scalar_class(data.matrices[k], tol=1e-5) != "none":
        raise GaugeError(f"pole {k} has scalar monodromy; pick a pole with a "
                         "nontrivial matrix to anchor the new infinity")
    p = integer_exponent(sys.theta_inf, tol=1e-7)
    if p is None or p % 2 != 0:
        raise GaugeError(
            "inconsistent input: scalar monodromy at infinity requires an "
            f"even integer exponent, got theta_inf = {sys.theta_inf:g}")

    def _route(target):
        if p == target:
            return sys
        if p == -target:
            return flip_theta_label(sys, "inf")
        return shift_theta_down(sys, "inf", (p - target) // 2, audit=audit)

    try:
        work = _route(-2)
        killed = _kill_infinity(work.poles, work.residues, "main")
    except _SingularKill:
        work = _route(+2)
        killed = _kill_infinity(work.poles, work.residues, "mirror")

    gg = _renormalize_slot(killed[k], sys.theta[k])
    ggi = inv(gg)
    keep = [l for l in range(sys.npoles) if l != k]
    d = work.poles - work.poles[k]
    out_poles = 1.0 / d[keep]
    out_res = np.array([ggi @ killed[l] @ gg for l in keep])
    out = FuchsianSystem(out_poles, out_res, sys.theta[keep], sys.theta[k])
    require_valid(out, tol=1e-6)
    _record(audit, "reduce_infinity", sys, out, k=k)
    return out


def extend_with_trivial_infinity(sys: FuchsianSystem, z0: complex,
                                 family_param: complex = 0.0,
                                 audit=None) -> FuchsianSystem:
    """Inverse of :func:`reduce_infinity`: absorb the current infinity into a
    finite pole at ``z0`` and create an exponent ``-2`` infinity with trivial
    monodromy.

    The input must have no pole at 0 (the frame change ``lambda = z0 + 1/mu``
    sends 0 to the new infinity).  The old infinity lands at slot 0 with
    position ``z0``; old poles ``w_l`` land at ``z0 + 1/w_l``.  With ``k=0``,
    :func:`reduce_infinity` recovers the input up to diagonal conjugation.
    """
    require_valid(sys)
    z0 = complex(z0)
    scale = sys.scale()
    if np.min(np.abs(sys.poles)) < 1e-9 * scale:
        raise GaugeError("input has a pole at 0; translate it first so the "
                         "frame change is nonsingular")
    positions = np.concatenate([[z0], z0 + 1.0 / sys.poles])
    mats = np.concatenate([[sys.a_inf], sys.residues])
    gfam = np.array([[1.0, 0.0], [complex(family_param), 1.0]], dtype=complex)
    gfam_i = inv(gfam)
    mats = np.array([gfam_i @ m @ gfam for m in mats])

    q = _moment(mats, positions, 0, 1, 1)
    if abs(q) < 1e-12 * max(scale, float(np.max(np.abs(positions)))):
        raise GaugeError("gauge-singular extension: the (1,2) moment "
                         "vanishes; perturb family_param or move z0")
    a = -_moment(mats, positions, 1, 0, 1)
    if abs(a) < 1e-12 * max(scale, float(np.max(np.abs(positions)))):
        raise GaugeError("gauge-singular extension: the (2,1) moment "
                         "vanishes; perturb family_param or move z0")
    w = 0.5 * (_moment(mats, positions, 0, 0, 1)
               - _moment(mats, positions, 1, 1, 1)
               - _moment(mats, positions, 0, 1, 2) / q)
    new = np.empty_like(mats)
    for l in range(mats.shape[0]):
        gl = np.array([[positions[l] + w, q], [a, 0.0]], dtype=complex)
        new[l] = inv(gl) @ mats[l] @ gl
    b_inf = -new.sum(axis=0)
    try:
        gg = diagonalizer(b_inf, -1.0)
    except Mat2Error as exc:
        raise GaugeError("extension failed to create a diagonalizable "
                         f"exponent -2 infinity: {exc}") from exc
    ggi = inv(gg)
    out_res = np.array([ggi @ m @ gg for m in new])
    out_theta = np.concatenate([[sys.theta_inf], sys.theta])
    out = FuchsianSystem(positions, out_res, out_theta, -2.0)
    require_valid(out, tol=1e-6)
    _record(audit, "extend_with_trivial_infinity", sys, out, z0=z0,
            family_param=family_param)
    return out


# ---------------------------------------------------------------------------
# triangularization of reducible systems

def _residue_invariant_vector(sys: FuchsianSystem, tol: float):
    """Common eigenvector of all finite residues, or None."""
    cands = [np.array([1.0, 0.0], dtype=complex),
             np.array([0.0, 1.0], dtype=complex)]
    for k in range(sys.npoles):
        try:
            ej = eig_jordan(sys.residues[k], tol=1e-6, convention="residue")
        except Mat2Error:
            continue
        for col in range(2 if ej.diagonalizable else 1):
            v = ej.transform[:, col]
            cands.append(v / np.linalg.norm(v))

    mats = list(sys.residues)
    scale = max(norm(m) for m in mats) + 1.0

    def residual(v):
        r = 0.0
        for m in mats:
            mv = m @ v
            mu = np.vdot(v, mv)
            r = max(r, float(np.linalg.norm(mv - mu * v)))
        return r

    best = min(cands, key=residual)
    best = refine_invariant_vector(mats, best)
    res = residual(best)
    if res > tol * scale:
        return None, res
    return best, res


def triangularize_reducible(sys: FuchsianSystem,
                            opts: IntegratorOptions | None = None,
                            audit=None, tol: float = 1e-6) -> FuchsianSystem:
    """Conjugate a system with reducible monodromy to upper-triangular form.

    The monodromy group must preserve a line; the signed exponent sum
    ``E = s_inf*theta_inf + sum_k s_k*theta_k`` read off from the invariant
    vector is an even integer ``2K``.  For ``K != 0`` a pair of finite poles
    is shifted (smallest total shift first, ties by pole index) to reach
    ``K = 0``; then the common invariant vector of the residues exists and a
    constant conjugation sends it to ``e_1``, making every residue
    upper-triangular.  Exponent labels are flipped where needed so the (1,1)
    entries equal ``-theta_k/2``, the labeling in which the conjugate
    spectral coordinates vanish identically.

    Accepts frame-rotated input (residue at infinity merely diagonalizable):
    the normal form is restored by a constant conjugation first.
    """
    from .fuchsian import validate as _validate
    if _validate(sys):
        sys = normalize_infinity(sys)
        require_valid(sys)
    if opts is None:
        opts = IntegratorOptions()
    data = compute_monodromy(sys, opts=opts)
    cl = classify_group(data, tol=max(tol, 1e-6))
    if not cl.reducible:
        raise GaugeError("monodromy group is irreducible (common-eigenvector "
                         f"residual {cl.residual:.3e})")
    v = cl.invariant_vector

    def eigen_sign(mat, theta):
        mu = np.vdot(v, mat @ v) / np.vdot(v, v)
        plus = np.exp(1j * np.pi * complex(theta))
        return 1 if abs(mu - plus) <= abs(mu - 1.0 / plus) else -1

    signs = [eigen_sign(data.matrices[j], sys.theta[j])
             for j in range(sys.npoles)]
    s_inf = eigen_sign(data.m_inf, sys.theta_inf)
    e_val = s_inf * sys.theta_inf + sum(s * t for s, t in
                                        zip(signs, sys.theta))
    e_int = integer_exponent(e_val, tol=1e-6)
    if e_int is None or e_int % 2 != 0:
        raise GaugeError("signed exponent sum of a reducible group must be "
                         f"an even integer; got {e_val:g}")

    work = sys
    if e_int != 0:
        work = _rebalance_exponents(sys, signs, e_int, audit)
        data = compute_monodromy(work, opts=opts)
        cl = classify_group(data, tol=max(tol, 1e-6))
        if not cl.reducible:
            raise GaugeError("reducibility lost after exponent rebalancing "
                             "(numerical failure)")

    v_res, resid = _residue_invariant_vector(work, tol)
    if v_res is None:
        raise GaugeError(
            "no common invariant vector of the residues (residual "
            f"{resid:.3e}); the signed exponent sum may be balanced "
            "incorrectly or the input is not actually reducible")
    if abs(v_res[1]) > abs(v_res[0]):
        work = flip_theta_label(work, "inf") if not _near(work.theta_inf, 0.0) \
            else work.conjugated(SIGMA).with_theta(theta_inf=-work.theta_inf)
        v_res = SIGMA @ v_res
    p_mat = np.array([[1.0, 0.0], [v_res[1] / v_res[0], 1.0]], dtype=complex)
    out = work.conjugated(p_mat)

    # relabel so the (1,1) entries are -theta_k/2
    theta = np.array(out.theta, dtype=complex)
    for k in range(out.npoles):
        a11 = out.residues[k][0, 0]
        if abs(a11 - theta[k] / 2.0) < abs(a11 + theta[k] / 2.0):
            theta[k] = -theta[k]
    out = out.with_theta(theta=theta)
    mism = abs(complex(out.theta_inf) - complex(np.sum(theta)))
    if mism > 1e-5 * (1.0 + abs(out.theta_inf)):
        raise GaugeError("triangular labels do not close: theta_inf differs "
                         f"from the label sum by {mism:.3e}")
    _record(audit, "triangularize_reducible", sys, out)
    return out


def _rebalance_exponents(sys: FuchsianSystem, signs, e_int: int,
                         audit) -> FuchsianSystem:
    """Shift exponents at up to two finite poles so the signed exponent sum
    vanishes; smallest total shift first, ties by lexicographic pole pair."""
    half = e_int // 2
    best = None
    npol = sys.npoles
    for total in range(abs(half), abs(half) + 7):
        for i in range(npol):
            for j in range(npol):
                if j == i:
                    continue
                # s_i*n_i + s_j*n_j = -half with |n_i| + |n_j| = total
                for n_i in range(-total, total + 1):
                    n_j_signed = -half - signs[i] * n_i
                    n_j = signs[j] * n_j_signed
                    if abs(n_i) + abs(n_j) != total:
                        continue
                    if not _admissible_shift(sys.theta[i], n_i):
                        continue
                    if not _admissible_shift(sys.theta[j], n_j):
                        continue
                    best = (i, j, n_i, n_j)
                    break
                if best:
                    break
            if best:
                break
        if best:
            break
    if best is None:
        raise GaugeError("no admissible exponent-shift pair found to balance "
                         f"the signed exponent sum {e_int}")
    i, j, n_i, n_j = best
    work = sys
    if n_i != 0:
        work = shift_theta_down(work, i, -n_i, audit=audit)
    if n_j != 0:
        work = shift_theta_down(work, j, -n_j, audit=audit)
    return work


def _admissible_shift(theta, n: int) -> bool:
    """Up-shift theta -> theta + 2n avoiding the forbidden exponent values of
    the shift gauges (checked for the swap-to-infinity realization)."""
    if n == 0:
        return True
    th = complex(theta)
    m = -n  # realized as a down-shift by -n
    for f in (2.0, float(m), 2.0 * m):
        if abs(th - f) < 1e-9 * (1.0 + abs(f)):
            return False
    # the swapped residue must be diagonalizable; exponent 0 residues are
    # either zero or defective, both unusable
    if abs(th) < 1e-9:
        return False
    return True
