"""Gauge surgery: exponent shifts, swaps, extensions, triangularization.

Monodromy traces are the conserved certificate: every rational gauge
operation here must leave all of them unchanged.
"""

import numpy as np
import pytest

from garnier_lab.fuchsian import (
    build_triangular_family,
    garnier_coordinates,
    random_system,
    validate,
)
from garnier_lab.gauge import (
    GaugeError,
    extend_with_identity_pole,
    extend_with_trivial_infinity,
    mobius_swap,
    normalize_diagonal_orbit,
    reduce_identity_pole,
    reduce_infinity,
    shift_theta_down,
    shift_theta_inf,
    translate,
    triangularize_reducible,
)
from garnier_lab.mat2 import IDENTITY, norm
from garnier_lab.monodromy import IntegratorOptions, compute_monodromy

OPTS = IntegratorOptions()


def traces(sys):
    data = compute_monodromy(sys, opts=OPTS)
    return np.array([np.trace(m) for m in data.matrices]
                    + [np.trace(data.m_inf)])


def orbit_gap(a, b):
    na, nb = normalize_diagonal_orbit(a), normalize_diagonal_orbit(b)
    return float(np.max(np.abs(na.residues - nb.residues)))


def test_shift_infinity_eigenvalues(sys1):
    up = shift_theta_inf(sys1, 1)
    ev = np.linalg.eigvals(up.a_inf)
    target = sys1.theta_inf / 2.0 + 1.0
    err = min(abs(ev[0] - target) + abs(ev[1] + target),
              abs(ev[0] + target) + abs(ev[1] - target))
    assert err < 1e-9
    assert np.max(np.abs(up.theta - sys1.theta)) < 1e-12
    assert abs(up.theta_inf - sys1.theta_inf - 2.0) < 1e-12


def test_shift_infinity_round_trip(sys1):
    up = shift_theta_inf(sys1, 1)
    down = shift_theta_down(up, "inf", 1)
    assert orbit_gap(down, sys1) < 1e-8
    dn = shift_theta_down(sys1, "inf", 1)
    back = shift_theta_inf(dn, 1)
    assert orbit_gap(back, sys1) < 1e-8


def test_shift_infinity_preserves_traces(sys1):
    up = shift_theta_inf(sys1, 1)
    assert np.max(np.abs(traces(up) - traces(sys1))) < 1e-6


def test_finite_pole_shift_round_trip(sys2):
    j = 1
    dn = shift_theta_down(sys2, j, 1)
    assert abs(dn.theta[j] - sys2.theta[j] + 2.0) < 1e-12
    others = [k for k in range(sys2.npoles) if k != j]
    assert np.max(np.abs(dn.theta[others] - sys2.theta[others])) < 1e-12
    assert np.max(np.abs(dn.poles - sys2.poles)) < 1e-14
    back = shift_theta_down(dn, j, -1)
    assert orbit_gap(back, sys2) < 1e-7
    assert np.max(np.abs(traces(dn) - traces(sys2))) < 1e-6


def test_mobius_swap_exchanges_labels(sys2):
    sw = mobius_swap(sys2, 0)
    assert not validate(sw)
    assert abs(sw.theta_inf - sys2.theta[0]) < 1e-12
    assert abs(sw.theta[0] - sys2.theta_inf) < 1e-12
    back = translate(mobius_swap(sw, 0), sys2.poles[0])
    assert np.max(np.abs(np.sort_complex(back.poles)
                         - np.sort_complex(sys2.poles))) < 1e-10
    assert orbit_gap(back, sys2) < 1e-9


@pytest.mark.parametrize("family_param", [0.0, 0.7 - 0.3j])
def test_extend_reduce_round_trip(sys1, family_param):
    ext = extend_with_identity_pole(sys1, 0.4 + 0.9j, family_param)
    assert abs(ext.theta[0] + 2.0) < 1e-12
    data = compute_monodromy(ext, opts=OPTS)
    assert norm(data.matrices[0] - IDENTITY) < 1e-5
    red = reduce_identity_pole(ext, 0, opts=OPTS)
    assert orbit_gap(red, sys1) < 1e-6


def test_extend_family_param_trace_invariant(sys1):
    t_ref = None
    for fp in (0.0, 0.7 - 0.3j, -1.1j):
        ext = extend_with_identity_pole(sys1, 0.4 + 0.9j, fp)
        tt = traces(ext)
        if t_ref is None:
            t_ref = tt
        else:
            assert np.max(np.abs(tt - t_ref)) < 1e-6


def test_reduce_rejects_nontrivial_pole(sys1):
    with pytest.raises(GaugeError):
        reduce_identity_pole(sys1, 0, opts=OPTS)


def test_infinity_extension_round_trip():
    base = translate(random_system(1, np.random.default_rng(7)),
                     0.35 + 0.15j)
    ext = extend_with_trivial_infinity(base, -0.8 + 0.4j, 0.3)
    assert abs(ext.theta_inf + 2.0) < 1e-12
    data = compute_monodromy(ext, opts=OPTS)
    assert norm(data.m_inf - IDENTITY) < 1e-5
    red = reduce_infinity(ext, 0, opts=OPTS)
    assert orbit_gap(red, base) < 1e-6


def hidden_triangular():
    fam = build_triangular_family([0.31, 0.45, 0.27], [1, -1, 1],
                                  -(0.31 - 0.45 + 0.27),
                                  upper=[0.6, -0.2, -0.4])
    s_mix = np.array([[1.0, 0.4 - 0.2j], [-0.3j, 0.9 + 0.1j]], dtype=complex)
    return fam, fam.conjugated(s_mix)


def test_triangularize_recovers_form():
    fam, rot = hidden_triangular()
    tri = triangularize_reducible(rot, opts=OPTS)
    assert np.max(np.abs(tri.residues[:, 1, 0])) < 1e-8
    coords = garnier_coordinates(tri)
    assert np.max(np.abs(coords.rho)) < 1e-8


def test_triangularize_resonant_exponent_path():
    fam, _ = hidden_triangular()
    shifted = shift_theta_down(fam, 0, -1)
    tri = triangularize_reducible(shifted, opts=OPTS)
    assert np.max(np.abs(tri.residues[:, 1, 0])) < 1e-7
    coords = garnier_coordinates(tri)
    assert np.max(np.abs(coords.rho)) < 1e-7
    assert abs(tri.theta_inf - np.sum(tri.theta)) < 1e-7


def test_triangularize_rejects_irreducible(sys1):
    with pytest.raises(GaugeError):
        triangularize_reducible(sys1, opts=OPTS)


def test_translate_moves_poles_only(sys2):
    out = translate(sys2, 1.3 - 0.4j)
    assert np.max(np.abs(out.poles - sys2.poles - (1.3 - 0.4j))) < 1e-14
    assert np.array_equal(out.residues, sys2.residues)
