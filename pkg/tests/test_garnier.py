"""Hamiltonian side: energy constant, gradients, flows, symmetries, strata."""

import numpy as np
import pytest

from garnier_lab.fuchsian import garnier_coordinates, random_system
from garnier_lab.garnier import (
    GarnierError,
    GarnierState,
    classify_parameters,
    garnier_flow,
    hamiltonian,
    hamiltonian_gradients,
    kappa,
    okamoto_w,
    pvi_from_theta,
    pvi_residual,
    state_from_system,
    symmetry_T,
    track_roots,
)
from garnier_lab.monodromy import IntegratorOptions
from garnier_lab.schlesinger import DeformationPath, flow

OPTS = IntegratorOptions(rtol=1e-11, atol=1e-13)


def test_energy_constant_value():
    # kappa = ((sum theta - 1)^2 - (theta_inf - 1)^2) / 4
    val = kappa((0.3, 0.4, 0.5), -1.2)
    want = ((1.2 - 1.0) ** 2 - (-1.2 - 1.0) ** 2) / 4.0
    assert abs(val - want) < 1e-14


def test_energy_constant_vanishes_on_locus_labels():
    # theta_inf = sum(theta) makes the constant vanish identically
    theta = (-0.2, -0.3, -0.25)
    assert abs(kappa(theta, sum(theta))) < 1e-15


def test_state_from_system_round_trip(sys2):
    st = state_from_system(sys2)
    assert st.n == 2
    assert np.max(np.abs(st.poles - sys2.poles)) < 1e-12
    coords = garnier_coordinates(sys2)
    assert np.max(np.abs(st.nu - np.asarray(coords.nu))) < 1e-12
    assert np.max(np.abs(st.rho - np.asarray(coords.rho))) < 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_hamiltonian_gradients_match_finite_differences(n):
    sys = random_system(n, np.random.default_rng(31 + n))
    st = state_from_system(sys)
    h = 1e-6
    for i in range(n):
        d_nu, d_rho = hamiltonian_gradients(st, i)
        for j in range(n):
            for which, grad in (("nu", d_nu), ("rho", d_rho)):
                def bump(s):
                    nu = st.nu.copy()
                    rho = st.rho.copy()
                    if which == "nu":
                        nu[j] += s
                    else:
                        rho[j] += s
                    return st.with_coordinates(nu, rho)
                fd = (hamiltonian(bump(h), i) - hamiltonian(bump(-h), i)) \
                    / (2 * h)
                assert abs(fd - grad[j]) < 1e-5


def test_flow_matches_linear_side(sys1):
    # moving the poles through the Hamiltonian equations lands on the same
    # state as deforming the linear system and reading its coordinates
    st0 = state_from_system(sys1)
    stop = sys1.poles.copy()
    stop[0] += 0.21 + 0.13j
    path = DeformationPath(np.vstack([sys1.poles, stop]), clearance=0.05)
    path.require_clear()
    st1 = garnier_flow(st0, path, OPTS)
    st_true = state_from_system(flow(sys1, path, OPTS))
    assert np.max(np.abs(st1.nu - st_true.nu)) < 1e-8
    assert np.max(np.abs(st1.rho - st_true.rho)) < 1e-8


def test_track_roots_matches_permutation():
    prev = np.array([0.3 + 0.1j, 1.7 - 0.4j])
    new = np.array([1.69 - 0.41j, 0.31 + 0.11j])
    matched = track_roots(prev, new)
    assert abs(matched[0] - (0.31 + 0.11j)) < 1e-12
    assert abs(matched[1] - (1.69 - 0.41j)) < 1e-12


@pytest.mark.parametrize("which", [0, "one", "infinity"])
def test_symmetry_involutions(which, sys2):
    st = state_from_system(sys2)
    st2 = symmetry_T(symmetry_T(st, which), which)
    assert np.max(np.abs(st2.nu - st.nu)) < 1e-10
    assert np.max(np.abs(st2.rho - st.rho)) < 1e-10
    assert np.max(np.abs(st2.theta - st.theta)) < 1e-10
    assert abs(st2.theta_inf - st.theta_inf) < 1e-10


def test_symmetry_infinity_exchanges_one_anchor():
    st = state_from_system(random_system(1, np.random.default_rng(3)))
    out = symmetry_T(st, "infinity")
    assert abs(out.theta[-1] - (st.theta_inf - 1.0)) < 1e-12
    assert abs(out.theta_inf - (st.theta[-1] + 1.0)) < 1e-12


def test_symmetry_flow_equivariance(sys1):
    # T(flow(s)) = flow(T(s)) at matched endpoints
    st = state_from_system(sys1)
    stop = sys1.poles.copy()
    stop[0] += 0.12 + 0.08j
    path = DeformationPath(np.vstack([sys1.poles, stop]), clearance=0.04)
    path.require_clear()
    s1 = garnier_flow(st, path, OPTS)
    t_s1 = symmetry_T(s1, "one")
    t_s0 = symmetry_T(st, "one")
    tpath = DeformationPath(np.vstack([t_s0.poles, t_s1.poles]),
                            clearance=0.02)
    tpath.require_clear()
    s2 = garnier_flow(t_s0, tpath, OPTS)
    assert np.max(np.abs(t_s1.nu - s2.nu)) < 1e-7
    assert np.max(np.abs(t_s1.rho - s2.rho)) < 1e-7


def test_symmetry_rejects_bad_index(sys1):
    st = state_from_system(sys1)
    with pytest.raises(GarnierError):
        symmetry_T(st, 5)


def test_scalar_equation_parameters():
    params = pvi_from_theta((0.3, 0.4, 0.5), -1.2)
    assert abs(params.alpha - 0.5 * (-1.2 - 1.0) ** 2) < 1e-14
    assert len(params.b) == 4
    # a known non-solution must leave a visible residual
    assert abs(pvi_residual(0.4, 0.3 + 0.1j, 0.2, 0.1, params)) > 1e-3


@pytest.mark.parametrize("which", [0, 1, 3, 4])
def test_okamoto_involutions_square_to_identity(which):
    b = pvi_from_theta((0.3, 0.4, 0.5), -1.2).b
    y, p, x = 0.37 + 0.21j, -0.8 + 0.5j, 0.45 + 0.05j
    y1, p1, b1 = okamoto_w(y, p, x, b, which)
    y2, p2, b2 = okamoto_w(y1, p1, x, b1, which)
    assert abs(y2 - y) < 1e-10
    assert abs(p2 - p) < 1e-10
    assert np.max(np.abs(np.asarray(b2) - np.asarray(b))) < 1e-12


STRATA_CASES = [
    ((0.3, 0.3, 0.4), 1.4, 0),    # outside every stratum
    ((0.3, 0.4, 0.5), -1.2, 1),   # one integer pairing
    ((0.25, 0.25, 0.25), 0.25, 3),
    ((0.5, 0.5, 0.5), 0.5, 4),
]


@pytest.mark.parametrize("theta,ti,rank", STRATA_CASES)
def test_parameter_strata_ranks(theta, ti, rank):
    result = classify_parameters(pvi_from_theta(theta, ti).b)
    assert result.rank == rank
    assert result.in_m == (rank >= 1)
    assert result.in_p == (rank >= 2)
    assert result.in_l == (rank >= 3)
    assert result.in_d == (rank >= 4)


def test_parameter_strata_rank_two_direct():
    result = classify_parameters((0.5, 0.5, 0.1234, 0.0567))
    assert result.rank == 2
    assert result.in_p and not result.in_l
