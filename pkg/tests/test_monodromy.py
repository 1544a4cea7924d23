"""Monodromy computation: exact commuting oracle, group laws, resonance."""

import numpy as np
import pytest

from garnier_lab.fuchsian import FuchsianSystem, build_triangular_family
from garnier_lab.gauge import extend_with_identity_pole
from garnier_lab.mat2 import IDENTITY, norm
from garnier_lab.monodromy import (
    IntegratorOptions,
    LoopBasis,
    check_relations,
    classify_group,
    compute_monodromy,
    connection_matrices,
    expected_m_inf,
    ordered_product,
)

OPTS = IntegratorOptions()


def diagonal_system():
    # commuting residues: every monodromy matrix is exp(2 pi i A_k) exactly
    theta = np.array([0.31, 0.47, -0.22], dtype=complex)
    poles = np.array([0.4 + 0.2j, 0.0, 1.0], dtype=complex)
    res = np.array([np.diag([t / 2, -t / 2]) for t in theta])
    return FuchsianSystem(poles, res, theta, -theta.sum())


def test_commuting_oracle_matches_exponentials():
    sys_d = diagonal_system()
    data = compute_monodromy(sys_d, opts=OPTS)
    for k, t in enumerate(sys_d.theta):
        want = np.diag([np.exp(1j * np.pi * t), np.exp(-1j * np.pi * t)])
        assert norm(data.matrices[k] - want) < 1e-9
    want_inf = expected_m_inf(sys_d.theta_inf, 0 * IDENTITY)
    assert norm(data.m_inf - want_inf) < 1e-9


@pytest.mark.parametrize("fixture", ["mono1", "mono2"])
def test_trace_law(fixture, request):
    data = request.getfixturevalue(fixture)
    for m, t in zip(data.matrices, data.theta):
        assert abs(np.trace(m) - 2.0 * np.cos(np.pi * t)) < 1e-6
    assert abs(np.trace(data.m_inf)
               - 2.0 * np.cos(np.pi * data.theta_inf)) < 1e-6


@pytest.mark.parametrize("fixture", ["mono1", "mono2"])
def test_cyclic_relation(fixture, request):
    data = request.getfixturevalue(fixture)
    rel = check_relations(data)
    assert rel["cyclic"] < 1e-6
    assert max(rel["eigen"]) < 1e-6
    assert rel["inf_consistency"] < 1e-6
    assert norm(data.m_inf @ ordered_product(data) - IDENTITY) < 1e-6


def test_determinism(sys1, mono1):
    again = compute_monodromy(sys1, opts=OPTS)
    for a, b in zip(again.matrices, mono1.matrices):
        assert np.array_equal(a, b)
    assert np.array_equal(again.m_inf, mono1.m_inf)


def test_base_frame_preserves_traces(sys1, mono1):
    data_b = compute_monodromy(sys1, opts=OPTS, frame="base")
    for a, b in zip(data_b.matrices, mono1.matrices):
        assert abs(np.trace(a) - np.trace(b)) < 1e-8
    # the frames are conjugate, not equal
    assert any(norm(a - b) > 1e-6
               for a, b in zip(data_b.matrices, mono1.matrices))


def test_loop_basis_auto_geometry(sys2):
    basis = LoopBasis.auto(sys2.poles)
    assert len(basis.order) == len(sys2.poles)
    assert sorted(basis.order) == list(range(len(sys2.poles)))
    assert all(r > 0 for r in basis.radii)


def test_connection_matrices_reconstruct(mono1):
    data = connection_matrices(mono1)
    assert data.connections is not None
    rel = check_relations(data)
    assert rel["cyclic"] < 1e-6
    for c in data.connections:
        assert np.all(np.isfinite(c))
    for k, (c, t) in enumerate(zip(data.connections, data.theta)):
        local = np.diag([np.exp(1j * np.pi * t), np.exp(-1j * np.pi * t)])
        recon = np.linalg.solve(c, local @ c)
        assert norm(recon - data.matrices[k]) < 1e-5


def test_resonant_trivial_pole_r_matrix(sys1):
    # an added exponent-(-2) pole is resonant but log-free: M = 1, R acts
    # trivially on the continuation
    ext = extend_with_identity_pole(sys1, 0.4 + 0.9j)
    data = compute_monodromy(ext, opts=OPTS)
    assert abs(ext.theta[0] + 2.0) < 1e-12
    assert norm(data.matrices[0] - IDENTITY) < 1e-5


def test_classify_reducible_triangular():
    fam = build_triangular_family((0.31, 0.45, 0.27), (1, -1, 1),
                                  -(0.31 - 0.45 + 0.27),
                                  upper=[0.6, -0.2, -0.4])
    data = compute_monodromy(fam, opts=OPTS)
    result = classify_group(data)
    assert result.reducible
    assert result.invariant_vector is not None
    assert result.l == 0


def test_classify_generic_irreducible(mono2):
    result = classify_group(mono2)
    assert not result.reducible
    assert result.l == 0
    assert not result.scalar_indices
