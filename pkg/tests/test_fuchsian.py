"""Container invariants: residue eigenstructure, validation, coordinates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garnier_lab.fuchsian import (
    FuchsianError,
    FuchsianSystem,
    build_triangular_family,
    default_poles,
    garnier_coordinates,
    random_system,
    require_valid,
    rhs_at,
    validate,
)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_systems_validate(n):
    sys = random_system(n, np.random.default_rng(100 + n))
    assert validate(sys) == []
    assert sys.n == n
    assert len(sys.poles) == n + 2


def test_random_system_deterministic():
    a = random_system(2, np.random.default_rng(42))
    b = random_system(2, np.random.default_rng(42))
    assert np.array_equal(a.residues, b.residues)
    assert np.array_equal(a.poles, b.poles)


def test_validate_flags_broken_eigenvalues(sys1):
    res = sys1.residues.copy()
    res[0] = res[0] + np.diag([0.05, 0.0])
    broken = FuchsianSystem(sys1.poles, res, sys1.theta, sys1.theta_inf)
    names = {v.name for v in validate(broken)}
    assert names, "perturbed residue must be flagged"
    with pytest.raises(FuchsianError):
        require_valid(broken)


def test_validate_flags_wrong_infinity_label(sys1):
    broken = FuchsianSystem(sys1.poles, sys1.residues, sys1.theta,
                            sys1.theta_inf + 0.3)
    assert validate(broken), "wrong exponent at infinity must be flagged"


def test_residue_at_infinity_is_minus_sum(sys2):
    a_inf = -sys2.residues.sum(axis=0)
    ev = np.sort_complex(np.linalg.eigvals(a_inf))
    want = np.sort_complex(np.array([sys2.theta_inf / 2,
                                     -sys2.theta_inf / 2]))
    assert np.max(np.abs(ev - want)) < 1e-10


def test_rhs_recovers_residues(sys1):
    lam = sys1.poles[0] + 1e-7
    approx = (lam - sys1.poles[0]) * rhs_at(sys1, lam)
    assert np.max(np.abs(approx - sys1.residues[0])) < 1e-5


def test_default_poles_shape():
    poles = default_poles(4)
    assert len(poles) == 4
    assert poles[-2] == 0.0 and poles[-1] == 1.0
    assert len(np.unique(np.round(poles, 9))) == 4


def test_triangular_family_structure():
    theta = (0.31, 0.45, 0.27)
    eps = (1, -1, 1)
    ti = -(0.31 - 0.45 + 0.27)
    fam = build_triangular_family(theta, eps, ti, upper=[0.6, -0.2, -0.4])
    assert validate(fam) == []
    assert np.max(np.abs(fam.residues[:, 1, 0])) == 0.0
    for k, (t, e) in enumerate(zip(theta, eps)):
        assert abs(fam.residues[k, 0, 0] - e * t / 2) < 1e-14


def test_triangular_family_rejects_open_labels():
    with pytest.raises(FuchsianError):
        build_triangular_family((0.3, 0.4, 0.5), (1, 1, 1), 0.7)


def test_garnier_coordinates_triangular_momenta_vanish():
    fam = build_triangular_family((0.31, 0.45, 0.27), (1, -1, 1),
                                  -(0.31 - 0.45 + 0.27),
                                  upper=[0.6, -0.2, -0.4])
    coords = garnier_coordinates(fam)
    assert np.max(np.abs(coords.rho)) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=0,
                                                          max_value=10_000))
def test_random_system_always_valid(n, seed):
    sys = random_system(n, np.random.default_rng(seed))
    assert validate(sys) == []
