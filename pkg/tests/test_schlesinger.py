"""Deformation flows: isomonodromy, reversibility, path safety."""

import numpy as np
import pytest

from garnier_lab.fuchsian import validate
from garnier_lab.monodromy import IntegratorOptions
from garnier_lab.schlesinger import (
    DeformationPath,
    FlowError,
    flow,
    verify_isomonodromy,
)

OPTS = IntegratorOptions(rtol=1e-11, atol=1e-13)


def short_path(sys, step=0.1 + 0.07j, clearance=0.05):
    stop = sys.poles.copy()
    stop[0] = stop[0] + step
    return DeformationPath(np.vstack([sys.poles, stop]), clearance=clearance)


def test_flow_preserves_validity_and_moves_poles(sys1):
    path = short_path(sys1)
    out = flow(sys1, path, OPTS)
    assert validate(out) == []
    assert abs(out.poles[0] - sys1.poles[0] - (0.1 + 0.07j)) < 1e-9
    assert np.max(np.abs(out.poles[1:] - sys1.poles[1:])) < 1e-12


def test_flow_is_isomonodromic(sys1):
    out = flow(sys1, short_path(sys1), OPTS)
    assert verify_isomonodromy(sys1, out, opts=OPTS) < 1e-5


def test_flow_reverses(sys1):
    path = short_path(sys1)
    out = flow(sys1, path, OPTS)
    back = flow(out, DeformationPath(path.waypoints[::-1],
                                     clearance=path.clearance), OPTS)
    assert np.max(np.abs(back.residues - sys1.residues)) < 1e-8
    assert np.max(np.abs(back.poles - sys1.poles)) < 1e-12


def test_flow_exponents_invariant(sys2):
    out = flow(sys2, short_path(sys2), OPTS)
    assert np.max(np.abs(out.theta - sys2.theta)) < 1e-12
    assert abs(out.theta_inf - sys2.theta_inf) < 1e-12


def test_flow_samples(sys1):
    path = short_path(sys1)
    final, samples = flow(sys1, path, OPTS, n_samples=5)
    assert len(samples) == 5
    # samples run from the start to the end of the path
    t_last, sys_last = samples[-1]
    assert np.max(np.abs(sys_last.residues - final.residues)) < 1e-10


def test_collision_path_rejected(sys1):
    # steer the moving pole straight onto the anchor at 0
    stop = sys1.poles.copy()
    stop[0] = 0.0
    path = DeformationPath(np.vstack([sys1.poles, stop]), clearance=0.05)
    with pytest.raises(FlowError):
        path.require_clear()
    with pytest.raises(FlowError):
        flow(sys1, path, OPTS)
