"""Unit checks for the 2x2 matrix helpers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garnier_lab.mat2 import (
    IDENTITY,
    Mat2Error,
    asmat,
    diagonalizer,
    eig_jordan,
    eigenvalues,
    inv,
    match_order,
    norm,
    scalar_class,
)

finite = st.floats(min_value=-5, max_value=5, allow_nan=False)


def cxmat(a, b, c, d):
    return np.array([[a, b], [c, d]], dtype=complex)


def test_inv_roundtrip():
    m = cxmat(1.2 + 0.3j, -0.4, 0.9j, 2.0 - 1.0j)
    assert norm(inv(m) @ m - IDENTITY) < 1e-14
    assert norm(m @ inv(m) - IDENTITY) < 1e-14


def test_inv_rejects_singular():
    with pytest.raises(Mat2Error):
        inv(cxmat(1.0, 2.0, 0.5, 1.0))


def test_eigenvalues_match_numpy():
    m = cxmat(0.3 + 1j, 2.0, -0.7, 1.1 - 0.2j)
    ours = sorted(eigenvalues(m), key=lambda z: (z.real, z.imag))
    ref = sorted(np.linalg.eigvals(m), key=lambda z: (z.real, z.imag))
    assert max(abs(a - b) for a, b in zip(ours, ref)) < 1e-12


def test_eig_jordan_defective_block():
    ej = eig_jordan(cxmat(1.0, 1.0, 0.0, 1.0))
    assert not ej.diagonalizable
    assert abs(ej.eigenvalues[0] - 1.0) < 1e-9
    assert abs(ej.eigenvalues[1] - 1.0) < 1e-9


def test_diagonalizer_orders_requested_eigenvalue_first():
    m = cxmat(2.0, 1.0, 0.0, -1.0)
    g = diagonalizer(m, -1.0)
    d = inv(g) @ m @ g
    assert abs(d[0, 0] + 1.0) < 1e-10
    assert abs(d[1, 1] - 2.0) < 1e-10
    assert abs(d[0, 1]) + abs(d[1, 0]) < 1e-10


def test_match_order():
    assert match_order((2.0, -1.0), -1.0) == (1, 0)
    assert match_order((2.0, -1.0), 2.1) == (0, 1)


def test_scalar_class():
    assert scalar_class(IDENTITY) == "plus"
    assert scalar_class(-IDENTITY) == "minus"
    assert scalar_class(cxmat(1.0, 0.5, 0.0, 1.0)) == "none"


@settings(max_examples=30, deadline=None)
@given(finite, finite, finite, finite)
def test_inv_property(a, b, c, d):
    m = asmat([[a, b], [c, d]])
    det = a * d - b * c
    if abs(det) < 1e-3:
        return
    assert norm(inv(m) @ m - IDENTITY) < 1e-9
