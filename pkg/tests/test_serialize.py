"""Round-trip fidelity and version gating for the JSON document layer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garnier_lab.fuchsian import random_system
from garnier_lab.garnier import state_from_system
from garnier_lab.monodromy import connection_matrices
from garnier_lab.schlesinger import DeformationPath
from garnier_lab.serialize import (
    SerializeError,
    dump,
    from_jsonable,
    load,
    roundtrip_serialize,
    to_jsonable,
)


def test_system_round_trip_bitwise(sys2):
    back = roundtrip_serialize(sys2)
    assert np.array_equal(back.poles, sys2.poles)
    assert np.array_equal(back.residues, sys2.residues)
    assert np.array_equal(back.theta, sys2.theta)
    assert back.theta_inf == sys2.theta_inf


def test_monodromy_round_trip_bitwise(mono2):
    back = roundtrip_serialize(mono2)
    assert all(np.array_equal(a, b)
               for a, b in zip(back.matrices, mono2.matrices))
    assert np.array_equal(back.m_inf, mono2.m_inf)
    assert np.array_equal(back.r_inf, mono2.r_inf)
    assert back.connections is None and mono2.connections is None
    assert back.basis == mono2.basis
    assert back.frame == mono2.frame


def test_monodromy_round_trip_keeps_connections(mono2):
    data = connection_matrices(mono2)
    back = roundtrip_serialize(data)
    assert back.connections is not None
    assert all(np.array_equal(a, b)
               for a, b in zip(back.connections, data.connections))


def test_state_round_trip_energy_constant_not_stored(sys2):
    state = state_from_system(sys2)
    doc = to_jsonable(state)
    assert doc["format"] == "garnier-v1"
    assert "kappa" not in doc
    back = from_jsonable(doc)
    assert np.array_equal(back.nu, state.nu)
    assert np.array_equal(back.rho, state.rho)
    assert np.array_equal(back.poles, state.poles)


def test_path_round_trip():
    path = DeformationPath(waypoints=((0.3 + 0j, 0.7 + 0j),
                                      (0.3 + 0.2j, 0.9 + 0.1j)),
                           clearance=0.05)
    assert roundtrip_serialize(path) == path


def test_file_round_trip(sys1, tmp_path):
    p = dump(sys1, tmp_path / "sys.json")
    back = load(p)
    assert np.array_equal(back.residues, sys1.residues)
    # trailing newline, so concatenated dumps stay line-separated
    assert p.read_text().endswith("\n")


def test_unknown_version_tag_rejected():
    with pytest.raises(SerializeError, match="fuchsian-v9"):
        from_jsonable({"format": "fuchsian-v9", "n": 1})


def test_malformed_document_rejected():
    with pytest.raises(SerializeError, match="malformed"):
        from_jsonable({"format": "garnier-v1", "nu": [[0.0, 0.0]]})


def test_unknown_object_rejected():
    with pytest.raises(SerializeError):
        to_jsonable(object())


def test_readers_ignore_extra_keys(sys1):
    doc = to_jsonable(sys1)
    doc["annotations"] = {"note": "added by a downstream tool"}
    back = from_jsonable(doc)
    assert np.array_equal(back.residues, sys1.residues)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 3), seed=st.integers(0, 10_000))
def test_random_system_round_trip_property(n, seed):
    sys = random_system(n, np.random.default_rng(seed))
    back = roundtrip_serialize(sys)
    assert np.array_equal(back.poles, sys.poles)
    assert np.array_equal(back.residues, sys.residues)
    assert np.array_equal(back.theta, sys.theta)
    assert back.theta_inf == sys.theta_inf
