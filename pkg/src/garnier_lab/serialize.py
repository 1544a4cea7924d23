"""Versioned JSON schemas for the core data types.

Every schema carries a ``format`` tag with a ``-v1`` suffix; complex numbers
are stored as ``[re, im]`` pairs everywhere so files diff cleanly and round
trips are bit-for-bit (Python float repr is shortest-round-trip).  The
reader refuses documents whose ``format`` tag it does not know.

Schemas:

* ``fuchsian-v1``   poles, residues, exponent labels of a linear system;
* ``monodromy-v1``  the full monodromy record (matrices, resonance data,
  connection matrices, loop-basis geometry, diagnostics);
* ``garnier-v1``    a Hamiltonian state; the energy constant is derived
  data and is deliberately not stored;
* ``path-v1``       a deformation path (waypoints plus clearance).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import GarnierLabError
from .fuchsian import FuchsianSystem
from .garnier import GarnierState
from .monodromy import LoopBasis, MonodromyData
from .schlesinger import DeformationPath

__all__ = [
    "SerializeError",
    "to_jsonable",
    "from_jsonable",
    "dump",
    "load",
    "roundtrip_serialize",
]


class SerializeError(GarnierLabError):
    pass


def _c(value) -> list:
    z = complex(value)
    return [z.real, z.imag]


def _cseq(values) -> list:
    return [_c(v) for v in np.asarray(values, dtype=complex).reshape(-1)]


def _cmat(mat) -> list:
    """A 2x2 matrix as four [re, im] pairs, row major."""
    return _cseq(np.asarray(mat, dtype=complex).reshape(4))


def _read_c(pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise SerializeError(f"expected an [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def _read_cseq(items) -> np.ndarray:
    return np.array([_read_c(p) for p in items], dtype=complex)


def _read_cmat(items) -> np.ndarray:
    vals = _read_cseq(items)
    if vals.size != 4:
        raise SerializeError("matrix entries must hold four [re, im] pairs")
    return vals.reshape(2, 2)


def _system_doc(sys: FuchsianSystem) -> dict:
    return {
        "format": "fuchsian-v1",
        "n": int(sys.n),
        "poles": _cseq(sys.poles),
        "residues": [_cmat(a) for a in sys.residues],
        "theta": _cseq(sys.theta),
        "theta_inf": _c(sys.theta_inf),
    }


def _system_from(doc: dict) -> FuchsianSystem:
    return FuchsianSystem(
        poles=_read_cseq(doc["poles"]),
        residues=np.array([_read_cmat(m) for m in doc["residues"]]),
        theta=_read_cseq(doc["theta"]),
        theta_inf=_read_c(doc["theta_inf"]),
    )


def _basis_doc(basis: LoopBasis) -> dict:
    return {
        "base_point": _c(basis.base_point),
        "eta": float(basis.eta),
        "order": [int(k) for k in basis.order],
        "radii": [float(r) for r in basis.radii],
        "staging": float(basis.staging),
    }


def _basis_from(doc: dict) -> LoopBasis:
    return LoopBasis(
        base_point=_read_c(doc["base_point"]),
        eta=float(doc["eta"]),
        order=tuple(int(k) for k in doc["order"]),
        radii=tuple(float(r) for r in doc["radii"]),
        staging=float(doc["staging"]),
    )


def _monodromy_doc(data: MonodromyData) -> dict:
    return {
        "format": "monodromy-v1",
        "matrices": [_cmat(m) for m in data.matrices],
        "m_inf": _cmat(data.m_inf),
        "r_poles": [_cmat(r) for r in data.r_poles],
        "r_inf": _cmat(data.r_inf),
        "connections": (None if data.connections is None
                        else [_cmat(m) for m in data.connections]),
        "basis": _basis_doc(data.basis),
        "theta": _cseq(data.theta),
        "theta_inf": _c(data.theta_inf),
        "frame": str(data.frame),
        "diagnostics": {str(k): float(v)
                        for k, v in dict(data.diagnostics).items()},
    }


def _monodromy_from(doc: dict) -> MonodromyData:
    conns = doc.get("connections")
    return MonodromyData(
        matrices=tuple(_read_cmat(m) for m in doc["matrices"]),
        m_inf=_read_cmat(doc["m_inf"]),
        r_poles=tuple(_read_cmat(r) for r in doc["r_poles"]),
        r_inf=_read_cmat(doc["r_inf"]),
        connections=(None if conns is None
                     else tuple(_read_cmat(m) for m in conns)),
        basis=_basis_from(doc["basis"]),
        theta=tuple(_read_cseq(doc["theta"])),
        theta_inf=_read_c(doc["theta_inf"]),
        frame=str(doc["frame"]),
        diagnostics=dict(doc.get("diagnostics", {})),
    )


def _state_doc(state: GarnierState) -> dict:
    # the energy constant kappa(theta, theta_inf) is derived, never stored
    return {
        "format": "garnier-v1",
        "nu": _cseq(state.nu),
        "rho": _cseq(state.rho),
        "poles": _cseq(state.poles),
        "theta": _cseq(state.theta),
        "theta_inf": _c(state.theta_inf),
    }


def _state_from(doc: dict) -> GarnierState:
    return GarnierState(
        nu=_read_cseq(doc["nu"]),
        rho=_read_cseq(doc["rho"]),
        poles=_read_cseq(doc["poles"]),
        theta=_read_cseq(doc["theta"]),
        theta_inf=_read_c(doc["theta_inf"]),
    )


def _path_doc(path: DeformationPath) -> dict:
    return {
        "format": "path-v1",
        "waypoints": [_cseq(w) for w in path.waypoints],
        "clearance": float(path.clearance),
    }


def _path_from(doc: dict) -> DeformationPath:
    return DeformationPath(
        waypoints=tuple(tuple(_read_cseq(w)) for w in doc["waypoints"]),
        clearance=float(doc["clearance"]),
    )


_WRITERS = (
    (FuchsianSystem, _system_doc),
    (MonodromyData, _monodromy_doc),
    (GarnierState, _state_doc),
    (DeformationPath, _path_doc),
)

_READERS = {
    "fuchsian-v1": _system_from,
    "monodromy-v1": _monodromy_from,
    "garnier-v1": _state_from,
    "path-v1": _path_from,
}


def to_jsonable(value) -> dict:
    """Schema document (plain dict) for a core type."""
    for cls, writer in _WRITERS:
        if isinstance(value, cls):
            return writer(value)
    raise SerializeError(f"no schema for objects of type {type(value).__name__}")


def from_jsonable(doc: dict):
    """Rebuild a core object from its schema document."""
    if not isinstance(doc, dict):
        raise SerializeError("document must be a JSON object")
    tag = doc.get("format")
    reader = _READERS.get(tag)
    if reader is None:
        known = ", ".join(sorted(_READERS))
        raise SerializeError(
            f"unknown or mismatched schema version {tag!r} (known: {known})")
    try:
        return reader(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializeError(f"malformed {tag} document: {exc}") from exc


def dump(value, path) -> Path:
    """Write a core object to ``path`` as schema JSON; returns the path."""
    p = Path(path)
    p.write_text(json.dumps(to_jsonable(value), indent=1) + "\n")
    return p


def load(path):
    """Read a schema JSON file back into its core object."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SerializeError(f"{p}: not valid JSON ({exc})") from exc
    return from_jsonable(doc)


def roundtrip_serialize(value):
    """Serialize then deserialize; complex entries survive bit-for-bit."""
    return from_jsonable(json.loads(json.dumps(to_jsonable(value))))
