"""Tools for rank-2 Fuchsian systems: monodromy, deformation, gauge surgery,
Garnier Hamiltonian flows and the classical solution families of Painleve VI.

Subpackage layout:

* ``mat2``        small helpers for complex 2x2 matrices
* ``fuchsian``    the system container, validation, spectral coordinates
* ``monodromy``   loop bases, normalized fundamental solutions, monodromy data
* ``schlesinger`` isomonodromic deformation flows of the residue matrices
* ``gauge``       rational gauge transformations (exponent shifts, pole
                  creation/removal, triangularization)
* ``garnier``     Hamiltonian form of the deformation flow, symmetries,
                  parameter classification
* ``classical``   explicit solution families (hypergeometric-reducible,
                  generalized Chazy, quadratic Riccati, Lauricella locus)
* ``cli``         command line front end
"""

__version__ = "0.1.0"


class GarnierLabError(Exception):
    """Base class for domain errors raised by this package."""
