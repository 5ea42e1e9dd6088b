"""Exact-arithmetic tools for even lattices, theta series and dual extremal classification.

Subpackages work bottom-up:

- ``intmat``    exact integer/rational matrix algebra (HNF, SNF, determinants, inverses)
- ``qseries``   q-expansions with exact rational coefficients
- ``lll``       exact LLL reduction of Gram matrices
- ``shells``    vector enumeration (Fincke-Pohst), theta series, minima
- ``qforms``    lattices, duals, adjoints, discriminant forms, local invariants
- ``isometry``  isometry testing and automorphism groups
- ``genus``     maximality, overlattices, Kneser neighbors, genus enumeration
- ``modforms``  modular form spaces M_k(N)^*, operators, extremal forms
- ``classify``  dual extremal lattices, designs, level-2 structure theory
- ``catalog``   named lattices and glue constructions
- ``cli``       the ``maxlat`` command line tool
"""

from maxlat.qforms import Lattice, QLattice, DiscriminantForm  # noqa: F401

__all__ = ["Lattice", "QLattice", "DiscriminantForm"]
__version__ = "0.1.0"
