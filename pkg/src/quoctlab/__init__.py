"""quoct-lab: three-qubit-per-atom (quoct) simulator toolkit.

Subpackages cover the single-site operator algebra, the axial-gauge
Kogut-Susskind lattice Hamiltonian, exact and Trotterized dynamics,
a sideband-pulse atom model with gate optimization, readout-protocol
search, and compilation to the native quoct gate set.
"""

__version__ = "0.1.0"
