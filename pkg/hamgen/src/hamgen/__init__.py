"""Offline molecular-Hamiltonian generator.

Produces self-checked qubit-Hamiltonian interchange documents (JSON) from
minimal-basis restricted Hartree-Fock plus Jordan-Wigner, with exact
diagonalization references attached.
"""

__version__ = "0.1.0"

from .bundles import (  # noqa: F401
    GeneratedBundle,
    GenerationError,
    MoleculeRequest,
    diatomic_request,
    generate,
    generate_scan,
    h_chain_request,
    rotated_h4_dataset,
)
from .scf import SCFError, SCFResult, run_rhf  # noqa: F401
