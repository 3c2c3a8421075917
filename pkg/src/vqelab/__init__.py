"""Statevector VQE laboratory with basin-localized, geometry-conditioned initialization.

Subpackages / modules:
    pauli        Pauli-string Hamiltonians, exact spectra, chain surrogate model
    circuit      brick-wall hardware-efficient ansatz statevector engine
    optim        L-BFGS, SPSA, basin hopping, AdamW trainer, shot-noise wrapper
    geometry     molecular geometries, rigid motions, invariant features
    precond      geometry -> circuit-angle preconditioner, gauge-aware training
    diagnostics  gradient-variance scans, Hessian spectra, tail statistics,
                 disorder success scans, shot-cost model
    cli          command-line entry point
"""

__version__ = "0.1.0"
