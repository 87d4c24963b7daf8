"""Anderson Lab - spectral simulation of the renormalized Anderson Hamiltonian."""

__version__ = "0.1.0"
