"""Gaussian states, standard subspaces and modular theory in finite and lattice models."""

__version__ = "0.1.0"
