"""Numerical tests of psi-epistemic ontological models against relativistic helicity observables."""

__version__ = "0.1.0"
