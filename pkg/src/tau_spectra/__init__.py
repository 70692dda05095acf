"""Spectra of corner-perturbed tridiagonal Toeplitz matrices and the Markov models built on them."""
from .errors import *  # noqa: F401,F403
from .tau_core import TauParams, SymmetricTridiagonal, build_dense
from .spectral_solver import solve, decompose, closed_form, oracle_eigs

__version__ = "0.1.0"
