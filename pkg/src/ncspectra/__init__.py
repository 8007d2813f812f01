"""Finite truncations of spectral triples on crossed products by endomorphisms.

Submodules: ``operator_core`` (dense linear algebra, Clifford generators),
``spectral`` (weighted spectra and dimension fits), ``crossed`` (covariant
truncations, crossed Dirac), ``words`` (NC-torus rewriting), and the four
models ``torus``, ``rotation``, ``uhf`` and ``gasket``.
"""

from .kernels import BACKEND
from .operator_core import BudgetExceeded, MAX_DIM
from .spectral import WeightedSpectrum, dimension_fit, nat_spectrum, tensor_spectrum

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "MAX_DIM",
    "WeightedSpectrum",
    "__version__",
    "dimension_fit",
    "nat_spectrum",
    "tensor_spectrum",
]
