"""Riemann-Hilbert problems with finite-type singularities at zeta = 1."""
from .laurent import I, LaurentPoly, QI, SymbolMatrix, ZETA

__version__ = "0.1.0"
__all__ = ["I", "LaurentPoly", "QI", "SymbolMatrix", "ZETA", "__version__"]
