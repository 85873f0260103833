"""Exact Stokes-circle algebra, Fourier-Legendre transport, and boundary
diagram synthesis on the wild Riemann sphere."""

from .cyclo import CycNum, OrderCapError, cyclotomic_polynomial, embed, root_of_unity

__version__ = "0.1.0"

__all__ = [
    "CycNum",
    "OrderCapError",
    "cyclotomic_polynomial",
    "embed",
    "root_of_unity",
]
