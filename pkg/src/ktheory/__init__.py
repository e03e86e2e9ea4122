"""Computational K-theory workbench."""

from .abelian import FGAbelianGroup, IntMatrix, cokernel, direct_sum, mult_by_n_kernel_cokernel, order, smith_normal_form
from .errors import InputError, KTheoryError, ResolutionError, VerificationError

__all__ = [
    "FGAbelianGroup",
    "IntMatrix",
    "cokernel",
    "direct_sum",
    "mult_by_n_kernel_cokernel",
    "order",
    "smith_normal_form",
    "InputError",
    "KTheoryError",
    "ResolutionError",
    "VerificationError",
]
