"""Martingale paraproducts on finite filtered probability spaces."""
from .gundy import GundyParts, gundy_decompose, gundy_report
from .heisenberg import lift, rough_jump_count, rough_variation
from .martingale import AdaptedProcess, Martingale, NotAMartingale, is_martingale, maximal_function, square_function
from .paraproduct import paraproduct, truncated_paraproduct
from .report import CheckReport
from .space import FilteredSpace, SpaceError, StoppingSequence
from .variation import ParaproductKernel, ScalarKernel, jump_count, rho_variation

__version__ = "0.1.0"

__all__ = [
    "AdaptedProcess", "CheckReport", "FilteredSpace", "GundyParts", "Martingale", "NotAMartingale",
    "ParaproductKernel", "ScalarKernel", "SpaceError", "StoppingSequence", "gundy_decompose",
    "gundy_report", "is_martingale", "jump_count", "lift", "maximal_function", "paraproduct",
    "rho_variation", "rough_jump_count", "rough_variation", "square_function", "truncated_paraproduct",
]
