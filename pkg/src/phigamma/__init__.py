"""Filtered (phi,N)-modules and the (phi,Gamma)-modules they glue to over a windowed Robba ring."""
from .construction import glue, recover_filtered, verify_module
from .errors import PhiGammaError
from .filtered import FilteredModule, hn_slopes, invariants_tn_th, is_admissible
from .membership import SemistableData, membership
from .robba import PrecisionProfile, RobbaElement, atom, frobenius, iota, ord_estimate

__version__ = "0.1.0"

__all__ = [
    "FilteredModule", "PhiGammaError", "PrecisionProfile", "RobbaElement", "SemistableData", "atom",
    "frobenius", "glue", "hn_slopes", "invariants_tn_th", "iota", "is_admissible", "membership",
    "ord_estimate", "recover_filtered", "verify_module",
]
