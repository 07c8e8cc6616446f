"""H(b) norms, Pythagorean pairs and summability means of Taylor partial sums."""

from .errors import CertificationError, HbsummaError, QuadratureError, ValidationError
from .hb import HbContext, HbVector, dilate_bound_constant, f_plus, hb_norm, sn_growth_table
from .pair import PythagoreanPair, check_nonextreme, fejer_riesz, outer_from_log_modulus, preset_pair
from .series import TaylorSeries, cauchy_product, dilate, divide, evaluate, h2_norm, partial_sum
from .summ import SummabilityMethod, VectorSequence, builtin, mean_of_partial_sums, means

__all__ = [
    "CertificationError",
    "HbContext",
    "HbVector",
    "HbsummaError",
    "PythagoreanPair",
    "QuadratureError",
    "SummabilityMethod",
    "TaylorSeries",
    "ValidationError",
    "VectorSequence",
    "builtin",
    "cauchy_product",
    "check_nonextreme",
    "dilate",
    "dilate_bound_constant",
    "divide",
    "evaluate",
    "f_plus",
    "fejer_riesz",
    "h2_norm",
    "hb_norm",
    "mean_of_partial_sums",
    "means",
    "outer_from_log_modulus",
    "partial_sum",
    "preset_pair",
    "sn_growth_table",
]
