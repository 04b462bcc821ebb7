"""Localized data, the second Picard iterate and the lower-bound checks behind
the norm-inflation argument."""

from .data import Box, GridTooSmallError, LocalizedData, build_data, data_boxes
from .kernels import (LowFreqResult, QuadratureError, a2_lowfreq_norm, duhamel_integrand,
                      q2_kernel, q2_split_1d)
from .lemmas import (GeometryReport, LemmaReport, geometry_check_2d, kernel_p,
                     lemma_lower_bound_check)
from .picard import (low_region_norm, picard_a2, second_iterate, support_fraction)
from .regimes import IllposedRegime
from .sweep import InflationReport, inflation_sweep

__all__ = [
    "Box", "GridTooSmallError", "LocalizedData", "build_data", "data_boxes",
    "LowFreqResult", "QuadratureError", "a2_lowfreq_norm", "duhamel_integrand", "q2_kernel",
    "q2_split_1d", "GeometryReport", "LemmaReport", "geometry_check_2d", "kernel_p",
    "lemma_lower_bound_check", "low_region_norm", "picard_a2", "second_iterate",
    "support_fraction", "IllposedRegime", "InflationReport", "inflation_sweep",
]
