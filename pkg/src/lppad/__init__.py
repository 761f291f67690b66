"""Linear prediction padding for rasters.

Pads image-like arrays by recursively predicting border pixels from the
raster's own fitted autoregressive structure, alongside classic baselines
(zero, replication, polynomial extrapolation).  Companion modules provide
the closed-form prediction error theory on Gaussian process models, a
convolution tiling harness for seam analysis, and simple raster file I/O.
"""

from .autocorrelation import (
    AutocorrelationMap,
    autocorrelation_direct,
    autocorrelation_fft,
    covariance_from_autocorrelation,
    prepare_windowed,
    tukey_taper,
)
from .covariance import (
    DEFAULT_RIDGE,
    FitError,
    covariance_statistics,
    safe_divide,
    solve_general,
    solve_p1,
    solve_p2,
)
from .geometry import (
    PASS_ORDER,
    Direction,
    Neighborhood,
    ValidRegion,
    canonical_neighborhood,
    corner_variant,
    rotate,
    valid_region,
)
from .io import read_raster, write_raster
from .pad import (
    CANONICAL_METHODS,
    ARModel,
    PadAmounts,
    PaddingMethod,
    fit_direction,
    fit_models,
    lagrange_coefficients,
    pad,
    parse_method,
)
from .stabilize import (
    PolePair,
    gain_compensation,
    magnitude_response,
    poles_of,
    stabilize,
    stabilize_p1,
    stabilize_p2,
)
from .theory import (
    THEORY_METHODS,
    NmseCurve,
    default_sigma_grid,
    empirical_curves,
    empirical_nmse,
    gaussian_kernel,
    levinson_optimal,
    method_rule,
    nmse_curves,
    sample_gaussian_process,
    theoretical_nmse,
    write_curves_csv,
)
from .tiling import (
    ConvPipeline,
    ConvStage,
    ShellReport,
    convolve_valid,
    default_pipeline,
    equivariance_deviation,
    run_pipeline,
    shell_mse,
    stitch_tiles,
)

__version__ = "0.1.0"

__all__ = [
    "ARModel",
    "AutocorrelationMap",
    "CANONICAL_METHODS",
    "ConvPipeline",
    "ConvStage",
    "DEFAULT_RIDGE",
    "Direction",
    "FitError",
    "Neighborhood",
    "NmseCurve",
    "PASS_ORDER",
    "PadAmounts",
    "PaddingMethod",
    "PolePair",
    "ShellReport",
    "THEORY_METHODS",
    "ValidRegion",
    "autocorrelation_direct",
    "autocorrelation_fft",
    "canonical_neighborhood",
    "convolve_valid",
    "corner_variant",
    "covariance_from_autocorrelation",
    "covariance_statistics",
    "default_pipeline",
    "default_sigma_grid",
    "empirical_curves",
    "empirical_nmse",
    "equivariance_deviation",
    "fit_direction",
    "fit_models",
    "gain_compensation",
    "gaussian_kernel",
    "lagrange_coefficients",
    "levinson_optimal",
    "magnitude_response",
    "method_rule",
    "nmse_curves",
    "pad",
    "parse_method",
    "poles_of",
    "prepare_windowed",
    "read_raster",
    "rotate",
    "run_pipeline",
    "safe_divide",
    "sample_gaussian_process",
    "shell_mse",
    "solve_general",
    "solve_p1",
    "solve_p2",
    "stabilize",
    "stabilize_p1",
    "stabilize_p2",
    "stitch_tiles",
    "theoretical_nmse",
    "tukey_taper",
    "valid_region",
    "write_curves_csv",
    "write_raster",
]
