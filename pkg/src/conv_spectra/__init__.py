"""Exact singular value spectra and operator-norm projection for 2D
multi-channel circular convolution layers."""

from .fourier import DftPlan, batch_dft2_kernel, build_f_matrix, dft2
from .projection import (
    ClipReport,
    clip_operator_norm,
    clip_reshaped,
    project_layer,
    restrict_support,
)
from .spectra import (
    FrequencyTransforms,
    compute_spectrum,
    frequency_transforms,
    operator_norm,
    single_channel_eigenvalues,
)
from .svd import SvdResult, svd, svd_batch
from .types import (
    FeatureShape,
    Kernel4D,
    Spectrum,
    SpectrumReport,
    validate_pair,
    zero_pad,
)

__version__ = "0.1.0"

__all__ = [
    "ClipReport",
    "DftPlan",
    "FeatureShape",
    "FrequencyTransforms",
    "Kernel4D",
    "Spectrum",
    "SpectrumReport",
    "SvdResult",
    "batch_dft2_kernel",
    "build_f_matrix",
    "clip_operator_norm",
    "clip_reshaped",
    "compute_spectrum",
    "dft2",
    "frequency_transforms",
    "operator_norm",
    "project_layer",
    "restrict_support",
    "single_channel_eigenvalues",
    "svd",
    "svd_batch",
    "validate_pair",
    "zero_pad",
]
