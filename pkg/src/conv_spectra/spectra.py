"""Exact singular value spectrum of a circular convolution layer.

The layer's linear transformation acts on (m_in, n_h, n_w) feature maps. Its
full matrix is never formed here: the kernel is zero-padded to the feature-map
size and 2D-transformed per channel pair, and the singular values of the
resulting m_out x m_in matrix at each frequency bin, pooled over all
n_h * n_w bins, are exactly the layer's singular values (with multiplicity).
That brings the cost down from a dense SVD of an (n^2 m) sized matrix to
m^2 FFTs plus n^2 small SVDs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChannelCountNotOne
from .fourier import batch_dft2_kernel
from .svd import _svd_stack_arrays
from .types import FeatureShape, Kernel4D, Spectrum, validate_pair, zero_pad


@dataclass(frozen=True)
class FrequencyTransforms:
    """Per-frequency channel-mixing matrices of a layer.

    ``bins[u, v]`` is the complex m_out x m_in matrix collecting, across
    channel pairs, the (u, v) entry of each channel pair's 2D transform.
    """

    bins: np.ndarray

    def __post_init__(self):
        self.bins.flags.writeable = False

    @property
    def feature_shape(self) -> FeatureShape:
        return FeatureShape(self.bins.shape[0], self.bins.shape[1])

    def bin_stack(self) -> np.ndarray:
        """The bins flattened row-major (u outer, v inner) into a (n_h*n_w, m_out, m_in) stack."""
        n_h, n_w, m_out, m_in = self.bins.shape
        return self.bins.reshape(n_h * n_w, m_out, m_in)


def frequency_transforms(
    kernel: Kernel4D, shape: FeatureShape, threads: int = 1
) -> FrequencyTransforms:
    """Zero-pad the kernel to the feature-map size and 2D-transform each channel pair."""
    validate_pair(kernel, shape)
    padded = zero_pad(kernel, shape)
    return FrequencyTransforms(batch_dft2_kernel(padded, threads=threads))


def compute_spectrum(kernel: Kernel4D, shape: FeatureShape, threads: int = 1) -> Spectrum:
    """All singular values of the layer's linear transformation, sorted descending.

    The result is the concatenation of the singular values of every
    frequency-bin matrix; its size is always n_h * n_w * min(m_out, m_in).
    """
    transforms = frequency_transforms(kernel, shape, threads=threads)
    _, values, _ = _svd_stack_arrays(transforms.bin_stack(), compute_vectors=False, threads=threads)
    return Spectrum(np.sort(values, axis=None)[::-1])


def single_channel_eigenvalues(kernel: Kernel4D, shape: FeatureShape) -> np.ndarray:
    """Eigenvalues of a single-channel layer: the 2D transform of the padded
    kernel, flattened row-major. Their magnitudes are the singular values."""
    if kernel.m_out != 1 or kernel.m_in != 1:
        raise ChannelCountNotOne(
            f"expected a 1x1-channel kernel, got m_out={kernel.m_out}, m_in={kernel.m_in}"
        )
    return frequency_transforms(kernel, shape).bins[:, :, 0, 0].ravel()


def operator_norm(kernel: Kernel4D, shape: FeatureShape, threads: int = 1) -> float:
    """Largest singular value of the layer (its Lipschitz constant)."""
    return float(compute_spectrum(kernel, shape, threads=threads).values[0])
