"""Projection of a convolution layer onto an operator-norm ball.

Clipping the per-frequency singular values to [0, bound] and transforming back
is the Frobenius-nearest convolution (over full n x n support) whose operator
norm is at most the bound. Cropping back to the original k x k support is the
Frobenius projection onto small-support convolutions; alternating the two
moves toward a small-support kernel inside the ball.

Also provided: the cheaper heuristic that clips the singular values of the
kernel flattened to a (k_h*k_w*m_in) x m_out matrix. That bounds the flattened
matrix's norm, which in general differs from the layer's operator norm.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BadSupport, ImaginaryResidual, ValidationError
from .fourier import _transform_spatial
from .spectra import frequency_transforms, operator_norm
from .svd import _svd_stack_arrays, svd
from .types import FeatureShape, Kernel4D, validate_pair, zero_pad

# Residual imaginary mass beyond this (relative) threshold means the
# reconstructed bins lost conjugate symmetry, which exact arithmetic forbids.
_IMAG_ERROR_REL = 1e-6


@dataclass(frozen=True)
class ClipReport:
    """What one clipping pass did to a layer."""

    requested_bound: float
    norm_before: float
    norm_after_clip: float
    norm_after_restriction: float
    bins_modified: int
    max_imaginary_residual: float


def clip_operator_norm(
    kernel: Kernel4D, shape: FeatureShape, bound: float, threads: int = 1
) -> tuple[Kernel4D, ClipReport]:
    """Project the layer onto {operator norm <= bound}.

    Per frequency bin: thin SVD, clamp singular values from above at ``bound``,
    reconstruct, inverse-transform, and drop the (roundoff-sized) imaginary
    part. The returned kernel has full (n_h, n_w) support and its spectrum is
    exactly min(original spectrum, bound) elementwise; when nothing exceeds
    the bound the zero-padded input is returned unchanged.
    """
    validate_pair(kernel, shape)
    if bound <= 0.0:
        raise ValidationError(f"bound must be positive, got {bound}")
    transforms = frequency_transforms(kernel, shape, threads=threads)
    stack = transforms.bin_stack()
    u, values, vh = _svd_stack_arrays(stack, compute_vectors=True, threads=threads)
    norm_before = float(values.max(initial=0.0))
    modified = int(np.count_nonzero((values > bound).any(axis=1)))
    padded = zero_pad(kernel, shape)
    if modified == 0:
        report = ClipReport(
            requested_bound=bound,
            norm_before=norm_before,
            norm_after_clip=norm_before,
            norm_after_restriction=norm_before,
            bins_modified=0,
            max_imaginary_residual=0.0,
        )
        return padded, report
    clipped = np.minimum(values, bound)
    rebuilt = np.einsum("bik,bk,bkj->bij", u, clipped, vh)
    n_h, n_w = shape.n_h, shape.n_w
    back = _transform_spatial(
        rebuilt.reshape(n_h, n_w, kernel.m_out, kernel.m_in), "inverse", threads=threads
    )
    scale = max(1.0, float(np.abs(kernel.data).max()))
    residual = float(np.abs(back.imag).max())
    if residual > _IMAG_ERROR_REL * scale:
        raise ImaginaryResidual(
            f"imaginary residual {residual:.3e} exceeds {_IMAG_ERROR_REL:.0e} * {scale:.3e}"
        )
    norm_after = float(clipped.max(initial=0.0))
    report = ClipReport(
        requested_bound=bound,
        norm_before=norm_before,
        norm_after_clip=norm_after,
        norm_after_restriction=norm_after,
        bins_modified=modified,
        max_imaginary_residual=residual,
    )
    return Kernel4D(back.real), report


def restrict_support(full_kernel: Kernel4D, k_h: int, k_w: int) -> Kernel4D:
    """Crop a full-support kernel to its leading k_h x k_w block.

    This is the Frobenius projection onto convolutions supported on that
    block: dropped coefficients are exactly the projection residual.
    """
    if not (1 <= k_h <= full_kernel.k_h and 1 <= k_w <= full_kernel.k_w):
        raise BadSupport(
            f"support {k_h}x{k_w} does not fit inside kernel "
            f"{full_kernel.k_h}x{full_kernel.k_w}"
        )
    if (k_h, k_w) == (full_kernel.k_h, full_kernel.k_w):
        return full_kernel
    return Kernel4D(full_kernel.data[:k_h, :k_w])


def project_layer(
    kernel: Kernel4D,
    shape: FeatureShape,
    bound: float,
    rounds: int = 1,
    threads: int = 1,
) -> tuple[Kernel4D, ClipReport]:
    """Alternate norm clipping and support restriction ``rounds`` times.

    The output keeps the input's k_h x k_w support. One round already lands
    close to the bound in practice; more rounds tighten the overshoot that
    support restriction reintroduces. The report reflects the final round,
    with ``norm_after_restriction`` recomputed on the returned kernel.
    """
    if rounds < 1:
        raise ValidationError(f"rounds must be >= 1, got {rounds}")
    current = kernel
    report = None
    for _ in range(rounds):
        full, report = clip_operator_norm(current, shape, bound, threads=threads)
        current = restrict_support(full, kernel.k_h, kernel.k_w)
    final_norm = operator_norm(current, shape, threads=threads)
    return current, replace(report, norm_after_restriction=final_norm)


def clip_reshaped(kernel: Kernel4D, bound: float) -> Kernel4D:
    """Clip the singular values of the flattened kernel matrix to [0, bound].

    The kernel is reshaped to a (k_h*k_w*m_in) x m_out matrix, rows ordered
    (h outer, w middle, in inner); the reshape is undone after clipping. This
    is a heuristic stand-in for the true projection: only the flattened
    matrix's largest singular value is bounded, not the layer's operator norm.
    """
    if bound <= 0.0:
        raise ValidationError(f"bound must be positive, got {bound}")
    k_h, k_w, m_out, m_in = kernel.shape
    mat = kernel.data.transpose(0, 1, 3, 2).reshape(k_h * k_w * m_in, m_out)
    result = svd(mat, compute_vectors=True)
    if result.singular_values.max(initial=0.0) <= bound:
        return kernel
    clipped = np.minimum(result.singular_values, bound)
    rebuilt = (result.u * clipped) @ result.v_conj_t
    back = rebuilt.real.reshape(k_h, k_w, m_in, m_out).transpose(0, 1, 3, 2)
    return Kernel4D(back)
