"""Complex diffusion maps with omega-parameterised kernels."""
from ._backend import get_backend, set_backend, use_backend
from .align import AlignmentResult, procrustes_align
from .errors import (
    AmbiguousRotation,
    CDMError,
    DegenerateDegree,
    DegeneratePhase,
    DegenerateScatter,
    InvalidInput,
    NumericalFailure,
    SpectralUnderflow,
    ZeroVariance,
)
from .extension import ExtensionOperator, cross_affinity, nystrom_embed, reconstruct
from .kernels import KernelParams, complex_kernel, omega_from_ratio, pairwise_sq_distances
from .spectral import (
    DiffusionModel,
    Embedding,
    diffusion_distance_spectral,
    diffusion_maps,
    dm_baseline,
    eigh_sorted,
    embed,
    fit,
    pca_baseline,
)

__version__ = "0.1.0"
