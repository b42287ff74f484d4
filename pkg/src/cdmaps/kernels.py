"""Pairwise distances and the omega-parameterised complex kernel family.

``K(x, y) = exp(-omega * ||x - y||^2 / sigma^2)`` with ``omega = exp(i theta)``
and ``theta`` in ``[-pi/2, 0]``.  ``theta = 0`` is the Gaussian kernel and
``theta = -pi/2`` the unit-modulus Schrödinger kernel.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _hot
from .errors import InvalidInput

__all__ = [
    "KernelParams",
    "pairwise_sq_distances",
    "complex_kernel",
    "kernel_values",
    "gaussian_kernel",
    "omega_from_ratio",
]

THETA_MIN = -math.pi / 2
THETA_MAX = 0.0


def _unit(theta):
    """cos/sin of theta, exact at the two endpoints of the admissible range."""
    if theta == 0.0:
        return 1.0, 0.0
    if theta == THETA_MIN:
        return 0.0, -1.0
    return math.cos(theta), math.sin(theta)


@dataclass(frozen=True)
class KernelParams:
    """Bandwidth ``sigma`` and angle ``theta`` (radians) of the complex kernel.

    ``theta`` is the stored parameter; ``omega`` is always derived from it.
    """

    sigma: float
    theta: float = 0.0

    def __post_init__(self):
        sigma = float(self.sigma)
        theta = float(self.theta)
        if not (math.isfinite(sigma) and sigma > 0):
            raise InvalidInput(f"sigma must be positive and finite, got {self.sigma!r}")
        if not (THETA_MIN <= theta <= THETA_MAX):
            raise InvalidInput(f"theta must lie in [-pi/2, 0], got {self.theta!r}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "theta", theta)

    @property
    def omega(self):
        c, s = _unit(self.theta)
        return complex(c, s)

    @classmethod
    def from_omega(cls, sigma, omega):
        """Build params from a unit complex ``omega`` (its angle becomes theta)."""
        omega = complex(omega)
        if abs(abs(omega) - 1.0) > 1e-12:
            raise InvalidInput(f"|omega| must be 1, got {abs(omega)!r}")
        return cls(sigma=sigma, theta=math.atan2(omega.imag, omega.real))

    def to_dict(self):
        return {"sigma": self.sigma, "theta": self.theta}


def _check_samples(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 2:
        raise InvalidInput(f"expected an N x M sample matrix with N >= 2, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("sample matrix contains non-finite entries")
    return X


def pairwise_sq_distances(X):
    """Squared Euclidean distances between the rows of ``X``.

    Each pair is computed once and mirrored, so the result is exactly
    symmetric with an exactly zero diagonal.

    Parameters
    ----------
    X : array_like, shape (N, M)
        Samples in rows. A 1-D input is treated as N samples of one feature.

    Returns
    -------
    ndarray, shape (N, N)
    """
    return _hot.sq_distances(_check_samples(X))


def _check_sq_distances(D2):
    D2 = np.asarray(D2, dtype=np.float64)
    if D2.ndim != 2 or D2.shape[0] != D2.shape[1]:
        raise InvalidInput(f"squared-distance matrix must be square, got {D2.shape}")
    if not np.all(np.isfinite(D2)) or np.any(D2 < 0):
        raise InvalidInput("squared distances must be finite and nonnegative")
    return D2


def complex_kernel(D2, params):
    """Complex symmetric kernel matrix ``exp(-omega * D2 / sigma^2)``.

    Only the upper triangle of ``D2`` is read; the output is mirrored so that
    ``K[i, j]`` and ``K[j, i]`` are bitwise identical (no conjugation), and the
    diagonal is exactly one.
    """
    D2 = _check_sq_distances(D2)
    c, s = _unit(params.theta)
    return _hot.complex_kernel(D2, 1.0 / params.sigma ** 2, c, s)


def kernel_values(D2, params):
    """Kernel evaluated elementwise on an array of squared distances of any shape."""
    D2 = np.asarray(D2, dtype=np.float64)
    c, s = _unit(params.theta)
    r = D2 / params.sigma ** 2
    mag = np.exp(-c * r)
    ph = -s * r
    return mag * np.cos(ph) + 1j * (mag * np.sin(ph))


def gaussian_kernel(D2, sigma):
    """Real Gaussian kernel ``exp(-D2 / sigma^2)`` used by the classical baseline."""
    D2 = _check_sq_distances(D2)
    if not sigma > 0:
        raise InvalidInput("sigma must be positive")
    K = np.exp(-D2 / sigma ** 2)
    np.fill_diagonal(K, 1.0)
    return K


def omega_from_ratio(alpha, beta):
    """Unit ``omega = (alpha - i beta) / |alpha - i beta|`` from amplitude/phase weights."""
    alpha = float(alpha)
    beta = float(beta)
    if alpha == 0.0 and beta == 0.0:
        raise InvalidInput("alpha and beta cannot both be zero")
    # rescale first so subnormal weights still normalise to modulus one
    top = max(abs(alpha), abs(beta))
    z = complex(alpha / top, -beta / top)
    return z / abs(z)
