"""Nyström extension of a fitted model to new points, and data reconstruction."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDegree, InvalidInput, SpectralUnderflow
from .kernels import kernel_values
from .spectral import DEGREE_FLOOR, DiffusionModel, Embedding

__all__ = [
    "LAMBDA_FLOOR",
    "ExtensionOperator",
    "cross_affinity",
    "nystrom_embed",
    "reconstruct",
]

# Eigenvalues at or below this are never raised to a negative power.
LAMBDA_FLOOR = 1e-10


@dataclass(frozen=True)
class ExtensionOperator:
    """Normalised affinity between ``N_G`` new points and the ``N`` training points."""

    cross_affinity: np.ndarray
    new_degree: np.ndarray
    model: DiffusionModel


def _cross_sq_distances(X_new, X_train):
    # row-wise differences, same accumulation as the in-sample path
    out = np.empty((X_new.shape[0], X_train.shape[0]))
    for z in range(X_new.shape[0]):
        diff = X_train - X_new[z]
        out[z] = np.sum(diff * diff, axis=1)
    return out


def _as_samples(X):
    X = np.asarray(X, dtype=np.float64)
    return X[:, None] if X.ndim == 1 else X


def cross_affinity(X_new, X_train, model):
    """Affinity rows ``A_G`` of new points against the training set.

    ``K_G[z, i]`` is the complex kernel between new point ``z`` and training
    point ``i``; ``Kt_G = conj(K_G) @ K_train``; the new-point degree is the
    training-only sum ``v(z) = sum_j |Kt_G[z, j]|`` and
    ``A_G[z, j] = Kt_G[z, j] / sqrt(v(z) d_j)``.
    """
    X_new = _as_samples(X_new)
    X_train = _as_samples(X_train)
    if X_new.shape[1] != X_train.shape[1]:
        raise InvalidInput("new and training samples have different feature counts")
    if X_train.shape[0] != model.n_samples:
        raise InvalidInput("training matrix does not match the fitted model")
    if model.params is None:
        raise InvalidInput("model carries no kernel parameters")
    if not np.all(np.isfinite(X_new)):
        raise InvalidInput("new samples contain non-finite entries")
    K_G = kernel_values(_cross_sq_distances(X_new, X_train), model.params)
    Kt = K_G.conj() @ model.kernel
    v = np.abs(Kt).sum(axis=1)
    if np.any(~(v > DEGREE_FLOOR)):
        raise DegenerateDegree("a new point has zero degree against the training set")
    A_G = Kt / np.sqrt(v)[:, None] / np.sqrt(model.degree)[None, :]
    return ExtensionOperator(A_G, v, model)


def _retained(model, s):
    n = len(model.eigenvalues)
    s = n if s is None else s
    if not 1 <= s <= n:
        raise InvalidInput(f"s must be in [1, {n}]")
    return model.eigenvalues[:s], model.eigenvectors[:, :s]


def nystrom_embed(ext, t=1, s=None):
    """Diffusion coordinates of the new points, ``A_G Phi Lambda^{t/2 - 1}``.

    For training points this reproduces :func:`cdmaps.spectral.diffusion_maps`.
    """
    if t < 0:
        raise InvalidInput("t must be nonnegative")
    lam, phi = _retained(ext.model, s)
    low = np.flatnonzero(lam <= LAMBDA_FLOOR)
    if low.size:
        raise SpectralUnderflow(
            f"eigenvalue {lam[low[0]]:.3e} at index {low[0]} is below {LAMBDA_FLOOR:g}"
        )
    coords = (ext.cross_affinity @ phi) * (lam ** (t / 2 - 1))[None, :]
    return Embedding(coords, t, lam)


def reconstruct(ext, t, X_train, s=None, truncate=False):
    """Lift training features to the new points: ``Re(A_G Phi Lambda^{-t/2} Phi^* X)``.

    Parameters
    ----------
    s : int, optional
        Number of leading modes to use; the full spectrum by default.
    truncate : bool
        If true, modes with eigenvalue at or below ``LAMBDA_FLOOR`` are
        dropped instead of raising :class:`SpectralUnderflow`.
    """
    X_train = _as_samples(X_train)
    if X_train.shape[0] != ext.model.n_samples:
        raise InvalidInput("X_train rows must match the training set")
    lam, phi = _retained(ext.model, s)
    keep = lam > LAMBDA_FLOOR
    if not np.all(keep):
        if not truncate:
            raise SpectralUnderflow(
                f"{np.count_nonzero(~keep)} retained eigenvalues are below {LAMBDA_FLOOR:g}; "
                "pass truncate=True to drop them"
            )
        lam, phi = lam[keep], phi[:, keep]
    coef = phi.conj().T @ X_train
    lifted = (ext.cross_affinity @ phi) * (lam ** (-t / 2))[None, :]
    return np.real(lifted @ coef)
