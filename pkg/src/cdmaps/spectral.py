"""Hermitian diffusion operator, its spectrum, and the diffusion embeddings.

The complex kernel ``K`` is complex symmetric but not Hermitian, so the
operator is built from the Gram matrix ``K^* K``:

    A = D^{-1/2} K^* K D^{-1/2},   D_ii = sum_j |(K^* K)_ij|

``A`` is Hermitian positive semidefinite with spectrum in ``[0, 1]``.
Column ``n`` of the complex diffusion map is ``lambda_n^{t/2} phi_n``.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import _hot
from .errors import DegenerateDegree, DegeneratePhase, InvalidInput, NumericalFailure
from .kernels import KernelParams, complex_kernel, gaussian_kernel, pairwise_sq_distances

__all__ = [
    "DiffusionModel",
    "Embedding",
    "gram",
    "degree",
    "normalize",
    "eigh_sorted",
    "diffusion_maps",
    "diffusion_distance_spectral",
    "fit",
    "embed",
    "dm_baseline",
    "pca_baseline",
    "quadratic_form_check",
    "check_model",
]

# Eigenvalues in [-NEG_CLAMP, 0) are treated as rounding noise and set to 0.
NEG_CLAMP = 1e-9
# Imaginary parts below this make an operator "real" for solver selection.
REAL_TOL = 1e-12
DEGREE_FLOOR = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class DiffusionModel:
    """Everything produced by one fit of the diffusion operator.

    ``eigenvalues`` are sorted nonincreasing and ``eigenvectors`` holds the
    matching phase-fixed unit columns. ``kernel`` is kept so that new points
    can be extended against the training set.
    """

    kernel: np.ndarray
    degree: np.ndarray
    operator: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    params: Optional[KernelParams] = None

    @property
    def n_samples(self):
        return self.operator.shape[0]


@dataclass(frozen=True)
class Embedding:
    """N x s diffusion coordinates together with the diffusion step used."""

    coords: np.ndarray
    step: float
    eigenvalues: np.ndarray = field(default=None)

    @property
    def dims(self):
        return self.coords.shape[1]

    @property
    def is_complex(self):
        return np.iscomplexobj(self.coords)


def _hermitize(H):
    """Exact Hermitian copy of ``H`` taken from its upper triangle."""
    U = np.triu(H, 1)
    out = U + U.conj().T
    out[np.diag_indices_from(out)] = H.diagonal().real
    return out


def gram(K):
    """Hermitian Gram matrix ``K^* K``; entry ``(i, j)`` is ``sum_l conj(K[l, i]) K[l, j]``."""
    K = np.asarray(K)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidInput(f"kernel must be square, got {K.shape}")
    K = K.astype(np.complex128, copy=False)
    return _hermitize(K.conj().T @ K)


def degree(H):
    """Row sums of ``|H|``; raises :class:`DegenerateDegree` if any is not positive."""
    d = np.abs(np.asarray(H)).sum(axis=1)
    bad = np.flatnonzero(~(d > DEGREE_FLOOR))
    if bad.size:
        raise DegenerateDegree(f"degree vanishes at rows {bad[:10].tolist()}")
    return d


def normalize(H, d):
    """``D^{-1/2} H D^{-1/2}``, returned exactly Hermitian."""
    d = np.asarray(d, dtype=np.float64)
    if np.any(~(d > DEGREE_FLOOR)):
        raise DegenerateDegree("degree vector must be strictly positive")
    r = 1.0 / np.sqrt(d)
    A = (H * r[:, None]) * r[None, :]
    if np.iscomplexobj(A):
        return _hermitize(A)
    return np.triu(A) + np.triu(A, 1).T


def _fix_phases(V):
    # Largest-modulus entry of each column becomes real positive; near-ties
    # (relative 1e-12) go to the lowest index so rounding cannot flip the pick.
    mags = np.abs(V)
    top = mags.max(axis=0)
    idx = np.argmax(mags >= top * (1 - 1e-12), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    with np.errstate(invalid="ignore", divide="ignore"):
        rot = np.where(np.abs(pivots) > 0, np.abs(pivots) / pivots, 1.0)
    cols = np.arange(V.shape[1])
    if np.iscomplexobj(V):
        out = V * rot[None, :]
        out[idx, cols] = np.abs(pivots)     # exactly real, not just to rounding
        return out
    return V * np.sign(rot)[None, :]


def eigh_sorted(A, s=None):
    """Leading ``s`` eigenpairs of a Hermitian matrix, largest first.

    Uses a dense LAPACK solve. If ``A`` has no imaginary part above
    ``REAL_TOL`` it is solved as a real symmetric problem, so the returned
    eigenvectors are real. Each eigenvector is rotated so its largest-modulus
    entry is real and positive.

    Returns
    -------
    eigenvalues : ndarray, shape (s,)
    eigenvectors : ndarray, shape (N, s)
    """
    A = np.asarray(A)
    n = A.shape[0]
    if s is None:
        s = n
    if not 1 <= s <= n:
        raise InvalidInput(f"s must be in [1, {n}], got {s}")
    if np.iscomplexobj(A) and np.max(np.abs(A.imag), initial=0.0) <= REAL_TOL:
        A = np.ascontiguousarray(A.real)
    try:
        if s < n:
            w, V = scipy.linalg.eigh(A, subset_by_index=[n - s, n - 1], driver="evr")
        if s == n or w.shape[0] != s:
            # full solve; the index-subset driver can come back empty on
            # (numerically) fully degenerate spectra such as A = I
            w, V = scipy.linalg.eigh(A, driver="evd")
            w, V = w[n - s:], V[:, n - s:]
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"Hermitian eigensolver failed: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(V))):
        raise NumericalFailure("eigensolver returned non-finite values")
    w = w[::-1].copy()
    V = np.ascontiguousarray(V[:, ::-1])
    return w, _fix_phases(V)


def _clamped(lam):
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(lam < -NEG_CLAMP):
        raise NumericalFailure(
            f"eigenvalue {lam.min():.3e} is below -{NEG_CLAMP:g}; operator is not positive"
        )
    return np.where(lam < 0, 0.0, lam)


def diffusion_maps(eigenvalues, eigenvectors, t, s=None):
    """Complex diffusion coordinates: column ``n`` is ``lambda_n^{t/2} phi_n``."""
    if t < 0:
        raise InvalidInput("diffusion step t must be nonnegative")
    lam = _clamped(eigenvalues)
    s = len(lam) if s is None else s
    if not 1 <= s <= len(lam):
        raise InvalidInput(f"s must be in [1, {len(lam)}]")
    scale = lam[:s] ** (t / 2)
    return Embedding(np.asarray(eigenvectors)[:, :s] * scale[None, :], t, lam[:s])


def diffusion_distance_spectral(eigenvalues, eigenvectors, t, i, j):
    """t-step diffusion distance between samples ``i`` and ``j``.

    ``sqrt(sum_n |lambda_n^{t/2} (phi_n(i) - phi_n(j))|^2)`` over every
    supplied eigenpair.
    """
    lam = _clamped(eigenvalues)
    V = np.asarray(eigenvectors)
    diff = (V[i] - V[j]) * lam ** (t / 2)
    return float(np.sqrt(np.sum(np.abs(diff) ** 2)))


def fit(X, params, s=None):
    """Build a :class:`DiffusionModel` from samples ``X`` (rows).

    ``s`` limits how many eigenpairs are kept; by default the full spectrum.
    """
    K = complex_kernel(pairwise_sq_distances(X), params)
    return fit_kernel(K, params, s=s)


def fit_kernel(K, params=None, s=None):
    """Like :func:`fit` but starting from a precomputed complex kernel."""
    H = gram(K)
    d = degree(H)
    A = normalize(H, d)
    lam, phi = eigh_sorted(A, s)
    return DiffusionModel(kernel=np.asarray(K), degree=d, operator=A,
                          eigenvalues=lam, eigenvectors=phi, params=params)


def embed(X, params, t=1, s=2):
    """Fit and return the leading ``s`` complex diffusion coordinates."""
    model = fit(X, params, s=s)
    return diffusion_maps(model.eigenvalues, model.eigenvectors, t, s)


def check_model(model, tol_herm=1e-12, tol_bound=1e-9):
    """Runtime invariant checks on a fitted model; returns a dict of results."""
    A = model.operator
    herm_err = float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0
    lam = model.eigenvalues
    V = model.eigenvectors
    resid = np.linalg.norm(A @ V - V * lam[None, :], axis=0)
    fro = float(np.linalg.norm(A))
    gram_err = np.abs(V.conj().T @ V - np.eye(V.shape[1]))
    return {
        "hermitian_max_error": herm_err,
        "hermitian_ok": herm_err <= tol_herm,
        "eig_min": float(lam.min()),
        "eig_max": float(lam.max()),
        "spectral_bounds_ok": bool(lam.min() >= -tol_bound and lam.max() <= 1 + tol_bound),
        "max_residual": float(resid.max()),
        "residual_ok": bool(resid.max() <= 1e-8 * max(fro, 1.0)),
        "max_orthogonality_error": float(gram_err.max()),
        "orthogonality_ok": bool(gram_err.max() <= 1e-10),
    }


def dm_baseline(X, sigma, t=1, s=2):
    """Classical diffusion maps with the Gaussian kernel.

    ``A = D^{-1/2} K D^{-1/2}`` with ``D`` the kernel row sums; columns are
    ``lambda_n^t phi_n`` (note ``t``, not ``t/2``). The leading pair is kept.
    """
    K = gaussian_kernel(pairwise_sq_distances(X), sigma)
    d = K.sum(axis=1)
    A = normalize(K, d)
    lam, phi = eigh_sorted(A, s)
    lam = _clamped(lam)
    return Embedding(phi * (lam ** t)[None, :], t, lam)


def _pca_fit(X):
    X = np.asarray(X, dtype=np.float64)
    mean = X.mean(axis=0)
    Xc = X - mean
    _, sv, Vt = np.linalg.svd(Xc, full_matrices=False)
    scores = Xc @ Vt.T
    # deterministic sign: largest |score| in each component positive
    flip = np.sign(scores[np.argmax(np.abs(scores), axis=0), np.arange(scores.shape[1])])
    flip[flip == 0] = 1.0
    return mean, Vt * flip[:, None], sv


def pca_baseline(X, s=2):
    """Project the column-centred data onto its top ``s`` principal directions."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InvalidInput("PCA needs an N x M matrix with N >= 2")
    mean, comps, sv = _pca_fit(X)
    if s > comps.shape[0]:
        raise InvalidInput(f"s={s} exceeds available components {comps.shape[0]}")
    coords = (X - mean) @ comps[:s].T
    # exactly-zero variance directions project to exactly zero
    coords[:, sv[:s] == 0] = 0.0
    return Embedding(coords, 0, sv[:s] ** 2 / (X.shape[0] - 1))


def quadratic_form_check(K, f):
    """Both sides of the phase-aligned smoothness identity.

    ``lhs = 1/2 sum_ij |g_ij| |f_i - (g_ij/|g_ij|) f_j|^2`` summed entry by
    entry with ``g_ij = sum_l conj(K[l, i]) K[l, j]``, and
    ``rhs = f^* (D - K^* K) f`` evaluated with matrix products.
    """
    K = np.asarray(K, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != (K.shape[0],):
        raise InvalidInput("f must have one entry per kernel row")
    lhs = _hot.phase_energy(K, f, 0.0)
    if np.isnan(lhs):
        raise DegeneratePhase("zero inner product between kernel columns")
    H = gram(K)
    d = np.abs(H).sum(axis=1)
    rhs = np.vdot(f, d * f) - np.vdot(f, H @ f)
    return float(lhs), float(rhs.real)
