"""Unitary Procrustes alignment of complex embeddings."""
from dataclasses import dataclass
import warnings

import numpy as np

from .errors import AmbiguousRotation, InvalidInput

__all__ = ["AlignmentResult", "procrustes_align", "align_all"]


@dataclass(frozen=True)
class AlignmentResult:
    rotation: np.ndarray
    residual: float
    ambiguous: bool = False

    def apply(self, E):
        return np.asarray(E) @ self.rotation


def _coords(E):
    return np.asarray(getattr(E, "coords", E))


def procrustes_align(E, E_ref, rank_tol=1e-10):
    """Unitary ``O`` minimising ``||E O - E_ref||_F``.

    With ``E^* E_ref = U S V^*`` the minimiser is ``O = U V^*``. When the
    cross-covariance is rank deficient the minimiser is not unique; the SVD's
    completion of the null directions is returned and an
    :class:`AmbiguousRotation` warning is emitted.
    """
    E = _coords(E)
    E_ref = _coords(E_ref)
    if E.shape != E_ref.shape:
        raise InvalidInput(f"shape mismatch {E.shape} vs {E_ref.shape}")
    M = E.conj().T @ E_ref
    U, sv, Vh = np.linalg.svd(M)
    scale = sv[0] if sv.size and sv[0] > 0 else 1.0
    ambiguous = bool(sv.size and sv[-1] <= rank_tol * scale)
    if ambiguous:
        warnings.warn("cross-covariance is rank deficient; rotation is not unique",
                      AmbiguousRotation, stacklevel=2)
    O = U @ Vh
    residual = float(np.linalg.norm(E @ O - E_ref))
    return AlignmentResult(O, residual, ambiguous)


def align_all(embeddings, reference=0):
    """Align every embedding in a sequence to ``embeddings[reference]``."""
    ref = _coords(embeddings[reference])
    return [procrustes_align(E, ref) for E in embeddings]
