"""Clustering, classification and connectivity metrics, plus k-means."""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _hot
from .errors import DegenerateScatter, InvalidInput, ZeroVariance
from .synth import make_rng

__all__ = [
    "KMeansResult",
    "kmeans",
    "kmeans_fit",
    "realify",
    "complexify",
    "contingency",
    "clustering_accuracy",
    "ari",
    "nmi",
    "clustering_scores",
    "fdr",
    "confusion_matrix",
    "classification_metrics",
    "fc",
    "fc_error",
    "fc_corr",
    "EdgeDynamics",
    "edge_dynamics",
    "gaussian_entropy",
    "ecm_entropy",
    "ecm_corr",
]

_STREAM_KMEANS = 11


# -- k-means -----------------------------------------------------------------

@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int


def _plusplus(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            # inverse-CDF draw on the D^2 weights
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers[c] = X[idx]
        closest = np.minimum(closest, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(X, centers, max_iter, tol):
    scale = tol * float(np.mean(np.var(X, axis=0))) if X.shape[0] > 1 else 0.0
    labels, dist = _hot.assign(X, centers)
    for it in range(1, max_iter + 1):
        new = np.empty_like(centers)
        counts = np.bincount(labels, minlength=len(centers))
        for c in range(len(centers)):
            if counts[c]:
                new[c] = X[labels == c].mean(axis=0)
        for c in np.flatnonzero(counts == 0):
            # empty cluster: move it onto the point farthest from its centre
            far = int(np.argmax(dist))
            new[c] = X[far]
            dist[far] = 0.0
        shift = float(((new - centers) ** 2).sum())
        centers = new
        labels, dist = _hot.assign(X, centers)
        if shift <= scale:
            break
    return labels, centers, float(dist.sum()), it


def kmeans_fit(E, k, seed=0, n_init=10, max_iter=300, tol=1e-6):
    """Lloyd's algorithm with k-means++ seeding; best of ``n_init`` restarts.

    Deterministic for a given ``seed``. Ties in inertia keep the earliest run.
    """
    X = np.asarray(E, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if not 1 <= k <= X.shape[0]:
        raise InvalidInput(f"k must be in [1, {X.shape[0]}], got {k}")
    rng = make_rng(seed, _STREAM_KMEANS)
    best = None
    for _ in range(n_init):
        labels, centers, inertia, it = _lloyd(X, _plusplus(X, k, rng), max_iter, tol)
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels, centers, inertia, it)
    return best


def kmeans(E, k, seed=0, **kwargs):
    """Cluster labels in ``[0, k)``; see :func:`kmeans_fit`."""
    return kmeans_fit(E, k, seed, **kwargs).labels


def realify(E):
    """Interleave real and imaginary parts: ``[Re c1, Im c1, Re c2, ...]``."""
    E = np.asarray(getattr(E, "coords", E))
    out = np.empty((E.shape[0], 2 * E.shape[1]))
    out[:, 0::2] = E.real
    out[:, 1::2] = E.imag if np.iscomplexobj(E) else 0.0
    return out


def complexify(R):
    R = np.asarray(R, dtype=np.float64)
    return R[:, 0::2] + 1j * R[:, 1::2]


# -- clustering agreement ------------------------------------------------------

def _labels_pair(y_true, y_pred):
    a = np.asarray(y_true)
    b = np.asarray(y_pred)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidInput("label vectors must be 1-D and of equal length")
    if a.size == 0:
        raise InvalidInput("empty label vectors")
    return a, b


def contingency(y_true, y_pred):
    a, b = _labels_pair(y_true, y_pred)
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    C = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(C, (ai, bi), 1)
    return C


def clustering_accuracy(y_true, y_pred):
    """Fraction matched under the best one-to-one relabelling of clusters."""
    C = contingency(y_true, y_pred)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return float(C[rows, cols].sum()) / C.sum()


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1) / 2


def ari(y_true, y_pred):
    """Adjusted Rand index with the hypergeometric (permutation) expectation."""
    C = contingency(y_true, y_pred)
    index = _comb2(C).sum()
    a = _comb2(C.sum(axis=1)).sum()
    b = _comb2(C.sum(axis=0)).sum()
    total = _comb2(C.sum())
    expected = a * b / total if total > 0 else 0.0
    top = 0.5 * (a + b)
    if top == expected:
        # both partitions trivial (all singletons or one block): perfect by convention
        return 1.0
    return float((index - expected) / (top - expected))


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(y_true, y_pred):
    """Mutual information over ``sqrt(H(Y) H(Y_hat))``, natural log.

    If either entropy is zero the score is 1 when both are zero (both
    partitions are one block, hence identical) and 0 otherwise.
    """
    C = contingency(y_true, y_pred).astype(np.float64)
    h_true = _entropy(C.sum(axis=1))
    h_pred = _entropy(C.sum(axis=0))
    if h_true == 0 or h_pred == 0:
        return 1.0 if h_true == h_pred else 0.0
    n = C.sum()
    pij = C / n
    pi = pij.sum(axis=1, keepdims=True)
    pj = pij.sum(axis=0, keepdims=True)
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / (pi @ pj)[nz])).sum())
    return max(0.0, min(1.0, mi / math.sqrt(h_true * h_pred)))


def clustering_scores(y_true, y_pred):
    acc = clustering_accuracy(y_true, y_pred)
    r = ari(y_true, y_pred)
    m = nmi(y_true, y_pred)
    return {"acc": acc, "ari": r, "nmi": m, "mean": (acc + r + m) / 3}


def fdr(E, labels):
    """Fisher discriminant ratio ``tr(S_B) / tr(S_W)``.

    Complex embeddings are realified first. Raises :class:`DegenerateScatter`
    when the within-class scatter vanishes.
    """
    E = np.asarray(getattr(E, "coords", E))
    if np.iscomplexobj(E):
        E = realify(E)
    E = np.asarray(E, dtype=np.float64)
    if E.ndim == 1:
        E = E[:, None]
    labels = np.asarray(labels)
    if labels.shape[0] != E.shape[0]:
        raise InvalidInput("labels must have one entry per row")
    mu = E.mean(axis=0)
    sb = sw = 0.0
    for c in np.unique(labels):
        block = E[labels == c]
        mc = block.mean(axis=0)
        sb += block.shape[0] * float(((mc - mu) ** 2).sum())
        sw += float(((block - mc) ** 2).sum())
    if sw == 0:
        raise DegenerateScatter("within-class scatter is zero")
    return sb / sw


# -- classification ------------------------------------------------------------

def confusion_matrix(y_true, y_pred, n_classes=None):
    """Counts with rows = true class and columns = predicted class."""
    a, b = _labels_pair(y_true, y_pred)
    k = n_classes or int(max(a.max(), b.max())) + 1
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (a.astype(int), b.astype(int)), 1)
    return C


def classification_metrics(cm):
    """Accuracy, macro F1 and Cohen's kappa from a confusion matrix.

    A class with no predictions (or no members) gets precision (or recall)
    0. When chance agreement is 1, kappa is 1 for perfect agreement and 0
    otherwise.
    """
    C = np.asarray(cm, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or np.any(C < 0):
        raise InvalidInput("confusion matrix must be square and nonnegative")
    n = C.sum()
    if n == 0:
        raise InvalidInput("empty confusion matrix")
    tp = np.diag(C)
    col = C.sum(axis=0)
    row = C.sum(axis=1)
    prec = np.divide(tp, col, out=np.zeros_like(tp), where=col > 0)
    rec = np.divide(tp, row, out=np.zeros_like(tp), where=row > 0)
    denom = prec + rec
    f1 = np.divide(2 * prec * rec, denom, out=np.zeros_like(tp), where=denom > 0)
    p_o = tp.sum() / n
    p_e = float((row * col).sum() / n ** 2)
    if p_e == 1.0:
        kappa = 1.0 if p_o == 1.0 else 0.0
    else:
        kappa = (p_o - p_e) / (1 - p_e)
    return {"acc": float(p_o), "macro_f1": float(f1.mean()), "kappa": float(kappa),
            "per_class_f1": f1.tolist()}


# -- connectivity ----------------------------------------------------------------

def fc(X):
    """Pearson correlation between the columns of a T x M signal.

    Correlations with a zero-variance column are 0; the diagonal is always 1.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InvalidInput("need a T x M matrix with T >= 2")
    Xc = X - X.mean(axis=0)
    sd = np.sqrt((Xc ** 2).mean(axis=0))
    Z = np.divide(Xc, sd, out=np.zeros_like(Xc), where=sd > 0)
    R = (Z.T @ Z) / X.shape[0]
    R = np.clip(0.5 * (R + R.T), -1.0, 1.0)
    np.fill_diagonal(R, 1.0)
    return R


def fc_error(FC, FC_G):
    """Mean squared difference over all ``M^2`` entries."""
    FC = np.asarray(FC, dtype=np.float64)
    FC_G = np.asarray(FC_G, dtype=np.float64)
    if FC.shape != FC_G.shape:
        raise InvalidInput("FC matrices differ in shape")
    return float(((FC - FC_G) ** 2).sum() / FC.size)


def _pearson(a, b):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise InvalidInput("vectors differ in length")
    ac = a - a.mean()
    bc = b - b.mean()
    den = math.sqrt(float((ac ** 2).sum()) * float((bc ** 2).sum()))
    if den == 0:
        return float("nan")
    return float((ac * bc).sum() / den)


def fc_corr(FC, FC_G):
    """Pearson correlation between all entries of two FC matrices (nan if constant)."""
    if np.shape(FC) != np.shape(FC_G):
        raise InvalidInput("FC matrices differ in shape")
    return _pearson(FC, FC_G)


@dataclass(frozen=True)
class EdgeDynamics:
    edge_series: np.ndarray
    fcd: np.ndarray


def edge_dynamics(X):
    """Edge co-fluctuation series and their cosine-similarity matrix.

    Columns are z-scored (population std); column ``(i, j)`` of the edge
    series, for every ordered pair ``i != j`` in row-major order, is
    ``z_i * z_j``. Frames with an all-zero edge vector have similarity 0 to
    every other frame.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 2:
        raise InvalidInput("need a T x M matrix with T >= 2 and M >= 2")
    Xc = X - X.mean(axis=0)
    sd = np.sqrt((Xc ** 2).mean(axis=0))
    if np.any(sd == 0):
        raise ZeroVariance(f"zero-variance columns {np.flatnonzero(sd == 0).tolist()}")
    Z = Xc / sd
    M = X.shape[1]
    ii, jj = np.nonzero(~np.eye(M, dtype=bool))
    E = Z[:, ii] * Z[:, jj]
    norms = np.linalg.norm(E, axis=1)
    U = np.divide(E, norms[:, None], out=np.zeros_like(E), where=norms[:, None] > 0)
    F = U @ U.T
    F = np.clip(0.5 * (F + F.T), -1.0, 1.0)
    np.fill_diagonal(F, 1.0)
    return EdgeDynamics(E, F)


def gaussian_entropy(var):
    """``1/2 log(2 pi var) + 1/2``; ``-inf`` for zero variance."""
    if var < 0:
        raise InvalidInput("variance must be nonnegative")
    if var == 0:
        return float("-inf")
    return 0.5 * math.log(2 * math.pi * var) + 0.5


def ecm_entropy(FCD):
    """Edge-centric metastability: Gaussian entropy of the upper-triangle variance."""
    F = np.asarray(getattr(FCD, "fcd", FCD), dtype=np.float64)
    vals = F[np.triu_indices(F.shape[0], 1)]
    if vals.size == 0:
        raise InvalidInput("FCD needs at least two frames")
    if np.all(vals == vals[0]):
        return gaussian_entropy(0.0)      # exact, avoids a rounding-level variance
    return gaussian_entropy(float(vals.var()))


def ecm_corr(H_source, H_embed):
    """Pearson correlation of metastability values across participants."""
    return _pearson(H_source, H_embed)
