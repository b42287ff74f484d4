"""Synthetic datasets and delay stacking.

Randomness
----------
Every generator takes an integer ``seed``. Streams are derived as
``PCG64(SeedSequence(seed, spawn_key=(stream,)))`` with a fixed small integer
``stream`` per purpose, so adding a new draw never shifts an existing one.
Uniforms are 53-bit integers mapped to the open interval,
``u = (k + 0.5) / 2**53``, and Gaussians are ``ndtri(u)`` (inverse normal
CDF), which keeps draws reproducible independently of numpy's ziggurat.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import ndtri

from .errors import InvalidInput

__all__ = [
    "LabeledDataset",
    "make_rng",
    "gaussian",
    "gen_three_point",
    "gen_three_class",
    "double_center_embed",
    "gen_noisy_sinusoids",
    "stack_order_p",
    "GENERATORS",
]

# stream ids
_STREAM_REAL = 1
_STREAM_IMAG = 2
_STREAM_NOISE = 3

CLUSTER_MEANS = (1 + 1j, 1 - 1j, -1 + 2j)
SINUSOID_FREQS = (1.0, 1.1, 2.0, 2.1)


@dataclass
class LabeledDataset:
    X: np.ndarray
    labels: np.ndarray
    seed: int
    provenance: dict
    extras: dict = field(default_factory=dict)

    @property
    def n_classes(self):
        return int(self.labels.max()) + 1


def make_rng(seed, stream):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def gaussian(rng, shape):
    """Standard normal draws by inverse-CDF of open-interval 53-bit uniforms."""
    k = rng.integers(0, 2 ** 53, size=shape, dtype=np.uint64)
    u = (k.astype(np.float64) + 0.5) / 2.0 ** 53
    return ndtri(u)


def gen_three_point(d_near=1.0, d_far=3.0):
    """Squared distances of three points: 1 and 2 close, 3 far from both."""
    if not 0 < d_near < d_far:
        raise InvalidInput("need 0 < d_near < d_far")
    a, b = d_near ** 2, d_far ** 2
    return np.array([[0.0, a, b], [a, 0.0, b], [b, b, 0.0]])


def double_center_embed(D, rel_tol=1e-10):
    """Classical-MDS features from a (possibly non-Euclidean) dissimilarity.

    ``B = -1/2 J D J`` with ``J = I - 11^T/N``; eigenpairs with eigenvalue
    above ``rel_tol * lambda_max`` are kept and scaled by ``sqrt(lambda)``.
    Negative eigenvalues are discarded.
    """
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ D @ J
    B = 0.5 * (B + B.T)
    w, V = np.linalg.eigh(B)
    w, V = w[::-1], V[:, ::-1]
    keep = w > rel_tol * w[0]
    V = V[:, keep]
    # sign convention: largest-magnitude entry of each vector positive
    piv = V[np.argmax(np.abs(V), axis=0), np.arange(V.shape[1])]
    V = V * np.sign(piv)[None, :]
    return V * np.sqrt(w[keep])[None, :]


def gen_three_class(n_per=100, eta=2.0, alpha=0.1, beta=0.5, seed=0, eig_tol=1e-10):
    """Three clusters encoded through a complex relation matrix.

    Off-diagonal entries are ``D_ij = mu_c(j) + eta (z_ij + i y_ij)``; they are
    blended into ``alpha |D|/max|D| + beta mod(arg D, 2pi)/2pi``, symmetrised,
    and turned into features by double centring. ``extras['D_final']`` holds
    the symmetric blended matrix.
    """
    if n_per < 2:
        raise InvalidInput("n_per must be at least 2")
    n = 3 * n_per
    labels = np.repeat(np.arange(3), n_per)
    mu = np.asarray(CLUSTER_MEANS)[labels]
    z = gaussian(make_rng(seed, _STREAM_REAL), (n, n))
    y = gaussian(make_rng(seed, _STREAM_IMAG), (n, n))
    D = mu[None, :] + eta * (z + 1j * y)
    np.fill_diagonal(D, 0.0)
    mag = np.abs(D)
    top = mag.max()
    phase = np.mod(np.angle(D), 2 * math.pi) / (2 * math.pi)
    blend = alpha * (mag / top if top > 0 else mag) + beta * phase
    D_final = 0.5 * (blend + blend.T)
    X = double_center_embed(D_final, eig_tol)
    prov = {"generator": "three_class", "n_per": n_per, "eta": eta,
            "alpha": alpha, "beta": beta, "seed": seed, "eig_tol": eig_tol}
    return LabeledDataset(X, labels, seed, prov, {"D_final": D_final, "D": D})


def gen_noisy_sinusoids(freqs=SINUSOID_FREQS, n_per=20, eps=0.1, T_samples=1000,
                        dt=0.01, seed=0):
    """Rows ``sin(2 pi f_c t) + noise`` sampled at ``t = 0, dt, ..., (T-1) dt``."""
    if eps < 0:
        raise InvalidInput("eps must be nonnegative")
    if T_samples < 2:
        raise InvalidInput("T_samples must be at least 2")
    freqs = np.asarray(freqs, dtype=np.float64)
    t = np.arange(T_samples) * dt
    labels = np.repeat(np.arange(len(freqs)), n_per)
    clean = np.sin(2 * math.pi * freqs[labels][:, None] * t[None, :])
    noise = gaussian(make_rng(seed, _STREAM_NOISE), clean.shape)
    X = clean + eps * noise
    prov = {"generator": "sinusoids", "freqs": freqs.tolist(), "n_per": n_per,
            "eps": eps, "T_samples": T_samples, "dt": dt, "seed": seed}
    return LabeledDataset(X, labels, seed, prov)


def stack_order_p(X, p):
    """Delay stacking: row ``t`` is ``X[t], X[t+1], ..., X[t+p-1]`` concatenated."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, None]
    T = X.shape[0]
    if p < 1:
        raise InvalidInput("p must be >= 1")
    if T <= p:
        raise InvalidInput(f"need more than p={p} rows, got {T}")
    rows = T - p + 1
    return np.hstack([X[k:k + rows] for k in range(p)])


GENERATORS = {
    "three_class": gen_three_class,
    "sinusoids": gen_noisy_sinusoids,
}
