"""Inner loops, each with a numba and a pure-numpy implementation.

Public callers use the dispatchers at the bottom, which pick the
implementation from :func:`cdmaps._backend.get_backend` at call time.
"""
import numpy as np

from . import _backend

# Above this many features the squared-distance accumulation is compensated.
COMPENSATE_ABOVE = 10_000

if _backend.HAVE_NUMBA:
    from numba import njit
else:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# -- squared distances -------------------------------------------------------

@njit(cache=True)
def _sq_distances_nb(X, compensated):
    n, m = X.shape
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            if compensated:
                c = 0.0
                for k in range(m):
                    d = X[i, k] - X[j, k]
                    v = d * d
                    t = s + v
                    # Neumaier: v >= 0, so compare magnitudes of s and v
                    if s >= v:
                        c += (s - t) + v
                    else:
                        c += (v - t) + s
                    s = t
                s += c
            else:
                for k in range(m):
                    d = X[i, k] - X[j, k]
                    s += d * d
            out[i, j] = s
            out[j, i] = s
    return out


def _sq_distances_np(X):
    n = X.shape[0]
    out = np.zeros((n, n))
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        # np.sum uses pairwise summation along the contiguous axis
        row = np.sum(diff * diff, axis=1)
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return out


# -- complex kernel ----------------------------------------------------------

@njit(cache=True)
def _complex_kernel_nb(D2, inv_sigma2, decay, rotation):
    n = D2.shape[0]
    K = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        K[i, i] = 1.0 + 0.0j
        for j in range(i + 1, n):
            r = D2[i, j] * inv_sigma2
            mag = np.exp(-decay * r)
            ph = -rotation * r
            v = complex(mag * np.cos(ph), mag * np.sin(ph))
            K[i, j] = v
            K[j, i] = v
    return K


def _complex_kernel_np(D2, inv_sigma2, decay, rotation):
    iu = np.triu_indices(D2.shape[0], 1)
    r = D2[iu] * inv_sigma2
    mag = np.exp(-decay * r)
    ph = -rotation * r
    vals = mag * np.cos(ph) + 1j * (mag * np.sin(ph))
    K = np.eye(D2.shape[0], dtype=np.complex128)
    K[iu] = vals
    K[iu[1], iu[0]] = vals
    return K


# -- k-means assignment ------------------------------------------------------

@njit(cache=True)
def _assign_nb(X, C):
    n, m = X.shape
    k = C.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    for i in range(n):
        best = np.inf
        arg = 0
        for c in range(k):
            s = 0.0
            for f in range(m):
                d = X[i, f] - C[c, f]
                s += d * d
            if s < best:
                best = s
                arg = c
        labels[i] = arg
        dist[i] = best
    return labels, dist


def _assign_np(X, C):
    d = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d, axis=1)
    return labels.astype(np.int64), d[np.arange(X.shape[0]), labels]


# -- quadratic form, summed elementwise ------------------------------------------

@njit(cache=True)
def _phase_energy_nb(K, f, tiny):
    n = K.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            g = 0.0 + 0.0j
            for l in range(n):
                g += np.conj(K[l, i]) * K[l, j]
            w = abs(g)
            if w <= tiny:
                return np.nan
            diff = f[i] - (g / w) * f[j]
            total += w * (diff.real * diff.real + diff.imag * diff.imag)
    return 0.5 * total


def _phase_energy_np(K, f, tiny):
    g = np.einsum("li,lj->ij", K.conj(), K)
    w = np.abs(g)
    if np.any(w <= tiny):
        return np.nan
    diff = f[:, None] - (g / w) * f[None, :]
    return 0.5 * float(np.sum(w * np.abs(diff) ** 2))


# -- dispatch ----------------------------------------------------------------

def sq_distances(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if _backend.get_backend() == "numba":
        return _sq_distances_nb(X, X.shape[1] > COMPENSATE_ABOVE)
    return _sq_distances_np(X)


def complex_kernel(D2, inv_sigma2, decay, rotation):
    D2 = np.ascontiguousarray(D2, dtype=np.float64)
    fn = _complex_kernel_nb if _backend.get_backend() == "numba" else _complex_kernel_np
    return fn(D2, float(inv_sigma2), float(decay), float(rotation))


def assign(X, C):
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    if _backend.get_backend() == "numba":
        return _assign_nb(X, C)
    return _assign_np(X, C)


def phase_energy(K, f, tiny=0.0):
    K = np.ascontiguousarray(K, dtype=np.complex128)
    f = np.ascontiguousarray(f, dtype=np.complex128)
    if _backend.get_backend() == "numba":
        return _phase_energy_nb(K, f, float(tiny))
    return _phase_energy_np(K, f, float(tiny))
