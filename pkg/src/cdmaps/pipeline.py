"""Embed, cluster and score: the unit of work behind grid sweeps."""
from concurrent.futures import ThreadPoolExecutor
import itertools
import logging
import math

import numpy as np

from . import metrics
from .errors import CDMError, DegenerateScatter
from .kernels import KernelParams
from .spectral import dm_baseline, embed, pca_baseline
from .synth import stack_order_p

log = logging.getLogger(__name__)

__all__ = ["score_embedding", "cdm_cell", "dm_cell", "pca_cell", "grid_sweep", "best_cell"]


def _stacked(X, labels, p):
    if p == 1:
        return X, labels
    Xs = stack_order_p(X, p)
    return Xs, labels[: Xs.shape[0]]


def score_embedding(coords, labels, k, seed, skip_first=False):
    """Realify, run k-means and compute ACC/ARI/NMI/mean plus FDR."""
    coords = np.asarray(coords)
    if skip_first:
        coords = coords[:, 1:]
    R = metrics.realify(coords)
    pred = metrics.kmeans(R, k, seed=seed)
    out = metrics.clustering_scores(labels, pred)
    try:
        out["fdr"] = metrics.fdr(R, labels)
    except DegenerateScatter:
        out["fdr"] = math.inf
    return out, pred


def _embed_dims(s, skip_first):
    return s + 1 if skip_first else s


def cdm_cell(X, labels, sigma, theta, t=1, s=2, k=None, seed=0, p=1, skip_first=False):
    Xs, ys = _stacked(X, labels, p)
    k = k or int(np.unique(ys).size)
    E = embed(Xs, KernelParams(sigma, theta), t=t, s=_embed_dims(s, skip_first))
    scores, _ = score_embedding(E.coords, ys, k, seed, skip_first)
    return scores


def dm_cell(X, labels, sigma, t=1, s=2, k=None, seed=0, p=1, skip_first=False):
    Xs, ys = _stacked(X, labels, p)
    k = k or int(np.unique(ys).size)
    E = dm_baseline(Xs, sigma, t=t, s=_embed_dims(s, skip_first))
    scores, _ = score_embedding(E.coords, ys, k, seed, skip_first)
    return scores


def pca_cell(X, labels, s=2, k=None, seed=0, p=1):
    Xs, ys = _stacked(X, labels, p)
    k = k or int(np.unique(ys).size)
    E = pca_baseline(Xs, s)
    scores, _ = score_embedding(E.coords, ys, k, seed)
    return scores


def _run(job):
    method, params, fn = job
    try:
        return {"method": method, "params": params, "status": "ok", "metrics": fn()}
    except CDMError as exc:
        log.warning("%s cell %s failed: %s", method, params, exc)
        return {"method": method, "params": params, "status": "failed",
                "error": f"{type(exc).__name__}: {exc}"}


def best_cell(cells):
    """Highest mean score; ties go to smaller sigma, then larger theta, then smaller p."""
    ok = [c for c in cells if c["status"] == "ok"]
    if not ok:
        return None
    return min(ok, key=lambda c: (-c["metrics"]["mean"], c["params"]["sigma"],
                                  -c["params"].get("theta", 0.0), c["params"].get("p", 1)))


def grid_sweep(X, labels, sigmas, thetas, ps=(1,), t=1, s=2, k=None, seed=0,
               dm=True, pca=True, skip_first=False, threads=1):
    """Evaluate every (sigma, theta, p) cell, plus optional baselines.

    Returns a dict with ``cells`` (CDM, in grid order), ``baselines`` and
    the per-method best cells. Results do not depend on ``threads``.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    jobs = []
    for p, sigma, theta in itertools.product(ps, sigmas, thetas):
        params = {"sigma": float(sigma), "theta": float(theta), "p": int(p)}
        jobs.append(("cdm", params, lambda sg=sigma, th=theta, p=p: cdm_cell(
            X, labels, sg, th, t, s, k, seed, p, skip_first)))
    base_jobs = []
    if dm:
        for p, sigma in itertools.product(ps, sigmas):
            params = {"sigma": float(sigma), "p": int(p)}
            base_jobs.append(("dm", params, lambda sg=sigma, p=p: dm_cell(
                X, labels, sg, t, s, k, seed, p, skip_first)))
    if pca:
        for p in ps:
            base_jobs.append(("pca", {"sigma": 0.0, "p": int(p)},
                              lambda p=p: pca_cell(X, labels, s, k, seed, p)))
    everything = jobs + base_jobs
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run, everything))
    else:
        results = [_run(j) for j in everything]
    cells = results[: len(jobs)]
    baselines = results[len(jobs):]
    best = {"cdm": best_cell(cells)}
    for name in ("dm", "pca"):
        sub = [b for b in baselines if b["method"] == name]
        if sub:
            best[name] = best_cell(sub)
    return {"cells": cells, "baselines": baselines, "best": best}
