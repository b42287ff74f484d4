"""Command-line driver: ``cdmaps <subcommand> --config cfg.json --out DIR``.

Config files are JSON. Keys used by the subcommands::

    seed                  top-level integer seed (overridden by --seed)
    generator             {"name": "sinusoids" | "three_class", "params": {...}}
    data                  {"X": "x.csv", "labels": "labels.csv"}  (instead of generator)
    kernel                {"sigma": float, "theta": float}
    t, s, k               diffusion step, embedding dimension, cluster count
    grid                  {"sigma": [...], "theta": [...], "p": [...]}
    baselines             {"dm": bool, "pca": bool}
    new                   "new.csv"                    (extend / reconstruct)
    truncate              bool                         (reconstruct)
    embeddings            ["e0.csv", ...], reference   (align)
    embedding             "embedding.csv"              (cluster / evaluate)
    labels_true, labels_pred                            (evaluate)

Exit status: 0 on success, 1 if a built-in invariant check failed or a sweep
cell failed, 2 for usage/config errors, 3 for numerical errors.
"""
import argparse
from datetime import datetime, timezone
import logging
import os
from pathlib import Path
import sys

import numpy as np

from . import io, metrics, pipeline
from .align import align_all
from .errors import CDMError, InvalidInput
from .extension import cross_affinity, nystrom_embed, reconstruct
from .kernels import KernelParams
from .spectral import check_model, diffusion_distance_spectral, diffusion_maps, fit
from .synth import GENERATORS

log = logging.getLogger("cdmaps")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _setup_logging():
    level = os.environ.get("CDM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(args):
    cfg = io.read_json(args.config) if args.config else {}
    base = Path(args.config).parent if args.config else Path(".")
    cfg["_base"] = str(base)
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", 0)
    if args.skip_first_coord:
        cfg["skip_first_coord"] = True
    return cfg


def _path(cfg, value):
    p = Path(value)
    return p if p.is_absolute() else Path(cfg["_base"]) / p


def _require(cfg, key):
    if key not in cfg:
        raise ConfigError(f"config is missing '{key}'")
    return cfg[key]


def _make_dataset(cfg):
    gen = _require(cfg, "generator")
    name = gen.get("name")
    if name not in GENERATORS:
        raise ConfigError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    params = dict(gen.get("params", {}))
    params.setdefault("seed", cfg["seed"])
    return GENERATORS[name](**params)


def _load_data(cfg):
    """Samples and labels (labels may be None) from ``data`` or ``generator``."""
    if "data" in cfg:
        d = cfg["data"]
        X = io.read_matrix(_path(cfg, d["X"]))
        y = io.read_labels(_path(cfg, d["labels"])) if d.get("labels") else None
        return X, y
    ds = _make_dataset(cfg)
    return ds.X, ds.labels


def _kernel(cfg):
    k = _require(cfg, "kernel")
    return KernelParams(k["sigma"], k.get("theta", 0.0))


def cmd_generate(cfg, out):
    ds = _make_dataset(cfg)
    io.write_matrix(out / "X.csv", ds.X)
    io.write_labels(out / "labels.csv", ds.labels)
    io.write_json(out / "provenance.json", ds.provenance)
    if "D_final" in ds.extras:
        io.write_matrix(out / "D_final.csv", ds.extras["D_final"], prefix="d")
    return EXIT_OK


def cmd_embed(cfg, out):
    X, _ = _load_data(cfg)
    params = _kernel(cfg)
    t = cfg.get("t", 1)
    s = cfg.get("s", 2)
    model = fit(X, params)
    checks = check_model(model)
    E = diffusion_maps(model.eigenvalues, model.eigenvectors, t, s)
    coords = E.coords[:, 1:] if cfg.get("skip_first_coord") else E.coords
    io.write_vector(out / "eigenvalues.csv", model.eigenvalues, name="lambda")
    io.write_matrix(out / "embedding.csv", coords, prefix="psi")
    if params.theta == 0.0:
        checks["max_imag_embedding"] = float(np.max(np.abs(np.imag(coords)), initial=0.0))
        checks["real_embedding_ok"] = checks["max_imag_embedding"] <= 1e-12
    if s == model.n_samples:
        full = diffusion_maps(model.eigenvalues, model.eigenvectors, t, s).coords
        worst = 0.0
        n = model.n_samples
        for i in range(n):
            for j in range(i + 1, n):
                a = diffusion_distance_spectral(model.eigenvalues, model.eigenvectors, t, i, j)
                b = float(np.linalg.norm(full[i] - full[j]))
                worst = max(worst, abs(a - b))
        checks["distance_identity_max_error"] = worst
        checks["distance_identity_ok"] = worst <= 1e-10
        log.info("distance identity at s=N: max error %.3e", worst)
    meta = {"kernel": params.to_dict(), "t": t, "s": s, "n_samples": model.n_samples,
            "skip_first_coord": bool(cfg.get("skip_first_coord")), "checks": checks}
    io.write_json(out / "model.json", meta)
    ok = all(v for key, v in checks.items() if key.endswith("_ok"))
    return EXIT_OK if ok else EXIT_CHECK


def _new_points(cfg):
    return io.read_matrix(_path(cfg, _require(cfg, "new")))


def cmd_extend(cfg, out):
    X, _ = _load_data(cfg)
    X_new = _new_points(cfg)
    model = fit(X, _kernel(cfg))
    E = nystrom_embed(cross_affinity(X_new, X, model), cfg.get("t", 1), cfg.get("s", 2))
    coords = E.coords[:, 1:] if cfg.get("skip_first_coord") else E.coords
    io.write_matrix(out / "embedding_new.csv", coords, prefix="psi")
    return EXIT_OK


def cmd_reconstruct(cfg, out):
    X, _ = _load_data(cfg)
    X_new = _new_points(cfg)
    model = fit(X, _kernel(cfg))
    ext = cross_affinity(X_new, X, model)
    Xg = reconstruct(ext, cfg.get("t", 2), X, s=cfg.get("s_reconstruct"),
                     truncate=bool(cfg.get("truncate", False)))
    io.write_matrix(out / "reconstructed.csv", Xg)
    return EXIT_OK


def cmd_align(cfg, out):
    paths = _require(cfg, "embeddings")
    ref = int(cfg.get("reference", 0))
    Es = [io.read_matrix(_path(cfg, p)) for p in paths]
    results = align_all(Es, ref)
    summary = []
    for i, (E, r) in enumerate(zip(Es, results)):
        io.write_matrix(out / f"aligned_{i}.csv", r.apply(E), prefix="psi")
        summary.append({"index": i, "residual": r.residual, "ambiguous": r.ambiguous,
                        "rotation": {"re": r.rotation.real, "im": r.rotation.imag}})
    io.write_json(out / "alignment.json", {"reference": ref, "results": summary})
    return EXIT_OK


def cmd_cluster(cfg, out):
    E = io.read_matrix(_path(cfg, _require(cfg, "embedding")))
    k = int(_require(cfg, "k"))
    labels = metrics.kmeans(metrics.realify(E), k, seed=cfg["seed"])
    io.write_labels(out / "labels_pred.csv", labels)
    return EXIT_OK


def cmd_evaluate(cfg, out):
    y = io.read_labels(_path(cfg, _require(cfg, "labels_true")))
    yp = io.read_labels(_path(cfg, _require(cfg, "labels_pred")))
    report = {"clustering": metrics.clustering_scores(y, yp),
              "classification": metrics.classification_metrics(metrics.confusion_matrix(y, yp))}
    if "embedding" in cfg:
        E = io.read_matrix(_path(cfg, cfg["embedding"]))
        try:
            report["fdr"] = metrics.fdr(E, y)
        except CDMError:
            report["fdr"] = float("inf")
    io.write_json(out / "metrics.json", report)
    return EXIT_OK


def cmd_sweep(cfg, out, threads=1):
    X, y = _load_data(cfg)
    if y is None:
        raise ConfigError("sweep needs labels")
    grid = _require(cfg, "grid")
    sigmas, thetas = grid["sigma"], grid["theta"]
    ps = grid.get("p", [1])
    if not (sigmas and thetas and ps):
        raise ConfigError("grid lists must be nonempty")
    base = cfg.get("baselines", {})
    result = pipeline.grid_sweep(
        X, y, sigmas, thetas, ps, t=cfg.get("t", 1), s=cfg.get("s", 2), k=cfg.get("k"),
        seed=cfg["seed"], dm=base.get("dm", True), pca=base.get("pca", True),
        skip_first=bool(cfg.get("skip_first_coord")), threads=threads)
    for i, cell in enumerate(result["cells"]):
        io.write_json(out / "cells" / f"cell_{i:04d}" / "result.json", cell)
    public_cfg = {k: v for k, v in cfg.items() if not k.startswith("_")}
    manifest = {
        "config": public_cfg,
        "config_hash": io.config_hash(public_cfg),
        "cells": result["cells"],
        "baselines": result["baselines"],
        "best": result["best"],
    }
    io.write_json(out / "manifest.json", manifest)
    io.write_json(out / "timestamps.json",
                  {"finished": datetime.now(timezone.utc).isoformat()})
    failed = any(c["status"] != "ok" for c in result["cells"] + result["baselines"])
    return EXIT_CHECK if failed else EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "embed": cmd_embed,
    "extend": cmd_extend,
    "reconstruct": cmd_reconstruct,
    "align": cmd_align,
    "cluster": cmd_cluster,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="cdmaps", description="Complex diffusion maps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="top-level seed (overrides config)")
        p.add_argument("--skip-first-coord", action="store_true",
                       help="drop the leading diffusion coordinate from outputs")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
        if name == "align":
            p.add_argument("--reference", type=int, help="index of the reference embedding")
    return parser


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = _load_config(args)
        if getattr(args, "reference", None) is not None:
            cfg["reference"] = args.reference
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, threads=max(1, args.threads))
        return COMMANDS[args.command](cfg, out)
    except (ConfigError, InvalidInput, KeyError, TypeError, FileNotFoundError) as exc:
        print(f"cdmaps {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CDMError as exc:
        print(f"cdmaps {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
