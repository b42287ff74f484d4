import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cdmaps import io, metrics, pipeline
from cdmaps.cli import main
from cdmaps.kernels import KernelParams
from cdmaps.spectral import embed
from cdmaps.synth import gen_noisy_sinusoids

GOLDEN = Path(__file__).parent / "golden"


def write_cfg(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


class TestIO:
    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 4)),
                  elements=st.floats(allow_nan=False, allow_infinity=False)))
    def test_real_roundtrip(self, tmp_path_factory, M):
        p = tmp_path_factory.mktemp("io") / "m.csv"
        io.write_matrix(p, M)
        assert np.array_equal(io.read_matrix(p), M)

    def test_complex_roundtrip(self, tmp_path):
        Z = np.array([[1 / 3 + 1e-300j, -math.pi - 0.0j]])
        io.write_matrix(tmp_path / "z.csv", Z, prefix="psi")
        header = (tmp_path / "z.csv").read_text().splitlines()[0]
        assert header == "psi0_re,psi0_im,psi1_re,psi1_im"
        assert np.array_equal(io.read_matrix(tmp_path / "z.csv"), Z)

    def test_labels_and_json(self, tmp_path):
        io.write_labels(tmp_path / "l.csv", [2, 0, 1])
        assert io.read_labels(tmp_path / "l.csv").tolist() == [2, 0, 1]
        assert io.canonical_json({"b": 1, "a": np.float64(0.5)}) == '{\n  "a": 0.5,\n  "b": 1\n}\n'
        assert io.config_hash({"a": 1, "b": 2}) == io.config_hash({"b": 2, "a": 1})


class TestCLI:
    def test_generate(self, tmp_path):
        cfg = write_cfg(tmp_path / "c.json", {"generator": {"name": "three_class"}, "seed": 0})
        out = tmp_path / "new" / "dir"
        assert main(["generate", "--config", cfg, "--out", str(out)]) == 0
        assert io.read_matrix(out / "X.csv").shape[0] == 300
        first = (out / "X.csv").read_bytes()
        assert main(["generate", "--config", cfg, "--out", str(out)]) == 0
        assert (out / "X.csv").read_bytes() == first
        assert io.read_json(out / "provenance.json")["seed"] == 0

    def test_embed_theta_zero_real(self, tmp_path):
        cfg = write_cfg(tmp_path / "c.json", {
            "generator": {"name": "sinusoids", "params": {"n_per": 3, "T_samples": 100}},
            "kernel": {"sigma": 3.0, "theta": 0.0}, "s": 12, "t": 2})
        assert main(["embed", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
        checks = io.read_json(tmp_path / "o" / "model.json")["checks"]
        assert checks["real_embedding_ok"] and checks["max_imag_embedding"] <= 1e-12
        assert checks["distance_identity_ok"]

    def test_golden_eigenvalues(self, tmp_path):
        assert main(["embed", "--config", str(GOLDEN / "sinusoid_embed.json"),
                     "--out", str(tmp_path)]) == 0
        got = io.read_vector(tmp_path / "eigenvalues.csv")
        ref = io.read_vector(GOLDEN / "sinusoid_eigenvalues.csv")
        np.testing.assert_allclose(got, ref, rtol=0, atol=1e-12)

    def test_skip_first_coord(self, tmp_path):
        cfg = write_cfg(tmp_path / "c.json", {
            "generator": {"name": "sinusoids", "params": {"n_per": 3, "T_samples": 100}},
            "kernel": {"sigma": 3.0, "theta": -0.5}, "s": 3})
        main(["embed", "--config", cfg, "--out", str(tmp_path / "a")])
        main(["embed", "--config", cfg, "--out", str(tmp_path / "b"), "--skip-first-coord"])
        a = io.read_matrix(tmp_path / "a" / "embedding.csv")
        b = io.read_matrix(tmp_path / "b" / "embedding.csv")
        assert np.array_equal(a[:, 1:], b)

    def test_extend_and_reconstruct_in_sample(self, tmp_path):
        X = np.random.default_rng(0).standard_normal((30, 5))
        io.write_matrix(tmp_path / "X.csv", X)
        base = {"data": {"X": "X.csv"}, "kernel": {"sigma": 1.2, "theta": -0.6},
                "new": "X.csv", "s": 4, "t": 1}
        cfg = write_cfg(tmp_path / "c.json", base)
        assert main(["embed", "--config", cfg, "--out", str(tmp_path / "e")]) == 0
        assert main(["extend", "--config", cfg, "--out", str(tmp_path / "x")]) == 0
        a = io.read_matrix(tmp_path / "e" / "embedding.csv")
        b = io.read_matrix(tmp_path / "x" / "embedding_new.csv")
        assert np.max(np.abs(a - b)) <= 1e-9
        cfg2 = write_cfg(tmp_path / "c2.json", dict(base, t=2))
        assert main(["reconstruct", "--config", cfg2, "--out", str(tmp_path / "r")]) == 0
        Xg = io.read_matrix(tmp_path / "r" / "reconstructed.csv")
        assert np.linalg.norm(Xg - X) <= 1e-8 * np.linalg.norm(X)

    def test_align_self(self, tmp_path):
        E = np.random.default_rng(1).standard_normal((10, 2)) * (1 + 1j)
        io.write_matrix(tmp_path / "e.csv", E, prefix="psi")
        cfg = write_cfg(tmp_path / "c.json", {"embeddings": ["e.csv", "e.csv"]})
        assert main(["align", "--config", cfg, "--out", str(tmp_path / "o"),
                     "--reference", "1"]) == 0
        res = io.read_json(tmp_path / "o" / "alignment.json")["results"]
        rot = np.array(res[0]["rotation"]["re"]) + 1j * np.array(res[0]["rotation"]["im"])
        np.testing.assert_allclose(rot, np.eye(2), atol=1e-12)

    def test_cluster_evaluate(self, tmp_path):
        y = np.repeat([0, 1], 10)
        E = np.where(y[:, None] == 0, -5.0, 5.0) + np.random.default_rng(0).standard_normal((20, 2))
        io.write_matrix(tmp_path / "e.csv", E)
        io.write_labels(tmp_path / "y.csv", y)
        cfg = write_cfg(tmp_path / "c.json", {"embedding": "e.csv", "k": 2,
                                              "labels_true": "y.csv",
                                              "labels_pred": "o/labels_pred.csv"})
        assert main(["cluster", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
        assert main(["evaluate", "--config", cfg, "--out", str(tmp_path / "m")]) == 0
        rep = io.read_json(tmp_path / "m" / "metrics.json")
        assert rep["clustering"]["acc"] == 1.0 and rep["fdr"] > 1

    def test_usage_errors(self, tmp_path):
        cfg = write_cfg(tmp_path / "c.json", {"generator": {"name": "nope"}})
        assert main(["generate", "--config", cfg, "--out", str(tmp_path)]) == 2
        cfg = write_cfg(tmp_path / "c.json", {"generator": {"name": "sinusoids"},
                                              "kernel": {"sigma": -1}})
        assert main(["embed", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_sweep_matches_single_run(self, tmp_path):
        ds = gen_noisy_sinusoids(n_per=5, T_samples=200, seed=2)
        io.write_matrix(tmp_path / "X.csv", ds.X)
        io.write_labels(tmp_path / "y.csv", ds.labels)
        cfg = write_cfg(tmp_path / "c.json", {
            "data": {"X": "X.csv", "labels": "y.csv"}, "seed": 2, "k": 4,
            "grid": {"sigma": [3.0], "theta": [-0.5]}, "baselines": {"dm": False, "pca": False}})
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
        man = io.read_json(tmp_path / "s" / "manifest.json")
        assert len(man["cells"]) == 1
        E = embed(ds.X, KernelParams(3.0, -0.5), t=1, s=2)
        pred = metrics.kmeans(metrics.realify(E.coords), 4, seed=2)
        expect = metrics.clustering_scores(ds.labels, pred)
        for key in ("acc", "ari", "nmi", "mean"):
            assert man["cells"][0]["metrics"][key] == pytest.approx(expect[key], abs=1e-15)

    def test_sweep_deterministic_and_threaded(self, tmp_path):
        cfg = write_cfg(tmp_path / "c.json", {
            "generator": {"name": "sinusoids", "params": {"n_per": 4, "T_samples": 150}},
            "seed": 1, "grid": {"sigma": [2.0, 5.0], "theta": [-1.0, 0.0], "p": [1, 2]}})
        main(["sweep", "--config", cfg, "--out", str(tmp_path / "a")])
        main(["sweep", "--config", cfg, "--out", str(tmp_path / "b"), "--threads", "4"])
        a = (tmp_path / "a" / "manifest.json").read_bytes()
        assert a == (tmp_path / "b" / "manifest.json").read_bytes()
        man = json.loads(a)
        assert len(man["cells"]) == 8
        assert len(list((tmp_path / "a" / "cells").iterdir())) == 8


def test_best_cell_tie_break():
    def cell(sigma, theta, mean, p=1):
        return {"status": "ok", "params": {"sigma": sigma, "theta": theta, "p": p},
                "metrics": {"mean": mean}}
    cells = [cell(2.0, -1.0, 0.9), cell(1.0, -1.0, 0.9), cell(1.0, -0.5, 0.9),
             cell(1.0, -0.5, 0.9, p=2), cell(5.0, 0.0, 0.8)]
    best = pipeline.best_cell(cells)
    assert best["params"] == {"sigma": 1.0, "theta": -0.5, "p": 1}
    assert pipeline.best_cell([{"status": "failed", "params": {}}]) is None
