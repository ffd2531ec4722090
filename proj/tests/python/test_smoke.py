import numpy as np
import pytest

import hpod


@pytest.fixture(scope="module")
def toy(tmp_path_factory):
    rng = np.random.default_rng(0)
    out = tmp_path_factory.mktemp("corpus")
    for t in range(3):
        n, d = 60 + 10 * t, 3 + t
        X = rng.uniform(0.0, 1.0, size=(n, d))
        y = np.zeros(n, dtype=int)
        for i in range(6):
            X[3 * i + t] = rng.uniform(2.5, 4.0, size=d)
            y[3 * i + t] = 1
        header = ",".join(f"f{c}" for c in range(d)) + ",outlier"
        rows = [header] + [
            ",".join(f"{v:.10g}" for v in xi) + f",{yi}" for xi, yi in zip(X, y)
        ]
        (out / f"toy{t}.csv").write_text("\n".join(rows) + "\n")
    return out


def test_detectors_and_metrics():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1.0, 1.0, size=(40, 3))
    X[7] = [12.0, -12.0, 12.0]
    labels = np.zeros(40, dtype=np.int32)
    labels[7] = 1

    lof = hpod.lof_scores(X, n_neighbors=5, metric="euclidean")
    iforest = hpod.iforest_scores(X, n_estimators=100, max_samples=0.9, seed=3)
    assert lof.shape == (40,) and iforest.shape == (40,)
    assert int(np.argmax(lof)) == 7
    assert int(np.argmax(iforest)) == 7
    assert hpod.average_precision(lof, labels) == 1.0

    grid = np.linspace(0.1, 0.9, 9)
    assert hpod.normalized_ap_rank(1.0, grid) == 1.0
    assert hpod.top_q(1.0, grid) == pytest.approx(0.01)


def test_meta_features_deterministic():
    X = np.random.default_rng(2).normal(size=(80, 5))
    a = hpod.meta_features(X, seed=4)
    b = hpod.meta_features(X, seed=4)
    assert a.shape == (31,)
    assert np.array_equal(a, b)
    assert np.all(np.isfinite(a))


def test_meta_train_and_optimize(toy, tmp_path):
    model = hpod.meta_train(str(toy), algorithm="lof", seed=5)
    assert model.algorithm == "lof"
    assert model.grid_size == 200
    assert model.dataset_names == ["toy0", "toy1", "toy2"]

    path = tmp_path / "model.json"
    model.save(str(path))
    again = hpod.MetaModel.load(str(path))
    assert again.to_json() == model.to_json()

    X = np.random.default_rng(6).uniform(0.0, 1.0, size=(70, 4))
    X[::12] = np.random.default_rng(7).uniform(2.5, 4.0, size=(6, 4))
    res = hpod.optimize(model, X, iterations=4, k_init=3, candidates=50, seed=8)
    assert "n_neighbors" in res["best"]
    assert len(res["trace"]) == 7
    preds = [row["incumbent_pred"] for row in res["trace"]]
    assert preds == sorted(preds)
    assert res == hpod.optimize(model, X, iterations=4, k_init=3, candidates=50, seed=8)


def test_error_mapping():
    with pytest.raises(ValueError):
        hpod.lof_scores(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        hpod.wilcoxon_signed_rank(np.arange(8.0), np.arange(8.0))
