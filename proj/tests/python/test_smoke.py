import math
import os

import numpy as np
import pytest

import glmdisc


def test_simulate_and_train_recovers_three_levels():
    ds = glmdisc.simulate("A", n=4000, seed=11)
    assert len(ds) == 4000
    assert ds.feature_names == ["x1", "x2"]
    model = glmdisc.fit(ds, m_max=[3], epochs=20, seed=2)
    assert model.method == "glmdisc"
    assert all(1 <= m <= 3 for m in model.level_counts)
    p = model.predict(ds)
    assert p.shape == (4000,)
    assert np.all((p > 0) & (p < 1))
    trace = model.trace()
    assert len(trace) == 20
    assert sum(r["best"] for r in trace) == 1
    assert trace[model.best_epoch - 1]["bic"] == pytest.approx(model.bic)


def test_dataset_from_columns_and_baselines():
    rng = np.random.default_rng(3)
    x = rng.uniform(size=600)
    c = [("a", "b", "c")[i % 3] for i in range(600)]
    logit = np.where(x > 0.5, 1.0, -1.0) + np.array([{"a": -1.0, "b": 0.0, "c": 1.0}[v] for v in c])
    y = (rng.uniform(size=600) < 1 / (1 + np.exp(-logit))).astype(int)
    ds = glmdisc.Dataset({"x": x, "c": c}, y)
    assert ds.kinds == ["continuous", "categorical"]
    cols = ds.columns()
    assert np.array_equal(cols["x"], x)
    assert cols["c"][:3] == ["a", "b", "c"]

    allr = glmdisc.fit(ds, "allr")
    mdlp = glmdisc.fit(ds, "mdlp-chi2")
    assert allr.method == "allr"
    assert mdlp.method == "mdlp-chi2"
    assert {q["feature"] for q in mdlp.quantization()} == {"x", "c"}
    assert glmdisc.gini(mdlp.predict(ds), y) > 0.3
    with pytest.raises(glmdisc.GlmdiscError):
        allr.trace()


def test_model_round_trip(tmp_path):
    ds = glmdisc.simulate("C", n=1500, seed=5)
    model = glmdisc.fit(ds, m_max=[3], epochs=8)
    path = tmp_path / "model.json"
    model.save(path)
    back = glmdisc.load_model(path)
    assert back.method == "glmdisc"
    np.testing.assert_allclose(back.predict(ds), model.predict(ds), rtol=0, atol=1e-12)
    assert back.scorecard_table().startswith("feature,bin,coefficient")


def test_csv_round_trip_and_split(tmp_path):
    ds = glmdisc.simulate("A", n=300, seed=1)
    ds.save_csv(tmp_path / "d.csv")
    ds.save_schema(tmp_path / "d.schema.json")
    again = glmdisc.load_csv(tmp_path / "d.csv", tmp_path / "d.schema.json")
    assert again == ds
    train, test = glmdisc.split(ds, 0.3, seed=4)
    assert len(test) == math.ceil(300 * 0.3)
    assert len(train) + len(test) == 300


def test_metrics_and_errors():
    assert glmdisc.auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)
    assert glmdisc.gini([0.3] * 4, [0, 0, 1, 1]) == 0.0
    with pytest.raises(glmdisc.SingleClass):
        glmdisc.auc([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        glmdisc.fit(glmdisc.simulate("A", n=50), "cart")
    with pytest.raises(TypeError):
        glmdisc.fit(glmdisc.simulate("A", n=50), epochs_typo=3)
    with pytest.raises(glmdisc.SingleClass):
        glmdisc.fit_allr(glmdisc.Dataset({"x": [0.1, 0.2, 0.3]}, [1, 1, 1]))


def test_benchmark_rows():
    ds = glmdisc.simulate("A", n=1200, seed=2)
    cfg = glmdisc.TrainConfig()
    cfg.epochs = 5
    cfg.m_max = [3]
    rows = glmdisc.benchmark(ds, bootstrap=10, config=cfg)
    assert [r["method"] for r in rows] == ["allr", "mdlp-chi2", "glmdisc"]
    assert all(-1 <= r["gini"] <= 1 and r["sd"] >= 0 for r in rows)


@pytest.mark.skipif(not os.environ.get("GLMDISC_DATA_DIR"), reason="data directory not configured")
def test_german_credit_loads():
    d = os.environ["GLMDISC_DATA_DIR"]
    ds = glmdisc.load_csv(os.path.join(d, "german_credit.csv"), os.path.join(d, "german_credit.schema.json"))
    assert len(ds) == 1000
