import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from fastsilhouette import (
    SilhouetteEvaluator,
    ValidationError,
    generate_blobs,
    BlobSpec,
    silhouette_report,
    silhouette_samples,
    silhouette_score,
)

CANON_X = np.array([[0.0, 0.0], [0.0, 1.0], [4.0, 0.0], [4.0, 1.0]])


def test_functional_api():
    y = ["A", "A", "B", "B"]
    assert silhouette_score(CANON_X, y) == pytest.approx(31 / 33, abs=1e-15)
    assert silhouette_score(CANON_X, y, engine="naive", n_shards=1) == pytest.approx(31 / 33, abs=1e-15)
    np.testing.assert_allclose(silhouette_samples(CANON_X, y), 31 / 33, atol=1e-15)
    assert silhouette_report(CANON_X, y, metric="euclidean", engine="naive").metric == "euclidean_oracle"


def test_fast_euclidean_refused():
    with pytest.raises(ValidationError, match="no fast path"):
        silhouette_score(CANON_X, [0, 0, 1, 1], metric="euclidean")


def test_bad_engine_and_shards():
    with pytest.raises(ValidationError, match="engine"):
        silhouette_score(CANON_X, [0, 0, 1, 1], engine="spark")
    with pytest.raises(ValidationError, match="n_shards"):
        silhouette_score(CANON_X, [0, 0, 1, 1], n_shards=0)


def test_params_and_clone():
    est = SilhouetteEvaluator(metric="cosine", n_shards=2)
    assert est.get_params() == {"metric": "cosine", "engine": "fast", "n_shards": 2}
    other = clone(est).set_params(engine="naive")
    assert other.engine == "naive" and est.engine == "fast"


def test_fit_and_transform():
    ds = generate_blobs(BlobSpec(n=300, d=3, k=3, seed=4))
    est = SilhouetteEvaluator(n_shards=1).fit(ds.X, ds.labels)
    assert est.silhouette_score_ == est.report_.mean
    assert est.n_features_in_ == 3
    assert est.classes_.tolist() == [0, 1, 2]
    dist = est.transform(ds.X[:5])
    assert dist.shape == (5, 3)
    for i in range(5):
        for k in range(3):
            members = ds.X[ds.labels == k]
            assert dist[i, k] == pytest.approx(np.mean(((members - ds.X[i]) ** 2).sum(1)), rel=1e-12)
    assert np.array_equal(est.predict(ds.X[:5]), np.argmin(dist, axis=1))
    assert est.score(ds.X, ds.labels) == pytest.approx(est.silhouette_score_, abs=1e-15)


def test_predict_returns_original_labels():
    est = SilhouetteEvaluator(metric="cosine", n_shards=1).fit([[1, 0], [2, 0.1], [0, 1], [0.1, 3]], ["east", "east", "north", "north"])
    assert est.predict([[5, 0.2], [0.3, 4]]).tolist() == ["east", "north"]


def test_transform_requires_fit_and_matching_width():
    est = SilhouetteEvaluator()
    with pytest.raises(NotFittedError):
        est.transform(CANON_X)
    est.fit(CANON_X, [0, 0, 1, 1])
    with pytest.raises(ValueError):
        est.transform(np.zeros((2, 3)))


def test_fit_needs_labels():
    with pytest.raises(ValueError, match="labels"):
        SilhouetteEvaluator().fit(CANON_X, None)


def test_euclidean_evaluator_has_no_transform():
    est = SilhouetteEvaluator(metric="euclidean", engine="naive").fit(CANON_X, [0, 0, 1, 1])
    assert est.cluster_stats_ is None
    with pytest.raises(ValueError, match="not available"):
        est.transform(CANON_X)


def test_in_pipeline():
    ds = generate_blobs(BlobSpec(n=200, d=4, k=4, seed=9))
    pipe = make_pipeline(StandardScaler(), SilhouetteEvaluator(n_shards=1))
    out = pipe.fit_transform(ds.X, ds.labels)
    assert out.shape == (200, 4)
    assert (out >= 0).all()
