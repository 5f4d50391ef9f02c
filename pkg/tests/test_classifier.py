import numpy as np
import pytest

from fedids import ConvNetClassifier, NotFittedError


@pytest.fixture
def separable(rng):
    benign = rng.normal(size=(120, 16))
    attack = rng.normal(size=(120, 16))
    attack[:, :3] += 3.0
    X = np.vstack([benign, attack])
    y = np.array([0] * 120 + [1] * 120)
    return X, y


def small_clf(**kwargs):
    defaults = dict(
        conv_channels=(4, 4, 4, 8), hidden_units=16, dropout_rate=0.1, epochs=20, seed=0
    )
    defaults.update(kwargs)
    return ConvNetClassifier(**defaults)


class TestConvNetClassifier:
    def test_fit_predict(self, separable):
        X, y = separable
        clf = small_clf().fit(X, y)
        assert (clf.predict(X) == y).mean() > 0.95

    def test_predict_proba_rows_sum_to_one(self, separable):
        X, y = separable
        clf = small_clf(epochs=2).fit(X, y)
        proba = clf.predict_proba(X[:10])
        assert proba.shape == (10, 2)
        assert np.allclose(proba.sum(axis=1), 1.0, atol=1e-12)

    def test_unfitted_raises(self):
        with pytest.raises(NotFittedError):
            small_clf().predict(np.zeros((1, 16)))

    def test_get_set_params_round_trip(self):
        clf = small_clf()
        params = clf.get_params()
        assert params["conv_channels"] == (4, 4, 4, 8)
        clf.set_params(epochs=7)
        assert clf.epochs == 7
        with pytest.raises(ValueError):
            clf.set_params(bogus=1)

    def test_deterministic_under_seed(self, separable):
        X, y = separable
        a = small_clf(epochs=3).fit(X, y)
        b = small_clf(epochs=3).fit(X, y)
        assert a.params_ == b.params_

    def test_score_is_plain_accuracy(self, separable):
        X, y = separable
        clf = small_clf(epochs=20).fit(X, y)
        assert clf.score(X, y) == (clf.predict(X) == y).mean()
