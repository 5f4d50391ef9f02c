import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fedids import (
    BootstrapOversampler,
    FeatureNormalizer,
    NotFittedError,
    PipelineConfig,
    TemporalAverager,
    apply_normalizer,
    bootstrap_balance,
    build_pipeline,
    fit_normalizer,
    temporal_average,
)


def brute_force_sliding_mean(X, r):
    """Independent oracle: trailing mean with explicit slices."""
    out = np.empty_like(X)
    for t in range(len(X)):
        lo = max(0, t - r + 1)
        out[t] = np.mean(X[lo : t + 1], axis=0)
    return out


class TestNormalizer:
    def test_minmax_basic(self):
        X = np.array([[0.0], [5.0], [10.0]])
        assert FeatureNormalizer().fit_transform(X).ravel().tolist() == [0.0, 0.5, 1.0]

    def test_constant_column_maps_to_zero(self):
        X = np.array([[7.0], [7.0], [7.0]])
        assert FeatureNormalizer().fit_transform(X).ravel().tolist() == [0.0, 0.0, 0.0]

    def test_zscore_population_std(self):
        X = np.array([[1.0], [3.0]])
        out = FeatureNormalizer(mode="zscore").fit_transform(X)
        assert out.ravel().tolist() == [-1.0, 1.0]

    def test_unclamped_by_default(self):
        n = FeatureNormalizer().fit(np.array([[0.0], [10.0]]))
        assert n.transform(np.array([[20.0]]))[0, 0] == 2.0

    def test_clamp_option(self):
        n = FeatureNormalizer(clamp=True).fit(np.array([[0.0], [10.0]]))
        assert n.transform(np.array([[20.0]]))[0, 0] == 1.0

    def test_feature_count_mismatch(self):
        n = FeatureNormalizer().fit(np.zeros((3, 2)))
        with pytest.raises(ValueError, match="mismatch"):
            n.transform(np.zeros((3, 5)))

    def test_transform_before_fit(self):
        with pytest.raises(NotFittedError):
            FeatureNormalizer().transform(np.zeros((1, 1)))

    def test_get_params(self):
        assert FeatureNormalizer(mode="zscore").get_params() == {"mode": "zscore", "clamp": False}

    def test_dataset_wrapper(self, toy_dataset):
        norm = fit_normalizer(toy_dataset)
        out = apply_normalizer(norm, toy_dataset)
        assert out.features.min() >= 0.0 and out.features.max() <= 1.0
        assert np.array_equal(out.labels, toy_dataset.labels)


class TestTemporalAverager:
    def test_warm_up_rule(self):
        X = np.array([[3.0], [6.0], [9.0]])
        out = TemporalAverager(window=3, per_class=False).transform(X)
        assert out.ravel().tolist() == [3.0, 4.5, 6.0]

    def test_window_one_is_identity(self, rng):
        X = rng.normal(size=(50, 4))
        out = TemporalAverager(window=1, per_class=False).transform(X)
        assert np.array_equal(out, X)

    def test_matches_brute_force_oracle(self, rng):
        X = rng.normal(size=(50, 3))
        for r in (1, 2, 3, 5):
            out = TemporalAverager(window=r, per_class=False).transform(X)
            assert np.allclose(out, brute_force_sliding_mean(X, r), atol=1e-12, rtol=0)

    def test_per_class_streams_never_blend(self, rng):
        # benign rows constant 0, attack rows constant 1: any cross-label
        # blending would move values off {0, 1}
        y = rng.integers(0, 2, size=60)
        X = y.astype(float).reshape(-1, 1)
        out = TemporalAverager(window=3, per_class=True).transform(X, y)
        assert np.array_equal(out, X)

    def test_per_class_equals_streamwise_oracle(self, rng):
        X = rng.normal(size=(40, 2))
        y = rng.integers(0, 3, size=40)
        out = TemporalAverager(window=3).transform(X, y)
        for label in np.unique(y):
            idx = np.flatnonzero(y == label)
            assert np.allclose(
                out[idx], brute_force_sliding_mean(X[idx], 3), atol=1e-12, rtol=0
            )

    def test_per_class_requires_labels(self):
        with pytest.raises(ValueError, match="labels"):
            TemporalAverager().transform(np.zeros((3, 1)))

    def test_invalid_window(self):
        with pytest.raises(ValueError):
            TemporalAverager(window=0)

    def test_dataset_wrapper_keeps_labels_and_length(self, toy_dataset):
        out = temporal_average(toy_dataset, TemporalAverager(window=3))
        assert len(out) == len(toy_dataset)
        assert np.array_equal(out.labels, toy_dataset.labels)

    @given(
        r=st.integers(min_value=1, max_value=7),
        n=st.integers(min_value=1, max_value=40),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=60, deadline=None)
    def test_property_exact_trailing_mean(self, r, n, seed):
        X = np.random.default_rng(seed).normal(size=(n, 2))
        out = TemporalAverager(window=r, per_class=False).transform(X)
        for t in range(r - 1, n):
            expected = X[t - r + 1 : t + 1].mean(axis=0)
            assert np.allclose(out[t], expected, atol=1e-12, rtol=0)


class TestBootstrap:
    def test_balances_to_fifty_fifty(self, rng):
        X = rng.normal(size=(110, 3))
        y = np.array([0] * 100 + [1] * 10)
        X2, y2 = BootstrapOversampler(seed=1).fit_resample(X, y)
        assert len(y2) == 200
        assert (y2 == 0).sum() == 100 and (y2 != 0).sum() == 100

    def test_attack_rows_are_copies_of_originals(self, rng):
        X = rng.normal(size=(110, 3))
        y = np.array([0] * 100 + [1] * 10)
        X2, y2 = BootstrapOversampler(seed=1).fit_resample(X, y)
        originals = {row.tobytes() for row in X[y != 0]}
        assert all(row.tobytes() in originals for row in X2[y2 != 0])

    def test_benign_rows_untouched(self, rng):
        X = rng.normal(size=(20, 2))
        y = np.array([0] * 16 + [1] * 4)
        X2, y2 = BootstrapOversampler(seed=5).fit_resample(X, y)
        assert sorted(r.tobytes() for r in X2[y2 == 0]) == sorted(
            r.tobytes() for r in X[y == 0]
        )

    def test_already_balanced_unchanged_counts(self, rng):
        X = rng.normal(size=(100, 2))
        y = np.array([0] * 50 + [1] * 50)
        _, y2 = BootstrapOversampler(seed=0).fit_resample(X, y)
        assert len(y2) == 100

    def test_single_attack_replicated(self):
        X = np.arange(5, dtype=float).reshape(-1, 1)
        y = np.array([0, 0, 0, 0, 1])
        X2, y2 = BootstrapOversampler(seed=3).fit_resample(X, y)
        assert len(y2) == 8
        assert (X2[y2 == 1] == 4.0).all()
        assert (y2 == 1).sum() == 4

    def test_deterministic(self, rng):
        X = rng.normal(size=(30, 2))
        y = np.array([0] * 25 + [2] * 5)
        a = BootstrapOversampler(seed=9).fit_resample(X, y)
        b = BootstrapOversampler(seed=9).fit_resample(X, y)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_requires_both_classes(self, rng):
        X = rng.normal(size=(5, 2))
        with pytest.raises(ValueError, match="attack"):
            BootstrapOversampler().fit_resample(X, np.zeros(5, dtype=int))
        with pytest.raises(ValueError, match="benign"):
            BootstrapOversampler().fit_resample(X, np.ones(5, dtype=int))

    @given(
        n_benign=st.integers(min_value=1, max_value=120),
        n_attack=st.integers(min_value=1, max_value=120),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=60, deadline=None)
    def test_property_exact_balance_and_traceability(self, n_benign, n_attack, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n_benign + n_attack, 2))
        y = np.array([0] * n_benign + [1] * n_attack)
        X2, y2 = BootstrapOversampler(seed=seed).fit_resample(X, y)
        assert (y2 == 0).sum() == n_benign
        assert (y2 != 0).sum() == max(n_attack, n_benign)
        originals = {row.tobytes() for row in X[y != 0]}
        assert all(row.tobytes() in originals for row in X2[y2 != 0])

    def test_dataset_wrapper(self, toy_dataset):
        out = bootstrap_balance(toy_dataset, target=0.5, seed=2)
        hist = out.class_histogram
        assert hist[0] == hist[1] == 80


class TestPipeline:
    def test_declared_stage_order(self):
        pipe = build_pipeline(PipelineConfig(use_bootstrap=True, use_temporal_avg=True))
        assert pipe.stages == ("normalize", "temporal_average", "bootstrap")

    def test_stages_when_disabled(self):
        assert build_pipeline(PipelineConfig()).stages == ("normalize",)

    def test_eval_side_never_resamples(self, toy_dataset):
        pipe = build_pipeline(
            PipelineConfig(use_bootstrap=True, use_temporal_avg=True, window=3, seed=4)
        ).fit(toy_dataset)
        train_out = pipe.transform_train(toy_dataset)
        eval_out = pipe.transform_eval(toy_dataset)
        assert len(train_out) == 160  # 80 benign + 80 attack after balancing
        assert len(eval_out) == len(toy_dataset)
        assert np.array_equal(eval_out.labels, toy_dataset.labels)

    def test_eval_side_applies_averaging(self, toy_dataset):
        with_avg = build_pipeline(PipelineConfig(use_temporal_avg=True, window=3)).fit(toy_dataset)
        without = build_pipeline(PipelineConfig()).fit(toy_dataset)
        assert not np.array_equal(
            with_avg.transform_eval(toy_dataset).features,
            without.transform_eval(toy_dataset).features,
        )

    def test_deterministic(self, toy_dataset):
        cfg = PipelineConfig(use_bootstrap=True, use_temporal_avg=True, seed=77)
        a = build_pipeline(cfg).fit(toy_dataset).transform_train(toy_dataset)
        b = build_pipeline(cfg).fit(toy_dataset).transform_train(toy_dataset)
        assert a == b

    def test_unfitted_pipeline_rejected(self, toy_dataset):
        pipe = build_pipeline(PipelineConfig())
        with pytest.raises(NotFittedError):
            pipe.transform_eval(toy_dataset)
