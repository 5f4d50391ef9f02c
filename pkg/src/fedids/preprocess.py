"""Preprocessing stages: feature normalization, temporal averaging, and
bootstrapped class balancing, composed into per-approach pipelines.

The transformers follow the fit/transform estimator convention (plus
get_params/set_params) so they compose with the wider ecosystem; the
resampler exposes fit_resample because it changes the number of rows.
Dataset-level wrappers keep the library's Dataset objects flowing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .data import BENIGN, Dataset, DatasetError


class NotFittedError(RuntimeError):
    """Transform was called before fit."""


class _ParamsMixin:
    """Minimal sklearn-compatible parameter plumbing for our estimators."""

    _param_names: tuple[str, ...] = ()

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params):
        for name, value in params.items():
            if name not in self._param_names:
                raise ValueError(f"unknown parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self


class FeatureNormalizer(_ParamsMixin):
    """Per-feature scaling fit on training data only.

    mode "minmax" maps each training feature into [0,1] (constant features
    map to 0); mode "zscore" centers by mean and divides by the population
    std. Applying a fitted normalizer to other data may leave [0,1]; set
    clamp=True to clip min-max output back into range.
    """

    _param_names = ("mode", "clamp")

    def __init__(self, mode: str = "minmax", clamp: bool = False):
        if mode not in ("minmax", "zscore"):
            raise ValueError(f"mode must be 'minmax' or 'zscore', got {mode!r}")
        self.mode = mode
        self.clamp = clamp
        self.offset_: np.ndarray | None = None
        self.scale_: np.ndarray | None = None

    def fit(self, X: np.ndarray) -> "FeatureNormalizer":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError(f"fit needs a non-empty 2-D array, got shape {X.shape}")
        if self.mode == "minmax":
            lo = X.min(axis=0)
            span = X.max(axis=0) - lo
            self.offset_ = lo
            self.scale_ = np.where(span > 0, span, 1.0)
            self._constant = span == 0
        else:
            mean = X.mean(axis=0)
            std = X.std(axis=0)
            self.offset_ = mean
            self.scale_ = np.where(std > 0, std, 1.0)
            self._constant = std == 0
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if self.offset_ is None:
            raise NotFittedError("FeatureNormalizer.transform called before fit")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.offset_):
            raise ValueError(
                f"feature count mismatch: fitted {len(self.offset_)}, got shape {X.shape}"
            )
        out = (X - self.offset_) / self.scale_
        out[:, self._constant] = 0.0
        if self.clamp and self.mode == "minmax":
            out = np.clip(out, 0.0, 1.0)
        return out

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)


class TemporalAverager(_ParamsMixin):
    """Replace each sample with the mean of the last `window` samples of its
    stream (partial windows during warm-up, so output length == input length).

    With per_class=True (default) each label value forms its own stream, so
    feature vectors are never blended across the benign/attack boundary;
    per_class=False averages the raw record stream regardless of label.
    """

    _param_names = ("window", "per_class")

    def __init__(self, window: int = 3, per_class: bool = True):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.window = window
        self.per_class = per_class

    def fit(self, X: np.ndarray, y: np.ndarray | None = None) -> "TemporalAverager":
        return self  # stateless

    def transform(self, X: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError(f"transform needs a non-empty 2-D array, got shape {X.shape}")
        if not self.per_class:
            return _sliding_mean(X, self.window)
        if y is None:
            raise ValueError("per-class averaging needs labels")
        y = np.asarray(y)
        if len(y) != len(X):
            raise ValueError(f"labels length {len(y)} != rows {len(X)}")
        out = np.empty_like(X)
        for label in np.unique(y):
            idx = np.flatnonzero(y == label)
            out[idx] = _sliding_mean(X[idx], self.window)
        return out


def _sliding_mean(X: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over the previous `window` rows; shorter prefix windows
    use however many rows exist."""
    n = len(X)
    if window == 1 or n == 1:
        return X.copy()
    r = min(window, n)
    out = np.empty_like(X)
    # warm-up: mean over the first t+1 rows
    csum = np.cumsum(X[: r - 1], axis=0)
    out[: r - 1] = csum / np.arange(1, r)[:, None]
    out[r - 1 :] = sliding_window_view(X, r, axis=0).mean(axis=-1)
    return out


class BootstrapOversampler(_ParamsMixin):
    """Rebalance by resampling attack rows with replacement until attacks
    make up `target_attack_fraction` of the output (0.5: as many attack rows
    as benign rows). Benign rows are untouched; every synthetic attack row is
    a copy of an original one; the result is shuffled under the seed.
    """

    _param_names = ("target_attack_fraction", "seed")

    def __init__(self, target_attack_fraction: float = 0.5, seed: int = 0):
        if not 0.0 < target_attack_fraction < 1.0:
            raise ValueError(
                f"target_attack_fraction must be in (0,1), got {target_attack_fraction}"
            )
        self.target_attack_fraction = target_attack_fraction
        self.seed = seed

    def fit_resample(self, X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        attack_idx = np.flatnonzero(y != BENIGN)
        benign_count = int((y == BENIGN).sum())
        if len(attack_idx) == 0:
            raise ValueError("no attack records to resample")
        if benign_count == 0:
            raise ValueError("no benign records; nothing to balance against")
        f = self.target_attack_fraction
        wanted = int(round(benign_count * f / (1.0 - f)))
        extra = max(0, wanted - len(attack_idx))
        rng = np.random.default_rng(self.seed)
        picks = attack_idx[rng.integers(0, len(attack_idx), size=extra)]
        X_out = np.concatenate([X, X[picks]])
        y_out = np.concatenate([y, y[picks]])
        order = rng.permutation(len(y_out))
        return X_out[order], y_out[order]


# ---------------------------------------------------------------------------
# Dataset-level wrappers
# ---------------------------------------------------------------------------

def fit_normalizer(train: Dataset, mode: str = "minmax", clamp: bool = False) -> FeatureNormalizer:
    return FeatureNormalizer(mode=mode, clamp=clamp).fit(train.features)


def apply_normalizer(normalizer: FeatureNormalizer, ds: Dataset) -> Dataset:
    if normalizer.offset_ is not None and ds.feature_count != len(normalizer.offset_):
        raise DatasetError(
            f"normalizer fitted for {len(normalizer.offset_)} features, dataset has {ds.feature_count}"
        )
    return ds.with_features(normalizer.transform(ds.features), note=f"normalize[{normalizer.mode}]")


def temporal_average(ds: Dataset, averager: TemporalAverager) -> Dataset:
    """Averaged copy of ds; labels and record order pass through unchanged."""
    if len(ds) == 0:
        raise DatasetError("cannot temporally average an empty dataset")
    features = averager.transform(ds.features, ds.labels)
    return ds.with_features(features, note=f"temporal_average[r={averager.window}]")


def bootstrap_balance(ds: Dataset, target: float = 0.5, seed: int = 0) -> Dataset:
    sampler = BootstrapOversampler(target_attack_fraction=target, seed=seed)
    X, y = sampler.fit_resample(ds.features, ds.labels)
    manifest = dict(ds.manifest)
    manifest["transforms"] = list(manifest.get("transforms", [])) + [
        f"bootstrap[target={target},seed={seed}]"
    ]
    return Dataset(X, y, manifest)


@dataclass(frozen=True)
class PipelineConfig:
    """Which stages an approach applies, and their knobs."""

    use_bootstrap: bool = False
    use_temporal_avg: bool = False
    window: int = 3
    bootstrap_target: float = 0.5
    per_class_averaging: bool = True
    normalizer_mode: str = "minmax"
    clamp: bool = False
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.bootstrap_target < 1.0:
            raise ValueError(f"bootstrap_target must be in (0,1), got {self.bootstrap_target}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


class PreprocessingPipeline:
    """Ordered stage list for one approach: normalize, then temporal
    averaging (on the genuine time-ordered stream), then bootstrapping
    (which destroys order, so it must come last and only on training data).
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.normalizer: FeatureNormalizer | None = None

    @property
    def stages(self) -> tuple[str, ...]:
        names = ["normalize"]
        if self.config.use_temporal_avg:
            names.append("temporal_average")
        if self.config.use_bootstrap:
            names.append("bootstrap")
        return tuple(names)

    def fit(self, train: Dataset) -> "PreprocessingPipeline":
        self.normalizer = fit_normalizer(
            train, mode=self.config.normalizer_mode, clamp=self.config.clamp
        )
        return self

    def _require_fit(self):
        if self.normalizer is None:
            raise NotFittedError("pipeline used before fit")

    def transform_train(self, ds: Dataset) -> Dataset:
        """All stages, training side (bootstrapping included)."""
        self._require_fit()
        out = apply_normalizer(self.normalizer, ds)
        if self.config.use_temporal_avg:
            out = temporal_average(
                out,
                TemporalAverager(self.config.window, per_class=self.config.per_class_averaging),
            )
        if self.config.use_bootstrap:
            out = bootstrap_balance(out, self.config.bootstrap_target, self.config.seed)
        return out

    def transform_eval(self, ds: Dataset) -> Dataset:
        """Inference side: normalize and average only, never resample."""
        self._require_fit()
        out = apply_normalizer(self.normalizer, ds)
        if self.config.use_temporal_avg:
            out = temporal_average(
                out,
                TemporalAverager(self.config.window, per_class=self.config.per_class_averaging),
            )
        return out


def build_pipeline(config: PipelineConfig) -> PreprocessingPipeline:
    """Pipeline for one approach; its .stages property lists the declared
    transformation order."""
    return PreprocessingPipeline(config)
