"""Estimator-style wrapper around the functional network core, so the
detector composes with fit/predict tooling (grid search, pipelines)."""

from __future__ import annotations

import numpy as np

from .network import (
    ConvSpec,
    ModelArch,
    ModelParams,
    TrainConfig,
    forward,
    init_model,
    predict,
    train_epochs,
)
from .preprocess import NotFittedError, _ParamsMixin


class ConvNetClassifier(_ParamsMixin):
    """Binary benign/attack detector with the fit/predict interface.

    The architecture is instantiated from the training data's feature count
    at fit time; fitted parameters live in params_.
    """

    _param_names = (
        "conv_channels",
        "kernel_size",
        "stride",
        "dropout_rate",
        "hidden_units",
        "learning_rate",
        "batch_size",
        "epochs",
        "dropout_active",
        "seed",
    )

    def __init__(
        self,
        conv_channels: tuple[int, ...] = (32, 64, 64, 128),
        kernel_size: int = 3,
        stride: int = 1,
        dropout_rate: float = 0.5,
        hidden_units: int = 128,
        learning_rate: float = 1e-3,
        batch_size: int = 32,
        epochs: int = 1,
        dropout_active: bool = True,
        seed: int = 0,
    ):
        self.conv_channels = tuple(conv_channels)
        self.kernel_size = kernel_size
        self.stride = stride
        self.dropout_rate = dropout_rate
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.dropout_active = dropout_active
        self.seed = seed
        self.params_: ModelParams | None = None

    def _arch(self, input_length: int) -> ModelArch:
        return ModelArch(
            input_length=input_length,
            conv_layers=tuple(
                ConvSpec(c, self.kernel_size, self.stride) for c in self.conv_channels
            ),
            dropout_rate=self.dropout_rate,
            hidden_units=self.hidden_units,
        )

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            local_epochs=self.epochs,
            dropout_active=self.dropout_active,
            seed=self.seed,
        )

    def fit(self, X: np.ndarray, y: np.ndarray) -> "ConvNetClassifier":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError(f"fit needs a non-empty 2-D array, got shape {X.shape}")
        arch = self._arch(X.shape[1])
        params = init_model(arch, seed=self.seed)
        self.params_ = train_epochs(params, X, np.asarray(y), self._train_config())
        return self

    def _require_fit(self) -> ModelParams:
        if self.params_ is None:
            raise NotFittedError("ConvNetClassifier used before fit")
        return self.params_

    def predict(self, X: np.ndarray) -> np.ndarray:
        return predict(self._require_fit(), np.asarray(X, dtype=np.float64))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        logits = forward(self._require_fit(), np.asarray(X, dtype=np.float64), mode="eval")
        shifted = logits - logits.max(axis=1, keepdims=True)
        expd = np.exp(shifted)
        return expd / expd.sum(axis=1, keepdims=True)

    def score(self, X: np.ndarray, y: np.ndarray) -> float:
        """Plain accuracy; see evaluation.attack_accuracy for the balanced
        metric this project reports."""
        return float((self.predict(X) == np.asarray(y)).mean())
