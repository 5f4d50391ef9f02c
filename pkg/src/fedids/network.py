"""From-scratch 1D convolutional detector: forward pass, exact
backpropagation, softmax cross-entropy, and Adam.

Everything runs in float64 numpy. Parameters are immutable value objects
flowing through pure functions; that is what lets the optimizer, gradient
checks, and federated weight averaging be tested at tight tolerances.

The default architecture is four valid (unpadded) convolutions with ReLU,
one dropout stage after the conv stack, and two fully connected layers onto
a 2-way (benign/attack) output. Channel counts, kernel size, stride,
dropout rate, and the hidden width are all configurable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .seeding import derive_seed


class ArchitectureError(ValueError):
    """Layer dimensions are inconsistent (e.g. a conv output length <= 0)."""


@dataclass(frozen=True)
class ConvSpec:
    out_channels: int
    kernel_size: int = 3
    stride: int = 1

    def __post_init__(self):
        if self.out_channels < 1 or self.kernel_size < 1 or self.stride < 1:
            raise ArchitectureError(f"invalid conv spec {self}")


DEFAULT_CONV_LAYERS = (ConvSpec(32), ConvSpec(64), ConvSpec(64), ConvSpec(128))


@dataclass(frozen=True)
class ModelArch:
    """Fixed network shape; the parameter tensors are derived from it.

    output_dim is pinned to 2: the detector emits one-hot benign/attack.
    """

    input_length: int
    conv_layers: tuple[ConvSpec, ...] = DEFAULT_CONV_LAYERS
    dropout_rate: float = 0.5
    hidden_units: int = 128
    output_dim: int = 2

    def __post_init__(self):
        if self.output_dim != 2:
            raise ArchitectureError("output_dim must be 2 (benign/attack one-hot)")
        if not self.conv_layers:
            raise ArchitectureError("at least one conv layer is required")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ArchitectureError(f"dropout_rate must be in [0,1), got {self.dropout_rate}")
        if self.hidden_units < 1:
            raise ArchitectureError("hidden_units must be >= 1")
        self.conv_output_lengths()  # validates

    def conv_output_lengths(self) -> tuple[int, ...]:
        lengths = []
        length = self.input_length
        for i, spec in enumerate(self.conv_layers):
            length = (length - spec.kernel_size) // spec.stride + 1
            if length < 1:
                raise ArchitectureError(
                    f"conv layer {i} reduces length to {length} (input {self.input_length})"
                )
            lengths.append(length)
        return tuple(lengths)

    def flat_size(self) -> int:
        return self.conv_layers[-1].out_channels * self.conv_output_lengths()[-1]

    def param_shapes(self) -> tuple[tuple[int, ...], ...]:
        """Shapes of the parameter tensors, in storage order
        (conv W/b pairs, then the two fully connected W/b pairs)."""
        shapes: list[tuple[int, ...]] = []
        in_channels = 1
        for spec in self.conv_layers:
            shapes.append((spec.out_channels, in_channels, spec.kernel_size))
            shapes.append((spec.out_channels,))
            in_channels = spec.out_channels
        shapes.append((self.flat_size(), self.hidden_units))
        shapes.append((self.hidden_units,))
        shapes.append((self.hidden_units, self.output_dim))
        shapes.append((self.output_dim,))
        return tuple(shapes)


def _frozen_tensors(tensors) -> tuple[np.ndarray, ...]:
    out = []
    for t in tensors:
        a = np.array(t, dtype=np.float64, copy=True)
        a.setflags(write=False)
        out.append(a)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ModelParams:
    """All weights and biases of one model, in arch.param_shapes() order."""

    arch: ModelArch
    tensors: tuple[np.ndarray, ...]

    def __post_init__(self):
        expected = self.arch.param_shapes()
        if len(self.tensors) != len(expected):
            raise ArchitectureError(
                f"expected {len(expected)} parameter tensors, got {len(self.tensors)}"
            )
        tensors = _frozen_tensors(self.tensors)
        for t, shape in zip(tensors, expected):
            if t.shape != shape:
                raise ArchitectureError(f"parameter shape {t.shape} != expected {shape}")
            if not np.isfinite(t).all():
                raise ArchitectureError("non-finite parameter values")
        object.__setattr__(self, "tensors", tensors)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return self.arch == other.arch and all(
            np.array_equal(a, b) for a, b in zip(self.tensors, other.tensors)
        )


@dataclass(frozen=True, eq=False)
class GradientSet:
    """Loss gradients, tensor-for-tensor congruent with some ModelParams."""

    tensors: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "tensors", _frozen_tensors(self.tensors))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    local_epochs: int = 1
    dropout_active: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.local_epochs < 0:
            raise ValueError("local_epochs must be >= 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("adam betas must lie in [0,1)")


@dataclass(frozen=True, eq=False)
class OptimizerState:
    """Adam first/second moment estimates plus the step counter."""

    m: tuple[np.ndarray, ...]
    v: tuple[np.ndarray, ...]
    step: int = 0

    def __post_init__(self):
        if self.step < 0:
            raise ValueError("step must be >= 0")
        object.__setattr__(self, "m", _frozen_tensors(self.m))
        object.__setattr__(self, "v", _frozen_tensors(self.v))


def init_optimizer_state(params: ModelParams) -> OptimizerState:
    zeros = tuple(np.zeros_like(t) for t in params.tensors)
    return OptimizerState(m=zeros, v=tuple(np.zeros_like(t) for t in params.tensors), step=0)


def init_model(arch: ModelArch, seed: int = 0) -> ModelParams:
    """Fan-in-scaled uniform weights, zero biases; deterministic under seed."""
    rng = np.random.default_rng(seed)
    tensors = []
    for shape in arch.param_shapes():
        if len(shape) == 1:
            tensors.append(np.zeros(shape))
        else:
            # conv weight (out, in, k): fan-in in*k; fc weight (in, out): fan-in in
            fan_in = shape[1] * shape[2] if len(shape) == 3 else shape[0]
            limit = 1.0 / np.sqrt(fan_in)
            tensors.append(rng.uniform(-limit, limit, size=shape))
    return ModelParams(arch=arch, tensors=tuple(tensors))


# ---------------------------------------------------------------------------
# Layer primitives
# ---------------------------------------------------------------------------

def conv1d_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray, stride: int) -> np.ndarray:
    """Valid 1-D convolution. x (n, c_in, L), weight (c_out, c_in, k)."""
    k = weight.shape[2]
    windows = sliding_window_view(x, k, axis=2)[:, :, ::stride, :]
    return np.einsum("nclk,ock->nol", windows, weight, optimize=True) + bias[None, :, None]


def conv1d_backward(
    x: np.ndarray, weight: np.ndarray, stride: int, d_out: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of a valid 1-D convolution: (d_x, d_weight, d_bias)."""
    k = weight.shape[2]
    windows = sliding_window_view(x, k, axis=2)[:, :, ::stride, :]
    d_weight = np.einsum("nclk,nol->ock", windows, d_out, optimize=True)
    d_bias = d_out.sum(axis=(0, 2))
    d_x = np.zeros_like(x)
    out_len = d_out.shape[2]
    for j in range(k):
        contrib = np.einsum("nol,oc->ncl", d_out, weight[:, :, j], optimize=True)
        d_x[:, :, j : j + stride * out_len : stride] += contrib
    return d_x, d_weight, d_bias


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean softmax cross-entropy and its logits gradient, log-sum-exp
    stabilized so unbounded inputs never overflow."""
    n = len(labels)
    zmax = logits.max(axis=1, keepdims=True)
    shifted = logits - zmax
    lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True)) + zmax
    logp = logits - lse
    loss = float(-logp[np.arange(n), labels].mean())
    probs = np.exp(logp)
    probs[np.arange(n), labels] -= 1.0
    return loss, probs / n


# ---------------------------------------------------------------------------
# Full-network forward / backward
# ---------------------------------------------------------------------------

def _validate_batch(arch: ModelArch, batch: np.ndarray) -> np.ndarray:
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != arch.input_length:
        raise ValueError(
            f"batch shape {batch.shape} incompatible with input length {arch.input_length}"
        )
    if not np.isfinite(batch).all():
        raise ValueError("batch contains non-finite values")
    return batch


def _forward_cached(params: ModelParams, batch: np.ndarray, train: bool, seed: int):
    arch = params.arch
    x = batch[:, None, :]
    conv_inputs = []
    conv_preacts = []
    t = 0
    for spec in arch.conv_layers:
        weight, bias = params.tensors[t], params.tensors[t + 1]
        t += 2
        conv_inputs.append(x)
        z = conv1d_forward(x, weight, bias, spec.stride)
        conv_preacts.append(z)
        x = np.maximum(z, 0.0)
    flat = x.reshape(len(batch), -1)
    if train and arch.dropout_rate > 0.0:
        rng = np.random.default_rng(seed)
        mask = (rng.random(flat.shape) >= arch.dropout_rate) / (1.0 - arch.dropout_rate)
        dropped = flat * mask
    else:
        mask = None
        dropped = flat
    w1, b1, w2, b2 = params.tensors[t], params.tensors[t + 1], params.tensors[t + 2], params.tensors[t + 3]
    hidden_pre = dropped @ w1 + b1
    hidden = np.maximum(hidden_pre, 0.0)
    logits = hidden @ w2 + b2
    cache = (conv_inputs, conv_preacts, dropped, mask, hidden_pre, hidden)
    return logits, cache


def _backward(params: ModelParams, cache, d_logits: np.ndarray) -> GradientSet:
    arch = params.arch
    conv_inputs, conv_preacts, dropped, mask, hidden_pre, hidden = cache
    t = 2 * len(arch.conv_layers)
    w1, w2 = params.tensors[t], params.tensors[t + 2]

    d_w2 = hidden.T @ d_logits
    d_b2 = d_logits.sum(axis=0)
    d_hidden = d_logits @ w2.T
    d_hidden_pre = d_hidden * (hidden_pre > 0)
    d_w1 = dropped.T @ d_hidden_pre
    d_b1 = d_hidden_pre.sum(axis=0)
    d_dropped = d_hidden_pre @ w1.T
    d_flat = d_dropped * mask if mask is not None else d_dropped

    n = len(d_logits)
    d_x = d_flat.reshape(n, arch.conv_layers[-1].out_channels, -1)
    conv_grads: list[tuple[np.ndarray, np.ndarray]] = []
    for i in reversed(range(len(arch.conv_layers))):
        spec = arch.conv_layers[i]
        weight = params.tensors[2 * i]
        d_z = d_x * (conv_preacts[i] > 0)
        d_x, d_w, d_b = conv1d_backward(conv_inputs[i], weight, spec.stride, d_z)
        conv_grads.append((d_w, d_b))
    tensors: list[np.ndarray] = []
    for d_w, d_b in reversed(conv_grads):
        tensors.extend([d_w, d_b])
    tensors.extend([d_w1, d_b1, d_w2, d_b2])
    return GradientSet(tensors=tuple(tensors))


def forward(params: ModelParams, batch: np.ndarray, mode: str = "eval", seed: int = 0) -> np.ndarray:
    """Logits (n, 2). Eval mode is deterministic and dropout-free; train
    mode applies the dropout mask derived from seed."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    batch = _validate_batch(params.arch, batch)
    logits, _ = _forward_cached(params, batch, train=(mode == "train"), seed=seed)
    return logits


def loss_and_grad(
    params: ModelParams,
    batch: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
) -> tuple[float, GradientSet]:
    """Mean softmax cross-entropy over the batch and its exact gradient.

    Dropout is applied when cfg.dropout_active, with the mask derived from
    cfg.seed, so the gradient is the exact derivative of the loss actually
    evaluated.
    """
    batch = _validate_batch(params.arch, batch)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(batch) or len(labels) == 0:
        raise ValueError("labels must be non-empty and match the batch")
    if labels.min() < 0 or labels.max() >= params.arch.output_dim:
        raise ValueError("labels must be 0 (benign) or 1 (attack)")
    train = cfg.dropout_active and params.arch.dropout_rate > 0.0
    logits, cache = _forward_cached(params, batch, train=train, seed=cfg.seed)
    loss, d_logits = softmax_cross_entropy(logits, labels)
    return loss, _backward(params, cache, d_logits)


def adam_step(
    state: OptimizerState,
    params: ModelParams,
    grads: GradientSet,
    cfg: TrainConfig,
) -> tuple[ModelParams, OptimizerState]:
    """One bias-corrected Adam update; returns new params and state."""
    if len(grads.tensors) != len(params.tensors):
        raise ValueError("gradient/parameter tensor count mismatch")
    for g, p in zip(grads.tensors, params.tensors):
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        if not np.isfinite(g).all():
            raise ValueError("non-finite gradient entries")
    t = state.step + 1
    b1, b2 = cfg.beta1, cfg.beta2
    new_m, new_v, new_p = [], [], []
    for m, v, g, p in zip(state.m, state.v, grads.tensors, params.tensors):
        m2 = b1 * m + (1 - b1) * g
        v2 = b2 * v + (1 - b2) * (g * g)
        m_hat = m2 / (1 - b1**t)
        v_hat = v2 / (1 - b2**t)
        new_m.append(m2)
        new_v.append(v2)
        new_p.append(p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon))
    return (
        ModelParams(arch=params.arch, tensors=tuple(new_p)),
        OptimizerState(m=tuple(new_m), v=tuple(new_v), step=t),
    )


def predict(params: ModelParams, x: np.ndarray) -> int | np.ndarray:
    """Argmax of eval-mode logits; exact ties resolve to benign (0).

    Accepts a single feature vector (returns int) or a batch (returns an
    int array).
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    logits = forward(params, x[None, :] if single else x, mode="eval")
    labels = np.argmax(logits, axis=1)  # first max wins, so ties -> 0
    return int(labels[0]) if single else labels.astype(np.int64)


def mean_loss(params: ModelParams, batch: np.ndarray, labels: np.ndarray) -> float:
    """Eval-mode (dropout-free) mean cross-entropy, for logging."""
    logits = forward(params, batch, mode="eval")
    loss, _ = softmax_cross_entropy(logits, np.asarray(labels, dtype=np.int64))
    return loss


def train_epochs(
    params: ModelParams,
    features: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
) -> ModelParams:
    """Run cfg.local_epochs epochs of shuffled mini-batch Adam.

    Deterministic under (params, data, cfg): the per-epoch shuffle and the
    per-step dropout masks are derived from cfg.seed. The input params are
    never modified; a fresh optimizer state is used, so each call restarts
    Adam's moments.
    """
    features = _validate_batch(params.arch, features)
    labels = np.asarray(labels, dtype=np.int64)
    if len(features) == 0:
        raise ValueError("cannot train on an empty dataset")
    if len(labels) != len(features):
        raise ValueError("labels length must match features")
    state = init_optimizer_state(params)
    n = len(features)
    for epoch in range(cfg.local_epochs):
        perm = np.random.default_rng(derive_seed(cfg.seed, "shuffle", epoch)).permutation(n)
        for step, start in enumerate(range(0, n, cfg.batch_size)):
            idx = perm[start : start + cfg.batch_size]
            step_cfg = replace(cfg, seed=derive_seed(cfg.seed, "dropout", epoch, step))
            _, grads = loss_and_grad(params, features[idx], labels[idx], step_cfg)
            params, state = adam_step(state, params, grads, cfg)
    return params


def arch_to_dict(arch: ModelArch) -> dict:
    return {
        "input_length": arch.input_length,
        "conv_layers": [
            {"out_channels": s.out_channels, "kernel_size": s.kernel_size, "stride": s.stride}
            for s in arch.conv_layers
        ],
        "dropout_rate": arch.dropout_rate,
        "hidden_units": arch.hidden_units,
        "output_dim": arch.output_dim,
    }


def arch_from_dict(raw: dict) -> ModelArch:
    return ModelArch(
        input_length=int(raw["input_length"]),
        conv_layers=tuple(
            ConvSpec(int(s["out_channels"]), int(s["kernel_size"]), int(s["stride"]))
            for s in raw["conv_layers"]
        ),
        dropout_rate=float(raw["dropout_rate"]),
        hidden_units=int(raw["hidden_units"]),
        output_dim=int(raw["output_dim"]),
    )
