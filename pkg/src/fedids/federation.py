"""In-process federated training: per-round local updates on K nodes,
sample-count-weighted aggregation of their parameters, and redistribution
of the aggregate for T communication rounds.

Nodes train from the freshly broadcast global weights each round (their
Adam moments restart with them), so per-node work is independent and the
whole protocol is deterministic under the configured seeds regardless of
node execution order.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .checkpoint import save_checkpoint
from .data import NodeDataset
from .network import ModelArch, ModelParams, TrainConfig, init_model, mean_loss, train_epochs
from .seeding import derive_seed


class FederationError(ValueError):
    """Raised for invalid federation configurations or inputs."""


@dataclass(frozen=True)
class FederationConfig:
    arch: ModelArch
    rounds: int = 20
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 1:
            raise FederationError("rounds must be >= 1")


@dataclass
class NodeState:
    """One simulated device: its preprocessed partition and, during a run,
    its latest local parameters."""

    node_id: int
    dataset: NodeDataset
    params: ModelParams | None = None

    @property
    def sample_count(self) -> int:
        return self.dataset.sample_count


@dataclass(frozen=True)
class RoundLog:
    round_index: int
    node_losses: dict[int, float]
    checkpoint_path: str | None = None


def local_update(
    node: NodeState,
    global_params: ModelParams,
    cfg: TrainConfig,
) -> tuple[ModelParams, int]:
    """Train from the broadcast global weights (not the node's previous
    local weights) for cfg.local_epochs; returns the updated parameters and
    the node's sample count. Optimizer moments restart inside train_epochs,
    so each round begins from a clean slate."""
    data = node.dataset.data
    if global_params.arch.input_length != data.feature_count:
        raise FederationError(
            f"node {node.node_id}: feature count {data.feature_count} != "
            f"model input length {global_params.arch.input_length}"
        )
    labels = (data.labels != 0).astype(np.int64)
    params = train_epochs(global_params, data.features, labels, cfg)
    return params, node.sample_count


def _canonical_order(updates: list[tuple[ModelParams, int]]) -> list[tuple[ModelParams, int]]:
    # Accumulation order fixes the floating-point result, so sort by a
    # content digest: any permutation of the same multiset sums identically.
    def digest(update: tuple[ModelParams, int]) -> bytes:
        params, n_k = update
        h = hashlib.blake2b(digest_size=16)
        h.update(str(n_k).encode())
        for t in params.tensors:
            h.update(np.ascontiguousarray(t, dtype="<f8").tobytes())
        return h.digest()

    return sorted(updates, key=digest)


def fedavg(updates: list[tuple[ModelParams, int]]) -> ModelParams:
    """Sample-count-weighted element-wise mean of local parameters.

    Every output tensor equals sum_k (n_k / n) * w_k with n = sum_k n_k.
    The inputs are left untouched; the result is exactly permutation
    invariant (see _canonical_order).
    """
    if not updates:
        raise FederationError("fedavg needs at least one update")
    arch = updates[0][0].arch
    for params, n_k in updates:
        if params.arch != arch:
            raise FederationError("fedavg inputs must share one architecture")
        if n_k <= 0:
            raise FederationError(f"sample count must be positive, got {n_k}")
    total = float(sum(n_k for _, n_k in updates))
    ordered = _canonical_order(updates)
    acc = [np.zeros_like(t) for t in ordered[0][0].tensors]
    for params, n_k in ordered:
        weight = n_k / total
        for i, tensor in enumerate(params.tensors):
            acc[i] += weight * tensor
    return ModelParams(arch=arch, tensors=tuple(acc))


def run_federation(
    nodes: list[NodeState],
    cfg: FederationConfig,
    checkpoint_dir: str | os.PathLike | None = None,
) -> tuple[ModelParams, list[RoundLog]]:
    """Execute T rounds of broadcast -> local update on each node -> fedavg.

    The initial global model comes from init_model(cfg.arch, seed); each
    (round, node) gets its own derived training seed, so results do not
    depend on node execution order. Nodes keep their final-round local
    parameters in .params. Returns the final global parameters and one log
    entry per round.
    """
    if not nodes:
        raise FederationError("run_federation needs at least one node")
    ids = [n.node_id for n in nodes]
    if len(set(ids)) != len(ids):
        raise FederationError(f"duplicate node ids: {ids}")
    global_params = init_model(cfg.arch, seed=derive_seed(cfg.seed, "global-init"))
    logs: list[RoundLog] = []
    for round_index in range(1, cfg.rounds + 1):
        updates: list[tuple[ModelParams, int]] = []
        losses: dict[int, float] = {}
        for node in nodes:
            node_cfg = replace(
                cfg.train, seed=derive_seed(cfg.seed, "round", round_index, "node", node.node_id)
            )
            params, n_k = local_update(node, global_params, node_cfg)
            node.params = params
            updates.append((params, n_k))
            data = node.dataset.data
            losses[node.node_id] = mean_loss(
                params, data.features, (data.labels != 0).astype(np.int64)
            )
        global_params = fedavg(updates)
        path = None
        if checkpoint_dir is not None:
            path = os.path.join(checkpoint_dir, f"round_{round_index:04d}.ckpt")
            save_checkpoint(path, global_params, round_index=round_index, seed=cfg.seed)
        logs.append(RoundLog(round_index=round_index, node_losses=losses, checkpoint_path=path))
    return global_params, logs


def fine_tune_locally(
    nodes: list[NodeState],
    global_params: ModelParams,
    cfg: FederationConfig,
) -> dict[int, ModelParams]:
    """One more local training pass from the final global weights; this is
    the per-node model that transferability evaluation uses by default."""
    tuned: dict[int, ModelParams] = {}
    for node in nodes:
        node_cfg = replace(
            cfg.train, seed=derive_seed(cfg.seed, "fine-tune", node.node_id)
        )
        params, _ = local_update(node, global_params, node_cfg)
        node.params = params
        tuned[node.node_id] = params
    return tuned
