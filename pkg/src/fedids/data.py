"""Flow-record dataset containers, train/val/test splitting, and the
per-node single-attack partition used by the federated simulation.

A dataset is a pair of locked numpy arrays (features, integer labels) whose
row order is the capture order of the source; several downstream stages
(temporal averaging in particular) rely on that order, so every operation
here is order preserving and returns new objects instead of mutating.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

BENIGN = 0


class DatasetError(ValueError):
    """Raised for malformed datasets or invalid dataset operations."""


def _locked(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FlowRecord:
    """One network flow: a fixed-length feature vector plus a class label
    (0 = benign, k >= 1 = attack class k)."""

    features: np.ndarray
    label: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ordered collection of flow records.

    features is (n, F) float64, labels is (n,) int64; both are read-only so
    every consumer observes the values produced at ingestion. The manifest
    carries provenance (source, cleaning counts, applied transforms) and is
    ignored by equality.
    """

    features: np.ndarray
    labels: np.ndarray
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labs = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {feats.shape}")
        if labs.ndim != 1 or len(labs) != len(feats):
            raise DatasetError(
                f"labels shape {labs.shape} does not match {len(feats)} records"
            )
        if not np.isfinite(feats).all():
            raise DatasetError("features contain NaN/Inf; clean at ingestion")
        if len(labs) and labs.min() < 0:
            raise DatasetError("labels must be >= 0")
        object.__setattr__(self, "features", _locked(feats))
        object.__setattr__(self, "labels", _locked(labs))

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.features, other.features) and np.array_equal(
            self.labels, other.labels
        )

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    @property
    def attack_classes(self) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unique(self.labels) if c != BENIGN)

    @property
    def class_histogram(self) -> dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def record(self, index: int) -> FlowRecord:
        return FlowRecord(self.features[index], int(self.labels[index]))

    def subset(self, indices: Sequence[int] | np.ndarray, note: str | None = None) -> "Dataset":
        """New dataset holding the given rows, in the given order."""
        idx = np.asarray(indices, dtype=np.intp)
        manifest = dict(self.manifest)
        if note:
            manifest["subset"] = note
        return Dataset(self.features[idx], self.labels[idx], manifest)

    def with_features(self, features: np.ndarray, note: str | None = None) -> "Dataset":
        """Same labels/order, replaced feature matrix (e.g. after scaling)."""
        if features.shape != self.features.shape:
            raise DatasetError(
                f"replacement features shape {features.shape} != {self.features.shape}"
            )
        manifest = dict(self.manifest)
        if note:
            manifest["transforms"] = list(manifest.get("transforms", [])) + [note]
        return Dataset(features, self.labels, manifest)


@dataclass(frozen=True)
class SplitSpec:
    """Fractions for the train/validation/test split plus the shuffle seed."""

    train_fraction: float = 0.8
    val_fraction: float = 0.1
    test_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_fraction, self.val_fraction, self.test_fraction)
        if any(f < 0 or f > 1 for f in fracs):
            raise DatasetError(f"split fractions must lie in [0,1]: {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise DatasetError(f"split fractions must sum to 1: {fracs}")


@dataclass(frozen=True)
class NodeDataset:
    """One node's private training partition: a single attack class plus a
    disjoint share of the benign pool."""

    node_id: int
    attack_class: int
    data: Dataset

    def __post_init__(self):
        bad = set(self.data.attack_classes) - {self.attack_class}
        if bad:
            raise DatasetError(
                f"node {self.node_id} contains foreign attack classes {sorted(bad)}"
            )

    @property
    def sample_count(self) -> int:
        return len(self.data)


def _allocate_counts(n: int, fractions: Sequence[float]) -> list[int]:
    """Integer split of n by largest remainder; every split gets at least one
    sample when n >= number of splits."""
    ideal = [f * n for f in fractions]
    base = [int(np.floor(v)) for v in ideal]
    remainder = n - sum(base)
    order = sorted(range(len(fractions)), key=lambda i: (ideal[i] - base[i]), reverse=True)
    for i in order[:remainder]:
        base[i] += 1
    if n >= len(fractions):
        # guarantee presence in all splits; steal from the largest
        for i, c in enumerate(base):
            while base[i] == 0:
                donor = int(np.argmax(base))
                base[donor] -= 1
                base[i] += 1
    return base


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Stratified train/val/test split, order preserving within each part.

    The rows assigned to each part are chosen per class with the spec's
    seed (so every class with >= 3 samples lands in all three parts), then
    re-sorted so each part keeps the original record order.
    """
    if len(ds) == 0:
        raise DatasetError("cannot split an empty dataset")
    rng = np.random.default_rng(spec.seed)
    parts: list[list[np.ndarray]] = [[], [], []]
    warnings: list[str] = []
    fractions = (spec.train_fraction, spec.val_fraction, spec.test_fraction)
    for label in sorted(ds.class_histogram):
        idx = np.flatnonzero(ds.labels == label)
        if len(idx) < 3:
            warnings.append(
                f"class {label} has {len(idx)} samples; it cannot appear in all splits"
            )
        counts = _allocate_counts(len(idx), fractions)
        shuffled = rng.permutation(idx)
        start = 0
        for part, count in zip(parts, counts):
            part.append(shuffled[start : start + count])
            start += count
    out = []
    for name, chunks in zip(("train", "val", "test"), parts):
        indices = np.sort(np.concatenate(chunks))
        manifest = dict(ds.manifest)
        manifest["split"] = {
            "part": name,
            "fractions": list(fractions),
            "seed": spec.seed,
        }
        if warnings:
            manifest["split"]["warnings"] = list(warnings)
        out.append(Dataset(ds.features[indices], ds.labels[indices], manifest))
    return tuple(out)


def partition_federated(train: Dataset, attack_classes: Iterable[int]) -> list[NodeDataset]:
    """Split a training set into one node per attack class.

    Node k receives every record of its attack class plus a contiguous,
    disjoint 1/K share of the benign records; contiguous blocks keep the
    stream order that temporal averaging depends on. The benign shares are
    exhaustive: each benign training record lands on exactly one node.
    """
    attacks = [int(a) for a in attack_classes]
    if not attacks:
        raise DatasetError("attack class list is empty")
    if len(set(attacks)) != len(attacks):
        raise DatasetError(f"duplicate attack classes in {attacks}")
    present = set(train.attack_classes)
    missing = [a for a in attacks if a not in present]
    if missing:
        raise DatasetError(f"attack classes absent from training data: {missing}")
    benign_idx = np.flatnonzero(train.labels == BENIGN)
    if len(benign_idx) == 0:
        raise DatasetError("training data contains no benign records")

    k = len(attacks)
    share, extra = divmod(len(benign_idx), k)
    nodes = []
    start = 0
    for i, attack in enumerate(attacks):
        size = share + (1 if i < extra else 0)
        block = benign_idx[start : start + size]
        start += size
        indices = np.sort(np.concatenate([block, np.flatnonzero(train.labels == attack)]))
        data = train.subset(indices, note=f"node {i + 1} (attack {attack})")
        nodes.append(NodeDataset(node_id=i + 1, attack_class=attack, data=data))
    return nodes
