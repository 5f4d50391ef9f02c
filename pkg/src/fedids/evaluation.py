"""Detection metrics and transferability analysis.

The headline metric is the balanced attack accuracy
(tn/(tn+fp) + tp/(tp+fn)) / 2: the mean of specificity and recall, which
gives benign and attack detection equal weight no matter how imbalanced
the test set is. A constant predictor scores exactly 0.5 on it while its
plain accuracy can be arbitrarily high.

A transferability matrix holds that metric for every (train attack, test
attack) cell of one approach; off-diagonal cells strictly above the 70%
threshold form the approach's transferable pairs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .data import Dataset
from .network import ModelParams, predict
from .preprocess import PreprocessingPipeline

TRANSFER_THRESHOLD = 0.7

BIN_LABELS = (">90", "80-90", "70-80")


class MetricUndefinedError(ValueError):
    """A metric's denominator is empty (a class is absent); raised instead
    of silently reporting 0, which would fabricate non-transferability."""


class EvaluationError(ValueError):
    """Raised for inconsistent evaluation inputs."""


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary detection tallies; positive = attack."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise EvaluationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(preds, truth) -> ConfusionCounts:
    """Tally binary detection outcomes; any attack class counts as positive."""
    preds = np.asarray(preds)
    truth = np.asarray(truth)
    if preds.shape != truth.shape or preds.ndim != 1:
        raise EvaluationError(f"prediction/truth shape mismatch: {preds.shape} vs {truth.shape}")
    if len(preds) == 0:
        raise EvaluationError("empty prediction list")
    p = preds != 0
    t = truth != 0
    return ConfusionCounts(
        tp=int(np.sum(p & t)),
        tn=int(np.sum(~p & ~t)),
        fp=int(np.sum(p & ~t)),
        fn=int(np.sum(~p & t)),
    )


def plain_accuracy(c: ConfusionCounts) -> float:
    return (c.tp + c.tn) / c.total


def attack_accuracy(c: ConfusionCounts) -> float:
    """Mean of specificity and recall; needs both classes in the test set."""
    if c.tn + c.fp == 0:
        raise MetricUndefinedError("no benign samples: specificity undefined")
    if c.tp + c.fn == 0:
        raise MetricUndefinedError("no attack samples: recall undefined")
    return (c.tn / (c.tn + c.fp) + c.tp / (c.tp + c.fn)) / 2.0


def precision_recall(c: ConfusionCounts) -> tuple[float | None, float | None]:
    """Textbook precision and recall; an empty denominator yields None
    rather than a fabricated zero."""
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else None
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else None
    return precision, recall


@dataclass(frozen=True, eq=False)
class TransferabilityMatrix:
    """Attack-accuracy grid for one approach: rows are the attack class a
    model was trained on, columns the attack class it is tested against.
    The diagonal is localized testing and is excluded from pair analysis."""

    approach: str
    attack_classes: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        a = len(self.attack_classes)
        if values.shape != (a, a):
            raise EvaluationError(f"matrix shape {values.shape} != ({a},{a})")
        finite = values[np.isfinite(values)]
        if finite.size and (finite.min() < 0 or finite.max() > 1):
            raise EvaluationError("matrix values must lie in [0,1] (NaN marks missing)")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def cell(self, train_attack: int, test_attack: int) -> float:
        i = self.attack_classes.index(train_attack)
        j = self.attack_classes.index(test_attack)
        return float(self.values[i, j])

    @property
    def localized(self) -> dict[int, float]:
        """Diagonal cells: accuracy on the attack class each model saw."""
        return {a: float(self.values[i, i]) for i, a in enumerate(self.attack_classes)}


@dataclass(frozen=True)
class TransferabilityPair:
    train_attack: int
    test_attack: int
    attack_accuracy: float
    bin: str

    def __post_init__(self):
        if self.train_attack == self.test_attack:
            raise EvaluationError("a transferability pair needs distinct attacks")
        if not self.attack_accuracy > TRANSFER_THRESHOLD:
            raise EvaluationError(
                f"pair accuracy {self.attack_accuracy} not above {TRANSFER_THRESHOLD}"
            )
        if self.bin != accuracy_bin(self.attack_accuracy):
            raise EvaluationError(f"bin {self.bin!r} inconsistent with {self.attack_accuracy}")


def accuracy_bin(value: float) -> str:
    """Half-open, upper-inclusive bands partitioning (0.7, 1.0]."""
    if value > 0.9:
        return ">90"
    if value > 0.8:
        return "80-90"
    if value > 0.7:
        return "70-80"
    raise EvaluationError(f"{value} is below the transferability threshold")


def build_matrix(
    models: Mapping[int, ModelParams],
    test_sets: Mapping[int, Dataset],
    pipelines: Mapping[int, PreprocessingPipeline] | PreprocessingPipeline | None = None,
    approach: str = "unnamed",
) -> TransferabilityMatrix:
    """Evaluate every model against every single-attack test set.

    Each test set must hold benign records plus exactly one attack class.
    pipelines supplies inference-side preprocessing (normalize + averaging)
    per training attack, consistent with how that model was trained; pass
    one pipeline to share it, or None for pre-transformed test sets.
    """
    attacks = sorted(models)
    if sorted(test_sets) != attacks:
        raise EvaluationError(
            f"model attacks {attacks} != test-set attacks {sorted(test_sets)}"
        )
    for a, ds in test_sets.items():
        extra = set(ds.attack_classes) - {a}
        if extra:
            raise EvaluationError(f"test set {a} contains foreign attacks {sorted(extra)}")
    values = np.empty((len(attacks), len(attacks)))
    for i, train_attack in enumerate(attacks):
        params = models[train_attack]
        if isinstance(pipelines, Mapping):
            pipeline = pipelines[train_attack]
        else:
            pipeline = pipelines
        for j, test_attack in enumerate(attacks):
            ds = test_sets[test_attack]
            if pipeline is not None:
                ds = pipeline.transform_eval(ds)
            preds = predict(params, ds.features)
            counts = confusion(preds, ds.labels)
            values[i, j] = attack_accuracy(counts)
    return TransferabilityMatrix(
        approach=approach, attack_classes=tuple(attacks), values=values
    )


def classify_pairs(
    matrix: TransferabilityMatrix, threshold: float = TRANSFER_THRESHOLD
) -> list[TransferabilityPair]:
    """Off-diagonal cells strictly above threshold, binned ( (0.9,1.0] ->
    ">90", (0.8,0.9] -> "80-90", (0.7,0.8] -> "70-80" ).

    Thresholds below 0.7 are rejected: a transferability pair is defined by
    accuracy above 70%, and the bins partition (0.7, 1.0]."""
    if threshold < TRANSFER_THRESHOLD:
        raise EvaluationError(f"threshold must be >= {TRANSFER_THRESHOLD}, got {threshold}")
    pairs = []
    for i, train_attack in enumerate(matrix.attack_classes):
        for j, test_attack in enumerate(matrix.attack_classes):
            if i == j:
                continue
            value = float(matrix.values[i, j])
            if np.isnan(value):
                raise EvaluationError(
                    f"matrix {matrix.approach}: missing off-diagonal cell "
                    f"({train_attack},{test_attack})"
                )
            if value > threshold:
                pairs.append(
                    TransferabilityPair(train_attack, test_attack, value, accuracy_bin(value))
                )
    return pairs


def bin_counts(pairs: list[TransferabilityPair]) -> dict[str, int]:
    counts = {label: 0 for label in BIN_LABELS}
    for pair in pairs:
        counts[pair.bin] += 1
    return counts


@dataclass(frozen=True)
class OccurrenceCount:
    as_train: int
    as_test: int


def occurrence_counts(
    pairs,
    attack_classes: tuple[int, ...] | None = None,
) -> dict[int, OccurrenceCount]:
    """How often each attack appears as the train or the test member across
    (train, test) pairs. Accepts TransferabilityPair objects or raw tuples."""
    normalized = [
        (p.train_attack, p.test_attack) if isinstance(p, TransferabilityPair) else (p[0], p[1])
        for p in pairs
    ]
    attacks = set(attack_classes or ())
    for train_attack, test_attack in normalized:
        attacks.update((train_attack, test_attack))
    out = {}
    for attack in sorted(attacks):
        out[attack] = OccurrenceCount(
            as_train=sum(1 for t, _ in normalized if t == attack),
            as_test=sum(1 for _, s in normalized if s == attack),
        )
    return out


@dataclass(frozen=True)
class OverlapReport:
    """Which approaches uncover each transferable (train, test) pair."""

    approaches: tuple[str, ...]
    pair_approaches: dict[tuple[int, int], tuple[str, ...]]

    @property
    def total_pairs(self) -> int:
        return len(self.pair_approaches)

    @property
    def single_approach_pairs(self) -> int:
        return sum(1 for tags in self.pair_approaches.values() if len(tags) == 1)

    @property
    def all_approach_pairs(self) -> int:
        count_all = len(self.approaches)
        return sum(1 for tags in self.pair_approaches.values() if len(tags) == count_all)


def overlap_from_pairs(pairs_by_approach: Mapping[str, list]) -> OverlapReport:
    pair_map: dict[tuple[int, int], list[str]] = {}
    for tag in sorted(pairs_by_approach):
        for pair in pairs_by_approach[tag]:
            key = (pair.train_attack, pair.test_attack)
            pair_map.setdefault(key, []).append(tag)
    return OverlapReport(
        approaches=tuple(sorted(pairs_by_approach)),
        pair_approaches={k: tuple(v) for k, v in sorted(pair_map.items())},
    )


def compare_approaches(
    matrices: Mapping[str, TransferabilityMatrix],
    threshold: float = TRANSFER_THRESHOLD,
) -> OverlapReport:
    """Per-pair sets of approaches that achieve transferability, plus the
    derived unique/common counts."""
    if not matrices:
        raise EvaluationError("compare_approaches needs at least one matrix")
    attack_sets = {m.attack_classes for m in matrices.values()}
    if len(attack_sets) != 1:
        raise EvaluationError(f"matrices disagree on attack classes: {attack_sets}")
    return overlap_from_pairs(
        {tag: classify_pairs(matrix, threshold) for tag, matrix in matrices.items()}
    )


# ---------------------------------------------------------------------------
# Artifact writers (and the reader used by report re-rendering)
# ---------------------------------------------------------------------------

def write_matrix_csv(matrix: TransferabilityMatrix, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = ",".join(["train\\test"] + [str(a) for a in matrix.attack_classes])
        fh.write(header + "\n")
        for i, attack in enumerate(matrix.attack_classes):
            row = ",".join([str(attack)] + [repr(float(v)) for v in matrix.values[i]])
            fh.write(row + "\n")


def read_matrix_csv(path: str | os.PathLike, approach: str) -> TransferabilityMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    attacks = tuple(int(a) for a in lines[0].split(",")[1:])
    values = np.array(
        [[float(v) for v in line.split(",")[1:]] for line in lines[1:]], dtype=np.float64
    )
    return TransferabilityMatrix(approach=approach, attack_classes=attacks, values=values)


def write_pairs_json(
    pairs: list[TransferabilityPair], approach: str, path: str | os.PathLike
) -> None:
    payload = [
        {
            "approach": approach,
            "train_attack": p.train_attack,
            "test_attack": p.test_attack,
            "attack_accuracy": p.attack_accuracy,
            "bin": p.bin,
        }
        for p in pairs
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_overlap_json(report: OverlapReport, path: str | os.PathLike) -> None:
    payload = {
        "approaches": list(report.approaches),
        "total_pairs": report.total_pairs,
        "single_approach_pairs": report.single_approach_pairs,
        "all_approach_pairs": report.all_approach_pairs,
        "pairs": [
            {"train_attack": t, "test_attack": s, "approaches": list(tags)}
            for (t, s), tags in report.pair_approaches.items()
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
