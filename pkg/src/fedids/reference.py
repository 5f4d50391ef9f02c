"""Bundled reference results for the full CIC-IDS 2017 setup.

The package ships a transcription of the transferable (train attack, test
attack) pairs previously reported for the five approaches on CIC-IDS 2017,
with each pair's accuracy band per approach. These are reference values for
cross-checking report arithmetic (occurrence counts, overlap totals) and
for side-by-side display when a user runs the real dataset; nothing in the
simulator asserts that a re-run reproduces them, since they depend on
training choices that are not part of this artifact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .evaluation import TransferabilityMatrix

# Representative cell value per accuracy band when rebuilding matrices.
_BIN_VALUES = {">90": 0.95, "80-90": 0.85, "70-80": 0.75}
_ABSENT = 0.5
_LOCALIZED = 0.95


@dataclass(frozen=True)
class ReferencePair:
    train_attack: int
    test_attack: int
    approaches: dict[str, str]  # approach tag -> accuracy band


@dataclass(frozen=True)
class ReferenceResults:
    attack_count: int
    approaches: tuple[str, ...]
    pairs: tuple[ReferencePair, ...]

    def union_pairs(self) -> list[tuple[int, int]]:
        return [(p.train_attack, p.test_attack) for p in self.pairs]

    def pairs_for(self, approach: str) -> list[ReferencePair]:
        return [p for p in self.pairs if approach in p.approaches]

    def to_matrices(self) -> dict[str, TransferabilityMatrix]:
        """Rebuild per-approach matrices with band-representative values so
        the regular classification/overlap code paths can run on them."""
        attacks = tuple(range(1, self.attack_count + 1))
        out = {}
        for tag in self.approaches:
            values = np.full((self.attack_count, self.attack_count), _ABSENT)
            np.fill_diagonal(values, _LOCALIZED)
            for pair in self.pairs_for(tag):
                values[pair.train_attack - 1, pair.test_attack - 1] = _BIN_VALUES[
                    pair.approaches[tag]
                ]
            out[tag] = TransferabilityMatrix(approach=tag, attack_classes=attacks, values=values)
        return out


def load_reference_results() -> ReferenceResults:
    payload = json.loads(
        resources.files("fedids").joinpath("data/reference_pairs.json").read_text("utf-8")
    )
    pairs = tuple(
        ReferencePair(
            train_attack=int(p["train_attack"]),
            test_attack=int(p["test_attack"]),
            approaches=dict(p["approaches"]),
        )
        for p in payload["pairs"]
    )
    return ReferenceResults(
        attack_count=int(payload["attack_count"]),
        approaches=tuple(payload["approaches"]),
        pairs=pairs,
    )
