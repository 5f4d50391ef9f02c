"""CSV ingestion for flow-record files.

A schema file (YAML) maps the label column, the feature columns (order =
feature index), and each label string to its class number; labels can also
be excluded outright, which is how the rarest attack classes are dropped
from a full CIC-IDS 2017 ingest. Cleaning happens here and only here: rows
with NaN/Inf feature cells are dropped (default) or median-imputed, with
counts recorded in the dataset manifest.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import yaml

from .data import Dataset, DatasetError


class SchemaError(ValueError):
    """Raised when a schema file is malformed or disagrees with the CSV."""


@dataclass
class CsvSchema:
    """Column and label mapping for a flow-record CSV."""

    label_column: str
    label_map: dict[str, int]
    feature_columns: list[str] | None = None  # None: all non-label columns, file order
    exclude_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.label_column:
            raise SchemaError("schema needs a label_column")
        if not self.label_map:
            raise SchemaError("schema needs a non-empty label_map")
        for name, value in self.label_map.items():
            if not isinstance(value, int) or value < 0:
                raise SchemaError(f"label_map[{name!r}] must be a non-negative int")


def load_schema(path: str | os.PathLike) -> CsvSchema:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: schema file must contain a mapping")
    try:
        return CsvSchema(
            label_column=raw["label_column"],
            label_map=dict(raw["label_map"]),
            feature_columns=list(raw["feature_columns"]) if raw.get("feature_columns") else None,
            exclude_labels=list(raw.get("exclude_labels", [])),
        )
    except KeyError as exc:
        raise SchemaError(f"{path}: missing schema field {exc}") from None


def save_schema(schema: CsvSchema, path: str | os.PathLike) -> None:
    payload = {
        "label_column": schema.label_column,
        "label_map": dict(schema.label_map),
        "feature_columns": schema.feature_columns,
        "exclude_labels": list(schema.exclude_labels),
    }
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(payload, fh, sort_keys=False)


def load_flow_csv(
    path: str | os.PathLike,
    schema: CsvSchema,
    clean_policy: str = "drop",
) -> Dataset:
    """Read a flow CSV into a Dataset, preserving file order.

    clean_policy is "drop" (discard rows with non-finite feature cells) or
    "impute" (replace each non-finite cell with the column median over the
    finite cells). Unknown label strings are an error; excluded labels are
    removed and counted.
    """
    if clean_policy not in ("drop", "impute"):
        raise ValueError(f"clean_policy must be 'drop' or 'impute', got {clean_policy!r}")
    if not os.path.exists(path):
        raise FileNotFoundError(f"flow CSV not found: {path}")
    frame = pd.read_csv(path, skipinitialspace=True)
    frame.columns = [str(c).strip() for c in frame.columns]

    if schema.label_column not in frame.columns:
        raise SchemaError(f"label column {schema.label_column!r} not in {list(frame.columns)}")
    feature_columns = schema.feature_columns or [
        c for c in frame.columns if c != schema.label_column
    ]
    missing = [c for c in feature_columns if c not in frame.columns]
    if missing:
        raise SchemaError(f"feature columns missing from CSV: {missing}")

    rows_read = len(frame)
    labels_raw = frame[schema.label_column].astype(str).str.strip()
    excluded_mask = labels_raw.isin(set(schema.exclude_labels))
    rows_excluded = int(excluded_mask.sum())
    frame = frame.loc[~excluded_mask]
    labels_raw = labels_raw.loc[~excluded_mask]

    unknown = sorted(set(labels_raw) - set(schema.label_map))
    if unknown:
        raise SchemaError(f"label strings not in schema label_map: {unknown}")
    labels = labels_raw.map(schema.label_map).to_numpy(dtype=np.int64)

    features = np.empty((len(frame), len(feature_columns)), dtype=np.float64)
    for j, col in enumerate(feature_columns):
        features[:, j] = pd.to_numeric(frame[col], errors="coerce").to_numpy(dtype=np.float64)

    finite = np.isfinite(features)
    rows_dropped = 0
    cells_imputed = 0
    if clean_policy == "drop":
        keep = finite.all(axis=1)
        rows_dropped = int((~keep).sum())
        features = features[keep]
        labels = labels[keep]
    else:
        for j in range(features.shape[1]):
            bad = ~finite[:, j]
            if bad.any():
                good = features[~bad, j]
                if len(good) == 0:
                    raise DatasetError(
                        f"column {feature_columns[j]!r} has no finite values to impute from"
                    )
                features[bad, j] = float(np.median(good))
                cells_imputed += int(bad.sum())

    if len(labels) == 0:
        raise DatasetError(f"{path}: no records left after cleaning")

    values, counts = np.unique(labels, return_counts=True)
    manifest = {
        "source": str(path),
        "rows_read": rows_read,
        "rows_excluded_label": rows_excluded,
        "rows_dropped_nonfinite": rows_dropped,
        "cells_imputed": cells_imputed,
        "clean_policy": clean_policy,
        "feature_count": len(feature_columns),
        "feature_columns": list(feature_columns),
        "class_histogram": {int(v): int(c) for v, c in zip(values, counts)},
    }
    return Dataset(features, labels, manifest)


def write_dataset_csv(
    ds: Dataset,
    path: str | os.PathLike,
    label_names: dict[int, str] | None = None,
) -> CsvSchema:
    """Write a dataset as a flow CSV plus return the matching schema.

    Used by the synthetic generator so its output round-trips through
    load_flow_csv. Feature columns are named f0..f{F-1}.
    """
    names = label_names or {
        int(lbl): ("BENIGN" if lbl == 0 else f"ATTACK{int(lbl)}")
        for lbl in np.unique(ds.labels)
    }
    feature_columns = [f"f{j}" for j in range(ds.feature_count)]
    frame = pd.DataFrame(ds.features, columns=feature_columns)
    frame["Label"] = [names[int(lbl)] for lbl in ds.labels]
    frame.to_csv(path, index=False)
    return CsvSchema(
        label_column="Label",
        label_map={name: int(lbl) for lbl, name in names.items()},
        feature_columns=feature_columns,
    )


def write_manifest(ds: Dataset, path: str | os.PathLike) -> None:
    payload = dict(ds.manifest)
    payload["records"] = len(ds)
    payload["class_histogram"] = {str(k): v for k, v in ds.class_histogram.items()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
