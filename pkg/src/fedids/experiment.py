"""Experiment orchestration: config parsing/validation, the five approach
runners (centralized, federated, federated+bootstrap, federated+averaging,
and the combined tabfids pipeline), and artifact emission.

Every run is reproducible bit-for-bit from its config snapshot and master
seed: all child seeds are derived per (approach, node/attack, round), so
approaches share nothing but the immutable dataset splits.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, replace

import numpy as np
import yaml

from .cicids import cicids2017_schema
from .data import BENIGN, Dataset, NodeDataset, SplitSpec, partition_federated, split
from .evaluation import (
    OverlapReport,
    TransferabilityMatrix,
    TransferabilityPair,
    bin_counts,
    build_matrix,
    classify_pairs,
    compare_approaches,
    occurrence_counts,
    write_matrix_csv,
    write_overlap_json,
    write_pairs_json,
)
from .federation import FederationConfig, NodeState, fine_tune_locally, run_federation
from .io import load_flow_csv, load_schema, write_manifest
from .checkpoint import save_checkpoint
from .network import ConvSpec, ModelArch, ModelParams, TrainConfig, init_model, train_epochs
from .preprocess import PipelineConfig, PreprocessingPipeline, build_pipeline
from .reference import load_reference_results
from .seeding import derive_seed
from .synthetic import load_synthetic_spec, synthetic_spec_from_dict, generate_synthetic

APPROACHES = ("central", "fed", "fed_bootstrap", "fed_tempav", "tabfids")

# approach tag -> (use_bootstrap, use_temporal_avg)
_APPROACH_STAGES = {
    "central": (False, False),
    "fed": (False, False),
    "fed_bootstrap": (True, False),
    "fed_tempav": (False, True),
    "tabfids": (True, True),
}


class ConfigError(ValueError):
    """Aggregated, human-readable config validation failures."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {e}" for e in errors))
        self.errors = errors


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description (every default made explicit)."""

    seed: int
    output_dir: str
    approaches: tuple[str, ...]
    dataset: dict
    split_spec: SplitSpec
    arch_dict: dict
    training: dict
    rounds: int
    preprocess: dict
    pipeline_overrides: dict
    threshold: float
    evaluate_global_model: bool
    save_round_checkpoints: bool

    def snapshot(self) -> dict:
        return {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "approaches": list(self.approaches),
            "dataset": self.dataset,
            "split": {
                "train_fraction": self.split_spec.train_fraction,
                "val_fraction": self.split_spec.val_fraction,
                "test_fraction": self.split_spec.test_fraction,
                "seed": self.split_spec.seed,
            },
            "model": self.arch_dict,
            "training": self.training,
            "federation": {"rounds": self.rounds},
            "preprocess": self.preprocess,
            "pipelines": self.pipeline_overrides,
            "evaluation": {
                "threshold": self.threshold,
                "evaluate_global_model": self.evaluate_global_model,
            },
            "save_round_checkpoints": self.save_round_checkpoints,
        }

    def arch(self, input_length: int) -> ModelArch:
        m = self.arch_dict
        return ModelArch(
            input_length=input_length,
            conv_layers=tuple(
                ConvSpec(c, m["kernel_size"], m["stride"]) for c in m["conv_channels"]
            ),
            dropout_rate=m["dropout_rate"],
            hidden_units=m["hidden_units"],
        )

    def train_config(self, seed: int = 0) -> TrainConfig:
        t = self.training
        return TrainConfig(
            learning_rate=t["learning_rate"],
            batch_size=t["batch_size"],
            local_epochs=t["local_epochs"],
            dropout_active=t["dropout_active"],
            seed=seed,
        )

    @property
    def central_epochs(self) -> int:
        return self.training["central_epochs"]

    def pipeline_config(self, approach: str, seed: int) -> PipelineConfig:
        bootstrap, tempav = _APPROACH_STAGES[approach]
        base = {
            "use_bootstrap": bootstrap,
            "use_temporal_avg": tempav,
            "window": self.preprocess["window"],
            "bootstrap_target": self.preprocess["bootstrap_target"],
            "per_class_averaging": self.preprocess["per_class_averaging"],
            "normalizer_mode": self.preprocess["normalizer"],
            "clamp": self.preprocess["clamp"],
        }
        base.update(self.pipeline_overrides.get(approach, {}))
        return PipelineConfig(seed=seed, **base)


def _check(raw: dict, path: str, key: str, kind, default, errors: list[str], pred=None, msg=""):
    value = raw.get(key, default)
    if value is None and default is None and pred is None:
        return None
    label = f"{path}.{key}" if path else key
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        errors.append(f"{label}: expected {getattr(kind, '__name__', kind)}, got {value!r}")
        return default
    if pred is not None and not pred(value):
        errors.append(f"{label}: {msg} (got {value!r})")
        return default
    return value


def config_from_dict(raw: dict, base_dir: str = ".") -> ExperimentConfig:
    """Validate a raw config mapping; raises ConfigError aggregating every
    problem found, with field paths."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["config file must contain a mapping"])

    seed = _check(raw, "", "seed", int, 0, errors, lambda v: v >= 0, "must be >= 0")
    output_dir = _check(raw, "", "output_dir", str, "runs/out", errors)

    approaches = raw.get("approaches", list(APPROACHES))
    if not isinstance(approaches, list) or not approaches:
        errors.append("approaches: expected a non-empty list")
        approaches = list(APPROACHES)
    bad = [a for a in approaches if a not in APPROACHES]
    if bad:
        errors.append(f"approaches: unknown tags {bad}; valid tags are {list(APPROACHES)}")
        approaches = [a for a in approaches if a in APPROACHES] or list(APPROACHES)

    dataset = raw.get("dataset")
    if not isinstance(dataset, dict) or ("synthetic" not in dataset) == ("csv" not in dataset):
        errors.append("dataset: provide exactly one of dataset.synthetic or dataset.csv")
        dataset = {"synthetic": {"feature_count": 1, "classes": []}}
    elif "csv" in dataset:
        csv = dataset["csv"]
        if not isinstance(csv, dict):
            errors.append("dataset.csv: expected a mapping")
        else:
            paths = csv.get("paths")
            if not isinstance(paths, list) or not paths:
                errors.append("dataset.csv.paths: expected a non-empty list of files")
            else:
                for p in paths:
                    full = os.path.join(base_dir, p)
                    if not os.path.exists(full):
                        errors.append(f"dataset.csv.paths: file not found: {p}")
            schema = csv.get("schema")
            if schema is None:
                errors.append("dataset.csv.schema: missing (a schema file or 'cicids2017')")
            elif schema != "cicids2017" and not os.path.exists(os.path.join(base_dir, schema)):
                errors.append(f"dataset.csv.schema: schema file not found: {schema}")
            policy = csv.get("clean_policy", "drop")
            if policy not in ("drop", "impute"):
                errors.append(f"dataset.csv.clean_policy: must be drop|impute, got {policy!r}")
            csv["clean_policy"] = policy
    else:
        synth = dataset["synthetic"]
        if isinstance(synth, str):
            if not os.path.exists(os.path.join(base_dir, synth)):
                errors.append(f"dataset.synthetic: spec file not found: {synth}")
        elif isinstance(synth, dict):
            try:
                synthetic_spec_from_dict(synth, source="dataset.synthetic")
            except Exception as exc:
                errors.append(str(exc))
        else:
            errors.append("dataset.synthetic: expected a spec file path or inline mapping")

    sp = raw.get("split", {}) or {}
    train_f = _check(sp, "split", "train_fraction", float, 0.8, errors)
    val_f = _check(sp, "split", "val_fraction", float, 0.1, errors)
    test_f = _check(sp, "split", "test_fraction", float, 0.1, errors)
    split_seed = _check(sp, "split", "seed", int, derive_seed(seed or 0, "split"), errors)
    try:
        split_spec = SplitSpec(train_f, val_f, test_f, split_seed)
    except Exception as exc:
        errors.append(f"split: {exc}")
        split_spec = SplitSpec(seed=split_seed)

    m = raw.get("model", {}) or {}
    channels = m.get("conv_channels", [32, 64, 64, 128])
    if not isinstance(channels, list) or not all(isinstance(c, int) and c > 0 for c in channels):
        errors.append(f"model.conv_channels: expected a list of positive ints, got {channels!r}")
        channels = [32, 64, 64, 128]
    arch_dict = {
        "conv_channels": channels,
        "kernel_size": _check(m, "model", "kernel_size", int, 3, errors, lambda v: v >= 1, "must be >= 1"),
        "stride": _check(m, "model", "stride", int, 1, errors, lambda v: v >= 1, "must be >= 1"),
        "dropout_rate": _check(
            m, "model", "dropout_rate", float, 0.5, errors, lambda v: 0 <= v < 1, "must be in [0,1)"
        ),
        "hidden_units": _check(m, "model", "hidden_units", int, 128, errors, lambda v: v >= 1, "must be >= 1"),
    }

    t = raw.get("training", {}) or {}
    rounds = _check(
        raw.get("federation", {}) or {}, "federation", "rounds", int, 20, errors,
        lambda v: v >= 1, "must be >= 1",
    )
    local_epochs = _check(
        t, "training", "local_epochs", int, 1, errors, lambda v: v >= 0, "must be >= 0"
    )
    training = {
        "learning_rate": _check(
            t, "training", "learning_rate", float, 1e-3, errors, lambda v: v > 0, "must be > 0"
        ),
        "batch_size": _check(
            t, "training", "batch_size", int, 32, errors, lambda v: v >= 1, "must be >= 1"
        ),
        "local_epochs": local_epochs,
        "dropout_active": _check(t, "training", "dropout_active", bool, True, errors),
        "central_epochs": _check(
            t, "training", "central_epochs", int, rounds * max(local_epochs, 1), errors,
            lambda v: v >= 0, "must be >= 0",
        ),
    }

    p = raw.get("preprocess", {}) or {}
    preprocess = {
        "window": _check(p, "preprocess", "window", int, 3, errors, lambda v: v >= 1, "must be >= 1"),
        "bootstrap_target": _check(
            p, "preprocess", "bootstrap_target", float, 0.5, errors,
            lambda v: 0 < v < 1, "must be in (0,1)",
        ),
        "per_class_averaging": _check(p, "preprocess", "per_class_averaging", bool, True, errors),
        "normalizer": _check(
            p, "preprocess", "normalizer", str, "minmax", errors,
            lambda v: v in ("minmax", "zscore"), "must be minmax|zscore",
        ),
        "clamp": _check(p, "preprocess", "clamp", bool, False, errors),
    }

    overrides = raw.get("pipelines", {}) or {}
    if not isinstance(overrides, dict):
        errors.append("pipelines: expected a mapping of approach tag -> overrides")
        overrides = {}
    for tag in overrides:
        if tag not in APPROACHES:
            errors.append(f"pipelines.{tag}: unknown approach tag")

    e = raw.get("evaluation", {}) or {}
    threshold = _check(
        e, "evaluation", "threshold", float, 0.7, errors,
        lambda v: 0.7 <= v < 1, "must be in [0.7,1)",
    )
    evaluate_global = _check(e, "evaluation", "evaluate_global_model", bool, False, errors)
    save_ckpts = _check(raw, "", "save_round_checkpoints", bool, False, errors)

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        seed=seed,
        output_dir=output_dir,
        approaches=tuple(approaches),
        dataset=dataset,
        split_spec=split_spec,
        arch_dict=arch_dict,
        training=training,
        rounds=rounds,
        preprocess=preprocess,
        pipeline_overrides=overrides,
        threshold=threshold,
        evaluate_global_model=evaluate_global,
        save_round_checkpoints=save_ckpts,
    )


def validate_config(path: str | os.PathLike) -> ExperimentConfig:
    """Parse + validate a config file; raises ConfigError listing every
    problem (with field paths) rather than stopping at the first."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return config_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))


def load_dataset(cfg: ExperimentConfig, base_dir: str = ".") -> Dataset:
    if "synthetic" in cfg.dataset:
        synth = cfg.dataset["synthetic"]
        if isinstance(synth, str):
            spec = load_synthetic_spec(os.path.join(base_dir, synth))
        else:
            spec = synthetic_spec_from_dict(synth)
        return generate_synthetic(spec, seed=derive_seed(cfg.seed, "synthetic"))
    csv = cfg.dataset["csv"]
    schema = (
        cicids2017_schema()
        if csv["schema"] == "cicids2017"
        else load_schema(os.path.join(base_dir, csv["schema"]))
    )
    parts = [
        load_flow_csv(os.path.join(base_dir, p), schema, csv.get("clean_policy", "drop"))
        for p in csv["paths"]
    ]
    if len(parts) == 1:
        return parts[0]
    feature_counts = {ds.feature_count for ds in parts}
    if len(feature_counts) != 1:
        raise ConfigError([f"dataset.csv.paths: feature counts differ: {feature_counts}"])
    manifest = {"sources": [ds.manifest.get("source") for ds in parts]}
    return Dataset(
        np.concatenate([ds.features for ds in parts]),
        np.concatenate([ds.labels for ds in parts]),
        manifest,
    )


# ---------------------------------------------------------------------------
# Approach runners
# ---------------------------------------------------------------------------

def _single_attack_subset(ds: Dataset, attack: int) -> Dataset:
    idx = np.flatnonzero((ds.labels == BENIGN) | (ds.labels == attack))
    return ds.subset(idx, note=f"benign + attack {attack}")


def run_centralized(
    cfg: ExperimentConfig,
    train: Dataset,
    attacks: list[int],
    approach: str = "central",
) -> tuple[dict[int, ModelParams], dict[int, PreprocessingPipeline]]:
    """One model per attack class, trained on all benign training data plus
    that class only; no federation. Preprocessing follows the approach's
    pipeline; bootstrapping/averaging apply only if configured for ablation.
    """
    arch = cfg.arch(train.feature_count)
    models: dict[int, ModelParams] = {}
    pipelines: dict[int, PreprocessingPipeline] = {}
    for attack in attacks:
        subset = _single_attack_subset(train, attack)
        pipeline = build_pipeline(
            cfg.pipeline_config(approach, seed=derive_seed(cfg.seed, approach, "pipeline", attack))
        ).fit(subset)
        prepared = pipeline.transform_train(subset)
        params = init_model(arch, seed=derive_seed(cfg.seed, approach, "init", attack))
        train_cfg = replace(
            cfg.train_config(seed=derive_seed(cfg.seed, approach, "train", attack)),
            local_epochs=cfg.central_epochs,
        )
        labels = (prepared.labels != BENIGN).astype(np.int64)
        models[attack] = train_epochs(params, prepared.features, labels, train_cfg)
        pipelines[attack] = pipeline
    return models, pipelines


def run_federated(
    cfg: ExperimentConfig,
    train: Dataset,
    attacks: list[int],
    approach: str,
    checkpoint_dir: str | None = None,
) -> tuple[dict[int, ModelParams], dict[int, PreprocessingPipeline], list, ModelParams]:
    """Partition the training set into one node per attack class, preprocess
    per node, run the communication rounds, then fine-tune each node's model
    from the final global weights. Returns per-attack models (the fine-tuned
    local ones unless evaluate_global_model is set), per-attack pipelines,
    the round logs, and the final global parameters."""
    arch = cfg.arch(train.feature_count)
    raw_nodes = partition_federated(train, attacks)
    nodes: list[NodeState] = []
    pipelines: dict[int, PreprocessingPipeline] = {}
    for node in raw_nodes:
        pipeline = build_pipeline(
            cfg.pipeline_config(
                approach, seed=derive_seed(cfg.seed, approach, "pipeline", node.node_id)
            )
        ).fit(node.data)
        prepared = pipeline.transform_train(node.data)
        pipelines[node.attack_class] = pipeline
        nodes.append(
            NodeState(
                node_id=node.node_id,
                dataset=NodeDataset(node.node_id, node.attack_class, prepared),
            )
        )
    fed_cfg = FederationConfig(
        arch=arch,
        rounds=cfg.rounds,
        train=cfg.train_config(),
        seed=derive_seed(cfg.seed, approach, "federation"),
    )
    global_params, logs = run_federation(nodes, fed_cfg, checkpoint_dir=checkpoint_dir)
    tuned = fine_tune_locally(nodes, global_params, fed_cfg)
    attack_by_node = {n.node_id: n.dataset.attack_class for n in nodes}
    if cfg.evaluate_global_model:
        models = {attack_by_node[nid]: global_params for nid in tuned}
    else:
        models = {attack_by_node[nid]: params for nid, params in tuned.items()}
    return models, pipelines, logs, global_params


@dataclass
class ApproachReport:
    matrix: TransferabilityMatrix
    pairs: list[TransferabilityPair]
    bin_counts: dict[str, int]
    localized: dict[int, float]
    seconds: float


@dataclass
class RunReport:
    config_snapshot: dict
    approaches: dict[str, ApproachReport]
    occurrence: dict
    overlap: OverlapReport
    reference_comparison: dict | None = None

    def summary_lines(self) -> list[str]:
        lines = ["approach        total   >90  80-90  70-80   localized(mean)"]
        for tag, rep in self.approaches.items():
            b = rep.bin_counts
            loc = float(np.mean(list(rep.localized.values())))
            lines.append(
                f"{tag:<14}{len(rep.pairs):>7}{b['>90']:>6}{b['80-90']:>7}{b['70-80']:>7}   {loc:.4f}"
            )
        lines.append(
            f"union: {self.overlap.total_pairs} pairs, "
            f"{self.overlap.single_approach_pairs} single-approach, "
            f"{self.overlap.all_approach_pairs} in all approaches"
        )
        return lines


def _test_sets_by_attack(test: Dataset, attacks: list[int]) -> dict[int, Dataset]:
    return {attack: _single_attack_subset(test, attack) for attack in attacks}


def run_all(cfg: ExperimentConfig, base_dir: str = ".", out_dir: str | None = None) -> RunReport:
    """Execute every configured approach, build matrices/pairs/overlap, and
    write all artifacts under the output directory."""
    out = out_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    snapshot = cfg.snapshot()
    with open(os.path.join(out, "config_snapshot.yaml"), "w", encoding="utf-8") as fh:
        yaml.safe_dump(snapshot, fh, sort_keys=True)

    ds = load_dataset(cfg, base_dir=base_dir)
    write_manifest(ds, os.path.join(out, "dataset_manifest.json"))
    train, val, test = split(ds, cfg.split_spec)
    attacks = sorted(train.attack_classes)
    test_sets = _test_sets_by_attack(test, attacks)

    reports: dict[str, ApproachReport] = {}
    for tag in cfg.approaches:
        started = time.perf_counter()
        approach_dir = os.path.join(out, tag)
        os.makedirs(approach_dir, exist_ok=True)
        ckpt_dir = None
        if cfg.save_round_checkpoints and tag != "central":
            ckpt_dir = os.path.join(approach_dir, "checkpoints")
            os.makedirs(ckpt_dir, exist_ok=True)
        if tag == "central":
            models, pipelines = run_centralized(cfg, train, attacks, approach=tag)
            logs, global_params = [], None
        else:
            models, pipelines, logs, global_params = run_federated(
                cfg, train, attacks, approach=tag, checkpoint_dir=ckpt_dir
            )
        matrix = build_matrix(models, test_sets, pipelines, approach=tag)
        pairs = classify_pairs(matrix, threshold=cfg.threshold)
        write_matrix_csv(matrix, os.path.join(approach_dir, "matrix.csv"))
        write_pairs_json(pairs, tag, os.path.join(approach_dir, "pairs.json"))
        for attack, params in models.items():
            save_checkpoint(
                os.path.join(approach_dir, f"model_attack_{attack}.ckpt"), params, seed=cfg.seed
            )
        if global_params is not None:
            save_checkpoint(
                os.path.join(approach_dir, "final_global.ckpt"),
                global_params,
                round_index=cfg.rounds,
                seed=cfg.seed,
            )
        if logs:
            with open(os.path.join(approach_dir, "rounds.json"), "w", encoding="utf-8") as fh:
                json.dump(
                    [
                        {
                            "round": log.round_index,
                            "node_losses": {str(k): v for k, v in log.node_losses.items()},
                        }
                        for log in logs
                    ],
                    fh,
                    indent=2,
                    sort_keys=True,
                )
                fh.write("\n")
        reports[tag] = ApproachReport(
            matrix=matrix,
            pairs=pairs,
            bin_counts=bin_counts(pairs),
            localized=matrix.localized,
            seconds=time.perf_counter() - started,
        )

    overlap = compare_approaches(
        {tag: rep.matrix for tag, rep in reports.items()}, threshold=cfg.threshold
    )
    union_pairs = list(overlap.pair_approaches)
    occurrence = occurrence_counts(union_pairs, attack_classes=tuple(attacks))
    report = RunReport(
        config_snapshot=snapshot,
        approaches=reports,
        occurrence={
            str(a): {"as_train": c.as_train, "as_test": c.as_test}
            for a, c in occurrence.items()
        },
        overlap=overlap,
        reference_comparison=_reference_comparison(reports, attacks),
    )
    write_overlap_json(overlap, os.path.join(out, "overlap.json"))
    with open(os.path.join(out, "occurrence.json"), "w", encoding="utf-8") as fh:
        json.dump(report.occurrence, fh, indent=2, sort_keys=True)
        fh.write("\n")
    summary = {
        "approaches": {
            tag: {
                "pairs": len(rep.pairs),
                "bins": rep.bin_counts,
                "localized": {str(k): v for k, v in rep.localized.items()},
                "seconds": rep.seconds,
            }
            for tag, rep in reports.items()
        },
        "overlap": {
            "total_pairs": overlap.total_pairs,
            "single_approach_pairs": overlap.single_approach_pairs,
            "all_approach_pairs": overlap.all_approach_pairs,
        },
        "occurrence": report.occurrence,
        "reference_comparison": report.reference_comparison,
    }
    with open(os.path.join(out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(report.summary_lines()) + "\n")
    return report


def _reference_comparison(reports: dict[str, ApproachReport], attacks: list[int]) -> dict | None:
    """Side-by-side pair counts against the bundled CIC-IDS 2017 reference
    results; shown only when the run uses the matching 11-attack numbering,
    and never asserted."""
    reference = load_reference_results()
    if sorted(attacks) != list(range(1, reference.attack_count + 1)):
        return None
    out = {}
    for tag, rep in reports.items():
        if tag in reference.approaches:
            out[tag] = {
                "run_pairs": len(rep.pairs),
                "reference_pairs": len(reference.pairs_for(tag)),
            }
    return out or None


def rerender_reports(out_dir: str, threshold: float = 0.7) -> RunReport:
    """Rebuild pairs/overlap/occurrence/summary from the matrices already on
    disk (the `report` CLI subcommand)."""
    from .evaluation import read_matrix_csv

    snapshot_path = os.path.join(out_dir, "config_snapshot.yaml")
    snapshot = {}
    if os.path.exists(snapshot_path):
        with open(snapshot_path, "r", encoding="utf-8") as fh:
            snapshot = yaml.safe_load(fh) or {}
        threshold = snapshot.get("evaluation", {}).get("threshold", threshold)
    reports: dict[str, ApproachReport] = {}
    for tag in APPROACHES:
        path = os.path.join(out_dir, tag, "matrix.csv")
        if not os.path.exists(path):
            continue
        matrix = read_matrix_csv(path, approach=tag)
        pairs = classify_pairs(matrix, threshold=threshold)
        write_pairs_json(pairs, tag, os.path.join(out_dir, tag, "pairs.json"))
        reports[tag] = ApproachReport(
            matrix=matrix,
            pairs=pairs,
            bin_counts=bin_counts(pairs),
            localized=matrix.localized,
            seconds=0.0,
        )
    if not reports:
        raise FileNotFoundError(f"no approach matrices found under {out_dir}")
    overlap = compare_approaches({t: r.matrix for t, r in reports.items()}, threshold=threshold)
    occurrence = occurrence_counts(
        list(overlap.pair_approaches),
        attack_classes=next(iter(reports.values())).matrix.attack_classes,
    )
    report = RunReport(
        config_snapshot=snapshot,
        approaches=reports,
        occurrence={
            str(a): {"as_train": c.as_train, "as_test": c.as_test}
            for a, c in occurrence.items()
        },
        overlap=overlap,
    )
    write_overlap_json(overlap, os.path.join(out_dir, "overlap.json"))
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(report.summary_lines()) + "\n")
    return report
