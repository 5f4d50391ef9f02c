import numpy as np
import pytest

from fedids import CsvSchema, Dataset, SchemaError, load_flow_csv, write_dataset_csv
from fedids.cicids import cicids2017_schema
from fedids.io import load_schema, save_schema


@pytest.fixture
def schema():
    return CsvSchema(
        label_column="Label",
        label_map={"BENIGN": 0, "Hulk": 1, "Scan": 2},
        feature_columns=["a", "b"],
    )


def write_csv(path, rows, header="a,b,Label"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


class TestLoadFlowCsv:
    def test_basic_mapping(self, tmp_path, schema):
        path = write_csv(tmp_path / "x.csv", ["1,2,BENIGN", "3,4,BENIGN", "5,6,Hulk"])
        ds = load_flow_csv(path, schema)
        assert list(ds.labels) == [0, 0, 1]
        assert ds.features.tolist() == [[1, 2], [3, 4], [5, 6]]
        assert ds.manifest["rows_read"] == 3

    def test_drop_policy_counts(self, tmp_path, schema):
        path = write_csv(tmp_path / "x.csv", ["1,2,BENIGN", "Infinity,4,BENIGN", "5,6,Hulk"])
        ds = load_flow_csv(path, schema, clean_policy="drop")
        assert len(ds) == 2
        assert ds.manifest["rows_dropped_nonfinite"] == 1

    def test_impute_policy(self, tmp_path, schema):
        path = write_csv(
            tmp_path / "x.csv", ["1,2,BENIGN", "NaN,4,BENIGN", "5,6,Hulk", "3,8,BENIGN"]
        )
        ds = load_flow_csv(path, schema, clean_policy="impute")
        assert len(ds) == 4
        assert ds.manifest["cells_imputed"] == 1
        assert ds.features[1, 0] == 3.0  # median of 1, 5, 3

    def test_unknown_label_rejected(self, tmp_path, schema):
        path = write_csv(tmp_path / "x.csv", ["1,2,BENIGN", "3,4,Mystery"])
        with pytest.raises(SchemaError, match="Mystery"):
            load_flow_csv(path, schema)

    def test_excluded_labels_counted(self, tmp_path):
        schema = CsvSchema(
            label_column="Label",
            label_map={"BENIGN": 0, "Hulk": 1},
            exclude_labels=["Rare"],
        )
        path = write_csv(tmp_path / "x.csv", ["1,2,BENIGN", "3,4,Rare", "5,6,Hulk"])
        ds = load_flow_csv(path, schema)
        assert len(ds) == 2
        assert ds.manifest["rows_excluded_label"] == 1

    def test_missing_file(self, schema):
        with pytest.raises(FileNotFoundError):
            load_flow_csv("/nonexistent/x.csv", schema)

    def test_missing_column(self, tmp_path, schema):
        path = write_csv(tmp_path / "x.csv", ["1,BENIGN"], header="a,Label")
        with pytest.raises(SchemaError, match="feature columns missing"):
            load_flow_csv(path, schema)

    def test_idempotent(self, tmp_path, schema):
        path = write_csv(tmp_path / "x.csv", ["1,2,BENIGN", "5,6,Hulk"])
        assert load_flow_csv(path, schema) == load_flow_csv(path, schema)

    def test_whitespace_in_labels_stripped(self, tmp_path, schema):
        path = write_csv(tmp_path / "x.csv", ["1,2, BENIGN", "5,6, Hulk"])
        ds = load_flow_csv(path, schema)
        assert list(ds.labels) == [0, 1]


class TestRoundTrip:
    def test_write_then_load(self, tmp_path, rng):
        ds = Dataset(rng.normal(size=(20, 3)), np.array([0, 1, 2, 0] * 5))
        schema = write_dataset_csv(ds, tmp_path / "out.csv")
        loaded = load_flow_csv(tmp_path / "out.csv", schema)
        assert loaded.labels.tolist() == ds.labels.tolist()
        assert np.allclose(loaded.features, ds.features)

    def test_schema_yaml_round_trip(self, tmp_path, schema):
        save_schema(schema, tmp_path / "schema.yaml")
        loaded = load_schema(tmp_path / "schema.yaml")
        assert loaded == schema


class TestCicidsSchema:
    def test_eleven_attack_classes(self):
        schema = cicids2017_schema()
        assert set(schema.label_map.values()) == set(range(12))  # benign + 11 attacks

    def test_documented_assignments(self):
        schema = cicids2017_schema()
        assert schema.label_map["DoS slowloris"] == 6
        assert schema.label_map["FTP-Patator"] == 7
        assert schema.label_map["PortScan"] == 8

    def test_rare_classes_excluded(self):
        schema = cicids2017_schema()
        assert "Infiltration" in schema.exclude_labels
        assert "Heartbleed" in schema.exclude_labels

    def test_full_ingest_yields_eleven_attacks(self, tmp_path, rng):
        # miniature file with every label present
        schema = cicids2017_schema()
        names = list(schema.label_map) + ["Infiltration", "Heartbleed"]
        rows = [f"{rng.normal():.3f},{rng.normal():.3f},{name}" for name in names for _ in (0, 1)]
        path = write_csv(tmp_path / "cic.csv", rows, header="a,b,Label")
        ds = load_flow_csv(path, schema)
        assert len(ds.attack_classes) == 11
