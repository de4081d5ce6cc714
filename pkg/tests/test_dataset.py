import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effortnet.cocomo import DevelopmentMode, effort
from effortnet.dataset import (
    COLUMNS,
    Dataset,
    Encoding,
    MinMaxScaler,
    ProjectRecord,
    SplitPlan,
    feature_matrix,
    feature_vector,
    format_dataset,
    load_dataset,
    parse_dataset,
    sample_dataset,
    save_dataset,
    split,
)
from effortnet.errors import BadCount, DegenerateFeature, EmptyDataset, ParseError, ValidationError

WORKED_EAF = float(Fraction("0.75") * Fraction("1.08") * Fraction("1.65") * Fraction("1.30") * Fraction("1.06"))


def csv_line(pid, mode="organic", mult=None, kdsi="10", actual="100"):
    mult = mult or ["1.0"] * 15
    return ",".join([str(pid), mode, *map(str, mult), kdsi, actual])


def csv_text(*lines):
    return ",".join(COLUMNS) + "\n" + "\n".join(lines) + "\n"


def test_roundtrip_synthetic(tmp_path, synthetic):
    path = tmp_path / "projects.csv"
    save_dataset(synthetic, path)
    again = load_dataset(path)
    assert again.records == synthetic.records
    assert len(again) == 63


def test_parse_modes_case_insensitive():
    ds = parse_dataset(csv_text(csv_line(1, "Organic"), csv_line(2, "SemiDetached"), csv_line(3, "EMBEDDED")))
    assert [r.mode for r in ds] == list(DevelopmentMode)


def test_columns_any_order():
    header = list(reversed(COLUMNS))
    row = list(reversed(csv_line(4).split(",")))
    ds = parse_dataset(",".join(header) + "\n" + ",".join(row) + "\n")
    assert ds.records[0].id == 4 and ds.records[0].size == 10.0


def test_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(EmptyDataset):
        load_dataset(path)
    with pytest.raises(EmptyDataset):
        parse_dataset(",".join(COLUMNS) + "\n")


def test_zero_actual_names_the_row():
    with pytest.raises(ValidationError, match=r"line 3.*project 7.*actual"):
        parse_dataset(csv_text(csv_line(6), csv_line(7, actual="0")))


def test_out_of_range_multiplier():
    mult = ["1.0"] * 15
    mult[3] = "2.5"
    with pytest.raises(ValidationError, match="TIME"):
        parse_dataset(csv_text(csv_line(1, mult=mult)))


@pytest.mark.parametrize(
    "text",
    [
        "id,mode,kdsi\n1,organic,3\n",
        csv_text(csv_line(1) + ",extra"),
        csv_text(csv_line(1, kdsi="ten")),
        csv_text(csv_line("x")),
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_dataset(text)


def test_bad_mode_and_duplicate_ids():
    with pytest.raises(ValidationError, match="mode"):
        parse_dataset(csv_text(csv_line(1, "agile")))
    with pytest.raises(ValidationError, match="duplicate"):
        parse_dataset(csv_text(csv_line(1), csv_line(1)))


def test_sample_dataset_reproduces_published_cocomo_column():
    ds = sample_dataset()
    assert len(ds) == 14
    assert ds.ids[:3] == (1, 5, 9)
    assert ds.records[0].actual_effort == 2040
    assert "placeholder" in ds.provenance
    assert effort(ds.records[0].mode, ds.records[0].size, ds.records[0].eaf) == pytest.approx(2218)


def test_split_examples(synthetic):
    plan = split(synthetic, 53, seed=123)
    assert plan.train_count == 53 and len(set(plan.train_ids)) == 53
    assert plan.test_ids == synthetic.ids
    assert set(plan.train_ids) <= set(synthetic.ids)
    full = split(synthetic, 63, seed=9)
    assert set(full.train_ids) == set(full.test_ids) == set(synthetic.ids)
    assert split(synthetic, 53, seed=123) == plan


@pytest.mark.parametrize("count", [0, 64, -1])
def test_split_bad_count(synthetic, count):
    with pytest.raises(BadCount):
        split(synthetic, count, seed=1)


def test_split_seeds_distinct(synthetic):
    plans = {split(synthetic, 53, seed=s).train_ids for s in range(100)}
    assert len(plans) >= 99


def test_manifest_roundtrip(synthetic):
    plan = split(synthetic, 53, seed=42)
    manifest = json.loads(plan.to_json())
    assert set(manifest) == {"seed", "generator", "train_ids", "train_count"}
    assert manifest["train_count"] == 53 and manifest["seed"] == 42
    assert SplitPlan.from_manifest(manifest, synthetic) == plan
    manifest["train_ids"].append(999)
    with pytest.raises(ValidationError):
        SplitPlan.from_manifest(manifest, synthetic)


def record(size, mult):
    return ProjectRecord(1, DevelopmentMode.ORGANIC, tuple(mult), size, 50.0)


def test_feature_vectors():
    assert feature_vector(record(10, [1.0] * 15)).tolist() == [10.0, 1.0]
    worked = record(10, [0.75, 1.08, 1.65, 1.30, 1.06] + [1.0] * 10)
    vec = feature_vector(worked, Encoding.SIZE_EAF)
    assert vec[0] == 10.0 and vec[1] == pytest.approx(WORKED_EAF, rel=1e-12)
    wide = feature_vector(worked, "size-drivers")
    assert wide.shape == (16,) and wide[1] == 0.75


def test_scaler_midpoint_and_extrapolation():
    scaler = MinMaxScaler.fit([[10.0, 1.0], [110.0, 2.0]])
    np.testing.assert_allclose(scaler.transform([60.0, 1.5]), [0.5, 0.5])
    np.testing.assert_allclose(scaler.transform([210.0, 0.0]), [2.0, -1.0])


def test_scaler_degenerate_feature():
    with pytest.warns(DegenerateFeature):
        scaler = MinMaxScaler.fit([[1.0, 3.0], [2.0, 3.0]])
    np.testing.assert_array_equal(scaler.transform([[1.5, 7.0]]), [[0.5, 0.0]])


def test_scaler_ignores_test_rows(synthetic):
    plan = split(synthetic, 53, seed=5)
    train = synthetic.subset(plan.train_ids)
    base = MinMaxScaler.fit(feature_matrix(train))
    held_out = [r for r in synthetic if r.id not in set(plan.train_ids)]
    mutated = [
        ProjectRecord(r.id, r.mode, r.multipliers, r.size * 1000, r.actual_effort) if r in held_out else r
        for r in synthetic
    ]
    again = MinMaxScaler.fit(feature_matrix(Dataset(tuple(mutated)).subset(plan.train_ids)))
    np.testing.assert_array_equal(base.low, again.low)
    np.testing.assert_array_equal(base.span, again.span)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(0.5, 2000), st.floats(0.5, 20000)), min_size=1, max_size=20))
def test_format_parse_roundtrip(values):
    ds = Dataset(
        tuple(ProjectRecord(i + 1, DevelopmentMode.EMBEDDED, (1.1,) * 15, s, a) for i, (s, a) in enumerate(values))
    )
    assert parse_dataset(format_dataset(ds)).records == ds.records
