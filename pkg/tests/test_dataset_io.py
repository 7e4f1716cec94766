import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bistochastic.dataset_io import (
    ColumnSpec,
    SchemaSpec,
    load_dataset,
    load_schema,
    save_dataset,
    save_schema,
    schema_of,
)
from bistochastic.exceptions import (
    IoFailure,
    MissingColumn,
    UnknownLevel,
    UnparseableCell,
    ValidationError,
)
from bistochastic.pram import CategoricalColumn, Dataset, NumericalColumn

SCHEMA = SchemaSpec(
    (
        ColumnSpec("color", "categorical", ("red", "green", "blue")),
        ColumnSpec("age", "numerical"),
    )
)


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoad:
    def test_three_rows(self, tmp_path):
        ds = load_dataset(write(tmp_path, "color,age\nred,30\nblue,41.5\nred,22\n"), SCHEMA)
        assert ds.record_count == 3
        assert ds["color"].labels == ["red", "blue", "red"]
        np.testing.assert_array_equal(ds["color"].codes, [0, 2, 0])
        np.testing.assert_array_equal(ds["age"].values, [30.0, 41.5, 22.0])

    def test_unparseable(self, tmp_path):
        with pytest.raises(UnparseableCell) as info:
            load_dataset(write(tmp_path, "color,age\nred,30\ngreen,abc\n"), SCHEMA)
        assert (info.value.row, info.value.col, info.value.value) == (2, "age", "abc")

    @pytest.mark.parametrize("cell", ["", "nan", "inf"])
    def test_missing_or_nonfinite(self, tmp_path, cell):
        with pytest.raises(UnparseableCell):
            load_dataset(write(tmp_path, f"color,age\nred,{cell}\n"), SCHEMA)

    def test_unknown_level(self, tmp_path):
        with pytest.raises(UnknownLevel) as info:
            load_dataset(write(tmp_path, "color,age\nred,1\npurple,2\n"), SCHEMA)
        assert info.value.row == 2 and info.value.value == "purple"

    def test_missing_column(self, tmp_path):
        with pytest.raises(MissingColumn, match="age"):
            load_dataset(write(tmp_path, "color\nred\n"), SCHEMA)

    def test_extra_columns_ignored_and_schema_order_used(self, tmp_path):
        ds = load_dataset(write(tmp_path, "age,note,color\n5,x,green\n"), SCHEMA)
        assert ds.names == ["color", "age"]

    def test_inferred_levels(self, tmp_path):
        schema = SchemaSpec((ColumnSpec("c", "categorical"),))
        ds = load_dataset(write(tmp_path, "c\nb\na\nb\n"), schema)
        assert ds["c"].levels == ("b", "a")

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ValidationError):
            load_dataset(write(tmp_path, "color,age\nred\n"), SCHEMA)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoFailure):
            load_dataset(tmp_path / "nope.csv", SCHEMA)

    def test_quoted_commas(self, tmp_path):
        schema = SchemaSpec((ColumnSpec("c", "categorical"),))
        ds = load_dataset(write(tmp_path, 'c\n"a,b"\n'), schema)
        assert ds["c"].labels == ["a,b"]


class TestSave:
    def test_round_trip(self, tmp_path):
        ds = Dataset(
            (
                CategoricalColumn.from_labels("color", ["red", "blue", "red"], ["red", "green", "blue"]),
                NumericalColumn("age", [1 / 3, 2.5, -7.0]),
            )
        )
        path = tmp_path / "out.csv"
        save_dataset(ds, path)
        assert load_dataset(path, schema_of(ds)) == ds

    def test_float_exact(self, tmp_path):
        ds = Dataset((NumericalColumn("x", [1 / 3, 0.1 + 0.2]),))
        path = tmp_path / "out.csv"
        save_dataset(ds, path)
        assert load_dataset(path, schema_of(ds))["x"].values.tolist() == [1 / 3, 0.1 + 0.2]

    def test_empty_dataset(self, tmp_path):
        ds = Dataset((CategoricalColumn("c", ("a",), np.zeros(0, int)), NumericalColumn("x", [])))
        path = tmp_path / "out.csv"
        save_dataset(ds, path)
        assert path.read_text() == "c,x\n"
        assert load_dataset(path, schema_of(ds)).record_count == 0


class TestSchema:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "s.json"
        save_schema(SCHEMA, path)
        assert load_schema(path) == SCHEMA

    def test_invalid(self, tmp_path):
        with pytest.raises(ValidationError):
            ColumnSpec("x", "text")
        with pytest.raises(ValidationError):
            ColumnSpec("x", "numerical", ("a",))
        with pytest.raises(ValidationError):
            SchemaSpec((ColumnSpec("x", "numerical"), ColumnSpec("x", "numerical")))
        with pytest.raises(ValidationError):
            load_schema(write(tmp_path, "{not json", "s.json"))
        with pytest.raises(ValidationError):
            load_schema(write(tmp_path, '{"cols": []}', "s.json"))


labels = st.text(st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 20).flatmap(
        lambda n: st.tuples(
            st.lists(labels, min_size=n, max_size=n),
            st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=n, max_size=n),
        )
    )
)
def test_round_trip_property(tmp_path_factory, pair):
    cats, nums = pair
    levels = list(dict.fromkeys(cats)) or ["a"]
    ds = Dataset((CategoricalColumn.from_labels("c", cats, levels), NumericalColumn("x", nums)))
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    save_dataset(ds, path)
    assert load_dataset(path, schema_of(ds)) == ds
