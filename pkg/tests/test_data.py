import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from streamsel.data import (
    Dataset,
    GroupPlan,
    load_dataset,
    make_group_plan,
    normalize_features,
    remap_labels,
    stream_groups,
)
from streamsel.errors import ConfigError, DataError


def test_csv_with_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("x1,x2,y\n1,0,1\n0,1,2\n")
    ds = load_dataset(p)
    assert (ds.n, ds.d, ds.c) == (2, 2, 2)
    assert ds.feature_names == ("x1", "x2")
    np.testing.assert_array_equal(ds.features, [[1, 0], [0, 1]])


def test_csv_without_header_and_label_first(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("7,1.5,2\n3,0.5,1\n7,2.5,0\n")
    ds = load_dataset(p, label_col="first")
    assert ds.feature_names is None
    # 7 seen first -> class 1
    np.testing.assert_array_equal(ds.labels, [1, 2, 1])
    np.testing.assert_array_equal(ds.features[0], [1.5, 0.5, 2.5])


def test_string_labels_remapped_in_order_of_appearance(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("1,g\n2,b\n3,g\n")
    ds = load_dataset(p)
    np.testing.assert_array_equal(ds.labels, [1, 2, 1])


def test_libsvm_zero_fills_gaps(tmp_path):
    p = tmp_path / "a.svm"
    p.write_text("1 1:0.5 3:2.0\n-1 2:1.0\n")
    ds = load_dataset(p, format="libsvm")
    assert ds.d == 3
    assert ds.features[1, 0] == 0.0
    np.testing.assert_array_equal(ds.matrix(), [[0.5, 0, 2.0], [0, 1.0, 0]])
    np.testing.assert_array_equal(ds.labels, [1, 2])


@pytest.mark.parametrize(
    "text, match",
    [
        ("a,y\n1,1\n2,1\n3,1\n", "single-class"),
        ("a,y\n1,1\n", "at least 2"),
        ("a,b,y\n1,2,1\n3,1\n", "ragged"),
        ("a,b,y\n1,2,1\n3,x,2\n", ":3:"),
    ],
)
def test_csv_errors(tmp_path, text, match):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DataError, match=match):
        load_dataset(p)


def test_libsvm_parse_error_has_line_number(tmp_path):
    p = tmp_path / "bad.svm"
    p.write_text("1 1:0.5\n2 2:abc\n")
    with pytest.raises(DataError, match=":2:"):
        load_dataset(p, format="libsvm")


def test_missing_file():
    with pytest.raises(DataError):
        load_dataset("/nonexistent/file.csv")


def test_remap_labels():
    np.testing.assert_array_equal(remap_labels([5, 3, 5, 9]), [1, 2, 1, 3])


@pytest.mark.parametrize(
    "f, expected",
    [
        ([1, 2, 3], [-1 / np.sqrt(2), 0, 1 / np.sqrt(2)]),
        ([0, 4], [-np.sqrt(2) / 2, np.sqrt(2) / 2]),
    ],
)
def test_normalize_examples(f, expected):
    ds = Dataset([f], [1, 2] + [1] * (len(f) - 2))
    out, constant = normalize_features(ds)
    np.testing.assert_allclose(out.features[0], expected, atol=1e-15)
    assert constant == []


def test_constant_feature_flagged():
    ds = Dataset([[5, 5, 5], [1, 2, 3]], [1, 2, 1])
    out, constant = normalize_features(ds)
    assert constant == [0]
    np.testing.assert_array_equal(out.features[0], [0, 0, 0])


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(2, 12)), elements=finite))
def test_normalization_properties(X):
    labels = np.arange(X.shape[1]) % 2 + 1
    ds = Dataset(X, labels)
    once, constant = normalize_features(ds)
    twice, _ = normalize_features(once)
    np.testing.assert_allclose(twice.features, once.features, atol=1e-12, rtol=0)
    for j in range(ds.d):
        if j in constant:
            continue
        f = once.features[j]
        assert abs(f.mean()) <= 1e-12
        assert abs(np.linalg.norm(f) - 1) <= 1e-12


def test_dataset_is_read_only():
    ds = Dataset([[1.0, 2.0]], [1, 2])
    with pytest.raises(ValueError):
        ds.features[0, 0] = 3.0


def test_group_plan_sizes():
    assert [len(g) for g in make_group_plan(34, "half", 0).groups] == [17, 17]
    plan = make_group_plan(1000, "hundredth", 0)
    assert len(plan) == 100 and all(len(g) == 10 for g in plan.groups)
    assert [len(g) for g in make_group_plan(1000, "tenth", 0).groups] == [100] * 10
    assert [len(g) for g in make_group_plan(1000, "two-hundredth", 0).groups] == [5] * 200
    assert [len(g) for g in make_group_plan(5, "explicit-size", 7, size=2).groups] == [2, 2, 1]


def test_group_plan_deterministic_partition():
    a = make_group_plan(5, "explicit-size", 7, size=2)
    b = make_group_plan(5, "explicit-size", 7, size=2)
    assert a == b
    assert sorted(a.indices) == list(range(5))
    assert make_group_plan(5, "explicit-size", 8, size=2) != a


@pytest.mark.parametrize("d, strategy, kw", [
    (50, "tenth", {}),
    (99, "hundredth", {}),
    (10, "explicit-size", {"size": 0}),
    (0, "half", {}),
    (10, "natural", {}),
    (10, "thirds", {}),
])
def test_group_plan_errors(d, strategy, kw):
    with pytest.raises(ConfigError):
        make_group_plan(d, strategy, 0, **kw)


def test_group_plan_rejects_overlap_and_empty():
    with pytest.raises(ConfigError):
        GroupPlan(((0, 1), (1, 2)))
    with pytest.raises(ConfigError):
        GroupPlan(((0,), ()))


def test_natural_plan_untouched():
    plan = make_group_plan(5, "natural", None, groups=[[3, 4], [0], [1, 2]])
    assert plan.groups == ((3, 4), (0,), (1, 2))


def test_plan_json_roundtrip():
    plan = make_group_plan(10, "explicit-size", 3, size=4)
    obj = json.loads(plan.to_json())
    assert set(obj) == {"seed", "strategy", "groups"}
    assert GroupPlan.from_json(plan.to_json()) == plan


def test_stream_yields_each_group_once():
    ds = Dataset([[1, 2], [3, 4], [5, 6]], [1, 2])
    stream = stream_groups(ds, GroupPlan(((0, 1), (2,))))
    gid, group = next(stream)
    assert gid == 0 and [i for i, _ in group] == [0, 1]
    np.testing.assert_array_equal(group[1][1], [3, 4])
    gid, group = next(stream)
    assert gid == 1 and [i for i, _ in group] == [2]
    assert stream.exhausted
    with pytest.raises(StopIteration):
        next(stream)
    assert list(stream) == []


def test_empty_plan_stream():
    ds = Dataset([[1, 2]], [1, 2])
    assert list(stream_groups(ds, GroupPlan(()))) == []


def test_stream_index_out_of_range():
    ds = Dataset([[1, 2], [3, 4]], [1, 2])
    with pytest.raises(ConfigError):
        stream_groups(ds, GroupPlan(((0, 2),)))


def test_flattened_stream():
    ds = Dataset([[1, 2], [3, 4], [5, 6]], [1, 2])
    stream = stream_groups(ds, GroupPlan(((2,), (0, 1))))
    assert [i for i, _ in stream.features()] == [2, 0, 1]
