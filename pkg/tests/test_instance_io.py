import json

import pytest

from altplan import InstanceValidationError, SchemaError, load_instance, paper_instance
from altplan.instance_io import (
    dump_instance,
    instance_to_dict,
    matrix_to_csv,
    parse_instance,
    read_matrix_csv,
)
from altplan.model import PrioritySets


def tiny_doc(**overrides):
    doc = {
        "periods": [
            {"index": 1, "temperature": "LT", "voltage": "LV", "time_limit_s": 100},
            {"index": 2, "condition": "HTHV", "time_limit_s": 80},
        ],
        "test_cases": [{"id": 1, "name": "A"}, 2, 3],
        "failures": [[1, 0], [0, 0], [0, 2]],
        "run_seconds": [[30, 20], [40, 10], [50, 30]],
        "original_finish_s": [[30, 120], [70, 130], [120, 160]],
        "precedence": [{"period": "all", "before": 1, "after": 2},
                       {"period": 2, "before": 3, "after": 1}],
        "priority_sets": {"all": {"B": [2], "Gamma": [3]}, "2": {"B": [], "Gamma": [2]}},
        "priority_factors": {"p1": 4, "p2": 3, "p3": 2, "p4": 1},
    }
    doc.update(overrides)
    return doc


def test_tiny_document():
    inst = load_instance(tiny_doc())
    assert inst.case_ids == (1, 2, 3)
    assert inst.case_names == ("A", None, None)
    assert [p.start for p in inst.periods] == [0, 100]
    assert str(inst.condition_class(2)) == "HTHV"
    assert inst.precedence_for(1) == {(1, 2)}
    assert inst.precedence_for(2) == {(1, 2), (3, 1)}
    assert inst.priority_sets_for(1) == PrioritySets(frozenset({2}), frozenset({3}))
    assert inst.priority_sets_for(2) == PrioritySets(frozenset(), frozenset({2}))


def test_paper_instance_round_trip(tmp_path):
    inst = paper_instance()
    path = tmp_path / "paper.json"
    dump_instance(inst, path)
    again = load_instance(path)
    assert again == inst
    assert instance_to_dict(again) == instance_to_dict(inst)
    assert load_instance(dump_instance(inst)) == inst


def test_round_trip_per_period_sets():
    inst = load_instance(tiny_doc())
    doc = instance_to_dict(inst)
    assert set(doc["priority_sets"]) == {"1", "2"}
    assert load_instance(json.dumps(doc)) == inst


def test_csv_matrix_references(tmp_path):
    inst = paper_instance()
    doc = instance_to_dict(inst)
    (tmp_path / "runs.csv").write_text(matrix_to_csv(inst, inst.run_seconds))
    doc["run_seconds"] = "runs.csv"
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(doc))
    assert load_instance(path) == inst


def test_read_matrix_csv_labels():
    ids, periods, rows = read_matrix_csv("Test Case,Period1,2\nTC4,1,2\n5,3,4\n\n")
    assert ids == [4, 5] and periods == [1, 2] and rows == [[1, 2], [3, 4]]


@pytest.mark.parametrize("text, where", [
    ("", "csv"),
    ("x,P1\nTC1,1,2\n", "csv/1"),
    ("x,P1\nTC1,abc\n", "csv/1/1"),
    ("x,P1\nfoo,1\n", "csv/1/0"),
])
def test_read_matrix_csv_errors(text, where):
    with pytest.raises(SchemaError) as info:
        read_matrix_csv(text)
    assert info.value.path == where


def test_csv_reference_with_wrong_ids(tmp_path):
    (tmp_path / "f.csv").write_text("c,P1,P2\nTC1,0,0\nTC2,0,0\nTC9,0,0\n")
    with pytest.raises(SchemaError, match="case ids"):
        parse_instance(tiny_doc(failures="f.csv"), base_dir=tmp_path)


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.pop("periods"), "periods"),
    (lambda d: d["periods"][0].pop("time_limit_s"), "periods/0/time_limit_s"),
    (lambda d: d["periods"][1].update(condition="WARM"), "periods/1/condition"),
    (lambda d: d.update(failures=[[1, 0]]), "failures"),
    (lambda d: d["run_seconds"].__setitem__(1, [1]), "run_seconds/1"),
    (lambda d: d["failures"][0].__setitem__(0, True), "failures/0/0"),
    (lambda d: d["precedence"][0].update(period="soon"), "precedence/0/period"),
    (lambda d: d.update(priority_sets=[]), "priority_sets"),
    (lambda d: d.update(priority_factors={"p1": 1}), "priority_factors/p2"),
])
def test_schema_errors_name_the_field(mutate, path):
    doc = tiny_doc()
    mutate(doc)
    with pytest.raises(SchemaError) as info:
        load_instance(doc)
    assert info.value.path == path


def test_not_json():
    with pytest.raises(SchemaError) as info:
        load_instance("{not json")
    assert info.value.path == "$"


def test_missing_file(tmp_path):
    with pytest.raises(SchemaError):
        load_instance(tmp_path / "nope.json")


def test_cycle_is_a_validation_error():
    doc = tiny_doc(precedence=[{"before": 1, "after": 2}, {"before": 2, "after": 3},
                               {"before": 3, "after": 1}])
    with pytest.raises(InstanceValidationError) as info:
        load_instance(doc)
    assert {d.field for d in info.value.diagnostics} == {"precedence"}
    assert load_instance(doc, check=False).precedence_for(1) == {(1, 2), (2, 3), (3, 1)}


def test_delta_entry_warns_and_is_ignored():
    sets = {"all": {"B": [2], "Gamma": [3], "Delta": [1]}}
    with pytest.warns(UserWarning, match="Delta"):
        inst = load_instance(tiny_doc(priority_sets=sets))
    assert inst.priority_partition(1).remainder == set()


def test_default_factors():
    doc = tiny_doc()
    del doc["priority_factors"]
    assert tuple(load_instance(doc).priority_factors) == (4, 3, 2, 1)
