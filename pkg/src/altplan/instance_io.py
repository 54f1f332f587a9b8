"""Reading and writing instance documents.

An instance document is a JSON object::

    {
      "periods": [{"index": 1, "temperature": "LT", "voltage": "LV",
                   "time_limit_s": 1080, "start_s": 0}, ...],
      "test_cases": [{"id": 1, "name": "TC1"}, ...],
      "failures": [[...], ...],            # [test_case][period]
      "run_seconds": [[...], ...],
      "original_finish_s": [[...], ...],
      "precedence": [{"period": "all", "before": 1, "after": 2}, ...],
      "priority_sets": {"all": {"B": [8], "Gamma": [9, 10]}},
      "priority_factors": {"p1": 4, "p2": 3, "p3": 2, "p4": 1}
    }

Any of the three matrices may instead be a string naming a CSV file
(relative to the document) laid out as a table: a header
row of periods and one row per test case, first column the case id.
"""

from __future__ import annotations

import csv
import io
import json
import re
import warnings
from pathlib import Path
from typing import Any

from .errors import InstanceValidationError, SchemaError
from .model import (
    ConditionClass,
    Instance,
    PeriodSpec,
    PriorityFactors,
    PrioritySets,
    Temperature,
    Voltage,
    validate,
)

__all__ = [
    "load_instance",
    "parse_instance",
    "instance_to_dict",
    "dump_instance",
    "read_matrix_csv",
    "matrix_to_csv",
]

_MATRICES = (
    ("failures", "failures"),
    ("run_seconds", "run_seconds"),
    ("original_finish_s", "original_finish"),
)
_FACTOR_KEYS = ("p1", "p2", "p3", "p4")
_ID_RE = re.compile(r"(\d+)\s*$")


def load_instance(source, *, check: bool = True) -> Instance:
    """Load and validate an instance.

    ``source`` may be a mapping, a path to a JSON file, or JSON text.
    Raises :class:`SchemaError` for structural problems and
    :class:`InstanceValidationError` when the parsed instance breaks an
    invariant (disable with ``check=False``).
    """
    base = Path.cwd()
    if isinstance(source, dict):
        doc = source
    elif isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(str(path), f"cannot read: {exc.strerror or exc}") from exc
        base = path.parent
        doc = _parse_json(text)
    else:
        doc = _parse_json(str(source))
    inst = parse_instance(doc, base_dir=base)
    if check:
        problems = validate(inst)
        if problems:
            raise InstanceValidationError(problems)
    return inst


def _parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def _int(value, path: str) -> int:
    if isinstance(value, bool):
        raise SchemaError(path, "expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise SchemaError(path, f"expected an integer, got {value!r}")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {value!r}")
    return value


def _require(doc: dict, key: str, kind, path: str = ""):
    if key not in doc:
        raise SchemaError(f"{path}{key}", "missing required field")
    value = doc[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{path}{key}", f"expected {getattr(kind, '__name__', kind)}")
    return value


def _period_key(key, period_ids, path: str):
    if key == "all":
        return list(period_ids)
    try:
        j = int(key)
    except (TypeError, ValueError):
        raise SchemaError(path, f"period must be an integer or 'all', got {key!r}") from None
    return [j]


def parse_instance(doc, *, base_dir: Path | str = ".") -> Instance:
    """Turn a decoded document into an :class:`Instance` without validating it."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be an object")
    base_dir = Path(base_dir)

    periods = []
    start = 0
    for n, p in enumerate(_require(doc, "periods", list)):
        path = f"periods/{n}/"
        if not isinstance(p, dict):
            raise SchemaError(path.rstrip("/"), "expected an object")
        index = _int(p.get("index", n + 1), path + "index")
        try:
            if "condition" in p:
                cond = ConditionClass.parse(p["condition"])
            else:
                cond = ConditionClass(Temperature(_require(p, "temperature", str, path)),
                                      Voltage(_require(p, "voltage", str, path)))
        except ValueError as exc:
            raise SchemaError(path + "condition", str(exc)) from None
        limit = _int(_require(p, "time_limit_s", (int, float), path), path + "time_limit_s")
        start = _int(p.get("start_s", start), path + "start_s")
        periods.append(PeriodSpec(index, cond, limit, start))
        start += limit
    period_ids = [p.index for p in periods]

    case_ids, names = [], []
    for n, c in enumerate(_require(doc, "test_cases", list)):
        path = f"test_cases/{n}"
        if isinstance(c, dict):
            case_ids.append(_int(_require(c, "id", (int, float), path + "/"), path + "/id"))
            name = c.get("name")
            if name is not None and not isinstance(name, str):
                raise SchemaError(path + "/name", "expected a string")
            names.append(name)
        else:
            case_ids.append(_int(c, path))
            names.append(None)

    matrices = {}
    for key, attr in _MATRICES:
        raw = _require(doc, key, (list, str))
        if isinstance(raw, str):
            matrices[attr] = _matrix_from_csv_ref(base_dir / raw, key, case_ids, period_ids)
        else:
            matrices[attr] = _dense_matrix(raw, key, len(case_ids), len(period_ids))

    precedence: dict = {j: set() for j in period_ids}
    for n, entry in enumerate(doc.get("precedence", [])):
        path = f"precedence/{n}"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected an object")
        before = _int(_require(entry, "before", (int, float), path + "/"), path + "/before")
        after = _int(_require(entry, "after", (int, float), path + "/"), path + "/after")
        for j in _period_key(entry.get("period", "all"), period_ids, path + "/period"):
            precedence.setdefault(j, set()).add((before, after))

    priority: dict = {}
    raw_sets = doc.get("priority_sets", {})
    if not isinstance(raw_sets, dict):
        raise SchemaError("priority_sets", "expected an object keyed by period or 'all'")
    # "all" first so that per-period entries override it
    for key in sorted(raw_sets, key=lambda k: k != "all"):
        path = f"priority_sets/{key}"
        entry = raw_sets[key]
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected an object with B and Gamma")
        if "Delta" in entry:
            warnings.warn(
                f"{path}/Delta is derived (all cases minus effective, B and Gamma) and is ignored",
                stacklevel=2,
            )
        sets = []
        for name in ("B", "Gamma"):
            ids = entry.get(name, [])
            if not isinstance(ids, list):
                raise SchemaError(f"{path}/{name}", "expected a list of ids")
            sets.append(frozenset(_int(v, f"{path}/{name}/{i}") for i, v in enumerate(ids)))
        for j in _period_key(key, period_ids, path):
            priority[j] = PrioritySets(*sets)

    raw_factors = doc.get("priority_factors", {"p1": 4, "p2": 3, "p3": 2, "p4": 1})
    if not isinstance(raw_factors, dict):
        raise SchemaError("priority_factors", "expected an object with p1..p4")
    factors = PriorityFactors(*(
        _number(_require(raw_factors, k, (int, float), "priority_factors/"), f"priority_factors/{k}")
        for k in _FACTOR_KEYS
    ))

    return Instance(
        periods=periods,
        case_ids=case_ids,
        precedence=precedence,
        priority_sets=priority,
        priority_factors=factors,
        case_names=names,
        **matrices,
    )


def _dense_matrix(raw, key: str, n_rows: int, n_cols: int):
    if len(raw) != n_rows:
        raise SchemaError(key, f"expected {n_rows} rows (one per test case), got {len(raw)}")
    rows = []
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n_cols:
            raise SchemaError(f"{key}/{r}", f"expected a list of {n_cols} values (one per period)")
        rows.append([_int(v, f"{key}/{r}/{c}") for c, v in enumerate(row)])
    return rows


def _matrix_from_csv_ref(path: Path, key: str, case_ids, period_ids):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(key, f"cannot read {path}: {exc.strerror or exc}") from exc
    rows_ids, col_ids, values = read_matrix_csv(text, name=key)
    if list(rows_ids) != list(case_ids):
        raise SchemaError(key, f"CSV case ids {rows_ids} do not match test_cases {case_ids}")
    if list(col_ids) != list(period_ids):
        raise SchemaError(key, f"CSV periods {col_ids} do not match periods {period_ids}")
    return values


def _parse_id(label: str, path: str) -> int:
    match = _ID_RE.search(label.strip())
    if not match:
        raise SchemaError(path, f"cannot read an id from {label!r}")
    return int(match.group(1))


def read_matrix_csv(text: str, *, name: str = "csv"):
    """Parse a table-shaped CSV into ``(case_ids, period_ids, rows)``.

    Header cells like ``Period3`` or ``3`` and row labels like ``TC7`` or
    ``7`` are accepted.
    """
    reader = list(csv.reader(io.StringIO(text)))
    reader = [row for row in reader if any(cell.strip() for cell in row)]
    if not reader:
        raise SchemaError(name, "empty CSV")
    header = reader[0]
    period_ids = [_parse_id(h, f"{name}/header/{c}") for c, h in enumerate(header[1:], start=1)]
    case_ids, rows = [], []
    for r, row in enumerate(reader[1:], start=1):
        if len(row) != len(header):
            raise SchemaError(f"{name}/{r}", f"expected {len(header)} cells, got {len(row)}")
        case_ids.append(_parse_id(row[0], f"{name}/{r}/0"))
        cells = []
        for c, cell in enumerate(row[1:], start=1):
            try:
                cells.append(int(cell.strip()))
            except ValueError:
                raise SchemaError(f"{name}/{r}/{c}", f"expected an integer, got {cell!r}") from None
        rows.append(cells)
    return case_ids, period_ids, rows


def matrix_to_csv(inst: Instance, matrix, *, corner: str = "Test Case") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([corner] + [f"Period{j}" for j in inst.period_ids])
    for cid, row in zip(inst.case_ids, matrix):
        writer.writerow([f"TC{cid}"] + [int(v) for v in row])
    return buf.getvalue()


def _plain_number(x):
    return int(x) if float(x).is_integer() else float(x)


def instance_to_dict(inst: Instance) -> dict:
    """Serialise to the document layout understood by :func:`load_instance`."""
    doc: dict = {
        "periods": [
            {"index": p.index, "temperature": p.condition.temperature.value,
             "voltage": p.condition.voltage.value, "time_limit_s": p.time_limit,
             "start_s": p.start}
            for p in inst.periods
        ],
        "test_cases": [
            {"id": cid, **({"name": name} if name is not None else {})}
            for cid, name in zip(inst.case_ids, inst.case_names)
        ],
    }
    for key, attr in _MATRICES:
        doc[key] = getattr(inst, attr).tolist()

    per_period = {j: inst.precedence_for(j) for j in inst.period_ids}
    shared = set.intersection(*(set(v) for v in per_period.values())) if per_period else set()
    precedence = [{"period": "all", "before": a, "after": b} for a, b in sorted(shared)]
    for j, pairs in per_period.items():
        precedence += [{"period": j, "before": a, "after": b} for a, b in sorted(pairs - shared)]
    doc["precedence"] = precedence

    sets = {j: inst.priority_sets_for(j) for j in inst.period_ids}
    distinct = set(sets.values())
    if len(distinct) == 1:
        (only,) = distinct
        doc["priority_sets"] = {"all": {"B": sorted(only.preferred), "Gamma": sorted(only.secondary)}}
    else:
        doc["priority_sets"] = {str(j): {"B": sorted(s.preferred), "Gamma": sorted(s.secondary)}
                                for j, s in sets.items()}
    doc["priority_factors"] = {k: _plain_number(v) for k, v in zip(_FACTOR_KEYS, inst.priority_factors)}
    return doc


def dump_instance(inst: Instance, fp=None, *, indent: int | None = 2) -> str | None:
    """Write the instance as JSON to ``fp`` (path or file object), or return the text."""
    text = json.dumps(instance_to_dict(inst), indent=indent) + "\n"
    if fp is None:
        return text
    if isinstance(fp, (str, Path)):
        Path(fp).write_text(text, encoding="utf-8")
    else:
        fp.write(text)
    return None
