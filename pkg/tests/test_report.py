import json
import math

import numpy as np
import pytest

from cmclab.report import SuiteResult, canonical, dumps, fmt, worst_of
from cmclab.solver import BoundReport


def test_canonical_rounding():
    assert canonical(1 / 3) == 0.333333333333
    assert canonical(np.float64(2.0)) == 2.0
    assert canonical([math.inf, math.nan, 1]) == [None, None, 1]
    assert canonical({"a": np.int64(3), "b": np.bool_(True)}) == {"a": 3, "b": True}
    assert canonical((1.23456789012345e-20,)) == [1.23456789012e-20]
    with pytest.raises(TypeError):
        canonical(object())


def test_dumps_is_idempotent():
    obj = {"z": 1 / 7, "a": [np.pi, None, "x"], "m": {"k": 1e300 * 10}}
    text = dumps(obj)
    assert dumps(json.loads(text)) == text
    assert text.index('"a"') < text.index('"m"') < text.index('"z"')
    assert text.endswith("\n")


def test_fmt():
    assert fmt(True) == "true"
    assert fmt(np.float64(0.1)) == "0.1"
    assert fmt(math.nan) == "nan"
    assert fmt([np.float64(1.5), 2]) == "[1.5, 2]"
    assert fmt({"a": 1.0}) == "{a: 1}"


def test_worst_of():
    reps = [
        BoundReport.compare("x", 1.0, 2.0),
        BoundReport.compare("x", 1.9, 2.0),
        BoundReport.skip("x", "not applicable"),
    ]
    w = worst_of("sweep", reps)
    assert w.name == "sweep" and w.passed
    assert w.lhs == 1.9
    assert (w.details["n_checked"], w.details["n_failed"], w.details["n_skipped"]) == (2, 0, 1)
    w = worst_of("sweep", reps + [BoundReport.compare("x", 3.0, 2.0)])
    assert not w.passed and w.lhs == 3.0 and w.details["n_failed"] == 1
    w = worst_of("sweep", [BoundReport.skip("x", "why")])
    assert w.skipped and w.passed and w.reason == "why"


def test_suite_result_renderers():
    res = SuiteResult("demo", 100, [BoundReport.compare("a", 1.0, 2.0), BoundReport.skip("b", "why")],
                      summary={"h_max": 0.25}, wall_time=12.5)
    assert res.passed and not res.failures()
    data = json.loads(res.to_json())
    assert data["metric"] == "demo" and data["summary"]["h_max"] == 0.25
    assert "wall_time" not in data
    table = res.to_table()
    assert "skipped b: why" in table and table.rstrip().endswith("overall: PASS")
    lines = res.to_csv().splitlines()
    assert lines[0].startswith("check,passed") and len(lines) == 3
    res.add(BoundReport.compare("c", 3.0, 1.0))
    assert not res.passed and [r.name for r in res.failures()] == ["c"]
    assert res.render("table").rstrip().endswith("overall: FAIL")
