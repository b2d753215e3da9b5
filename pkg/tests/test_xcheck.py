"""Tests for the backend cross-validation harness."""

import json

from declarekit import (
    Activity,
    TemplateKind,
    Trace,
    exhaustive_check,
    random_check,
)
from declarekit.xcheck import ALL_KINDS, Disagreement


def test_all_kinds_covers_every_template():
    assert set(ALL_KINDS) == set(TemplateKind)


def test_exhaustive_length_zero_is_empty_trace_only():
    assert exhaustive_check(max_len=0) == []


def test_exhaustive_small_grid_agrees():
    assert exhaustive_check(max_len=5) == []


def test_exhaustive_respects_kind_selection():
    out = exhaustive_check(kinds=(TemplateKind.RESPONSE,), max_len=6)
    assert out == []


def test_random_check_is_seeded():
    assert random_check(n_samples=500, max_len=12, seed=7) == []


def test_disagreement_serializes():
    d = Disagreement(
        kind=TemplateKind.RESPONSE,
        trace=Trace.from_labels(0, "ab"),
        verdicts={"direct": True, "tree": False, "dfa": True},
        factlog="trace(0,0,a).\ntrace(0,1,b).\n",
    )
    doc = d.to_json_dict()
    assert doc["kind"] == "Response"
    assert doc["verdicts"] == {"direct": True, "tree": False, "dfa": True}
    assert "trace(0,0,a)" in doc["factlog"]
    json.dumps(doc)  # stays JSON-encodable
