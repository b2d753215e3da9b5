"""Tests for activities, traces, logs, and model containers."""

import pickle

import pytest

from declarekit import (
    Activity,
    Constraint,
    DeclareModel,
    EventLog,
    TemplateKind,
    Trace,
)


def test_activity_interning():
    """Equal labels give the very same object, so identity comparison is safe."""
    assert Activity("a") is Activity("a")
    assert Activity("a") is not Activity("b")


def test_activity_rejects_empty_and_wildcard():
    with pytest.raises(ValueError):
        Activity("")
    with pytest.raises(ValueError):
        Activity("*")


def test_activity_orders_by_label():
    acts = [Activity(x) for x in ("m", "a", "z", "b")]
    assert [a.label for a in sorted(acts)] == ["a", "b", "m", "z"]


def test_activity_survives_pickling():
    a = Activity("pickled")
    assert pickle.loads(pickle.dumps(a)) is a


def test_trace_from_labels():
    t = Trace.from_labels(3, ["a", "b", "a"])
    assert t.id == 3
    assert len(t) == 3
    assert t[0] is Activity("a")
    assert [e.label for e in t] == ["a", "b", "a"]


def test_trace_rejects_negative_id():
    with pytest.raises(ValueError):
        Trace.from_labels(-1, ["a"])


def test_event_log_alphabet_sorted():
    log = EventLog((Trace.from_labels(0, "ba"), Trace.from_labels(1, "ca")))
    assert tuple(a.label for a in log.alphabet) == ("a", "b", "c")


def test_event_log_rejects_duplicate_ids():
    with pytest.raises(ValueError):
        EventLog((Trace.from_labels(0, "a"), Trace.from_labels(0, "b")))


def test_event_log_lookup_and_iteration():
    t0, t1 = Trace.from_labels(0, "ab"), Trace.from_labels(7, "ba")
    log = EventLog((t0, t1))
    assert log.get(7) == t1
    assert list(log) == [t0, t1]
    assert len(log) == 2


def test_template_kind_accepts_both_spellings():
    assert TemplateKind.from_name("AlternateResponse") is TemplateKind.ALTERNATE_RESPONSE
    assert TemplateKind.from_name("Alternate Response") is TemplateKind.ALTERNATE_RESPONSE
    assert TemplateKind.from_name("Co-Existence") is TemplateKind.COEXISTENCE
    assert TemplateKind.from_name("Coexistence") is TemplateKind.COEXISTENCE


def test_template_kind_unknown_name_lists_valid_ones():
    with pytest.raises(ValueError) as err:
        TemplateKind.from_name("Sometimes")
    message = str(err.value)
    for kind in TemplateKind:
        assert kind.camel in message


def test_template_kind_has_thirteen_members():
    assert len(TemplateKind) == 13


def test_model_rejects_duplicate_constraint_ids():
    a, b = Activity("a"), Activity("b")
    c0 = Constraint(0, TemplateKind.RESPONSE, a, b)
    c1 = Constraint(0, TemplateKind.PRECEDENCE, a, b)
    with pytest.raises(ValueError):
        DeclareModel((c0, c1))


def test_model_keeps_declaration_order():
    a, b = Activity("a"), Activity("b")
    c1 = Constraint(5, TemplateKind.RESPONSE, a, b)
    c0 = Constraint(2, TemplateKind.PRECEDENCE, a, b)
    model = DeclareModel((c1, c0))
    assert [c.id for c in model] == [5, 2]
