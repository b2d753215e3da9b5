"""Tests for the positional-scan backend: verdicts, failures, witnesses."""

import itertools

import pytest

from declarekit import (
    Activity,
    Constraint,
    TemplateKind,
    Trace,
    check_direct,
    eval_tree,
    template_formula,
)
from declarekit.direct import (
    ACTIVATION_NOT_FOLLOWED_BY_TARGET,
    ACTIVATION_WITHOUT_ALTERNATING_TARGET,
    ACTIVATION_WITHOUT_TARGET,
    BOTH_ALTERNATIVES_OCCURRED,
    EMPTY_TRACE,
    NO_ALTERNATIVE_OCCURRED,
    OCCURS_WITHOUT_COUNTERPART,
    TARGET_AT_START,
    TARGET_BEFORE_ACTIVATION,
    TRACE_ENDS_WITH_TARGET,
)

from oracles import all_traces

A, B = Activity("a"), Activity("b")


def _con(kind, act=A, tgt=B, cid=0):
    return Constraint(cid, kind, act, tgt)


def test_response_witnesses_map_activations_to_targets():
    """On abacb each a is discharged by the next b, recorded positionally."""
    v = check_direct(_con(TemplateKind.RESPONSE), Trace.from_labels(0, "abacb"))
    assert v.sat
    assert dict(v.witnesses) == {0: 1, 2: 4}
    assert v.failures == ()


def test_response_failure_names_the_position():
    v = check_direct(_con(TemplateKind.RESPONSE), Trace.from_labels(0, "aabcba"))
    assert not v.sat
    assert v.failures == ((5, ACTIVATION_WITHOUT_TARGET),)


def test_alternate_response_flags_first_repeated_activation():
    v = check_direct(
        _con(TemplateKind.ALTERNATE_RESPONSE), Trace.from_labels(0, "aaabc")
    )
    assert not v.sat
    assert (0, ACTIVATION_WITHOUT_ALTERNATING_TARGET) in v.failures


def test_chain_response_requires_immediate_target():
    v = check_direct(_con(TemplateKind.CHAIN_RESPONSE), Trace.from_labels(0, "acb"))
    assert not v.sat
    assert v.failures == ((0, ACTIVATION_NOT_FOLLOWED_BY_TARGET),)


def test_precedence_flags_early_target():
    v = check_direct(_con(TemplateKind.PRECEDENCE), Trace.from_labels(0, "bab"))
    assert not v.sat
    assert v.failures == ((0, TARGET_BEFORE_ACTIVATION),)


def test_chain_precedence_flags_target_at_start():
    v = check_direct(_con(TemplateKind.CHAIN_PRECEDENCE), Trace.from_labels(0, "ba"))
    assert not v.sat
    assert (0, TARGET_AT_START) in v.failures


def test_choice_failure_has_no_position():
    v = check_direct(_con(TemplateKind.CHOICE), Trace.from_labels(0, "www"))
    assert not v.sat
    assert v.failures == ((None, NO_ALTERNATIVE_OCCURRED),)


def test_exclusive_choice_rejects_both():
    v = check_direct(_con(TemplateKind.EXCLUSIVE_CHOICE), Trace.from_labels(0, "ab"))
    assert not v.sat
    assert v.failures == ((None, BOTH_ALTERNATIVES_OCCURRED),)


def test_coexistence_names_the_lonely_side():
    v = check_direct(_con(TemplateKind.COEXISTENCE), Trace.from_labels(0, "awa"))
    assert not v.sat
    assert v.failures == ((0, OCCURS_WITHOUT_COUNTERPART),)


def test_empty_trace_verdicts():
    """Only the two choice templates fail on a trace with no events."""
    empty = Trace(0, ())
    for kind in TemplateKind:
        v = check_direct(_con(kind), empty)
        if kind in (TemplateKind.CHOICE, TemplateKind.EXCLUSIVE_CHOICE):
            assert not v.sat, kind
            assert v.failures == ((None, EMPTY_TRACE),)
        else:
            assert v.sat, kind
            assert v.failures == (), kind


def test_failures_exactly_when_unsat():
    for kind in TemplateKind:
        con = _con(kind)
        for trace in all_traces(("a", "b", "w"), 5):
            v = check_direct(con, trace)
            assert v.sat == (not v.failures), (kind, trace)


def test_agrees_with_formula_on_exhaustive_grid():
    """Scan verdicts equal formula verdicts on every trace up to length 7."""
    for kind in TemplateKind:
        con = _con(kind)
        f = template_formula(kind, A, B)
        for trace in all_traces(("a", "b", "w"), 7):
            assert check_direct(con, trace).sat == eval_tree(f, trace), (kind, trace)


def test_reflexive_response_uses_strict_future():
    """Response(a,a) asks for a later occurrence, so a lone a fails.

    The formula reading G(a -> F a) is vacuously true instead; the two
    backends deliberately part ways when activation and target coincide.
    """
    con = _con(TemplateKind.RESPONSE, A, A)
    assert not check_direct(con, Trace.from_labels(0, "a")).sat
    assert check_direct(con, Trace.from_labels(0, "")).sat
    assert eval_tree(template_formula(TemplateKind.RESPONSE, A, A), Trace.from_labels(0, "a"))


def test_alternate_succession_compat_flag_adds_final_target_rule():
    """TRACE_ENDS_WITH_TARGET only fires under the opt-in flag."""
    con = _con(TemplateKind.ALTERNATE_SUCCESSION)
    trace = Trace.from_labels(0, "ab")
    default = check_direct(con, trace)
    assert default.sat
    strict = check_direct(con, trace, include_last_target_rule=True)
    assert not strict.sat
    assert (1, TRACE_ENDS_WITH_TARGET) in strict.failures


def test_step_counter_is_near_linear():
    """Work stays proportional to trace length plus occurrence count."""
    n = 5000
    labels = ["a" if i % 3 == 0 else ("b" if i % 3 == 1 else "w") for i in range(n)]
    trace = Trace.from_labels(0, labels)
    for kind in TemplateKind:
        v = check_direct(_con(kind), trace)
        assert v.steps <= 4 * n, (kind, v.steps)


def test_witnesses_only_for_response_side_kinds():
    """Kinds with a per-activation obligation pair each activation to a target."""
    trace = Trace.from_labels(0, "abab")
    response_side = (
        TemplateKind.RESPONSE,
        TemplateKind.ALTERNATE_RESPONSE,
        TemplateKind.CHAIN_RESPONSE,
        TemplateKind.SUCCESSION,
        TemplateKind.ALTERNATE_SUCCESSION,
        TemplateKind.CHAIN_SUCCESSION,
    )
    for kind in TemplateKind:
        v = check_direct(_con(kind), trace)
        if kind in response_side:
            assert dict(v.witnesses) == {0: 1, 2: 3}, kind
        else:
            assert dict(v.witnesses) == {}, kind


def test_failures_sorted_with_positionless_last():
    v = check_direct(_con(TemplateKind.SUCCESSION), Trace.from_labels(0, "bwawb"))
    positions = [p for p, _ in v.failures]
    numbered = [p for p in positions if p is not None]
    assert numbered == sorted(numbered)
    if None in positions:
        assert positions.index(None) == len(positions) - 1
