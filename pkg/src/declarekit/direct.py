"""Direct constraint checking by positional occurrence scans.

Each template gets a dedicated rule over activation and target positions:
no formula evaluation, no automaton, just ordered index walks. Verdicts
carry failure positions with reason tags plus, for response-like kinds,
a witness map from each activation to the position discharging it.
Out-of-range bounds (before the first or after the last position) are
explicit None values rather than sentinel integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .core import Activity, Constraint, TemplateKind, Trace
from .ltlf import ev_empty, template_formula

# Reason tags, stable for report consumers.
ACTIVATION_WITHOUT_TARGET = "activation_without_target"
ACTIVATION_WITHOUT_ALTERNATING_TARGET = "activation_without_alternating_target"
ACTIVATION_NOT_FOLLOWED_BY_TARGET = "activation_not_followed_by_target"
TARGET_BEFORE_ACTIVATION = "target_before_activation"
TARGET_WITHOUT_ACTIVATION = "target_without_activation"
REPEATED_TARGET_WITHOUT_ACTIVATION = "repeated_target_without_activation"
TARGET_WITHOUT_ALTERNATING_ACTIVATION = "target_without_alternating_activation"
TARGET_NOT_PRECEDED_BY_ACTIVATION = "target_not_preceded_by_activation"
TARGET_AT_START = "target_at_start"
TRACE_ENDS_WITH_TARGET = "trace_ends_with_target"
NO_ALTERNATIVE_OCCURRED = "no_alternative_occurred"
BOTH_ALTERNATIVES_OCCURRED = "both_alternatives_occurred"
OCCURS_WITHOUT_COUNTERPART = "occurs_without_counterpart"
EMPTY_TRACE = "empty_trace"

Failure = tuple[int | None, str]


@dataclass(frozen=True)
class DirectVerdict:
    """Outcome of one constraint on one trace.

    `failures` is empty exactly when `sat` holds; positions are None for
    whole-trace conditions. `witnesses` maps each discharged activation
    position to its witness position. `steps` counts scan iterations,
    which stay linear in trace length plus occurrence count.
    """

    sat: bool
    failures: tuple[Failure, ...]
    witnesses: Mapping[int, int]
    steps: int = field(default=0, compare=False)


def _positions(events: tuple[Activity, ...], act: Activity) -> list[int]:
    return [t for t, ev in enumerate(events) if ev is act]


def _response(events, act_pos, tgt_pos, failures, witnesses) -> int:
    """Every activation needs the target strictly later."""
    steps = 0
    j = 0
    m = len(tgt_pos)
    for t in act_pos:
        steps += 1
        while j < m and tgt_pos[j] <= t:
            j += 1
            steps += 1
        if j < m:
            witnesses[t] = tgt_pos[j]
        else:
            failures.append((t, ACTIVATION_WITHOUT_TARGET))
    return steps


def _alternate_response(events, act_pos, tgt_pos, failures, witnesses) -> int:
    """Every activation needs the target before the next activation."""
    steps = 0
    j = 0
    m = len(tgt_pos)
    for i, t in enumerate(act_pos):
        steps += 1
        nxt = act_pos[i + 1] if i + 1 < len(act_pos) else None
        while j < m and tgt_pos[j] <= t:
            j += 1
            steps += 1
        if j < m and (nxt is None or tgt_pos[j] < nxt):
            witnesses[t] = tgt_pos[j]
        else:
            failures.append((t, ACTIVATION_WITHOUT_ALTERNATING_TARGET))
    return steps


def _chain_response(events, act_pos, tgt, failures, witnesses) -> int:
    """Every activation needs the target at the very next position."""
    n = len(events)
    for t in act_pos:
        if t + 1 < n and events[t + 1] is tgt:
            witnesses[t] = t + 1
        else:
            failures.append((t, ACTIVATION_NOT_FOLLOWED_BY_TARGET))
    return len(act_pos)


def _precedence(act_pos, tgt_pos, failures) -> int:
    """No target before the first activation; targets need some activation."""
    steps = 0
    if not tgt_pos:
        return steps
    if not act_pos:
        for t in tgt_pos:
            failures.append((t, TARGET_WITHOUT_ACTIVATION))
            steps += 1
        return steps
    first_act = act_pos[0]
    for t in tgt_pos:
        steps += 1
        if t < first_act:
            failures.append((t, TARGET_BEFORE_ACTIVATION))
        else:
            break
    return steps


def _alternate_precedence(act_pos, tgt_pos, failures) -> int:
    """Precedence plus: consecutive targets enclose at least one activation.

    The enclosure test counts activations in the closed interval between
    the two target positions, so a shared activation/target activity can
    never trigger it (the endpoints themselves count).
    """
    steps = _precedence(act_pos, tgt_pos, failures)
    j = 0
    m = len(act_pos)
    for prev, cur in zip(tgt_pos, tgt_pos[1:]):
        steps += 1
        while j < m and act_pos[j] < prev:
            j += 1
            steps += 1
        if j >= m or act_pos[j] > cur:
            failures.append((cur, REPEATED_TARGET_WITHOUT_ACTIVATION))
    return steps


def _alt_succession_precedence(act_pos, tgt_pos, failures) -> int:
    """Each target needs an activation after the previous target."""
    steps = 0
    j = 0
    m = len(act_pos)
    prev_tgt: int | None = None
    for t in tgt_pos:
        steps += 1
        while j < m and (prev_tgt is not None and act_pos[j] <= prev_tgt):
            j += 1
            steps += 1
        if j >= m or act_pos[j] >= t:
            failures.append((t, TARGET_WITHOUT_ALTERNATING_ACTIVATION))
        prev_tgt = t
    return steps


def _chain_precedence(events, act, tgt_pos, failures) -> int:
    """Every target sits right after an activation; none may open the trace."""
    for t in tgt_pos:
        if t == 0:
            failures.append((0, TARGET_AT_START))
        elif events[t - 1] is not act:
            failures.append((t, TARGET_NOT_PRECEDED_BY_ACTIVATION))
    return len(tgt_pos)


def check_direct(
    constraint: Constraint,
    trace: Trace,
    *,
    include_last_target_rule: bool = False,
) -> DirectVerdict:
    """Evaluate one constraint on one trace by positional rules.

    `include_last_target_rule` enables a stricter AlternateSuccession
    reading under which a trace ending with the target is rejected; it is
    off by default because the default semantics match the other two
    backends exactly.
    """
    events = trace.events
    kind = constraint.kind
    act = constraint.activation
    tgt = constraint.target
    K = TemplateKind

    if not events:
        sat = ev_empty(template_formula(kind, act, tgt))
        failures = () if sat else ((None, EMPTY_TRACE),)
        return DirectVerdict(sat=sat, failures=failures, witnesses={}, steps=0)

    act_pos = _positions(events, act)
    tgt_pos = _positions(events, tgt)
    steps = 2 * len(events)
    failures: list[Failure] = []
    witnesses: dict[int, int] = {}

    if kind is K.RESPONSE:
        steps += _response(events, act_pos, tgt_pos, failures, witnesses)
    elif kind is K.ALTERNATE_RESPONSE:
        steps += _alternate_response(events, act_pos, tgt_pos, failures, witnesses)
    elif kind is K.CHAIN_RESPONSE:
        steps += _chain_response(events, act_pos, tgt, failures, witnesses)
    elif kind is K.PRECEDENCE:
        steps += _precedence(act_pos, tgt_pos, failures)
    elif kind is K.ALTERNATE_PRECEDENCE:
        steps += _alternate_precedence(act_pos, tgt_pos, failures)
    elif kind is K.CHAIN_PRECEDENCE:
        steps += _chain_precedence(events, act, tgt_pos, failures)
    elif kind is K.SUCCESSION:
        steps += _response(events, act_pos, tgt_pos, failures, witnesses)
        steps += _precedence(act_pos, tgt_pos, failures)
    elif kind is K.ALTERNATE_SUCCESSION:
        steps += _alternate_response(events, act_pos, tgt_pos, failures, witnesses)
        steps += _alt_succession_precedence(act_pos, tgt_pos, failures)
        if include_last_target_rule and events[-1] is tgt:
            failures.append((len(events) - 1, TRACE_ENDS_WITH_TARGET))
    elif kind is K.CHAIN_SUCCESSION:
        steps += _chain_response(events, act_pos, tgt, failures, witnesses)
        steps += _chain_precedence(events, act, tgt_pos, failures)
    elif kind is K.CHOICE:
        if not act_pos and not tgt_pos:
            failures.append((None, NO_ALTERNATIVE_OCCURRED))
    elif kind is K.EXCLUSIVE_CHOICE:
        if act_pos and tgt_pos:
            failures.append((None, BOTH_ALTERNATIVES_OCCURRED))
        elif not act_pos and not tgt_pos:
            failures.append((None, NO_ALTERNATIVE_OCCURRED))
    elif kind is K.RESPONDED_EXISTENCE:
        if act_pos and not tgt_pos:
            failures.append((act_pos[0], ACTIVATION_WITHOUT_TARGET))
    elif kind is K.COEXISTENCE:
        if act_pos and not tgt_pos:
            failures.append((act_pos[0], OCCURS_WITHOUT_COUNTERPART))
        elif tgt_pos and not act_pos:
            failures.append((tgt_pos[0], OCCURS_WITHOUT_COUNTERPART))
    else:
        raise ValueError(f"unhandled template kind {kind!r}")

    failures.sort(key=lambda fl: (fl[0] is None, fl[0] if fl[0] is not None else 0, fl[1]))
    return DirectVerdict(
        sat=not failures,
        failures=tuple(failures),
        witnesses=witnesses,
        steps=steps,
    )
