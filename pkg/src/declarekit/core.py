"""Domain model: activities, traces, event logs, and Declare constraints."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

WILDCARD_LABEL = "*"


class Activity:
    """An interned activity label.

    Constructing the same label twice yields the same object, so equality
    and hashing are identity based and cheap; ordering compares labels.
    The wildcard label ``*`` is reserved for automaton transition tables
    and never names an activity.
    """

    __slots__ = ("_label", "_index")

    _pool: dict[str, "Activity"] = {}
    _lock = threading.Lock()

    def __new__(cls, label: str) -> "Activity":
        pool = cls._pool
        hit = pool.get(label)
        if hit is not None:
            return hit
        if not isinstance(label, str) or not label:
            raise ValueError("activity label must be a non-empty string")
        if label == WILDCARD_LABEL:
            raise ValueError('the label "*" is reserved and cannot name an activity')
        with cls._lock:
            hit = pool.get(label)
            if hit is None:
                hit = super().__new__(cls)
                hit._label = label
                hit._index = len(pool)
                pool[label] = hit
        return hit

    @property
    def label(self) -> str:
        return self._label

    @property
    def index(self) -> int:
        """Intern index, assigned in creation order."""
        return self._index

    def __lt__(self, other: "Activity") -> bool:
        return self._label < other._label

    def __le__(self, other: "Activity") -> bool:
        return self._label <= other._label

    def __gt__(self, other: "Activity") -> bool:
        return self._label > other._label

    def __ge__(self, other: "Activity") -> bool:
        return self._label >= other._label

    def __repr__(self) -> str:
        return f"Activity({self._label!r})"

    def __reduce__(self):
        return (Activity, (self._label,))


@dataclass(frozen=True)
class Trace:
    """One case: an identifier plus the finite sequence of its events."""

    id: int
    events: tuple[Activity, ...]

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError("trace id must be non-negative")
        if not isinstance(self.events, tuple):
            object.__setattr__(self, "events", tuple(self.events))

    @classmethod
    def from_labels(cls, id: int, labels: Iterable[str]) -> "Trace":
        return cls(id, tuple(Activity(s) for s in labels))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Activity]:
        return iter(self.events)

    def __getitem__(self, i: int) -> Activity:
        return self.events[i]


class EventLog:
    """An ordered collection of traces with unique ids.

    Empty traces are admitted; the log alphabet is the set of activities
    occurring in at least one trace, exposed sorted by label.
    """

    __slots__ = ("_traces", "_by_id", "_alphabet")

    def __init__(self, traces: Iterable[Trace]):
        tup = tuple(traces)
        by_id: dict[int, Trace] = {}
        for tr in tup:
            if tr.id in by_id:
                raise ValueError(f"duplicate trace id {tr.id}")
            by_id[tr.id] = tr
        self._traces = tup
        self._by_id = by_id
        self._alphabet = tuple(sorted({ev for tr in tup for ev in tr.events}))

    @property
    def traces(self) -> tuple[Trace, ...]:
        return self._traces

    @property
    def alphabet(self) -> tuple[Activity, ...]:
        return self._alphabet

    def get(self, trace_id: int) -> Trace:
        return self._by_id[trace_id]

    def __len__(self) -> int:
        return len(self._traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self._traces)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EventLog) and self._traces == other._traces

    def __hash__(self) -> int:
        return hash(self._traces)

    def __repr__(self) -> str:
        return f"EventLog({len(self._traces)} traces, {len(self._alphabet)} activities)"


class TemplateKind(Enum):
    """The thirteen binary Declare templates.

    The enum value is the display name used in model documents; ``camel``
    is the compact spelling accepted alongside it on the command line.
    """

    CHOICE = "Choice"
    EXCLUSIVE_CHOICE = "Exclusive Choice"
    RESPONDED_EXISTENCE = "Responded Existence"
    COEXISTENCE = "Co-Existence"
    RESPONSE = "Response"
    PRECEDENCE = "Precedence"
    ALTERNATE_RESPONSE = "Alternate Response"
    ALTERNATE_PRECEDENCE = "Alternate Precedence"
    CHAIN_RESPONSE = "Chain Response"
    CHAIN_PRECEDENCE = "Chain Precedence"
    SUCCESSION = "Succession"
    ALTERNATE_SUCCESSION = "Alternate Succession"
    CHAIN_SUCCESSION = "Chain Succession"

    @property
    def label(self) -> str:
        return self.value

    @property
    def camel(self) -> str:
        return _CAMEL[self]

    @classmethod
    def from_name(cls, name: str) -> "TemplateKind":
        """Resolve a display name or camel-case name to a kind."""
        kind = _BY_NAME.get(name)
        if kind is None:
            valid = ", ".join(k.camel for k in cls)
            raise ValueError(f"unknown template name {name!r}; valid names: {valid}")
        return kind


_CAMEL: dict[TemplateKind, str] = {
    TemplateKind.CHOICE: "Choice",
    TemplateKind.EXCLUSIVE_CHOICE: "ExclusiveChoice",
    TemplateKind.RESPONDED_EXISTENCE: "RespondedExistence",
    TemplateKind.COEXISTENCE: "Coexistence",
    TemplateKind.RESPONSE: "Response",
    TemplateKind.PRECEDENCE: "Precedence",
    TemplateKind.ALTERNATE_RESPONSE: "AlternateResponse",
    TemplateKind.ALTERNATE_PRECEDENCE: "AlternatePrecedence",
    TemplateKind.CHAIN_RESPONSE: "ChainResponse",
    TemplateKind.CHAIN_PRECEDENCE: "ChainPrecedence",
    TemplateKind.SUCCESSION: "Succession",
    TemplateKind.ALTERNATE_SUCCESSION: "AlternateSuccession",
    TemplateKind.CHAIN_SUCCESSION: "ChainSuccession",
}

_BY_NAME: dict[str, TemplateKind] = {}
for _k in TemplateKind:
    _BY_NAME[_k.value] = _k
    _BY_NAME[_CAMEL[_k]] = _k


@dataclass(frozen=True)
class Constraint:
    """A template instantiated with a concrete activation and target."""

    id: int
    kind: TemplateKind
    activation: Activity
    target: Activity

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError("constraint id must be non-negative")


class DeclareModel:
    """A set of constraints with unique ids, kept in declaration order."""

    __slots__ = ("_constraints", "_by_id")

    def __init__(self, constraints: Iterable[Constraint]):
        tup = tuple(constraints)
        by_id: dict[int, Constraint] = {}
        for c in tup:
            if c.id in by_id:
                raise ValueError(f"duplicate constraint id {c.id}")
            by_id[c.id] = c
        self._constraints = tup
        self._by_id = by_id

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return self._constraints

    def get(self, constraint_id: int) -> Constraint:
        return self._by_id[constraint_id]

    def __len__(self) -> int:
        return len(self._constraints)

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self._constraints)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DeclareModel) and self._constraints == other._constraints

    def __repr__(self) -> str:
        return f"DeclareModel({len(self._constraints)} constraints)"
