"""Cross-validation of the three checking backends against each other.

Every template is evaluated by positional rules, by formula evaluation,
and by its compiled automaton over the same traces; any split verdict is
returned as a replayable disagreement. The trace alphabet is {a, b, w}:
a and b carry the activation and target roles, and w stands for every
activity outside the constraint (one extra symbol is enough, since
unnamed activities are interchangeable to all three backends).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .automata import Dfa, template_dfa
from .core import Activity, Constraint, EventLog, TemplateKind, Trace
from .direct import check_direct
from .ingest import write_factlog
from .ltlf import Formula, eval_tree, template_formula

ALL_KINDS: tuple[TemplateKind, ...] = tuple(TemplateKind)


@dataclass(frozen=True)
class Disagreement:
    """One trace on which the backends split, with a replayable form."""

    kind: TemplateKind
    trace: Trace
    verdicts: Mapping[str, bool]
    factlog: str

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.camel,
            "trace": [a.label for a in self.trace.events],
            "verdicts": dict(self.verdicts),
            "factlog": self.factlog,
        }


_Kit = tuple[TemplateKind, Constraint, Formula, Dfa]


def _kits(kinds: Iterable[TemplateKind]) -> list[_Kit]:
    act, tgt = Activity("a"), Activity("b")
    kits: list[_Kit] = []
    for kind in kinds:
        constraint = Constraint(0, kind, act, tgt)
        formula = template_formula(kind, act, tgt)
        dfa = template_dfa(kind, act, tgt)
        kits.append((kind, constraint, formula, dfa))
    return kits


def _compare(events: tuple[Activity, ...], kits: Sequence[_Kit], out: list[Disagreement]) -> None:
    trace = Trace(0, events)
    for kind, constraint, formula, dfa in kits:
        d = check_direct(constraint, trace).sat
        t = eval_tree(formula, trace)
        f = dfa.accepts(events)
        if d is not t or t is not f:
            out.append(
                Disagreement(
                    kind=kind,
                    trace=trace,
                    verdicts={"direct": d, "tree": t, "dfa": f},
                    factlog=write_factlog(EventLog([trace])),
                )
            )


def exhaustive_check(
    kinds: Iterable[TemplateKind] | None = None,
    max_len: int = 10,
) -> list[Disagreement]:
    """Compare the backends on every trace over {a, b, w} up to max_len.

    Traces are visited by length, then lexicographically in (a, b, w)
    order, so the disagreement list has a canonical order. max_len=0
    checks only the empty trace.
    """
    kits = _kits(ALL_KINDS if kinds is None else kinds)
    symbols = (Activity("a"), Activity("b"), Activity("w"))
    out: list[Disagreement] = []
    for length in range(max_len + 1):
        for events in itertools.product(symbols, repeat=length):
            _compare(events, kits, out)
    return out


def random_check(
    kinds: Iterable[TemplateKind] | None = None,
    n_samples: int = 100_000,
    max_len: int = 20,
    seed: int = 0,
) -> list[Disagreement]:
    """Compare the backends on seeded random traces over {a, b, w}.

    Lengths are uniform on 0..max_len and symbols uniform, so longer
    traces than the exhaustive sweep can reach are still exercised
    deterministically.
    """
    kits = _kits(ALL_KINDS if kinds is None else kinds)
    symbols = (Activity("a"), Activity("b"), Activity("w"))
    rng = random.Random(seed)
    out: list[Disagreement] = []
    for _ in range(n_samples):
        length = rng.randint(0, max_len)
        events = tuple(rng.choice(symbols) for _ in range(length))
        _compare(events, kits, out)
    return out
