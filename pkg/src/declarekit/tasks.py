"""Log-level analysis tasks: conformance checking and query checking.

Three interchangeable backends produce identical verdicts whenever a
constraint's activation and target differ: positional rules (direct),
formula evaluation (tree), and compiled automata (dfa). Supports are
exact rationals over the number of traces.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .automata import template_dfa
from .core import Activity, Constraint, DeclareModel, EventLog, TemplateKind, Trace
from .direct import check_direct
from .ltlf import eval_tree, template_formula


class Backend(Enum):
    """Evaluation strategy; all agree when activation differs from target."""

    DIRECT = "direct"
    TREE = "tree"
    DFA = "dfa"

    @classmethod
    def from_name(cls, name: str) -> "Backend":
        for b in cls:
            if b.value == name:
                return b
        valid = ", ".join(b.value for b in cls)
        raise ValueError(f"unknown backend {name!r}; valid backends: {valid}")


class EmptyLogError(ValueError):
    """Raised for tasks whose result is undefined on a log with no traces."""


def make_checker(constraint: Constraint, backend: Backend) -> Callable[[Trace], bool]:
    """Bind a constraint to one backend, precompiling what the backend needs."""
    if backend is Backend.DIRECT:
        return lambda trace: check_direct(constraint, trace).sat
    if backend is Backend.TREE:
        formula = template_formula(constraint.kind, constraint.activation, constraint.target)
        return lambda trace: eval_tree(formula, trace)
    if backend is Backend.DFA:
        dfa = template_dfa(constraint.kind, constraint.activation, constraint.target)
        return lambda trace: dfa.accepts(trace.events)
    raise ValueError(f"unhandled backend {backend!r}")


@dataclass(frozen=True)
class CheckReport:
    """Conformance result: per-(trace, constraint) verdicts plus rollups.

    `matrix` maps (trace id, constraint id) to satisfaction; `compliant`
    holds ids of traces satisfying every constraint; `supports` maps each
    constraint id to its exact satisfaction rate over the log.
    """

    backend: Backend
    trace_ids: tuple[int, ...]
    constraint_ids: tuple[int, ...]
    matrix: Mapping[tuple[int, int], bool]
    compliant: frozenset[int]
    supports: Mapping[int, Fraction]


def _map_traces(fn, traces: Sequence[Trace], threads: int | None):
    if threads is not None and threads > 1 and len(traces) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, traces))
    return [fn(tr) for tr in traces]


def conformance_check(
    log: EventLog,
    model: DeclareModel,
    backend: Backend = Backend.DIRECT,
    *,
    threads: int | None = 1,
) -> CheckReport:
    """Check every trace against every constraint.

    Results are merged in trace order, so the report does not depend on
    the number of worker threads.
    """
    checkers = [(c.id, make_checker(c, backend)) for c in model.constraints]

    def check_one(trace: Trace) -> tuple[bool, ...]:
        return tuple(fn(trace) for _, fn in checkers)

    rows = _map_traces(check_one, log.traces, threads)

    matrix: dict[tuple[int, int], bool] = {}
    compliant = []
    sat_counts = {cid: 0 for cid, _ in checkers}
    for trace, row in zip(log.traces, rows):
        for (cid, _), ok in zip(checkers, row):
            matrix[(trace.id, cid)] = ok
            if ok:
                sat_counts[cid] += 1
        if all(row):
            compliant.append(trace.id)

    n = len(log)
    supports = {
        cid: (Fraction(sat_counts[cid], n) if n else Fraction(0)) for cid, _ in checkers
    }
    return CheckReport(
        backend=backend,
        trace_ids=tuple(tr.id for tr in log.traces),
        constraint_ids=tuple(cid for cid, _ in checkers),
        matrix=matrix,
        compliant=frozenset(compliant),
        supports=supports,
    )


def support(constraint: Constraint, log: EventLog, backend: Backend = Backend.DIRECT) -> Fraction:
    """Fraction of traces satisfying the constraint; undefined on empty logs."""
    if len(log) == 0:
        raise EmptyLogError("support is undefined on an empty log")
    fn = make_checker(constraint, backend)
    hits = sum(1 for tr in log.traces if fn(tr))
    return Fraction(hits, len(log))


# --------------------------------------------------------------------------
# Query checking

@dataclass(frozen=True)
class Variable:
    """A query placeholder; rendered as ?name."""

    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __str__(self) -> str:
        return f"?{self.name}"


Slot = Activity | Variable


@dataclass(frozen=True)
class QueryTerm:
    """One template whose argument slots may hold activities or variables."""

    kind: TemplateKind
    activation: Slot
    target: Slot


@dataclass(frozen=True)
class Query:
    """A conjunctive query: every term must hold for a binding to count.

    `domains` restricts candidate activities per variable; variables
    without an entry range over the whole log alphabet.
    """

    terms: tuple[QueryTerm, ...]
    domains: Mapping[Variable, tuple[Activity, ...]] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("query needs at least one term")
        if self.domains is None:
            object.__setattr__(self, "domains", {})

    def variables(self) -> tuple[Variable, ...]:
        seen = {
            slot.name: slot
            for term in self.terms
            for slot in (term.activation, term.target)
            if isinstance(slot, Variable)
        }
        return tuple(seen[name] for name in sorted(seen))


@dataclass(frozen=True)
class QueryAnswer:
    binding: Mapping[Variable, Activity]
    support: Fraction


def query_check(
    query: Query,
    log: EventLog,
    threshold,
    backend: Backend = Backend.DIRECT,
    *,
    early_abort: bool = True,
) -> list[QueryAnswer]:
    """All bindings whose instantiated terms reach the support threshold.

    The threshold is a rational in (0, 1]; a binding is kept when at most
    floor((1 - threshold) * |log|) traces violate its instantiation,
    which is exactly support >= threshold. With `early_abort`, bindings
    are dropped as soon as the violation budget is exceeded; the answer
    list is unaffected. Answers come sorted by descending support, then
    by binding labels in variable-name order.
    """
    s = Fraction(threshold)
    if not (0 < s <= 1):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if len(log) == 0:
        raise EmptyLogError("query checking is undefined on an empty log")

    variables = query.variables()
    domains = []
    for v in variables:
        domain = tuple(query.domains.get(v, log.alphabet))
        if not domain:
            raise ValueError(f"empty domain for variable {v}")
        domains.append(domain)

    n = len(log)
    max_violations = math.floor((1 - s) * n)
    answers: list[QueryAnswer] = []

    for combo in itertools.product(*domains):
        binding = dict(zip(variables, combo))

        def fill(slot: Slot) -> Activity:
            return binding[slot] if isinstance(slot, Variable) else slot

        checkers = [
            make_checker(
                Constraint(i, term.kind, fill(term.activation), fill(term.target)),
                backend,
            )
            for i, term in enumerate(query.terms)
        ]
        violations = 0
        for trace in log.traces:
            if not all(fn(trace) for fn in checkers):
                violations += 1
                if early_abort and violations > max_violations:
                    break
        if violations <= max_violations:
            answers.append(
                QueryAnswer(binding=binding, support=Fraction(n - violations, n))
            )

    answers.sort(
        key=lambda ans: (
            -ans.support,
            tuple(ans.binding[v].label for v in variables),
        )
    )
    return answers
