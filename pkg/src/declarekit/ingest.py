"""Reading and writing logs, models, queries, and reports.

Fact documents (logs, models, queries) share one grammar: a sequence of
facts `name(arg, ...).` where arguments are integers, identifiers,
quoted labels, or one-level calls like var(y). Identifiers starting with
a lowercase letter are written bare; anything else is quoted. The
wildcard label "*" is rejected everywhere. XES support covers the
concept:name subset, gzipped or plain; CSV carries case_id, activity,
and an optional position column.
"""

from __future__ import annotations

import csv
import gzip
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable
from xml.etree import ElementTree

from .core import Activity, Constraint, DeclareModel, EventLog, TemplateKind, Trace
from .tasks import CheckReport, Query, QueryTerm, Variable


class IngestError(ValueError):
    """Malformed input document; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# --------------------------------------------------------------------------
# Fact documents

@dataclass(frozen=True)
class _Fact:
    name: str
    args: tuple
    line: int


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"-?\d+")
_QUOTED_RE = re.compile(r'"(?:[^"\\]|\\.)*"')
_WS_RE = re.compile(r"(?:\s+|%[^\n]*)+")


def _unescape(tok: str) -> str:
    return tok[1:-1].replace('\\"', '"').replace("\\\\", "\\")


class _FactScanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def line(self, pos: int | None = None) -> int:
        return self.text.count("\n", 0, self.pos if pos is None else pos) + 1

    def skip_ws(self) -> None:
        m = _WS_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()

    def error(self, message: str) -> IngestError:
        return IngestError(message, self.line())

    def expect(self, ch: str) -> None:
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def term(self):
        m = _QUOTED_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return ("quoted", _unescape(m.group()))
        m = _INT_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return int(m.group())
        m = _NAME_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            self.pos = m.end()
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == "(":
                self.pos += 1
                self.skip_ws()
                inner = self.term()
                self.skip_ws()
                self.expect(")")
                return ("call", name, inner)
            return ("ident", name)
        raise self.error("expected an argument")

    def facts(self) -> list[_Fact]:
        out = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                return out
            start = self.pos
            m = _NAME_RE.match(self.text, self.pos)
            if not m:
                raise self.error(f"expected a fact name, found {self.text[self.pos]!r}")
            name = m.group()
            self.pos = m.end()
            self.skip_ws()
            self.expect("(")
            args = []
            while True:
                self.skip_ws()
                args.append(self.term())
                self.skip_ws()
                if self.pos < len(self.text) and self.text[self.pos] == ",":
                    self.pos += 1
                    continue
                break
            self.expect(")")
            self.skip_ws()
            self.expect(".")
            out.append(_Fact(name, tuple(args), self.line(start)))


def _as_activity(arg, line: int) -> Activity:
    if isinstance(arg, tuple) and arg[0] in ("ident", "quoted"):
        try:
            return Activity(arg[1])
        except ValueError as exc:
            raise IngestError(str(exc), line) from None
    raise IngestError("expected an activity name", line)


def _as_int(arg, line: int) -> int:
    if not isinstance(arg, int):
        raise IngestError("expected an integer", line)
    return arg


# --------------------------------------------------------------------------
# Event logs as trace/3 facts

def parse_factlog(text: str) -> EventLog:
    """Parse trace(Id, Position, Activity) facts into an event log.

    Positions of each trace must be exactly 0..len-1 with no repeats;
    traces come out ordered by id.
    """
    by_trace: dict[int, dict[int, Activity]] = {}
    lines: dict[int, int] = {}
    for fact in _FactScanner(text).facts():
        if fact.name != "trace" or len(fact.args) != 3:
            raise IngestError(f"expected trace/3 facts, found {fact.name}/{len(fact.args)}", fact.line)
        tid = _as_int(fact.args[0], fact.line)
        pos = _as_int(fact.args[1], fact.line)
        act = _as_activity(fact.args[2], fact.line)
        if tid < 0 or pos < 0:
            raise IngestError("trace id and position must be non-negative", fact.line)
        slots = by_trace.setdefault(tid, {})
        if pos in slots:
            raise IngestError(f"trace {tid} repeats position {pos}", fact.line)
        slots[pos] = act
        lines[tid] = fact.line
    traces = []
    for tid in sorted(by_trace):
        slots = by_trace[tid]
        missing = [p for p in range(len(slots)) if p not in slots]
        if missing:
            raise IngestError(
                f"trace {tid} is missing position {missing[0]}", lines[tid]
            )
        traces.append(Trace(tid, tuple(slots[p] for p in range(len(slots)))))
    return EventLog(traces)


_BARE_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _fact_name(label: str) -> str:
    if _BARE_RE.match(label):
        return label
    escaped = label.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def write_factlog(log: EventLog) -> str:
    """One trace/3 fact per line, trace ids then positions ascending.

    A trace with no events has no fact to carry it, so such logs are
    refused rather than silently thinned.
    """
    out = []
    for trace in sorted(log.traces, key=lambda tr: tr.id):
        if not trace.events:
            raise IngestError(f"trace {trace.id} has no events; fact form cannot hold it")
        for pos, act in enumerate(trace.events):
            out.append(f"trace({trace.id},{pos},{_fact_name(act.label)}).")
    return "\n".join(out) + ("\n" if out else "")


# --------------------------------------------------------------------------
# Declare models as constraint/2 + bind/3 facts

def parse_model(text: str) -> DeclareModel:
    """Parse constraint(Id,"Kind") and bind(Id,arg_0/arg_1,Activity) facts."""
    kinds: dict[int, TemplateKind] = {}
    binds: dict[int, dict[str, Activity]] = {}
    order: list[int] = []
    lines: dict[int, int] = {}
    for fact in _FactScanner(text).facts():
        if fact.name == "constraint" and len(fact.args) == 2:
            cid = _as_int(fact.args[0], fact.line)
            arg = fact.args[1]
            if not (isinstance(arg, tuple) and arg[0] == "quoted"):
                raise IngestError("template name must be quoted", fact.line)
            try:
                kind = TemplateKind.from_name(arg[1])
            except ValueError as exc:
                raise IngestError(str(exc), fact.line) from None
            if cid in kinds:
                raise IngestError(f"constraint {cid} declared twice", fact.line)
            kinds[cid] = kind
            order.append(cid)
            lines[cid] = fact.line
        elif fact.name == "bind" and len(fact.args) == 3:
            cid = _as_int(fact.args[0], fact.line)
            slot = fact.args[1]
            if not (isinstance(slot, tuple) and slot[0] == "ident" and slot[1] in ("arg_0", "arg_1")):
                raise IngestError("bind slot must be arg_0 or arg_1", fact.line)
            act = _as_activity(fact.args[2], fact.line)
            per = binds.setdefault(cid, {})
            if slot[1] in per:
                raise IngestError(f"constraint {cid} binds {slot[1]} twice", fact.line)
            per[slot[1]] = act
        else:
            raise IngestError(
                f"expected constraint/2 or bind/3 facts, found {fact.name}/{len(fact.args)}",
                fact.line,
            )
    constraints = []
    for cid in order:
        per = binds.get(cid, {})
        for slot in ("arg_0", "arg_1"):
            if slot not in per:
                raise IngestError(f"constraint {cid} is missing a bind for {slot}", lines[cid])
        constraints.append(Constraint(cid, kinds[cid], per["arg_0"], per["arg_1"]))
    for cid in binds:
        if cid not in kinds:
            raise IngestError(f"bind facts for undeclared constraint {cid}")
    return DeclareModel(constraints)


def write_model(model: DeclareModel) -> str:
    out = []
    for c in model.constraints:
        out.append(f'constraint({c.id},"{c.kind.label}").')
        out.append(f"bind({c.id},arg_0,{_fact_name(c.activation.label)}).")
        out.append(f"bind({c.id},arg_1,{_fact_name(c.target.label)}).")
    return "\n".join(out) + ("\n" if out else "")


# --------------------------------------------------------------------------
# Queries: bind/3 for fixed slots, var_bind/3 for variables, domain/2 limits

def parse_query(text: str) -> Query:
    """Parse a query document.

    Example:
        constraint(0,"Response"). bind(0,arg_0,a). var_bind(0,arg_1,var(y)).
        domain(var(y),b). domain(var(y),d).
    """
    kinds: dict[int, TemplateKind] = {}
    slots: dict[int, dict[str, Activity | Variable]] = {}
    domains: dict[Variable, list[Activity]] = {}
    order: list[int] = []
    lines: dict[int, int] = {}

    def slot_name(arg, line):
        if isinstance(arg, tuple) and arg[0] == "ident" and arg[1] in ("arg_0", "arg_1"):
            return arg[1]
        raise IngestError("bind slot must be arg_0 or arg_1", line)

    def variable(arg, line):
        if isinstance(arg, tuple) and arg[0] == "call" and arg[1] == "var":
            inner = arg[2]
            if isinstance(inner, tuple) and inner[0] in ("ident", "quoted"):
                return Variable(inner[1])
        raise IngestError("expected var(Name)", line)

    for fact in _FactScanner(text).facts():
        if fact.name == "constraint" and len(fact.args) == 2:
            cid = _as_int(fact.args[0], fact.line)
            arg = fact.args[1]
            if not (isinstance(arg, tuple) and arg[0] == "quoted"):
                raise IngestError("template name must be quoted", fact.line)
            try:
                kinds[cid] = TemplateKind.from_name(arg[1])
            except ValueError as exc:
                raise IngestError(str(exc), fact.line) from None
            order.append(cid)
            lines[cid] = fact.line
        elif fact.name == "bind" and len(fact.args) == 3:
            cid = _as_int(fact.args[0], fact.line)
            name = slot_name(fact.args[1], fact.line)
            per = slots.setdefault(cid, {})
            if name in per:
                raise IngestError(f"constraint {cid} fills {name} twice", fact.line)
            per[name] = _as_activity(fact.args[2], fact.line)
        elif fact.name == "var_bind" and len(fact.args) == 3:
            cid = _as_int(fact.args[0], fact.line)
            name = slot_name(fact.args[1], fact.line)
            per = slots.setdefault(cid, {})
            if name in per:
                raise IngestError(f"constraint {cid} fills {name} twice", fact.line)
            per[name] = variable(fact.args[2], fact.line)
        elif fact.name == "domain" and len(fact.args) == 2:
            var = variable(fact.args[0], fact.line)
            domains.setdefault(var, []).append(_as_activity(fact.args[1], fact.line))
        else:
            raise IngestError(
                "expected constraint/2, bind/3, var_bind/3 or domain/2 facts",
                fact.line,
            )

    terms = []
    for cid in order:
        per = slots.get(cid, {})
        for name in ("arg_0", "arg_1"):
            if name not in per:
                raise IngestError(f"constraint {cid} leaves {name} unfilled", lines[cid])
        terms.append(QueryTerm(kinds[cid], per["arg_0"], per["arg_1"]))
    if not terms:
        raise IngestError("query declares no constraints")
    return Query(terms=tuple(terms), domains={v: tuple(acts) for v, acts in domains.items()})


# --------------------------------------------------------------------------
# XES (concept:name subset)

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(source) -> EventLog:
    """Parse a XES document from a path, file object, or XML text.

    Only event concept:name attributes are read; trace ids follow
    document order. Paths ending in .gz are transparently decompressed.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source) and Path(source).exists():
        path = Path(source)
        opener = gzip.open if path.name.endswith(".gz") else open
        with opener(path, "rb") as fh:
            data = fh.read()
    elif hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ElementTree.fromstring(data)
    except ElementTree.ParseError as exc:
        raise IngestError(f"malformed XES document: {exc}") from None
    if _local(root.tag) != "log":
        raise IngestError(f"expected a <log> root element, found <{_local(root.tag)}>")

    traces = []
    tid = 0
    for child in root:
        if _local(child.tag) != "trace":
            continue
        events = []
        for idx, node in enumerate(el for el in child if _local(el.tag) == "event"):
            label = None
            for attr in node:
                if _local(attr.tag) == "string" and attr.get("key") == "concept:name":
                    label = attr.get("value")
                    break
            if label is None:
                raise IngestError(f"trace {tid} event {idx} has no concept:name")
            try:
                events.append(Activity(label))
            except ValueError as exc:
                raise IngestError(f"trace {tid} event {idx}: {exc}") from None
        traces.append(Trace(tid, tuple(events)))
        tid += 1
    return EventLog(traces)


def write_xes(log: EventLog) -> str:
    def esc(s: str) -> str:
        return (
            s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
        )

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<log xes.version="1.0" xmlns="http://www.xes-standard.org/">',
    ]
    for trace in log.traces:
        out.append("  <trace>")
        out.append(f'    <string key="concept:name" value="{trace.id}"/>')
        for act in trace.events:
            out.append("    <event>")
            out.append(f'      <string key="concept:name" value="{esc(act.label)}"/>')
            out.append("    </event>")
        out.append("  </trace>")
    out.append("</log>")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# CSV

def parse_csv(source, has_position_column: bool | None = None) -> EventLog:
    """Parse case_id/activity[/position] rows.

    Rows are grouped by case id; numeric ids are kept, otherwise ids
    become 0.. in first-appearance order. With a position column, rows
    may arrive shuffled and are ordered by their positions, which must
    not repeat within a case.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source) and Path(source).exists():
        text = Path(source).read_text(encoding="utf-8")
    elif hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise IngestError("empty CSV document")
    header = rows[0]
    if header[:2] != ["case_id", "activity"]:
        raise IngestError("CSV header must start with case_id,activity", 1)
    with_pos = len(header) >= 3 and header[2] == "position"
    if has_position_column is not None and has_position_column != with_pos:
        raise IngestError("CSV header does not match the expected position column", 1)

    cases: dict[str, list[tuple[int | None, Activity]]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        expected = 3 if with_pos else 2
        if len(row) != expected:
            raise IngestError(f"expected {expected} columns, found {len(row)}", lineno)
        case = row[0]
        if not case:
            raise IngestError("empty case id", lineno)
        try:
            act = Activity(row[1])
        except ValueError as exc:
            raise IngestError(str(exc), lineno) from None
        pos: int | None = None
        if with_pos:
            try:
                pos = int(row[2])
            except ValueError:
                raise IngestError(f"bad position {row[2]!r}", lineno) from None
        cases.setdefault(case, []).append((pos, act))

    try:
        ids = [int(case) for case in cases]
        if any(i < 0 for i in ids):
            raise ValueError
    except ValueError:
        ids = list(range(len(cases)))
    if len(set(ids)) != len(ids):
        raise IngestError("case ids collide once read as numbers")

    traces = []
    for tid, (case, entries) in zip(ids, cases.items()):
        if with_pos:
            positions = [p for p, _ in entries]
            if len(set(positions)) != len(positions):
                raise IngestError(f"case {case!r} repeats a position")
            entries = sorted(entries, key=lambda e: e[0])
        traces.append(Trace(tid, tuple(act for _, act in entries)))
    traces.sort(key=lambda tr: tr.id)
    return EventLog(traces)


def write_csv(log: EventLog) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["case_id", "activity", "position"])
    for trace in log.traces:
        if not trace.events:
            raise IngestError(f"trace {trace.id} has no events; row form cannot hold it")
        for pos, act in enumerate(trace.events):
            writer.writerow([trace.id, act.label, pos])
    return buf.getvalue()


# --------------------------------------------------------------------------
# Reports

def _fraction_str(fr) -> str:
    return f"{fr.numerator}/{fr.denominator}"


def write_report(
    report: CheckReport,
    format: str = "json",
    *,
    log_name: str = "",
    model_name: str = "",
) -> bytes:
    """Serialize a conformance report; output is identical across runs.

    JSON keys: log, model, backend, matrix, compliant, supports. Supports
    are exact rationals rendered as "p/q". The CSV form is a matrix with
    one row per trace plus a compliant column.
    """
    tids = sorted(report.trace_ids)
    cids = sorted(report.constraint_ids)
    if format == "json":
        doc = {
            "log": log_name,
            "model": model_name,
            "backend": report.backend.value,
            "matrix": {
                str(tid): {str(cid): report.matrix[(tid, cid)] for cid in cids}
                for tid in tids
            },
            "compliant": sorted(report.compliant),
            "supports": {str(cid): _fraction_str(report.supports[cid]) for cid in cids},
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trace_id", *(str(cid) for cid in cids), "compliant"])
        for tid in tids:
            row = [tid]
            row.extend(int(report.matrix[(tid, cid)]) for cid in cids)
            row.append(int(tid in report.compliant))
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {format!r}; use json or csv")


# --------------------------------------------------------------------------
# Path-based loading

def load_log(path) -> EventLog:
    """Read a log by extension: .xes, .xes.gz, .lp (facts), or .csv."""
    p = Path(path)
    name = p.name
    if name.endswith(".xes") or name.endswith(".xes.gz"):
        return parse_xes(p)
    if name.endswith(".lp"):
        return parse_factlog(p.read_text(encoding="utf-8"))
    if name.endswith(".csv"):
        return parse_csv(p.read_text(encoding="utf-8"))
    raise IngestError(
        f"cannot infer log format from suffix of {name!r}; "
        "expected .lp, .csv, .xes, or .xes.gz"
    )


def save_log(log: EventLog, path) -> None:
    p = Path(path)
    name = p.name
    if name.endswith(".xes.gz"):
        with gzip.open(p, "wt", encoding="utf-8") as fh:
            fh.write(write_xes(log))
        return
    if name.endswith(".xes"):
        p.write_text(write_xes(log), encoding="utf-8")
        return
    if name.endswith(".lp"):
        p.write_text(write_factlog(log), encoding="utf-8")
        return
    if name.endswith(".csv"):
        p.write_text(write_csv(log), encoding="utf-8")
        return
    raise IngestError(
        f"cannot infer log format from suffix of {name!r}; "
        "expected .lp, .csv, .xes, or .xes.gz"
    )


def load_model(path) -> DeclareModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def load_query(path) -> Query:
    return parse_query(Path(path).read_text(encoding="utf-8"))
