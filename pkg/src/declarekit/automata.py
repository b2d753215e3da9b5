"""Deterministic finite automata compiled from temporal formulas.

A formula over named activities induces a DFA whose alphabet is the set
of named symbols plus one wildcard class standing for every other
activity (at most one formula atom can hold at a position, so unnamed
events are interchangeable). States are residual formulas produced by
stepwise progression; a state accepts when its residual holds on the
empty continuation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from .core import Activity, Trace, WILDCARD_LABEL
from .ltlf import (
    And,
    Atom,
    Eventually,
    FALSE,
    FalseConst,
    Formula,
    Globally,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    Release,
    TRUE,
    TrueConst,
    Until,
    WeakNext,
    WeakUntil,
    atoms,
    ev_empty,
    nnf,
    pretty,
)


class _OtherSymbol:
    """Singleton transition class for activities outside the named set."""

    _instance: "_OtherSymbol | None" = None

    def __new__(cls) -> "_OtherSymbol":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OTHER"


OTHER = _OtherSymbol()

# A transition symbol is either a named Activity or the OTHER class.
SymbolClass = Activity | _OtherSymbol


class StateBudgetExceeded(RuntimeError):
    """Compilation discovered more states than the configured budget."""


@dataclass(frozen=True)
class Dfa:
    """A total DFA over named symbols plus the wildcard class.

    Transition columns follow `named` order with the wildcard last, so
    `moves[s][i]` is the successor of state s on symbol i. States are
    numbered densely from 0.
    """

    named: tuple[Activity, ...]
    moves: tuple[tuple[int, ...], ...]
    initial: int
    accepting: frozenset[int]

    def __post_init__(self) -> None:
        n = len(self.moves)
        width = len(self.named) + 1
        for row in self.moves:
            if len(row) != width or any(not (0 <= t < n) for t in row):
                raise ValueError("transition table is not total over the symbol classes")
        if not (0 <= self.initial < n):
            raise ValueError("initial state out of range")
        if any(not (0 <= s < n) for s in self.accepting):
            raise ValueError("accepting state out of range")

    @property
    def n_states(self) -> int:
        return len(self.moves)

    def symbol_index(self, activity: Activity) -> int:
        """Column for an activity: its named slot, or the wildcard column."""
        try:
            return self.named.index(activity)
        except ValueError:
            return len(self.named)

    def step(self, state: int, activity: Activity) -> int:
        return self.moves[state][self.symbol_index(activity)]

    def accepts(self, events: tuple[Activity, ...]) -> bool:
        index = {a: i for i, a in enumerate(self.named)}
        other = len(self.named)
        state = self.initial
        moves = self.moves
        for ev in events:
            state = moves[state][index.get(ev, other)]
        return state in self.accepting


def run(dfa: Dfa, trace: Trace, named: tuple[Activity, ...] | None = None) -> bool:
    """Replay a trace through the DFA; `named` defaults to the DFA's own set."""
    if named is not None and tuple(named) != dfa.named:
        raise ValueError("named symbols do not match the automaton alphabet")
    return dfa.accepts(trace.events)


# --------------------------------------------------------------------------
# Progression
#
# _progress(f, sym) is the residual obligation after reading one event of
# class `sym`, chosen so that for every continuation (empty included)
# the continuation satisfies the residual exactly when sym followed by
# the continuation satisfies f. Strong next must not become satisfiable
# on the empty continuation, so it carries a "continuation is non-empty"
# marker (F true); weak next dually carries "continuation is empty"
# (G false). Both markers vanish under minimization.

_NONEMPTY = Eventually(TRUE)
_EMPTY = Globally(FALSE)


def _progress(f: Formula, sym: SymbolClass) -> Formula:
    if isinstance(f, (TrueConst, FalseConst)):
        return f
    if isinstance(f, Atom):
        return TRUE if f.activity is sym else FALSE
    if isinstance(f, Not):
        return Not(_progress(f.arg, sym))
    if isinstance(f, And):
        return And(tuple(_progress(x, sym) for x in f.args))
    if isinstance(f, Or):
        return Or(tuple(_progress(x, sym) for x in f.args))
    if isinstance(f, Implies):
        return Implies(_progress(f.left, sym), _progress(f.right, sym))
    if isinstance(f, Iff):
        return Iff(_progress(f.left, sym), _progress(f.right, sym))
    if isinstance(f, Next):
        return And((f.arg, _NONEMPTY))
    if isinstance(f, WeakNext):
        return Or((f.arg, _EMPTY))
    if isinstance(f, Until):
        return Or((_progress(f.right, sym), And((_progress(f.left, sym), f))))
    if isinstance(f, Release):
        return And((_progress(f.right, sym), Or((_progress(f.left, sym), f))))
    if isinstance(f, WeakUntil):
        return Or((_progress(f.right, sym), And((_progress(f.left, sym), f))))
    if isinstance(f, Eventually):
        return Or((_progress(f.arg, sym), f))
    if isinstance(f, Globally):
        return And((_progress(f.arg, sym), f))
    raise TypeError(f"not a formula node: {f!r}")


def _simplify(f: Formula) -> Formula:
    """Canonical form: fold constants, flatten/sort/dedupe And and Or."""
    if isinstance(f, Not):
        arg = _simplify(f.arg)
        if isinstance(arg, TrueConst):
            return FALSE
        if isinstance(arg, FalseConst):
            return TRUE
        if isinstance(arg, Not):
            return arg.arg
        return Not(arg)
    if isinstance(f, And):
        flat: list[Formula] = []
        for x in f.args:
            x = _simplify(x)
            if isinstance(x, FalseConst):
                return FALSE
            if isinstance(x, TrueConst):
                continue
            flat.extend(x.args if isinstance(x, And) else (x,))
        uniq = sorted(set(flat), key=pretty)
        if not uniq:
            return TRUE
        return uniq[0] if len(uniq) == 1 else And(tuple(uniq))
    if isinstance(f, Or):
        flat = []
        for x in f.args:
            x = _simplify(x)
            if isinstance(x, TrueConst):
                return TRUE
            if isinstance(x, FalseConst):
                continue
            flat.extend(x.args if isinstance(x, Or) else (x,))
        uniq = sorted(set(flat), key=pretty)
        if not uniq:
            return FALSE
        return uniq[0] if len(uniq) == 1 else Or(tuple(uniq))
    if isinstance(f, Implies):
        return _simplify(Or((Not(f.left), f.right)))
    if isinstance(f, Iff):
        left, right = _simplify(f.left), _simplify(f.right)
        if left == right:
            return TRUE
        return Iff(left, right)
    if isinstance(f, Next):
        arg = _simplify(f.arg)
        return FALSE if isinstance(arg, FalseConst) else Next(arg)
    if isinstance(f, WeakNext):
        return WeakNext(_simplify(f.arg))
    if isinstance(f, Eventually):
        arg = _simplify(f.arg)
        return FALSE if isinstance(arg, FalseConst) else Eventually(arg)
    if isinstance(f, Globally):
        arg = _simplify(f.arg)
        return TRUE if isinstance(arg, TrueConst) else Globally(arg)
    if isinstance(f, (Until, Release, WeakUntil)):
        kind = type(f)
        return kind(_simplify(f.left), _simplify(f.right))
    return f


def compile_formula(f: Formula, *, state_budget: int = 4096) -> Dfa:
    """Build the DFA of a formula by exhaustive progression.

    The formula is normalized to negation normal form first. Discovery
    is breadth first from the normalized formula, so the initial state
    is 0 and numbering is reproducible. Raises StateBudgetExceeded when
    more than `state_budget` states appear.
    """
    start = _simplify(nnf(f))
    named = atoms(f)
    symbols: tuple[SymbolClass, ...] = named + (OTHER,)

    state_ids: dict[Formula, int] = {start: 0}
    worklist: list[Formula] = [start]
    rows: list[tuple[int, ...]] = []
    i = 0
    while i < len(worklist):
        state = worklist[i]
        i += 1
        row = []
        for sym in symbols:
            succ = _simplify(_progress(state, sym))
            nxt = state_ids.get(succ)
            if nxt is None:
                nxt = len(worklist)
                if nxt >= state_budget:
                    raise StateBudgetExceeded(
                        f"more than {state_budget} states while compiling {pretty(f)}"
                    )
                state_ids[succ] = nxt
                worklist.append(succ)
            row.append(nxt)
        rows.append(tuple(row))

    accepting = frozenset(i for s, i in state_ids.items() if ev_empty(s))
    return Dfa(named=named, moves=tuple(rows), initial=0, accepting=accepting)


# --------------------------------------------------------------------------
# Minimization and boolean combinations

def _renumber(dfa: Dfa) -> Dfa:
    """Canonical state numbering by breadth-first reach from the initial state."""
    width = len(dfa.named) + 1
    order: dict[int, int] = {dfa.initial: 0}
    queue = [dfa.initial]
    qi = 0
    while qi < len(queue):
        s = queue[qi]
        qi += 1
        for col in range(width):
            t = dfa.moves[s][col]
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    rows = [
        tuple(order[dfa.moves[s][col]] for col in range(width))
        for s in sorted(order, key=order.get)
    ]
    accepting = frozenset(order[s] for s in dfa.accepting if s in order)
    return Dfa(named=dfa.named, moves=tuple(rows), initial=0, accepting=accepting)


def minimize(dfa: Dfa) -> Dfa:
    """Language-preserving reduction to the least total DFA.

    Unreachable states are dropped, then blocks are split by acceptance
    and refined on transition signatures until stable; the quotient is
    renumbered breadth first so equal languages give equal tables.
    """
    width = len(dfa.named) + 1
    reachable: list[int] = [dfa.initial]
    seen = {dfa.initial}
    qi = 0
    while qi < len(reachable):
        s = reachable[qi]
        qi += 1
        for col in range(width):
            t = dfa.moves[s][col]
            if t not in seen:
                seen.add(t)
                reachable.append(t)

    block: dict[int, int] = {s: (1 if s in dfa.accepting else 0) for s in reachable}
    while True:
        signature: dict[int, tuple[int, ...]] = {
            s: (block[s],) + tuple(block[dfa.moves[s][c]] for c in range(width))
            for s in reachable
        }
        fresh: dict[tuple[int, ...], int] = {}
        new_block = {}
        for s in reachable:
            sig = signature[s]
            if sig not in fresh:
                fresh[sig] = len(fresh)
            new_block[s] = fresh[sig]
        if len(fresh) == len(set(block.values())):
            break
        block = new_block

    reps: dict[int, int] = {}
    for s in reachable:
        reps.setdefault(block[s], s)
    ordered_blocks = sorted(reps)
    index = {b: i for i, b in enumerate(ordered_blocks)}
    rows = tuple(
        tuple(index[block[dfa.moves[reps[b]][c]]] for c in range(width))
        for b in ordered_blocks
    )
    accepting = frozenset(index[b] for b in ordered_blocks if reps[b] in dfa.accepting)
    quotient = Dfa(
        named=dfa.named, moves=rows, initial=index[block[dfa.initial]], accepting=accepting
    )
    return _renumber(quotient)


def complement(dfa: Dfa) -> Dfa:
    """Swap the accepting set; valid because the table is total."""
    rejected = frozenset(range(dfa.n_states)) - dfa.accepting
    return Dfa(named=dfa.named, moves=dfa.moves, initial=dfa.initial, accepting=rejected)


def align(dfa: Dfa, named: tuple[Activity, ...]) -> Dfa:
    """Re-express the DFA over a named superset; new symbols follow the wildcard."""
    if tuple(named) == dfa.named:
        return dfa
    missing = [a for a in dfa.named if a not in named]
    if missing:
        raise ValueError(f"target alphabet drops named symbols {missing}")
    old_other = len(dfa.named)
    columns = []
    for a in named:
        try:
            columns.append(dfa.named.index(a))
        except ValueError:
            columns.append(old_other)
    columns.append(old_other)
    rows = tuple(tuple(row[c] for c in columns) for row in dfa.moves)
    return Dfa(named=tuple(named), moves=rows, initial=dfa.initial, accepting=dfa.accepting)


def product(left: Dfa, right: Dfa, combine=lambda a, b: a and b) -> Dfa:
    """Synchronous product over a shared alphabet; acceptance via `combine`."""
    if left.named != right.named:
        raise ValueError("product requires identical named symbol tuples")
    width = len(left.named) + 1
    start = (left.initial, right.initial)
    ids: dict[tuple[int, int], int] = {start: 0}
    pairs = [start]
    rows: list[tuple[int, ...]] = []
    qi = 0
    while qi < len(pairs):
        l, r = pairs[qi]
        qi += 1
        row = []
        for col in range(width):
            succ = (left.moves[l][col], right.moves[r][col])
            nxt = ids.get(succ)
            if nxt is None:
                nxt = len(pairs)
                ids[succ] = nxt
                pairs.append(succ)
            row.append(nxt)
        rows.append(tuple(row))
    accepting = frozenset(
        i for (l, r), i in ids.items() if combine(l in left.accepting, r in right.accepting)
    )
    return Dfa(named=left.named, moves=tuple(rows), initial=0, accepting=accepting)


# --------------------------------------------------------------------------
# Exports

def _symbol_names(dfa: Dfa, activation: Activity | None, target: Activity | None) -> list[str]:
    names = []
    for a in dfa.named:
        if activation is not None and a is activation:
            names.append("arg_0")
        elif target is not None and a is target:
            names.append("arg_1")
        else:
            names.append(a.label)
    names.append(WILDCARD_LABEL)
    return names


def to_facts_dict(
    dfa: Dfa,
    kind: str,
    *,
    activation: Activity | None = None,
    target: Activity | None = None,
) -> dict:
    """Fact-style JSON form: kind, transitions, initial, accepting.

    With activation/target given, their columns are exported as arg_0 and
    arg_1 so instantiations of one template share a representation.
    """
    names = _symbol_names(dfa, activation, target)
    order = {n: i for i, n in enumerate(sorted(names))}
    transitions = []
    for s, row in enumerate(dfa.moves):
        for col, t in enumerate(row):
            transitions.append([s, names[col], t])
    transitions.sort(key=lambda e: (e[0], order[e[1]]))
    return {
        "kind": kind,
        "initial": dfa.initial,
        "accepting": sorted(dfa.accepting),
        "transitions": transitions,
    }


def to_facts_json(
    dfa: Dfa,
    kind: str,
    *,
    activation: Activity | None = None,
    target: Activity | None = None,
) -> str:
    return json.dumps(
        to_facts_dict(dfa, kind, activation=activation, target=target), indent=2
    ) + "\n"


def to_dot(
    dfa: Dfa,
    *,
    activation: Activity | None = None,
    target: Activity | None = None,
    name: str = "dfa",
) -> str:
    """Graphviz rendering with doubled accepting states and an entry arrow."""
    names = _symbol_names(dfa, activation, target)
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=none, label=""];']
    for s in range(dfa.n_states):
        shape = "doublecircle" if s in dfa.accepting else "circle"
        lines.append(f"  q{s} [shape={shape}, label=\"{s}\"];")
    lines.append(f"  __start -> q{dfa.initial};")
    for s, row in enumerate(dfa.moves):
        grouped: dict[int, list[str]] = {}
        for col, t in enumerate(row):
            grouped.setdefault(t, []).append(names[col])
        for t in sorted(grouped):
            label = ", ".join(grouped[t])
            lines.append(f'  q{s} -> q{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Template automata

@lru_cache(maxsize=1024)
def template_dfa(kind, activation: Activity, target: Activity) -> Dfa:
    """Minimal DFA of one template instance (cached)."""
    from .ltlf import template_formula

    return minimize(compile_formula(template_formula(kind, activation, target)))
