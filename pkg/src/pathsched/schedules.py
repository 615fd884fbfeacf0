"""Path decompositions, measurement schedules, validators, and conversions.

A measurement schedule is the executable artifact: an ordered list of
``Init``/``Measure`` events.  A path decomposition is the equivalent proof
artifact: an ordered list of vertex bags.  The two representations carry
the same information, and this module converts between them
constructively in both directions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    InvalidDecompositionError,
    InvalidScheduleError,
    UnknownVertexError,
)
from .graphs import Graph

INIT = "I"
MEASURE = "M"


class ScheduleEvent(NamedTuple):
    action: str  # INIT or MEASURE
    vertex: int


@dataclass(frozen=True)
class MeasurementSchedule:
    """Ordered sequence of qubit initialisation and measurement events."""

    events: tuple[ScheduleEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "events", tuple(ScheduleEvent(a, v) for a, v in self.events)
        )
        for a, v in self.events:
            if a not in (INIT, MEASURE):
                raise ValueError(f"unknown event action {a!r}")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[ScheduleEvent]:
        return iter(self.events)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "MeasurementSchedule":
        return cls(tuple(ScheduleEvent(a, v) for a, v in pairs))

    # one event per line: "I <label>" or "M <label>"
    @classmethod
    def from_text(cls, text: str, g: Graph) -> "MeasurementSchedule":
        events = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2 or tokens[0] not in (INIT, MEASURE):
                raise ValueError(
                    f"line {lineno}: expected 'I <label>' or 'M <label>', got {line!r}"
                )
            events.append(ScheduleEvent(tokens[0], g.vertex_by_label(tokens[1])))
        return cls(tuple(events))

    def to_text(self, g: Graph) -> str:
        lines = [f"{a} {g.label_of(v)}" for a, v in self.events]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_dict(cls, doc: dict, g: Graph) -> "MeasurementSchedule":
        raw = doc.get("events")
        if not isinstance(raw, list):
            raise ValueError("schedule document must contain an 'events' list")
        events = []
        for item in raw:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ValueError(f"event entry {item!r} is not an [action, vertex] pair")
            action, who = item
            if action not in (INIT, MEASURE):
                raise ValueError(f"unknown event action {action!r}")
            if isinstance(who, int) and not isinstance(who, bool):
                if not (0 <= who < g.n):
                    raise UnknownVertexError(f"vertex {who} outside [0, {g.n})")
                v = who
            else:
                v = g.vertex_by_label(str(who))
            events.append(ScheduleEvent(action, v))
        return cls(tuple(events))

    def to_dict(self, g: Graph | None = None) -> dict:
        label = g.label_of if g is not None else str
        return {"events": [[a, label(v)] for a, v in self.events]}


@dataclass(frozen=True)
class PathDecomposition:
    """Ordered sequence of vertex bags."""

    bags: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    def __len__(self) -> int:
        return len(self.bags)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.bags)

    @classmethod
    def from_bags(cls, bags: Iterable[Iterable[int]]) -> "PathDecomposition":
        return cls(tuple(frozenset(b) for b in bags))

    # one bag per line, whitespace-separated labels; blank/comment lines ignored
    @classmethod
    def from_text(cls, text: str, g: Graph) -> "PathDecomposition":
        bags = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            bags.append(frozenset(g.vertex_by_label(t) for t in line.split()))
        return cls(tuple(bags))

    def to_text(self, g: Graph) -> str:
        lines = [" ".join(g.label_of(v) for v in sorted(bag)) for bag in self.bags]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_dict(cls, doc: dict, g: Graph) -> "PathDecomposition":
        raw = doc.get("bags")
        if not isinstance(raw, list):
            raise ValueError("decomposition document must contain a 'bags' list")
        bags = []
        for entry in raw:
            if not isinstance(entry, (list, tuple)):
                raise ValueError(f"bag entry {entry!r} is not a list")
            bag = set()
            for who in entry:
                if isinstance(who, int) and not isinstance(who, bool):
                    if not (0 <= who < g.n):
                        raise UnknownVertexError(f"vertex {who} outside [0, {g.n})")
                    bag.add(who)
                else:
                    bag.add(g.vertex_by_label(str(who)))
            bags.append(frozenset(bag))
        return cls(tuple(bags))

    def to_dict(self, g: Graph | None = None) -> dict:
        label = g.label_of if g is not None else str
        return {"bags": [[label(v) for v in sorted(bag)] for bag in self.bags]}


# -- validation ----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    condition: str  # P1, P2, P3, M1, M2, M-measure-before-init, M-never-measured
    subject: object  # offending vertex id, edge pair, or event index
    message: str

    def to_dict(self, g: Graph | None = None) -> dict:
        subject = self.subject
        if g is not None:
            if isinstance(subject, int):
                subject = g.label_of(subject)
            elif isinstance(subject, tuple):
                subject = [g.label_of(x) for x in subject]
        elif isinstance(subject, tuple):
            subject = list(subject)
        return {"condition": self.condition, "subject": subject, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]

    @classmethod
    def from_violations(cls, violations: Sequence[Violation]) -> "ValidationReport":
        return cls(valid=not violations, violations=tuple(violations))

    def to_dict(self, g: Graph | None = None) -> dict:
        return {
            "valid": self.valid,
            "violations": [v.to_dict(g) for v in self.violations],
        }


def validate_decomposition(g: Graph, pd: PathDecomposition) -> ValidationReport:
    """Check the three path-decomposition conditions, reporting every violation.

    P1: every vertex occurs in some bag.  P2: every edge is contained in
    some bag.  P3: the bag indices containing each vertex form a contiguous
    interval.  Bags mentioning vertices outside the graph raise
    ``UnknownVertexError`` instead of being reported.
    """
    for i, bag in enumerate(pd.bags):
        for v in bag:
            if not (0 <= v < g.n):
                raise UnknownVertexError(f"bag {i} references unknown vertex {v}")
    violations: list[Violation] = []
    occurrences: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for i, bag in enumerate(pd.bags):
        for v in bag:
            occurrences[v].append(i)
    for v in range(g.n):
        if not occurrences[v]:
            violations.append(
                Violation("P1", v, f"vertex {g.label_of(v)} appears in no bag")
            )
    for u, v in g.sorted_edges():
        if not any(u in bag and v in bag for bag in pd.bags):
            violations.append(
                Violation(
                    "P2",
                    (u, v),
                    f"edge ({g.label_of(u)}, {g.label_of(v)}) is contained in no bag",
                )
            )
    for v in range(g.n):
        idxs = occurrences[v]
        if idxs and idxs[-1] - idxs[0] + 1 != len(idxs):
            violations.append(
                Violation(
                    "P3",
                    v,
                    f"vertex {g.label_of(v)} occurs non-contiguously in bags {idxs}",
                )
            )
    return ValidationReport.from_violations(violations)


def width(pd: PathDecomposition) -> int:
    """Largest bag size minus one.  Undefined (raises) for an empty bag sequence."""
    if not pd.bags:
        raise ValueError("width is undefined for an empty bag sequence")
    return max(len(bag) for bag in pd.bags) - 1


def validate_schedule(g: Graph, s: MeasurementSchedule) -> ValidationReport:
    """Check schedule validity, reporting every violation.

    M1: each vertex is initialised exactly once.  M2: a vertex may be
    measured only once every one of its neighbours has been initialised.
    Plumbing conditions close the event encoding: a measurement needs its
    own qubit active (initialised, not yet measured; double measurements
    land here too), and every initialised qubit must be measured by the
    end.
    """
    for i, (_, v) in enumerate(s.events):
        if not (0 <= v < g.n):
            raise UnknownVertexError(f"event {i} references unknown vertex {v}")
    violations: list[Violation] = []
    init_count = {v: 0 for v in range(g.n)}
    measured: set[int] = set()
    initialised: set[int] = set()
    for i, (action, v) in enumerate(s.events):
        if action == INIT:
            init_count[v] += 1
            if init_count[v] > 1:
                violations.append(
                    Violation(
                        "M1",
                        v,
                        f"event {i}: vertex {g.label_of(v)} initialised again"
                        f" (count {init_count[v]})",
                    )
                )
            initialised.add(v)
        else:
            if v not in initialised or v in measured:
                reason = (
                    "measured twice" if v in measured else "measured before its own init"
                )
                violations.append(
                    Violation(
                        "M-measure-before-init",
                        v,
                        f"event {i}: vertex {g.label_of(v)} {reason}",
                    )
                )
            missing = sorted(g.neighbours(v) - initialised)
            if missing:
                violations.append(
                    Violation(
                        "M2",
                        v,
                        f"event {i}: vertex {g.label_of(v)} measured before"
                        f" neighbours {[g.label_of(u) for u in missing]} initialised",
                    )
                )
            measured.add(v)
    for v in range(g.n):
        if init_count[v] == 0:
            violations.append(
                Violation("M1", v, f"vertex {g.label_of(v)} is never initialised")
            )
        elif v not in measured:
            violations.append(
                Violation(
                    "M-never-measured",
                    v,
                    f"vertex {g.label_of(v)} is initialised but never measured",
                )
            )
    return ValidationReport.from_violations(violations)


def active_trace(s: MeasurementSchedule) -> tuple[frozenset[int], ...]:
    """Active-set snapshot immediately after each event.

    A vertex is active between its init and its measurement.  Raises
    ``InvalidScheduleError`` on structural defects (double init, measuring
    an inactive vertex, unmeasured vertices at the end); neighbour-order
    violations need the graph and are not checked here.
    """
    active: set[int] = set()
    initialised: set[int] = set()
    trace: list[frozenset[int]] = []
    for i, (action, v) in enumerate(s.events):
        if action == INIT:
            if v in initialised:
                raise InvalidScheduleError(f"event {i}: vertex {v} initialised twice")
            initialised.add(v)
            active.add(v)
        else:
            if v not in active:
                raise InvalidScheduleError(
                    f"event {i}: vertex {v} measured while not active"
                )
            active.remove(v)
        trace.append(frozenset(active))
    if active:
        raise InvalidScheduleError(f"vertices {sorted(active)} never measured")
    return tuple(trace)


def cost(s: MeasurementSchedule) -> int:
    """Maximum number of simultaneously active vertices; 0 for the empty schedule."""
    return max((len(snapshot) for snapshot in active_trace(s)), default=0)


# -- conversions ----------------------------------------------------------------


def _require_valid_decomposition(g: Graph, pd: PathDecomposition) -> ValidationReport:
    report = validate_decomposition(g, pd)
    if not report.valid:
        raise InvalidDecompositionError(
            f"invalid path decomposition: {report.violations[0].message}", report
        )
    return report


def _require_valid_schedule(g: Graph, s: MeasurementSchedule) -> ValidationReport:
    report = validate_schedule(g, s)
    if not report.valid:
        raise InvalidScheduleError(
            f"invalid measurement schedule: {report.violations[0].message}", report
        )
    return report


def decomposition_to_schedule(g: Graph, pd: PathDecomposition) -> MeasurementSchedule:
    """Realise a valid path decomposition as a measurement schedule.

    Walking the bags in order: every vertex entering bag ``i`` (relative to
    bag ``i-1``) is initialised, then every vertex whose last bag is ``i``
    is measured.  Within one bag both groups are emitted in ascending id
    order.  The construction measures each vertex as early as the bag
    structure allows, and the resulting schedule is valid with cost at most
    ``width(pd) + 1``.
    """
    _require_valid_decomposition(g, pd)
    last_bag: dict[int, int] = {}
    for i, bag in enumerate(pd.bags):
        for v in bag:
            last_bag[v] = i
    events: list[ScheduleEvent] = []
    prev: frozenset[int] = frozenset()
    for i, bag in enumerate(pd.bags):
        for v in sorted(bag - prev):
            events.append(ScheduleEvent(INIT, v))
        for v in sorted(bag):
            if last_bag[v] == i:
                events.append(ScheduleEvent(MEASURE, v))
        prev = bag
    return MeasurementSchedule(tuple(events))


def schedule_to_decomposition(g: Graph, s: MeasurementSchedule) -> PathDecomposition:
    """Read a valid measurement schedule back as a path decomposition.

    The bags are the active-set snapshots taken immediately after each
    init event.  Since the active count peaks right after an init, the
    result always satisfies ``width == cost(s) - 1`` (for non-empty
    schedules).
    """
    _require_valid_schedule(g, s)
    trace = active_trace(s)
    bags = tuple(
        snapshot
        for (action, _), snapshot in zip(s.events, trace)
        if action == INIT
    )
    return PathDecomposition(bags)


def ordering_to_schedule(g: Graph, order: Sequence[int]) -> MeasurementSchedule:
    """Eager-measurement schedule realising a vertex ordering.

    Vertices are initialised in the given order; after each init, every
    active vertex whose entire neighbourhood is initialised is measured
    immediately (ascending id).  The active set left after step ``k`` is
    exactly the prefix boundary ``{u in S_k : N(u) not in S_k}``, so the
    cost of the result is ``1 + max prefix boundary`` (0 on the empty
    graph): minimising over orderings therefore minimises the schedule
    cost.
    """
    if sorted(order) != list(range(g.n)):
        raise ValueError("order is not a permutation of the vertex ids")
    events: list[ScheduleEvent] = []
    initialised: set[int] = set()
    active: set[int] = set()
    for v in order:
        events.append(ScheduleEvent(INIT, v))
        initialised.add(v)
        active.add(v)
        for u in sorted(active):
            if g.neighbours(u) <= initialised:
                events.append(ScheduleEvent(MEASURE, u))
                active.remove(u)
    return MeasurementSchedule(tuple(events))
