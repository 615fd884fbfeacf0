"""Undirected simple graphs: construction, text formats, and named families.

Vertices are dense integer ids ``0..n-1``.  Optional string labels exist
purely for input and output; every algorithm in this package works on ids.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import DuplicateEdgeWarning, GraphParseError, UnknownVertexError

Edge = tuple[int, int]


def _normalise_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    Edges are stored as ``(u, v)`` pairs with ``u < v``; any iterable of
    pairs is normalised and deduplicated at construction.  Self-loops and
    out-of-range endpoints are rejected.  Labels, when present, must map
    every id they mention into ``[0, n)`` and be unique, non-empty and
    whitespace-free so the line-oriented text formats stay unambiguous.

    Instances are safe to share across threads; nothing mutates after
    ``__post_init__``.
    """

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)
    labels: dict[int, str] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"vertex count must be non-negative, got {self.n}")
        normalised = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) leaves vertex range [0, {self.n})")
            normalised.add(_normalise_edge(u, v))
        object.__setattr__(self, "edges", frozenset(normalised))
        if self.labels is not None:
            seen = set()
            for v, text in self.labels.items():
                if not (0 <= v < self.n):
                    raise ValueError(f"label for unknown vertex {v}")
                if not text or text.split() != [text]:
                    raise ValueError(f"label {text!r} is empty or contains whitespace")
                if text in seen:
                    raise ValueError(f"duplicate label {text!r}")
                seen.add(text)

    # -- structure queries -------------------------------------------------

    @cached_property
    def _adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def _neighbour_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise UnknownVertexError(f"vertex {v} outside [0, {self.n})")

    def neighbours(self, v: int) -> frozenset[int]:
        """Set of vertices adjacent to ``v``."""
        self._check_vertex(v)
        return self._adjacency[v]

    def neighbour_mask(self, v: int) -> int:
        """Neighbourhood of ``v`` as a bitmask (bit ``u`` set iff ``{u,v}`` is an edge)."""
        self._check_vertex(v)
        return self._neighbour_masks[v]

    def degree(self, v: int) -> int:
        return len(self.neighbours(v))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    # -- labels ------------------------------------------------------------

    def label_of(self, v: int) -> str:
        """Display label for ``v`` (its decimal id when the graph is unlabelled)."""
        self._check_vertex(v)
        if self.labels is not None and v in self.labels:
            return self.labels[v]
        return str(v)

    @cached_property
    def _id_by_label(self) -> dict[str, int]:
        return {self.label_of(v): v for v in range(self.n)}

    def vertex_by_label(self, token: str) -> int:
        """Resolve a display label (or decimal id) back to a vertex id."""
        v = self._id_by_label.get(token)
        if v is None:
            raise UnknownVertexError(f"unknown vertex label {token!r}")
        return v


# -- parsing and serialization ----------------------------------------------

EDGE_LIST_FORMAT = "edge-list"
STRUCTURED_FORMAT = "structured"


def parse_graph(text: str, fmt: str = "auto") -> Graph:
    """Parse a graph from text.

    ``edge-list``: one edge per line as two whitespace-separated labels;
    blank lines and lines starting with ``#`` are ignored; ids are assigned
    densely in first-appearance order.  ``structured``: a JSON document
    ``{"n": ..., "edges": [[u, v], ...], "labels": {...}?}``.  ``auto``
    picks structured when the first non-blank character is ``{``.

    Duplicate edges are merged; the merge count is reported through a
    ``DuplicateEdgeWarning``.  Malformed lines, self-loops, and
    out-of-range ids raise ``GraphParseError``.
    """
    if fmt == "auto":
        fmt = STRUCTURED_FORMAT if text.lstrip()[:1] == "{" else EDGE_LIST_FORMAT
    if fmt == EDGE_LIST_FORMAT:
        return _parse_edge_list(text)
    if fmt == STRUCTURED_FORMAT:
        return _parse_structured(text)
    raise ValueError(f"unknown graph format {fmt!r}")


def _warn_duplicates(count: int) -> None:
    if count:
        warnings.warn(
            f"merged {count} duplicate edge{'s' if count != 1 else ''}",
            DuplicateEdgeWarning,
            stacklevel=4,
        )


def _parse_edge_list(text: str) -> Graph:
    ids: dict[str, int] = {}
    edges: set[Edge] = set()
    duplicates = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphParseError(
                f"line {lineno}: expected two vertex labels, got {len(tokens)}"
            )
        a, b = tokens
        if a == b:
            raise GraphParseError(f"line {lineno}: self-loop on {a!r}")
        for t in (a, b):
            if t not in ids:
                ids[t] = len(ids)
        edge = _normalise_edge(ids[a], ids[b])
        if edge in edges:
            duplicates += 1
        else:
            edges.add(edge)
    _warn_duplicates(duplicates)
    labels = {i: s for s, i in ids.items()}
    return Graph(len(ids), frozenset(edges), labels or None)


def _parse_structured(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GraphParseError("expected a JSON object with fields 'n' and 'edges'")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphParseError("'n' must be a non-negative integer")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        raise GraphParseError("'edges' must be a list of [u, v] pairs")
    edges: set[Edge] = set()
    duplicates = 0
    for item in raw_edges:
        if (
            not isinstance(item, (list, tuple))
            or len(item) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in item)
        ):
            raise GraphParseError(f"edge entry {item!r} is not a pair of integers")
        u, v = item
        if u == v:
            raise GraphParseError(f"self-loop on vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"edge ({u}, {v}) leaves vertex range [0, {n})")
        edge = _normalise_edge(u, v)
        if edge in edges:
            duplicates += 1
        else:
            edges.add(edge)
    _warn_duplicates(duplicates)
    labels = None
    if "labels" in doc and doc["labels"] is not None:
        if not isinstance(doc["labels"], dict):
            raise GraphParseError("'labels' must be an object mapping ids to strings")
        labels = {}
        for key, value in doc["labels"].items():
            try:
                vid = int(key)
            except (TypeError, ValueError):
                raise GraphParseError(f"label key {key!r} is not a vertex id") from None
            if not isinstance(value, str):
                raise GraphParseError(f"label for vertex {vid} is not a string")
            labels[vid] = value
    try:
        return Graph(n, frozenset(edges), labels)
    except ValueError as exc:
        raise GraphParseError(str(exc)) from exc


def graph_to_dict(g: Graph) -> dict:
    """Structured-format document for ``g`` (the JSON schema used everywhere)."""
    doc: dict = {"n": g.n, "edges": [list(e) for e in g.sorted_edges()]}
    if g.labels is not None:
        doc["labels"] = {str(v): g.labels[v] for v in sorted(g.labels)}
    return doc


def serialize_graph(g: Graph, fmt: str = STRUCTURED_FORMAT) -> str:
    """Render ``g`` as text.

    The structured format round-trips exactly.  The edge-list format cannot
    represent isolated vertices and reassigns ids on re-parse in
    first-appearance order, so it round-trips only up to relabelling.
    """
    if fmt == STRUCTURED_FORMAT:
        return json.dumps(graph_to_dict(g), indent=2, sort_keys=True) + "\n"
    if fmt == EDGE_LIST_FORMAT:
        lines = [f"{g.label_of(u)} {g.label_of(v)}" for u, v in g.sorted_edges()]
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown graph format {fmt!r}")


# -- named families ----------------------------------------------------------

FAMILY_KINDS = ("complete", "path", "cycle", "grid", "caterpillar", "random")


@dataclass(frozen=True)
class FamilyDescriptor:
    """A named graph family plus its parameters.

    Parameter shapes: ``complete(n)``, ``path(n)``, ``cycle(n >= 3)``,
    ``grid(m >= 1, n >= 1)``, ``caterpillar(spine >= 1, legs >= 0)``,
    ``random(n, p in [0, 1], seed)``.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family {self.kind!r}")
        object.__setattr__(self, "params", tuple(self.params))
        p = self.params
        ints = all(isinstance(x, int) and not isinstance(x, bool) for x in p)
        if self.kind in ("complete", "path"):
            if len(p) != 1 or not ints or p[0] < 0:
                raise ValueError(f"{self.kind} takes one non-negative integer")
        elif self.kind == "cycle":
            if len(p) != 1 or not ints or p[0] < 3:
                raise ValueError("cycle requires n >= 3")
        elif self.kind == "grid":
            if len(p) != 2 or not ints or p[0] < 1 or p[1] < 1:
                raise ValueError("grid requires m >= 1 and n >= 1")
        elif self.kind == "caterpillar":
            if len(p) != 2 or not ints or p[0] < 1 or p[1] < 0:
                raise ValueError("caterpillar requires spine >= 1 and legs >= 0")
        elif self.kind == "random":
            if len(p) != 3:
                raise ValueError("random requires n, p, seed")
            n, prob, seed = p
            if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                raise ValueError("random requires n >= 0")
            if not isinstance(prob, (int, float)) or not 0.0 <= float(prob) <= 1.0:
                raise ValueError("random requires p in [0, 1]")
            if not isinstance(seed, int) or isinstance(seed, bool):
                raise ValueError("random requires an integer seed")

    def name(self) -> str:
        return "-".join([self.kind] + [str(x) for x in self.params])


def generate(desc: FamilyDescriptor) -> Graph:
    """Build the graph named by ``desc``.

    Grid ids are row-major: vertex ``(r, c)`` of an ``m x n`` grid is
    ``r * n + c``.  Caterpillar ids put the spine first (``0..s-1`` as a
    path), then the ``legs`` leaves of spine vertex ``i`` at
    ``s + i*legs .. s + (i+1)*legs - 1``.  The random family includes each
    pair independently with probability ``p`` using its own seeded
    generator, so identical descriptors give identical graphs.
    """
    kind, p = desc.kind, desc.params
    if kind == "complete":
        (n,) = p
        return Graph(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)))
    if kind == "path":
        (n,) = p
        return Graph(n, frozenset((v, v + 1) for v in range(n - 1)))
    if kind == "cycle":
        (n,) = p
        edges = {(v, v + 1) for v in range(n - 1)}
        edges.add((0, n - 1))
        return Graph(n, frozenset(edges))
    if kind == "grid":
        m, n = p
        edges = set()
        for r in range(m):
            for c in range(n):
                v = r * n + c
                if c + 1 < n:
                    edges.add((v, v + 1))
                if r + 1 < m:
                    edges.add((v, v + n))
        return Graph(m * n, frozenset(edges))
    if kind == "caterpillar":
        spine, legs = p
        edges = {(v, v + 1) for v in range(spine - 1)}
        for i in range(spine):
            for j in range(legs):
                edges.add(_normalise_edge(i, spine + i * legs + j))
        return Graph(spine + spine * legs, frozenset(edges))
    if kind == "random":
        n, prob, seed = p
        rng = random.Random(seed)
        edges = set()
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < float(prob):
                    edges.add((u, v))
        return Graph(n, frozenset(edges))
    raise AssertionError(f"unhandled family {kind!r}")


def complete_graph(n: int) -> Graph:
    return generate(FamilyDescriptor("complete", (n,)))


def path_graph(n: int) -> Graph:
    return generate(FamilyDescriptor("path", (n,)))


def cycle_graph(n: int) -> Graph:
    return generate(FamilyDescriptor("cycle", (n,)))


def grid_graph(m: int, n: int) -> Graph:
    return generate(FamilyDescriptor("grid", (m, n)))


def caterpillar_graph(spine: int, legs: int) -> Graph:
    return generate(FamilyDescriptor("caterpillar", (spine, legs)))


def random_graph(n: int, p: float, seed: int) -> Graph:
    return generate(FamilyDescriptor("random", (n, p, seed)))


# -- structural quantities ----------------------------------------------------


def degeneracy(g: Graph) -> int:
    """Max over the repeated minimum-degree elimination of the degree at removal.

    Lower-bounds treewidth and hence pathwidth; 0 for edgeless graphs.
    """
    deg = [g.degree(v) for v in range(g.n)]
    alive = set(range(g.n))
    best = 0
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        best = max(best, deg[v])
        alive.remove(v)
        for u in g.neighbours(v):
            if u in alive:
                deg[u] -= 1
    return best
