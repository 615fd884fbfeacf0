"""Pathwidth solvers built on the vertex-separation formulation.

For an ordering of the vertices, the separation of a prefix ``S`` is the
size of its boundary ``{u in S : N(u) not a subset of S}``; the vertex
separation of the ordering is the maximum over prefixes, and its minimum
over all orderings equals the pathwidth.  Every solver here searches over
orderings and hands the winner to the schedule layer for certificates, so
an optimal ordering yields a schedule of cost ``width + 1`` and a
decomposition of exactly the reported width.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GraphTooLargeError, SearchBudgetExceeded
from .graphs import FamilyDescriptor, Graph, degeneracy
from .schedules import (
    MeasurementSchedule,
    PathDecomposition,
    cost,
    ordering_to_schedule,
    schedule_to_decomposition,
)

MAX_BRUTE_VERTICES = 10
MAX_DP_VERTICES = 26

METHODS = ("brute", "dp", "bnb", "heuristic", "closed-form")


def prefix_boundary_sizes(g: Graph, order: Sequence[int]) -> list[int]:
    """Boundary size after each prefix of ``order`` (direct computation)."""
    masks = [g.neighbour_mask(v) for v in range(g.n)]
    sizes = []
    placed = 0
    for v in order:
        placed |= 1 << v
        outside = ~placed
        boundary = 0
        for u in order[: len(sizes) + 1]:
            if masks[u] & outside:
                boundary += 1
        sizes.append(boundary)
    return sizes


def vertex_separation(g: Graph, order: Sequence[int]) -> int:
    """Max prefix boundary of ``order``; equals ``cost(schedule) - 1``."""
    if sorted(order) != list(range(g.n)):
        raise ValueError("order is not a permutation of the vertex ids")
    return max(prefix_boundary_sizes(g, order), default=0)


@dataclass
class SolverReport:
    """Result of a width computation plus machine-checkable certificates.

    ``width`` is the pathwidth found (or the best upper bound when
    ``exact`` is false); the spatial cost is always ``width + 1``.  The
    ordering, decomposition, and schedule certify the width: the
    decomposition validates with exactly this width and the schedule with
    exactly this cost.  For the empty graph the certificates are empty and
    ``width`` is 0 by convention.
    """

    width: int
    exact: bool
    method: str
    ordering: tuple[int, ...]
    decomposition: PathDecomposition
    schedule: MeasurementSchedule
    lower_bound: int
    nodes_expanded: int = 0
    elapsed_seconds: float = 0.0

    @property
    def spatial_cost(self) -> int:
        return self.width + 1

    def to_dict(self, g: Graph | None = None, *, include_timing: bool = True) -> dict:
        label = g.label_of if g is not None else str
        return {
            "width": self.width,
            "spatial_cost": self.spatial_cost,
            "exact": self.exact,
            "method": self.method,
            "lower_bound": self.lower_bound,
            "nodes_expanded": self.nodes_expanded,
            "elapsed_seconds": round(self.elapsed_seconds, 6) if include_timing else None,
            "ordering": [label(v) for v in self.ordering],
            "schedule": self.schedule.to_dict(g),
            "decomposition": self.decomposition.to_dict(g),
        }


def _report_from_ordering(
    g: Graph,
    order: Sequence[int],
    *,
    width_value: int,
    exact: bool,
    method: str,
    nodes: int,
    elapsed: float,
    lb: int | None = None,
) -> SolverReport:
    schedule = ordering_to_schedule(g, order)
    decomposition = schedule_to_decomposition(g, schedule)
    if g.n > 0:
        assert cost(schedule) == width_value + 1, "certificate does not match width"
    return SolverReport(
        width=width_value,
        exact=exact,
        method=method,
        ordering=tuple(order),
        decomposition=decomposition,
        schedule=schedule,
        lower_bound=degeneracy(g) if lb is None else lb,
        nodes_expanded=nodes,
        elapsed_seconds=elapsed,
    )


def _empty_report(g: Graph, method: str, elapsed: float = 0.0) -> SolverReport:
    return SolverReport(
        width=0,
        exact=True,
        method=method,
        ordering=(),
        decomposition=PathDecomposition(()),
        schedule=MeasurementSchedule(()),
        lower_bound=0,
        nodes_expanded=0,
        elapsed_seconds=elapsed,
    )


# -- brute force ------------------------------------------------------------------

_PERM_CHUNK = 1 << 17


def _permutation_chunks(n: int):
    it = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(it, _PERM_CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int8)


def brute_force(g: Graph) -> SolverReport:
    """Independent oracle: evaluate every ordering and take the minimum.

    Enumerates all n! orderings (vectorised in chunks) and scores each by
    its maximum prefix boundary.  Returns the lexicographically first
    optimal ordering.  Capped at n <= 10.
    """
    if g.n > MAX_BRUTE_VERTICES:
        raise GraphTooLargeError(
            f"brute force enumerates n! orderings; n={g.n} exceeds {MAX_BRUTE_VERTICES}"
        )
    t0 = time.perf_counter()
    n = g.n
    if n == 0:
        return _empty_report(g, "brute")
    masks = np.array([g.neighbour_mask(v) for v in range(n)], dtype=np.int64)
    best = n  # every ordering has max boundary <= n - 1
    best_order: tuple[int, ...] | None = None
    examined = 0
    for perms in _permutation_chunks(n):
        rows = perms.shape[0]
        placed = np.zeros(rows, dtype=np.int64)
        peak = np.zeros(rows, dtype=np.int8)
        for k in range(n):
            placed |= np.int64(1) << perms[:, k].astype(np.int64)
            boundary = np.zeros(rows, dtype=np.int8)
            outside = ~placed
            for j in range(k + 1):
                u = perms[:, j].astype(np.int64)
                boundary += (masks[u] & outside) != 0
            np.maximum(peak, boundary, out=peak)
        i = int(np.argmin(peak))
        if int(peak[i]) < best:
            best = int(peak[i])
            best_order = tuple(int(x) for x in perms[i])
        examined += rows
    assert best_order is not None
    return _report_from_ordering(
        g,
        best_order,
        width_value=best,
        exact=True,
        method="brute",
        nodes=examined,
        elapsed=time.perf_counter() - t0,
    )


# -- exact dynamic programming -------------------------------------------------------


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        pc = np.concatenate([pc, pc + 1])
    return pc


def _boundary_sizes(masks: Sequence[int], n: int) -> np.ndarray:
    """Boundary size of every vertex subset, as a uint8 array of length 2^n."""
    size = 1 << n
    out = np.zeros(size, dtype=np.uint8)
    nbr = np.array(masks, dtype=np.int64)
    step = min(size, 1 << 22)
    for lo in range(0, size, step):
        subsets = np.arange(lo, min(lo + step, size), dtype=np.int64)
        outside = ~subsets
        acc = np.zeros(len(subsets), dtype=np.uint8)
        for u in range(n):
            inside = ((subsets >> u) & 1).astype(bool)
            has_out = (nbr[u] & outside) != 0
            acc += inside & has_out
        out[lo : lo + len(subsets)] = acc
    return out


def exact_dp(g: Graph) -> SolverReport:
    """Exact pathwidth by dynamic programming over vertex subsets.

    ``f(S) = max(boundary(S), min over v in S of f(S minus v))`` with
    ``f(empty) = 0``; ``f(V)`` is the pathwidth, and backtracking the
    minimising removals reconstructs an optimal ordering.  Runs in
    O(2^n * n) time and O(2^n) memory, capped at n <= 26.
    """
    if g.n > MAX_DP_VERTICES:
        raise GraphTooLargeError(
            f"subset DP needs a 2^n table; n={g.n} exceeds {MAX_DP_VERTICES}"
        )
    t0 = time.perf_counter()
    n = g.n
    if n == 0:
        return _empty_report(g, "dp")
    masks = [g.neighbour_mask(v) for v in range(n)]
    boundary = _boundary_sizes(masks, n)
    pc = _popcounts(n)
    f = np.zeros(1 << n, dtype=np.uint8)
    for k in range(1, n + 1):
        layer = np.nonzero(pc == k)[0]
        best_removal = np.full(len(layer), 255, dtype=np.uint8)
        for u in range(n):
            sel = ((layer >> u) & 1) == 1
            if not sel.any():
                continue
            prev = f[layer[sel] ^ (1 << u)]
            best_removal[sel] = np.minimum(best_removal[sel], prev)
        f[layer] = np.maximum(boundary[layer], best_removal)
    full = (1 << n) - 1
    width_value = int(f[full])
    # Walk back from the full set, always removing the smallest vertex that
    # keeps f non-increasing; reversing the removals gives an optimal order.
    order_rev: list[int] = []
    S = full
    while S:
        fs = f[S]
        for v in range(n):
            bit = 1 << v
            if S & bit and f[S ^ bit] <= fs:
                order_rev.append(v)
                S ^= bit
                break
        else:  # pragma: no cover - recurrence guarantees a removal exists
            raise AssertionError("dp backtracking failed")
    return _report_from_ordering(
        g,
        tuple(reversed(order_rev)),
        width_value=width_value,
        exact=True,
        method="dp",
        nodes=1 << n,
        elapsed=time.perf_counter() - t0,
    )


# -- branch and bound ------------------------------------------------------------------


class _SearchState:
    __slots__ = ("nodes", "deadline", "node_cap", "failed")

    def __init__(self, deadline: float | None, node_cap: int | None):
        self.nodes = 0
        self.deadline = deadline
        self.node_cap = node_cap
        self.failed: set[int] = set()

    def tick(self) -> None:
        self.nodes += 1
        if self.node_cap is not None and self.nodes > self.node_cap:
            raise SearchBudgetExceeded(f"node cap {self.node_cap} exhausted")
        if (
            self.deadline is not None
            and self.nodes % 256 == 0
            and time.monotonic() > self.deadline
        ):
            raise SearchBudgetExceeded("time budget exhausted")


def _updated_boundary(masks, S: int, B: int, v: int) -> int:
    """Boundary mask after adding ``v`` to the prefix set ``S`` (B = boundary of S)."""
    S2 = S | (1 << v)
    outside = ~S2
    B2 = B
    affected = masks[v] & B
    while affected:
        bit = affected & -affected
        affected ^= bit
        u = bit.bit_length() - 1
        if masks[u] & outside == 0:
            B2 ^= bit
    if masks[v] & outside:
        B2 |= 1 << v
    return B2


def decide_width_at_most(
    g: Graph,
    k: int,
    *,
    deadline: float | None = None,
    node_cap: int | None = None,
    state: _SearchState | None = None,
) -> tuple[bool, tuple[int, ...] | None]:
    """Decide whether some ordering keeps every prefix boundary within ``k``.

    Depth-first search over prefix extensions.  Prunes children whose
    boundary would exceed ``k``, memoises prefix sets (as bitmasks) that
    already failed at this ``k``, and applies a commit rule: a vertex whose
    whole neighbourhood is already placed can never enlarge any future
    boundary, so it is placed immediately without branching.  Returns a
    certificate ordering on success.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    n = g.n
    if n == 0:
        return True, ()
    masks = list(g._neighbour_masks)
    full = (1 << n) - 1
    st = state if state is not None else _SearchState(deadline, node_cap)
    order: list[int] = []

    def extend(S: int, B: int) -> bool:
        st.tick()
        if S == full:
            return True
        unplaced = full & ~S
        # commit rule: fully-surrounded vertices are free moves
        m = unplaced
        while m:
            bit = m & -m
            m ^= bit
            v = bit.bit_length() - 1
            if masks[v] & ~(S | bit) == 0 and masks[v] & ~S == masks[v] & ~S:
                pass
            if masks[v] & ~S == 0:
                B2 = _updated_boundary(masks, S, B, v)
                order.append(v)
                if extend(S | bit, B2):
                    return True
                order.pop()
                st.failed.add(S)
                return False
        children = []
        m = unplaced
        while m:
            bit = m & -m
            m ^= bit
            v = bit.bit_length() - 1
            B2 = _updated_boundary(masks, S, B, v)
            size = B2.bit_count()
            if size <= k and (S | bit) not in st.failed:
                children.append((size, v, bit, B2))
        children.sort()
        for _, v, bit, B2 in children:
            order.append(v)
            if extend(S | bit, B2):
                return True
            order.pop()
        st.failed.add(S)
        return False

    if extend(0, 0):
        return True, tuple(order)
    return False, None


def lower_bound(g: Graph) -> int:
    """Cheap pathwidth lower bound (degeneracy; never exceeds the exact width)."""
    return degeneracy(g)


def branch_and_bound(
    g: Graph,
    *,
    budget_seconds: float | None = None,
    node_cap: int | None = None,
) -> SolverReport:
    """Exact width via iterated decision searches, with graceful degradation.

    Runs ``decide_width_at_most`` for k = lower_bound(g), lower_bound(g)+1,
    ... and returns the first success.  Once every k below the greedy
    heuristic's width has failed, the heuristic ordering is already optimal
    and is returned directly.  If the time or node budget runs out the
    heuristic upper bound is returned with ``exact=False``.
    """
    t0 = time.perf_counter()
    if g.n == 0:
        return _empty_report(g, "bnb")
    lb = lower_bound(g)
    greedy = heuristic(g)
    deadline = time.monotonic() + budget_seconds if budget_seconds is not None else None
    st = _SearchState(deadline, node_cap)
    for k in range(lb, g.n):
        if k >= greedy.width:
            return _report_from_ordering(
                g,
                greedy.ordering,
                width_value=greedy.width,
                exact=True,
                method="bnb",
                nodes=st.nodes,
                elapsed=time.perf_counter() - t0,
                lb=lb,
            )
        st.failed = set()
        try:
            ok, order = decide_width_at_most(g, k, state=st)
        except SearchBudgetExceeded:
            return _report_from_ordering(
                g,
                greedy.ordering,
                width_value=greedy.width,
                exact=False,
                method="bnb",
                nodes=st.nodes,
                elapsed=time.perf_counter() - t0,
                lb=lb,
            )
        if ok:
            assert order is not None
            return _report_from_ordering(
                g,
                order,
                width_value=k,
                exact=True,
                method="bnb",
                nodes=st.nodes,
                elapsed=time.perf_counter() - t0,
                lb=lb,
            )
    raise AssertionError("search space exhausted without an ordering")  # pragma: no cover


# -- heuristics ----------------------------------------------------------------------

GREEDY_BOUNDARY = "greedy-boundary"
RANDOM_RESTART = "random-restart"


def _greedy_order(g: Graph, rng=None) -> tuple[int, ...]:
    """Append the vertex minimising the next boundary; break ties by id or rng."""
    import random as _random

    n = g.n
    masks = list(g._neighbour_masks)
    S = 0
    B = 0
    order: list[int] = []
    remaining = list(range(n))
    for _ in range(n):
        scored = []
        for v in remaining:
            B2 = _updated_boundary(masks, S, B, v)
            scored.append((B2.bit_count(), v, B2))
        best_size = min(s for s, _, _ in scored)
        tied = [(v, B2) for s, v, B2 in scored if s == best_size]
        if rng is None:
            v, B2 = tied[0]  # scored is in ascending v order
        else:
            v, B2 = rng.choice(tied)
        order.append(v)
        remaining.remove(v)
        S |= 1 << v
        B = B2
    return tuple(order)


def heuristic(
    g: Graph,
    strategy: str = GREEDY_BOUNDARY,
    seed: int = 0,
    restarts: int = 1,
) -> SolverReport:
    """Upper-bound the width with a greedy boundary-minimising ordering.

    ``greedy-boundary`` is deterministic (ties broken by ascending id).
    ``random-restart`` reruns the greedy construction ``restarts`` times,
    breaking ties with a per-restart generator derived from ``seed``, and
    keeps the minimum by (width, restart index), so results are identical
    regardless of how restarts are scheduled.
    """
    import random as _random

    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if strategy not in (GREEDY_BOUNDARY, RANDOM_RESTART):
        raise ValueError(f"unknown strategy {strategy!r}")
    t0 = time.perf_counter()
    if g.n == 0:
        return _empty_report(g, "heuristic")
    if strategy == GREEDY_BOUNDARY:
        best_order = _greedy_order(g)
        best_width = vertex_separation(g, best_order)
        nodes = g.n
    else:
        best_width, best_order = None, None
        for i in range(restarts):
            rng = _random.Random(f"{seed}:{i}")
            order = _greedy_order(g, rng)
            w = vertex_separation(g, order)
            if best_width is None or w < best_width:
                best_width, best_order = w, order
        nodes = g.n * restarts
    return _report_from_ordering(
        g,
        best_order,
        width_value=best_width,
        exact=False,
        method="heuristic",
        nodes=nodes,
        elapsed=time.perf_counter() - t0,
    )


# -- closed forms ----------------------------------------------------------------------


def closed_form(desc: FamilyDescriptor) -> int | None:
    """Known pathwidth for families with a formula; None when there is none.

    complete(n): n - 1.  grid(m, n): min(m, n) when both sides are at
    least 2, else the path value.  path(n): 1 for n >= 2 else 0.
    cycle(n): 2.  No formula is used for caterpillar or random graphs.
    """
    kind, p = desc.kind, desc.params
    if kind == "complete":
        return max(p[0] - 1, 0)
    if kind == "path":
        return 1 if p[0] >= 2 else 0
    if kind == "cycle":
        return 2
    if kind == "grid":
        m, n = p
        if m == 1 and n == 1:
            return 0
        if min(m, n) == 1:
            return 1
        return min(m, n)
    return None
