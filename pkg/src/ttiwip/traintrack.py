"""Train-track verification and transition-matrix dynamics.

A graph self-map is a train-track map when every iterated edge image stays
tight.  That is decided here combinatorially: cancellation in an iterate can
only happen at a turn of the previous iterate, and those turns are exactly the
derivative-map iterates of turns contained in edge images.  So the map is a
train-track map iff the closure of the edge-image turns under the derivative
map contains no degenerate turn.

All matrix work is exact: entries are Python ints, so positivity claims about
high powers are load-bearing facts, not float artifacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .graphs import (
    EdgePath,
    GraphMap,
    edge_key,
    is_degenerate,
    make_turn,
    turns_in_path,
)

Turn = tuple[int, int]


class InternalCheckError(RuntimeError):
    """Two independent computations of the same fact disagreed."""


# --- taken turns and the train-track test ------------------------------------


@dataclass(frozen=True)
class TurnClosure:
    """Turns contained in edge images (seed) closed under the derivative map.

    Degenerate turns produced during closure are retained so the train-track
    test can see them; provenance records, per turn, a witnessing edge e and
    depth n with the turn contained in f^n(e).
    """

    seed: frozenset[Turn]
    taken: frozenset[Turn]
    provenance: dict[Turn, tuple[Optional[Turn], int, int]]  # parent, edge, depth
    closed: bool = True

    def degenerate_turns(self) -> list[Turn]:
        return sorted((t for t in self.taken if is_degenerate(t)), key=lambda t: edge_key(t[0]))

    def witness_chain(self, turn: Turn) -> list[tuple[Turn, int, int]]:
        """Chain (turn, witness edge, depth) from a seed turn down to ``turn``."""
        chain = []
        cur: Optional[Turn] = turn
        while cur is not None:
            parent, edge, depth = self.provenance[cur]
            chain.append((cur, edge, depth))
            cur = parent
        chain.reverse()
        return chain


def taken_turn_closure(f: GraphMap) -> TurnClosure:
    seed: set[Turn] = set()
    provenance: dict[Turn, tuple[Optional[Turn], int, int]] = {}
    for e in f.graph.oriented_edges():
        for t in sorted(turns_in_path(f.image(e)), key=lambda t: (edge_key(t[0]), edge_key(t[1]))):
            if t not in provenance:
                provenance[t] = (None, e, 1)
            seed.add(t)
    taken = set(seed)
    frontier = sorted(seed, key=lambda t: (edge_key(t[0]), edge_key(t[1])))
    while frontier:
        new_frontier = []
        for t in frontier:
            image = make_turn(f.derivative(t[0]), f.derivative(t[1]))
            if image not in taken:
                taken.add(image)
                _, edge, depth = provenance[t]
                provenance[image] = (t, edge, depth + 1)
                new_frontier.append(image)
        frontier = new_frontier
    return TurnClosure(frozenset(seed), frozenset(taken), provenance)


def is_train_track(f: GraphMap, closure: Optional[TurnClosure] = None) -> bool:
    if closure is None:
        closure = taken_turn_closure(f)
    return not closure.degenerate_turns()


# --- transition matrices ------------------------------------------------------


@dataclass(frozen=True)
class TransitionMatrix:
    """Square nonnegative integer matrix: entry (i, j) counts occurrences of
    topological edge i+1 (either orientation) in the image of edge j+1."""

    entries: tuple[tuple[int, ...], ...]
    edge_names: tuple[str, ...]

    def __post_init__(self):
        r = len(self.entries)
        for row in self.entries:
            if len(row) != r:
                raise ValueError("matrix is not square")
            for a in row:
                if a < 0:
                    raise ValueError("negative entry")
        if len(self.edge_names) != r:
            raise ValueError("edge_names length mismatch")

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.entries[ij[0]][ij[1]]

    def is_positive(self) -> bool:
        return all(a > 0 for row in self.entries for a in row)

    def column_sums(self) -> tuple[int, ...]:
        r = self.dimension
        return tuple(sum(self.entries[i][j] for i in range(r)) for j in range(r))

    def mul(self, other: "TransitionMatrix") -> "TransitionMatrix":
        r = self.dimension
        if other.dimension != r:
            raise ValueError("dimension mismatch")
        cols = [tuple(other.entries[k][j] for k in range(r)) for j in range(r)]
        rows = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
            for row in self.entries
        )
        return TransitionMatrix(rows, self.edge_names)

    def power(self, m: int) -> "TransitionMatrix":
        if m < 0:
            raise ValueError("need m >= 0")
        result = identity_matrix(self.dimension, self.edge_names)
        base = self
        while m:
            if m & 1:
                result = result.mul(base)
            m >>= 1
            if m:
                base = base.mul(base)
        return result

    def grid_str(self) -> str:
        width = max((len(str(a)) for row in self.entries for a in row), default=1)
        return "\n".join(
            " ".join(str(a).rjust(width) for a in row) for row in self.entries
        )


def identity_matrix(r: int, edge_names: tuple[str, ...]) -> TransitionMatrix:
    return TransitionMatrix(
        tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r)),
        edge_names,
    )


def transition_matrix(f: GraphMap) -> TransitionMatrix:
    g = f.graph
    r = g.edge_count
    rows = [[0] * r for _ in range(r)]
    for j in range(1, r + 1):
        for e in f.edge_images[j - 1].edges:
            rows[abs(e) - 1][j - 1] += 1
    return TransitionMatrix(tuple(tuple(row) for row in rows), g.edge_names)


def matrix_power(a: TransitionMatrix, m: int) -> TransitionMatrix:
    return a.power(m)


def _arcs_from(a: TransitionMatrix) -> list[list[int]]:
    """Arc j -> i iff entry (i, j) > 0, i.e. the image of edge j crosses edge i."""
    r = a.dimension
    out: list[list[int]] = [[] for _ in range(r)]
    for j in range(r):
        for i in range(r):
            if a.entries[i][j] > 0:
                out[j].append(i)
    return out


def _strongly_connected_components(adj: list[list[int]]) -> list[list[int]]:
    """Kosaraju; components in reverse topological order of the condensation."""
    n = len(adj)
    order: list[int] = []
    seen = [False] * n
    for s in range(n):
        if seen[s]:
            continue
        stack = [(s, 0)]
        seen[s] = True
        while stack:
            v, i = stack.pop()
            if i < len(adj[v]):
                stack.append((v, i + 1))
                w = adj[v][i]
                if not seen[w]:
                    seen[w] = True
                    stack.append((w, 0))
            else:
                order.append(v)
    radj: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for w in adj[v]:
            radj[w].append(v)
    comp = [-1] * n
    comps: list[list[int]] = []
    for s in reversed(order):
        if comp[s] != -1:
            continue
        index = len(comps)
        members = [s]
        comp[s] = index
        queue = [s]
        while queue:
            v = queue.pop(0)
            for w in radj[v]:
                if comp[w] == -1:
                    comp[w] = index
                    members.append(w)
                    queue.append(w)
        comps.append(sorted(members))
    return comps


def is_irreducible(a: TransitionMatrix) -> bool:
    """True iff every edge index reaches every other through positive entries
    of powers; equivalently the occurrence digraph is a single strongly
    connected component (a lone index needs a self-loop)."""
    r = a.dimension
    if r == 1:
        return a.entries[0][0] > 0
    comps = _strongly_connected_components(_arcs_from(a))
    return len(comps) == 1


def wielandt_bound(r: int) -> int:
    """Power bound: a primitive r x r matrix has a fully positive power by
    exponent (r-1)^2 + 1."""
    return (r - 1) * (r - 1) + 1


def minimal_primitive_exponent(a: TransitionMatrix) -> Optional[int]:
    """Least m >= 1 with a^m entrywise positive, or None if no power is.

    Scans powers up to the (r-1)^2 + 1 bound; past it a matrix with a
    non-positive power has none at all.
    """
    power = a
    for m in range(1, wielandt_bound(a.dimension) + 1):
        if power.is_positive():
            return m
        power = power.mul(a)
    return None


# --- periodicity of vertices and edge directions ------------------------------


@dataclass(frozen=True)
class PeriodicityData:
    """Orbit data of the finite vertex map and the derivative map: vertex ->
    period for periodic vertices, oriented edge -> period for edges whose
    iterated image starts with themselves, and the lcm of all periods."""

    vertex_periods: dict[int, int]
    edge_periods: dict[int, int]
    global_period: int


def _cycle_periods(points: list[int], step) -> dict[int, int]:
    periods: dict[int, int] = {}
    for x in points:
        seen = {x: 0}
        cur = x
        for n in range(1, len(points) + 1):
            cur = step(cur)
            if cur == x:
                periods[x] = n
                break
            if cur in seen:
                break  # x leads into a cycle not through x
            seen[cur] = n
    return periods


def periodicity(f: GraphMap) -> PeriodicityData:
    g = f.graph
    vertex_periods = _cycle_periods(
        list(range(g.vertex_count)), lambda v: f.vertex_map[v]
    )
    edge_periods = _cycle_periods(g.oriented_edges(), f.derivative)
    s = 1
    for p in list(vertex_periods.values()) + list(edge_periods.values()):
        s = math.lcm(s, p)
    return PeriodicityData(vertex_periods, edge_periods, s)


# --- expansion ----------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionReport:
    """Per-topological-edge growth classification: True means the iterated
    image lengths tend to infinity.  ``expanding`` is the any-edge verdict."""

    expanding: bool
    per_edge: tuple[bool, ...]


def _bounded_growth_oracle(a: TransitionMatrix) -> tuple[bool, ...]:
    """Exact growth decision from iterated image lengths.

    Lengths |f^n(e)| are the column sums of a^n and are nondecreasing.  An
    edge's lengths are bounded iff they are constant on [r+1, 3r+2]: bounded
    growth stabilizes by step r+1 (a later increase could be pumped through a
    repeated digraph vertex forever), and constancy over a window of length
    2r+1 forces the support to stay among unit-length edges forever.
    """
    r = a.dimension
    lengths = [tuple([1] * r)]
    row = tuple([1] * r)
    for _ in range(3 * r + 2):
        row = tuple(
            sum(row[i] * a.entries[i][j] for i in range(r)) for j in range(r)
        )
        lengths.append(row)
    return tuple(lengths[r + 1][j] < lengths[3 * r + 2][j] for j in range(r))


def is_expanding(f: GraphMap) -> ExpansionReport:
    """Classify each edge by the component structure of the occurrence digraph,
    cross-checked against exact symbolic lengths; disagreement is an internal
    error."""
    a = transition_matrix(f)
    r = a.dimension
    adj = _arcs_from(a)
    comps = _strongly_connected_components(adj)
    comp_of = [0] * r
    for idx, members in enumerate(comps):
        for v in members:
            comp_of[v] = idx

    def nontrivial(members: list[int]) -> bool:
        if len(members) > 1:
            return True
        v = members[0]
        return a.entries[v][v] > 0

    def unit_simple_cycle(members: list[int]) -> bool:
        inside = set(members)
        return all(
            sum(a.entries[i][u] for i in inside) == 1 for u in members
        )

    # condensation reachability
    n_comp = len(comps)
    cadj: list[set[int]] = [set() for _ in range(n_comp)]
    for v in range(r):
        for w in adj[v]:
            if comp_of[v] != comp_of[w]:
                cadj[comp_of[v]].add(comp_of[w])
    creach: list[set[int]] = []
    for c in range(n_comp):
        seen = {c}
        queue = [c]
        while queue:
            x = queue.pop(0)
            for y in cadj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        creach.append(seen)

    fat = [nontrivial(m) and not unit_simple_cycle(m) for m in comps]
    heavy = [nontrivial(m) for m in comps]

    per_edge = []
    for j in range(r):
        reach = creach[comp_of[j]]
        grows = any(fat[c] for c in reach)
        if not grows:
            cycles = [c for c in reach if heavy[c]]
            grows = any(
                c1 != c2 and c2 in creach[c1] for c1 in cycles for c2 in cycles
            )
        per_edge.append(grows)

    oracle = _bounded_growth_oracle(a)
    if tuple(per_edge) != oracle:
        raise InternalCheckError(
            f"expansion classification {per_edge} disagrees with symbolic "
            f"length oracle {oracle}"
        )
    return ExpansionReport(any(per_edge), tuple(per_edge))


# --- primitivity by support tracking ------------------------------------------


@dataclass(frozen=True)
class SupportTrackingResult:
    """Outcome of the support-tracking primitivity procedure.

    When the preconditions (irreducible matrix, every edge growing) fail the
    procedure does not run and ``exists`` is None; otherwise ``exists`` is the
    decision and, when True, ``witness_exponent`` is an exponent with a fully
    positive matrix power (not necessarily minimal).
    """

    preconditions_ok: bool
    exists: Optional[bool]
    witness_exponent: Optional[int]
    diagnostics: tuple[str, ...]


def primitivity_by_support_tracking(f: GraphMap) -> SupportTrackingResult:
    """Decide existence of a fully positive matrix power by tracking edge
    supports of iterated images of periodic edges.

    Pick s with every periodic vertex fixed and every periodic edge direction
    fixed by the s-th iterate, then the least multiple k of s at which every
    edge image has length >= 2.  For the k-th iterate g, the support of the
    iterates of a periodic edge grows monotonically; if it stabilizes short of
    the whole graph no positive power exists.  Otherwise, with t the support
    stabilization time and b the steps needed for every edge direction to
    become periodic under g, the (b+t)-th power of g's matrix is positive.
    """
    a = transition_matrix(f)
    r = a.dimension
    diagnostics = []
    if not is_irreducible(a):
        diagnostics.append("transition matrix is reducible")
    growth = is_expanding(f)
    if not all(growth.per_edge):
        lazy = [f.graph.edge_names[j] for j in range(r) if not growth.per_edge[j]]
        diagnostics.append(f"edges with bounded growth: {', '.join(lazy)}")
    if diagnostics:
        return SupportTrackingResult(False, None, None, tuple(diagnostics))

    s = periodicity(f).global_period
    k = None
    b_matrix = None
    multiple = 0
    # all edges grow, so some multiple of s pushes every image length to >= 2
    while k is None:
        multiple += 1
        candidate = a.power(s * multiple)
        if all(c >= 2 for c in candidate.column_sums()):
            k = s * multiple
            b_matrix = candidate
        if multiple > 4 * r * r + 4:
            raise InternalCheckError(
                "image lengths failed to reach 2 despite per-edge growth"
            )

    supports_full_at: list[int] = []
    periodic_edges = sorted(periodicity(f).edge_periods, key=edge_key)
    for e in periodic_edges:
        supp = frozenset(
            i for i in range(r) if b_matrix.entries[i][abs(e) - 1] > 0
        )
        t = 1
        while True:
            nxt = frozenset(
                i for i in range(r) if any(b_matrix.entries[i][x] > 0 for x in supp)
            )
            if nxt == supp:
                break
            supp = nxt
            t += 1
        if len(supp) != r:
            return SupportTrackingResult(
                True,
                False,
                None,
                (f"iterates of periodic edge {f.graph.edge_name(e)} stay in a "
                 f"proper invariant subgraph of {len(supp)} edges",),
            )
        supports_full_at.append(t)
    t = max(supports_full_at)

    g_derivative = {e: e for e in f.graph.oriented_edges()}
    for _ in range(k):
        g_derivative = {e: f.derivative(g_derivative[e]) for e in g_derivative}
    periodic_set = set(periodic_edges)
    b = 1
    for e in f.graph.oriented_edges():
        steps = 0
        cur = e
        while cur not in periodic_set:
            cur = g_derivative[cur]
            steps += 1
            if steps > 2 * r + 1:
                raise InternalCheckError("derivative orbit failed to reach a cycle")
        b = max(b, steps)

    return SupportTrackingResult(True, True, k * (b + t), ())


def primitive_exponent(f: GraphMap) -> Optional[int]:
    """Minimal m with the m-th matrix power fully positive, or None.

    The minimal value comes from exact power scanning; when its preconditions
    hold, the support-tracking procedure is run as an independent existence
    check and disagreement raises an internal error.
    """
    a = transition_matrix(f)
    minimal = minimal_primitive_exponent(a)
    tracked = primitivity_by_support_tracking(f)
    if tracked.preconditions_ok:
        if tracked.exists != (minimal is not None):
            raise InternalCheckError(
                f"support tracking says exists={tracked.exists}, power scan "
                f"says {minimal}"
            )
        if tracked.exists and not a.power(tracked.witness_exponent).is_positive():
            raise InternalCheckError(
                f"support-tracking witness exponent {tracked.witness_exponent} "
                "is not actually positive"
            )
    return minimal


# --- combinatorial eigenrays ---------------------------------------------------


def eigenray_prefix(f: GraphMap, length: int, length_cap: int = 10**6) -> EdgePath:
    """Prefix of the nested ray swept out by a growing periodic edge.

    Uses the least periodic edge e0 (in edge order) whose own period s has
    |f^s(e0)| >= 2; the iterates of e0 under the s-th power are nested, and
    their union is a ray fixed by that power.
    """
    if length < 1:
        raise ValueError("need length >= 1")
    per = periodicity(f)
    a = transition_matrix(f)
    choice = None
    for e in sorted(per.edge_periods, key=edge_key):
        s = per.edge_periods[e]
        if a.power(s).column_sums()[abs(e) - 1] >= 2:
            choice = (e, s)
            break
    if choice is None:
        raise ValueError("no periodic edge has a growing image; no eigenray")
    e0, s = choice
    g = f.power(s)
    path = EdgePath(f.graph.origin(e0), (e0,))
    while len(path) < length:
        nxt = g.map_path(path)
        if path.edges != nxt.edges[: len(path)]:
            raise InternalCheckError("eigenray iterates are not nested")
        path = nxt
        if len(path) > length_cap:
            break
    return EdgePath(path.start, path.edges[:length])
