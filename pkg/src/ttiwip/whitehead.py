"""Whitehead graphs of train-track maps and the clean / weakly clean tests.

The Whitehead graph at a vertex has the outgoing oriented edges as nodes, two
of them adjacent when their turn is taken by the map.  Connectivity of all of
these graphs, combined with a fully positive matrix power, is the clean
property; weakly clean relaxes the positive power to irreducible + expanding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import GraphMap, edge_key, is_degenerate
from .traintrack import (
    TurnClosure,
    is_expanding,
    is_irreducible,
    is_train_track,
    primitive_exponent,
    taken_turn_closure,
    transition_matrix,
)


@dataclass(frozen=True)
class WhiteheadGraph:
    """Simple graph on the oriented edges leaving one vertex; adjacency comes
    from non-degenerate taken turns."""

    vertex: int
    nodes: tuple[int, ...]
    adjacency: frozenset[tuple[int, int]]

    def neighbors(self, e: int) -> list[int]:
        out = []
        for u, v in self.adjacency:
            if u == e:
                out.append(v)
            elif v == e:
                out.append(u)
        return sorted(out, key=edge_key)

    def is_connected(self) -> bool:
        """A graph on no nodes counts as connected; two or more nodes need
        actual adjacency reaching everything."""
        if not self.nodes:
            return True
        seen = {self.nodes[0]}
        queue = [self.nodes[0]]
        while queue:
            for w in self.neighbors(queue.pop(0)):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.nodes)

    def components(self) -> list[tuple[int, ...]]:
        """Connected components, each sorted, listed by least member."""
        remaining = list(self.nodes)
        comps = []
        while remaining:
            start = remaining[0]
            seen = {start}
            queue = [start]
            while queue:
                for w in self.neighbors(queue.pop(0)):
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            comps.append(tuple(sorted(seen, key=edge_key)))
            remaining = [e for e in remaining if e not in seen]
        return sorted(comps, key=lambda c: edge_key(c[0]))


def whitehead_graph(
    f: GraphMap, v: int, closure: Optional[TurnClosure] = None
) -> WhiteheadGraph:
    """Whitehead graph at v; only defined for verified train-track maps."""
    if closure is None:
        closure = taken_turn_closure(f)
    if closure.degenerate_turns():
        raise ValueError("not a train-track map; Whitehead graphs undefined")
    nodes = tuple(sorted(f.graph.edges_at(v), key=edge_key))
    node_set = set(nodes)
    adjacency = frozenset(
        t
        for t in closure.taken
        if not is_degenerate(t) and t[0] in node_set and t[1] in node_set
    )
    return WhiteheadGraph(v, nodes, adjacency)


def whitehead_graphs(
    f: GraphMap, closure: Optional[TurnClosure] = None
) -> list[WhiteheadGraph]:
    if closure is None:
        closure = taken_turn_closure(f)
    return [
        whitehead_graph(f, v, closure) for v in range(f.graph.vertex_count)
    ]


@dataclass(frozen=True)
class CleanReport:
    """All sub-verdicts feeding the clean decision.

    clean = some matrix power fully positive and every Whitehead graph
    connected; weakly_clean = irreducible matrix, expanding, and every
    Whitehead graph connected.  Clean implies weakly clean: a positive power
    gives irreducibility, and expansion can only fail on a single unit loop,
    whose Whitehead graph is disconnected.
    """

    is_train_track: bool
    primitive_exponent: Optional[int]
    irreducible: bool
    expanding: bool
    whitehead_connected: tuple[bool, ...]
    clean: bool
    weakly_clean: bool


def is_clean(f: GraphMap, closure: Optional[TurnClosure] = None) -> CleanReport:
    if closure is None:
        closure = taken_turn_closure(f)
    if not is_train_track(f, closure):
        raise ValueError("not a train-track map; clean test undefined")
    a = transition_matrix(f)
    exponent = primitive_exponent(f)
    irreducible = is_irreducible(a)
    expanding = is_expanding(f).expanding
    connected = tuple(w.is_connected() for w in whitehead_graphs(f, closure))
    clean = exponent is not None and all(connected)
    weakly = irreducible and expanding and all(connected)
    return CleanReport(
        is_train_track=True,
        primitive_exponent=exponent,
        irreducible=irreducible,
        expanding=expanding,
        whitehead_connected=connected,
        clean=clean,
        weakly_clean=weakly,
    )


def is_weakly_clean(f: GraphMap, closure: Optional[TurnClosure] = None) -> bool:
    return is_clean(f, closure).weakly_clean
