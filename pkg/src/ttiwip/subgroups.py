"""Stallings cores over a base graph and finite-window lamination carriage.

A finitely generated subgroup is represented by its core: the folded, fully
trimmed labeled graph immersing into the base.  The core is basepoint-free and
conjugacy invariant.  Leaf segments are the length-L windows of iterated edge
images of a train-track map; a subgroup that carries a bi-infinite leaf must
lift every window, so failing to lift some window at some L refutes carriage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .folding import fold_labeled_graph
from .graphs import EdgePath, Graph, GraphMap, edge_key, rose
from .traintrack import is_train_track, minimal_primitive_exponent, transition_matrix
from .words import Word


def segment_sort_key(segment: tuple[int, ...]) -> tuple:
    return tuple(edge_key(e) for e in segment)


@dataclass(frozen=True)
class CoreGraph:
    """Labeled immersion over a base graph.

    Core edge k (1-based, positively oriented) runs from ``edges[k-1][0]`` to
    ``edges[k-1][1]`` and carries the positive base edge ``labels[k-1]``; its
    reverse carries the inverse label.  ``vertex_base`` places each core
    vertex over a base vertex.  Immersion: distinct edges at a vertex carry
    distinct oriented labels.  Every vertex has degree >= 2 after trimming.
    """

    base: Graph
    vertex_base: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        seen: set[tuple[int, int]] = set()
        degree = [0] * len(self.vertex_base)
        for k in range(1, len(self.edges) + 1):
            u, v = self.edges[k - 1]
            label = self.labels[k - 1]
            if self.vertex_base[u] != self.base.origin(label):
                raise ValueError(f"core edge {k} origin sits over the wrong base vertex")
            if self.vertex_base[v] != self.base.terminus(label):
                raise ValueError(f"core edge {k} terminus sits over the wrong base vertex")
            degree[u] += 1
            degree[v] += 1
            for vertex, oriented in ((u, label), (v, -label)):
                if (vertex, oriented) in seen:
                    raise ValueError(
                        f"not an immersion: two edges labeled "
                        f"{self.base.edge_name(oriented)} at vertex {vertex}"
                    )
                seen.add((vertex, oriented))
        if any(d < 2 for d in degree):
            raise ValueError("core has a vertex of degree < 2; not fully trimmed")
        reached = {0}
        queue = [0]
        adjacency: dict[int, set[int]] = {}
        for u, v in self.edges:
            adjacency.setdefault(u, set()).add(v)
            adjacency.setdefault(v, set()).add(u)
        while queue:
            for w in adjacency.get(queue.pop(0), ()):
                if w not in reached:
                    reached.add(w)
                    queue.append(w)
        if len(reached) != len(self.vertex_base):
            raise ValueError("core is not connected")

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_base)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_map(self) -> dict[tuple[int, int], int]:
        """(vertex, oriented base label) -> target vertex, one step of lifting."""
        out: dict[tuple[int, int], int] = {}
        for k in range(1, self.edge_count + 1):
            u, v = self.edges[k - 1]
            label = self.labels[k - 1]
            out[(u, label)] = v
            out[(v, -label)] = u
        return out

    def degree(self, v: int) -> int:
        return sum(1 for (u, _lab) in self.out_map() if u == v)


def _trim(edges: list[tuple[int, int, int]], protect: Optional[int]) -> list[tuple[int, int, int]]:
    """Drop edges hanging off degree-1 vertices (optionally sparing one vertex)."""
    alive = list(edges)
    while True:
        deg: dict[int, int] = {}
        for u, v, _ in alive:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        keep = []
        dropped = False
        for u, v, label in alive:
            hanging = (deg[u] == 1 and u != protect) or (deg[v] == 1 and v != protect)
            if hanging:
                dropped = True
            else:
                keep.append((u, v, label))
        if not dropped:
            return keep
        alive = keep


def _canonical_core(
    base: Graph, vertex_base: dict[int, int], edges: list[tuple[int, int, int]]
) -> CoreGraph:
    """Renumber vertices by BFS from the least vertex, exploring labels in
    order, so equal cores get equal representations."""
    if not edges:
        raise ValueError("trivial subgroup has no core")
    adjacency: dict[int, list[tuple[int, int]]] = {}
    for u, v, label in edges:
        adjacency.setdefault(u, []).append((label, v))
        adjacency.setdefault(v, []).append((-label, u))
    start = min(adjacency)
    order = {start: 0}
    queue = [start]
    while queue:
        v = queue.pop(0)
        for _, w in sorted(adjacency[v]):
            if w not in order:
                order[w] = len(order)
                queue.append(w)
    if len(order) != len(adjacency):
        raise ValueError("core is not connected")
    new_edges = sorted(
        (order[u], order[v], label) for u, v, label in edges
    )
    vb = [0] * len(order)
    for old, new in order.items():
        vb[new] = vertex_base[old]
    return CoreGraph(
        base,
        tuple(vb),
        tuple((u, v) for u, v, _ in new_edges),
        tuple(label for _, _, label in new_edges),
    )


def stallings_core(loops: Sequence[EdgePath], base: Graph) -> CoreGraph:
    """Fold the wedge of the given loops and trim to the conjugacy core.

    Loops must be tight and share a base vertex.  The basepoint is trimmed
    along with everything else, so conjugate subgroups get equal cores.
    """
    if not loops:
        raise ValueError("trivial subgroup has no core")
    basepoint_base = loops[0].start
    for p in loops:
        if p.start != basepoint_base:
            raise ValueError("generator loops must share a base vertex")
        base.check_path(p)
        if base.tighten(p) != p:
            raise ValueError("generator loops must be tight")
        if p.edges and base.terminus(p.edges[-1]) != basepoint_base:
            raise ValueError("generators must be loops")
    edges: list[tuple[int, int, int]] = []
    vertex_base: dict[int, int] = {0: basepoint_base}
    n_vertices = 1
    for p in loops:
        prev = 0
        for i, e in enumerate(p.edges):
            nxt = 0 if i == len(p.edges) - 1 else n_vertices
            if nxt != 0:
                vertex_base[nxt] = base.terminus(e)
                n_vertices += 1
            if e > 0:
                edges.append((prev, nxt, e))
            else:
                edges.append((nxt, prev, -e))
            prev = nxt
    vmap, folded = fold_labeled_graph(n_vertices, edges)
    folded_base: dict[int, int] = {}
    for old, bv in vertex_base.items():
        folded_base[vmap[old]] = bv
    trimmed = _trim(folded, protect=None)
    return _canonical_core(base, folded_base, trimmed)


def core_of_words(generators: Sequence[Word], rank: int) -> CoreGraph:
    """Core of the subgroup of the rank-rose's fundamental group generated by
    the given words (letters read as rose edges)."""
    g = rose(rank)
    loops = [g.path(0, w.letters) for w in generators]
    return stallings_core(loops, g)


def is_finite_index(core: CoreGraph) -> bool:
    """True iff the immersion is a covering: every vertex has one outgoing edge
    per oriented base label.  For coverings the index is the vertex count."""
    out = core.out_map()
    for v in range(core.vertex_count):
        for e in core.base.oriented_edges():
            if core.base.origin(e) != core.vertex_base[v]:
                continue
            if (v, e) not in out:
                return False
    return True


def lift_path(core: CoreGraph, path: EdgePath) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Whether the tight base path lifts into the core from some start vertex.

    Lifting is deterministic per start (immersion); the witness is the vertex
    sequence of the first successful lift in vertex order.
    """
    core.base.check_path(path)
    out = core.out_map()
    for start in range(core.vertex_count):
        if core.vertex_base[start] != path.start:
            continue
        trace = [start]
        at: Optional[int] = start
        for e in path.edges:
            at = out.get((at, e))
            if at is None:
                break
            trace.append(at)
        if at is not None:
            return True, tuple(trace)
    return False, None


@dataclass(frozen=True)
class BasedSubgroupGraph:
    """Folded based graph of a subgroup of a rose fundamental group; keeps the
    basepoint so membership can be tested by tracing loops."""

    rank: int
    basepoint: int
    out: dict[tuple[int, int], int]

    def contains(self, w: Word) -> bool:
        at: Optional[int] = self.basepoint
        for x in w.letters:
            at = self.out.get((at, x))
            if at is None:
                return False
        return at == self.basepoint


def based_subgroup_graph(generators: Sequence[Word], rank: int) -> BasedSubgroupGraph:
    g = rose(rank)
    edges: list[tuple[int, int, int]] = []
    n_vertices = 1
    for w in generators:
        prev = 0
        for i, x in enumerate(w.letters):
            nxt = 0 if i == len(w.letters) - 1 else n_vertices
            if nxt != 0:
                n_vertices += 1
            if x > 0:
                edges.append((prev, nxt, x))
            else:
                edges.append((nxt, prev, -x))
            prev = nxt
    vmap, folded = fold_labeled_graph(n_vertices, edges)
    out: dict[tuple[int, int], int] = {}
    for u, v, label in folded:
        out[(u, label)] = v
        out[(v, -label)] = u
    return BasedSubgroupGraph(rank, vmap[0], out)


def core_isomorphic(a: CoreGraph, b: CoreGraph) -> bool:
    """Label-respecting graph isomorphism.  Immersions are rigid: a candidate
    image of one vertex extends deterministically or not at all."""
    if a.base != b.base:
        return False
    if a.vertex_count != b.vertex_count or a.edge_count != b.edge_count:
        return False
    out_a = a.out_map()
    out_b = b.out_map()
    labels_at_a0 = sorted(lab for (v, lab) in out_a if v == 0)
    for cand in range(b.vertex_count):
        if b.vertex_base[cand] != a.vertex_base[0]:
            continue
        if sorted(lab for (v, lab) in out_b if v == cand) != labels_at_a0:
            continue
        mapping = {0: cand}
        queue = [0]
        ok = True
        while queue and ok:
            v = queue.pop(0)
            for (u, lab), target in sorted(out_a.items()):
                if u != v:
                    continue
                image = out_b.get((mapping[v], lab))
                if image is None:
                    ok = False
                    break
                if target in mapping:
                    if mapping[target] != image:
                        ok = False
                        break
                else:
                    mapping[target] = image
                    queue.append(target)
        if ok and len(mapping) == a.vertex_count and len(set(mapping.values())) == a.vertex_count:
            return True
    return False


# --- core serialization ---------------------------------------------------------


def print_core(core: CoreGraph) -> str:
    """Graph file format with a label field per edge."""
    doc = {
        "vertices": core.vertex_count,
        "vertex_base": list(core.vertex_base),
        "edges": [
            [f"e{k}", core.edges[k][0], core.edges[k][1], core.base.edge_name(core.labels[k])]
            for k in range(core.edge_count)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_core(text: str, base: Graph) -> CoreGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed core JSON: {exc}") from exc
    for key in ("vertices", "vertex_base", "edges"):
        if key not in doc:
            raise ValueError(f"core file misses key {key!r}")
    edges = tuple((int(e[1]), int(e[2])) for e in doc["edges"])
    labels = tuple(base.parse_edge(e[3]) for e in doc["edges"])
    return CoreGraph(base, tuple(int(v) for v in doc["vertex_base"]), edges, labels)


# --- leaf segments ---------------------------------------------------------------


@dataclass(frozen=True)
class LeafSegmentSet:
    """All length-L windows of iterated edge images, inversion closed; stable
    under one more transfer round.  ``truncated`` marks a capped computation."""

    length: int
    segments: frozenset[tuple[int, ...]]
    rounds: int
    truncated: bool = False


MAX_WINDOW = 64
MAX_SEGMENTS = 10**6


def _windows(edges: tuple[int, ...], length: int) -> set[tuple[int, ...]]:
    return {
        edges[i: i + length] for i in range(len(edges) - length + 1)
    }


def leaf_segments(f: GraphMap, length: int, max_rounds: int = 10**6) -> LeafSegmentSet:
    """Close the window set under the subpath-transfer map.

    Seeds: for each oriented edge, the windows of the first iterate long
    enough to have any.  Transfer: windows of the image of a window.  A
    length-L window of the image of a path lies inside the image of one of
    the path's length-L windows, so the closure captures every window of
    every iterate.
    """
    if length < 1:
        raise ValueError("need window length >= 1")
    if length > MAX_WINDOW:
        raise ValueError(f"window length capped at {MAX_WINDOW}")
    if not is_train_track(f):
        raise ValueError("leaf segments require a train-track map")
    if minimal_primitive_exponent(transition_matrix(f)) is None:
        raise ValueError(
            "leaf segments require a map with a fully positive matrix power"
        )
    g = f.graph
    segments: set[tuple[int, ...]] = set()
    truncated = False
    for e in g.oriented_edges():
        path = f.map_path(EdgePath(g.origin(e), (e,)))
        for _ in range(4 * g.edge_count * g.edge_count + 4 + length):
            if len(path) >= length:
                break
            path = f.map_path(path)
        segments |= _windows(path.edges, length)
    frontier = set(segments)
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > max_rounds:
            truncated = True
            break
        new: set[tuple[int, ...]] = set()
        for seg in frontier:
            image = f.map_path(EdgePath(g.origin(seg[0]), seg))
            for w in _windows(image.edges, length):
                if w not in segments:
                    segments.add(w)
                    new.add(w)
            if len(segments) > MAX_SEGMENTS:
                return LeafSegmentSet(length, frozenset(segments), rounds, True)
        frontier = new
    return LeafSegmentSet(length, frozenset(segments), rounds, truncated)


def carries_segments(core: CoreGraph, f: GraphMap, length: int) -> bool:
    """Whether every window of the given length lifts into the core.

    True at a window size is evidence of carriage up to that size; False
    refutes carriage of any leaf whose windows exhaust the segment set.
    """
    segs = leaf_segments(f, length)
    return all(
        lift_path(core, EdgePath(f.graph.origin(s[0]), s))[0]
        for s in sorted(segs.segments, key=segment_sort_key)
    )


def first_refutation(
    core: CoreGraph, f: GraphMap, max_length: int
) -> Optional[tuple[int, tuple[int, ...]]]:
    """Least window size whose segment set does not fully lift, with one
    non-lifting window; None when everything lifts up to max_length."""
    for length in range(1, max_length + 1):
        segs = leaf_segments(f, length)
        for s in sorted(segs.segments, key=segment_sort_key):
            if not lift_path(core, EdgePath(f.graph.origin(s[0]), s))[0]:
                return length, s
    return None
