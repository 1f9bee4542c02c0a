"""Vertex blow-ups and reduction witnesses.

Splitting each vertex into one sub-vertex per Whitehead component (plus a
center joined to the sub-vertices by new sub-edges) turns an expanding
train-track map with a disconnected Whitehead graph into a map that visibly
preserves a proper subgraph: the union of the original edges.  Verifying such
a subgraph as a reduction is the reducibility certificate used by the
decision layer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .graphs import EdgePath, Graph, GraphMap
from .traintrack import InternalCheckError, is_expanding, is_train_track, taken_turn_closure
from .whitehead import whitehead_graphs
from .words import generates_whole_group, reduce as word_reduce


@dataclass(frozen=True)
class BlowUp:
    """The split map together with the dictionaries relating it to the base.

    vertex_dictionary[v] = (center vertex id, sub-vertex ids per Whitehead
    component of v, components as node tuples); sub_edges[v] lists the new
    topological edge indices joining the center of v to its sub-vertices;
    edge_component[e] is the index of the Whitehead component at o(e) that
    the oriented base edge e belongs to.
    """

    base: GraphMap
    blown: GraphMap
    vertex_dictionary: tuple[tuple[int, tuple[int, ...], tuple[tuple[int, ...], ...]], ...]
    sub_edges: tuple[tuple[int, ...], ...]
    edge_component: dict[int, int]
    delta_edges: frozenset[int]  # topological edges of the blown graph forming the invariant subgraph


def blow_up(f: GraphMap) -> BlowUp:
    """Split every vertex along its Whitehead components.

    Requires an expanding train-track map.  Base edges keep their indices and
    their image words; each base vertex v contributes sub-vertices (one per
    component, indexed by least member) and a center tied in by sub-edges.
    """
    closure = taken_turn_closure(f)
    if not is_train_track(f, closure):
        raise ValueError("blow-up requires a train-track map")
    if not is_expanding(f).expanding:
        raise ValueError("blow-up requires an expanding map")
    g = f.graph
    whs = whitehead_graphs(f, closure)

    components: list[list[tuple[int, ...]]] = [list(w.components()) for w in whs]
    sub_id: dict[tuple[int, int], int] = {}
    next_id = 0
    for v in range(g.vertex_count):
        for i, _ in enumerate(components[v]):
            sub_id[(v, i)] = next_id
            next_id += 1
    center_id = {v: next_id + v for v in range(g.vertex_count)}
    total_vertices = next_id + g.vertex_count

    edge_component: dict[int, int] = {}
    for v in range(g.vertex_count):
        for i, comp in enumerate(components[v]):
            for e in comp:
                edge_component[e] = i

    def sub_vertex_of_edge(e: int) -> int:
        return sub_id[(g.origin(e), edge_component[e])]

    new_edges: list[tuple[int, int]] = [
        (sub_vertex_of_edge(k), sub_vertex_of_edge(-k))
        for k in range(1, g.edge_count + 1)
    ]
    new_names = list(g.edge_names)
    sub_edges: list[tuple[int, ...]] = []
    for v in range(g.vertex_count):
        mine = []
        for i, _ in enumerate(components[v]):
            new_edges.append((center_id[v], sub_id[(v, i)]))
            new_names.append(f"s{v}_{i}")
            mine.append(len(new_edges))
        sub_edges.append(tuple(mine))
    blown_graph = Graph(total_vertices, tuple(new_edges), tuple(new_names))

    # image of a sub-vertex: where its component's edges go under the
    # derivative; adjacency of taken turns keeps each component together,
    # so the answer must not depend on the chosen edge
    sub_image: dict[int, int] = {}
    for v in range(g.vertex_count):
        for i, comp in enumerate(components[v]):
            targets = {sub_vertex_of_edge(f.derivative(e)) for e in comp}
            if len(targets) != 1:
                raise InternalCheckError(
                    f"Whitehead component {comp} at vertex {v} maps into "
                    f"several components: derivative images split"
                )
            sub_image[sub_id[(v, i)]] = targets.pop()

    vertex_map = [0] * total_vertices
    for v in range(g.vertex_count):
        vertex_map[center_id[v]] = center_id[f.vertex_map[v]]
        for i, _ in enumerate(components[v]):
            vertex_map[sub_id[(v, i)]] = sub_image[sub_id[(v, i)]]

    images: list[EdgePath] = []
    for k in range(1, g.edge_count + 1):
        word = f.edge_images[k - 1].edges
        images.append(blown_graph.path(sub_vertex_of_edge(word[0]), word))
    center_slot: dict[int, int] = {}  # sub-vertex -> sub-edge index at its center
    for v in range(g.vertex_count):
        for i, idx in enumerate(sub_edges[v]):
            center_slot[sub_id[(v, i)]] = idx
    for v in range(g.vertex_count):
        for i, idx in enumerate(sub_edges[v]):
            target_sub = sub_image[sub_id[(v, i)]]
            target_edge = center_slot[target_sub]
            images.append(
                blown_graph.path(center_id[f.vertex_map[v]], (target_edge,))
            )
    blown = GraphMap(blown_graph, tuple(vertex_map), tuple(images))

    return BlowUp(
        base=f,
        blown=blown,
        vertex_dictionary=tuple(
            (
                center_id[v],
                tuple(sub_id[(v, i)] for i in range(len(components[v]))),
                tuple(components[v]),
            )
            for v in range(g.vertex_count)
        ),
        sub_edges=tuple(sub_edges),
        edge_component=edge_component,
        delta_edges=frozenset(range(1, g.edge_count + 1)),
    )


def contract_sub_edges(b: BlowUp) -> GraphMap:
    """Collapse every sub-edge; recovers the base graph and map exactly."""
    g = b.base.graph
    blown = b.blown
    collapse: dict[int, int] = {}
    for v, (center, subs, _) in enumerate(b.vertex_dictionary):
        collapse[center] = v
        for s in subs:
            collapse[s] = v
    edges = tuple(
        (collapse[blown.graph.origin(k)], collapse[blown.graph.terminus(k)])
        for k in range(1, g.edge_count + 1)
    )
    graph = Graph(g.vertex_count, edges, g.edge_names)
    vertex_map = tuple(
        collapse[blown.vertex_map[b.vertex_dictionary[v][0]]]
        for v in range(g.vertex_count)
    )
    images = tuple(
        graph.path(vertex_map[graph.origin(k)], blown.edge_images[k - 1].edges)
        for k in range(1, g.edge_count + 1)
    )
    return GraphMap(graph, vertex_map, images)


# --- reductions ----------------------------------------------------------------


@dataclass(frozen=True)
class ReductionWitness:
    """Checked certificate that an edge subgraph is a reduction.

    The three checks: the map keeps the subgraph inside itself; some component
    of the subgraph carries a circuit; the inclusion is not a homotopy
    equivalence (subgraph disconnected, or its first Betti number drops, or
    its fundamental group fails to surject).  ``ok`` only when all three hold.
    """

    delta_edges: tuple[int, ...]
    invariant: bool
    homotopically_nontrivial: bool
    not_homotopy_equivalence: bool
    betti_delta: int
    betti_ambient: int
    delta_connected: bool
    provenance: str

    @property
    def ok(self) -> bool:
        return (
            self.invariant
            and self.homotopically_nontrivial
            and self.not_homotopy_equivalence
        )

    def failed_checks(self) -> list[str]:
        out = []
        if not self.invariant:
            out.append("invariance")
        if not self.homotopically_nontrivial:
            out.append("homotopically-nontrivial")
        if not self.not_homotopy_equivalence:
            out.append("inclusion-not-homotopy-equivalence")
        return out


def _sub_betti(g: Graph, edges: set[int]) -> tuple[int, bool]:
    """(first Betti number, connectedness) of the subgraph spanned by the given
    topological edges and their endpoints."""
    vertices = set()
    for k in edges:
        vertices.add(g.origin(k))
        vertices.add(g.terminus(k))
    if not vertices:
        return 0, True
    comp: dict[int, int] = {}
    nxt = 0
    for v0 in sorted(vertices):
        if v0 in comp:
            continue
        comp[v0] = nxt
        queue = [v0]
        while queue:
            v = queue.pop(0)
            for k in edges:
                for a, bb in ((g.origin(k), g.terminus(k)), (g.terminus(k), g.origin(k))):
                    if a == v and bb not in comp:
                        comp[bb] = nxt
                        queue.append(bb)
        nxt += 1
    betti = len(edges) - len(vertices) + nxt
    return betti, nxt == 1


def _sub_pi1_surjects(f_graph: Graph, edges: set[int]) -> bool:
    """Whether the (connected) subgraph's loops generate the ambient
    fundamental group; read through a spanning tree of the ambient graph."""
    g = f_graph
    tree = g.spanning_tree(0)
    tree_edges = {abs(e) for e in tree.values() if e is not None}
    gens = [k for k in range(1, g.edge_count + 1) if k not in tree_edges]
    rank = len(gens)
    if rank == 0:
        return True
    gen_index = {k: i + 1 for i, k in enumerate(gens)}

    sub_vertices = set()
    for k in edges:
        sub_vertices.add(g.origin(k))
        sub_vertices.add(g.terminus(k))
    base = min(sub_vertices)
    # spanning tree of the subgraph, BFS in edge order
    sub_tree: dict[int, Optional[int]] = {base: None}
    queue = [base]
    while queue:
        v = queue.pop(0)
        for k in sorted(edges):
            for e in (k, -k):
                if g.origin(e) == v and g.terminus(e) not in sub_tree:
                    sub_tree[g.terminus(e)] = -e
                    queue.append(g.terminus(e))
    sub_tree_edges = {abs(e) for e in sub_tree.values() if e is not None}

    def to_base_word(path: EdgePath) -> list[int]:
        return [
            (gen_index[abs(e)] if e > 0 else -gen_index[abs(e)])
            for e in path.edges
            if abs(e) in gen_index
        ]

    conn = g.tree_path(tree, base)  # ambient basepoint to subgraph basepoint
    loops = []
    for k in sorted(edges - sub_tree_edges):

        def sub_path_to(v: int) -> list[int]:
            back = []
            at = v
            while sub_tree[at] is not None:
                e = sub_tree[at]
                back.append(e)
                at = g.terminus(e)
            return [-e for e in reversed(back)]

        loop_edges = (
            sub_path_to(g.origin(k)) + [k] + [-e for e in reversed(sub_path_to(g.terminus(k)))]
        )
        full = g.tighten(
            g.concat(
                conn,
                g.path(base, loop_edges),
                g.inverse_path(conn),
            )
        )
        loops.append(word_reduce(rank, to_base_word(full)))
    return generates_whole_group(loops, rank)


def verify_reduction(f: GraphMap, delta_edges: set[int]) -> ReductionWitness:
    """Run all three reduction checks on a topological edge subset of f's graph."""
    g = f.graph
    delta = set(delta_edges)
    if not delta <= set(range(1, g.edge_count + 1)):
        raise ValueError("delta contains unknown edges")
    if not delta:
        raise ValueError("delta has no edges")
    invariant = all(
        all(abs(e) in delta for e in f.edge_images[k - 1].edges) for k in delta
    )
    betti_delta, connected = _sub_betti(g, delta)
    nontrivial = betti_delta >= 1
    betti_ambient = g.betti_number()
    if delta == set(range(1, g.edge_count + 1)):
        not_he = False
    elif not connected or betti_delta < betti_ambient:
        not_he = True
    else:
        not_he = not _sub_pi1_surjects(g, delta)
    return ReductionWitness(
        delta_edges=tuple(sorted(delta)),
        invariant=invariant,
        homotopically_nontrivial=nontrivial,
        not_homotopy_equivalence=not_he,
        betti_delta=betti_delta,
        betti_ambient=betti_ambient,
        delta_connected=connected,
        provenance="supplied",
    )


def blow_up_reduction(f: GraphMap) -> Optional[ReductionWitness]:
    """The blow-up's invariant subgraph, verified, when some Whitehead graph is
    disconnected; None when they are all connected (the blow-up then adds
    nothing)."""
    closure = taken_turn_closure(f)
    if not is_train_track(f, closure):
        raise ValueError("blow-up requires a train-track map")
    whs = whitehead_graphs(f, closure)
    if all(w.is_connected() for w in whs):
        return None
    b = blow_up(f)
    witness = replace(verify_reduction(b.blown, set(b.delta_edges)), provenance="blow-up")
    if not witness.ok:
        raise InternalCheckError(
            f"blow-up subgraph failed checks {witness.failed_checks()}"
        )
    return witness


def invariant_subgraph_witness(f: GraphMap) -> Optional[ReductionWitness]:
    """First single-edge-seeded invariant subgraph that verifies as a
    reduction; seeds are tried in edge order and each is closed under `edges
    used by images`."""
    g = f.graph
    all_edges = set(range(1, g.edge_count + 1))
    for seed in range(1, g.edge_count + 1):
        closed = {seed}
        frontier = [seed]
        while frontier:
            k = frontier.pop(0)
            for e in f.edge_images[k - 1].edges:
                if abs(e) not in closed:
                    closed.add(abs(e))
                    frontier.append(abs(e))
        if closed == all_edges:
            continue
        witness = verify_reduction(f, closed)
        if witness.ok:
            return replace(witness, provenance="invariant-subgraph")
    return None


def circuit_in_delta(f: GraphMap, cap: int = 10**6) -> Optional[EdgePath]:
    """A closed circuit inside the invariant subgraph of the blow-up, found the
    way the expansion argument does: iterate an edge until its image is longer
    than the number of oriented edges, then cut between two visits of a
    repeated oriented edge.  The cut turn occurs inside the iterate, so the
    circuit also closes up after the blow-up."""
    g = f.graph
    threshold = 2 * g.edge_count + 1
    for e in g.oriented_edges():
        path = EdgePath(g.origin(e), (e,))
        for _ in range(4 * g.edge_count * g.edge_count + 4):
            path = f.map_path(path)
            if len(path) > cap:
                return None
            if len(path) >= threshold:
                first_seen: dict[int, int] = {}
                for idx, ee in enumerate(path.edges):
                    if ee in first_seen:
                        return EdgePath(
                            g.origin(path.edges[first_seen[ee]]),
                            path.edges[first_seen[ee]: idx],
                        )
                    first_seen[ee] = idx
                break
    return None
