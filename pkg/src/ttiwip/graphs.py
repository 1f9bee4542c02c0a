"""Finite graphs, edge paths, turns, and graph self-maps with tightening.

Oriented edges are nonzero ints: ``+k`` is the k-th topological edge (1-based)
in its positive orientation, ``-k`` the reverse; inversion is sign flip.  This
matches the letter encoding of words, so a rose map's edge images literally
spell automorphism images.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from . import words as W
from .words import Word, Automorphism, generates_whole_group


def edge_key(e: int) -> tuple[int, int]:
    """Total order on oriented edges: a < a^-1 < b < b^-1 < ..."""
    return (abs(e), 0 if e > 0 else 1)


def make_turn(e1: int, e2: int) -> tuple[int, int]:
    """Canonical unordered pair of oriented edges (a turn once origins agree)."""
    return (e1, e2) if edge_key(e1) <= edge_key(e2) else (e2, e1)


def is_degenerate(turn: tuple[int, int]) -> bool:
    return turn[0] == turn[1]


@dataclass(frozen=True)
class EdgePath:
    """A (possibly empty) path of oriented edges; kept with its start vertex so
    the empty path still knows where it sits."""

    start: int
    edges: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.edges)

    def is_empty(self) -> bool:
        return not self.edges


def turns_in_path(path: EdgePath) -> set[tuple[int, int]]:
    """All turns contained in the path: {e_i^-1, e_{i+1}} at interior vertices."""
    return {
        make_turn(-path.edges[i], path.edges[i + 1])
        for i in range(len(path.edges) - 1)
    }


@dataclass(frozen=True)
class Graph:
    """Finite graph: ``edges[k] = (o, t)`` are the endpoints of topological edge
    k+1 in positive orientation."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    edge_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("graph needs at least one vertex")
        for o, t in self.edges:
            if not (0 <= o < self.vertex_count and 0 <= t < self.vertex_count):
                raise ValueError(f"edge endpoints ({o},{t}) out of range")
        if not self.edge_names:
            object.__setattr__(
                self,
                "edge_names",
                tuple(W.generator_name(i) for i in range(len(self.edges))),
            )
        if len(self.edge_names) != len(self.edges):
            raise ValueError("edge_names length mismatch")
        if len(set(self.edge_names)) != len(self.edge_names):
            raise ValueError("edge names must be distinct")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def oriented_edges(self) -> list[int]:
        """All oriented edges, in the order a, a^-1, b, b^-1, ..."""
        out = []
        for k in range(1, self.edge_count + 1):
            out.extend((k, -k))
        return out

    def origin(self, e: int) -> int:
        o, t = self.edges[abs(e) - 1]
        return o if e > 0 else t

    def terminus(self, e: int) -> int:
        return self.origin(-e)

    def edge_name(self, e: int) -> str:
        name = self.edge_names[abs(e) - 1]
        return name if e > 0 else name + "^-1"

    def parse_edge(self, token: str) -> int:
        tok = token.strip()
        sign = 1
        if tok.endswith("^-1"):
            sign, tok = -1, tok[:-3]
        try:
            return sign * (self.edge_names.index(tok) + 1)
        except ValueError:
            raise ValueError(f"unknown edge name {token!r}") from None

    def degree(self, v: int) -> int:
        return sum(1 for e in self.oriented_edges() if self.origin(e) == v)

    def edges_at(self, v: int) -> list[int]:
        return [e for e in self.oriented_edges() if self.origin(e) == v]

    def check_path(self, path: EdgePath) -> None:
        if not (0 <= path.start < self.vertex_count):
            raise ValueError(f"start vertex {path.start} out of range")
        at = path.start
        for e in path.edges:
            if not (1 <= abs(e) <= self.edge_count):
                raise ValueError(f"edge {e} out of range")
            if self.origin(e) != at:
                raise ValueError(
                    f"path does not concatenate: edge {self.edge_name(e)} "
                    f"starts at {self.origin(e)}, expected {at}"
                )
            at = self.terminus(e)

    def path(self, start: int, edges: Sequence[int]) -> EdgePath:
        p = EdgePath(start, tuple(edges))
        self.check_path(p)
        return p

    def path_from_str(self, start: int, text: str) -> EdgePath:
        text = text.strip()
        tokens = text.split() if text else []
        return self.path(start, [self.parse_edge(t) for t in tokens])

    def path_str(self, path: EdgePath) -> str:
        return " ".join(self.edge_name(e) for e in path.edges)

    def inverse_path(self, path: EdgePath) -> EdgePath:
        end = self.terminus(path.edges[-1]) if path.edges else path.start
        return EdgePath(end, tuple(-e for e in reversed(path.edges)))

    def tighten(self, path: EdgePath) -> EdgePath:
        """Cancel adjacent e, e^-1 pairs; unique tight path rel endpoints."""
        self.check_path(path)
        out: list[int] = []
        for e in path.edges:
            if out and out[-1] == -e:
                out.pop()
            else:
                out.append(e)
        return EdgePath(path.start, tuple(out))

    def concat(self, *paths: EdgePath) -> EdgePath:
        """Literal concatenation (no tightening); endpoints must match up."""
        paths = [p for p in paths]
        if not paths:
            raise ValueError("nothing to concatenate")
        edges: list[int] = []
        at = paths[0].start
        for p in paths:
            if p.start != at:
                raise ValueError("concatenation endpoints do not match")
            edges.extend(p.edges)
            at = self.terminus(edges[-1]) if edges else at
        return EdgePath(paths[0].start, tuple(edges))

    def is_connected(self) -> bool:
        return max(self.component_of_vertices()) == 0

    def component_of_vertices(self) -> list[int]:
        """Component index per vertex (BFS order, deterministic)."""
        comp = [-1] * self.vertex_count
        nxt = 0
        for v0 in range(self.vertex_count):
            if comp[v0] != -1:
                continue
            comp[v0] = nxt
            queue = [v0]
            while queue:
                v = queue.pop(0)
                for e in self.edges_at(v):
                    w = self.terminus(e)
                    if comp[w] == -1:
                        comp[w] = nxt
                        queue.append(w)
            nxt += 1
        return comp

    def betti_number(self) -> int:
        """First Betti number: E - V + number of components."""
        comps = self.component_of_vertices()
        n_comp = max(comps) + 1 if comps else 0
        return self.edge_count - self.vertex_count + n_comp

    def spanning_tree(self, basepoint: int = 0) -> dict[int, Optional[int]]:
        """BFS spanning tree from the basepoint, edges tried in index order.

        Returns vertex -> oriented edge pointing back toward the basepoint
        (None at the basepoint).  Requires a connected graph.
        """
        tree: dict[int, Optional[int]] = {basepoint: None}
        queue = [basepoint]
        while queue:
            v = queue.pop(0)
            for e in self.edges_at(v):
                w = self.terminus(e)
                if w not in tree:
                    tree[w] = -e
                    queue.append(w)
        if len(tree) != self.vertex_count:
            raise ValueError("graph is not connected")
        return tree

    def tree_path(self, tree: dict[int, Optional[int]], v: int) -> EdgePath:
        """Tight path from the tree's basepoint to v inside the tree."""
        back: list[int] = []
        at = v
        while tree[at] is not None:
            e = tree[at]
            back.append(e)
            at = self.terminus(e)
        return EdgePath(at, tuple(-e for e in reversed(back)))


def rose(rank: int) -> Graph:
    """The rank-rose: one vertex, ``rank`` loop edges named like generators."""
    if rank < 1:
        raise ValueError("rose needs rank >= 1")
    return Graph(1, tuple((0, 0) for _ in range(rank)))


@dataclass(frozen=True)
class IteratedPath:
    """Result of iterating a map on an edge; ``truncated`` marks a hit of the
    length cap (the path is then a prefix of the true image)."""

    path: EdgePath
    truncated: bool


@dataclass(frozen=True)
class GraphMap:
    """A graph self-map: vertex images plus a tight nonempty edge path per
    positive oriented edge (images of inverses are forced)."""

    graph: Graph
    vertex_map: tuple[int, ...]
    edge_images: tuple[EdgePath, ...]

    def __post_init__(self):
        g = self.graph
        if len(self.vertex_map) != g.vertex_count:
            raise ValueError("vertex_map length mismatch")
        for v in self.vertex_map:
            if not (0 <= v < g.vertex_count):
                raise ValueError(f"vertex image {v} out of range")
        if len(self.edge_images) != g.edge_count:
            raise ValueError("edge_images length mismatch")
        for k, img in enumerate(self.edge_images, start=1):
            g.check_path(img)
            if img.is_empty():
                raise ValueError(f"image of edge {g.edge_name(k)} is empty")
            if img != g.tighten(img):
                raise ValueError(f"image of edge {g.edge_name(k)} is not tight")
            if img.start != self.vertex_map[g.origin(k)]:
                raise ValueError(
                    f"image of edge {g.edge_name(k)} starts at {img.start}, "
                    f"expected the image of its origin"
                )
            if g.terminus(img.edges[-1]) != self.vertex_map[g.terminus(k)]:
                raise ValueError(
                    f"image of edge {g.edge_name(k)} ends away from the image "
                    "of its terminus"
                )

    def image(self, e: int) -> EdgePath:
        img = self.edge_images[abs(e) - 1]
        return img if e > 0 else self.graph.inverse_path(img)

    def derivative(self, e: int) -> int:
        """Initial edge of the image of e."""
        return self.image(e).edges[0]

    def map_path(self, path: EdgePath, tighten: bool = True) -> EdgePath:
        """Image of a path: concatenate edge images, then tighten."""
        g = self.graph
        out: list[int] = []
        for e in path.edges:
            for y in self.image(e).edges:
                if tighten and out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return EdgePath(self.vertex_map[path.start], tuple(out))

    def iterate_edge(self, e: int, n: int, length_cap: int = 10**6) -> IteratedPath:
        """Tightened n-th iterated image of the single edge e.

        If an intermediate image exceeds length_cap edges it is cut to the cap
        and the result flagged; truncation is a result state, not an error.
        """
        if n < 1:
            raise ValueError("need n >= 1")
        path = EdgePath(self.graph.origin(e), (e,))
        truncated = False
        for _ in range(n):
            path = self.map_path(path)
            if len(path) > length_cap:
                path = EdgePath(path.start, path.edges[:length_cap])
                truncated = True
        return IteratedPath(path, truncated)

    def compose(self, other: "GraphMap") -> "GraphMap":
        """self o other (apply other first); images are tightened."""
        if self.graph != other.graph:
            raise ValueError("maps live on different graphs")
        imgs = []
        for k in range(1, self.graph.edge_count + 1):
            img = self.map_path(other.image(k))
            if img.is_empty():
                raise ValueError(
                    f"composition collapses edge {self.graph.edge_name(k)}; "
                    "not a graph-map"
                )
            imgs.append(img)
        vmap = tuple(self.vertex_map[v] for v in other.vertex_map)
        return GraphMap(self.graph, vmap, tuple(imgs))

    def power(self, m: int) -> "GraphMap":
        if m < 1:
            raise ValueError("need m >= 1")
        result = self
        for _ in range(m - 1):
            result = self.compose(result)
        return result


def identity_map(graph: Graph) -> GraphMap:
    return GraphMap(
        graph,
        tuple(range(graph.vertex_count)),
        tuple(graph.path(graph.origin(k), (k,)) for k in range(1, graph.edge_count + 1)),
    )


@dataclass(frozen=True)
class TopologicalRepresentative:
    """A graph-map claimed to represent an outer automorphism.

    For the rose built from an automorphism the marking is the identity and
    the automorphism is kept; user-supplied maps are only `claimed` (there is
    no general procedure here to recover which automorphism they represent).
    """

    map: GraphMap
    marking: str  # "identity-rose" or "claimed"
    min_degree_3: bool
    automorphism: Optional[Automorphism] = None


def rose_representative(aut: Automorphism) -> TopologicalRepresentative:
    """The obvious representative on the rank-rose: edge k spells image of
    generator k."""
    g = rose(aut.rank)
    images = []
    for w in aut.images:
        if w.is_trivial:
            raise ValueError("trivial generator image cannot form a graph-map")
        images.append(g.path(0, w.letters))
    gm = GraphMap(g, (0,), tuple(images))
    return TopologicalRepresentative(
        map=gm,
        marking="identity-rose",
        min_degree_3=g.degree(0) >= 3,
        automorphism=aut,
    )


def min_degree(graph: Graph) -> int:
    return min(graph.degree(v) for v in range(graph.vertex_count))


def induced_endomorphism(f: GraphMap, basepoint: int = 0) -> list[Word]:
    """Images of a free basis of the fundamental group under f.

    The basis comes from a BFS spanning tree: one generator per non-tree
    positive edge, as the loop tree-path / edge / tree-path.  Images are read
    off by collapsing the tree, after conjugating back to the basepoint along
    the tree path to f(basepoint).
    """
    g = f.graph
    tree = g.spanning_tree(basepoint)
    tree_edges = {abs(e) for e in tree.values() if e is not None}
    gens = [k for k in range(1, g.edge_count + 1) if k not in tree_edges]
    rank = len(gens)
    gen_index = {k: i + 1 for i, k in enumerate(gens)}
    if rank == 0:
        raise ValueError("graph is a tree; trivial fundamental group")

    def read_word(path: EdgePath) -> Word:
        letters = []
        for e in path.edges:
            if abs(e) in gen_index:
                letters.append(gen_index[abs(e)] if e > 0 else -gen_index[abs(e)])
        return W.reduce(rank, letters)

    conj = g.tree_path(tree, f.vertex_map[basepoint])
    out = []
    for k in gens:
        loop = g.concat(
            g.tree_path(tree, g.origin(k)),
            EdgePath(g.origin(k), (k,)),
            g.inverse_path(g.tree_path(tree, g.terminus(k))),
        )
        image_loop = g.concat(conj, f.map_path(loop), g.inverse_path(conj))
        out.append(read_word(g.tighten(image_loop)))
    return out


def is_homotopy_equivalence(f: GraphMap, basepoint: int = 0) -> bool:
    """True iff f induces a surjection (hence isomorphism) on the fundamental
    group."""
    imgs = induced_endomorphism(f, basepoint)
    return generates_whole_group(imgs, imgs[0].rank if imgs else 0)


# --- graph-map file format (JSON) -------------------------------------------


def print_graph_map(f: GraphMap) -> str:
    """Canonical JSON text; parse o print is the identity on canonical form."""
    g = f.graph
    doc = {
        "vertices": g.vertex_count,
        "edges": [
            [g.edge_names[i], g.edges[i][0], g.edges[i][1]]
            for i in range(g.edge_count)
        ],
        "vertex_map": list(f.vertex_map),
        "edge_map": {
            g.edge_names[k - 1]: g.path_str(f.edge_images[k - 1])
            for k in range(1, g.edge_count + 1)
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_graph_map(text: str) -> GraphMap:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed graph-map JSON: {exc}") from exc
    for key in ("vertices", "edges", "vertex_map", "edge_map"):
        if key not in doc:
            raise ValueError(f"graph-map file misses key {key!r}")
    names = tuple(str(e[0]) for e in doc["edges"])
    endpoints = tuple((int(e[1]), int(e[2])) for e in doc["edges"])
    g = Graph(int(doc["vertices"]), endpoints, names)
    vmap = tuple(int(v) for v in doc["vertex_map"])
    images = []
    for k in range(1, g.edge_count + 1):
        name = names[k - 1]
        if name not in doc["edge_map"]:
            raise ValueError(f"edge_map misses edge {name!r}")
        start = vmap[g.origin(k)]
        images.append(g.path_from_str(start, doc["edge_map"][name]))
    return GraphMap(g, vmap, tuple(images))
