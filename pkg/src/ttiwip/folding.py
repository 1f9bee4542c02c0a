"""Stallings folding of graphs with positively labeled oriented edges.

An edge (u, v, label) reads label from u to v; the reverse traversal reads the
inverse label.  Folding identifies, at any vertex, pairs of same-direction
edges carrying the same label, until the graph is an immersion over the rose
on the label set.  The folded graph is unique; the merge order does not
matter.
"""

from __future__ import annotations


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def fold_labeled_graph(
    n_vertices: int, edges: list[tuple[int, int, int]]
) -> tuple[list[int], list[tuple[int, int, int]]]:
    """Fold until an immersion; return (vertex relabeling, folded edge list).

    The relabeling maps every original vertex id to its image in 0..m-1; the
    returned edges are deduplicated and sorted, with both entries canonical.
    """
    uf = _UnionFind(n_vertices)
    while True:
        changed = False
        seen: dict[tuple[int, int, int], int] = {}
        for u, v, label in edges:
            ru, rv = uf.find(u), uf.find(v)
            for key, target in (((ru, label, 1), rv), ((rv, label, -1), ru)):
                prior = seen.get(key)
                if prior is None:
                    seen[key] = target
                elif uf.find(prior) != uf.find(target):
                    uf.union(prior, target)
                    changed = True
            if changed:
                break
        if not changed:
            break
    roots = sorted({uf.find(x) for x in range(n_vertices)})
    new_id = {r: i for i, r in enumerate(roots)}
    vertex_map = [new_id[uf.find(x)] for x in range(n_vertices)]
    folded = sorted({(vertex_map[u], vertex_map[v], label) for u, v, label in edges})
    return vertex_map, folded
