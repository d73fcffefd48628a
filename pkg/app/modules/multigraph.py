"""
🕸️ Multigraph Module
Connected multigraphs with loops, intersection product, refinements and graph families
"""

import logging
import os
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism as iso

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 5


class ParseError(ValueError):
    """Malformed graph or divisor text"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ValueError):
    """Structurally invalid input (bad vertex, bad shape, ...)"""


class DisconnectedGraphError(ValidationError):
    pass


class CapExceededError(ValueError):
    """Enumeration request above the configured genus cap"""


def _normalize_edges(edges) -> tuple:
    return tuple(sorted((min(v, w), max(v, w)) for v, w in edges))


def edges_connected(vertex_count: int, edges) -> bool:
    """Connectivity of a raw edge list, used before a Multigraph exists"""
    H = nx.MultiGraph()
    H.add_nodes_from(range(vertex_count))
    H.add_edges_from(edges)
    return nx.is_connected(H)


@dataclass(frozen=True)
class Multigraph:
    """Finite connected multigraph; vertices are 0..vertex_count-1.

    `edges` is a sorted tuple of (v, w) pairs with v <= w, repeated once per
    parallel edge; (v, v) is a loop.
    """

    vertex_count: int
    edges: tuple
    labels: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValidationError("a graph needs at least one vertex")
        normalized = _normalize_edges(self.edges)
        for v, w in normalized:
            if v < 0 or w >= self.vertex_count:
                raise ValidationError(f"edge ({v}, {w}) uses a vertex outside 0..{self.vertex_count - 1}")
        object.__setattr__(self, "edges", normalized)
        if self.labels is not None:
            labels = tuple(str(name) for name in self.labels)
            if len(labels) != self.vertex_count or len(set(labels)) != len(labels):
                raise ValidationError("labels must name every vertex exactly once")
            object.__setattr__(self, "labels", labels)
        if not edges_connected(self.vertex_count, normalized):
            raise DisconnectedGraphError(f"graph on {self.vertex_count} vertices is not connected")

    # ---- derived structure (computed once, graph is immutable) ----

    @cached_property
    def multiplicity(self) -> dict:
        """(v, w) with v < w -> number of parallel edges"""
        return dict(Counter(e for e in self.edges if e[0] != e[1]))

    @cached_property
    def loops(self) -> tuple:
        counts = Counter(v for v, w in self.edges if v == w)
        return tuple(counts.get(v, 0) for v in range(self.vertex_count))

    @cached_property
    def neighbors(self) -> tuple:
        """Per vertex, the non-loop neighbours as (w, multiplicity) pairs"""
        adjacency = [[] for _ in range(self.vertex_count)]
        for (v, w), m in sorted(self.multiplicity.items()):
            adjacency[v].append((w, m))
            adjacency[w].append((v, m))
        return tuple(tuple(row) for row in adjacency)

    @cached_property
    def outdegree(self) -> tuple:
        """Non-loop valency: chips a vertex sends when it fires"""
        return tuple(sum(m for _, m in row) for row in self.neighbors)

    @cached_property
    def valency(self) -> tuple:
        # loops count twice
        return tuple(self.outdegree[v] + 2 * self.loops[v] for v in range(self.vertex_count))

    @cached_property
    def laplacian(self) -> np.ndarray:
        return laplacian_matrix(self)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def loop_count(self) -> int:
        return sum(self.loops)

    @property
    def has_loops(self) -> bool:
        return self.loop_count > 0

    def vertex_name(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    def vertex_index(self, name: str) -> int:
        """Resolve a label or a decimal index"""
        if self.labels and name in self.labels:
            return self.labels.index(name)
        try:
            v = int(name)
        except ValueError:
            raise ValidationError(f"unknown vertex {name!r}") from None
        if not 0 <= v < self.vertex_count:
            raise ValidationError(f"vertex {v} outside 0..{self.vertex_count - 1}")
        return v

    def check_vertex(self, v: int):
        if not 0 <= v < self.vertex_count:
            raise ValidationError(f"vertex {v} outside 0..{self.vertex_count - 1}")

    def strip_loops(self) -> "Multigraph":
        return Multigraph(self.vertex_count, tuple(e for e in self.edges if e[0] != e[1]), self.labels)

    def bfs_tree(self, root: int) -> tuple:
        """(order, parent) of a breadth-first traversal from `root`"""
        parent = [-1] * self.vertex_count
        seen = [False] * self.vertex_count
        seen[root] = True
        order = [root]
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, _ in self.neighbors[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    order.append(w)
                    queue.append(w)
        return order, parent

    def to_networkx(self) -> nx.Graph:
        """Simple graph carrying loop counts on nodes and multiplicities on edges"""
        H = nx.Graph()
        for v in range(self.vertex_count):
            H.add_node(v, loops=self.loops[v])
        for (v, w), m in self.multiplicity.items():
            H.add_edge(v, w, mult=m)
        return H

    def __repr__(self):
        return f"Multigraph(vertices={self.vertex_count}, edges={list(self.edges)})"


def genus(G: Multigraph) -> int:
    """First Betti number |E| - |V| + 1"""
    return G.edge_count - G.vertex_count + 1


def intersection(G: Multigraph, v: int, w: int) -> int:
    """(v.w): edge count for v != w, -deg(v) + 2 loop(v) on the diagonal"""
    G.check_vertex(v)
    G.check_vertex(w)
    if v == w:
        return -G.valency[v] + 2 * G.loops[v]
    return G.multiplicity.get((min(v, w), max(v, w)), 0)


def laplacian_matrix(G: Multigraph) -> np.ndarray:
    n = G.vertex_count
    M = np.zeros((n, n), dtype=np.int64)
    for (v, w), m in G.multiplicity.items():
        M[v, w] += m
        M[w, v] += m
        M[v, v] -= m
        M[w, w] -= m
    return M


# ============ Refinements ============

@dataclass(frozen=True)
class RefinementMap:
    """Vertex inclusion V(source) -> V(target) induced by subdividing edges"""

    source: Multigraph
    target: Multigraph
    vertex_inclusion: tuple

    def __post_init__(self):
        image = self.vertex_inclusion
        if len(image) != self.source.vertex_count or len(set(image)) != len(image):
            raise ValidationError("vertex inclusion must be injective on the source vertices")
        inserted = set(range(self.target.vertex_count)) - set(image)
        for u in inserted:
            if self.target.valency[u] != 2 or self.target.loops[u]:
                raise ValidationError(f"inserted vertex {u} must have valency 2 and no loops")

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and self.vertex_inclusion == tuple(range(self.source.vertex_count))

    def transport(self, D):
        """The map iota: Div(source) -> Div(target)"""
        from app.modules.divisor import Divisor, GraphMismatchError

        if D.graph != self.source:
            raise GraphMismatchError("divisor does not live on the refinement source")
        coefficients = [0] * self.target.vertex_count
        for v, k in enumerate(D.coefficients):
            coefficients[self.vertex_inclusion[v]] = k
        return Divisor(self.target, tuple(coefficients))


def _identity_refinement(G: Multigraph) -> tuple:
    return G, RefinementMap(G, G, tuple(range(G.vertex_count)))


def _subdivided_labels(G: Multigraph, total: int):
    if not G.labels:
        return None
    return G.labels + tuple(f"_{u}" for u in range(G.vertex_count, total))


def _subdivide(G: Multigraph, counts: list) -> tuple:
    """Insert counts[i] vertices into edge i (in G.edges order)"""
    next_vertex = G.vertex_count
    edges = []
    for (v, w), n in zip(G.edges, counts):
        if n == 0:
            edges.append((v, w))
            continue
        path = [v] + list(range(next_vertex, next_vertex + n)) + [w]
        next_vertex += n
        edges.extend(zip(path, path[1:]))
    target = Multigraph(next_vertex, tuple(edges), _subdivided_labels(G, next_vertex))
    return target, RefinementMap(G, target, tuple(range(G.vertex_count)))


def subdivide_uniform(G: Multigraph, n: int) -> tuple:
    """Insert n vertices in the interior of every edge"""
    if n < 0:
        raise ValidationError("subdivision count must be non-negative")
    if n == 0:
        return _identity_refinement(G)
    return _subdivide(G, [n] * G.edge_count)


def subdivide_loops(G: Multigraph, counts) -> tuple:
    """Insert counts[i] >= 1 vertices into the i-th loop edge; other edges untouched"""
    counts = list(counts)
    if len(counts) != G.loop_count:
        raise ValidationError(f"expected {G.loop_count} loop subdivision counts, got {len(counts)}")
    if any(n < 1 for n in counts):
        raise ValidationError("every loop needs at least one inserted vertex")
    if not counts:
        return _identity_refinement(G)
    loop_counts = iter(counts)
    per_edge = [next(loop_counts) if v == w else 0 for v, w in G.edges]
    return _subdivide(G, per_edge)


# ============ Named families ============

def cycle_graph(n: int) -> Multigraph:
    if n < 1:
        raise ValidationError("a cycle needs at least one vertex")
    return Multigraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Multigraph:
    return Multigraph(n, tuple((v, w) for v in range(n) for w in range(v + 1, n)))


def theta_graph() -> Multigraph:
    return Multigraph(2, ((0, 1),) * 3, ("u", "v"))


def dumbbell_graph() -> Multigraph:
    return Multigraph(2, ((0, 0), (0, 1), (1, 1)), ("u", "w"))


def loop_example_graph() -> Multigraph:
    """Genus 2: a loop at v and two parallel edges v-w"""
    return Multigraph(2, ((0, 0), (0, 1), (0, 1)), ("v", "w"))


def chain_of_loops(g: int) -> Multigraph:
    """g cycles of 2g-1 vertices each, the last vertex of cycle i glued to the first of cycle i+1"""
    if g < 2:
        raise ValidationError("chain of loops needs g >= 2")
    length = 2 * g - 1
    edges = []
    for i in range(g):
        start = i * (length - 1)
        cycle = [start + j for j in range(length)]
        edges.extend(zip(cycle, cycle[1:] + cycle[:1]))
    return Multigraph(g * (length - 1) + 1, tuple(edges))


# ============ Symmetry and connectivity ============

def _node_match():
    return iso.categorical_node_match("loops", 0)


def _edge_match():
    return iso.categorical_edge_match("mult", 1)


def is_isomorphic(G: Multigraph, H: Multigraph) -> bool:
    if (G.vertex_count, G.edge_count, sorted(G.valency)) != (H.vertex_count, H.edge_count, sorted(H.valency)):
        return False
    return nx.is_isomorphic(G.to_networkx(), H.to_networkx(), node_match=_node_match(), edge_match=_edge_match())


def automorphism_count(G: Multigraph) -> int:
    """Vertex permutations preserving loop counts and edge multiplicities"""
    H = G.to_networkx()
    matcher = iso.GraphMatcher(H, H, node_match=_node_match(), edge_match=_edge_match())
    return sum(1 for _ in matcher.isomorphisms_iter())


def edge_connectivity(G: Multigraph) -> int:
    """Minimum number of edges whose removal disconnects G (0 for a single vertex)"""
    if G.vertex_count == 1:
        return 0
    cut_value, _ = nx.stoer_wagner(G.to_networkx(), weight="mult")
    return int(cut_value)


def is_three_edge_connected(G: Multigraph) -> bool:
    return edge_connectivity(G) >= 3


# ============ Enumeration ============

def get_enumeration_cap() -> int:
    return int(os.getenv("BNGRAPH_CAP", DEFAULT_ENUMERATION_CAP))


def _check_genus_request(g: int, cap):
    cap = get_enumeration_cap() if cap is None else cap
    if g < 2:
        raise ValidationError("enumeration needs genus g >= 2")
    if g > cap:
        raise CapExceededError(f"genus {g} is above the enumeration cap {cap} (set BNGRAPH_CAP to raise it)")


def _graphs_with_valencies(valencies: tuple):
    """Edge tuples of all labelled multigraphs with the given valency sequence.

    Vertices of equal valency are ordered by non-increasing loop count.
    """
    n = len(valencies)
    remaining = list(valencies)
    loops = [0] * n
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    edges = []

    def place(k):
        if k == len(pairs):
            if not any(remaining):
                yield tuple(edges)
            return
        i, j = pairs[k]
        if i == j:
            if i > 0 and remaining[i - 1]:
                return
            top = remaining[i] // 2
            if i > 0 and valencies[i] == valencies[i - 1]:
                top = min(top, loops[i - 1])
            bottom = 0
            if i == n - 1:
                # last row: loops must use up the remaining valency
                if remaining[i] % 2 or remaining[i] // 2 > top:
                    return
                bottom = top = remaining[i] // 2
            for a in range(top, bottom - 1, -1):
                loops[i] = a
                remaining[i] -= 2 * a
                edges.extend([(i, i)] * a)
                yield from place(k + 1)
                del edges[len(edges) - a:]
                remaining[i] += 2 * a
            loops[i] = 0
            return
        top = min(remaining[i], remaining[j])
        bottom = 0
        if j == n - 1:
            if remaining[i] > remaining[j]:
                return
            bottom = top = remaining[i]
        for m in range(top, bottom - 1, -1):
            remaining[i] -= m
            remaining[j] -= m
            edges.extend([(i, j)] * m)
            yield from place(k + 1)
            del edges[len(edges) - m:]
            remaining[i] += m
            remaining[j] += m

    yield from place(0)


def _isomorphism_classes(candidates) -> list:
    """Keep the first graph of every isomorphism class, bucketed by Weisfeiler-Lehman hash"""
    buckets = {}
    kept = []
    for G in candidates:
        H = G.to_networkx()
        key = nx.weisfeiler_lehman_graph_hash(H, node_attr="loops", edge_attr="mult", iterations=3)
        bucket = buckets.setdefault(key, [])
        if any(nx.is_isomorphic(H, other, node_match=_node_match(), edge_match=_edge_match()) for other in bucket):
            continue
        bucket.append(H)
        kept.append(G)
    return kept


def _connected_graphs(valency_sequences) -> list:
    candidates = []
    for valencies in valency_sequences:
        for edges in _graphs_with_valencies(valencies):
            if edges_connected(len(valencies), edges):
                candidates.append(Multigraph(len(valencies), edges))
    return _isomorphism_classes(candidates)


def enumerate_cubic(g: int, cap: int = None) -> list:
    """Connected 3-regular multigraphs of genus g up to isomorphism (2g-2 vertices)"""
    _check_genus_request(g, cap)
    graphs = _connected_graphs([(3,) * (2 * g - 2)])
    logger.info(f"🔢 genus {g}: {len(graphs)} cubic multigraphs")
    return graphs


def _stable_valency_sequences(g: int):
    for n in range(1, 2 * g - 1):
        total = 2 * (n + g - 1)
        for extra in combinations_with_replacement(range(total - 3 * n + 1), n):
            valencies = tuple(sorted((3 + x for x in extra), reverse=True))
            if sum(valencies) == total:
                yield valencies


def enumerate_stable(g: int, cap: int = None) -> list:
    """Connected multigraphs of genus g with every valency >= 3, up to isomorphism"""
    _check_genus_request(g, cap)
    sequences = sorted(set(_stable_valency_sequences(g)), key=lambda s: (len(s), [-x for x in s]))
    graphs = _connected_graphs(sequences)
    logger.info(f"🔢 genus {g}: {len(graphs)} stable multigraphs")
    return graphs


# ============ Graph text format ============

def parse_graph(text: str) -> Multigraph:
    """Parse `vertices N` followed by `u w` edge lines and optional `label i name` lines"""
    vertex_count = None
    edges = []
    labels = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        column = raw.index(line[0]) + 1
        parts = line.split()
        if vertex_count is None:
            if len(parts) != 2 or parts[0] != "vertices":
                raise ParseError("first line must be 'vertices N'", line_no, column)
            try:
                vertex_count = int(parts[1])
            except ValueError:
                raise ParseError(f"bad vertex count {parts[1]!r}", line_no, column) from None
            if vertex_count < 1:
                raise ParseError("vertex count must be positive", line_no, column)
            continue
        if parts[0] == "label":
            if len(parts) != 3 or not parts[1].isdigit():
                raise ParseError("expected 'label <index> <name>'", line_no, column)
            index = int(parts[1])
            if index >= vertex_count:
                raise ParseError(f"label index {index} outside 0..{vertex_count - 1}", line_no, column)
            labels[index] = parts[2]
            continue
        if len(parts) != 2:
            raise ParseError("expected an edge 'u w'", line_no, column)
        try:
            v, w = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer vertex in {line!r}", line_no, column) from None
        if not (0 <= v < vertex_count and 0 <= w < vertex_count):
            raise ParseError(f"edge ({v}, {w}) outside 0..{vertex_count - 1}", line_no, column)
        edges.append((v, w))
    if vertex_count is None:
        raise ParseError("empty graph file", 1, 1)
    names = None
    if labels:
        if len(labels) != vertex_count:
            raise ParseError("labels must be given for every vertex or for none", 1, 1)
        names = tuple(labels[v] for v in range(vertex_count))
    return Multigraph(vertex_count, tuple(edges), names)


def format_graph(G: Multigraph, comment: str = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {row}" for row in comment.splitlines())
    lines.append(f"vertices {G.vertex_count}")
    if G.labels:
        lines.extend(f"label {v} {name}" for v, name in enumerate(G.labels))
    lines.extend(f"{v} {w}" for v, w in G.edges)
    return "\n".join(lines) + "\n"


def load_graph(path) -> Multigraph:
    with open(path, encoding="utf-8") as handle:
        return parse_graph(handle.read())
