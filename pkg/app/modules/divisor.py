"""
🎯 Divisor Module
Divisors, principal divisors, linear equivalence and q-reduced representatives
"""

import logging
from dataclasses import dataclass

import numpy as np
from sympy import Matrix

from app.modules.multigraph import Multigraph, ParseError, ValidationError

logger = logging.getLogger(__name__)

# canonical base vertex
BASE_VERTEX = 0


class GraphMismatchError(ValidationError):
    """Divisors from two different graphs were combined"""


@dataclass(frozen=True)
class Divisor:
    """Integer combination of the vertices of one graph (dense coefficient tuple)"""

    graph: Multigraph
    coefficients: tuple

    def __post_init__(self):
        if len(self.coefficients) != self.graph.vertex_count:
            raise ValidationError(
                f"divisor has {len(self.coefficients)} coefficients for {self.graph.vertex_count} vertices"
            )
        object.__setattr__(self, "coefficients", tuple(int(k) for k in self.coefficients))

    @classmethod
    def zero(cls, G: Multigraph) -> "Divisor":
        return cls(G, (0,) * G.vertex_count)

    @classmethod
    def from_mapping(cls, G: Multigraph, mapping: dict) -> "Divisor":
        coefficients = [0] * G.vertex_count
        for v, k in mapping.items():
            G.check_vertex(v)
            coefficients[v] += k
        return cls(G, tuple(coefficients))

    @classmethod
    def point(cls, G: Multigraph, v: int, k: int = 1) -> "Divisor":
        return cls.from_mapping(G, {v: k})

    @property
    def degree(self) -> int:
        return sum(self.coefficients)

    @property
    def is_effective(self) -> bool:
        return all(k >= 0 for k in self.coefficients)

    @property
    def support(self) -> dict:
        return {v: k for v, k in enumerate(self.coefficients) if k}

    def __getitem__(self, v: int) -> int:
        return self.coefficients[v]

    def _same_graph(self, other: "Divisor"):
        if not isinstance(other, Divisor):
            raise TypeError(f"expected a Divisor, got {type(other).__name__}")
        if other.graph is not self.graph and other.graph != self.graph:
            raise GraphMismatchError("cannot combine divisors that live on different graphs")

    def __add__(self, other):
        self._same_graph(other)
        return Divisor(self.graph, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other):
        self._same_graph(other)
        return Divisor(self.graph, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self):
        return Divisor(self.graph, tuple(-k for k in self.coefficients))

    def __mul__(self, scalar: int):
        return Divisor(self.graph, tuple(scalar * k for k in self.coefficients))

    __rmul__ = __mul__

    def plus_vertex(self, v: int, k: int = 1) -> "Divisor":
        coefficients = list(self.coefficients)
        coefficients[v] += k
        return Divisor(self.graph, tuple(coefficients))

    def __str__(self):
        return format_divisor(self)


@dataclass(frozen=True)
class VertexFunction:
    """Integer-valued function on the vertices"""

    values: tuple

    @classmethod
    def indicator(cls, G: Multigraph, v: int) -> "VertexFunction":
        G.check_vertex(v)
        return cls(tuple(1 if w == v else 0 for w in range(G.vertex_count)))

    @classmethod
    def constant(cls, G: Multigraph, c: int = 0) -> "VertexFunction":
        return cls((c,) * G.vertex_count)

    def shifted(self, c: int) -> "VertexFunction":
        return VertexFunction(tuple(x + c for x in self.values))


def _check_graph(G: Multigraph, D: Divisor):
    if D.graph is not G and D.graph != G:
        raise GraphMismatchError("divisor does not live on this graph")


def div_of(G: Multigraph, f: VertexFunction) -> Divisor:
    """div(f) = sum over v of ord_v(f) v, with ord_v(f) = sum_w (v.w) f(w)"""
    if len(f.values) != G.vertex_count:
        raise ValidationError("vertex function has the wrong number of values")
    image = G.laplacian @ np.array(f.values, dtype=object)
    return Divisor(G, tuple(int(x) for x in image))


def twister(G: Multigraph, v: int) -> Divisor:
    """T_v = div(indicator of v) = sum_w (w.v) w"""
    return div_of(G, VertexFunction.indicator(G, v))


def is_principal(G: Multigraph, D: Divisor) -> tuple:
    """(True, witness) if D = div(f) for an integer f, normalised by f(q) = 0; else (False, None).

    Exact rational elimination on the reduced intersection matrix, independent of
    the burning code path.
    """
    _check_graph(G, D)
    if D.degree != 0:
        return False, None
    n = G.vertex_count
    if n == 1:
        return True, VertexFunction.constant(G)
    q = BASE_VERTEX
    keep = [v for v in range(n) if v != q]
    full = Matrix(G.laplacian.tolist())
    reduced = full.extract(keep, keep)
    rhs = Matrix([D[v] for v in keep])
    solution = reduced.LUsolve(rhs)
    if not all(x.is_integer for x in solution):
        return False, None
    values = [0] * n
    for v, x in zip(keep, solution):
        values[v] = int(x)
    return True, VertexFunction(tuple(values))


# ============ q-reduction (Dhar burning) ============

def _make_nonnegative_off(G: Multigraph, chips: list, q: int):
    """Fire BFS parents, farthest first, until every v != q holds >= 0 chips"""
    order, parent = G.bfs_tree(q)
    neighbors = G.neighbors
    outdegree = G.outdegree
    for v in reversed(order[1:]):
        if chips[v] >= 0:
            continue
        p = parent[v]
        m = G.multiplicity[(min(p, v), max(p, v))]
        times = -(chips[v] // m)  # ceil(-chips[v] / m)
        chips[p] -= times * outdegree[p]
        for w, mw in neighbors[p]:
            chips[w] += times * mw


def _burn(G: Multigraph, chips: list, q: int) -> tuple:
    """Dhar's burning from q; returns (burnt flags, edges from each vertex into the fire)"""
    neighbors = G.neighbors
    burnt = [False] * G.vertex_count
    exposure = [0] * G.vertex_count
    burnt[q] = True
    stack = [q]
    while stack:
        b = stack.pop()
        for w, m in neighbors[b]:
            if burnt[w]:
                continue
            exposure[w] += m
            if exposure[w] > chips[w]:
                burnt[w] = True
                stack.append(w)
    return burnt, exposure


def reduce_chips(G: Multigraph, chips: list, q: int) -> list:
    """q-reduce a coefficient list in place and return it"""
    _make_nonnegative_off(G, chips, q)
    neighbors = G.neighbors
    while True:
        burnt, exposure = _burn(G, chips, q)
        unburnt = [v for v in range(G.vertex_count) if not burnt[v]]
        if not unburnt:
            return chips
        # fire the unburnt set as many times as stays legal
        times = min(chips[v] // exposure[v] for v in unburnt if exposure[v])
        for v in unburnt:
            chips[v] -= times * exposure[v]
            for w, m in neighbors[v]:
                if burnt[w]:
                    chips[w] += times * m


def is_superstable(G: Multigraph, chips, q: int) -> bool:
    """True when chips >= 0 off q and the fire from q burns the whole graph"""
    if any(chips[v] < 0 for v in range(G.vertex_count) if v != q):
        return False
    burnt, _ = _burn(G, chips, q)
    return all(burnt)


def reduce(G: Multigraph, D: Divisor, q: int = BASE_VERTEX) -> Divisor:
    """The unique q-reduced divisor linearly equivalent to D"""
    _check_graph(G, D)
    G.check_vertex(q)
    return Divisor(G, tuple(reduce_chips(G, list(D.coefficients), q)))


def is_q_reduced(G: Multigraph, D: Divisor, q: int = BASE_VERTEX) -> bool:
    _check_graph(G, D)
    return is_superstable(G, D.coefficients, q)


def equivalent(G: Multigraph, D1: Divisor, D2: Divisor, q: int = BASE_VERTEX) -> bool:
    """D1 ~ D2, decided by comparing q-reduced forms"""
    _check_graph(G, D1)
    _check_graph(G, D2)
    if D1.degree != D2.degree:
        return False
    return reduce(G, D1, q) == reduce(G, D2, q)


def is_effective_class(G: Multigraph, D: Divisor, q: int = BASE_VERTEX) -> bool:
    """|D| is non-empty"""
    if D.degree < 0:
        return False
    return reduce(G, D, q)[q] >= 0


def canonical_divisor(G: Multigraph) -> Divisor:
    """K = sum (deg(v) - 2) v, loops counting twice"""
    return Divisor(G, tuple(d - 2 for d in G.valency))


# ============ Divisor text format ============

def parse_divisor(G: Multigraph, text: str) -> Divisor:
    """Parse `v:k` pairs separated by commas; vertices by index or label"""
    mapping = {}
    position = 1
    for chunk in text.split(","):
        item = chunk.strip()
        if item:
            column = position + chunk.index(item)
            name, sep, value = item.partition(":")
            if not sep:
                raise ParseError(f"expected 'vertex:coefficient', got {item!r}", 1, column)
            try:
                v = G.vertex_index(name.strip())
            except ValidationError as e:
                raise ParseError(str(e), 1, column) from None
            try:
                k = int(value.strip())
            except ValueError:
                raise ParseError(f"bad coefficient {value.strip()!r}", 1, column + len(name) + 1) from None
            mapping[v] = mapping.get(v, 0) + k
        position += len(chunk) + 1
    return Divisor.from_mapping(G, mapping)


def format_divisor(D: Divisor, use_labels: bool = False) -> str:
    names = D.graph.vertex_name if use_labels else str
    return ",".join(f"{names(v)}:{k}" for v, k in enumerate(D.coefficients) if k)
