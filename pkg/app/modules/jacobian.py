"""
🧮 Jacobian Module
Smith normal form, Jac(G) = Div0/Prin and enumeration of Pic^d by reduced divisors
"""

import logging
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import prod

import networkx as nx

from app.modules.divisor import BASE_VERTEX, Divisor, is_superstable
from app.modules.multigraph import Multigraph

logger = logging.getLogger(__name__)


def smith_invariants(M) -> list:
    """Diagonal of the Smith normal form of a square integer matrix (exact big integers)"""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("smith_invariants needs a square matrix")
    diagonal = []
    for t in range(n):
        while True:
            entries = [(abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, n) if A[i][j]]
            if not entries:
                # the rest is zero
                return diagonal + [0] * (n - t)
            _, pi, pj = min(entries)
            A[t], A[pi] = A[pi], A[t]
            for row in A:
                row[t], row[pj] = row[pj], row[t]
            pivot = A[t][t]
            clean = True
            for i in range(t + 1, n):
                factor = A[i][t] // pivot
                if factor:
                    A[i] = [a - factor * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    clean = False
            for j in range(t + 1, n):
                factor = A[t][j] // pivot
                if factor:
                    for row in A:
                        row[j] -= factor * row[t]
                if A[t][j]:
                    clean = False
            if not clean:
                continue
            # pivot must divide the remaining block
            offender = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if A[i][j] % pivot), None
            )
            if offender is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[offender])]
        diagonal.append(abs(A[t][t]))
    return diagonal


@dataclass(frozen=True)
class JacobianStructure:
    """Invariant factors d_1 | d_2 | ... (each >= 2) and the group order"""

    invariant_factors: tuple
    order: int

    def to_dict(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors), "order": str(self.order)}

    def describe(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " × ".join(f"Z/{d}" for d in self.invariant_factors)


def reduced_laplacian(G: Multigraph, q: int = BASE_VERTEX) -> list:
    keep = [v for v in range(G.vertex_count) if v != q]
    L = G.laplacian
    return [[int(L[i, j]) for j in keep] for i in keep]


def jacobian(G: Multigraph, q: int = BASE_VERTEX) -> JacobianStructure:
    G.check_vertex(q)
    factors = tuple(d for d in smith_invariants(reduced_laplacian(G, q)) if d != 1)
    return JacobianStructure(factors, prod(factors))


def picard_representatives(G: Multigraph, d: int, q: int = BASE_VERTEX):
    """Yield the q-reduced divisor of every class in Pic^d(G), breadth first.

    Reduced divisors of degree d are c + (d - deg c) q with c superstable on V - {q};
    superstables are closed downward, so adding one chip at a time from 0 reaches all.
    """
    G.check_vertex(q)
    others = [v for v in range(G.vertex_count) if v != q]
    start = tuple([0] * G.vertex_count)
    seen = {start}
    queue = deque([start])
    while queue:
        config = queue.popleft()
        coefficients = list(config)
        coefficients[q] = d - sum(config)
        yield Divisor(G, tuple(coefficients))
        for v in others:
            grown = list(config)
            grown[v] += 1
            grown = tuple(grown)
            if grown not in seen and is_superstable(G, grown, q):
                seen.add(grown)
                queue.append(grown)


def count_spanning_trees(G: Multigraph) -> int:
    """Brute-force spanning-tree count (parallel edges are distinct, loops never used)"""
    edges = [e for e in G.edges if e[0] != e[1]]
    total = 0
    for subset in combinations(range(len(edges)), G.vertex_count - 1):
        H = nx.MultiGraph()
        H.add_nodes_from(range(G.vertex_count))
        H.add_edges_from(edges[i] for i in subset)
        if nx.is_tree(H):
            total += 1
    return total
