"""
📈 Rank Module
Combinatorial rank r(D) and the loop-refined rank r#(D)
"""

import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement

from app.modules.divisor import (
    BASE_VERTEX,
    Divisor,
    GraphMismatchError,
    canonical_divisor,
    format_divisor,
    reduce,
    reduce_chips,
)
from app.modules.multigraph import Multigraph, genus, subdivide_loops

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankResult:
    """Rank of a divisor plus an auditable certificate.

    `certificate` is an effective divisor E of degree rank+1 on `certificate.graph`
    (the refined graph for r#) such that D - E has no effective representative.
    """

    rank: int
    certificate: Divisor
    reduced: Divisor

    @property
    def degree_exhausted(self) -> bool:
        # every E of degree <= deg D passed; the certificate fails on degree alone
        return self.certificate.degree > self.reduced.degree

    def verify(self, D: Divisor, q: int = BASE_VERTEX) -> bool:
        """Re-check the certificate: reduce(D - E, q)(q) < 0.

        D must live on the certificate's graph (transport it first for r#).
        """
        if self.certificate.degree != self.rank + 1 or not self.certificate.is_effective:
            return False
        residual = D - self.certificate
        if residual.degree < 0:
            return True
        return reduce(D.graph, residual, q)[q] < 0

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "certificate": format_divisor(self.certificate),
            "degree_exhausted": self.degree_exhausted,
            "reduced": format_divisor(self.reduced),
        }

    def describe(self) -> str:
        text = f"📈 **Rank:** {self.rank}\n"
        text += f"• Reduced form: `{format_divisor(self.reduced, use_labels=True) or '0'}`\n"
        if self.degree_exhausted:
            text += "• Certificate: degree exhausted"
        else:
            text += f"• Certificate E: `{format_divisor(self.certificate, use_labels=True) or '0'}` (|D - E| is empty)"
        return text


def _check_graph(G: Multigraph, D: Divisor):
    if D.graph is not G and D.graph != G:
        raise GraphMismatchError("divisor does not live on this graph")


def _rank_memo(G: Multigraph, chips: tuple, q: int, memo: dict) -> tuple:
    """(rank, certificate vertices) using r(D) = 1 + min_v r(D - v) on effective classes"""
    if sum(chips) < 0:
        return -1, ()
    key = tuple(reduce_chips(G, list(chips), q))
    cached = memo.get(key)
    if cached is not None:
        return cached
    if key[q] < 0:
        result = (-1, ())
    else:
        result = None
        for v in range(G.vertex_count):
            lowered = list(key)
            lowered[v] -= 1
            sub_rank, sub_cert = _rank_memo(G, tuple(lowered), q, memo)
            if result is None or sub_rank + 1 < result[0]:
                result = (sub_rank + 1, (v,) + sub_cert)
                if sub_rank == -1:
                    break
    memo[key] = result
    return result


def _rank_sweep(G: Multigraph, chips: tuple, q: int) -> tuple:
    """Literal quantifier sweep over effective E of degree 0, 1, ..., deg D"""
    degree = sum(chips)
    if degree < 0:
        return -1, ()
    for k in range(degree + 1):
        for support in combinations_with_replacement(range(G.vertex_count), k):
            residual = list(chips)
            for v in support:
                residual[v] -= 1
            if reduce_chips(G, residual, q)[q] < 0:
                return k - 1, support
    return degree, (q,) * (degree + 1)


def rank(G: Multigraph, D: Divisor, q: int = BASE_VERTEX, memo: dict = None, memoize: bool = True) -> RankResult:
    """Baker-Norine rank: largest k with |D - E| non-empty for every effective E of degree k"""
    _check_graph(G, D)
    G.check_vertex(q)
    if memoize:
        value, support = _rank_memo(G, D.coefficients, q, {} if memo is None else memo)
    else:
        value, support = _rank_sweep(G, D.coefficients, q)
    certificate = Divisor.zero(G)
    for v in support:
        certificate = certificate.plus_vertex(v)
    return RankResult(value, certificate, reduce(G, D, q))


def rank_at_least(G: Multigraph, D: Divisor, r: int, q: int = BASE_VERTEX, memo: dict = None) -> bool:
    """r(D) >= r, via r(D) >= r iff r(D - v) >= r - 1 for every vertex v"""
    _check_graph(G, D)
    if r < 0:
        return True
    if D.degree < r:
        return False
    memo = {} if memo is None else memo

    def at_least(chips: tuple, target: int) -> bool:
        if target < 0:
            return True
        if sum(chips) < target:
            return False
        key = tuple(reduce_chips(G, list(chips), q))
        known = memo.get(key)
        if known is not None:
            return known[0] >= target
        # decided thresholds sit next to exact ranks under (class, target)
        decided = memo.get((key, target))
        if decided is not None:
            return decided
        if key[q] < 0:
            result = False
        elif target == 0:
            result = True
        else:
            result = True
            for v in range(G.vertex_count):
                lowered = list(key)
                lowered[v] -= 1
                if not at_least(tuple(lowered), target - 1):
                    result = False
                    break
        memo[(key, target)] = result
        return result

    return at_least(D.coefficients, r)


def loop_refinement(G: Multigraph) -> tuple:
    """Loop subdivision with one inserted vertex per loop"""
    return subdivide_loops(G, [1] * G.loop_count)


def rank_sharp(G: Multigraph, D: Divisor, q: int = BASE_VERTEX, counts=None, memo: dict = None,
               memoize: bool = True) -> RankResult:
    """r#(D): rank of iota(D) on the loop subdivision (one vertex per loop unless `counts` given)"""
    _check_graph(G, D)
    if counts is None:
        target, refinement = loop_refinement(G)
    else:
        target, refinement = subdivide_loops(G, counts)
    return rank(target, refinement.transport(D), refinement.vertex_inclusion[q], memo=memo, memoize=memoize)


def riemann_roch_defect(G: Multigraph, D: Divisor, sharp: bool = True, q: int = BASE_VERTEX,
                        memo: dict = None) -> int:
    """(r(D) - r(K - D)) - (deg D - g + 1); zero when Riemann-Roch holds"""
    _check_graph(G, D)
    K = canonical_divisor(G)
    compute = rank_sharp if sharp else rank
    lhs = compute(G, D, q, memo=memo).rank - compute(G, K - D, q, memo=memo).rank
    return lhs - (D.degree - genus(G) + 1)


def clifford_holds(G: Multigraph, D: Divisor, q: int = BASE_VERTEX, memo: dict = None) -> bool:
    """2 r(D) <= deg D whenever 0 <= deg D <= 2g-2 and K - D is effective-equivalent"""
    _check_graph(G, D)
    K = canonical_divisor(G)
    if not 0 <= D.degree <= 2 * genus(G) - 2:
        return True
    if rank(G, K - D, q, memo=memo).rank < 0:
        return True
    return 2 * rank(G, D, q, memo=memo).rank <= D.degree
