"""Exact big-integer counting of degree-constrained subgraphs.

The count N(G, d) of subgraphs of G with degree sequence d equals the
coefficient of x1^d1 ... xn^dn in the product of (1 + x_j x_k) over the
edges of G.  The extraction is done by dynamic programming: vertices are
eliminated one at a time, the state being the residual degrees of the
vertices not yet finished.  Memoization keys are canonicalized over twin
vertices (vertices whose swap is an automorphism of the remaining
graph), which collapses the state space of symmetric instances such as
complete graphs to sorted residual multisets.

All counts are Python ints, so arbitrary precision comes for free.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import BudgetExceededError, DomainError
from .graphs import Graph, build_graph, complete_graph

__all__ = [
    "exact_factor_count",
    "exact_regular_count",
    "exact_edge_probability",
]

DEFAULT_STATE_BUDGET = 10**8


def _elimination_order(graph: Graph) -> list[int]:
    """Min-degree-last order: repeatedly peel a minimum-degree vertex;
    processing then runs in reverse peel order."""
    nbrs = [set(a) for a in graph.neighbors()]
    deg = [len(s) for s in nbrs]
    alive = set(range(graph.n))
    peeled = []
    for _ in range(graph.n):
        v = min(alive, key=lambda u: (deg[u], u))
        peeled.append(v)
        alive.remove(v)
        for w in nbrs[v]:
            if w in alive:
                deg[w] -= 1
    peeled.reverse()
    return peeled


def _twin_classes_per_step(
    graph: Graph, order: list[int]
) -> list[list[list[int]]]:
    """For each step i, partition positions i+1..n-1 into twin classes of
    the graph induced on positions >= i.

    Vertices u, v are twins when N(u) - {v} == N(v) - {u} in the induced
    graph.  True twins share a closed neighborhood, false twins an open
    one; a vertex cannot sit in a nontrivial class of both kinds, so the
    two groupings merge into a partition.  Any permutation within a class
    is an automorphism fixing everything else, hence residuals within a
    class may be sorted in memo keys and partners chosen by count.
    """
    n = graph.n
    adj = [set(a) for a in graph.neighbors()]
    pos_of = {v: i for i, v in enumerate(order)}
    out = []
    for i in range(n):
        suffix_set = set(order[i:])
        members = order[i + 1:]
        closed_groups: dict[frozenset, list[int]] = {}
        for v in members:
            nb = adj[v] & suffix_set
            closed_groups.setdefault(frozenset(nb | {v}), []).append(v)
        classes = [grp for grp in closed_groups.values() if len(grp) > 1]
        singles = [grp[0] for grp in closed_groups.values() if len(grp) == 1]
        open_groups: dict[frozenset, list[int]] = {}
        for v in singles:
            open_groups.setdefault(frozenset(adj[v] & suffix_set), []).append(v)
        classes.extend(open_groups.values())
        out.append(sorted(sorted(pos_of[v] for v in cls) for cls in classes))
    return out


def exact_factor_count(
    graph: Graph,
    d: Sequence[int],
    max_states: int = DEFAULT_STATE_BUDGET,
) -> int:
    """Number of subgraphs of ``graph`` whose degree sequence equals ``d``.

    Returns 0 when the degree sum is odd.  Raises DomainError when some
    d_j is negative or exceeds the vertex degree, and BudgetExceededError
    when the memo table would outgrow ``max_states``.
    """
    n = graph.n
    d_list = [int(x) for x in d]
    if len(d_list) != n:
        raise DomainError(f"degree sequence has length {len(d_list)}, expected {n}")
    for j, (dj, gj) in enumerate(zip(d_list, graph.g)):
        if dj < 0 or dj > gj:
            raise DomainError(
                f"target degree d[{j + 1}]={dj} outside 0..g[{j + 1}]={gj}"
            )
    if sum(d_list) % 2 == 1:
        return 0
    if graph.edge_count == 0:
        return 1

    order = _elimination_order(graph)
    pos_of = {v: i for i, v in enumerate(order)}
    adj = graph.neighbors()
    later_nbrs = [
        sorted(pos_of[w] for w in adj[order[i]] if pos_of[w] > i) for i in range(n)
    ]
    # fcap[i][p]: partners still available to position p strictly after step i
    fcap = [[0] * n for _ in range(n)]
    for i in range(n):
        for p in range(i + 1, n):
            v = order[p]
            fcap[i][p] = sum(1 for w in adj[v] if pos_of[w] > i)
    classes_at = _twin_classes_per_step(graph, order)
    class_id_at = []
    for i in range(n):
        cid = {}
        for ci, cls in enumerate(classes_at[i]):
            for p in cls:
                cid[p] = ci
        class_id_at.append(cid)

    memo: dict[tuple, int] = {}

    def canonical_key(i: int, res: tuple[int, ...]) -> tuple:
        parts = [res[i]]
        for cls in classes_at[i]:
            parts.append(tuple(sorted(res[p] for p in cls)))
        return (i, tuple(parts))

    def count(i: int, res: tuple[int, ...]) -> int:
        if i == n:
            return 1
        key = canonical_key(i, res)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(memo) > max_states:
            raise BudgetExceededError(
                f"state budget exceeded: more than {max_states} DP states",
                count=len(memo),
                budget=max_states,
            )
        need = res[i]
        nbr_positions = later_nbrs[i]
        cap = fcap[i]
        total = 0
        partners = [p for p in nbr_positions if res[p] > 0]
        if need <= len(partners):
            cid = class_id_at[i]
            groups: dict[tuple[int, int], list[int]] = {}
            for p in partners:
                groups.setdefault((cid[p], res[p]), []).append(p)
            group_list = list(groups.values())

            def recurse_choice(gi: int, remaining: int, ways: int, chosen: list[int]):
                nonlocal total
                if remaining == 0:
                    new = list(res)
                    new[i] = 0
                    for p in chosen:
                        new[p] -= 1
                    for p in nbr_positions:
                        if new[p] > cap[p]:
                            return
                    total += ways * count(i + 1, tuple(new))
                    return
                if gi == len(group_list):
                    return
                avail = len(group_list[gi])
                for take in range(min(avail, remaining) + 1):
                    recurse_choice(
                        gi + 1,
                        remaining - take,
                        ways * comb(avail, take),
                        chosen + group_list[gi][:take],
                    )

            recurse_choice(0, need, 1, [])
        memo[key] = total
        return total

    res0 = [0] * n
    for i in range(n):
        res0[i] = d_list[order[i]]
    return count(0, tuple(res0))


def exact_regular_count(
    n: int,
    d: int,
    max_states: int = DEFAULT_STATE_BUDGET,
) -> int:
    """Number of labelled d-regular graphs on n vertices."""
    if not (0 <= d <= n - 1):
        raise DomainError(f"degree {d} outside 0..{n - 1}")
    if (n * d) % 2 == 1:
        return 0
    if d == 0:
        return 1
    return exact_factor_count(complete_graph(n), [d] * n, max_states=max_states)


def exact_edge_probability(
    graph: Graph,
    d: Sequence[int],
    u: int,
    v: int,
    max_states: int = DEFAULT_STATE_BUDGET,
) -> Fraction:
    """Probability that a uniform random d-factor of the graph contains
    the edge (u, v), as an exact rational.

    Equals N(G - uv, d - e) / N(G, d) where e is the degree sequence of
    the single edge uv.
    """
    if not graph.has_edge(u, v):
        raise DomainError(f"({u + 1}, {v + 1}) is not an edge of the graph")
    denominator = exact_factor_count(graph, d, max_states=max_states)
    if denominator == 0:
        raise DomainError("no factor with the requested degree sequence exists")
    d_list = [int(x) for x in d]
    if d_list[u] == 0 or d_list[v] == 0:
        return Fraction(0, 1)
    a, b = (u, v) if u < v else (v, u)
    reduced = build_graph(graph.n, [e for e in graph.edges if e != (a, b)])
    d_minus = list(d_list)
    d_minus[u] -= 1
    d_minus[v] -= 1
    numerator = exact_factor_count(reduced, d_minus, max_states=max_states)
    return Fraction(numerator, denominator)
