"""Graph representation, parsing, and spectral/expansion diagnostics.

Vertices are 0-based inside the library; all text formats and the CLI use
1-based labels.  Graphs are simple (no loops, no parallel edges) and
undirected, stored as a sorted tuple of (j, k) pairs with j < k together
with the degree vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, ParseError

__all__ = [
    "Graph",
    "build_graph",
    "parse_edge_list",
    "parse_graph6",
    "serialize_edge_list",
    "complete_graph",
    "signless_laplacian",
    "laplacian",
    "algebraic_bipartiteness",
    "cheeger",
    "CheegerResult",
    "AssumptionParams",
    "Clause",
    "AssumptionReport",
    "check_assumptions",
    "density_parameters",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected labelled graph on vertices 0..n-1."""

    n: int
    edges: tuple[tuple[int, int], ...]
    g: tuple[int, ...]

    def has_edge(self, j: int, k: int) -> bool:
        if j > k:
            j, k = k, j
        return (j, k) in self._edge_set()

    def _edge_set(self) -> frozenset:
        # cached lazily on the instance despite frozen dataclass
        cached = self.__dict__.get("_edges_frozen")
        if cached is None:
            cached = frozenset(self.edges)
            object.__setattr__(self, "_edges_frozen", cached)
        return cached

    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Adjacency lists, sorted, one tuple per vertex."""
        cached = self.__dict__.get("_nbrs")
        if cached is None:
            lists: list[list[int]] = [[] for _ in range(self.n)]
            for j, k in self.edges:
                lists[j].append(k)
                lists[k].append(j)
            cached = tuple(tuple(sorted(l)) for l in lists)
            object.__setattr__(self, "_nbrs", cached)
        return cached

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for j, k in self.edges:
            a[j, k] = 1.0
            a[k, j] = 1.0
        return a

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Construct a validated Graph from 0-based vertex pairs."""
    if n < 1:
        raise DomainError(f"vertex count must be positive, got {n}")
    seen = set()
    normalized = []
    for j, k in edges:
        if j == k:
            raise ParseError(f"self-loop at vertex {j + 1}")
        if j > k:
            j, k = k, j
        if not (0 <= j and k < n):
            raise ParseError(f"edge ({j + 1}, {k + 1}) outside vertex range 1..{n}")
        if (j, k) in seen:
            raise ParseError(f"duplicate edge ({j + 1}, {k + 1})")
        seen.add((j, k))
        normalized.append((j, k))
    normalized.sort()
    deg = [0] * n
    for j, k in normalized:
        deg[j] += 1
        deg[k] += 1
    return Graph(n=n, edges=tuple(normalized), g=tuple(deg))


def parse_edge_list(text: str) -> Graph:
    """Parse newline-separated "j k" pairs of 1-based vertex labels.

    An optional header line "n=<int>" fixes the vertex count; otherwise it
    is the largest label seen.  Blank lines and lines starting with '#'
    are ignored.  Errors name the offending line number.
    """
    n_header: Optional[int] = None
    raw_edges: list[tuple[int, int]] = []
    max_seen = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("n="):
            try:
                n_header = int(stripped[2:])
            except ValueError:
                raise ParseError(f"line {lineno}: bad vertex-count header {stripped!r}")
            if n_header < 1:
                raise ParseError(f"line {lineno}: vertex count must be positive")
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected two vertex labels, got {stripped!r}")
        try:
            j, k = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex label in {stripped!r}")
        if j < 1 or k < 1:
            raise ParseError(f"line {lineno}: vertex labels are 1-based, got {stripped!r}")
        if j == k:
            raise ParseError(f"line {lineno}: self-loop at vertex {j}")
        raw_edges.append((j - 1, k - 1))
        max_seen = max(max_seen, j, k)

    n = n_header if n_header is not None else max_seen
    if n == 0:
        raise ParseError("no vertices: empty input without an n= header")
    if max_seen > n:
        raise ParseError(f"edge label {max_seen} exceeds declared vertex count {n}")
    try:
        return build_graph(n, raw_edges)
    except ParseError as exc:
        raise ParseError(str(exc)) from None


def parse_graph6(text: str) -> Graph:
    """Decode a graph6 string (standard ASCII encoding)."""
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise ParseError("empty graph6 string")
    data = []
    for ch in s:
        v = ord(ch) - 63
        if not (0 <= v <= 63):
            raise ParseError(f"invalid graph6 character {ch!r}")
        data.append(v)
    if data[0] <= 62:
        n = data[0]
        body = data[1:]
    elif len(data) >= 4 and data[1] <= 62:
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        body = data[4:]
    elif len(data) >= 8:
        n = 0
        for v in data[2:8]:
            n = (n << 6) | v
        body = data[8:]
    else:
        raise ParseError("truncated graph6 header")
    if n < 1:
        raise ParseError("graph6 graph must have at least one vertex")
    nbits = n * (n - 1) // 2
    if len(body) * 6 < nbits:
        raise ParseError("graph6 body too short for declared vertex count")
    bits = []
    for v in body:
        for shift in range(5, -1, -1):
            bits.append((v >> shift) & 1)
    edges = []
    idx = 0
    for k in range(1, n):
        for j in range(k):
            if bits[idx]:
                edges.append((j, k))
            idx += 1
    return build_graph(n, edges)


def serialize_edge_list(graph: Graph) -> str:
    """Canonical edge-list text: n= header plus sorted 1-based pairs."""
    lines = [f"n={graph.n}"]
    lines.extend(f"{j + 1} {k + 1}" for j, k in graph.edges)
    return "\n".join(lines) + "\n"


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise DomainError(f"complete graph needs at least 2 vertices, got {n}")
    return build_graph(n, combinations(range(n), 2))


def signless_laplacian(graph: Graph) -> np.ndarray:
    """Degree matrix plus adjacency matrix."""
    q = graph.adjacency()
    q[np.diag_indices(graph.n)] = graph.g
    return q


def laplacian(graph: Graph) -> np.ndarray:
    """Degree matrix minus adjacency matrix."""
    lap = -graph.adjacency()
    lap[np.diag_indices(graph.n)] = graph.g
    return lap


def algebraic_bipartiteness(graph: Graph) -> float:
    """Least eigenvalue of the signless Laplacian.

    Zero exactly when the graph has a bipartite component; large values
    certify distance from bipartiteness.
    """
    if graph.n < 2:
        raise DomainError("algebraic bipartiteness needs at least 2 vertices")
    ev = float(np.linalg.eigvalsh(signless_laplacian(graph))[0])
    if -1e-9 < ev < 0.0:
        return 0.0
    return ev


@dataclass(frozen=True)
class CheegerResult:
    """Certified lower bound on the isoperimetric constant.

    ``exact`` is set when the bound came from exhaustive subset
    enumeration, in which case ``lower_bound == exact``.
    """

    lower_bound: float
    exact: Optional[float]


def cheeger(graph: Graph, exact_limit: int = 20) -> CheegerResult:
    """Isoperimetric constant min |boundary(U)| / |U| over |U| <= n/2.

    Exact by subset enumeration when n <= exact_limit; otherwise returns
    the spectral bound lambda_2(Laplacian) / 2, flagged as a bound only.
    """
    n = graph.n
    if n <= exact_limit:
        masks = [0] * n
        for j, k in graph.edges:
            masks[j] |= 1 << k
            masks[k] |= 1 << j
        full = (1 << n) - 1
        half = n // 2
        best: Optional[Fraction] = None
        for mask in range(1, 1 << n):
            size = mask.bit_count()
            if size > half:
                continue
            outside = full & ~mask
            boundary = 0
            m = mask
            while m:
                v = (m & -m).bit_length() - 1
                boundary += (masks[v] & outside).bit_count()
                m &= m - 1
            ratio = Fraction(boundary, size)
            if best is None or ratio < best:
                best = ratio
        value = float(best)
        return CheegerResult(lower_bound=value, exact=value)
    lam2 = float(np.linalg.eigvalsh(laplacian(graph))[1])
    return CheegerResult(lower_bound=max(lam2 / 2.0, 0.0), exact=None)


def density_parameters(graph: Graph, d: Sequence[float]) -> tuple[float, float]:
    """Edge density lambda = sum(d) / sum(g) and variance factor
    Lambda = lambda * (1 - lambda)."""
    total_g = sum(graph.g)
    if total_g == 0:
        raise DomainError("graph has no edges")
    lam = float(sum(d)) / float(total_g)
    return lam, lam * (1.0 - lam)


@dataclass(frozen=True)
class AssumptionParams:
    """Constants against which the density/expansion assumptions are judged."""

    sigma: float = 1.0
    B: float = 0.1
    C: float = 2.0
    tau_q: float = 0.1
    eps: float = 1.0 / 32.0
    p: float = 1.0

    def __post_init__(self):
        for name in ("sigma", "B", "C", "tau_q", "eps", "p"):
            if getattr(self, name) <= 0:
                raise DomainError(f"assumption parameter {name} must be positive")
        if not self.sigma <= 1.0:
            raise DomainError("sigma must lie in (0, 1]")
        if not self.eps < self.sigma / 16.0:
            raise DomainError("eps must be smaller than sigma / 16")


@dataclass(frozen=True)
class Clause:
    passed: bool
    values: dict


@dataclass(frozen=True)
class AssumptionReport:
    """Literal per-clause evaluation of the density/expansion assumptions.

    Clauses (c) and (e) involve rates whose constants are a judgment
    call, so the measured ratios are reported alongside the verdict.
    """

    d_le_g: Clause
    beta_spread: Clause
    lambda_lower: Clause
    cheeger_and_q: Clause
    delta_norms: Clause

    @property
    def all_pass(self) -> bool:
        return all(
            clause.passed
            for clause in (
                self.d_le_g,
                self.beta_spread,
                self.lambda_lower,
                self.cheeger_and_q,
                self.delta_norms,
            )
        )


def check_assumptions(
    graph: Graph,
    d: Sequence[float],
    beta: Sequence[float],
    params: AssumptionParams,
    cheeger_exact_limit: int = 20,
) -> AssumptionReport:
    """Evaluate each assumption clause literally and report measured values."""
    from .betas import delta_residual

    n = graph.n
    d_arr = np.asarray(d, dtype=float)
    beta_arr = np.asarray(beta, dtype=float)
    if d_arr.shape != (n,) or beta_arr.shape != (n,):
        raise DomainError("degree and beta vectors must have length n")

    g_arr = np.asarray(graph.g, dtype=float)
    lam, big_lambda = density_parameters(graph, d_arr)

    excess = float(np.max(d_arr - g_arr))
    clause_a = Clause(passed=bool(excess <= 0), values={"max_d_minus_g": excess})

    spread = float(np.max(beta_arr) - np.min(beta_arr)) if n > 0 else 0.0
    clause_b = Clause(passed=bool(spread <= params.C), values={"spread": spread, "C": params.C})

    scale_c = n ** (params.sigma - 1.0)
    ratio_c = big_lambda / scale_c
    clause_c = Clause(
        passed=bool(ratio_c >= params.B),
        values={"Lambda": big_lambda, "ratio": ratio_c, "B": params.B},
    )

    # log here is base 10: the expansion threshold is a base-free
    # asymptotic rate and base 10 keeps desk-scale instances meaningful.
    h = cheeger(graph, exact_limit=cheeger_exact_limit)
    h_threshold = (math.log10(n) ** 2) / big_lambda if big_lambda > 0 else math.inf
    q = algebraic_bipartiteness(graph)
    q_threshold = params.tau_q * n
    clause_d = Clause(
        passed=bool(h.lower_bound >= h_threshold and q >= q_threshold),
        values={
            "cheeger_lower_bound": h.lower_bound,
            "cheeger_exact": h.exact if h.exact is not None else float("nan"),
            "cheeger_threshold": h_threshold,
            "q": q,
            "q_threshold": q_threshold,
        },
    )

    res = delta_residual(graph, d_arr, beta_arr)
    scale_inf = math.sqrt(big_lambda) * n ** (0.5 - params.sigma / 2.0)
    scale_one = n ** (1.0 + params.eps)
    ratio_inf = res.inf_norm / scale_inf if scale_inf > 0 else math.inf
    ratio_one = res.one_norm / scale_one
    clause_e = Clause(
        passed=bool(ratio_inf <= 1.0 and ratio_one <= 1.0),
        values={
            "delta_inf": res.inf_norm,
            "delta_one": res.one_norm,
            "ratio_inf": ratio_inf,
            "ratio_one": ratio_one,
        },
    )

    return AssumptionReport(
        d_le_g=clause_a,
        beta_spread=clause_b,
        lambda_lower=clause_c,
        cheeger_and_q=clause_d,
        delta_norms=clause_e,
    )
