"""Wick calculus: Gaussian moments, joint cumulants, and cumulants of
polynomial functionals.

Moments of products of centered jointly Gaussian variables are sums over
pairings of products of covariances; joint cumulants keep only pairings
whose induced graph on the argument blocks is connected.  Both are
exposed as direct enumerations (`gaussian_moment`, `joint_cumulant`) and
as closed forms over pair-count patterns (`power_moment`,
`power_joint_cumulant`) that agree with the enumerations but scale to
high powers.

Polynomial functionals are held as a `MonomialSum`: each term stands for

    coeff * i**degree * (theta_j + theta_k)**degree

with a real coefficient and the power of i implied, never stored.  A
linear term on pair (j, j) stands for coeff * i * theta_j.  Tuples of
terms with odd total degree vanish; for even total degree the implied
phase is (-1)**(total/2), so every cumulant is computed in real
arithmetic by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError, DomainError
from .gaussian import GaussianModel

__all__ = [
    "taylor_coefficients",
    "iter_pairings",
    "gaussian_moment",
    "joint_cumulant",
    "power_moment",
    "power_joint_cumulant",
    "set_partitions",
    "kn_covariances",
    "overlap_covariance_accessor",
    "pair_covariance_accessor",
    "Term",
    "MonomialSum",
    "cumulant_of_polynomial",
]

MAX_PAIRING_SLOTS = 16
DEFAULT_TUPLE_BUDGET = 10**7

Accessor = Callable[[object, object], float]


# ---------------------------------------------------------------------------
# Taylor coefficients of log(1 + lam * (e^{iz} - 1))


@lru_cache(maxsize=None)
def _b_polynomials(l_max: int) -> tuple:
    """Coefficient polynomials in lam, exact rationals, for degrees
    1..l_max of the series log(1 + lam*(e^u - 1)) in u."""
    w: list[dict[int, Fraction]] = [dict() for _ in range(l_max + 1)]
    for m in range(1, l_max + 1):
        w[m] = {1: Fraction(1, factorial(m))}
    acc: list[dict[int, Fraction]] = [dict() for _ in range(l_max + 1)]
    power = w
    for t in range(1, l_max + 1):
        coef = Fraction((-1) ** (t + 1), t)
        for m in range(t, l_max + 1):
            for lampow, c in power[m].items():
                acc[m][lampow] = acc[m].get(lampow, Fraction(0)) + coef * c
        if t < l_max:
            power = _series_mult(power, w, l_max)
    return tuple(
        tuple(sorted(acc[m].items())) for m in range(l_max + 1)
    )


def _series_mult(a, b, l_max: int):
    out: list[dict[int, Fraction]] = [dict() for _ in range(l_max + 1)]
    for i in range(l_max + 1):
        if not a[i]:
            continue
        for j in range(1, l_max + 1 - i):
            if not b[j]:
                continue
            target = out[i + j]
            for pa, ca in a[i].items():
                for pb, cb in b[j].items():
                    key = pa + pb
                    target[key] = target.get(key, Fraction(0)) + ca * cb
    return out


def taylor_coefficients(lam: float, l_max: int) -> np.ndarray:
    """Real coefficients b_ell with the full Taylor coefficient being
    i**ell * b_ell.  Index 0 is unused and zero.

    Computed by exact rational series composition, then evaluated at the
    (exactly represented) float lam.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lam={lam} must lie strictly inside (0, 1)")
    if l_max < 1:
        raise DomainError("l_max must be at least 1")
    polys = _b_polynomials(l_max)
    lam_exact = Fraction(lam)
    b = np.zeros(l_max + 1)
    for m in range(1, l_max + 1):
        total = Fraction(0)
        for power, coeff in polys[m]:
            total += coeff * lam_exact**power
        b[m] = float(total)
    return b


# ---------------------------------------------------------------------------
# Pairing enumerations


def iter_pairings(items: Iterable) -> Iterator[list[tuple]]:
    """Yield every partition of the items into unordered pairs."""
    items = list(items)
    if not items:
        yield []
        return
    first = items[0]
    rest = items[1:]
    for i, second in enumerate(rest):
        for tail in iter_pairings(rest[:i] + rest[i + 1:]):
            yield [(first, second)] + tail


def _slot_cov_matrix(slots: Sequence, cov: Accessor) -> list[list[float]]:
    k = len(slots)
    m = [[0.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            c = float(cov(slots[i], slots[j]))
            m[i][j] = c
            m[j][i] = c
    return m


def gaussian_moment(ids: Sequence, cov: Accessor) -> float:
    """E of the product of the listed Gaussian variables: sum over all
    pairings of products of covariances; zero for an odd number."""
    k = len(ids)
    if k % 2 == 1:
        return 0.0
    if k == 0:
        return 1.0
    if k > MAX_PAIRING_SLOTS:
        raise BudgetExceededError(
            f"{k} slots exceeds the pairing cap of {MAX_PAIRING_SLOTS}"
        )
    covm = _slot_cov_matrix(ids, cov)
    contributions: list[float] = []

    def rec(free: list[int], prod: float):
        if not free:
            contributions.append(prod)
            return
        a = free[0]
        rest = free[1:]
        row = covm[a]
        for i, b in enumerate(rest):
            c = row[b]
            if c == 0.0:
                continue
            rec(rest[:i] + rest[i + 1:], prod * c)

    rec(list(range(k)), 1.0)
    return math.fsum(contributions)


def joint_cumulant(blocks: Sequence[Sequence], cov: Accessor) -> float:
    """Joint cumulant of products of Gaussian variables, one product per
    block: the sum over pairings whose induced block graph is connected.
    """
    if len(blocks) < 1 or any(len(b) == 0 for b in blocks):
        raise DomainError("blocks must be nonempty")
    slots = [x for b in blocks for x in b]
    k = len(slots)
    if k % 2 == 1:
        return 0.0
    if k > MAX_PAIRING_SLOTS:
        raise BudgetExceededError(
            f"{k} slots exceeds the pairing cap of {MAX_PAIRING_SLOTS}"
        )
    r = len(blocks)
    if r == 1:
        return gaussian_moment(list(blocks[0]), cov)
    block_of = []
    for bi, b in enumerate(blocks):
        block_of.extend([bi] * len(b))
    covm = _slot_cov_matrix(slots, cov)
    contributions: list[float] = []

    def find(parent: list[int], x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def rec(free: list[int], parent: list[int], ncomp: int, prod: float):
        if not free:
            if ncomp == 1:
                contributions.append(prod)
            return
        a = free[0]
        rest = free[1:]
        row = covm[a]
        ba = block_of[a]
        for i, b in enumerate(rest):
            c = row[b]
            if c == 0.0:
                continue
            bb = block_of[b]
            new_parent = parent.copy()
            ra, rb = find(new_parent, ba), find(new_parent, bb)
            new_ncomp = ncomp
            if ra != rb:
                new_parent[ra] = rb
                new_ncomp -= 1
            rec(rest[:i] + rest[i + 1:], new_parent, new_ncomp, prod * c)

    rec(list(range(k)), list(range(r)), r, 1.0)
    return math.fsum(contributions)


# ---------------------------------------------------------------------------
# Closed forms over pair-count patterns


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """Yield every partition of the items into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first = items[0]
    for tail in set_partitions(items[1:]):
        for i in range(len(tail)):
            yield tail[:i] + [[first] + tail[i]] + tail[i + 1:]
        yield [[first]] + tail


def power_moment(ells: Sequence[int], cov: Sequence[Sequence[float]]) -> float:
    """E[prod V_i**ells[i]] for centered jointly Gaussian V with the given
    covariance matrix, via enumeration of pair-count patterns.

    A pattern assigns m_ii self-pairs to variable i and m_ij cross pairs
    to each unordered pair; it is realized by
    prod(ells!) / (prod 2**m_ii m_ii! * prod m_ij!) pairings, an exact
    integer, and contributes that count times the covariance monomial.
    """
    r = len(ells)
    total = sum(ells)
    if total % 2 == 1:
        return 0.0
    if total == 0:
        return 1.0
    covf = [[float(cov[i][j]) for j in range(r)] for i in range(r)]
    numerator = 1
    for l in ells:
        numerator *= factorial(l)
    rem = list(ells)
    contributions: list[float] = []

    def cross(i: int, j: int, remaining: int, denom: int, covprod: float):
        if remaining == 0:
            assign(i + 1, denom, covprod)
            return
        if j >= r:
            return
        cross(i, j + 1, remaining, denom, covprod)
        cij = covf[i][j]
        limit = min(remaining, rem[j])
        for x in range(1, limit + 1):
            if cij == 0.0:
                break
            rem[j] -= x
            cross(i, j + 1, remaining - x, denom * factorial(x), covprod * cij**x)
            rem[j] += x

    def assign(i: int, denom: int, covprod: float):
        if i == r:
            contributions.append((numerator // denom) * covprod)
            return
        target = rem[i]
        cii = covf[i][i]
        for a in range(target // 2 + 1):
            if a > 0 and cii == 0.0:
                break
            cross(
                i,
                i + 1,
                target - 2 * a,
                denom * (2**a) * factorial(a),
                covprod * cii**a,
            )

    assign(0, 1, 1.0)
    return math.fsum(contributions)


def power_joint_cumulant(ells: Sequence[int], cov: Sequence[Sequence[float]]) -> float:
    """Joint cumulant of V_i**ells[i] via the classical moment-partition
    formula; agrees with `joint_cumulant` on blocks of repeated slots but
    has no slot cap."""
    r = len(ells)
    if r < 1:
        raise DomainError("need at least one block")
    if sum(ells) % 2 == 1:
        return 0.0
    contributions: list[float] = []
    for partition in set_partitions(list(range(r))):
        t = len(partition)
        weight = float((-1) ** (t - 1) * factorial(t - 1))
        prod = weight
        for part in partition:
            sub_ells = [ells[i] for i in part]
            sub_cov = [[cov[a][b] for b in part] for a in part]
            m = power_moment(sub_ells, sub_cov)
            if m == 0.0:
                prod = 0.0
                break
            prod *= m
        contributions.append(prod)
    return math.fsum(contributions)


# ---------------------------------------------------------------------------
# Covariance accessors


def kn_covariances(n: int) -> tuple[float, float, float]:
    """Covariances (sigma0, sigma1, sigma2) of the scaled pair variables
    on the complete graph, by the number of shared endpoints (0, 1, 2)."""
    if n < 4:
        raise DomainError("need n >= 4 so that disjoint pairs exist")
    s2 = 2.0 * n / (n - 1)
    s1 = (n - 3.0) * n / ((n - 1) * (n - 2))
    s0 = -2.0 * n / ((n - 1) * (n - 2))
    return s0, s1, s2


def overlap_covariance_accessor(s0: float, s1: float, s2: float) -> Accessor:
    """Accessor on unordered vertex pairs keyed by overlap size."""

    table = (float(s0), float(s1), float(s2))

    def cov(p, q) -> float:
        shared = len(set(p) & set(q))
        return table[shared]

    return cov


def pair_covariance_accessor(sigma: np.ndarray) -> Accessor:
    """Accessor on (j, k) pairs of the unscaled variables theta_j+theta_k,
    summing entries of the underlying covariance matrix.  A pair (j, j)
    denotes the single variable theta_j."""

    def cov(p, q) -> float:
        ep = (p[0],) if p[0] == p[1] else p
        eq = (q[0],) if q[0] == q[1] else q
        total = 0.0
        for a in ep:
            for b in eq:
                total += sigma[a, b]
        return float(total)

    return cov


# ---------------------------------------------------------------------------
# Cumulants of polynomial functionals


@dataclass(frozen=True)
class Term:
    """coeff * i**degree * (theta_j + theta_k)**degree; pair (j, j) means
    coeff * i * theta_j for the linear residual terms."""

    degree: int
    coeff: float
    pair: tuple[int, int]


@dataclass(frozen=True)
class MonomialSum:
    terms: tuple[Term, ...]


def cumulant_of_polynomial(
    poly: MonomialSum,
    model: GaussianModel,
    r: int,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> float:
    """r-th cumulant of the polynomial evaluated on the model Gaussian.

    Expands kappa_r multilinearly over unordered r-multisets of terms
    with multinomial weights.  Tuples of odd total degree vanish; even
    ones carry the implied phase (-1)**(total/2), so the result is real
    by construction.  Raises BudgetExceededError when the projected
    multiset count exceeds the budget.
    """
    if r < 1:
        raise DomainError("cumulant order r must be at least 1")
    terms = [t for t in poly.terms if t.coeff != 0.0]
    num_terms = len(terms)
    if num_terms == 0:
        return 0.0
    n = model.n
    for t in terms:
        j, k = t.pair
        if not (0 <= j < n and 0 <= k < n):
            raise DomainError(f"term pair {t.pair} outside model dimension {n}")
    projected = comb(num_terms + r - 1, r)
    if projected > budget:
        raise BudgetExceededError(
            f"projected multiset count {projected} exceeds budget {budget}; "
            "lower the truncation orders or raise the budget",
            count=projected,
            budget=budget,
        )

    sigma = model.Sigma
    degrees = [t.degree for t in terms]
    coeffs = [t.coeff for t in terms]
    pairs = [t.pair for t in terms]

    # covariance between the slot variables of two terms
    dense_cap = 1500
    if num_terms <= dense_cap:
        marks = np.zeros((num_terms, n))
        for idx, (j, k) in enumerate(pairs):
            marks[idx, j] += 1.0
            if k != j:
                marks[idx, k] += 1.0
        tcov_dense = (marks @ sigma @ marks.T).tolist()

        def tcov(a: int, b: int) -> float:
            return tcov_dense[a][b]

    else:
        accessor = pair_covariance_accessor(sigma)

        def tcov(a: int, b: int) -> float:
            return accessor(pairs[a], pairs[b])

    fact_r = factorial(r)
    cache: dict[tuple, float] = {}
    contributions: list[float] = []

    for combo in combinations_with_replacement(range(num_terms), r):
        total_degree = 0
        coeff = 1.0
        for idx in combo:
            total_degree += degrees[idx]
            coeff *= coeffs[idx]
        if total_degree % 2 == 1:
            continue

        mult = fact_r
        run = 1
        for a, b in zip(combo, combo[1:]):
            if a == b:
                run += 1
                mult //= run
            else:
                run = 1

        ells = tuple(degrees[idx] for idx in combo)
        covvals = []
        for x in range(r):
            for y in range(x, r):
                covvals.append(tcov(combo[x], combo[y]))
        key = (ells, tuple(covvals))
        val = cache.get(key)
        if val is None:
            covm = [[0.0] * r for _ in range(r)]
            pos = 0
            for x in range(r):
                for y in range(x, r):
                    covm[x][y] = covm[y][x] = covvals[pos]
                    pos += 1
            val = power_joint_cumulant(ells, covm)
            cache[key] = val
        if val == 0.0:
            continue
        phase = -1.0 if (total_degree // 2) % 2 else 1.0
        contributions.append(mult * phase * coeff * val)

    return math.fsum(contributions)
