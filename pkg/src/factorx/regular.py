"""Closed-form asymptotic expansion for the number of labelled regular
graphs.

RG(n, d) is approximated by

    sqrt(2) * (lam^lam (1-lam)^(1-lam))^C(n,2) * C(n-1, d)^n
            * exp( sum_{j=1..k} p_j(Lambda) / (Lambda^j n^(j-1)) )

with lam = d/(n-1) and Lambda = lam(1-lam).  The polynomials p_1..p_7
are exact; p_8 and p_9 are conjectural and only available behind an
explicit flag.  Base quantities are evaluated at 40 decimal digits so
the rendered mantissa is reliable to well beyond 11 significant digits.

The Stirling corrections exposed by `corrections` bridge this expansion
and the cumulant pipeline; they are not part of `rg_log_expansion`
itself, whose polynomials already absorb them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .errors import DomainError

__all__ = [
    "stirling_xi",
    "corrections",
    "p_poly",
    "Corrections",
    "RegularExpansionResult",
    "rg_log_expansion",
]

_WORK_DPS = 40

# p_j stored as (power of x, rational coefficient), mirroring the
# factored forms p_1 = x/4, p_2 = -x^2/4, p_3 = (2 - 23x)x^2/24, ...
_P_POLYS: dict[int, tuple[tuple[int, Fraction], ...]] = {
    1: ((1, Fraction(1, 4)),),
    2: ((2, Fraction(-1, 4)),),
    3: ((2, Fraction(2, 24)), (3, Fraction(-23, 24))),
    4: ((3, Fraction(22, 24)), (4, Fraction(-129, 24))),
    5: ((3, Fraction(-3, 12)), (4, Fraction(115, 12)), (5, Fraction(-483, 12))),
    6: ((4, Fraction(-375, 60)), (5, Fraction(6615, 60)), (6, Fraction(-22097, 60))),
    7: (
        (4, Fraction(1046, 720)),
        (5, Fraction(-87318, 720)),
        (6, Fraction(1002900, 720)),
        (7, Fraction(-2791541, 720)),
    ),
    # conjectural
    8: (
        (5, Fraction(104594, 1680)),
        (6, Fraction(-3726282, 1680)),
        (7, Fraction(31805060, 1680)),
        (8, Fraction(-75882319, 1680)),
    ),
    9: (
        (5, Fraction(-2235, 180)),
        (6, Fraction(329800, 180)),
        (7, Fraction(-7204710, 180)),
        (8, Fraction(48922725, 180)),
        (9, Fraction(-102061471, 180)),
    ),
}

MAX_EXACT_K = 7
MAX_CONJECTURAL_K = 9


def _xi_mp(x) -> mpmath.mpf:
    return (
        mpmath.loggamma(x + 1)
        - x * mpmath.log(x)
        + x
        - mpmath.log(2 * mpmath.pi * x) / 2
    )


def stirling_xi(N: float) -> float:
    """Correction xi(N) = log N! - N log N + N - log(2 pi N)/2."""
    if N <= 0:
        raise DomainError("stirling_xi needs a positive argument")
    with mpmath.workdps(_WORK_DPS):
        return float(_xi_mp(mpmath.mpf(N)))


def corrections(n: int, d: int) -> tuple[float, float]:
    """Stirling-style corrections (eps1, eps2) for the regular instance.

    eps1 = log(1 - 1/n) + (n-1) log(1 - 2/n); together with log 2 it is
    the log-determinant of the quadratic-form matrix on the complete
    graph.  eps2 packages the Stirling corrections of C(n-1, d)^n.
    """
    if not 2 <= d <= n - 3:
        raise DomainError("corrections need 2 <= d <= n-3")
    with mpmath.workdps(_WORK_DPS):
        nn = mpmath.mpf(n)
        eps1 = mpmath.log(1 - 1 / nn) + (n - 1) * mpmath.log(1 - 2 / nn)
        eps2 = (
            n * _xi_mp(nn - 1)
            - n * _xi_mp(mpmath.mpf(d))
            - n * _xi_mp(mpmath.mpf(n - 1 - d))
            - nn / 2 * mpmath.log(1 - 1 / nn)
        )
        return float(eps1), float(eps2)


def p_poly(j: int, x: float, allow_conjectural: bool = False) -> float:
    """Evaluate the j-th expansion polynomial at x."""
    if j < 1 or j > MAX_CONJECTURAL_K:
        raise DomainError(f"no expansion polynomial of index {j}")
    if j > MAX_EXACT_K and not allow_conjectural:
        raise DomainError(
            f"p_{j} is conjectural; pass allow_conjectural=True to use it"
        )
    total = 0.0
    for power, coeff in _P_POLYS[j]:
        total += float(coeff) * x**power
    return total


@dataclass(frozen=True)
class Corrections:
    eps1: Optional[float]
    eps2: Optional[float]
    base_log: float


@dataclass(frozen=True)
class RegularExpansionResult:
    """log_value = base_log + sum(terms); terms[j-1] is
    p_j(Lambda) / (Lambda^j n^(j-1)).  conjectural marks use of p_8/p_9.
    A log_value of -inf signals a count of zero (odd n*d)."""

    log_value: float
    terms: tuple[float, ...]
    corrections: Corrections
    k: int
    conjectural: bool


def rg_log_expansion(
    n: int,
    d: int,
    k: int = 7,
    allow_conjectural: bool = False,
) -> RegularExpansionResult:
    """Natural log of the k-term expansion of RG(n, d)."""
    if n < 3:
        raise DomainError("need n >= 3")
    if not 1 <= d <= n - 2:
        raise DomainError(f"degree {d} outside 1..{n - 2}")
    if k < 1 or k > MAX_CONJECTURAL_K:
        raise DomainError(f"k={k} outside 1..{MAX_CONJECTURAL_K}")
    if k > MAX_EXACT_K and not allow_conjectural:
        raise DomainError(
            f"k={k} uses conjectural polynomials; pass allow_conjectural=True"
        )
    conjectural = k > MAX_EXACT_K

    if (n * d) % 2 == 1:
        return RegularExpansionResult(
            log_value=-math.inf,
            terms=(),
            corrections=Corrections(eps1=None, eps2=None, base_log=-math.inf),
            k=k,
            conjectural=conjectural,
        )

    with mpmath.workdps(_WORK_DPS):
        lam = mpmath.mpf(d) / (n - 1)
        big_lambda = lam * (1 - lam)
        entropy = lam * mpmath.log(lam) + (1 - lam) * mpmath.log(1 - lam)
        base = (
            mpmath.log(2) / 2
            + mpmath.mpf(math.comb(n, 2)) * entropy
            + n * mpmath.log(mpmath.mpf(math.comb(n - 1, d)))
        )
        terms = []
        for j in range(1, k + 1):
            pj = mpmath.mpf(0)
            for power, coeff in _P_POLYS[j]:
                pj += (
                    mpmath.mpf(coeff.numerator)
                    / coeff.denominator
                    * big_lambda**power
                )
            terms.append(float(pj / (big_lambda**j * mpmath.mpf(n) ** (j - 1))))
        log_value = float(base + mpmath.fsum(terms))
        base_f = float(base)

    if 2 <= d <= n - 3:
        eps1, eps2 = corrections(n, d)
    else:
        eps1, eps2 = None, None

    return RegularExpansionResult(
        log_value=log_value,
        terms=tuple(terms),
        corrections=Corrections(eps1=eps1, eps2=eps2, base_log=base_f),
        k=k,
        conjectural=conjectural,
    )
