"""Logistic degree-fitting: lambda weights, residuals, and beta solvers.

Each edge jk carries the weight lambda_jk = sigmoid(beta_j + beta_k).
The target system asks the weighted degree sum at every vertex to match
d_j; delta is the per-vertex defect.  A closed-form approximation solves
a single linear system in the signless Laplacian; the exact system is
solved by damped Newton iteration started from that approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DomainError
from .graphs import Graph, density_parameters, signless_laplacian

__all__ = [
    "BetaState",
    "DeltaResidual",
    "lambda_matrix",
    "delta_residual",
    "beta_state",
    "approx_beta",
    "solve_beta",
]


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lambda_matrix(graph: Graph, beta: Sequence[float]) -> np.ndarray:
    """Dense n-by-n matrix of edge weights sigmoid(beta_j + beta_k).

    Entries on non-edges are zero.  Stable for arguments of any size:
    the sigmoid is evaluated on the branch that never overflows.
    """
    beta_arr = np.asarray(beta, dtype=float)
    if beta_arr.shape != (graph.n,):
        raise DomainError(f"beta has shape {beta_arr.shape}, expected ({graph.n},)")
    if not np.all(np.isfinite(beta_arr)):
        raise DomainError("beta must be finite")
    sums = beta_arr[:, None] + beta_arr[None, :]
    lam = _stable_sigmoid(sums)
    mask = graph.adjacency()
    return lam * mask


class DeltaResidual(NamedTuple):
    delta: np.ndarray
    inf_norm: float
    one_norm: float


def delta_residual(graph: Graph, d: Sequence[float], beta: Sequence[float]) -> DeltaResidual:
    """Per-vertex defect sum_k lambda_jk - d_j with its sup and l1 norms."""
    d_arr = np.asarray(d, dtype=float)
    if d_arr.shape != (graph.n,):
        raise DomainError(f"degree vector has shape {d_arr.shape}, expected ({graph.n},)")
    lam = lambda_matrix(graph, beta)
    delta = lam.sum(axis=1) - d_arr
    return DeltaResidual(
        delta=delta,
        inf_norm=float(np.max(np.abs(delta))) if graph.n else 0.0,
        one_norm=float(np.sum(np.abs(delta))),
    )


@dataclass(frozen=True)
class BetaState:
    """A beta vector with its derived edge weights and residual."""

    beta: np.ndarray
    lam: np.ndarray
    delta: np.ndarray
    lambda_bar: float
    Lambda: float


def beta_state(graph: Graph, d: Sequence[float], beta: Sequence[float]) -> BetaState:
    """Bundle beta with lambda_jk, delta, and the global density factors."""
    beta_arr = np.asarray(beta, dtype=float)
    lam = lambda_matrix(graph, beta_arr)
    res = delta_residual(graph, d, beta_arr)
    lambda_bar, big_lambda = density_parameters(graph, d)
    return BetaState(
        beta=beta_arr,
        lam=lam,
        delta=res.delta,
        lambda_bar=lambda_bar,
        Lambda=big_lambda,
    )


def _spd_solve(a: np.ndarray, b: np.ndarray, jitter: float = 0.0) -> np.ndarray:
    m = a if jitter == 0.0 else a + jitter * np.eye(a.shape[0])
    c, low = scipy.linalg.cho_factor(m, check_finite=False)
    return scipy.linalg.cho_solve((c, low), b, check_finite=False)


def approx_beta(graph: Graph, d: Sequence[float]) -> np.ndarray:
    """Closed-form near-solution beta_j = log(lambda/(1-lambda))/2 + gamma_j
    with gamma solving Q(G) gamma = (d - lambda g) / Lambda."""
    d_arr = np.asarray(d, dtype=float)
    if d_arr.shape != (graph.n,):
        raise DomainError(f"degree vector has shape {d_arr.shape}, expected ({graph.n},)")
    lam, big_lambda = density_parameters(graph, d_arr)
    if not 0.0 < lam < 1.0:
        raise DomainError(f"edge density lambda={lam} must lie strictly inside (0, 1)")
    q = signless_laplacian(graph)
    rhs = d_arr - lam * np.asarray(graph.g, dtype=float)
    try:
        gamma = _spd_solve(q, rhs) / big_lambda
    except np.linalg.LinAlgError:
        raise DomainError(
            "signless Laplacian is singular (graph has a bipartite component)"
        ) from None
    return 0.5 * math.log(lam / (1.0 - lam)) + gamma


def solve_beta(
    graph: Graph,
    d: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 50,
) -> BetaState:
    """Damped Newton solve of the degree-fitting equations.

    Requires interior targets 0 < d_j < g_j.  The Jacobian of the
    residual is the lambda(1-lambda)-weighted signless Laplacian, which
    is symmetric positive semidefinite; solves use Cholesky with a small
    diagonal jitter when needed.  The returned state is re-evaluated from
    scratch, so its residual is an independent check on convergence.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    d_arr = np.asarray(d, dtype=float)
    if d_arr.shape != (graph.n,):
        raise DomainError(f"degree vector has shape {d_arr.shape}, expected ({graph.n},)")
    g_arr = np.asarray(graph.g, dtype=float)
    if np.any(d_arr <= 0) or np.any(d_arr >= g_arr):
        raise DomainError(
            "solve_beta needs interior targets 0 < d_j < g_j; "
            "delete forced or forbidden edges first"
        )

    beta = approx_beta(graph, d_arr)
    mask = graph.adjacency()
    best_beta = beta.copy()
    best_inf = math.inf

    for _ in range(max_iter):
        lam = lambda_matrix(graph, beta)
        delta = lam.sum(axis=1) - d_arr
        inf = float(np.max(np.abs(delta)))
        if inf < best_inf:
            best_inf = inf
            best_beta = beta.copy()
        if inf <= tol:
            return beta_state(graph, d_arr, beta)
        w = lam * (1.0 - lam) * mask
        jac = w + np.diag(w.sum(axis=1))
        try:
            step = _spd_solve(jac, -delta)
        except np.linalg.LinAlgError:
            step = _spd_solve(jac, -delta, jitter=1e-12)
        f0 = float(delta @ delta)
        t = 1.0
        for _ in range(40):
            candidate = beta + t * step
            new_delta = lambda_matrix(graph, candidate).sum(axis=1) - d_arr
            if float(new_delta @ new_delta) < f0:
                beta = candidate
                break
            t *= 0.5
        else:
            raise ConvergenceError(
                "line search failed to reduce the residual",
                beta=best_beta,
                residual_inf=best_inf,
            )

    lam = lambda_matrix(graph, beta)
    delta = lam.sum(axis=1) - d_arr
    inf = float(np.max(np.abs(delta)))
    if inf <= tol:
        return beta_state(graph, d_arr, beta)
    if inf < best_inf:
        best_inf, best_beta = inf, beta.copy()
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations "
        f"(best residual sup-norm {best_inf:.3e} > tol {tol:.3e})",
        beta=best_beta,
        residual_inf=best_inf,
    )
