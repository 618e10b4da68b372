"""Quadratic-form matrix of the edge weights and its Gaussian companion.

A is the lambda(1-lambda)-weighted signless Laplacian scaled by
1/(Lambda n).  The Gaussian vector Y attached to an instance has
covariance (Lambda n A)^{-1}; T is the symmetric inverse square root of
A, so T' A T = I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .betas import BetaState
from .errors import DomainError
from .graphs import Graph

__all__ = ["GaussianModel", "build_gaussian_model", "pairwise_covariance"]


@dataclass(frozen=True)
class GaussianModel:
    A: np.ndarray
    log_det_A: float
    Sigma: np.ndarray
    T: np.ndarray
    Lambda: float
    n: int


def build_gaussian_model(graph: Graph, state: BetaState) -> GaussianModel:
    """Assemble A from per-edge contributions and derive its companions.

    Raises DomainError when A is numerically singular (minimum eigenvalue
    below 1e-12 times the maximum), which happens exactly when the graph
    is bipartite or the edge weights degenerate.
    """
    n = graph.n
    mask = graph.adjacency()
    w = state.lam * (1.0 - state.lam) * mask
    a = (w + np.diag(w.sum(axis=1))) / (state.Lambda * n)

    evals, evecs = scipy.linalg.eigh(a, check_finite=False)
    if evals[0] < 1e-12 * evals[-1]:
        raise DomainError(
            f"quadratic-form matrix is numerically singular: "
            f"min eigenvalue {evals[0]:.3e} vs max {evals[-1]:.3e}"
        )
    t = (evecs / np.sqrt(evals)) @ evecs.T

    chol, low = scipy.linalg.cho_factor(a, check_finite=False)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    sigma = scipy.linalg.cho_solve((chol, low), np.eye(n), check_finite=False)
    sigma /= state.Lambda * n
    sigma = (sigma + sigma.T) / 2.0

    return GaussianModel(
        A=a,
        log_det_A=log_det,
        Sigma=sigma,
        T=t,
        Lambda=state.Lambda,
        n=n,
    )


def pairwise_covariance(model: GaussianModel, j: int, k: int, u: int, v: int) -> float:
    """Covariance of the scaled pair variables
    Y_jk = sqrt(Lambda n) (Y_j + Y_k) and Y_uv."""
    s = model.Sigma
    return model.Lambda * model.n * float(s[j, u] + s[j, v] + s[k, u] + s[k, v])
