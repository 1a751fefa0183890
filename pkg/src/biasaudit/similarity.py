"""Global sample proximity from the comparability graph via random walk with restart.

The graph adjacency A is symmetrically normalized,
W = D^(-1/2) A D^(-1/2), and the proximity matrix solves

    Q = (1 - p) (I - p W)^(-1),

where p in [0, 1) is the damping factor. Smaller p keeps more restart
mass on the diagonal and therefore more locality. Two interchangeable
backends are provided: an exact dense solve and a fixed-point iteration
Q_{k+1} = (1 - p) I + p W Q_k. A cheap bypass that uses the
row-normalized adjacency directly (no walk) is available for large data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .comparability import ComparabilityGraph


class ConvergenceError(RuntimeError):
    """Fixed-point iteration did not reach tolerance within the iteration cap."""


@dataclass(frozen=True)
class NormalizedAdjacency:
    """Symmetrically normalized adjacency; rows of isolated vertices are zero."""

    matrix: sparse.csr_matrix
    degree: np.ndarray

    @property
    def n(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense proximity matrix; `damping` is None for the adjacency bypass."""

    matrix: np.ndarray
    damping: float | None

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self):
        return self.matrix.shape[0]


def symmetric_normalize(g: ComparabilityGraph) -> NormalizedAdjacency:
    """Compute W = D^(-1/2) A D^(-1/2) with zero rows for degree-0 vertices."""
    inv_sqrt = np.zeros(g.n)
    nonzero = g.degree > 0
    inv_sqrt[nonzero] = 1.0 / np.sqrt(g.degree[nonzero])
    scale = sparse.diags(inv_sqrt)
    w = scale @ g.adjacency.astype(float) @ scale
    return NormalizedAdjacency(matrix=w.tocsr(), degree=g.degree)


def rwr_proximity(
    w: NormalizedAdjacency,
    damping: float = 0.1,
    backend: str = "dense",
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> SimilarityMatrix:
    """Solve Q = (1 - p)(I - p W)^(-1) for the damping factor p.

    Parameters
    ----------
    w : NormalizedAdjacency
        Symmetrically normalized graph; spectral radius <= 1.
    damping : float
        Walk continuation probability p, 0 <= p < 1. p = 0 gives Q = I.
    backend : str
        "dense" solves the linear system directly; "iterative" runs the
        fixed point Q_{k+1} = (1 - p) I + p W Q_k until the max-norm
        update falls below `tol`. Both agree entrywise to solver
        precision; the iterative form only touches the sparse W.
    tol : float
        Max-norm convergence tolerance of the iterative backend.
    max_iter : int
        Iteration cap of the iterative backend.

    Raises
    ------
    ConvergenceError
        If the iterative backend exceeds `max_iter`; the message reports
        the final residual.
    """
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0, 1)")
    n = w.n
    if backend == "dense":
        system = np.eye(n) - damping * w.matrix.toarray()
        q = np.linalg.solve(system, (1.0 - damping) * np.eye(n))
    elif backend == "iterative":
        restart = (1.0 - damping) * np.eye(n)
        q = restart.copy()
        for _ in range(max_iter):
            q_next = restart + damping * (w.matrix @ q)
            delta = np.abs(q_next - q).max()
            q = q_next
            if delta <= tol:
                break
        else:
            raise ConvergenceError(
                f"no convergence after {max_iter} iterations; residual {delta:.3e}"
            )
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return SimilarityMatrix(matrix=np.clip(q, 0.0, 1.0), damping=damping)


def adjacency_similarity(g: ComparabilityGraph) -> SimilarityMatrix:
    """Row-normalized adjacency as a similarity, bypassing the walk.

    Intended for data large enough that solving for Q is not worth it;
    isolated vertices get an all-zero row (their own diagonal included),
    so downstream estimates may come back undefined for them.
    """
    inv_deg = np.zeros(g.n)
    nonzero = g.degree > 0
    inv_deg[nonzero] = 1.0 / g.degree[nonzero]
    q = sparse.diags(inv_deg) @ g.adjacency.astype(float)
    return SimilarityMatrix(matrix=q.toarray(), damping=None)
