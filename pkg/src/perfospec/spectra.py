"""Eigenvalue counting and low eigenpairs for sparse symmetric operators.

Counting below a threshold uses Sylvester inertia: the number of eigenvalues
of ``A`` at most ``E`` equals the number of negative pivots of a symmetric
factorization of ``A - E*I``.  Small operators take a dense eigendecomposition
instead, which doubles as the exact oracle in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh, splu

from . import rng
from .errors import EigensolverError, FactorizationError
from .geometry import ObstacleMask
from .operators import SparseSymmetricOperator

__all__ = ["CountResult", "count_below", "count_below_many", "lowest_k",
           "component_count", "DENSE_CUTOFF"]

DENSE_CUTOFF = 500
_DENSE_FALLBACK_LIMIT = 4000


@dataclass(frozen=True)
class CountResult:
    energy: float
    count: int
    method: str  # "inertia" or "dense"


def _tie_shift(E: float) -> float:
    # "count <= E" with exact discrete multiplicities: count below E + tau
    return E + 1e-12 * (1.0 + abs(E))


def _dense_eigenvalues(matrix: sparse.spmatrix) -> np.ndarray:
    return np.linalg.eigvalsh(np.asarray(matrix.todense()))


def _inertia_at(matrix: sparse.spmatrix, shift: float) -> int:
    """Negative-pivot count of ``matrix - shift*I`` via a symmetric LU.

    SuperLU in symmetric mode with a zero diagonal-pivot threshold keeps the
    row and column permutations equal unless it meets an exactly-zero pivot;
    in that case (or on a numerically tiny pivot) we raise and let the caller
    perturb the shift.
    """
    n = matrix.shape[0]
    shifted = (matrix - shift * sparse.identity(n, format="csr")).tocsc()
    try:
        lu = splu(shifted, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                  options={"SymmetricMode": True})
    except RuntimeError as exc:  # exactly singular
        raise FactorizationError(f"factorization breakdown at shift {shift}: {exc}")
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise FactorizationError(f"pivoting broke symmetry at shift {shift}")
    pivots = lu.U.diagonal()
    if not np.all(np.isfinite(pivots)):
        raise FactorizationError(f"non-finite pivots at shift {shift}")
    if np.min(np.abs(pivots)) <= 1e-12 * np.max(np.abs(pivots)):
        raise FactorizationError(f"near-zero pivot at shift {shift}")
    return int((pivots < 0).sum())


def count_below(A: SparseSymmetricOperator, E: float, method: str = "auto") -> CountResult:
    """Number of eigenvalues of ``A`` less than or equal to ``E``.

    ``method`` is ``auto`` (dense below :data:`DENSE_CUTOFF`, inertia above),
    or ``dense``/``inertia`` to force a path.  A factorization breakdown
    triggers a perturbed shift and finally a dense fallback; a wrong count is
    never returned silently.
    """
    if not np.isfinite(E):
        raise ValueError(f"energy must be finite, got {E}")
    n = A.dimension
    if n == 0:
        return CountResult(energy=E, count=0, method="dense")
    if method not in ("auto", "dense", "inertia"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense" or (method == "auto" and n <= DENSE_CUTOFF):
        w = _dense_eigenvalues(A.matrix)
        return CountResult(energy=E, count=int((w <= _tie_shift(E)).sum()), method="dense")

    shifts = [_tie_shift(E),
              _tie_shift(E + 1e-10 * (1.0 + abs(E))),
              _tie_shift(E + 2e-10 * (1.0 + abs(E)))]
    last = None
    for shift in shifts:
        try:
            return CountResult(energy=E, count=_inertia_at(A.matrix, shift), method="inertia")
        except FactorizationError as exc:
            last = exc
    if n <= _DENSE_FALLBACK_LIMIT:
        w = _dense_eigenvalues(A.matrix)
        return CountResult(energy=E, count=int((w <= _tie_shift(E)).sum()), method="dense")
    raise FactorizationError(f"all shifts failed for E={E}: {last}")


def count_below_many(A: SparseSymmetricOperator, energies: np.ndarray,
                     method: str = "auto") -> np.ndarray:
    """Counts at many energies; the dense path factorizes the spectrum once."""
    energies = np.asarray(energies, dtype=float)
    n = A.dimension
    if n == 0:
        return np.zeros(energies.shape, dtype=np.int64)
    if method == "dense" or (method == "auto" and n <= DENSE_CUTOFF):
        w = np.sort(_dense_eigenvalues(A.matrix))
        shifted = np.array([_tie_shift(E) for E in energies])
        return np.searchsorted(w, shifted, side="right").astype(np.int64)
    return np.array([count_below(A, float(E), method=method).count for E in energies],
                    dtype=np.int64)


def lowest_k(A: SparseSymmetricOperator, k: int,
             residual_tol: float = 1e-8) -> list[tuple[float, np.ndarray]]:
    """The ``k`` smallest eigenpairs, ascending, with certified residuals.

    Each returned pair satisfies ``|A v - lambda v| <= residual_tol * |A|``
    (infinity norm of the operator); failure to converge raises
    :class:`EigensolverError` carrying the best residual achieved.
    """
    n = A.dimension
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= dimension, got k={k}, dimension={n}")
    matrix = A.matrix
    norm_a = float(np.abs(matrix).sum(axis=1).max()) or 1.0

    def _residuals(w, V):
        r = matrix @ V - V * w[None, :]
        return np.sqrt((r * r).sum(axis=0))

    if n <= DENSE_CUTOFF or k >= n - 1:
        w, V = np.linalg.eigh(np.asarray(matrix.todense()))
        return [(float(w[i]), V[:, i]) for i in range(k)]

    sigma = -max(1e-8, 1e-3 * norm_a)
    # deterministic start vectors keep repeated runs bit-identical; the first
    # is positive (never orthogonal to the bottom eigenvector of these
    # nonnegative stencils), the second is a keyed pseudorandom fallback
    starts = [np.full(n, 1.0 / math.sqrt(n)),
              rng.uniforms(rng.site_keys(0xE16, np.arange(n)[:, None])) - 0.5]
    best: tuple[float, np.ndarray, np.ndarray] | None = None
    for (tol, ncv), v0 in zip(((0.0, None), (1e-14, min(n - 1, max(4 * k + 10, 40)))),
                              starts):
        try:
            w, V = eigsh(matrix, k=k, sigma=sigma, which="LM", tol=tol,
                         ncv=ncv, maxiter=50 * n, v0=v0)
        except Exception:
            continue
        order = np.argsort(w)
        w, V = w[order], V[:, order]
        res = _residuals(w, V)
        if best is None or res.max() < best[0]:
            best = (float(res.max()), w, V)
        if res.max() <= residual_tol * norm_a:
            return [(float(w[i]), V[:, i]) for i in range(k)]
    if n <= _DENSE_FALLBACK_LIMIT:
        w, V = np.linalg.eigh(np.asarray(matrix.todense()))
        return [(float(w[i]), V[:, i]) for i in range(k)]
    achieved = best[0] if best else float("inf")
    raise EigensolverError(
        f"eigensolver residual {achieved:.3e} exceeds {residual_tol * norm_a:.3e}",
        achieved_residual=achieved)


def component_count(mask: ObstacleMask) -> int:
    """Connected components of the retained cells under 2d-adjacency."""
    retained = ~mask.occupied
    n_nodes = int(retained.sum())
    if n_nodes == 0:
        return 0
    d = retained.ndim
    node_id = np.full(retained.shape, -1, dtype=np.int64)
    node_id[retained] = np.arange(n_nodes)
    rows, cols = [], []
    full = (slice(None),) * d
    for axis in range(d):
        lo = full[:axis] + (slice(None, -1),) + full[axis + 1:]
        hi = full[:axis] + (slice(1, None),) + full[axis + 1:]
        pair = retained[lo] & retained[hi]
        rows.append(node_id[lo][pair])
        cols.append(node_id[hi][pair])
    i = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    j = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    adj = sparse.coo_matrix((np.ones(i.size), (i, j)), shape=(n_nodes, n_nodes))
    n_comp, _ = connected_components(adj.tocsr(), directed=False)
    return int(n_comp)
