"""Shared test utilities: independent oracles kept deliberately naive.

Everything here recomputes results with plain python loops or dense numpy so
that library bugs cannot hide behind shared code paths.
"""

from __future__ import annotations

import itertools

import numpy as np

from perfospec.geometry import BoxSpec, ObstacleMask
from perfospec.operators import DIRICHLET, BoundaryCondition


def make_mask(occupied: np.ndarray, L: float, M: int, seed: int = 0) -> ObstacleMask:
    """Build a mask straight from an occupancy bitmap (cubic or rectangular)."""
    occupied = np.asarray(occupied, dtype=bool)
    h = 1.0 / M
    measured = float(occupied.sum()) * h**occupied.ndim
    return ObstacleMask(box=BoxSpec(d=occupied.ndim, L=L), cells_per_unit=M,
                        occupied=occupied, measured_volume=measured,
                        fraction=measured * (2.0 / L) ** occupied.ndim, seed=seed)


def brute_force_operator(mask: ObstacleMask, bc: BoundaryCondition) -> np.ndarray:
    """Dense stencil assembly by explicit loops (the assembly oracle).

    Face rule: retained neighbour -1/h^2 off-diagonal and +1/h^2 diagonal;
    occupied neighbour +1/h^2 if Dirichlet on the obstacle; out-of-box
    neighbour +2/h^2 if Dirichlet on the box; Neumann contributes nothing.
    """
    occ = mask.occupied
    h2inv = float(mask.cells_per_unit) ** 2
    cells = [idx for idx in itertools.product(*(range(s) for s in occ.shape))
             if not occ[idx]]
    index = {cell: i for i, cell in enumerate(cells)}
    n = len(cells)
    A = np.zeros((n, n))
    for cell, i in index.items():
        for axis in range(occ.ndim):
            for step in (-1, 1):
                nb = list(cell)
                nb[axis] += step
                nb = tuple(nb)
                if not (0 <= nb[axis] < occ.shape[axis]):
                    if bc.on_box == DIRICHLET:
                        A[i, i] += 2.0 * h2inv
                elif occ[nb]:
                    if bc.on_obstacle == DIRICHLET:
                        A[i, i] += h2inv
                else:
                    A[i, i] += h2inv
                    A[i, index[nb]] -= h2inv
    return A


def bfs_component_count(occupied: np.ndarray) -> int:
    """Connected components of unoccupied cells by hand-rolled BFS."""
    occ = np.asarray(occupied, dtype=bool)
    seen = np.zeros_like(occ, dtype=bool)
    count = 0
    for start in itertools.product(*(range(s) for s in occ.shape)):
        if occ[start] or seen[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = True
        while stack:
            cell = stack.pop()
            for axis in range(occ.ndim):
                for step in (-1, 1):
                    nb = list(cell)
                    nb[axis] += step
                    nb = tuple(nb)
                    if 0 <= nb[axis] < occ.shape[axis] and not occ[nb] and not seen[nb]:
                        seen[nb] = True
                        stack.append(nb)
    return count


def dense_count(matrix, E: float) -> int:
    """Oracle eigenvalue count via a dense eigendecomposition."""
    w = np.linalg.eigvalsh(np.asarray(matrix.todense() if hasattr(matrix, "todense")
                                      else matrix))
    return int((w <= E + 1e-12 * (1.0 + abs(E))).sum())


def random_bitmap(generator: np.random.Generator, shape, p_occupied: float) -> np.ndarray:
    """Random occupancy bitmap guaranteed to keep at least one cell free."""
    occ = generator.random(shape) < p_occupied
    if occ.all():
        occ.flat[generator.integers(occ.size)] = False
    return occ
