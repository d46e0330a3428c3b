"""Finite-difference Laplacians on the perforated box.

Grid nodes are the unoccupied cells of an :class:`ObstacleMask`; the stencil
is the standard ``2d+1``-point one with spacing ``h = 1/M``, in energy units
(entries carry ``1/h^2``).  A missing neighbour contributes to the diagonal
according to the boundary condition on the interface it represents:

* retained neighbour: ``+1/h^2`` (and off-diagonal ``-1/h^2``),
* occupied (obstacle) neighbour under Dirichlet: ``+1/h^2`` — the deleted
  node stays in the stencil, which is also the exact limit of the penalty
  operator as the potential amplitude grows,
* out-of-box neighbour under Dirichlet: ``+2/h^2`` — a ghost node mirrored
  across the box face, so the wall sits exactly on the boundary of the box
  and eigenvalues converge at second order in ``h``,
* Neumann on either interface: ``+0`` (graph-Laplacian row).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import EmptyDomainError, ValidationError
from .geometry import BoxSpec, ObstacleMask

__all__ = [
    "BoundaryCondition",
    "SparseSymmetricOperator",
    "PotentialOperator",
    "assemble",
    "assemble_potential",
    "operator_to_text",
]

DIRICHLET = "dirichlet"
NEUMANN = "neumann"


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary condition on the obstacle boundary and on the box boundary."""

    on_obstacle: str
    on_box: str

    def __post_init__(self):
        for side in (self.on_obstacle, self.on_box):
            if side not in (DIRICHLET, NEUMANN):
                raise ValidationError(f"unknown boundary condition {side!r}")

    @classmethod
    def parse(cls, label: str) -> "BoundaryCondition":
        """Parse a two-letter label like ``DD``, ``NN``, ``ND`` (obstacle, box)."""
        table = {"D": DIRICHLET, "N": NEUMANN}
        label = label.strip().upper()
        if len(label) != 2 or label[0] not in table or label[1] not in table:
            raise ValidationError(f"cannot parse boundary condition {label!r}")
        return cls(on_obstacle=table[label[0]], on_box=table[label[1]])

    @property
    def label(self) -> str:
        return ("D" if self.on_obstacle == DIRICHLET else "N") + (
            "D" if self.on_box == DIRICHLET else "N")


DD = BoundaryCondition(DIRICHLET, DIRICHLET)
NN = BoundaryCondition(NEUMANN, NEUMANN)
ND = BoundaryCondition(NEUMANN, DIRICHLET)
DN = BoundaryCondition(DIRICHLET, NEUMANN)


@dataclass(frozen=True, eq=False)
class SparseSymmetricOperator:
    """An assembled operator plus the grid metadata needed to interpret it.

    ``node_cells[i]`` is the C-order flat index of the grid cell behind matrix
    row ``i`` (empty for operators wrapped from a raw matrix).
    """

    matrix: sparse.csr_matrix
    node_cells: np.ndarray
    h: float
    box: BoxSpec | None
    bc: BoundaryCondition | None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(cls, matrix, h: float = 1.0, box: BoxSpec | None = None,
                    bc: BoundaryCondition | None = None) -> "SparseSymmetricOperator":
        """Wrap an existing symmetric sparse/dense matrix (used by tests/tools)."""
        matrix = sparse.csr_matrix(matrix)
        return cls(matrix=matrix, node_cells=np.arange(matrix.shape[0]),
                   h=h, box=box, bc=bc)


def _grid_matrix(occupied: np.ndarray, h: float, w_obstacle: float,
                 w_box: float) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Assemble the stencil on the retained cells of ``occupied``.

    ``w_obstacle``/``w_box`` are the diagonal weights (units of ``1/h^2``)
    contributed by an occupied neighbour / an out-of-box neighbour.
    """
    retained = ~occupied
    n_nodes = int(retained.sum())
    if n_nodes == 0:
        raise EmptyDomainError("all grid cells are occupied")
    d = occupied.ndim
    h2inv = 1.0 / (h * h)

    node_id = np.full(occupied.shape, -1, dtype=np.int64)
    node_id[retained] = np.arange(n_nodes)

    diag = np.zeros(n_nodes)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []

    full = (slice(None),) * d
    for axis in range(d):
        lo = full[:axis] + (slice(None, -1),) + full[axis + 1:]
        hi = full[:axis] + (slice(1, None),) + full[axis + 1:]
        ret_lo, ret_hi = retained[lo], retained[hi]

        pair = ret_lo & ret_hi
        i, j = node_id[lo][pair], node_id[hi][pair]
        rows.append(i)
        cols.append(j)
        np.add.at(diag, i, h2inv)
        np.add.at(diag, j, h2inv)

        if w_obstacle != 0.0:
            at_obstacle = np.concatenate([node_id[lo][ret_lo & occupied[hi]],
                                          node_id[hi][ret_hi & occupied[lo]]])
            np.add.at(diag, at_obstacle, w_obstacle * h2inv)

        if w_box != 0.0:
            first = full[:axis] + (0,) + full[axis + 1:]
            last = full[:axis] + (-1,) + full[axis + 1:]
            for face in (first, last):
                ids = node_id[face][retained[face]]
                np.add.at(diag, ids, w_box * h2inv)

    i = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    j = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    off = np.full(i.size, -h2inv)
    matrix = sparse.coo_matrix(
        (np.concatenate([off, off, diag]),
         (np.concatenate([i, j, np.arange(n_nodes)]),
          np.concatenate([j, i, np.arange(n_nodes)]))),
        shape=(n_nodes, n_nodes)).tocsr()
    return matrix, np.flatnonzero(retained.ravel(order="C"))


def assemble(mask: ObstacleMask, bc: BoundaryCondition) -> SparseSymmetricOperator:
    """Laplacian on the retained cells of the mask with the given conditions."""
    w_obstacle = 1.0 if bc.on_obstacle == DIRICHLET else 0.0
    w_box = 2.0 if bc.on_box == DIRICHLET else 0.0
    matrix, node_cells = _grid_matrix(mask.occupied, mask.h, w_obstacle, w_box)
    return SparseSymmetricOperator(matrix=matrix, node_cells=node_cells,
                                   h=mask.h, box=mask.box, bc=bc)


@dataclass(frozen=True, eq=False)
class PotentialOperator:
    """Full-grid Laplacian plus ``b`` on the diagonal of occupied cells."""

    base: SparseSymmetricOperator
    amplitude: float
    support: ObstacleMask

    def to_operator(self) -> SparseSymmetricOperator:
        chi = self.support.occupied.ravel(order="C").astype(float)
        matrix = (self.base.matrix + self.amplitude * sparse.diags(chi)).tocsr()
        return SparseSymmetricOperator(matrix=matrix, node_cells=self.base.node_cells,
                                       h=self.base.h, box=self.base.box, bc=self.base.bc)


def assemble_potential(mask: ObstacleMask, b: float, box_bc: str) -> PotentialOperator:
    """Comparison operator with a finite potential of height ``b`` on the obstacle."""
    if b < 0:
        raise ValidationError(f"potential amplitude must be >= 0, got {b}")
    if box_bc not in (DIRICHLET, NEUMANN):
        raise ValidationError(f"unknown box boundary condition {box_bc!r}")
    w_box = 2.0 if box_bc == DIRICHLET else 0.0
    empty = np.zeros_like(mask.occupied)
    matrix, node_cells = _grid_matrix(empty, mask.h, 0.0, w_box)
    base = SparseSymmetricOperator(matrix=matrix, node_cells=node_cells, h=mask.h,
                                   box=mask.box, bc=BoundaryCondition(NEUMANN, box_bc))
    return PotentialOperator(base=base, amplitude=float(b), support=mask)


def operator_to_text(op: SparseSymmetricOperator) -> str:
    """Coordinate-format export: header line, then ``row col value`` rows.

    Entries are sorted row-major with ascending column, so identical operators
    serialize identically.
    """
    coo = op.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    buf = io.StringIO()
    meta = {
        "dimension": op.dimension,
        "h": op.h,
        "L": op.box.L if op.box else None,
        "d": op.box.d if op.box else None,
        "bc": op.bc.label if op.bc else None,
    }
    buf.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
        buf.write(f"{int(r)} {int(c)} {float(v)!r}\n")
    return buf.getvalue()
